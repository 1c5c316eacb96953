//! `realforms`: command-line access to the closed-form analysis, the gluing
//! oracle, extremal constructions and exhaustive enumeration.
//!
//! Exit codes: 0 ok, 1 domain or verdict failure, 2 parse error, 3 resource
//! limit.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use realforms::search::{best_single_contour, extremal_genus, max_total_at, SearchError};
use realforms::{
    build_surface, check_checkerboard, check_orientable_forms, construct_extremal,
    construct_extremal_n3, enumerate_models, f_bound, genus_lower_bound, genus_oracle, max_h,
    oval_counts, planar_presentation, trace_ovals, EnumerationBounds, EquipmentError,
    EquipmentModel, OracleError, OvalReport, SwellingSystem, Violation, DEFAULT_ORACLE_LIMIT,
};

#[derive(Parser)]
#[command(
    name = "realforms",
    version,
    about = "Real forms of Riemann surfaces with commuting symmetries"
)]
struct Cli {
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model or swelling system; prints "ok" or a JSON list of violations.
    Validate {
        /// Input file; stdin when omitted or "-".
        file: Option<PathBuf>,
    },
    /// Genus, μ, oval counts and bound verdicts for each model in the input.
    Analyze {
        file: Option<PathBuf>,
        /// Include the planar-realization presentation.
        #[arg(long)]
        presentation: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Glue the surface explicitly and compare with the closed forms.
    Oracle {
        file: Option<PathBuf>,
        /// Largest n to glue (2^n copies).
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
        /// Write the cell incidence listing to stderr.
        #[arg(long)]
        dump: bool,
    },
    /// The extremal polygon model for n forms and m tail pairs.
    Extremal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Every model within the bounds, one canonical representative per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Bound on the total number of sides.
        #[arg(long)]
        max_m: usize,
        /// Bound on the number of contours.
        #[arg(long, default_value_t = 1)]
        max_k: usize,
        /// Bound on the quotient genus.
        #[arg(long, default_value_t = 0)]
        max_quotient_genus: u32,
        /// Drop models whose surface genus exceeds this.
        #[arg(long)]
        max_genus: Option<u64>,
    },
    /// Largest h = total − 2g over the enumerated family, overall and per genus.
    MaxH {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_m: usize,
        #[arg(long, default_value_t = 1)]
        max_k: usize,
        #[arg(long, default_value_t = 0)]
        max_quotient_genus: u32,
    },
    /// f(n) and the least admissible genus for n up to --max-n.
    BoundsTable {
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Debug)]
enum Failure {
    /// Exit 1: invalid input or a failed verdict.
    Domain(String),
    /// Exit 2.
    Parse(String),
    /// Exit 3.
    Limit(String),
    /// Exit 1 after output was already written.
    Silent,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) | Failure::Silent => 1,
            Failure::Parse(_) => 2,
            Failure::Limit(_) => 3,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BudgetExceeded(_) => Failure::Limit(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<EquipmentError> for Failure {
    fn from(e: EquipmentError) -> Self {
        Failure::Domain(e.to_string())
    }
}

/// A model, or a bare swelling system (quotient genus 0).
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    n: usize,
    contours: Vec<Vec<u32>>,
    #[serde(default)]
    quotient_genus: u32,
}

fn read_input(file: &Option<PathBuf>) -> Result<String, Failure> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

/// One JSON document, or JSON-lines.
fn parse_inputs(text: &str) -> Result<Vec<Input>, Failure> {
    let mut out = Vec::new();
    for (i, value) in serde_json::Deserializer::from_str(text)
        .into_iter::<Input>()
        .enumerate()
    {
        out.push(value.map_err(|e| Failure::Parse(format!("document {}: {e}", i + 1)))?);
    }
    if out.is_empty() {
        return Err(Failure::Parse("no input".into()));
    }
    Ok(out)
}

/// Builds a model, tolerating generators that label no side (with a note).
fn to_model(input: &Input) -> Result<EquipmentModel, Failure> {
    let sys = SwellingSystem::new(input.n, input.contours.clone());
    let violations = sys.validate();
    let only_unused = violations
        .iter()
        .all(|v| matches!(v, Violation::UnusedLabel { .. }));
    if violations.is_empty() {
        return Ok(EquipmentModel::new(sys, input.quotient_genus)?);
    }
    if !only_unused {
        return Err(Failure::Domain(
            serde_json::to_string(&violations).expect("violations serialize"),
        ));
    }
    let model = EquipmentModel::with_unused_generators(sys, input.quotient_genus)?;
    let unused = model.unused_generators();
    let names: Vec<String> = unused.iter().map(u32::to_string).collect();
    eprintln!(
        "note: generator(s) {} label no side; the glued surface has {} isomorphic components",
        names.join(", "),
        1u64 << unused.len()
    );
    Ok(model)
}

fn emit(out: &mut impl Write, value: &Value) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value).expect("JSON values serialize");
    writeln!(out)?;
    Ok(())
}

fn model_json(model: &EquipmentModel) -> Value {
    serde_json::to_value(model).expect("models serialize")
}

fn cmd_validate(file: &Option<PathBuf>, out: &mut impl Write) -> Result<(), Failure> {
    let text = read_input(file)?;
    let inputs = parse_inputs(&text)?;
    let mut failed = false;
    for input in &inputs {
        let sys = SwellingSystem::new(input.n, input.contours.clone());
        let mut problems: Vec<Value> = sys
            .validate()
            .iter()
            .map(|v| serde_json::to_value(v).expect("violations serialize"))
            .collect();
        if problems.is_empty() {
            if let Err(e) = EquipmentModel::new(sys, input.quotient_genus) {
                problems.push(json!({"kind": "inconsistent_genus", "message": e.to_string()}));
            }
        }
        if problems.is_empty() {
            writeln!(out, "ok")?;
        } else {
            failed = true;
            emit(out, &Value::Array(problems))?;
        }
    }
    if failed {
        Err(Failure::Silent)
    } else {
        Ok(())
    }
}

fn report_json(report: &OvalReport) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

fn cmd_analyze(
    file: &Option<PathBuf>,
    presentation: bool,
    format: Format,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let text = read_input(file)?;
    let inputs = parse_inputs(&text)?;
    let mut failed = false;
    if format == Format::Table {
        writeln!(
            out,
            "{:<28} {:>6} {:>8} {:<10} {:>6} {:>5} {:<20} {:>5} {:>5} {:>5}",
            "contours", "genus", "mu", "geometry", "total", "h", "ovals", "harn", "thm31", "gbnd"
        )?;
    }
    for input in &inputs {
        let model = match to_model(input) {
            Ok(m) => m,
            Err(Failure::Domain(msg)) => {
                eprintln!("invalid model: {msg}");
                failed = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let report = oval_counts(&model);
        match format {
            Format::Json => {
                let mut value = report_json(&report);
                if presentation {
                    value["presentation"] = serde_json::to_value(planar_presentation(&model))
                        .expect("presentations serialize");
                }
                emit(out, &value)?;
            }
            Format::Table => {
                let ovals: Vec<String> = report.ovals.values().map(u64::to_string).collect();
                let verdict = |v: Option<bool>| v.map_or("-".to_string(), |b| b.to_string());
                writeln!(
                    out,
                    "{:<28} {:>6} {:>8} {:<10} {:>6} {:>5} {:<20} {:>5} {:>5} {:>5}",
                    model.system().to_string(),
                    report.genus,
                    report.mu.to_string(),
                    report.geometry.to_string(),
                    report.total,
                    report.h,
                    ovals.join(","),
                    report.harnack_ok,
                    verdict(report.thm31_ok),
                    verdict(report.genus_bound_ok)
                )?;
                if presentation {
                    for r in &planar_presentation(&model).relations {
                        writeln!(out, "    {r}")?;
                    }
                }
            }
        }
    }
    if failed {
        Err(Failure::Silent)
    } else {
        Ok(())
    }
}

fn cmd_oracle(
    file: &Option<PathBuf>,
    limit: usize,
    dump: bool,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let text = read_input(file)?;
    let inputs = parse_inputs(&text)?;
    let mut disagreement = false;
    for input in &inputs {
        let model = to_model(input)?;
        let surface = build_surface(&model, limit).map_err(|e| match e {
            OracleError::LimitExceeded { .. } => Failure::Limit(e.to_string()),
            other => Failure::Domain(other.to_string()),
        })?;
        if dump {
            eprint!("{}", surface.incidence_listing());
        }
        let closed = oval_counts(&model);
        let genus = genus_oracle(&surface).map_err(|e| Failure::Domain(e.to_string()))?;
        let ovals = trace_ovals(&surface);
        let orientable = check_orientable_forms(&surface);
        let checkerboard = check_checkerboard(&surface);
        let genus_agrees = genus == closed.genus as i64;
        let ovals_agree = ovals == closed.ovals;
        let agreement =
            genus_agrees && ovals_agree && orientable.values().all(|&b| b) && checkerboard;
        disagreement |= !agreement;
        emit(
            out,
            &json!({
                "genus": genus,
                "ovals": ovals,
                "total": ovals.values().sum::<u64>(),
                "orientable": orientable,
                "checkerboard": checkerboard,
                "components": surface.components(),
                "euler_characteristic": surface.euler_characteristic(),
                "genus_agrees": genus_agrees,
                "ovals_agree": ovals_agree,
                "agreement": agreement,
            }),
        )?;
    }
    if disagreement {
        Err(Failure::Silent)
    } else {
        Ok(())
    }
}

fn cmd_extremal(n: usize, m: usize, out: &mut impl Write) -> Result<(), Failure> {
    let model = if n == 3 {
        if m == 0 {
            return Err(Failure::Domain("n + 2m = 3 must exceed 4".into()));
        }
        let m1 = 2 * m + 4;
        eprintln!(
            "note: n = 3: the polygon labeling would give adjacent sides the same label; \
             using the best labeling of a {m1}-gon instead (g = {})",
            2 * m + 1
        );
        construct_extremal_n3(m1)?
    } else {
        construct_extremal(n, m)?
    };
    let report = oval_counts(&model);
    if !model.unused_generators().is_empty() {
        eprintln!(
            "note: generator {} labels no side; the glued surface has 2 isomorphic components",
            n
        );
    }
    if n >= 4 {
        debug_assert_eq!(report.genus, extremal_genus(n, m));
    }
    let target = max_total_at(n, report.genus);
    if (report.total as i64) < target {
        let (best, best_total) = best_polygon(n, n + 2 * m);
        eprintln!(
            "note: oval total {} is below 2g - (n-9)2^(n-3) - 2 = {target} for this labeling{}",
            report.total,
            best.map_or(String::new(), |b| format!(
                "; best over all {}-gon labelings: {best_total} by {b}",
                n + 2 * m
            ))
        );
    }
    emit(out, &model_json(&model))
}

/// Best single-polygon labeling when the enumeration budget allows it.
fn best_polygon(n: usize, sides: usize) -> (Option<String>, u64) {
    match best_single_contour(n, sides) {
        Ok((model, total)) => (Some(model.system().to_string()), total),
        Err(_) => (None, 0),
    }
}

fn cmd_enumerate(
    bounds: EnumerationBounds,
    max_genus: Option<u64>,
    out: &mut impl Write,
) -> Result<(), Failure> {
    for model in enumerate_models(bounds)? {
        if max_genus.is_some_and(|g| model.genus() > g) {
            continue;
        }
        emit(out, &model_json(&model))?;
    }
    Ok(())
}

fn cmd_max_h(bounds: EnumerationBounds, out: &mut impl Write) -> Result<(), Failure> {
    let r = max_h(bounds)?;
    let per_genus: BTreeMap<String, Value> = r
        .per_genus
        .iter()
        .map(|(g, m)| {
            (
                g.to_string(),
                json!({"h": m.h, "witness": model_json(&m.witness)}),
            )
        })
        .collect();
    emit(
        out,
        &json!({
            "n": r.n,
            "f": r.f_bound,
            "max_h": r.overall,
            "tight": r.overall == r.f_bound,
            "models_checked": r.models_checked,
            "witnesses": r.witnesses.iter().map(model_json).collect::<Vec<_>>(),
            "per_genus": per_genus,
            "violations": r.violations.iter().map(model_json).collect::<Vec<_>>(),
        }),
    )?;
    if r.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Silent)
    }
}

fn cmd_bounds_table(max_n: usize, format: Format, out: &mut impl Write) -> Result<(), Failure> {
    if max_n < 2 {
        return Err(Failure::Domain("--max-n must be at least 2".into()));
    }
    if max_n > 62 {
        return Err(Failure::Domain("--max-n must be at most 62".into()));
    }
    if format == Format::Table {
        writeln!(out, "{:>3} {:>22} {:>22}", "n", "f(n)", "min genus")?;
    }
    for n in 2..=max_n {
        let f = f_bound(n)?;
        let lower = genus_lower_bound(n).ok();
        match format {
            Format::Json => emit(out, &json!({"n": n, "f": f, "genus_lower_bound": lower}))?,
            Format::Table => writeln!(
                out,
                "{n:>3} {f:>22} {:>22}",
                lower.map_or("-".to_string(), |g| g.to_string())
            )?,
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Failure::Domain(e.to_string()))?;
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file, &mut out),
        Command::Analyze {
            file,
            presentation,
            format,
        } => cmd_analyze(&file, presentation, format, &mut out),
        Command::Oracle {
            file,
            oracle_limit,
            dump,
        } => cmd_oracle(&file, oracle_limit, dump, &mut out),
        Command::Extremal { n, m } => cmd_extremal(n, m, &mut out),
        Command::Enumerate {
            n,
            max_m,
            max_k,
            max_quotient_genus,
            max_genus,
        } => cmd_enumerate(
            EnumerationBounds::new(n, max_k, max_m, max_quotient_genus),
            max_genus,
            &mut out,
        ),
        Command::MaxH {
            n,
            max_m,
            max_k,
            max_quotient_genus,
        } => cmd_max_h(
            EnumerationBounds::new(n, max_k, max_m, max_quotient_genus),
            &mut out,
        ),
        Command::BoundsTable { max_n, format } => cmd_bounds_table(max_n, format, &mut out),
    };
    out.flush()?;
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Domain(msg) => eprintln!("error: {msg}"),
                Failure::Parse(msg) => eprintln!("parse error: {msg}"),
                Failure::Limit(msg) => eprintln!("limit: {msg}"),
                Failure::Silent => {}
            }
            ExitCode::from(failure.code())
        }
    }
}
