//! Extremal families and exhaustive enumeration of small commutative
//! equipments up to isomorphism.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::equipment::{f_bound, oval_counts, EquipmentError, EquipmentModel};
use crate::group::MAX_RANK;
use crate::swelling::{canonical_key_unchecked, SwellingSystem};

/// Largest `n` accepted by [`enumerate_models`].
pub const MAX_ENUMERATION_RANK: usize = 5;
/// Largest `∑ m_i` accepted by [`enumerate_models`].
pub const MAX_ENUMERATION_LENGTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("parameters out of domain: {0}")]
    Domain(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Equipment(#[from] EquipmentError),
}

/// `g = 2^(n−3)(n + 2m − 4) + 1` for the extremal polygon family.
pub fn extremal_genus(n: usize, m: usize) -> u64 {
    (1u64 << (n - 3)) * (n + 2 * m - 4) as u64 + 1
}

/// `2g − (n−9)·2^(n−3) − 2`, the largest possible oval total at genus `g`.
pub fn max_total_at(n: usize, genus: u64) -> i64 {
    2 * genus as i64 - (n as i64 - 9) * (1i64 << (n - 3)) - 2
}

/// The right-angled `(n+2m)`-gon labeled `1, 2, …, n−1` followed by the tail
/// `2, n, 2, n, …, 2` (`2m + 1` entries), over a sphere quotient.
///
/// At `m = 0` the tail is just `2` and generator `n` labels no side; the
/// model is then built with [`EquipmentModel::with_unused_generators`].
///
/// The genus always equals [`extremal_genus`]. The oval total reaches
/// [`max_total_at`] for `n = 4` and for `m = 0`; for `n ≥ 5, m ≥ 1` side `n−1`
/// has distinct neighbours and the total falls short by `2^(n−3)` per unit
/// of `m`.
pub fn construct_extremal(n: usize, m: usize) -> Result<EquipmentModel, SearchError> {
    if n < 4 {
        return Err(SearchError::Domain(format!(
            "n = {n}: the polygon labeling needs n ≥ 4 (sides 2 and 3 would both map to 2 at n = 3)"
        )));
    }
    if n > MAX_RANK {
        return Err(SearchError::Domain(format!("n = {n} exceeds {MAX_RANK}")));
    }
    if n + 2 * m <= 4 {
        return Err(SearchError::Domain(format!(
            "n + 2m = {} must exceed 4",
            n + 2 * m
        )));
    }
    let mut contour: Vec<u32> = (1..n as u32).collect();
    for _ in 0..m {
        contour.extend([2, n as u32]);
    }
    contour.push(2);
    let sys = SwellingSystem::new(n, vec![contour]);
    let model = if m == 0 {
        EquipmentModel::with_unused_generators(sys, 0)?
    } else {
        EquipmentModel::new(sys, 0)?
    };
    Ok(model)
}

/// The best single-contour model for `n = 3` on a sphere quotient, i.e.
/// [`best_single_contour`] restricted to even `m₁ ≥ 6`, where `h = f(3)`.
pub fn construct_extremal_n3(m1: usize) -> Result<EquipmentModel, SearchError> {
    if m1 < 6 || !m1.is_multiple_of(2) {
        return Err(SearchError::Domain(format!(
            "m1 = {m1} must be even and at least 6"
        )));
    }
    best_single_contour(3, m1).map(|(model, _)| model)
}

/// Among all single-contour systems of length `m1` over `n` labels with
/// `g̃ = 0`, a model with the most ovals (least canonical key on ties) and its
/// total.
pub fn best_single_contour(n: usize, m1: usize) -> Result<(EquipmentModel, u64), SearchError> {
    check_budget(n, m1)?;
    let mut best: Option<(EquipmentModel, u64)> = None;
    for sys in canonical_systems(n, &[m1]) {
        let model = EquipmentModel::new(sys, 0)?;
        let total = oval_counts(&model).total;
        if best.as_ref().is_none_or(|(_, t)| total > *t) {
            best = Some((model, total));
        }
    }
    best.ok_or_else(|| {
        SearchError::Domain(format!("no valid contour of length {m1} over {n} labels"))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBounds {
    pub n: usize,
    pub max_contours: usize,
    pub max_total_m: usize,
    pub max_quotient_genus: u32,
}

impl EnumerationBounds {
    pub fn new(n: usize, max_contours: usize, max_total_m: usize, max_quotient_genus: u32) -> Self {
        Self {
            n,
            max_contours,
            max_total_m,
            max_quotient_genus,
        }
    }
}

fn check_budget(n: usize, total: usize) -> Result<(), SearchError> {
    if n == 0 {
        return Err(SearchError::Domain("n must be at least 1".into()));
    }
    if n > MAX_ENUMERATION_RANK {
        return Err(SearchError::BudgetExceeded(format!(
            "n = {n} > {MAX_ENUMERATION_RANK}"
        )));
    }
    if total > MAX_ENUMERATION_LENGTH {
        return Err(SearchError::BudgetExceeded(format!(
            "total length {total} > {MAX_ENUMERATION_LENGTH}"
        )));
    }
    Ok(())
}

/// Every valid model within the bounds exactly once up to isomorphism, as
/// canonical representatives, ordered by (canonical key, quotient genus).
pub fn enumerate_models(bounds: EnumerationBounds) -> Result<Vec<EquipmentModel>, SearchError> {
    let systems = enumerate_systems(bounds.n, bounds.max_contours, bounds.max_total_m)?;
    let mut out = Vec::with_capacity(systems.len() * (bounds.max_quotient_genus as usize + 1));
    for sys in systems {
        for g in 0..=bounds.max_quotient_genus {
            out.push(EquipmentModel::new(sys.clone(), g)?);
        }
    }
    Ok(out)
}

/// Canonical representatives of all valid swelling systems with at most
/// `max_contours` contours and total length at most `max_total_m`, ordered by
/// canonical key.
pub fn enumerate_systems(
    n: usize,
    max_contours: usize,
    max_total_m: usize,
) -> Result<Vec<SwellingSystem>, SearchError> {
    check_budget(n, max_total_m)?;
    let mut profiles = Vec::new();
    for k in 1..=max_contours.min(max_total_m) {
        push_profiles(k, max_total_m, max_total_m, &mut Vec::new(), &mut profiles);
    }
    let mut found: Vec<(Vec<u8>, SwellingSystem)> = profiles
        .par_iter()
        .flat_map_iter(|p| canonical_systems(n, p))
        .map(|sys| (canonical_key_unchecked(&sys).as_bytes().to_vec(), sys))
        .collect();
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(found.into_iter().map(|(_, s)| s).collect())
}

/// Non-increasing sequences of `k` positive parts, each at most `cap`, with
/// sum at most `budget`.
fn push_profiles(
    k: usize,
    cap: usize,
    budget: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    let remaining = k - prefix.len() - 1;
    for part in (1..=cap.min(budget.saturating_sub(remaining))).rev() {
        prefix.push(part);
        push_profiles(k, part, budget - part, prefix, out);
        prefix.pop();
    }
}

/// All canonical representatives with exactly this (non-increasing) profile.
///
/// Candidates are generated with labels numbered by first occurrence, the
/// adjacency rule enforced per contour, and all `n` labels used; a candidate is
/// kept iff it is its own canonical representative.
pub fn canonical_systems(n: usize, profile: &[usize]) -> Vec<SwellingSystem> {
    let total: usize = profile.iter().sum();
    let mut starts = Vec::with_capacity(profile.len());
    let mut acc = 0;
    for &m in profile {
        starts.push(acc);
        acc += m;
    }
    let mut out = Vec::new();
    let mut labels = vec![0u32; total];
    fill(n, profile, &starts, 0, 0, &mut labels, &mut out);
    out
}

fn fill(
    n: usize,
    profile: &[usize],
    starts: &[usize],
    pos: usize,
    max_used: u32,
    labels: &mut Vec<u32>,
    out: &mut Vec<SwellingSystem>,
) {
    if pos == labels.len() {
        if max_used as usize != n {
            return;
        }
        let mut contours = Vec::with_capacity(profile.len());
        for (ci, &m) in profile.iter().enumerate() {
            contours.push(labels[starts[ci]..starts[ci] + m].to_vec());
        }
        let sys = SwellingSystem::new(n, contours);
        if is_canonical(&sys, profile, labels) {
            out.push(sys);
        }
        return;
    }
    // Not enough positions left to introduce the missing labels.
    if (n as u32 - max_used) as usize > labels.len() - pos {
        return;
    }
    let ci = starts.partition_point(|&s| s <= pos) - 1;
    let (start, m) = (starts[ci], profile[ci]);
    let top = (max_used + 1).min(n as u32);
    for label in 1..=top {
        if m > 1 {
            if pos > start && labels[pos - 1] == label {
                continue;
            }
            if pos == start + m - 1 && labels[start] == label {
                continue;
            }
        }
        labels[pos] = label;
        fill(
            n,
            profile,
            starts,
            pos + 1,
            max_used.max(label),
            labels,
            out,
        );
    }
}

fn is_canonical(sys: &SwellingSystem, profile: &[usize], labels: &[u32]) -> bool {
    let own = [sys.n() as u32, sys.k() as u32]
        .into_iter()
        .chain(profile.iter().map(|&m| m as u32))
        .chain(labels.iter().copied())
        .flat_map(u32::to_be_bytes)
        .collect::<Vec<u8>>();
    canonical_key_unchecked(sys).as_bytes() == own.as_slice()
}

/// The best `h` found at one genus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusMaximum {
    pub h: i64,
    pub witness: EquipmentModel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxHReport {
    pub n: usize,
    pub f_bound: i64,
    pub overall: i64,
    /// Every enumerated model attaining `overall`, in enumeration order.
    pub witnesses: Vec<EquipmentModel>,
    pub per_genus: BTreeMap<u64, GenusMaximum>,
    pub models_checked: usize,
    /// Models with `h > f(n)`; empty whenever the bound holds.
    pub violations: Vec<EquipmentModel>,
}

/// Empirical `max h(P, W)` over the enumerated family, per genus and overall.
pub fn max_h(bounds: EnumerationBounds) -> Result<MaxHReport, SearchError> {
    let f = f_bound(bounds.n)?;
    let models = enumerate_models(bounds)?;
    let mut overall = i64::MIN;
    let mut witnesses = Vec::new();
    let mut per_genus: BTreeMap<u64, GenusMaximum> = BTreeMap::new();
    let mut violations = Vec::new();
    for model in &models {
        let h = oval_counts(model).h;
        if h > f {
            violations.push(model.clone());
        }
        if h > overall {
            overall = h;
            witnesses.clear();
        }
        if h == overall {
            witnesses.push(model.clone());
        }
        let entry = per_genus
            .entry(model.genus())
            .or_insert_with(|| GenusMaximum {
                h,
                witness: model.clone(),
            });
        if h > entry.h {
            *entry = GenusMaximum {
                h,
                witness: model.clone(),
            };
        }
    }
    Ok(MaxHReport {
        n: bounds.n,
        f_bound: f,
        overall,
        witnesses,
        per_genus,
        models_checked: models.len(),
        violations,
    })
}
