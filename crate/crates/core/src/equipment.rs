//! Closed-form analysis of a commutative real orientable equipment
//! `W ≅ (Z₂)ⁿ`: genus of the covering surface, the μ invariant and its
//! geometry class, oval counts per real form, the Harnack-type bounds, and the
//! planar-realization presentation.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::swelling::{SwellingError, SwellingSystem, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquipmentError {
    #[error(transparent)]
    Swelling(#[from] SwellingError),
    #[error("Riemann-Hurwitz gives 4g = {four_g}, not a non-negative multiple of 4")]
    InconsistentGenus { four_g: i128 },
    #[error("contour {contour} has no corners (m = 1)")]
    NoCorners { contour: usize },
    #[error("corner ({contour},{corner}) does not exist")]
    CornerOutOfRange { contour: usize, corner: usize },
    #[error("the bound is stated for n > 2, got n = {n}")]
    RankTooSmall { n: usize },
}

/// A swelling system together with the genus of the quotient `P/W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EquipmentModel {
    n: usize,
    quotient_genus: u32,
    contours: Vec<Vec<u32>>,
    #[serde(skip)]
    system: SwellingSystem,
    #[serde(skip)]
    genus: u64,
}

#[derive(Deserialize)]
struct RawModel {
    n: usize,
    quotient_genus: u32,
    contours: Vec<Vec<u32>>,
}

impl<'de> Deserialize<'de> for EquipmentModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawModel::deserialize(d)?;
        EquipmentModel::new(SwellingSystem::new(raw.n, raw.contours), raw.quotient_genus)
            .map_err(serde::de::Error::custom)
    }
}

impl EquipmentModel {
    pub fn new(system: SwellingSystem, quotient_genus: u32) -> Result<Self, EquipmentError> {
        system.ensure_valid()?;
        Self::build(system, quotient_genus)
    }

    /// Like [`EquipmentModel::new`] but tolerates generators that label no
    /// segment. Such a datum generates a proper subgroup of `W`, so the glued
    /// complex splits into `2^(unused)` isomorphic components; the genus
    /// reported is `(2 − χ)/2` of the whole complex.
    pub fn with_unused_generators(
        system: SwellingSystem,
        quotient_genus: u32,
    ) -> Result<Self, EquipmentError> {
        let v = system.structural_violations();
        if !v.is_empty() {
            return Err(SwellingError::Invalid(v).into());
        }
        Self::build(system, quotient_genus)
    }

    fn build(system: SwellingSystem, quotient_genus: u32) -> Result<Self, EquipmentError> {
        let genus = riemann_hurwitz_genus(&system, quotient_genus)?;
        Ok(Self {
            n: system.n(),
            quotient_genus,
            contours: system.contours().to_vec(),
            system,
            genus,
        })
    }

    pub fn system(&self) -> &SwellingSystem {
        &self.system
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quotient_genus(&self) -> u32 {
        self.quotient_genus
    }

    /// Genus of the covering surface `P`.
    pub fn genus(&self) -> u64 {
        self.genus
    }

    /// Number of elements of `W`.
    pub fn order(&self) -> u64 {
        1 << self.n
    }

    pub fn unused_generators(&self) -> Vec<u32> {
        self.system.unused_labels()
    }

    pub fn validate(&self) -> Vec<Violation> {
        self.system.validate()
    }
}

impl fmt::Display for EquipmentModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} g~={} {}", self.n, self.quotient_genus, self.system)
    }
}

/// Solves `4g − 4 = 2ⁿ(4g̃ − 4 + 2k + ½·corners)` for `g`. Full-oval
/// contours carry no corners.
fn riemann_hurwitz_genus(sys: &SwellingSystem, quotient_genus: u32) -> Result<u64, EquipmentError> {
    let order = 1i128 << sys.n();
    let twice_bracket =
        2 * (4 * i128::from(quotient_genus) - 4 + 2 * sys.k() as i128) + sys.corner_count() as i128;
    // 4g = 4 + order * twice_bracket / 2
    let four_g_times_2 = 8 + order * twice_bracket;
    if four_g_times_2 % 2 != 0 {
        return Err(EquipmentError::InconsistentGenus {
            four_g: four_g_times_2 / 2,
        });
    }
    let four_g = four_g_times_2 / 2;
    if four_g < 0 || four_g % 4 != 0 {
        return Err(EquipmentError::InconsistentGenus { four_g });
    }
    Ok((four_g / 4) as u64)
}

/// Order of `σ(i,j)·σ(i,j+1)` (1-based contour and corner). In the
/// commutative model every corner joins two distinct commuting involutions.
pub fn corner_order(
    model: &EquipmentModel,
    contour: usize,
    corner: usize,
) -> Result<u32, EquipmentError> {
    let contours = model.system().contours();
    let c = contour
        .checked_sub(1)
        .and_then(|i| contours.get(i))
        .ok_or(EquipmentError::CornerOutOfRange { contour, corner })?;
    if c.len() == 1 {
        return Err(EquipmentError::NoCorners { contour });
    }
    if corner == 0 || corner > c.len() {
        return Err(EquipmentError::CornerOutOfRange { contour, corner });
    }
    let (a, b) = (c[corner - 1], c[corner % c.len()]);
    Ok(if a == b { 1 } else { 2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Spherical,
    Euclidean,
    Hyperbolic,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Spherical => "spherical",
            Geometry::Euclidean => "euclidean",
            Geometry::Hyperbolic => "hyperbolic",
        })
    }
}

/// Exact rational, serialized as `"p/q"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(pub Ratio<i64>);

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `μ = 4g̃ + 2k − 4 + Σ(1 − 1/n(i,j))` and the geometry it selects. The sign
/// of μ decides: negative spherical, zero euclidean, positive hyperbolic.
pub fn mu(model: &EquipmentModel) -> (Rational, Geometry) {
    let sys = model.system();
    let mut value =
        Ratio::from_integer(4 * i64::from(model.quotient_genus()) + 2 * sys.k() as i64 - 4);
    for (i, c) in sys.contours().iter().enumerate() {
        if c.len() == 1 {
            // n(i,1) = ord(σσ) = 1 contributes nothing.
            continue;
        }
        for j in 1..=c.len() {
            let order = corner_order(model, i + 1, j).expect("corner in range");
            value += Ratio::from_integer(1) - Ratio::new(1, i64::from(order));
        }
    }
    let geometry = match value.numer().signum() {
        -1 => Geometry::Spherical,
        0 => Geometry::Euclidean,
        _ => Geometry::Hyperbolic,
    };
    (Rational(value), geometry)
}

/// Whether the two neighbours of a boundary segment carry equal labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SegmentClass {
    /// `σ(i,j−1) = σ(i,j+1)`: lifts to `2^(n−2)` ovals.
    EqualNeighbours,
    /// `σ(i,j−1) ≠ σ(i,j+1)`: lifts to `2^(n−3)` ovals.
    DistinctNeighbours,
    /// A contour that is itself an oval (`m = 1`): lifts to `2^(n−1)` ovals.
    FullOval,
}

/// Classifies every segment; `result[i][j]` for segment `j` of contour `i`.
pub fn segment_classes(sys: &SwellingSystem) -> Vec<Vec<SegmentClass>> {
    sys.contours()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.len() == 1 {
                return vec![SegmentClass::FullOval];
            }
            (0..c.len() as isize)
                .map(|j| {
                    if sys.label(i, j - 1) == sys.label(i, j + 1) {
                        SegmentClass::EqualNeighbours
                    } else {
                        SegmentClass::DistinctNeighbours
                    }
                })
                .collect()
        })
        .collect()
}

fn lift_count(class: SegmentClass, n: usize) -> u64 {
    // Distinct neighbours need three distinct labels, so n ≥ 3 there; equal
    // neighbours need two, so n ≥ 2.
    match class {
        SegmentClass::FullOval => 1 << (n - 1),
        SegmentClass::EqualNeighbours => 1 << (n - 2),
        SegmentClass::DistinctNeighbours => 1 << (n - 3),
    }
}

/// Oval counts per real form with genus, `h` and bound verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OvalReport {
    pub genus: u64,
    pub mu: Rational,
    pub geometry: Geometry,
    /// Label → number of ovals; every label `1..=n` is present.
    pub ovals: BTreeMap<u32, u64>,
    pub total: u64,
    /// `total − 2·genus`.
    pub h: i64,
    pub harnack_ok: bool,
    /// `None` when `n < 3`.
    pub thm31_ok: Option<bool>,
    /// `None` when `n < 3`.
    pub genus_bound_ok: Option<bool>,
}

pub fn oval_counts(model: &EquipmentModel) -> OvalReport {
    let sys = model.system();
    let n = sys.n();
    let mut ovals: BTreeMap<u32, u64> = (1..=n as u32).map(|l| (l, 0)).collect();
    for (i, classes) in segment_classes(sys).into_iter().enumerate() {
        for (j, class) in classes.into_iter().enumerate() {
            *ovals
                .get_mut(&sys.contours()[i][j])
                .expect("label in range") += lift_count(class, n);
        }
    }
    let total: u64 = ovals.values().sum();
    let genus = model.genus();
    let h = total as i64 - 2 * genus as i64;
    let (mu, geometry) = mu(model);
    let harnack_ok = ovals.values().all(|&c| c <= genus + 1);
    let (thm31_ok, genus_bound_ok) = match check_bounds_from(n, genus, total, harnack_ok) {
        Ok(v) => (Some(v.thm31_ok), Some(v.genus_bound_ok)),
        Err(_) => (None, None),
    };
    OvalReport {
        genus,
        mu,
        geometry,
        ovals,
        total,
        h,
        harnack_ok,
        thm31_ok,
        genus_bound_ok,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundVerdicts {
    /// `Σ|α_i| ≤ 2g − (n−9)2^(n−3) − 2`.
    pub thm31_ok: bool,
    /// Equality in the line above.
    pub thm31_tight: bool,
    /// `(n−4)2^(n−3) ≤ g − 1`.
    pub genus_bound_ok: bool,
    /// Every form has at most `g + 1` ovals.
    pub harnack_ok: bool,
}

pub fn check_bounds(model: &EquipmentModel) -> Result<BoundVerdicts, EquipmentError> {
    let report = oval_counts(model);
    check_bounds_from(model.n(), report.genus, report.total, report.harnack_ok)
}

fn check_bounds_from(
    n: usize,
    genus: u64,
    total: u64,
    harnack_ok: bool,
) -> Result<BoundVerdicts, EquipmentError> {
    if n < 3 {
        return Err(EquipmentError::RankTooSmall { n });
    }
    let h = total as i64 - 2 * genus as i64;
    let f = f_bound(n)?;
    Ok(BoundVerdicts {
        thm31_ok: h <= f,
        thm31_tight: h == f,
        genus_bound_ok: genus_lower_bound(n)? <= genus as i64,
        harnack_ok,
    })
}

/// `f(2) = 2`, `f(n) = −(n−9)·2^(n−3) − 2` for `n > 2`.
pub fn f_bound(n: usize) -> Result<i64, EquipmentError> {
    match n {
        0 | 1 => Err(EquipmentError::RankTooSmall { n }),
        2 => Ok(2),
        n => Ok(-(n as i64 - 9) * (1i64 << (n - 3)) - 2),
    }
}

/// Least genus allowed for `n > 2` forms: `(n−4)·2^(n−3) + 1`.
pub fn genus_lower_bound(n: usize) -> Result<i64, EquipmentError> {
    if n < 3 {
        return Err(EquipmentError::RankTooSmall { n });
    }
    Ok((n as i64 - 4) * (1i64 << (n - 3)) + 1)
}

/// A generator of the planar-realization group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `a_α`, 1-based.
    A(usize),
    /// `b_α`, 1-based.
    B(usize),
    /// `c_i`, 1-based.
    C(usize),
    /// `σ_ij`, 1-based with `j` in `1..=m_i+1`.
    Sigma(usize, usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::A(a) => write!(f, "a{a}"),
            Generator::B(b) => write!(f, "b{b}"),
            Generator::C(c) => write!(f, "c{c}"),
            Generator::Sigma(i, j) => write!(f, "s{i}_{j}"),
        }
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    fn plain(generator: Generator) -> Self {
        Self {
            generator,
            inverse: false,
        }
    }

    fn inv(generator: Generator) -> Self {
        Self {
            generator,
            inverse: true,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.generator)
        } else {
            write!(f, "{}", self.generator)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `∏[a_α, b_α] ∏ c_i = 1`
    LongProduct,
    /// `σ_ij² = 1`
    Involution,
    /// `(σ_ij σ_i,j+1)^n(i,j) = 1`
    Corner,
    /// `σ_i1 c_i σ_i,m_i+1 = c_i`
    Boundary,
}

/// `word^power = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub word: Vec<Letter>,
    pub power: u32,
    pub rhs: Vec<Letter>,
}

fn write_word(f: &mut fmt::Formatter<'_>, word: &[Letter]) -> fmt::Result {
    if word.is_empty() {
        return f.write_str("1");
    }
    for (i, l) in word.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.power == 1 {
            write_word(f, &self.word)?;
        } else {
            f.write_str("(")?;
            write_word(f, &self.word)?;
            write!(f, ")^{}", self.power)?;
        }
        f.write_str(" = ")?;
        write_word(f, &self.rhs)
    }
}

/// Generators and defining relations of the planar realization, with the
/// epimorphism onto `W` recorded on the reflections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresentationRecord {
    pub quotient_genus: u32,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    /// `corner_orders[i][j]` is `n(i+1, j+1)`.
    pub corner_orders: Vec<Vec<u32>>,
    /// `reflection_images[i][j]`: the label `σ_(i+1)(j+1)` maps to.
    pub reflection_images: Vec<Vec<u32>>,
}

pub fn planar_presentation(model: &EquipmentModel) -> PresentationRecord {
    let sys = model.system();
    let g = model.quotient_genus() as usize;
    let k = sys.k();
    let mut generators = Vec::new();
    for a in 1..=g {
        generators.push(Generator::A(a));
        generators.push(Generator::B(a));
    }
    generators.extend((1..=k).map(Generator::C));
    for (i, c) in sys.contours().iter().enumerate() {
        generators.extend((1..=c.len() + 1).map(|j| Generator::Sigma(i + 1, j)));
    }

    let mut relations = Vec::new();
    let mut long = Vec::new();
    for a in 1..=g {
        long.extend([
            Letter::plain(Generator::A(a)),
            Letter::plain(Generator::B(a)),
            Letter::inv(Generator::A(a)),
            Letter::inv(Generator::B(a)),
        ]);
    }
    long.extend((1..=k).map(|i| Letter::plain(Generator::C(i))));
    relations.push(Relation {
        kind: RelationKind::LongProduct,
        word: long,
        power: 1,
        rhs: vec![],
    });

    let mut corner_orders = Vec::with_capacity(k);
    let mut reflection_images = Vec::with_capacity(k);
    for (i, c) in sys.contours().iter().enumerate() {
        let m = c.len();
        let ci = i + 1;
        for j in 1..=m + 1 {
            relations.push(Relation {
                kind: RelationKind::Involution,
                word: vec![Letter::plain(Generator::Sigma(ci, j))],
                power: 2,
                rhs: vec![],
            });
        }
        let orders: Vec<u32> = if m == 1 {
            vec![1]
        } else {
            (1..=m)
                .map(|j| corner_order(model, ci, j).expect("corner in range"))
                .collect()
        };
        for (j, &order) in orders.iter().enumerate() {
            relations.push(Relation {
                kind: RelationKind::Corner,
                word: vec![
                    Letter::plain(Generator::Sigma(ci, j + 1)),
                    Letter::plain(Generator::Sigma(ci, j + 2)),
                ],
                power: order,
                rhs: vec![],
            });
        }
        relations.push(Relation {
            kind: RelationKind::Boundary,
            word: vec![
                Letter::plain(Generator::Sigma(ci, 1)),
                Letter::plain(Generator::C(ci)),
                Letter::plain(Generator::Sigma(ci, m + 1)),
            ],
            power: 1,
            rhs: vec![Letter::plain(Generator::C(ci))],
        });
        corner_orders.push(orders);
        reflection_images.push((0..=m).map(|j| c[j % m]).collect());
    }

    PresentationRecord {
        quotient_genus: model.quotient_genus(),
        generators,
        relations,
        corner_orders,
        reflection_images,
    }
}
