//! Swelling Coxeter systems: cyclic labelings of the boundary contours of a
//! camera by generators, up to relabeling, contour permutation and rotation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equipment::EquipmentModel;
use crate::group::{CoxeterMatrix, MAX_RANK};

/// `n` generators (labels `1..=n`) and `k` cyclic label sequences.
///
/// A value of this type is not necessarily valid; see [`SwellingSystem::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwellingSystem {
    n: usize,
    contours: Vec<Vec<u32>>,
}

/// One broken invariant. Contour and position indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoGenerators,
    TooManyGenerators {
        n: usize,
        max: usize,
    },
    NoContours,
    EmptyContour {
        contour: usize,
    },
    LabelOutOfRange {
        contour: usize,
        position: usize,
        label: u32,
    },
    AdjacentEqual {
        contour: usize,
        positions: (usize, usize),
        label: u32,
    },
    UnusedLabel {
        label: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoGenerators => f.write_str("n must be at least 1"),
            Violation::TooManyGenerators { n, max } => write!(f, "n = {n} exceeds {max}"),
            Violation::NoContours => f.write_str("at least one contour is required"),
            Violation::EmptyContour { contour } => write!(f, "contour {contour} is empty"),
            Violation::LabelOutOfRange {
                contour,
                position,
                label,
            } => write!(
                f,
                "contour {contour}, position {position}: label {label} out of range"
            ),
            Violation::AdjacentEqual {
                contour,
                positions: (a, b),
                label,
            } => write!(
                f,
                "contour {contour}, positions ({a},{b}): adjacent labels both {label}"
            ),
            Violation::UnusedLabel { label } => write!(f, "label {label} occurs in no contour"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwellingError {
    #[error("invalid swelling system: {}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl SwellingSystem {
    pub fn new(n: usize, contours: Vec<Vec<u32>>) -> Self {
        Self { n, contours }
    }

    /// Builds and validates in one step.
    pub fn checked(n: usize, contours: Vec<Vec<u32>>) -> Result<Self, SwellingError> {
        let sys = Self::new(n, contours);
        sys.ensure_valid()?;
        Ok(sys)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contours(&self) -> &[Vec<u32>] {
        &self.contours
    }

    pub fn k(&self) -> usize {
        self.contours.len()
    }

    /// Contour lengths `m_i`.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.contours.iter().map(Vec::len).collect()
    }

    /// Number of corners: the sum of `m_i` over subdivided contours.
    pub fn corner_count(&self) -> usize {
        self.contours.iter().map(Vec::len).filter(|&m| m > 1).sum()
    }

    /// Label of segment `j` on contour `i` (0-based, `j` taken cyclically).
    pub fn label(&self, i: usize, j: isize) -> u32 {
        let c = &self.contours[i];
        c[j.rem_euclid(c.len() as isize) as usize]
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.structural_violations();
        if out.is_empty() {
            out.extend(
                self.unused_labels()
                    .into_iter()
                    .map(|label| Violation::UnusedLabel { label }),
            );
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<(), SwellingError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SwellingError::Invalid(v))
        }
    }

    /// Every check except label coverage.
    pub(crate) fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(Violation::NoGenerators);
        }
        if self.n > MAX_RANK {
            out.push(Violation::TooManyGenerators {
                n: self.n,
                max: MAX_RANK,
            });
        }
        if self.contours.is_empty() {
            out.push(Violation::NoContours);
        }
        for (i, c) in self.contours.iter().enumerate() {
            if c.is_empty() {
                out.push(Violation::EmptyContour { contour: i + 1 });
                continue;
            }
            for (j, &label) in c.iter().enumerate() {
                if label == 0 || label as usize > self.n {
                    out.push(Violation::LabelOutOfRange {
                        contour: i + 1,
                        position: j + 1,
                        label,
                    });
                }
            }
            if c.len() > 1 {
                for j in 0..c.len() {
                    let next = (j + 1) % c.len();
                    if c[j] == c[next] {
                        out.push(Violation::AdjacentEqual {
                            contour: i + 1,
                            positions: (j + 1, next + 1),
                            label: c[j],
                        });
                    }
                }
            }
        }
        out
    }

    /// Labels in `1..=n` that occur in no contour.
    pub fn unused_labels(&self) -> Vec<u32> {
        let mut used = vec![false; self.n + 1];
        for &l in self.contours.iter().flatten() {
            if let Some(u) = used.get_mut(l as usize) {
                *u = true;
            }
        }
        (1..=self.n as u32).filter(|&l| !used[l as usize]).collect()
    }
}

impl fmt::Display for SwellingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.contours.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, l) in c.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{l}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Byte encoding of the isomorphism class of a swelling system. Two valid
/// systems have equal keys iff they are isomorphic.
///
/// Layout: `n`, `k`, the multiplicities in descending order, then the labels
/// of the lexicographically least representative, each as a big-endian `u32`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    fn words(&self) -> impl Iterator<Item = u32> + '_ {
        self.0
            .chunks_exact(4)
            .map(|w| u32::from_be_bytes([w[0], w[1], w[2], w[3]]))
    }

    /// The canonical representative this key encodes.
    pub fn representative(&self) -> SwellingSystem {
        let words: Vec<u32> = self.words().collect();
        let n = words[0] as usize;
        let k = words[1] as usize;
        let ms = &words[2..2 + k];
        let mut labels = words[2 + k..].iter().copied();
        let contours = ms
            .iter()
            .map(|&m| labels.by_ref().take(m as usize).collect())
            .collect();
        SwellingSystem::new(n, contours)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

pub fn canonical_form(sys: &SwellingSystem) -> Result<CanonicalKey, SwellingError> {
    sys.ensure_valid()?;
    Ok(canonical_key_unchecked(sys))
}

/// Canonical key of a structurally sound system; unused labels are allowed.
pub(crate) fn canonical_key_unchecked(sys: &SwellingSystem) -> CanonicalKey {
    let mut order: Vec<usize> = (0..sys.k()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(sys.contours[i].len()));
    let profile: Vec<usize> = order.iter().map(|&i| sys.contours[i].len()).collect();

    // Beam search over (contour choice, rotation) slot by slot. For a fixed
    // ordering the least relabeling is first-occurrence numbering, so only
    // the states tied for the least prefix so far are kept.
    #[derive(Clone)]
    struct State {
        used: Vec<bool>,
        map: Vec<u32>,
        next: u32,
    }
    let mut states = vec![State {
        used: vec![false; sys.k()],
        map: vec![0; sys.n + 1],
        next: 1,
    }];
    let mut labels = Vec::with_capacity(sys.contours.iter().map(Vec::len).sum());
    for &m in &profile {
        let mut best: Option<Vec<u32>> = None;
        let mut next_states: Vec<State> = Vec::new();
        let mut seen = BTreeSet::new();
        for st in &states {
            for (ci, c) in sys.contours.iter().enumerate() {
                if st.used[ci] || c.len() != m {
                    continue;
                }
                for rot in 0..m {
                    let mut cand = st.clone();
                    let seg: Vec<u32> = (0..m)
                        .map(|j| {
                            let l = c[(j + rot) % m] as usize;
                            if cand.map[l] == 0 {
                                cand.map[l] = cand.next;
                                cand.next += 1;
                            }
                            cand.map[l]
                        })
                        .collect();
                    cand.used[ci] = true;
                    match best.as_ref().map(|b| seg.cmp(b)) {
                        Some(std::cmp::Ordering::Greater) => continue,
                        Some(std::cmp::Ordering::Less) | None => {
                            best = Some(seg);
                            next_states.clear();
                            seen.clear();
                        }
                        Some(std::cmp::Ordering::Equal) => {}
                    }
                    if seen.insert((cand.used.clone(), cand.map.clone())) {
                        next_states.push(cand);
                    }
                }
            }
        }
        labels.extend(best.expect("profile slot always has a matching contour"));
        states = next_states;
    }

    let words = [sys.n as u32, sys.k() as u32]
        .into_iter()
        .chain(profile.iter().map(|&m| m as u32))
        .chain(labels);
    CanonicalKey(words.flat_map(u32::to_be_bytes).collect())
}

/// An isomorphism between two swelling systems: contour `i` of the source
/// maps to contour `contour_map[i]` of the target with its segment `j` landing
/// on segment `j + shifts[i]`, and label `l` maps to `label_map[l - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub contour_map: Vec<usize>,
    pub shifts: Vec<usize>,
    pub label_map: Vec<u32>,
}

impl Witness {
    pub fn identity(sys: &SwellingSystem) -> Self {
        Self {
            contour_map: (0..sys.k()).collect(),
            shifts: vec![0; sys.k()],
            label_map: (1..=sys.n as u32).collect(),
        }
    }

    /// Image of `sys` under this witness. `None` if the shapes do not fit.
    pub fn apply(&self, sys: &SwellingSystem) -> Option<SwellingSystem> {
        let k = sys.k();
        if self.contour_map.len() != k || self.shifts.len() != k || self.label_map.len() != sys.n {
            return None;
        }
        let mut targets: Vec<Option<Vec<u32>>> = vec![None; k];
        for (i, c) in sys.contours.iter().enumerate() {
            let slot = targets.get_mut(self.contour_map[i])?;
            if slot.is_some() {
                return None;
            }
            let m = c.len();
            let mut out = vec![0; m];
            for (j, &l) in c.iter().enumerate() {
                out[(j + self.shifts[i]) % m] = *self.label_map.get(l.checked_sub(1)? as usize)?;
            }
            *slot = Some(out);
        }
        Some(SwellingSystem::new(
            sys.n,
            targets.into_iter().collect::<Option<Vec<_>>>()?,
        ))
    }
}

/// `Some(witness)` iff the systems are isomorphic. The witness found first in
/// the order (contour image, shift) per source contour is returned.
pub fn are_isomorphic(
    a: &SwellingSystem,
    b: &SwellingSystem,
) -> Result<Option<Witness>, SwellingError> {
    a.ensure_valid()?;
    b.ensure_valid()?;
    if canonical_key_unchecked(a) != canonical_key_unchecked(b) {
        return Ok(None);
    }
    let w = find_witness(a, b, None);
    debug_assert!(w.is_some(), "equal canonical keys without a witness");
    Ok(w)
}

/// Isomorphism of swelling systems over non-commutative Coxeter groups: the
/// label bijection must also carry `ma` onto `mb`.
pub fn are_isomorphic_with_matrices(
    a: &SwellingSystem,
    ma: &CoxeterMatrix,
    b: &SwellingSystem,
    mb: &CoxeterMatrix,
) -> Result<Option<Witness>, SwellingError> {
    a.ensure_valid()?;
    b.ensure_valid()?;
    if ma.size() != a.n || mb.size() != b.n {
        return Ok(None);
    }
    if canonical_key_unchecked(a) != canonical_key_unchecked(b) {
        return Ok(None);
    }
    Ok(find_witness(a, b, Some((ma, mb))))
}

fn find_witness(
    a: &SwellingSystem,
    b: &SwellingSystem,
    matrices: Option<(&CoxeterMatrix, &CoxeterMatrix)>,
) -> Option<Witness> {
    if a.n != b.n || a.k() != b.k() {
        return None;
    }
    struct Search<'s> {
        a: &'s SwellingSystem,
        b: &'s SwellingSystem,
        matrices: Option<(&'s CoxeterMatrix, &'s CoxeterMatrix)>,
        forward: Vec<u32>,
        backward: Vec<u32>,
        contour_map: Vec<usize>,
        shifts: Vec<usize>,
        taken: Vec<bool>,
    }
    impl Search<'_> {
        fn run(&mut self, i: usize) -> bool {
            if i == self.a.k() {
                return self.matrices_agree();
            }
            let src = &self.a.contours[i];
            let m = src.len();
            for target in 0..self.b.k() {
                if self.taken[target] || self.b.contours[target].len() != m {
                    continue;
                }
                for shift in 0..m {
                    let (f0, b0) = (self.forward.clone(), self.backward.clone());
                    if self.extend(src, target, shift) {
                        self.taken[target] = true;
                        self.contour_map.push(target);
                        self.shifts.push(shift);
                        if self.run(i + 1) {
                            return true;
                        }
                        self.contour_map.pop();
                        self.shifts.pop();
                        self.taken[target] = false;
                    }
                    self.forward = f0;
                    self.backward = b0;
                }
            }
            false
        }

        fn extend(&mut self, src: &[u32], target: usize, shift: usize) -> bool {
            let dst = &self.b.contours[target];
            let m = src.len();
            for (j, &l) in src.iter().enumerate() {
                let img = dst[(j + shift) % m];
                let (f, bk) = (
                    &mut self.forward[l as usize],
                    &mut self.backward[img as usize],
                );
                match (*f, *bk) {
                    (0, 0) => {
                        *f = img;
                        *bk = l;
                    }
                    (x, y) if x == img && y == l => {}
                    _ => return false,
                }
            }
            true
        }

        fn matrices_agree(&self) -> bool {
            let Some((ma, mb)) = self.matrices else {
                return true;
            };
            let n = self.a.n;
            (0..n).all(|i| {
                (0..n).all(|j| {
                    ma.get(i, j)
                        == mb.get(
                            self.forward[i + 1] as usize - 1,
                            self.forward[j + 1] as usize - 1,
                        )
                })
            })
        }
    }
    let mut s = Search {
        a,
        b,
        matrices,
        forward: vec![0; a.n + 1],
        backward: vec![0; a.n + 1],
        contour_map: Vec::new(),
        shifts: Vec::new(),
        taken: vec![false; b.k()],
    };
    if !s.run(0) {
        return None;
    }
    Some(Witness {
        contour_map: s.contour_map,
        shifts: s.shifts,
        label_map: s.forward[1..].to_vec(),
    })
}

/// Equal quotient genera and isomorphic swelling systems.
pub fn topologically_equivalent(
    a: &EquipmentModel,
    b: &EquipmentModel,
) -> Result<bool, SwellingError> {
    if a.quotient_genus() != b.quotient_genus() {
        a.system().ensure_valid()?;
        b.system().ensure_valid()?;
        return Ok(false);
    }
    Ok(are_isomorphic(a.system(), b.system())?.is_some())
}
