//! The elementary abelian 2-group generated by `n` commuting real forms, and
//! Coxeter-matrix bookkeeping with finite-type recognition.

use std::fmt;

use thiserror::Error;

/// Largest supported number of generators. Elements are stored as a `u16`
/// parity vector.
pub const MAX_RANK: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("rank {rank} exceeds the supported maximum {MAX_RANK}")]
    RankTooLarge { rank: usize },
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("parity bits {bits:#b} do not fit in rank {rank}")]
    BitsOutOfRange { bits: u32, rank: usize },
}

/// An element of `(Z₂)ⁿ`, stored as its parity vector: bit `i` is set iff
/// generator `i` (0-based) occurs an odd number of times.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    rank: u8,
    bits: u16,
}

impl GroupElement {
    pub fn identity(rank: usize) -> Result<Self, GroupError> {
        Self::from_bits(rank, 0)
    }

    /// The generator with 0-based index `index`.
    pub fn generator(rank: usize, index: usize) -> Result<Self, GroupError> {
        if index >= rank {
            return Err(GroupError::GeneratorOutOfRange { index, rank });
        }
        Self::from_bits(rank, 1 << index)
    }

    pub fn from_bits(rank: usize, bits: u32) -> Result<Self, GroupError> {
        if rank > MAX_RANK {
            return Err(GroupError::RankTooLarge { rank });
        }
        if rank < 32 && bits >> rank != 0 {
            return Err(GroupError::BitsOutOfRange { bits, rank });
        }
        Ok(Self {
            rank: rank as u8,
            bits: bits as u16,
        })
    }

    pub fn from_parities(parities: &[bool]) -> Result<Self, GroupError> {
        let bits = parities
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &p)| acc | (u32::from(p) << i));
        Self::from_bits(parities.len(), bits)
    }

    pub fn rank(self) -> usize {
        usize::from(self.rank)
    }

    pub fn bits(self) -> u32 {
        u32::from(self.bits)
    }

    pub fn parities(self) -> Vec<bool> {
        (0..self.rank()).map(|i| self.bits >> i & 1 == 1).collect()
    }

    /// Number of generators with odd multiplicity.
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_identity(self) -> bool {
        self.bits == 0
    }

    /// Group product: componentwise parity addition.
    pub fn compose(self, other: Self) -> Result<Self, GroupError> {
        if self.rank != other.rank {
            return Err(GroupError::RankMismatch {
                left: self.rank(),
                right: other.rank(),
            });
        }
        Ok(Self {
            rank: self.rank,
            bits: self.bits ^ other.bits,
        })
    }

    /// Odd products of real forms reverse the orientation of the surface.
    pub fn is_antiholomorphic(self) -> bool {
        self.weight() % 2 == 1
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({self})")
    }
}

/// Parity vector as a bit string, generator 1 first.
impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.parities() {
            f.write_str(if p { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All `2ⁿ` elements in increasing parity-vector order.
pub fn elements(rank: usize) -> Result<impl Iterator<Item = GroupElement>, GroupError> {
    if rank > MAX_RANK {
        return Err(GroupError::RankTooLarge { rank });
    }
    Ok((0u32..1 << rank).map(move |bits| GroupElement {
        rank: rank as u8,
        bits: bits as u16,
    }))
}

/// Entry of a Coxeter matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => f.write_str("∞"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxeterMatrixError {
    #[error("matrix is not square: row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("diagonal entry ({0},{0}) must be 1")]
    Diagonal(usize),
    #[error("entry ({i},{j}) = {value} must be at least 2")]
    OffDiagonal { i: usize, j: usize, value: Order },
    #[error("entries ({i},{j}) and ({j},{i}) differ")]
    Asymmetric { i: usize, j: usize },
}

/// Symmetric table of orders `m(i,j)` of products of pairs of generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    size: usize,
    entries: Vec<Order>,
}

impl CoxeterMatrix {
    pub fn new(rows: Vec<Vec<Order>>) -> Result<Self, CoxeterMatrixError> {
        let size = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(CoxeterMatrixError::NotSquare {
                    row,
                    len: r.len(),
                    size,
                });
            }
        }
        for i in 0..size {
            if rows[i][i] != Order::Finite(1) {
                return Err(CoxeterMatrixError::Diagonal(i));
            }
            for j in 0..size {
                if i == j {
                    continue;
                }
                if let Order::Finite(v) = rows[i][j] {
                    if v < 2 {
                        return Err(CoxeterMatrixError::OffDiagonal {
                            i,
                            j,
                            value: rows[i][j],
                        });
                    }
                }
                if rows[i][j] != rows[j][i] {
                    return Err(CoxeterMatrixError::Asymmetric { i, j });
                }
            }
        }
        Ok(Self {
            size,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor; `0` stands for `∞`.
    pub fn from_integers(rows: &[&[u32]]) -> Result<Self, CoxeterMatrixError> {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| {
                            if v == 0 {
                                Order::Infinite
                            } else {
                                Order::Finite(v)
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// The matrix of `n` pairwise commuting involutions.
    pub fn commuting(size: usize) -> Self {
        let entries = (0..size * size)
            .map(|idx| {
                if idx / size == idx % size {
                    Order::Finite(1)
                } else {
                    Order::Finite(2)
                }
            })
            .collect();
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> Order {
        self.entries[i * self.size + j]
    }

    /// Simultaneous row/column permutation: entry `(perm[i], perm[j])` of the
    /// result is entry `(i, j)` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.size);
        let mut entries = vec![Order::Finite(1); self.size * self.size];
        for i in 0..self.size {
            for j in 0..self.size {
                entries[perm[i] * self.size + perm[j]] = self.get(i, j);
            }
        }
        Self {
            size: self.size,
            entries,
        }
    }

    pub fn classify(&self) -> CoxeterClass {
        classify_coxeter_matrix(self)
    }
}

/// Irreducible finite Coxeter types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiniteFamily {
    A(usize),
    B(usize),
    D(usize),
    E(usize),
    F4,
    H(usize),
    /// Dihedral of order `2m`; `m = 3, 4` are reported as `A2`, `B2`.
    I2(u32),
}

impl fmt::Display for FiniteFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteFamily::A(n) => write!(f, "A{n}"),
            FiniteFamily::B(n) => write!(f, "B{n}"),
            FiniteFamily::D(n) => write!(f, "D{n}"),
            FiniteFamily::E(n) => write!(f, "E{n}"),
            FiniteFamily::F4 => f.write_str("F4"),
            FiniteFamily::H(n) => write!(f, "H{n}"),
            FiniteFamily::I2(m) => write!(f, "I2({m})"),
        }
    }
}

impl FiniteFamily {
    pub fn rank(self) -> usize {
        match self {
            FiniteFamily::A(n)
            | FiniteFamily::B(n)
            | FiniteFamily::D(n)
            | FiniteFamily::E(n)
            | FiniteFamily::H(n) => n,
            FiniteFamily::F4 => 4,
            FiniteFamily::I2(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteComponent {
    pub family: FiniteFamily,
    /// 0-based generator indices of this connected component, ascending.
    pub generators: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoxeterClass {
    /// Product of irreducible finite types, one per connected component of
    /// the Coxeter graph, ordered by smallest generator.
    Finite(Vec<FiniteComponent>),
    NotFinite,
}

impl CoxeterClass {
    pub fn is_finite(&self) -> bool {
        matches!(self, CoxeterClass::Finite(_))
    }

    /// Component families sorted, which is what survives relabeling.
    pub fn families(&self) -> Option<Vec<FiniteFamily>> {
        match self {
            CoxeterClass::Finite(cs) => {
                let mut fams: Vec<_> = cs.iter().map(|c| c.family).collect();
                fams.sort();
                Some(fams)
            }
            CoxeterClass::NotFinite => None,
        }
    }
}

/// Matches each connected component of the Coxeter graph (edges where
/// `m(i,j) ≥ 3`) against the finite-type list.
pub fn classify_coxeter_matrix(matrix: &CoxeterMatrix) -> CoxeterClass {
    let n = matrix.size();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut idx = 0;
        while idx < comp.len() {
            let v = comp[idx];
            idx += 1;
            for w in 0..n {
                if !seen[w] && w != v && is_edge(matrix.get(v, w)) {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        match classify_component(matrix, &comp) {
            Some(family) => components.push(FiniteComponent {
                family,
                generators: comp,
            }),
            None => return CoxeterClass::NotFinite,
        }
    }
    CoxeterClass::Finite(components)
}

fn is_edge(order: Order) -> bool {
    order != Order::Finite(2)
}

fn classify_component(matrix: &CoxeterMatrix, comp: &[usize]) -> Option<FiniteFamily> {
    let rank = comp.len();
    let label = |a: usize, b: usize| matrix.get(a, b);
    let neighbors = |v: usize| -> Vec<usize> {
        comp.iter()
            .copied()
            .filter(|&w| w != v && is_edge(label(v, w)))
            .collect()
    };
    if rank == 1 {
        return Some(FiniteFamily::A(1));
    }
    let mut edge_count = 0;
    for (x, &a) in comp.iter().enumerate() {
        for &b in &comp[x + 1..] {
            match label(a, b) {
                Order::Infinite => return None,
                Order::Finite(2) => {}
                Order::Finite(_) => edge_count += 1,
            }
        }
    }
    // Connected with rank - 1 edges: a tree. Anything with a cycle is infinite.
    if edge_count != rank - 1 {
        return None;
    }
    if rank == 2 {
        let Order::Finite(m) = label(comp[0], comp[1]) else {
            return None;
        };
        return Some(match m {
            3 => FiniteFamily::A(2),
            4 => FiniteFamily::B(2),
            m => FiniteFamily::I2(m),
        });
    }
    let degrees: Vec<usize> = comp.iter().map(|&v| neighbors(v).len()).collect();
    let max_degree = *degrees.iter().max()?;
    if max_degree > 3 {
        return None;
    }
    if max_degree == 3 {
        // Branched: all labels 3, one node of degree 3 with arms (1,1,r) or (1,2,2..4).
        if degrees.iter().filter(|&&d| d == 3).count() != 1 {
            return None;
        }
        for (x, &a) in comp.iter().enumerate() {
            for &b in &comp[x + 1..] {
                if !matches!(label(a, b), Order::Finite(2) | Order::Finite(3)) {
                    return None;
                }
            }
        }
        let center = comp[degrees.iter().position(|&d| d == 3)?];
        let mut arms: Vec<usize> = neighbors(center)
            .into_iter()
            .map(|first| {
                let mut len = 1;
                let (mut prev, mut cur) = (center, first);
                loop {
                    let next: Vec<_> = neighbors(cur).into_iter().filter(|&w| w != prev).collect();
                    match next.as_slice() {
                        [] => break len,
                        [w] => {
                            prev = cur;
                            cur = *w;
                            len += 1;
                        }
                        _ => break usize::MAX,
                    }
                }
            })
            .collect();
        arms.sort_unstable();
        return match arms.as_slice() {
            [1, 1, _] => Some(FiniteFamily::D(rank)),
            [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => Some(FiniteFamily::E(rank)),
            _ => None,
        };
    }
    // A path: read the labels end to end.
    let end = comp[degrees.iter().position(|&d| d == 1)?];
    let mut path = vec![end];
    let mut prev = usize::MAX;
    let mut cur = end;
    while let Some(next) = neighbors(cur).into_iter().find(|&w| w != prev) {
        path.push(next);
        prev = cur;
        cur = next;
    }
    let mut labels: Vec<u32> = path
        .windows(2)
        .map(|w| match label(w[0], w[1]) {
            Order::Finite(m) => m,
            Order::Infinite => 0,
        })
        .collect();
    if labels.first() < labels.last() {
        labels.reverse();
    }
    // Now the larger end label (if any) comes first.
    let rest_are_3 = |from: usize| labels[from..].iter().all(|&m| m == 3);
    match (labels[0], rank) {
        (3, _) if rest_are_3(0) => Some(FiniteFamily::A(rank)),
        (4, _) if rest_are_3(1) => Some(FiniteFamily::B(rank)),
        (5, 3 | 4) if rest_are_3(1) => Some(FiniteFamily::H(rank)),
        _ if labels == [3, 4, 3] => Some(FiniteFamily::F4),
        _ => None,
    }
}
