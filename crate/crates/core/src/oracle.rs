//! Brute-force verifier. Glues `|W|` copies of the camera along their mirror
//! segments and measures the resulting closed surface directly: Euler
//! characteristic, fixed curves of every generator, separation by mirrors.
//!
//! Nothing here calls into the closed-form formulas of [`crate::equipment`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dsu::DisjointSets;
use crate::equipment::EquipmentModel;
use crate::group::{self, GroupElement};

/// Default bound on `n` for explicit gluing (4096 copies).
pub const DEFAULT_ORACLE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the oracle limit {limit}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("Euler characteristic {chi} is odd; the gluing is inconsistent")]
    OddEulerCharacteristic { chi: i64 },
}

/// A 1-cell of the glued surface: the lift of boundary segment
/// `(contour, segment)` shared by `copies.0` and `copies.1 = copies.0 · σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// 1-based generator label fixing this edge pointwise.
    pub label: u32,
    pub contour: usize,
    pub segment: usize,
    pub copies: (GroupElement, GroupElement),
    /// Vertex indices at the start and end of the segment.
    pub ends: (usize, usize),
}

/// A 0-cell: an orbit of a corner (or of the marked point on a full-oval
/// contour) under its stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub contour: usize,
    /// Corner between segments `corner` and `corner + 1` (0-based, cyclic);
    /// `0` on a full-oval contour.
    pub corner: usize,
    pub artificial: bool,
    pub stabilizer: Vec<GroupElement>,
    /// The copies meeting at this vertex.
    pub copies: Vec<GroupElement>,
}

/// The cell structure of `P = ⋃ wC`.
#[derive(Debug, Clone)]
pub struct GluedSurface {
    n: usize,
    quotient_genus: u32,
    boundary_components: usize,
    copies: Vec<GroupElement>,
    edges: Vec<Edge>,
    vertices: Vec<Vertex>,
}

fn subgroup(gens: &[GroupElement]) -> Vec<GroupElement> {
    let mut elems = vec![GroupElement::identity(gens[0].rank()).expect("rank checked")];
    for &g in gens {
        if elems.contains(&g) {
            continue;
        }
        let extra: Vec<_> = elems
            .iter()
            .map(|&e| e.compose(g).expect("same rank"))
            .collect();
        elems.extend(extra);
    }
    elems.sort();
    elems
}

pub fn build_surface(model: &EquipmentModel, limit: usize) -> Result<GluedSurface, OracleError> {
    let n = model.n();
    if n > limit {
        return Err(OracleError::LimitExceeded { n, limit });
    }
    let copies: Vec<GroupElement> = group::elements(n).expect("n within MAX_RANK").collect();
    let size = copies.len();
    let gen = |label: u32| GroupElement::generator(n, label as usize - 1).expect("label in range");

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (ci, contour) in model.system().contours().iter().enumerate() {
        let m = contour.len();
        // vertex_of[slot][w]: the vertex at corner `slot` of copy w.
        let mut vertex_of = vec![vec![usize::MAX; size]; m];
        for slot in 0..m {
            let stabilizer = if m == 1 {
                subgroup(&[gen(contour[0])])
            } else {
                subgroup(&[gen(contour[slot]), gen(contour[(slot + 1) % m])])
            };
            for &w in &copies {
                if vertex_of[slot][w.bits() as usize] != usize::MAX {
                    continue;
                }
                let orbit: Vec<GroupElement> = stabilizer
                    .iter()
                    .map(|&s| w.compose(s).expect("same rank"))
                    .collect();
                let id = vertices.len();
                for x in &orbit {
                    vertex_of[slot][x.bits() as usize] = id;
                }
                vertices.push(Vertex {
                    contour: ci,
                    corner: slot,
                    artificial: m == 1,
                    stabilizer: stabilizer.clone(),
                    copies: orbit,
                });
            }
        }
        for (seg, &label) in contour.iter().enumerate() {
            let s = gen(label);
            let start_slot = (seg + m - 1) % m;
            for &w in &copies {
                let partner = w.compose(s).expect("same rank");
                if partner < w {
                    continue;
                }
                edges.push(Edge {
                    label,
                    contour: ci,
                    segment: seg,
                    copies: (w, partner),
                    ends: (
                        vertex_of[start_slot][w.bits() as usize],
                        vertex_of[seg][w.bits() as usize],
                    ),
                });
            }
        }
    }
    Ok(GluedSurface {
        n,
        quotient_genus: model.quotient_genus(),
        boundary_components: model.system().k(),
        copies,
        edges,
        vertices,
    })
}

impl GluedSurface {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn copies(&self) -> &[GroupElement] {
        &self.copies
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// `χ = |W|·χ(C) + V − E`: each copy contributes its interior and the
    /// boundary cells are counted once after gluing.
    pub fn euler_characteristic(&self) -> i64 {
        let camera = 2 - 2 * i64::from(self.quotient_genus) - self.boundary_components as i64;
        self.copies.len() as i64 * camera + self.vertices.len() as i64 - self.edges.len() as i64
    }

    /// Connected components of the copy-adjacency graph.
    pub fn components(&self) -> usize {
        self.copy_components(|_| true)
    }

    fn copy_components(&self, keep: impl Fn(&Edge) -> bool) -> usize {
        let mut d = DisjointSets::new(self.copies.len());
        for e in self.edges.iter().filter(|e| keep(e)) {
            d.union(e.copies.0.bits() as usize, e.copies.1.bits() as usize);
        }
        d.count()
    }

    /// Fixed curves as lists of edge indices, ordered by label then by their
    /// least edge index.
    pub fn ovals(&self) -> Vec<(u32, Vec<usize>)> {
        let mut d = DisjointSets::new(self.edges.len());
        let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (idx, e) in self.edges.iter().enumerate() {
            at_vertex[e.ends.0].push(idx);
            if e.ends.1 != e.ends.0 {
                at_vertex[e.ends.1].push(idx);
            }
        }
        for incident in &at_vertex {
            for (x, &a) in incident.iter().enumerate() {
                for &b in &incident[x + 1..] {
                    if self.edges[a].label == self.edges[b].label {
                        d.union(a, b);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for idx in 0..self.edges.len() {
            groups.entry(d.find(idx)).or_default().push(idx);
        }
        let mut out: Vec<(u32, Vec<usize>)> = groups
            .into_values()
            .map(|edges| (self.edges[edges[0]].label, edges))
            .collect();
        out.sort_by_key(|(label, edges)| (*label, edges[0]));
        out
    }

    pub fn incidence_listing(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# n={} copies={} edges={} vertices={} chi={}",
            self.n,
            self.copies.len(),
            self.edges.len(),
            self.vertices.len(),
            self.euler_characteristic()
        )
        .unwrap();
        for (idx, e) in self.edges.iter().enumerate() {
            writeln!(
                out,
                "edge {idx} label {} segment {}.{} ends {} {} copies {} {}",
                e.label,
                e.contour + 1,
                e.segment + 1,
                e.ends.0,
                e.ends.1,
                e.copies.0,
                e.copies.1
            )
            .unwrap();
        }
        for (idx, v) in self.vertices.iter().enumerate() {
            let stab: Vec<String> = v.stabilizer.iter().map(ToString::to_string).collect();
            writeln!(
                out,
                "vertex {idx} {} {}.{} stabilizer {}",
                if v.artificial { "marked" } else { "corner" },
                v.contour + 1,
                v.corner + 1,
                stab.join(",")
            )
            .unwrap();
        }
        out
    }
}

pub fn genus_oracle(s: &GluedSurface) -> Result<i64, OracleError> {
    let chi = s.euler_characteristic();
    if chi % 2 != 0 {
        return Err(OracleError::OddEulerCharacteristic { chi });
    }
    Ok((2 - chi) / 2)
}

/// Number of fixed curves per generator label.
pub fn trace_ovals(s: &GluedSurface) -> BTreeMap<u32, u64> {
    let mut counts: BTreeMap<u32, u64> = (1..=s.n as u32).map(|l| (l, 0)).collect();
    for (label, _) in s.ovals() {
        *counts.get_mut(&label).expect("label in range") += 1;
    }
    counts
}

/// For each label, whether removing its mirror edges leaves exactly two
/// pieces.
pub fn check_orientable_forms(s: &GluedSurface) -> BTreeMap<u32, bool> {
    (1..=s.n as u32)
        .map(|label| (label, s.copy_components(|e| e.label != label) == 2))
        .collect()
}

/// Copies coloured by parity of their generator count; every edge must join
/// the two colours.
pub fn check_checkerboard(s: &GluedSurface) -> bool {
    s.edges
        .iter()
        .all(|e| e.copies.0.is_antiholomorphic() != e.copies.1.is_antiholomorphic())
}

/// Sizes of the two colour classes (even, odd).
pub fn checkerboard_classes(s: &GluedSurface) -> (usize, usize) {
    let odd = s.copies.iter().filter(|w| w.is_antiholomorphic()).count();
    (s.copies.len() - odd, odd)
}
