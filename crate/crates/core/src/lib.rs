//! Commutative real orientable equipments of compact Riemann surfaces.
//!
//! A group `W ≅ (Z₂)ⁿ` generated by `n` real forms is described, up to
//! topological equivalence, by the genus of `P/W` and a swelling Coxeter
//! system: the cyclic sequences of mirror labels around the boundary contours
//! of a fundamental region. From that datum this crate computes the genus of
//! `P`, the number of ovals of every form and the Harnack-type bounds, and it
//! cross-checks all of it by gluing `|W|` copies of the region explicitly.

#![allow(clippy::needless_range_loop)]

pub mod dsu;
pub mod equipment;
pub mod group;
pub mod oracle;
pub mod search;
pub mod swelling;

pub use equipment::{
    check_bounds, corner_order, f_bound, genus_lower_bound, mu, oval_counts, planar_presentation,
    BoundVerdicts, EquipmentError, EquipmentModel, Geometry, OvalReport, PresentationRecord,
    Rational,
};
pub use group::{
    classify_coxeter_matrix, CoxeterClass, CoxeterMatrix, FiniteFamily, GroupElement, Order,
    MAX_RANK,
};
pub use oracle::{
    build_surface, check_checkerboard, check_orientable_forms, genus_oracle, trace_ovals,
    GluedSurface, OracleError, DEFAULT_ORACLE_LIMIT,
};
pub use search::{
    construct_extremal, construct_extremal_n3, enumerate_models, max_h, EnumerationBounds,
    MaxHReport, SearchError,
};
pub use swelling::{
    are_isomorphic, canonical_form, topologically_equivalent, CanonicalKey, SwellingError,
    SwellingSystem, Violation, Witness,
};
