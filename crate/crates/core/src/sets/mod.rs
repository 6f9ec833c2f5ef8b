//! Approximation sets `A_q`, `A'_q`, `A~_q`, `A''_q`: specification, exact
//! one-dimensional interval form, point membership and the torus reduction.

mod arcs;
pub mod kernel;
mod membership;
mod psi;
mod spec;

pub use arcs::ArcFamily;
pub use membership::{
    membership, membership_f64, torus_map_image, Coord, MembershipWitness, PointMatrix, GUARD_BAND,
};
pub use psi::{ApproxFunction, MultiPsi, PsiKind, Support};
pub use spec::{build_interval_set, plain_product_factors, GcdFilter, SetSpec, Variant};
