//! Exact measures, pairwise intersections, inequality audits and
//! second-moment ratios.

mod audits;
mod intersect;
mod measure;
mod qia;

pub use audits::{
    basic_bound_audit, density_constant, gallagher_overlap_sum, local_density_check,
    rational_pair_audit, step_bounds_audit, AuditPair, LocalDensity, StepAudit, Window,
};
pub use intersect::{
    disjointness_check, disjointness_measure_by_unions, pairwise_intersection_measure,
    plain_measure, DisjointnessReport, MeasureKind, PairMeasure,
};
pub use measure::{
    closed_form_for_spec, closed_form_measure, partial_sum_psi, sum_set_measures, Family,
    SetMeasureSum,
};
pub use qia::{qia_ratio, qia_sweep, qia_window_sweep, QiaReport};
