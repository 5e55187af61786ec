//! Measurements on iterates, steps and traces. Everything here runs in
//! native double precision (or double-double for reference steps), so the
//! measurement does not inherit the roundoff being measured.

mod audit;
mod condition;
mod distance;
mod projection;
mod reference;
mod table;

pub use audit::{
    backward_structure_audit, pivot_type_audit, theta_mu_audit, theta_mu_audit_iterates,
    BackwardStructureReport, FamilyRange, PivotTypeReport, ThetaMuAudit, THETA_SPREAD,
};
pub use condition::{condition_probe, condition_probe_matrix, ConditionEstimate, PROBE_ITERATIONS};
pub use distance::{delta_estimate, delta_exact, distance_report, segment_distance, DistanceReport};
pub use projection::{project_multiplier_step, ProjectionReport};
pub use reference::{reference_step, step_residual};
pub use table::{emit_table, parse_json_table, render_rows, table_rows, TableFormat, TableRow};

/// Range of `mu` over which the asymptotic properties are checked.
pub const WINDOW: (f64, f64) = (1e-12, 1e-2);

pub fn in_window(mu: f64) -> bool {
    (WINDOW.0..=WINDOW.1).contains(&mu)
}
