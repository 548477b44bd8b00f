//! Quasi-static locomotion evaluation.

mod export;
mod geometry;
mod simulate;
mod statics;

pub use export::{trace_csv, TraceSummary};
pub use geometry::{convex_hull, distance_to_segment, polygon_area, signed_distance_to_hull, Point2, SupportPolygon};
pub use simulate::{
    simulate, simulate_with_detail, Diagnostics, Failure, SampleRecord, SimConfig, SimulationTrace, TraceDetail,
};
pub use statics::{
    balance_residuals, distribute_contact_forces, joint_reaction_forces, joint_torques, ContactSolution,
    BALANCE_TOLERANCE,
};
