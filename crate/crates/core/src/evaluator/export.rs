//! Trace export: per-sample CSV and a JSON-friendly summary.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::simulate::{Diagnostics, Failure, SimulationTrace};

/// Headline numbers of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub period_s: f64,
    pub dt_s: f64,
    pub cycles_simulated: usize,
    pub measured_samples: usize,
    pub delta_x_m: f64,
    pub delta_y_m: f64,
    pub failure: Option<Failure>,
    pub torque_exceeded: bool,
    pub torque_violation: f64,
    pub max_abs_torque_nm: f64,
    pub mean_margin_m: f64,
    pub min_margin_m: Option<f64>,
    pub mean_joint_force_sum_n: f64,
    pub final_com_m: [f64; 3],
    pub diagnostics: Diagnostics,
}

impl TraceSummary {
    pub fn from_trace(trace: &SimulationTrace) -> Self {
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        TraceSummary {
            period_s: trace.period_s,
            dt_s: trace.dt_s,
            cycles_simulated: trace.cycles_simulated,
            measured_samples: trace.measured_samples(),
            delta_x_m: trace.delta_x_m,
            delta_y_m: trace.delta_y_m,
            failure: trace.failure,
            torque_exceeded: trace.torque_exceeded,
            torque_violation: trace.torque_violation,
            max_abs_torque_nm: trace.max_abs_torque_nm,
            mean_margin_m: mean(trace.scored_margins()),
            min_margin_m: trace.scored_margins().iter().cloned().reduce(f64::min),
            mean_joint_force_sum_n: mean(trace.scored_load_sums()),
            final_com_m: trace.final_com.into(),
            diagnostics: trace.diagnostics,
        }
    }
}

/// Per-sample CSV: time, body pose, CoM, stance bitmask, margin, then `tau_<leg>_<joint>`
/// and `force_<leg>_<joint>` columns. Needs a trace recorded with full detail.
pub fn trace_csv(trace: &SimulationTrace) -> String {
    let joints = trace.joint_count();
    let mut out = String::from("t_s,body_x_m,body_y_m,body_z_m,body_yaw_rad,com_x_m,com_y_m,com_z_m,stance_mask,margin_m,measured");
    for kind in ["tau", "force"] {
        for j in 0..joints {
            let _ = write!(out, ",{kind}_{}_{}", j / 3 + 1, ["yaw", "hip", "knee"][j % 3]);
        }
    }
    out.push('\n');
    for s in &trace.samples {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.pose.position.x,
            s.pose.position.y,
            s.pose.position.z,
            s.pose.yaw,
            s.com.x,
            s.com.y,
            s.com.z,
            s.stance_mask,
            s.margin,
            u8::from(s.measured)
        );
        for tau in &s.torques {
            let _ = write!(out, ",{tau}");
        }
        for f in &s.joint_forces {
            let _ = write!(out, ",{}", f.norm());
        }
        out.push('\n');
    }
    out
}
