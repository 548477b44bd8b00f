//! Speed, stability and load scores of a simulated gait.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{convex_hull, signed_distance_to_hull, Failure, Point2, SimulationTrace};
use crate::robot::{compute_com, BodyPose, RobotModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectiveConstants {
    /// Reference speed normalizing the displacement.
    pub v_ref_mps: f64,
    /// Weight of the lateral drift penalty.
    pub drift_weight: f64,
    /// Margin at which stability saturates; derived from the standard posture when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_nom_m: Option<f64>,
    /// Constraint violation added to fell, stuck and unreachable candidates.
    pub failure_penalty: f64,
}

impl Default for ObjectiveConstants {
    fn default() -> Self {
        ObjectiveConstants {
            v_ref_mps: 0.15,
            drift_weight: 0.5,
            d_nom_m: None,
            failure_penalty: 10.0,
        }
    }
}

impl ObjectiveConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_ref_mps > 0.0) {
            return Err(Error::config("objectives.v_ref_mps", "must be positive"));
        }
        if !(self.drift_weight >= 0.0) {
            return Err(Error::config("objectives.drift_weight", "must be non-negative"));
        }
        if self.d_nom_m.is_some_and(|d| !(d > 0.0)) {
            return Err(Error::config("objectives.d_nom_m", "must be positive"));
        }
        if !(self.failure_penalty >= 0.0) {
            return Err(Error::config("objectives.failure_penalty", "must be non-negative"));
        }
        Ok(())
    }
}

/// The three scores in their natural (maximize speed and stability, minimize load) sense.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub f_speed: f64,
    pub f_stability: f64,
    pub f_load: f64,
}

impl ObjectiveVector {
    /// `(-f_speed, -f_stability, f_load)`.
    pub fn minimization(&self) -> [f64; 3] {
        [-self.f_speed, -self.f_stability, self.f_load]
    }
}

/// Normalized forward progress minus a quadratic penalty on sideways drift, with
/// displacements taken per cycle of period `period_s`.
pub fn f_speed(delta_x: f64, delta_y: f64, period_s: f64, v_ref: f64, drift_weight: f64) -> f64 {
    let scale = period_s * v_ref;
    let drift = delta_y.abs() / scale;
    delta_x / scale - drift_weight * drift * drift
}

/// Margin normalization: saturates at 1 for `d >= d_nom`, scales by leg length outside.
pub fn normalized_margin(d: f64, d_nom: f64, leg_length: f64) -> f64 {
    if d >= 0.0 {
        (d / d_nom).min(1.0)
    } else {
        d / leg_length
    }
}

pub fn f_stability(margins: &[f64], d_nom: f64, leg_length: f64) -> f64 {
    if margins.is_empty() {
        return 0.0;
    }
    margins.iter().map(|&d| normalized_margin(d, d_nom, leg_length)).sum::<f64>() / margins.len() as f64
}

/// Mean over samples of the summed joint reaction force magnitudes, in robot weights.
pub fn f_load(load_sums: &[f64], weight: f64) -> f64 {
    if load_sums.is_empty() {
        return 0.0;
    }
    load_sums.iter().sum::<f64>() / (weight * load_sums.len() as f64)
}

/// Stability margin of the standard posture: distance from the CoM to the edge of the
/// nominal footholds' hull.
pub fn nominal_margin(robot: &RobotModel) -> Result<f64> {
    let states = robot
        .standard_posture()
        .ok_or_else(|| Error::config("mounts", "standard posture is out of reach"))?;
    let pose = BodyPose {
        position: nalgebra::Vector3::new(0.0, 0.0, robot.stand_height),
        yaw: 0.0,
    };
    let com = compute_com(robot, &states, &pose);
    let feet: Vec<Point2> = robot.nominal_footholds.clone();
    let hull = convex_hull(&feet)?;
    let d = signed_distance_to_hull(&com.xy(), &hull);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::config("mounts", "standard posture has no positive stability margin"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub objectives: ObjectiveVector,
    pub minimization: [f64; 3],
    pub constraint_violation: f64,
}

/// Scores a trace. Failed runs keep their scores from the samples that exist, get their
/// stability capped at zero and carry the failure penalty on top of the torque violation.
pub fn assemble(trace: &SimulationTrace, constants: &ObjectiveConstants, d_nom: f64) -> Assessment {
    let mut objectives = ObjectiveVector {
        f_speed: f_speed(
            trace.delta_x_m,
            trace.delta_y_m,
            trace.period_s,
            constants.v_ref_mps,
            constants.drift_weight,
        ),
        f_stability: f_stability(trace.scored_margins(), d_nom, trace.leg_length_m),
        f_load: f_load(trace.scored_load_sums(), trace.weight_n),
    };
    let mut violation = trace.torque_violation;
    if matches!(trace.failure, Some(Failure::Fell | Failure::Stuck | Failure::Unreachable)) {
        violation += constants.failure_penalty;
        objectives.f_stability = objectives.f_stability.min(0.0);
    }
    Assessment {
        objectives,
        minimization: objectives.minimization(),
        constraint_violation: violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_examples() {
        let (v, t) = (0.15, 4.0);
        assert_eq!(f_speed(v * t, 0.0, t, v, 0.5), 1.0);
        assert_eq!(f_speed(0.0, v * t, t, v, 0.5), -0.5);
        assert!((f_speed(0.114 * t, 0.0, t, v, 0.5) - 0.76).abs() < 1e-12);
    }

    #[test]
    fn stability_examples() {
        let (d_nom, leg) = (0.216, 0.4);
        assert_eq!(f_stability(&[d_nom; 10], d_nom, leg), 1.0);
        assert_eq!(f_stability(&[-leg; 10], d_nom, leg), -1.0);
    }

    #[test]
    fn load_examples() {
        let w = 39.24;
        assert_eq!(f_load(&[w; 7], w), 1.0);
        assert_eq!(f_load(&[0.0; 7], w), 0.0);
        // two joints alternating between 0 and W: per-sample sums are W each
        assert_eq!(f_load(&[0.0 + w, w + 0.0], w), 1.0);
    }

    #[test]
    fn quad_nominal_margin_is_054_leg_lengths() {
        let robot = RobotModel::quad();
        let d = nominal_margin(&robot).unwrap();
        assert!((d / robot.leg_length() - 0.54).abs() < 1e-12, "{}", d / robot.leg_length());
    }

    #[test]
    fn stability_never_exceeds_one() {
        let margins = [0.5, 0.3, 0.216, 0.1];
        assert!(f_stability(&margins, 0.216, 0.4) < 1.0);
        assert_eq!(f_stability(&margins[..3], 0.216, 0.4), 1.0);
    }

    #[test]
    fn load_scales_linearly() {
        let sums = [3.0, 7.0, 11.5];
        let scaled: Vec<f64> = sums.iter().map(|x| x * 2.5).collect();
        assert!((f_load(&scaled, 10.0) - 2.5 * f_load(&sums, 10.0)).abs() < 1e-15);
    }

    #[test]
    fn speed_monotonicity() {
        let base = f_speed(0.3, 0.05, 3.0, 0.15, 0.5);
        assert!(f_speed(0.3 + 1e-6, 0.05, 3.0, 0.15, 0.5) > base);
        assert!(f_speed(0.3, 0.05 + 1e-6, 3.0, 0.15, 0.5) < base);
        assert!(f_speed(0.3, -0.05 - 1e-6, 3.0, 0.15, 0.5) < base);
    }
}
