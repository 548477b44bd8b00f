//! Modular leg morphology: a yaw module (Twister) followed by hip and knee pitch modules
//! (Pivots) on every leg, with point-mass links at segment midpoints.

use std::path::Path;

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.81;

pub const JOINTS_PER_LEG: usize = 3;

/// Actuator module types making up a leg chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Module {
    /// Rotates the leg about the vertical axis.
    Twister,
    /// Lifts the leg about a horizontal axis.
    Pivot,
}

/// Chain order, hip to foot.
pub const LEG_CHAIN: [Module; JOINTS_PER_LEG] = [Module::Twister, Module::Pivot, Module::Pivot];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegModel {
    /// Horizontal offset between the yaw axis and the hip pitch axis.
    pub coxa_length_m: f64,
    /// Thigh and shank lengths.
    pub link_lengths_m: [f64; 2],
    /// Coxa (including the yaw module), thigh and shank masses.
    pub link_masses_kg: [f64; 3],
    #[serde(default = "default_torque_limit")]
    pub torque_limit_nm: f64,
    pub joint_limits_rad: [[f64; 2]; 3],
}

fn default_torque_limit() -> f64 {
    12.0
}

impl LegModel {
    pub fn leg_length(&self) -> f64 {
        self.link_lengths_m.iter().sum()
    }

    pub fn mass(&self) -> f64 {
        self.link_masses_kg.iter().sum()
    }

    pub fn joint_state(&self, angles: [f64; 3]) -> JointState {
        JointState {
            angles,
            limits: self.joint_limits_rad,
        }
    }

    fn validate(&self, path: &str) -> Result<()> {
        if !(self.coxa_length_m >= 0.0) {
            return Err(Error::config(format!("{path}.coxa_length_m"), "must be non-negative"));
        }
        if self.link_lengths_m.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::config(format!("{path}.link_lengths_m"), "lengths must be positive"));
        }
        if self.link_masses_kg.iter().any(|&m| !(m >= 0.0)) {
            return Err(Error::config(format!("{path}.link_masses_kg"), "masses must be non-negative"));
        }
        if !(self.torque_limit_nm > 0.0) {
            return Err(Error::config(format!("{path}.torque_limit_nm"), "must be positive"));
        }
        if self.joint_limits_rad.iter().any(|[lo, hi]| !(lo <= hi)) {
            return Err(Error::config(format!("{path}.joint_limits_rad"), "each range needs min <= max"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub angles: [f64; 3],
    pub limits: [[f64; 2]; 3],
}

impl JointState {
    pub fn within_limits(&self) -> bool {
        self.angles
            .iter()
            .zip(&self.limits)
            .all(|(&q, [lo, hi])| *lo <= q && q <= *hi)
    }
}

/// Where a leg attaches to the body: hip position (body frame) and the heading of the
/// leg's zero-yaw direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HipMount {
    pub position: Vector3<f64>,
    pub yaw: f64,
}

impl HipMount {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        HipMount {
            position: Vector3::new(x, y, 0.0),
            yaw,
        }
    }
}

/// Point positions along one leg in the body frame.
#[derive(Debug, Clone, Copy)]
pub struct LegPoints {
    pub hip: Vector3<f64>,
    pub pitch: Vector3<f64>,
    pub knee: Vector3<f64>,
    pub foot: Vector3<f64>,
    /// Horizontal unit vector of the leg plane.
    pub radial: Vector3<f64>,
}

impl LegPoints {
    /// Horizontal axis of both pitch joints.
    pub fn pitch_axis(&self) -> Vector3<f64> {
        Vector3::new(-self.radial.y, self.radial.x, 0.0)
    }

    /// Midpoints of coxa, thigh and shank.
    pub fn link_centroids(&self) -> [Vector3<f64>; 3] {
        [
            0.5 * (self.hip + self.pitch),
            0.5 * (self.pitch + self.knee),
            0.5 * (self.knee + self.foot),
        ]
    }
}

pub fn leg_points(leg: &LegModel, q: &JointState, mount: &HipMount) -> LegPoints {
    let [q1, q2, q3] = q.angles;
    let heading = mount.yaw + q1;
    let radial = Vector3::new(heading.cos(), heading.sin(), 0.0);
    let up = Vector3::z();
    let [l1, l2] = leg.link_lengths_m;
    let hip = mount.position;
    let pitch = hip + leg.coxa_length_m * radial;
    let knee = pitch + l1 * (q2.cos() * radial - q2.sin() * up);
    let foot = knee + l2 * ((q2 + q3).cos() * radial - (q2 + q3).sin() * up);
    LegPoints {
        hip,
        pitch,
        knee,
        foot,
        radial,
    }
}

pub fn forward_kinematics(leg: &LegModel, q: &JointState, mount: &HipMount) -> Vector3<f64> {
    leg_points(leg, q, mount).foot
}

/// Closed-form inverse kinematics. The knee pitch is taken non-negative, which keeps the
/// knee above the hip–foot line. Returns `None` when the target is out of reach or the
/// solution violates a joint limit.
pub fn inverse_kinematics(
    leg: &LegModel,
    target: &Vector3<f64>,
    mount: &HipMount,
) -> Option<JointState> {
    let rel = target - mount.position;
    let bearing = rel.y.atan2(rel.x);
    let horizontal = rel.x.hypot(rel.y);
    // facing the target first; the reversed heading reaches feet tucked behind the yaw axis
    for (heading, reach) in [(bearing, horizontal), (bearing + std::f64::consts::PI, -horizontal)] {
        let q1 = wrap_angle(heading - mount.yaw);
        if let Some(state) = solve_pitch_pair(leg, q1, reach - leg.coxa_length_m, rel.z) {
            return Some(state);
        }
    }
    None
}

fn solve_pitch_pair(leg: &LegModel, q1: f64, radial: f64, z: f64) -> Option<JointState> {
    let [l1, l2] = leg.link_lengths_m;
    let d2 = radial * radial + z * z;
    let mut c = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if c.abs() > 1.0 {
        if c.abs() - 1.0 > 1e-12 {
            return None;
        }
        c = c.signum();
    }
    let q3 = c.acos();
    let q2 = wrap_angle((-z).atan2(radial) - (l2 * q3.sin()).atan2(l1 + l2 * q3.cos()));
    let state = leg.joint_state([q1, q2, q3]);
    state.within_limits().then_some(state)
}

pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = a % two_pi;
    if x > std::f64::consts::PI {
        x -= two_pi;
    } else if x <= -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

/// Foot-position Jacobian in the body frame; column `j` is the derivative with respect to
/// joint `j` (m/rad).
pub fn leg_jacobian(leg: &LegModel, q: &JointState, mount: &HipMount) -> Matrix3<f64> {
    let pts = leg_points(leg, q, mount);
    jacobian_from_points(&pts)
}

pub(crate) fn jacobian_from_points(pts: &LegPoints) -> Matrix3<f64> {
    let w = pts.pitch_axis();
    Matrix3::from_columns(&[
        Vector3::z().cross(&(pts.foot - pts.hip)),
        w.cross(&(pts.foot - pts.pitch)),
        w.cross(&(pts.foot - pts.knee)),
    ])
}

/// Planar body pose: level orientation with a heading angle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyPose {
    pub position: Vector3<f64>,
    pub yaw: f64,
}

impl BodyPose {
    pub fn to_world(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let (s, c) = self.yaw.sin_cos();
        self.position + Vector3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
    }

    pub fn to_body(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let d = p - self.position;
        let (s, c) = self.yaw.sin_cos();
        Vector3::new(c * d.x + s * d.y, -s * d.x + c * d.y, d.z)
    }

    pub fn rotate_to_body(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let (s, c) = self.yaw.sin_cos();
        Vector3::new(c * v.x + s * v.y, -s * v.x + c * v.y, v.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MountSpec {
    pub hip_m: [f64; 2],
    pub yaw_deg: f64,
    /// Standard-posture foot position (horizontal, body frame).
    pub foothold_m: [f64; 2],
}

/// Robot morphology as stored in a morphology file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    pub name: String,
    pub body_mass_kg: f64,
    pub body_length_m: f64,
    pub body_width_m: f64,
    /// Hip height above the ground in the standard posture.
    pub stand_height_m: f64,
    pub leg: LegModel,
    pub mounts: Vec<MountSpec>,
}

/// Immutable robot model. Legs are numbered front to back with odd legs on the left
/// (positive y) and even legs on the right; index 0 is leg 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    pub name: String,
    pub legs: Vec<LegModel>,
    pub mounts: Vec<HipMount>,
    pub nominal_footholds: Vec<Vector2<f64>>,
    pub body_mass: f64,
    pub body_length: f64,
    pub body_width: f64,
    pub stand_height: f64,
    spec: RobotSpec,
}

pub const QUAD_PRESET: &str = include_str!("../presets/quad.toml");
pub const HEX_PRESET: &str = include_str!("../presets/hex.toml");

impl RobotModel {
    pub fn from_spec(spec: RobotSpec) -> Result<Self> {
        if !(spec.body_mass_kg > 0.0) {
            return Err(Error::config("body_mass_kg", "must be positive"));
        }
        for (field, v) in [
            ("body_length_m", spec.body_length_m),
            ("body_width_m", spec.body_width_m),
            ("stand_height_m", spec.stand_height_m),
        ] {
            if !(v > 0.0) {
                return Err(Error::config(field, "must be positive"));
            }
        }
        spec.leg.validate("leg")?;
        let count = spec.mounts.len();
        if count != 4 && count != 6 {
            return Err(Error::config("mounts", format!("expected 4 or 6 legs, found {count}")));
        }
        for pair in 0..count / 2 {
            let (l, r) = (&spec.mounts[2 * pair], &spec.mounts[2 * pair + 1]);
            let mirrored = (l.hip_m[0] - r.hip_m[0]).abs() < 1e-9
                && (l.hip_m[1] + r.hip_m[1]).abs() < 1e-9
                && (l.yaw_deg + r.yaw_deg).abs() < 1e-9
                && (l.foothold_m[0] - r.foothold_m[0]).abs() < 1e-9
                && (l.foothold_m[1] + r.foothold_m[1]).abs() < 1e-9;
            if !mirrored || l.hip_m[1] <= 0.0 {
                return Err(Error::config(
                    format!("mounts[{}]", 2 * pair + 1),
                    "legs must come in left/right mirror pairs, left (positive y) first",
                ));
            }
            if pair > 0 && l.hip_m[0] > spec.mounts[2 * pair - 2].hip_m[0] {
                return Err(Error::config(
                    format!("mounts[{}]", 2 * pair),
                    "legs must be ordered front to back",
                ));
            }
        }
        Ok(RobotModel {
            name: spec.name.clone(),
            legs: vec![spec.leg.clone(); count],
            mounts: spec
                .mounts
                .iter()
                .map(|m| HipMount::new(m.hip_m[0], m.hip_m[1], m.yaw_deg.to_radians()))
                .collect(),
            nominal_footholds: spec
                .mounts
                .iter()
                .map(|m| Vector2::new(m.foothold_m[0], m.foothold_m[1]))
                .collect(),
            body_mass: spec.body_mass_kg,
            body_length: spec.body_length_m,
            body_width: spec.body_width_m,
            stand_height: spec.stand_height_m,
            spec,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| Error::config("", e.to_string()))?;
        let spec: RobotSpec = serde_path_to_error::deserialize(value).map_err(|e| {
            Error::config(e.path().to_string(), e.inner().to_string())
        })?;
        Self::from_spec(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn quad() -> Self {
        Self::from_toml_str(QUAD_PRESET).expect("bundled quad preset is valid")
    }

    pub fn hex() -> Self {
        Self::from_toml_str(HEX_PRESET).expect("bundled hex preset is valid")
    }

    pub fn spec(&self) -> &RobotSpec {
        &self.spec
    }

    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.body_mass + self.legs.iter().map(LegModel::mass).sum::<f64>()
    }

    /// Robot weight in newtons.
    pub fn total_weight(&self) -> f64 {
        GRAVITY * self.total_mass()
    }

    pub fn leg_length(&self) -> f64 {
        self.legs[0].leg_length()
    }

    /// Standard-posture foot position in the body frame.
    pub fn nominal_foot(&self, leg: usize) -> Vector3<f64> {
        let f = self.nominal_footholds[leg];
        Vector3::new(f.x, f.y, -self.stand_height)
    }

    /// Joint states of the standard posture.
    pub fn standard_posture(&self) -> Option<Vec<JointState>> {
        (0..self.leg_count())
            .map(|i| inverse_kinematics(&self.legs[i], &self.nominal_foot(i), &self.mounts[i]))
            .collect()
    }
}

/// World-frame centre of mass; the body is a point mass at the pose origin and links are
/// point masses at their midpoints.
pub fn compute_com(robot: &RobotModel, states: &[JointState], pose: &BodyPose) -> Vector3<f64> {
    let mut weighted = robot.body_mass * pose.position;
    let mut mass = robot.body_mass;
    for ((leg, q), mount) in robot.legs.iter().zip(states).zip(&robot.mounts) {
        let centroids = leg_points(leg, q, mount).link_centroids();
        for (c, &m) in centroids.iter().zip(&leg.link_masses_kg) {
            weighted += m * pose.to_world(c);
            mass += m;
        }
    }
    weighted / mass
}
