//! Quasi-static stepping of a gait schedule over terrain.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::geometry::{convex_hull, signed_distance_to_hull, Point2};
use super::statics::{distribute_contact_forces, joint_reaction_forces, least_squares_contact, torques_from_points};
use crate::error::{Error, Result};
use crate::gait::{swing_profile, GaitSchedule, LegPhase};
use crate::robot::{inverse_kinematics, leg_points, BodyPose, LegPoints, RobotModel};
use crate::terrain::Terrain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub control_rate_hz: f64,
    /// Cycles simulated, warm-up included.
    pub cycles: usize,
    pub warmup_cycles: usize,
    /// CoM distance outside the support polygon that counts as a fall; defaults to a
    /// quarter of the leg length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fall_threshold_m: Option<f64>,
    /// Adds a touchdown force proportional to the landing speed of the shank.
    pub impact_proxy: bool,
    /// Upper bound on cycles when a step has not been climbed yet.
    pub max_climb_cycles: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            control_rate_hz: 240.0,
            cycles: 3,
            warmup_cycles: 1,
            fall_threshold_m: None,
            impact_proxy: true,
            max_climb_cycles: 12,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.control_rate_hz > 0.0 && self.control_rate_hz.is_finite()) {
            return Err(Error::config("simulation.control_rate_hz", "must be positive"));
        }
        if self.cycles <= self.warmup_cycles {
            return Err(Error::config("simulation.cycles", "must exceed warmup_cycles"));
        }
        if self.max_climb_cycles < self.cycles {
            return Err(Error::config("simulation.max_climb_cycles", "must be at least `cycles`"));
        }
        if let Some(f) = self.fall_threshold_m {
            if !(f > 0.0) {
                return Err(Error::config("simulation.fall_threshold_m", "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    Fell,
    Stuck,
    Unreachable,
    TorqueExceeded,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Failure::Fell => "fell",
            Failure::Stuck => "stuck",
            Failure::Unreachable => "unreachable",
            Failure::TorqueExceeded => "torque_exceeded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceDetail {
    /// Margins and load totals only.
    Summary,
    /// Every sample with per-foot and per-joint data.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub t: f64,
    pub pose: BodyPose,
    pub com: Vector3<f64>,
    /// Bit `i` set when leg `i` is in stance.
    pub stance_mask: u8,
    pub margin: f64,
    pub static_feasible: bool,
    pub measured: bool,
    /// World positions of every foot.
    pub feet: Vec<Vector3<f64>>,
    /// Balanced contact forces (world frame, zero for swing legs).
    pub contact_forces: Vec<Vector3<f64>>,
    /// Touchdown impact forces added on top of the balanced forces.
    pub impact_forces: Vec<Vector3<f64>>,
    /// Three per leg: yaw, hip, knee.
    pub joint_forces: Vec<Vector3<f64>>,
    pub torques: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Samples where a stance foot's force leaves the friction cone.
    pub slip_samples: usize,
    /// Samples without a balanced, non-negative force distribution.
    pub unbalanced_samples: usize,
    /// Largest misfit of the rigid body fit to the stance footholds.
    pub max_fit_residual_m: f64,
    pub obstructions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub control_rate_hz: f64,
    pub dt_s: f64,
    pub period_s: f64,
    pub samples_per_cycle: usize,
    pub cycles_simulated: usize,
    pub warmup_cycles: usize,
    pub leg_count: usize,
    pub weight_n: f64,
    pub leg_length_m: f64,
    pub torque_limit_nm: f64,
    /// Stability margin per sample.
    pub margins: Vec<f64>,
    /// Sum of joint reaction force magnitudes per sample.
    pub load_sums: Vec<f64>,
    /// Sample indices of the measured cycles.
    pub measured: std::ops::Range<usize>,
    /// Displacement per cycle over the measured cycles.
    pub delta_x_m: f64,
    pub delta_y_m: f64,
    pub failure: Option<Failure>,
    pub torque_exceeded: bool,
    pub torque_violation: f64,
    pub max_abs_torque_nm: f64,
    pub final_com: Vector3<f64>,
    pub diagnostics: Diagnostics,
    /// Populated only for [`TraceDetail::Full`].
    pub samples: Vec<SampleRecord>,
}

impl SimulationTrace {
    pub fn joint_count(&self) -> usize {
        3 * self.leg_count
    }

    /// Samples the objectives are computed from: the measured cycles, or every sample when
    /// the run ended before measurement began.
    pub fn scored_range(&self) -> std::ops::Range<usize> {
        let end = self.measured.end.min(self.margins.len());
        if self.measured.start < end {
            self.measured.start..end
        } else {
            0..self.margins.len()
        }
    }

    pub fn scored_margins(&self) -> &[f64] {
        &self.margins[self.scored_range()]
    }

    pub fn scored_load_sums(&self) -> &[f64] {
        &self.load_sums[self.scored_range()]
    }

    pub fn measured_samples(&self) -> usize {
        self.scored_range().len()
    }
}

#[derive(Debug, Clone, Copy)]
struct LegState {
    stance: bool,
    foothold: Vector3<f64>,
    /// Last world position of the foot.
    foot: Vector3<f64>,
    lift_xy: Vector2<f64>,
    lift_z: f64,
    blocked: Option<Vector2<f64>>,
    impact_pending: bool,
}

/// Best yaw and translation mapping body-frame points `c` onto world points `w` (2D
/// Procrustes). With a single pair the heading is kept.
fn fit_pose(c: &[Point2], w: &[Point2], yaw: f64) -> (f64, Point2) {
    let n = c.len() as f64;
    let cc = c.iter().sum::<Point2>() / n;
    let wc = w.iter().sum::<Point2>() / n;
    let yaw = if c.len() >= 2 {
        let (mut sdot, mut scross) = (0.0, 0.0);
        for (a, b) in c.iter().zip(w) {
            let (a, b) = (a - cc, b - wc);
            sdot += a.dot(&b);
            scross += a.x * b.y - a.y * b.x;
        }
        if sdot == 0.0 && scross == 0.0 {
            yaw
        } else {
            scross.atan2(sdot)
        }
    } else {
        yaw
    };
    let (s, co) = yaw.sin_cos();
    let rotated = Point2::new(co * cc.x - s * cc.y, s * cc.x + co * cc.y);
    (yaw, wc - rotated)
}

/// Runs the evaluator and keeps every sample.
pub fn simulate(robot: &RobotModel, schedule: &GaitSchedule, terrain: &Terrain, config: &SimConfig) -> Result<SimulationTrace> {
    simulate_with_detail(robot, schedule, terrain, config, TraceDetail::Full)
}

pub fn simulate_with_detail(
    robot: &RobotModel,
    schedule: &GaitSchedule,
    terrain: &Terrain,
    config: &SimConfig,
    detail: TraceDetail,
) -> Result<SimulationTrace> {
    config.validate()?;
    terrain.validate()?;
    let n = robot.leg_count();
    if schedule.leg_count() != n {
        return Err(Error::Structural(format!(
            "schedule drives {} legs, robot has {n}",
            schedule.leg_count()
        )));
    }
    let period = schedule.period_s;
    let per_cycle = ((config.control_rate_hz * period).round() as usize).max(1);
    let dt = period / per_cycle as f64;
    let leg_length = robot.leg_length();
    let fall = config.fall_threshold_m.unwrap_or(0.25 * leg_length);
    let weight = robot.total_weight();
    let total_mass = robot.total_mass();
    let torque_limit = robot.legs[0].torque_limit_nm;
    let nominal: Vec<Vector3<f64>> = (0..n).map(|i| robot.nominal_foot(i)).collect();
    let start_k = config.warmup_cycles * per_cycle;
    let base_end = config.cycles * per_cycle;
    let climb_limit = config.max_climb_cycles * per_cycle;
    let edge = terrain.step_edge();
    let step_goal = edge.map(|e| e + 0.5 * robot.body_length);

    let mut legs: Vec<LegState> = (0..n)
        .map(|i| {
            let c = schedule.foot_target(i, 0.0, &nominal[i]);
            let stance = schedule.leg_phase(i, 0.0).is_stance();
            let lift_xy = Vector2::new(nominal[i].x - 0.5 * schedule.strides_m[i], nominal[i].y);
            let lift_z = terrain.height_at(lift_xy.x, lift_xy.y);
            let foothold = Vector3::new(c.x, c.y, terrain.height_at(c.x, c.y));
            LegState {
                stance,
                foothold,
                foot: if stance { foothold } else { Vector3::new(lift_xy.x, lift_xy.y, lift_z) },
                lift_xy,
                lift_z,
                blocked: None,
                impact_pending: false,
            }
        })
        .collect();

    let mut pose = BodyPose {
        position: Vector3::new(0.0, 0.0, robot.stand_height),
        yaw: 0.0,
    };
    let mut trace = SimulationTrace {
        control_rate_hz: config.control_rate_hz,
        dt_s: dt,
        period_s: period,
        samples_per_cycle: per_cycle,
        cycles_simulated: 0,
        warmup_cycles: config.warmup_cycles,
        leg_count: n,
        weight_n: weight,
        leg_length_m: leg_length,
        torque_limit_nm: torque_limit,
        margins: Vec::with_capacity(base_end),
        load_sums: Vec::with_capacity(base_end),
        measured: start_k..base_end,
        delta_x_m: 0.0,
        delta_y_m: 0.0,
        failure: None,
        torque_exceeded: false,
        torque_violation: 0.0,
        max_abs_torque_nm: 0.0,
        final_com: pose.position,
        diagnostics: Diagnostics::default(),
        samples: Vec::new(),
    };

    let mut start_xy: Option<Point2> = None;
    let mut end_xy: Option<(Point2, usize)> = None;
    let mut obstructed = false;
    let mut limit = base_end;
    let mut com = pose.position;
    let mut last_k;

    let mut stance_c: Vec<Point2> = Vec::with_capacity(n);
    let mut stance_w: Vec<Point2> = Vec::with_capacity(n);
    let mut stance_feet: Vec<Vector3<f64>> = Vec::with_capacity(n);
    let mut stance_normals: Vec<Vector3<f64>> = Vec::with_capacity(n);
    let mut stance_legs: Vec<usize> = Vec::with_capacity(n);
    let mut hull_pts: Vec<Point2> = Vec::with_capacity(n);
    let mut points: Vec<LegPoints> = Vec::with_capacity(n);

    let mut k = 0usize;
    loop {
        let mut closing = false;
        if k == limit {
            let climbing = step_goal.is_some_and(|g| com.x < g) && limit < climb_limit;
            if climbing {
                limit += per_cycle;
            } else {
                closing = true;
            }
        }
        let t = k as f64 * dt;
        last_k = k;

        // phase transitions
        let mut phases = [LegPhase::Stance { progress: 0.0 }; 8];
        for (i, ls) in legs.iter_mut().enumerate() {
            let phase = schedule.leg_phase(i, t);
            phases[i] = phase;
            let stance = phase.is_stance();
            if stance && !ls.stance {
                ls.foothold = Vector3::new(ls.foot.x, ls.foot.y, terrain.height_at(ls.foot.x, ls.foot.y));
                ls.impact_pending = k > 0;
            } else if !stance && ls.stance {
                let body = pose.to_body(&ls.foothold);
                ls.lift_xy = Vector2::new(body.x, body.y);
                ls.lift_z = ls.foothold.z;
                ls.blocked = None;
                ls.impact_pending = false;
            }
            ls.stance = stance;
        }

        // body pose from the stance footholds
        stance_c.clear();
        stance_w.clear();
        let mut z_sum = 0.0;
        for (i, ls) in legs.iter().enumerate() {
            if ls.stance {
                let c = schedule.foot_target(i, t, &nominal[i]);
                stance_c.push(Point2::new(c.x, c.y));
                stance_w.push(ls.foothold.xy());
                z_sum += ls.foothold.z;
            }
        }
        if stance_c.is_empty() {
            trace.failure = Some(Failure::Fell);
            break;
        }
        let (yaw, xy) = fit_pose(&stance_c, &stance_w, pose.yaw);
        pose = BodyPose {
            position: Vector3::new(xy.x, xy.y, z_sum / stance_c.len() as f64 + robot.stand_height),
            yaw,
        };
        let (s, c) = yaw.sin_cos();
        for (a, b) in stance_c.iter().zip(&stance_w) {
            let fitted = Point2::new(c * a.x - s * a.y, s * a.x + c * a.y) + xy;
            let r = (fitted - b).norm();
            if r > trace.diagnostics.max_fit_residual_m {
                trace.diagnostics.max_fit_residual_m = r;
            }
        }
        if k == start_k {
            start_xy = Some(xy);
        }
        if k == base_end {
            end_xy = Some((xy, k));
        }
        if closing {
            break;
        }

        // swing feet
        for (i, ls) in legs.iter_mut().enumerate() {
            let LegPhase::Swing { progress, .. } = phases[i] else {
                ls.foot = ls.foothold;
                continue;
            };
            let (ease, lift) = swing_profile(progress);
            let target = Vector2::new(nominal[i].x + 0.5 * schedule.strides_m[i], nominal[i].y);
            let body_xy = ls.lift_xy + (target - ls.lift_xy) * ease;
            let mut world = pose.to_world(&Vector3::new(body_xy.x, body_xy.y, 0.0)).xy();
            if let Some(b) = ls.blocked {
                world = b;
            } else if terrain.blocks(ls.foot.x, world.x, ls.foot.z) {
                ls.blocked = Some(ls.foot.xy());
                world = ls.foot.xy();
                obstructed = true;
                trace.diagnostics.obstructions += 1;
            }
            let ground = terrain.height_at(world.x, world.y);
            let z = (1.0 - progress) * ls.lift_z + progress * ground + schedule.swing_height_m * lift;
            ls.foot = Vector3::new(world.x, world.y, z);
        }

        // joint angles and centre of mass
        points.clear();
        let mut weighted = robot.body_mass * pose.position;
        let mut unreachable = false;
        for i in 0..n {
            let target = pose.to_body(&legs[i].foot);
            let Some(q) = inverse_kinematics(&robot.legs[i], &target, &robot.mounts[i]) else {
                unreachable = true;
                break;
            };
            let pts = leg_points(&robot.legs[i], &q, &robot.mounts[i]);
            for (cen, m) in pts.link_centroids().iter().zip(&robot.legs[i].link_masses_kg) {
                weighted += *m * pose.to_world(cen);
            }
            points.push(pts);
        }
        if unreachable {
            trace.failure = Some(if obstructed && edge.is_some() { Failure::Stuck } else { Failure::Unreachable });
            break;
        }
        com = weighted / total_mass;

        // support polygon
        stance_feet.clear();
        stance_normals.clear();
        stance_legs.clear();
        hull_pts.clear();
        let mut mask = 0u8;
        for (i, ls) in legs.iter().enumerate() {
            if ls.stance {
                mask |= 1 << i;
                stance_feet.push(ls.foothold);
                stance_normals.push(terrain.surface_normal(ls.foothold.x, ls.foothold.y));
                stance_legs.push(i);
                hull_pts.push(ls.foothold.xy());
            }
        }
        let hull = convex_hull(&hull_pts)?;
        let margin = signed_distance_to_hull(&com.xy(), &hull);

        // forces
        let solution = if hull.len() >= 3 && margin >= 0.0 {
            distribute_contact_forces(&stance_feet, &com, weight, &stance_normals)?
        } else {
            least_squares_contact(&stance_feet, &com, weight)
        };
        let static_feasible = solution.balanced && hull.len() >= 3 && margin >= 0.0;
        if !static_feasible {
            trace.diagnostics.unbalanced_samples += 1;
        }
        let mut slipping = false;
        for (f, nrm) in solution.forces.iter().zip(&stance_normals) {
            let fn_ = f.dot(nrm);
            let ft = (f - fn_ * nrm).norm();
            if fn_ <= 0.0 || ft > terrain.friction * fn_ {
                slipping = true;
            }
        }
        if slipping {
            trace.diagnostics.slip_samples += 1;
        }

        let measured = k >= start_k && k < base_end;
        let full = detail == TraceDetail::Full;
        let mut record = full.then(|| SampleRecord {
            t,
            pose,
            com,
            stance_mask: mask,
            margin,
            static_feasible,
            measured,
            feet: legs.iter().map(|l| l.foot).collect(),
            contact_forces: vec![Vector3::zeros(); n],
            impact_forces: vec![Vector3::zeros(); n],
            joint_forces: Vec::with_capacity(3 * n),
            torques: Vec::with_capacity(3 * n),
        });
        let mut load = 0.0;
        let mut slot = 0;
        for i in 0..n {
            let leg = &robot.legs[i];
            let mut force = Vector3::zeros();
            if legs[i].stance {
                let balanced = solution.forces[slot];
                let normal = stance_normals[slot];
                slot += 1;
                force = balanced;
                if let Some(r) = record.as_mut() {
                    r.contact_forces[i] = balanced;
                }
                if legs[i].impact_pending {
                    legs[i].impact_pending = false;
                    if config.impact_proxy {
                        let swing_time = schedule.swing_duration(i);
                        let v = ((legs[i].foothold.z - legs[i].lift_z) - std::f64::consts::PI * schedule.swing_height_m).abs()
                            / swing_time;
                        let impact = leg.link_masses_kg[2] * v * config.control_rate_hz * normal;
                        force += impact;
                        if let Some(r) = record.as_mut() {
                            r.impact_forces[i] = impact;
                        }
                    }
                }
            }
            let body_force = pose.rotate_to_body(&force);
            let tau = torques_from_points(leg, &points[i], &body_force);
            for j in 0..3 {
                let a = tau[j].abs();
                if a > trace.max_abs_torque_nm {
                    trace.max_abs_torque_nm = a;
                }
                if a > leg.torque_limit_nm {
                    trace.torque_exceeded = true;
                    trace.torque_violation += a - leg.torque_limit_nm;
                }
            }
            let reactions = joint_reaction_forces(leg, &body_force);
            for r in &reactions {
                load += r.norm();
            }
            if let Some(rec) = record.as_mut() {
                rec.joint_forces.extend_from_slice(&reactions);
                rec.torques.extend(tau.iter());
            }
        }
        trace.margins.push(margin);
        trace.load_sums.push(load);
        if let Some(r) = record {
            trace.samples.push(r);
        }
        if margin < -fall {
            trace.failure = Some(Failure::Fell);
            break;
        }
        k += 1;
    }

    trace.cycles_simulated = last_k.div_ceil(per_cycle);
    trace.final_com = com;
    if let Some(start) = start_xy {
        let (end, end_k) = end_xy.unwrap_or((pose.position.xy(), last_k));
        let cycles = (end_k - start_k) as f64 / per_cycle as f64;
        if cycles > 0.0 {
            trace.delta_x_m = (end.x - start.x) / cycles;
            trace.delta_y_m = (end.y - start.y) / cycles;
        }
    }
    if trace.failure.is_none() {
        if let Some(goal) = step_goal {
            if com.x < goal {
                trace.failure = Some(Failure::Stuck);
            }
        }
    }
    if trace.failure.is_none() && trace.torque_exceeded {
        trace.failure = Some(Failure::TorqueExceeded);
    }
    Ok(trace)
}
