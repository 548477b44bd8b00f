//! Gait parameterization: decision vectors, phase schedules and foot trajectories.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nsga3::Bounds;

pub const STRIDE_RANGE_M: (f64, f64) = (0.05, 0.30);
pub const SWING_SPEED_RANGE_MPS: (f64, f64) = (0.01, 0.15);
pub const SWING_HEIGHT_RANGE_M: (f64, f64) = (0.10, 0.50);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaitName {
    Trot,
    Wave,
    Tetrapod,
    Tripod,
}

impl GaitName {
    pub const ALL: [GaitName; 4] = [GaitName::Trot, GaitName::Wave, GaitName::Tetrapod, GaitName::Tripod];

    pub fn leg_count(self) -> usize {
        match self {
            GaitName::Trot => 4,
            _ => 6,
        }
    }

    /// Admissible duty factors.
    pub fn duty_range(self) -> (f64, f64) {
        match self {
            GaitName::Trot | GaitName::Tripod => (0.51, 0.70),
            GaitName::Wave => (0.84, 0.95),
            GaitName::Tetrapod => (0.67, 0.85),
        }
    }

    /// Legs guaranteed in stance anywhere in the duty range.
    pub fn nominal_min_stance(self) -> usize {
        match self {
            GaitName::Trot => 2,
            GaitName::Tripod => 3,
            GaitName::Tetrapod => 4,
            GaitName::Wave => 5,
        }
    }

    /// Phase offset of each leg (index 0 is leg 1).
    pub fn phase_offsets(self) -> Vec<f64> {
        match self {
            GaitName::Trot => vec![0.0, 0.5, 0.5, 0.0],
            GaitName::Tripod => vec![0.0, 0.5, 0.5, 0.0, 0.0, 0.5],
            // ripple from the rear left leg forward, then down the right side
            GaitName::Wave => vec![2.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0, 4.0 / 6.0, 0.0, 3.0 / 6.0],
            GaitName::Tetrapod => vec![2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0],
        }
    }

    pub fn check_leg_count(self, leg_count: usize) -> Result<()> {
        if self.leg_count() == leg_count {
            Ok(())
        } else {
            Err(Error::config(
                "gait",
                format!("{self} needs {} legs but the morphology has {leg_count}", self.leg_count()),
            ))
        }
    }
}

impl fmt::Display for GaitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaitName::Trot => "trot",
            GaitName::Wave => "wave",
            GaitName::Tetrapod => "tetrapod",
            GaitName::Tripod => "tripod",
        })
    }
}

impl FromStr for GaitName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trot" => Ok(GaitName::Trot),
            "wave" => Ok(GaitName::Wave),
            "tetrapod" => Ok(GaitName::Tetrapod),
            "tripod" => Ok(GaitName::Tripod),
            other => Err(Error::config("gait", format!("unknown gait `{other}`"))),
        }
    }
}

/// Decision variables of one candidate gait.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    pub strides_m: Vec<f64>,
    pub swing_speeds_mps: Vec<f64>,
    pub swing_height_m: f64,
    pub duty_factor: f64,
}

impl DecisionVector {
    pub fn leg_count(&self) -> usize {
        self.strides_m.len()
    }

    /// Genome layout `[L_1..L_k, V_1..V_k, H, beta]`.
    pub fn encode(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(2 * self.leg_count() + 2);
        g.extend_from_slice(&self.strides_m);
        g.extend_from_slice(&self.swing_speeds_mps);
        g.push(self.swing_height_m);
        g.push(self.duty_factor);
        g
    }

    pub fn decode(genome: &[f64], leg_count: usize) -> Result<Self> {
        if genome.len() != genome_length(leg_count) {
            return Err(Error::Structural(format!(
                "genome has {} genes, a {leg_count}-legged robot needs {}",
                genome.len(),
                genome_length(leg_count)
            )));
        }
        Ok(DecisionVector {
            strides_m: genome[..leg_count].to_vec(),
            swing_speeds_mps: genome[leg_count..2 * leg_count].to_vec(),
            swing_height_m: genome[2 * leg_count],
            duty_factor: genome[2 * leg_count + 1],
        })
    }

    /// Checks lengths and search ranges for `gait`.
    pub fn validate(&self, gait: GaitName) -> Result<()> {
        let k = gait.leg_count();
        if self.strides_m.len() != k || self.swing_speeds_mps.len() != k {
            return Err(Error::Structural(format!(
                "{gait} needs {k} strides and swing speeds, got {} and {}",
                self.strides_m.len(),
                self.swing_speeds_mps.len()
            )));
        }
        let bounds = gait_bounds(gait);
        for (i, (&x, name)) in self.encode().iter().zip(gene_names(k)).enumerate() {
            let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
            if !(lo <= x && x <= hi) {
                return Err(Error::Bound {
                    field: name,
                    value: x,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(())
    }

    /// Swaps each left leg's genes with its right partner's.
    pub fn mirrored(&self) -> Self {
        let mut m = self.clone();
        for pair in 0..self.leg_count() / 2 {
            m.strides_m.swap(2 * pair, 2 * pair + 1);
            m.swing_speeds_mps.swap(2 * pair, 2 * pair + 1);
        }
        m
    }
}

pub fn genome_length(leg_count: usize) -> usize {
    2 * leg_count + 2
}

/// Gene labels in genome order, e.g. `strides_m[0]`.
pub fn gene_names(leg_count: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..leg_count).map(|i| format!("strides_m[{i}]")).collect();
    names.extend((0..leg_count).map(|i| format!("swing_speeds_mps[{i}]")));
    names.push("swing_height_m".into());
    names.push("duty_factor".into());
    names
}

pub fn gait_bounds(gait: GaitName) -> Bounds {
    let k = gait.leg_count();
    let (b_lo, b_hi) = gait.duty_range();
    let mut lower = vec![STRIDE_RANGE_M.0; k];
    let mut upper = vec![STRIDE_RANGE_M.1; k];
    lower.extend(std::iter::repeat(SWING_SPEED_RANGE_MPS.0).take(k));
    upper.extend(std::iter::repeat(SWING_SPEED_RANGE_MPS.1).take(k));
    lower.extend([SWING_HEIGHT_RANGE_M.0, b_lo]);
    upper.extend([SWING_HEIGHT_RANGE_M.1, b_hi]);
    Bounds::new(lower, upper).expect("static bounds are ordered")
}

/// Where a leg is within its cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LegPhase {
    /// `progress` runs 0..1 over the swing motion and stays at 1 while the foot waits to land.
    Swing { progress: f64, elapsed: f64 },
    /// `progress` runs 0..1 from touchdown to liftoff.
    Stance { progress: f64 },
}

impl LegPhase {
    pub fn is_stance(&self) -> bool {
        matches!(self, LegPhase::Stance { .. })
    }
}

/// Timing and trajectory shape for one candidate gait.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaitSchedule {
    pub gait: GaitName,
    pub phase_offsets: Vec<f64>,
    pub duty_factor: f64,
    pub period_s: f64,
    pub strides_m: Vec<f64>,
    pub swing_speeds_mps: Vec<f64>,
    pub swing_height_m: f64,
}

/// Validates `dv` against the gait and builds its schedule.
pub fn build_schedule(gait: GaitName, leg_count: usize, dv: &DecisionVector) -> Result<GaitSchedule> {
    gait.check_leg_count(leg_count)?;
    dv.validate(gait)?;
    GaitSchedule::from_parts(gait, dv)
}

impl GaitSchedule {
    /// Builds a schedule without checking search ranges; lengths and `0 < beta < 1` are
    /// still enforced.
    pub fn from_parts(gait: GaitName, dv: &DecisionVector) -> Result<Self> {
        let k = gait.leg_count();
        if dv.strides_m.len() != k || dv.swing_speeds_mps.len() != k {
            return Err(Error::Structural(format!("{gait} needs {k} legs of parameters")));
        }
        if !(dv.duty_factor > 0.0 && dv.duty_factor < 1.0) {
            return Err(Error::Parameter(format!("duty factor {} not in (0, 1)", dv.duty_factor)));
        }
        if dv.swing_speeds_mps.iter().any(|&v| !(v > 0.0)) || dv.strides_m.iter().any(|&l| !(l >= 0.0)) {
            return Err(Error::Parameter("strides must be non-negative and speeds positive".into()));
        }
        let slowest = dv
            .strides_m
            .iter()
            .zip(&dv.swing_speeds_mps)
            .map(|(l, v)| l / v)
            .fold(0.0, f64::max);
        if !(slowest > 0.0) {
            return Err(Error::Parameter("at least one stride must be positive".into()));
        }
        Ok(GaitSchedule {
            gait,
            phase_offsets: gait.phase_offsets(),
            duty_factor: dv.duty_factor,
            period_s: slowest / (1.0 - dv.duty_factor),
            strides_m: dv.strides_m.clone(),
            swing_speeds_mps: dv.swing_speeds_mps.clone(),
            swing_height_m: dv.swing_height_m,
        })
    }

    pub fn leg_count(&self) -> usize {
        self.phase_offsets.len()
    }

    pub fn swing_fraction(&self) -> f64 {
        1.0 - self.duty_factor
    }

    /// Time a leg spends moving through the air.
    pub fn swing_duration(&self, leg: usize) -> f64 {
        self.strides_m[leg] / self.swing_speeds_mps[leg]
    }

    /// Fraction of the cycle elapsed since the leg's liftoff, in `[0, 1)`.
    pub fn leg_cycle_phase(&self, leg: usize, t: f64) -> f64 {
        let p = (t / self.period_s - self.phase_offsets[leg]).rem_euclid(1.0);
        if p >= 1.0 {
            0.0
        } else {
            p
        }
    }

    pub fn leg_phase(&self, leg: usize, t: f64) -> LegPhase {
        let p = self.leg_cycle_phase(leg, t);
        let sw = self.swing_fraction();
        if p < sw {
            let elapsed = p * self.period_s;
            let progress = (elapsed / self.swing_duration(leg)).min(1.0);
            LegPhase::Swing { progress, elapsed }
        } else {
            LegPhase::Stance {
                progress: (p - sw) / self.duty_factor,
            }
        }
    }

    pub fn stance_count(&self, t: f64) -> usize {
        (0..self.leg_count())
            .filter(|&i| self.leg_phase(i, t).is_stance())
            .count()
    }

    /// Body-frame foot target. The stride is centred on `nominal`, which is also the
    /// stance height.
    pub fn foot_target(&self, leg: usize, t: f64, nominal: &Vector3<f64>) -> Vector3<f64> {
        let half = 0.5 * self.strides_m[leg];
        match self.leg_phase(leg, t) {
            LegPhase::Stance { progress } => {
                Vector3::new(nominal.x + half - 2.0 * half * progress, nominal.y, nominal.z)
            }
            LegPhase::Swing { progress, .. } => {
                let (dx, dz) = swing_profile(progress);
                Vector3::new(
                    nominal.x - half + 2.0 * half * dx,
                    nominal.y,
                    nominal.z + self.swing_height_m * dz,
                )
            }
        }
    }
}

/// Horizontal ease `3s^2 - 2s^3` and vertical lift `sin(pi s)` at swing progress `s`.
pub fn swing_profile(s: f64) -> (f64, f64) {
    (s * s * (3.0 - 2.0 * s), (std::f64::consts::PI * s).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform(k: usize, l: f64, v: f64, h: f64, beta: f64) -> DecisionVector {
        DecisionVector {
            strides_m: vec![l; k],
            swing_speeds_mps: vec![v; k],
            swing_height_m: h,
            duty_factor: beta,
        }
    }

    fn sample_times(s: &GaitSchedule, n: usize) -> impl Iterator<Item = f64> + '_ {
        (0..n).map(move |i| s.period_s * i as f64 / n as f64)
    }

    #[test]
    fn trot_period_from_slowest_leg() {
        let s = GaitSchedule::from_parts(GaitName::Trot, &uniform(4, 0.15, 0.15, 0.1, 0.5)).unwrap();
        assert_eq!(s.period_s, 2.0);
    }

    #[test]
    fn slowest_leg_sets_period() {
        let mut dv = uniform(4, 0.1, 0.1, 0.2, 0.6);
        dv.strides_m[2] = 0.3;
        let s = build_schedule(GaitName::Trot, 4, &dv).unwrap();
        assert!((s.period_s - 3.0 / 0.4).abs() < 1e-12);
    }

    #[test]
    fn tetrapod_keeps_four_feet_down() {
        let s = build_schedule(GaitName::Tetrapod, 6, &uniform(6, 0.2, 0.1, 0.2, 0.67)).unwrap();
        assert!(sample_times(&s, 1000).all(|t| s.stance_count(t) >= 4));
    }

    #[test]
    fn wave_keeps_five_feet_down() {
        let s = build_schedule(GaitName::Wave, 6, &uniform(6, 0.2, 0.1, 0.2, 0.84)).unwrap();
        assert!(sample_times(&s, 1000).all(|t| s.stance_count(t) >= 5));
    }

    #[test]
    fn wave_offsets_step_by_sixths() {
        let mut offs = GaitName::Wave.phase_offsets();
        offs.sort_by(f64::total_cmp);
        for w in offs.windows(2) {
            assert!((w[1] - w[0] - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn group_assignments() {
        let trot = GaitName::Trot.phase_offsets();
        assert_eq!((trot[0], trot[3]), (0.0, 0.0));
        assert_eq!((trot[1], trot[2]), (0.5, 0.5));
        let tri = GaitName::Tripod.phase_offsets();
        for leg in [1, 4, 5] {
            assert_eq!(tri[leg - 1], 0.0);
        }
        for leg in [2, 3, 6] {
            assert_eq!(tri[leg - 1], 0.5);
        }
        let tet = GaitName::Tetrapod.phase_offsets();
        for phase in [0.0, 1.0 / 3.0, 2.0 / 3.0] {
            assert_eq!(tet.iter().filter(|&&p| p == phase).count(), 2);
        }
    }

    #[test]
    fn mismatched_gait_is_config_error() {
        let err = build_schedule(GaitName::Tripod, 4, &uniform(4, 0.2, 0.1, 0.2, 0.6)).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn duty_outside_range_is_bound_error() {
        let err = build_schedule(GaitName::Wave, 6, &uniform(6, 0.2, 0.1, 0.2, 0.7)).unwrap_err();
        match err {
            Error::Bound { field, .. } => assert_eq!(field, "duty_factor"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn low_swing_height_names_field() {
        let err = build_schedule(GaitName::Trot, 4, &uniform(4, 0.2, 0.1, 0.05, 0.6)).unwrap_err();
        assert!(err.to_string().contains("swing_height_m"));
    }

    #[test]
    fn genome_lengths() {
        assert_eq!(gait_bounds(GaitName::Trot).len(), 10);
        assert_eq!(gait_bounds(GaitName::Tripod).len(), 14);
        assert!(DecisionVector::decode(&[0.1; 9], 4).is_err());
    }

    #[test]
    fn mid_stance_sits_on_nominal_foothold() {
        let s = build_schedule(GaitName::Trot, 4, &uniform(4, 0.2, 0.1, 0.2, 0.6)).unwrap();
        let nominal = Vector3::new(0.26, 0.216, -0.2);
        // leg 1 lifts off at t = 0; stance spans phases [0.4, 1)
        let t = 0.7 * s.period_s;
        assert!((s.foot_target(0, t, &nominal) - nominal).norm() < 1e-12);
    }

    #[test]
    fn swing_apex_height() {
        let s = build_schedule(GaitName::Trot, 4, &uniform(4, 0.2, 0.1, 0.25, 0.6)).unwrap();
        let nominal = Vector3::new(0.0, 0.1, -0.2);
        let t = 0.5 * s.swing_duration(0);
        assert_eq!(s.foot_target(0, t, &nominal).z, nominal.z + 0.25);
    }

    #[test]
    fn swing_endpoints_span_stride() {
        let mut dv = uniform(6, 0.2, 0.1, 0.2, 0.7);
        dv.strides_m = vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
        let s = build_schedule(GaitName::Tripod, 6, &dv).unwrap();
        let nominal = Vector3::new(0.1, 0.2, -0.2);
        for leg in 0..6 {
            let half = 0.5 * dv.strides_m[leg];
            let liftoff = s.phase_offsets[leg] * s.period_s;
            let landed = liftoff + s.swing_duration(leg);
            let start = s.foot_target(leg, liftoff, &nominal).x;
            let end = s.foot_target(leg, landed, &nominal).x;
            assert!((end - start - dv.strides_m[leg]).abs() < 1e-12, "leg {leg}");
            for t in sample_times(&s, 10_000).filter(|&t| !s.leg_phase(leg, t).is_stance()) {
                let x = s.foot_target(leg, t, &nominal).x - nominal.x;
                assert!(x.abs() <= half + 1e-12);
            }
        }
    }

    #[test]
    fn trajectory_is_continuous() {
        let mut dv = uniform(4, 0.2, 0.1, 0.3, 0.55);
        dv.swing_speeds_mps = vec![0.05, 0.1, 0.15, 0.12];
        let s = build_schedule(GaitName::Trot, 4, &dv).unwrap();
        let nominal = Vector3::new(0.2, 0.2, -0.2);
        let eps = 1e-13 * s.period_s;
        for leg in 0..4 {
            let off = s.phase_offsets[leg];
            let liftoff = off * s.period_s;
            let touchdown = (off + s.swing_fraction()) * s.period_s;
            let hold = liftoff + s.swing_duration(leg);
            for edge in [liftoff + s.period_s, touchdown, hold] {
                let jump = (s.foot_target(leg, edge - eps, &nominal) - s.foot_target(leg, edge, &nominal)).norm();
                assert!(jump < 1e-12, "leg {leg} edge {edge}: {jump}");
            }
        }
    }

    #[test]
    fn anti_phase_groups_mirror() {
        let s = build_schedule(GaitName::Tripod, 6, &uniform(6, 0.2, 0.1, 0.2, 0.6)).unwrap();
        let nominal = Vector3::new(0.0, 0.3, -0.2);
        for t in sample_times(&s, 500) {
            let a = s.foot_target(0, t, &nominal);
            let b = s.foot_target(1, t + 0.5 * s.period_s, &nominal);
            assert!((a - b).norm() < 1e-12);
        }
    }

    fn floor(gait: GaitName, beta: f64) -> usize {
        let k = gait.leg_count();
        // groups swinging together bound the floor from above for tripod and tetrapod
        let bound = ((beta * k as f64).ceil() as usize).saturating_sub(1);
        bound.min(gait.nominal_min_stance())
    }

    fn gait_strategy() -> impl Strategy<Value = (GaitName, Vec<f64>)> {
        prop::sample::select(GaitName::ALL.to_vec()).prop_flat_map(|g| {
            let b = gait_bounds(g);
            let genes: Vec<_> = b.lower.iter().zip(&b.upper).map(|(&l, &u)| l..=u).collect();
            (Just(g), genes)
        })
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip((gait, genome) in gait_strategy()) {
            let dv = DecisionVector::decode(&genome, gait.leg_count()).unwrap();
            prop_assert_eq!(dv.encode(), genome.clone());
            let again = DecisionVector::decode(&dv.encode(), gait.leg_count()).unwrap();
            prop_assert_eq!(again, dv);
        }

        #[test]
        fn stance_floor_holds((gait, genome) in gait_strategy()) {
            let dv = DecisionVector::decode(&genome, gait.leg_count()).unwrap();
            let s = build_schedule(gait, gait.leg_count(), &dv).unwrap();
            let f = floor(gait, dv.duty_factor);
            for t in sample_times(&s, 2000) {
                prop_assert!(s.stance_count(t) >= f);
            }
        }

        #[test]
        fn foot_target_is_periodic((gait, genome) in gait_strategy(), frac in 0.0f64..1.0) {
            let dv = DecisionVector::decode(&genome, gait.leg_count()).unwrap();
            let s = build_schedule(gait, gait.leg_count(), &dv).unwrap();
            let nominal = Vector3::new(0.2, 0.25, -0.2);
            let t = frac * s.period_s;
            for leg in 0..s.leg_count() {
                let d = (s.foot_target(leg, t, &nominal) - s.foot_target(leg, t + s.period_s, &nominal)).norm();
                prop_assert!(d < 1e-12);
            }
        }
    }
}
