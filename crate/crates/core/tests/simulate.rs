use gaitopt::evaluator::{balance_residuals, simulate, Failure, SimConfig, SimulationTrace};
use gaitopt::gait::{build_schedule, gait_bounds, DecisionVector, GaitName, GaitSchedule};
use gaitopt::objectives::{assemble, nominal_margin, ObjectiveConstants};
use gaitopt::robot::RobotModel;
use gaitopt::terrain::Terrain;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn robot_for(gait: GaitName) -> RobotModel {
    if gait.leg_count() == 4 {
        RobotModel::quad()
    } else {
        RobotModel::hex()
    }
}

fn uniform(gait: GaitName, stride: f64, speed: f64, height: f64, duty: f64) -> DecisionVector {
    let k = gait.leg_count();
    DecisionVector {
        strides_m: vec![stride; k],
        swing_speeds_mps: vec![speed; k],
        swing_height_m: height,
        duty_factor: duty,
    }
}

fn run(robot: &RobotModel, gait: GaitName, dv: &DecisionVector, terrain: &Terrain) -> SimulationTrace {
    let schedule = build_schedule(gait, robot.leg_count(), dv).unwrap();
    simulate(robot, &schedule, terrain, &SimConfig::default()).unwrap()
}

fn random_genomes(gait: GaitName, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let bounds = gait_bounds(gait);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| bounds.sample(&mut rng)).collect()
}

#[test]
fn feasible_samples_are_balanced() {
    let robot = RobotModel::quad();
    for g in random_genomes(GaitName::Trot, 4, 11) {
        let dv = DecisionVector::decode(&g, 4).unwrap();
        let trace = run(&robot, GaitName::Trot, &dv, &Terrain::flat());
        let mut checked = 0;
        for s in trace.samples.iter().filter(|s| s.static_feasible) {
            let (f, m) = balance_residuals(&s.feet, &s.com, trace.weight_n, &s.contact_forces);
            assert!(f < 1e-6 && m < 1e-6, "t = {}: residuals {f} N, {m} N m", s.t);
            checked += 1;
        }
        assert!(checked > 0);
    }
}

#[test]
fn swing_feet_carry_no_contact_force() {
    let robot = RobotModel::hex();
    let dv = uniform(GaitName::Tripod, 0.15, 0.1, 0.15, 0.6);
    let trace = run(&robot, GaitName::Tripod, &dv, &Terrain::flat());
    for s in &trace.samples {
        for (i, f) in s.contact_forces.iter().enumerate() {
            if s.stance_mask & (1 << i) == 0 {
                assert_eq!(f.norm(), 0.0);
            }
        }
    }
}

fn mirror_schedule(s: &GaitSchedule) -> GaitSchedule {
    let mut m = s.clone();
    for pair in 0..s.leg_count() / 2 {
        let (l, r) = (2 * pair, 2 * pair + 1);
        m.phase_offsets.swap(l, r);
        m.strides_m.swap(l, r);
        m.swing_speeds_mps.swap(l, r);
    }
    m
}

#[test]
fn mirrored_gait_mirrors_drift() {
    for gait in [GaitName::Trot, GaitName::Tetrapod, GaitName::Wave] {
        let robot = robot_for(gait);
        for g in random_genomes(gait, 3, 5) {
            let dv = DecisionVector::decode(&g, robot.leg_count()).unwrap();
            let schedule = build_schedule(gait, robot.leg_count(), &dv).unwrap();
            let cfg = SimConfig::default();
            let a = simulate(&robot, &schedule, &Terrain::flat(), &cfg).unwrap();
            let b = simulate(&robot, &mirror_schedule(&schedule), &Terrain::flat(), &cfg).unwrap();
            assert!((a.delta_x_m - b.delta_x_m).abs() < 1e-9, "{gait}: {} vs {}", a.delta_x_m, b.delta_x_m);
            assert!((a.delta_y_m + b.delta_y_m).abs() < 1e-9, "{gait}: {} vs {}", a.delta_y_m, b.delta_y_m);
        }
    }
}

#[test]
fn equal_strides_walk_straight() {
    let robot = RobotModel::hex();
    let trace = run(&robot, GaitName::Tetrapod, &uniform(GaitName::Tetrapod, 0.2, 0.1, 0.2, 0.75), &Terrain::flat());
    assert!(trace.delta_y_m.abs() < 1e-9);
    assert!(trace.delta_x_m > 0.0);
}

#[test]
fn traces_are_deterministic() {
    let robot = RobotModel::hex();
    let dv = DecisionVector::decode(&random_genomes(GaitName::Wave, 1, 9)[0], 6).unwrap();
    let a = run(&robot, GaitName::Wave, &dv, &Terrain::slope(10.0));
    let b = run(&robot, GaitName::Wave, &dv, &Terrain::slope(10.0));
    assert_eq!(a, b);
}

#[test]
fn torque_flag_matches_samples() {
    // a weak actuator so that both outcomes occur
    let mut spec = RobotModel::quad().spec().clone();
    spec.leg.torque_limit_nm = 3.0;
    let robot = RobotModel::from_spec(spec).unwrap();
    let mut seen = [false; 2];
    for g in random_genomes(GaitName::Trot, 12, 21) {
        let dv = DecisionVector::decode(&g, 4).unwrap();
        let trace = run(&robot, GaitName::Trot, &dv, &Terrain::flat());
        let exceeded = trace.samples.iter().any(|s| s.torques.iter().any(|t| t.abs() > trace.torque_limit_nm));
        assert_eq!(trace.torque_exceeded, exceeded);
        assert_eq!(trace.torque_violation > 0.0, exceeded);
        if trace.failure.is_none() || trace.failure == Some(Failure::TorqueExceeded) {
            assert_eq!(trace.failure == Some(Failure::TorqueExceeded), exceeded);
        }
        seen[exceeded as usize] = true;
    }
    assert!(seen[0] && seen[1], "both outcomes should occur: {seen:?}");
}

#[test]
fn near_static_wave_is_stable() {
    let robot = RobotModel::hex();
    let dv = uniform(GaitName::Wave, 0.05, 0.01, 0.10, 0.95);
    let trace = run(&robot, GaitName::Wave, &dv, &Terrain::flat());
    assert_eq!(trace.failure, None);
    // the wave sequence is not left/right symmetric, so a trace of drift remains
    assert!(trace.delta_y_m.abs() < 1e-6, "{}", trace.delta_y_m);
    let a = assemble(&trace, &ObjectiveConstants::default(), nominal_margin(&robot).unwrap());
    assert!(a.objectives.f_stability > 0.8, "{}", a.objectives.f_stability);
    assert_eq!(a.constraint_violation, 0.0);
}

#[test]
fn high_swing_on_short_legs_is_unreachable() {
    let mut spec = RobotModel::quad().spec().clone();
    spec.leg.link_lengths_m = [0.1, 0.1];
    spec.stand_height_m = 0.12;
    let robot = RobotModel::from_spec(spec).unwrap();
    let trace = run(&robot, GaitName::Trot, &uniform(GaitName::Trot, 0.1, 0.1, 0.5, 0.6), &Terrain::flat());
    assert_eq!(trace.failure, Some(Failure::Unreachable));
    let a = assemble(&trace, &ObjectiveConstants::default(), nominal_margin(&robot).unwrap());
    assert!(a.constraint_violation >= 10.0);
    assert!(a.objectives.f_stability <= 0.0);
}

#[test]
fn step_climb_needs_clearance() {
    let robot = RobotModel::hex();
    let dv = uniform(GaitName::Tripod, 0.2, 0.1, 0.3, 0.6);
    let clears = run(&robot, GaitName::Tripod, &dv, &Terrain::step(0.10, 0.5));
    assert_eq!(clears.failure, None);
    assert!(clears.final_com.x >= 0.5 + robot.body_length / 2.0);

    let low = uniform(GaitName::Tripod, 0.2, 0.1, 0.1, 0.6);
    let blocked = run(&robot, GaitName::Tripod, &low, &Terrain::step(0.15, 0.5));
    assert_eq!(blocked.failure, Some(Failure::Stuck));
    assert!(blocked.diagnostics.obstructions > 0);
}

#[test]
fn sample_grid_covers_whole_cycles() {
    let robot = RobotModel::quad();
    let dv = uniform(GaitName::Trot, 0.2, 0.07, 0.2, 0.6);
    let trace = run(&robot, GaitName::Trot, &dv, &Terrain::flat());
    let expected = (trace.control_rate_hz * trace.period_s).round() as usize;
    assert_eq!(trace.samples_per_cycle, expected);
    assert_eq!(trace.margins.len(), trace.samples_per_cycle * trace.cycles_simulated);
    assert_eq!(trace.measured.len(), trace.samples_per_cycle * (trace.cycles_simulated - trace.warmup_cycles));
    assert!((trace.dt_s * trace.samples_per_cycle as f64 - trace.period_s).abs() < 1e-12);
}
