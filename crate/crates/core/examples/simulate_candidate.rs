//! Run the quasi-static evaluator on one hand-picked gait and score it.
//!
//! `cargo run --release --example simulate_candidate [flat|slope|step]`

use gaitopt::evaluator::{simulate, SimConfig};
use gaitopt::gait::{build_schedule, DecisionVector, GaitName};
use gaitopt::objectives::{assemble, nominal_margin, ObjectiveConstants};
use gaitopt::robot::RobotModel;
use gaitopt::terrain::Terrain;

fn main() -> gaitopt::Result<()> {
    let terrain = match std::env::args().nth(1).as_deref() {
        Some("slope") => Terrain::slope(10.0),
        Some("step") => Terrain::step(0.05, 0.3),
        _ => Terrain::flat(),
    };
    let robot = RobotModel::hex();
    let dv = DecisionVector {
        strides_m: vec![0.12; 6],
        swing_speeds_mps: vec![0.1; 6],
        swing_height_m: 0.15,
        duty_factor: 0.6,
    };
    let schedule = build_schedule(GaitName::Tripod, 6, &dv)?;
    let trace = simulate(&robot, &schedule, &terrain, &SimConfig::default())?;

    println!("terrain {}", terrain.name());
    println!("period {:.3} s, {} samples", trace.period_s, trace.margins.len());
    println!("dx {:.4} m/cycle, dy {:.2e} m/cycle", trace.delta_x_m, trace.delta_y_m);
    println!("failure {:?}, max |tau| {:.2} Nm", trace.failure, trace.max_abs_torque_nm);

    let d_nom = nominal_margin(&robot)?;
    let scored = assemble(&trace, &ObjectiveConstants::default(), d_nom);
    let o = scored.objectives;
    println!(
        "speed {:.4}, stability {:.4}, load {:.4}, violation {}",
        o.f_speed, o.f_stability, o.f_load, scored.constraint_violation
    );
    Ok(())
}
