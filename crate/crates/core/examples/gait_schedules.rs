//! Stance patterns of the four gaits over one cycle.

use gaitopt::gait::{build_schedule, DecisionVector, GaitName};

fn main() -> gaitopt::Result<()> {
    for gait in [GaitName::Trot, GaitName::Tripod, GaitName::Tetrapod, GaitName::Wave] {
        let n = gait.leg_count();
        let (lo, hi) = gait.duty_range();
        let dv = DecisionVector {
            strides_m: vec![0.1; n],
            swing_speeds_mps: vec![0.1; n],
            swing_height_m: 0.15,
            duty_factor: 0.5 * (lo + hi),
        };
        let schedule = build_schedule(gait, n, &dv)?;
        println!("{gait:?}: beta {:.2}, period {:.3} s", dv.duty_factor, schedule.period_s);
        for step in 0..12 {
            let t = schedule.period_s * step as f64 / 12.0;
            let row: String = (0..n)
                .map(|i| if schedule.leg_phase(i, t).is_stance() { '#' } else { '.' })
                .collect();
            println!("  {row}  {} in stance", schedule.stance_count(t));
        }
    }
    Ok(())
}
