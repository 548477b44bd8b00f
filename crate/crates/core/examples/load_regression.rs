//! Multiple regression of joint load on the gait parameters.
//!
//! Uses a synthetic design with a known answer, so the fitted coefficients can be read
//! against the truth.

use gaitopt::analysis::{ols, Design, VariableGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> gaitopt::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rows = Vec::new();
    let mut response = Vec::new();
    for _ in 0..60 {
        let beta: f64 = rng.gen_range(0.5..0.9);
        let h: f64 = rng.gen_range(0.02..0.2);
        let l: f64 = rng.gen_range(0.05..0.2);
        // load grows with duty factor and swing height; stride length is irrelevant
        let noise: f64 = rng.gen_range(-0.01..0.01);
        response.push(1.0 + 0.8 * beta + 2.0 * h + noise);
        rows.push(vec![beta, h, l]);
    }
    let design = Design {
        names: vec!["beta".into(), "H".into(), "L".into()],
        groups: vec![VariableGroup::DutyHeight, VariableGroup::DutyHeight, VariableGroup::Strides],
        rows,
        response,
    };
    let report = ols(&design, "f_load")?;
    print!("{}", report.to_text());
    Ok(())
}
