//! NSGA-III on DTLZ2: the final front should sit on the unit sphere.

use gaitopt::nsga3::benchmarks::{dtlz2, dtlz2_bounds, unconstrained};
use gaitopt::nsga3::{optimize, EvolutionConfig};

fn main() -> gaitopt::Result<()> {
    let config = EvolutionConfig {
        generations: 50,
        rng_seed: 7,
        ..EvolutionConfig::default()
    };
    let result = optimize(
        |x: &[f64]| Ok::<_, String>(unconstrained(dtlz2(x, 3))),
        3,
        dtlz2_bounds(7),
        config,
    )?;

    let radii: Vec<f64> = result
        .archive
        .iter()
        .map(|ind| ind.objectives.iter().map(|f| f * f).sum::<f64>().sqrt())
        .collect();
    let mean_error = radii.iter().map(|r| (r - 1.0).abs()).sum::<f64>() / radii.len() as f64;
    println!("{} points on the final front", radii.len());
    println!("mean | |f| - 1 | = {mean_error:.4}");
    for g in result.history.iter().step_by(10) {
        println!("gen {:>3}: first front {:>3}", g.generation, g.first_front);
    }
    Ok(())
}
