//! A short optimization of the quadruped trot, printed as a Pareto table.

use gaitopt::gait::GaitName;
use gaitopt::nsga3::EvolutionConfig;
use gaitopt::problem::GaitProblem;
use gaitopt::robot::RobotModel;
use gaitopt::terrain::Terrain;

fn main() -> gaitopt::Result<()> {
    let problem = GaitProblem::new(RobotModel::quad(), GaitName::Trot, Terrain::flat())?;
    let config = EvolutionConfig {
        population_size: 28,
        generations: 6,
        rng_seed: 3,
        ..EvolutionConfig::default()
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let run = problem.optimize_with(&config, jobs, Vec::new(), |gen, pop| {
        let feasible = pop.iter().filter(|i| i.is_feasible()).count();
        eprintln!("generation {gen}: {feasible} feasible");
    })?;

    println!("{} evaluations, {} on the front", run.evaluations, run.entries.len());
    println!("{:>8} {:>8} {:>8}   beta     H", "speed", "stab", "load");
    for e in &run.entries {
        let o = &e.objectives;
        println!(
            "{:8.4} {:8.4} {:8.4}   {:.3} {:.3}",
            o.f_speed, o.f_stability, o.f_load, e.decision.duty_factor, e.decision.swing_height_m
        );
    }
    Ok(())
}
