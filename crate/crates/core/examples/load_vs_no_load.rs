//! Same seed, with and without the load objective; the 2-objective front is re-scored
//! for load afterwards.

use gaitopt::analysis::compare_archives;
use gaitopt::gait::GaitName;
use gaitopt::nsga3::EvolutionConfig;
use gaitopt::problem::GaitProblem;
use gaitopt::robot::RobotModel;
use gaitopt::terrain::Terrain;

fn main() -> gaitopt::Result<()> {
    let config = EvolutionConfig {
        population_size: 28,
        generations: 8,
        rng_seed: 11,
        ..EvolutionConfig::default()
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut archives = Vec::new();
    for objectives in [3, 2] {
        let problem = GaitProblem::new(RobotModel::quad(), GaitName::Trot, Terrain::flat())?
            .with_objective_count(objectives);
        let run = problem.optimize(&config, jobs)?;
        archives.push(problem.archive(&run, "quad", &config, "example"));
    }
    let cmp = compare_archives(&archives[0], &archives[1])?;
    print!("{}", cmp.to_text());
    Ok(())
}
