//! The gait optimization problem: genome in, scored archive entry out.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::analysis::{ArchiveEntry, ArchiveMetadata, ParetoArchive};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evaluator::{simulate_with_detail, SimConfig, SimulationTrace, TraceDetail, TraceSummary};
use crate::gait::{build_schedule, gait_bounds, DecisionVector, GaitName};
use crate::nsga3::{Bounds, Evaluation, EvolutionConfig, GenerationStats, Optimizer};
use crate::objectives::{assemble, nominal_margin, ObjectiveConstants};
use crate::robot::RobotModel;
use crate::terrain::Terrain;

#[derive(Debug, Clone)]
pub struct GaitProblem {
    pub robot: RobotModel,
    pub gait: GaitName,
    pub terrain: Terrain,
    pub simulation: SimConfig,
    pub constants: ObjectiveConstants,
    /// 3 scores speed, stability and load; 2 leaves load out of the fitness.
    pub objective_count: usize,
    d_nom: f64,
}

/// Output of [`GaitProblem::optimize`].
#[derive(Debug, Clone)]
pub struct ProblemRun {
    /// Feasible first-front members of the final population.
    pub entries: Vec<ArchiveEntry>,
    pub history: Vec<GenerationStats>,
    pub evaluations: usize,
}

impl GaitProblem {
    pub fn new(robot: RobotModel, gait: GaitName, terrain: Terrain) -> Result<Self> {
        gait.check_leg_count(robot.leg_count())?;
        terrain.validate()?;
        let d_nom = nominal_margin(&robot)?;
        Ok(GaitProblem {
            robot,
            gait,
            terrain,
            simulation: SimConfig::default(),
            constants: ObjectiveConstants::default(),
            objective_count: 3,
            d_nom,
        })
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        Ok(GaitProblem::new(cfg.robot()?, cfg.gait, cfg.terrain.clone())?
            .with_simulation(cfg.simulation.clone())
            .with_constants(cfg.objectives)
            .with_objective_count(cfg.objective_count))
    }

    pub fn with_simulation(mut self, simulation: SimConfig) -> Self {
        self.simulation = simulation;
        self
    }

    pub fn with_constants(mut self, constants: ObjectiveConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_objective_count(mut self, objective_count: usize) -> Self {
        self.objective_count = objective_count;
        self
    }

    /// Margin at which the stability score saturates.
    pub fn d_nom(&self) -> f64 {
        self.constants.d_nom_m.unwrap_or(self.d_nom)
    }

    pub fn bounds(&self) -> Bounds {
        gait_bounds(self.gait)
    }

    fn run(&self, genome: &[f64], detail: TraceDetail) -> Result<(SimulationTrace, ArchiveEntry)> {
        let decision = DecisionVector::decode(genome, self.robot.leg_count())?;
        let schedule = build_schedule(self.gait, self.robot.leg_count(), &decision)?;
        let trace = simulate_with_detail(&self.robot, &schedule, &self.terrain, &self.simulation, detail)?;
        let assessment = assemble(&trace, &self.constants, self.d_nom());
        let entry = ArchiveEntry {
            genome: genome.to_vec(),
            decision,
            objectives: assessment.objectives,
            constraint_violation: assessment.constraint_violation,
            summary: TraceSummary::from_trace(&trace),
        };
        Ok((trace, entry))
    }

    /// Scores a genome; bounds are checked.
    pub fn evaluate(&self, genome: &[f64]) -> Result<ArchiveEntry> {
        self.run(genome, TraceDetail::Summary).map(|(_, e)| e)
    }

    /// Scores a genome and keeps every simulated sample.
    pub fn trace(&self, genome: &[f64]) -> Result<(SimulationTrace, ArchiveEntry)> {
        self.run(genome, TraceDetail::Full)
    }

    /// The optimizer's view of an entry.
    pub fn fitness(&self, entry: &ArchiveEntry) -> Evaluation {
        Evaluation {
            objectives: entry.minimization(self.objective_count),
            constraint_violation: entry.constraint_violation,
        }
    }

    pub fn optimize(&self, config: &EvolutionConfig, jobs: usize) -> Result<ProblemRun> {
        self.optimize_with(config, jobs, Vec::new(), |_, _| {})
    }

    /// Like [`optimize`](Self::optimize) with seeded genomes and a per-generation callback.
    pub fn optimize_with(
        &self,
        config: &EvolutionConfig,
        jobs: usize,
        initial: Vec<Vec<f64>>,
        mut observe: impl FnMut(usize, &[crate::nsga3::Individual]),
    ) -> Result<ProblemRun> {
        let cache: Mutex<HashMap<Vec<u64>, ArchiveEntry>> = Mutex::new(HashMap::new());
        let key = |g: &[f64]| g.iter().map(|x| x.to_bits()).collect::<Vec<u64>>();
        let result = Optimizer::new(config.clone(), self.bounds(), self.objective_count)
            .jobs(jobs)
            .initial_population(initial)
            .observe(|g, pop| observe(g, pop))
            .run(|genome| -> Result<Evaluation> {
                let entry = self.evaluate(genome)?;
                let fit = self.fitness(&entry);
                cache.lock().expect("cache lock").insert(key(genome), entry);
                Ok(fit)
            })?;
        let cache = cache.into_inner().expect("cache lock");
        let entries = result
            .archive
            .iter()
            .map(|ind| {
                cache.get(&key(&ind.genome)).cloned().ok_or_else(|| Error::Evaluation {
                    generation: config.generations,
                    index: 0,
                    message: "archive member missing from the evaluation cache".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemRun {
            entries,
            history: result.history,
            evaluations: cache.len(),
        })
    }

    pub fn archive(&self, run: &ProblemRun, morphology: &str, config: &EvolutionConfig, config_hash: &str) -> ParetoArchive {
        ParetoArchive {
            metadata: ArchiveMetadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                morphology: morphology.to_string(),
                leg_count: self.robot.leg_count(),
                gait: self.gait,
                terrain: self.terrain.clone(),
                seed: config.rng_seed,
                objective_count: self.objective_count,
                config_hash: config_hash.to_string(),
                population_size: config.population_size,
                generations: config.generations,
                d_nom_m: self.d_nom(),
            },
            entries: run.entries.clone(),
        }
    }
}
