use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::individual::Individual;
use super::reference::{divisions_for_population, generate_reference_points, ReferencePointSet};
use super::selection::EnvironmentalSelection;
use super::sorting::assign_ranks;
use super::variation::{polynomial_mutation, sbx_crossover, Bounds};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    #[serde(default = "defaults::population_size")]
    pub population_size: usize,
    #[serde(default = "defaults::generations")]
    pub generations: usize,
    #[serde(default = "defaults::crossover_probability")]
    pub crossover_probability: f64,
    #[serde(default = "defaults::crossover_distribution_index")]
    pub crossover_distribution_index: f64,
    /// `None` means `1 / n` for an `n`-gene genome.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_probability: Option<f64>,
    #[serde(default = "defaults::mutation_distribution_index")]
    pub mutation_distribution_index: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

mod defaults {
    pub fn population_size() -> usize {
        91
    }
    pub fn generations() -> usize {
        10
    }
    pub fn crossover_probability() -> f64 {
        1.0
    }
    pub fn crossover_distribution_index() -> f64 {
        30.0
    }
    pub fn mutation_distribution_index() -> f64 {
        20.0
    }
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: defaults::population_size(),
            generations: defaults::generations(),
            crossover_probability: defaults::crossover_probability(),
            crossover_distribution_index: defaults::crossover_distribution_index(),
            mutation_probability: None,
            mutation_distribution_index: defaults::mutation_distribution_index(),
            rng_seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, field: &str, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!("optimizer.{field}"), msg))
            }
        };
        check(self.population_size > 0, "population_size", "must be positive")?;
        check(self.generations > 0, "generations", "must be positive")?;
        check(
            (0.0..=1.0).contains(&self.crossover_probability),
            "crossover_probability",
            "must lie in [0, 1]",
        )?;
        check(
            self.crossover_distribution_index > 0.0,
            "crossover_distribution_index",
            "must be positive",
        )?;
        if let Some(p) = self.mutation_probability {
            check((0.0..=1.0).contains(&p), "mutation_probability", "must lie in [0, 1]")?;
        }
        check(
            self.mutation_distribution_index > 0.0,
            "mutation_distribution_index",
            "must be positive",
        )
    }

    pub fn mutation_probability_for(&self, genes: usize) -> f64 {
        self.mutation_probability
            .unwrap_or(1.0 / genes.max(1) as f64)
    }
}

/// Result of evaluating one genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: Vec<f64>,
    pub constraint_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub evaluations: usize,
    pub feasible: usize,
    pub first_front: usize,
    /// Per objective, over feasible members (minimization form). Empty if none are feasible.
    pub best: Vec<f64>,
    pub median: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// Feasible rank-0 members of the final population, in population order.
    pub archive: Vec<Individual>,
    pub population: Vec<Individual>,
    pub history: Vec<GenerationStats>,
    pub reference_points: ReferencePointSet,
}

type Observer<'a> = Box<dyn FnMut(usize, &[Individual]) + 'a>;

/// NSGA-III driver.
pub struct Optimizer<'a> {
    config: EvolutionConfig,
    bounds: Bounds,
    objectives: usize,
    jobs: usize,
    initial: Vec<Vec<f64>>,
    observer: Option<Observer<'a>>,
}

impl<'a> Optimizer<'a> {
    pub fn new(config: EvolutionConfig, bounds: Bounds, objectives: usize) -> Self {
        Optimizer {
            config,
            bounds,
            objectives,
            jobs: 1,
            initial: Vec::new(),
            observer: None,
        }
    }

    /// Evaluate candidates on up to `jobs` threads. Output does not depend on this value.
    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    /// Genomes placed at the front of the initial population; the rest is sampled uniformly.
    pub fn initial_population(mut self, genomes: Vec<Vec<f64>>) -> Self {
        self.initial = genomes;
        self
    }

    /// Called with the population after initialization (generation 0) and each generation.
    pub fn observe(mut self, f: impl FnMut(usize, &[Individual]) + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn run<F, E>(mut self, evaluate: F) -> Result<OptimizationResult>
    where
        F: Fn(&[f64]) -> std::result::Result<Evaluation, E> + Sync,
        E: std::fmt::Display,
    {
        self.config.validate()?;
        let n = self.config.population_size;
        let genes = self.bounds.len();
        if let Some(g) = self.initial.iter().find(|g| !self.bounds.contains(g)) {
            return Err(Error::Parameter(format!(
                "initial genome {g:?} lies outside the bounds"
            )));
        }
        let divisions = divisions_for_population(self.objectives, n)?;
        let refs = generate_reference_points(self.objectives, divisions)?;
        let pool = if self.jobs > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(self.jobs)
                    .build()
                    .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };

        let mut rng = ChaCha8Rng::seed_from_u64(self.config.rng_seed);
        let mut genomes: Vec<Vec<f64>> = self.initial.iter().take(n).cloned().collect();
        while genomes.len() < n {
            genomes.push(self.bounds.sample(&mut rng));
        }

        let mut evaluations = 0;
        let mut population = evaluate_all(&evaluate, genomes, self.objectives, 0, pool.as_ref())?;
        evaluations += population.len();
        assign_ranks(&mut population)?;
        let mut history = vec![stats(0, evaluations, &population, self.objectives)];
        if let Some(obs) = self.observer.as_mut() {
            obs(0, &population);
        }

        let mut selection = EnvironmentalSelection::new();
        let p_mut = self.config.mutation_probability_for(genes);
        for generation in 1..=self.config.generations {
            let mut offspring = Vec::with_capacity(n + 1);
            while offspring.len() < n {
                let a = tournament(&population, &mut rng);
                let b = tournament(&population, &mut rng);
                let (c1, c2) = sbx_crossover(
                    &population[a].genome,
                    &population[b].genome,
                    self.config.crossover_distribution_index,
                    self.config.crossover_probability,
                    &self.bounds,
                    &mut rng,
                );
                for child in [c1, c2] {
                    offspring.push(polynomial_mutation(
                        &child,
                        self.config.mutation_distribution_index,
                        p_mut,
                        &self.bounds,
                        &mut rng,
                    ));
                }
            }
            offspring.truncate(n);

            let children =
                evaluate_all(&evaluate, offspring, self.objectives, generation, pool.as_ref())?;
            evaluations += children.len();
            let mut merged = std::mem::take(&mut population);
            merged.extend(children);
            population = selection.select(merged, &refs, n, &mut rng)?;
            assign_ranks(&mut population)?;
            history.push(stats(generation, evaluations, &population, self.objectives));
            if let Some(obs) = self.observer.as_mut() {
                obs(generation, &population);
            }
        }

        let archive = population
            .iter()
            .filter(|ind| ind.rank == 0 && ind.is_feasible())
            .cloned()
            .collect();
        Ok(OptimizationResult {
            archive,
            population,
            history,
            reference_points: refs,
        })
    }
}

/// Convenience wrapper around [`Optimizer`].
pub fn optimize<F, E>(
    evaluate: F,
    objectives: usize,
    bounds: Bounds,
    config: EvolutionConfig,
) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> std::result::Result<Evaluation, E> + Sync,
    E: std::fmt::Display,
{
    Optimizer::new(config, bounds, objectives).run(evaluate)
}

fn evaluate_all<F, E>(
    evaluate: &F,
    genomes: Vec<Vec<f64>>,
    objectives: usize,
    generation: usize,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<Individual>>
where
    F: Fn(&[f64]) -> std::result::Result<Evaluation, E> + Sync,
    E: std::fmt::Display,
{
    let results: Vec<std::result::Result<Evaluation, String>> = match pool {
        Some(pool) => pool.install(|| {
            genomes
                .par_iter()
                .map(|g| evaluate(g).map_err(|e| e.to_string()))
                .collect()
        }),
        None => genomes
            .iter()
            .map(|g| evaluate(g).map_err(|e| e.to_string()))
            .collect(),
    };
    genomes
        .into_iter()
        .zip(results)
        .enumerate()
        .map(|(index, (genome, res))| {
            let eval = res.map_err(|message| Error::Evaluation {
                generation,
                index,
                message,
            })?;
            if eval.objectives.len() != objectives {
                return Err(Error::Evaluation {
                    generation,
                    index,
                    message: format!(
                        "returned {} objectives, expected {objectives}",
                        eval.objectives.len()
                    ),
                });
            }
            if !(eval.constraint_violation >= 0.0) {
                return Err(Error::Evaluation {
                    generation,
                    index,
                    message: format!("constraint violation {} is negative or NaN", eval.constraint_violation),
                });
            }
            Ok(Individual::new(genome, eval.objectives, eval.constraint_violation))
        })
        .collect()
}

/// Binary tournament on feasibility; ties among feasible individuals are random.
fn tournament<R: Rng + ?Sized>(pop: &[Individual], rng: &mut R) -> usize {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    let (x, y) = (&pop[a], &pop[b]);
    match (x.is_feasible(), y.is_feasible()) {
        (true, false) => a,
        (false, true) => b,
        (false, false) if x.constraint_violation != y.constraint_violation => {
            if x.constraint_violation < y.constraint_violation {
                a
            } else {
                b
            }
        }
        _ => {
            if rng.gen_bool(0.5) {
                a
            } else {
                b
            }
        }
    }
}

fn stats(generation: usize, evaluations: usize, pop: &[Individual], m: usize) -> GenerationStats {
    let feasible: Vec<&Individual> = pop.iter().filter(|i| i.is_feasible()).collect();
    let mut best = Vec::new();
    let mut median = Vec::new();
    if !feasible.is_empty() {
        for j in 0..m {
            let mut vals: Vec<f64> = feasible.iter().map(|i| i.objectives[j]).collect();
            vals.sort_by(f64::total_cmp);
            best.push(vals[0]);
            let k = vals.len();
            median.push(if k % 2 == 1 {
                vals[k / 2]
            } else {
                0.5 * (vals[k / 2 - 1] + vals[k / 2])
            });
        }
    }
    GenerationStats {
        generation,
        evaluations,
        feasible: feasible.len(),
        first_front: pop.iter().filter(|i| i.rank == 0).count(),
        best,
        median,
    }
}
