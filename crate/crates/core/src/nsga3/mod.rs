//! Reference-point based many-objective evolutionary optimizer (NSGA-III).

pub mod benchmarks;
mod individual;
mod optimizer;
mod reference;
mod selection;
mod sorting;
mod variation;

pub use individual::{constrained_dominates, pareto_dominates, Individual};
pub use optimizer::{
    optimize, Evaluation, EvolutionConfig, GenerationStats, OptimizationResult, Optimizer,
};
pub use reference::{
    binomial, divisions_for_population, generate_reference_points, reference_point_count,
    ReferencePointSet,
};
pub use selection::{environmental_selection, EnvironmentalSelection};
pub use sorting::{assign_ranks, fast_nondominated_sort};
pub use variation::{polynomial_mutation, sbx_crossover, Bounds};
