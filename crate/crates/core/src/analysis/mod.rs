//! Pareto archive handling, load regression and protocol comparison.

mod archive;
mod compare;
mod pareto;
mod regression;
pub mod special;

pub use archive::{ArchiveEntry, ArchiveMetadata, ParetoArchive};
pub use compare::{compare_archives, ArchiveComparison, ArchiveStats};
pub use pareto::{nondominated_indices, pareto_filter};
pub use regression::{
    ols, regress_load, Coefficient, Design, RegressionReport, VariableGroup, CONDITION_LIMIT, SIGNIFICANCE_LEVEL,
};
