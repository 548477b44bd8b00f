//! Pareto archive file format: a metadata header plus an entry array, stored as JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::TraceSummary;
use crate::gait::{DecisionVector, GaitName};
use crate::objectives::ObjectiveVector;
use crate::terrain::Terrain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMetadata {
    /// Crate version that wrote the file.
    pub version: String,
    pub morphology: String,
    pub leg_count: usize,
    pub gait: GaitName,
    pub terrain: Terrain,
    pub seed: u64,
    /// Number of objectives the optimizer saw. Load is still recorded when this is 2.
    pub objective_count: usize,
    pub config_hash: String,
    pub population_size: usize,
    pub generations: usize,
    pub d_nom_m: f64,
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub genome: Vec<f64>,
    pub decision: DecisionVector,
    pub objectives: ObjectiveVector,
    pub constraint_violation: f64,
    pub summary: TraceSummary,
}

impl ArchiveEntry {
    pub fn is_feasible(&self) -> bool {
        self.constraint_violation <= 0.0
    }

    /// Minimization form truncated to the first `objective_count` objectives.
    pub fn minimization(&self, objective_count: usize) -> Vec<f64> {
        self.objectives.minimization()[..objective_count].to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    pub metadata: ArchiveMetadata,
    pub entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("archive serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: "<archive>".into(),
            message: format!(
                "line {}, column {} (at `{}`): {}",
                e.inner().line(),
                e.inner().column(),
                e.path(),
                e.inner()
            ),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn feasible(&self) -> impl Iterator<Item = &ArchiveEntry> {
        self.entries.iter().filter(|e| e.is_feasible())
    }

    /// CSV of objective triples for scatter plots.
    pub fn scatter_csv(&self) -> String {
        let mut out = String::from("index,f_speed,f_stability,f_load,feasible\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{i},{},{},{},{}\n",
                e.objectives.f_speed,
                e.objectives.f_stability,
                e.objectives.f_load,
                e.is_feasible()
            ));
        }
        out
    }
}
