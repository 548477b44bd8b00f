//! Run configuration: a TOML file with unit-suffixed keys plus `GAITOPT_*` environment
//! overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluator::SimConfig;
use crate::gait::GaitName;
use crate::nsga3::EvolutionConfig;
use crate::objectives::ObjectiveConstants;
use crate::robot::{RobotModel, HEX_PRESET, QUAD_PRESET};
use crate::terrain::Terrain;

/// Prefix of environment variables overriding config keys, e.g.
/// `GAITOPT_OPTIMIZER__GENERATIONS=5` or `GAITOPT_TERRAIN__KIND=slope`.
pub const ENV_PREFIX: &str = "GAITOPT_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `quad`, `hex`, or a path to a morphology file (relative to the config file).
    pub morphology: String,
    pub gait: GaitName,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// 3 optimizes speed, stability and load; 2 drops load.
    #[serde(default = "default_objective_count")]
    pub objective_count: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub terrain: Terrain,
    #[serde(default)]
    pub optimizer: EvolutionConfig,
    #[serde(default)]
    pub objectives: ObjectiveConstants,
    #[serde(default)]
    pub simulation: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixConfig>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_seed() -> u64 {
    42
}

fn default_objective_count() -> usize {
    3
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Cells of a success/failure matrix run with the surrounding config's optimizer and
/// simulation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub cells: Vec<MatrixCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixCell {
    pub morphology: String,
    pub gait: GaitName,
    pub terrain: Terrain,
    /// Cells marked `false` are listed but not run.
    #[serde(default = "default_execute")]
    pub execute: bool,
}

fn default_execute() -> bool {
    true
}

impl RunConfig {
    pub fn new(morphology: impl Into<String>, gait: GaitName) -> Self {
        RunConfig {
            morphology: morphology.into(),
            gait,
            seed: default_seed(),
            objective_count: default_objective_count(),
            output_dir: default_output_dir(),
            terrain: Terrain::default(),
            optimizer: EvolutionConfig {
                rng_seed: default_seed(),
                ..EvolutionConfig::default()
            },
            objectives: ObjectiveConstants::default(),
            simulation: SimConfig::default(),
            matrix: None,
            base_dir: PathBuf::new(),
        }
    }

    /// Reads a config file, applies environment overrides and validates it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let overrides = std::env::vars().filter(|(k, _)| k.starts_with(ENV_PREFIX));
        let mut cfg = Self::parse(&text, overrides)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses config text with explicit `(variable, value)` overrides; does not validate
    /// file references.
    pub fn parse(text: &str, overrides: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut value: toml::Value = toml::from_str(text).map_err(|e| {
            let at = e.span().map(|s| line_col(text, s.start)).unwrap_or_default();
            Error::config(at, e.message().to_string())
        })?;
        for (key, raw) in overrides {
            apply_override(&mut value, &key, &raw)?;
        }
        let mut cfg: RunConfig = serde_path_to_error::deserialize(value)
            .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))?;
        if cfg.optimizer.rng_seed != 0 && cfg.optimizer.rng_seed != cfg.seed {
            return Err(Error::config("optimizer.rng_seed", "set the seed once, at the top level"));
        }
        cfg.optimizer.rng_seed = cfg.seed;
        Ok(cfg)
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.optimizer.rng_seed = seed;
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective_count != 2 && self.objective_count != 3 {
            return Err(Error::config("objective_count", "must be 2 or 3"));
        }
        self.optimizer.validate()?;
        self.objectives.validate()?;
        self.simulation.validate()?;
        self.terrain.validate()?;
        let robot = self.robot()?;
        self.gait.check_leg_count(robot.leg_count())?;
        if let Some(m) = &self.matrix {
            for (i, cell) in m.cells.iter().enumerate() {
                cell.terrain.validate().map_err(|e| prefix(e, &format!("matrix.cells[{i}]")))?;
                let robot = load_morphology(&cell.morphology, &self.base_dir)
                    .map_err(|e| prefix(e, &format!("matrix.cells[{i}]")))?;
                cell.gait
                    .check_leg_count(robot.leg_count())
                    .map_err(|e| prefix(e, &format!("matrix.cells[{i}]")))?;
            }
        }
        Ok(())
    }

    pub fn robot(&self) -> Result<RobotModel> {
        load_morphology(&self.morphology, &self.base_dir)
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            rng_seed: self.seed,
            ..self.optimizer.clone()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes to TOML")
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

fn prefix(e: Error, at: &str) -> Error {
    match e {
        Error::Config { path, message } => Error::config(format!("{at}.{path}"), message),
        other => Error::config(at, other.to_string()),
    }
}

fn line_col(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    format!("line {line}, column {col}")
}

/// Resolves a preset name or morphology file.
pub fn load_morphology(name: &str, base_dir: &Path) -> Result<RobotModel> {
    match name {
        "quad" => RobotModel::from_toml_str(QUAD_PRESET),
        "hex" => RobotModel::from_toml_str(HEX_PRESET),
        path => {
            let p = base_dir.join(path);
            if !p.exists() {
                return Err(Error::config("morphology", format!("no such file: {}", p.display())));
            }
            RobotModel::load(&p).map_err(|e| prefix(e, "morphology"))
        }
    }
}

fn apply_override(root: &mut toml::Value, var: &str, raw: &str) -> Result<()> {
    let key = var.trim_start_matches(ENV_PREFIX).to_ascii_lowercase();
    let parts: Vec<&str> = key.split("__").collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(var, "malformed override key"));
    }
    let parsed = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::config(var, "override path crosses a non-table value"))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    node.as_table_mut()
        .ok_or_else(|| Error::config(var, "override path crosses a non-table value"))?
        .insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
morphology = "hex"
gait = "tetrapod"
seed = 7

[terrain]
kind = "slope"
angle_deg = 10.0

[optimizer]
generations = 4
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = RunConfig::parse(SAMPLE, []).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.optimizer.generations, 4);
        assert_eq!(cfg.evolution().rng_seed, 7);
        let again = RunConfig::parse(&cfg.to_toml(), []).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), cfg.to_toml());
    }

    #[test]
    fn unknown_key_reports_path() {
        let err = RunConfig::parse(&format!("{SAMPLE}\npopulation = 3\n"), []).unwrap_err();
        match err {
            Error::Config { path, .. } => assert!(path.contains("optimizer"), "{path}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn env_overrides_apply() {
        let cfg = RunConfig::parse(
            SAMPLE,
            [
                ("GAITOPT_OPTIMIZER__GENERATIONS".to_string(), "9".to_string()),
                ("GAITOPT_TERRAIN__KIND".to_string(), "flat".to_string()),
                ("GAITOPT_TERRAIN__ANGLE_DEG".to_string(), "0".to_string()),
            ]
            .into_iter()
            .filter(|(k, _)| k != "GAITOPT_TERRAIN__ANGLE_DEG"),
        );
        // the slope angle key survives the kind change, so the block is rejected
        assert!(cfg.is_err());
        let cfg = RunConfig::parse(
            "morphology = \"quad\"\ngait = \"trot\"\n",
            [("GAITOPT_OPTIMIZER__GENERATIONS".to_string(), "9".to_string()), ("GAITOPT_SEED".to_string(), "5".to_string())],
        )
        .unwrap();
        assert_eq!(cfg.optimizer.generations, 9);
        assert_eq!(cfg.seed, 5);
    }

    #[test]
    fn gait_must_match_morphology() {
        let cfg = RunConfig::parse("morphology = \"quad\"\ngait = \"tripod\"\n", []).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn missing_morphology_file() {
        let cfg = RunConfig::parse("morphology = \"nope.toml\"\ngait = \"trot\"\n", []).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("nope.toml"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::new("quad", GaitName::Trot);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.set_seed(1);
        assert_ne!(a.hash(), b.hash());
    }
}
