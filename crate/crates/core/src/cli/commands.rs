//! Command implementations. Each returns the files it wrote; all writes happen after the
//! work is done.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{compare_archives, ols, ArchiveComparison, ArchiveEntry, Design, ParetoArchive, RegressionReport, VariableGroup};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evaluator::trace_csv;
use crate::gait::DecisionVector;
use crate::nsga3::GenerationStats;
use crate::problem::{GaitProblem, ProblemRun};

/// Files are collected here and flushed in one go.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    fn add(&mut self, path: PathBuf, contents: String) {
        self.files.push((path, contents));
    }

    fn write(self) -> Result<Vec<PathBuf>> {
        for (path, contents) in &self.files {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(path, contents).map_err(|e| Error::io(path, e))?;
        }
        Ok(self.files.into_iter().map(|(p, _)| p).collect())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Per-generation best and median objectives (minimization form) and feasible count.
pub fn generations_csv(history: &[GenerationStats], objective_count: usize) -> String {
    let names = ["neg_f_speed", "neg_f_stability", "f_load"];
    let mut out = String::from("generation,evaluations,feasible,first_front");
    for n in &names[..objective_count] {
        write!(out, ",best_{n}").unwrap();
    }
    for n in &names[..objective_count] {
        write!(out, ",median_{n}").unwrap();
    }
    out.push('\n');
    for h in history {
        write!(out, "{},{},{},{}", h.generation, h.evaluations, h.feasible, h.first_front).unwrap();
        for i in 0..objective_count {
            let _ = write!(out, ",{}", h.best.get(i).map_or(String::new(), f64::to_string));
        }
        for i in 0..objective_count {
            let _ = write!(out, ",{}", h.median.get(i).map_or(String::new(), f64::to_string));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub evaluations: usize,
    pub config: String,
}

/// Runs one optimization, returning the archive and the raw run.
pub fn run_optimization(cfg: &RunConfig, jobs: usize, progress: bool) -> Result<(ParetoArchive, ProblemRun)> {
    let problem = GaitProblem::from_config(cfg)?;
    let evolution = cfg.evolution();
    let label = format!("{}/{}/{}", cfg.morphology, cfg.gait, cfg.terrain.name());
    let run = problem.optimize_with(&evolution, jobs, Vec::new(), |g, pop| {
        if progress {
            let feasible = pop.iter().filter(|i| i.is_feasible()).count();
            eprintln!("[{label}] generation {g}: {feasible}/{} feasible", pop.len());
        }
    })?;
    let archive = problem.archive(&run, &cfg.morphology, &evolution, &cfg.hash());
    Ok((archive, run))
}

/// `optimize`: archive.json, pareto.csv, generations.csv and provenance.json.
pub fn optimize(cfg: &RunConfig, jobs: usize, out: &Path) -> Result<Vec<PathBuf>> {
    let (archive, run) = run_optimization(cfg, jobs, true)?;
    let mut files = Outputs::default();
    files.add(out.join("archive.json"), archive.to_json());
    files.add(out.join("pareto.csv"), archive.scatter_csv());
    files.add(out.join("generations.csv"), generations_csv(&run.history, cfg.objective_count));
    files.add(
        out.join("provenance.json"),
        json(&Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config_hash: cfg.hash(),
            evaluations: run.evaluations,
            config: cfg.to_toml(),
        }),
    );
    files.write()
}

/// What `eval` scores.
#[derive(Debug, Clone)]
pub enum Candidate {
    Genome(Vec<f64>),
    ArchiveIndex { path: PathBuf, index: usize },
}

/// Parses a comma-separated genome.
pub fn parse_genome(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .enumerate()
        .map(|(i, s)| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::config(format!("genome[{i}]"), format!("`{}`: {e}", s.trim())))
        })
        .collect()
}

/// `eval`: summary.json (the scored entry) and trace.csv.
pub fn eval(cfg: &RunConfig, candidate: &Candidate, out: &Path) -> Result<(ArchiveEntry, Vec<PathBuf>)> {
    let problem = GaitProblem::from_config(cfg)?;
    let genome = match candidate {
        Candidate::Genome(g) => g.clone(),
        Candidate::ArchiveIndex { path, index } => {
            let archive = ParetoArchive::load(path)?;
            if archive.metadata.config_hash != cfg.hash() {
                eprintln!("warning: {} was produced by a different config", path.display());
            }
            archive
                .entries
                .get(*index)
                .ok_or_else(|| Error::config("index", format!("archive has {} entries", archive.entries.len())))?
                .genome
                .clone()
        }
    };
    DecisionVector::decode(&genome, problem.robot.leg_count())?.validate(cfg.gait)?;
    let (trace, entry) = problem.trace(&genome)?;
    let mut files = Outputs::default();
    files.add(out.join("summary.json"), json(&entry));
    files.add(out.join("trace.csv"), trace_csv(&trace));
    Ok((entry, files.write()?))
}

/// Options of `regress`.
#[derive(Debug, Clone)]
pub struct RegressOptions {
    pub groups: Vec<VariableGroup>,
    /// Fit one model over all archives instead of one per archive.
    pub pooled: bool,
}

impl Default for RegressOptions {
    fn default() -> Self {
        RegressOptions {
            groups: VariableGroup::EXPLANATORY.to_vec(),
            pooled: false,
        }
    }
}

/// `regress`: `<stem>.regression.json` and `.txt` per archive, or `pooled.regression.*`.
pub fn regress(archives: &[PathBuf], options: &RegressOptions, out: &Path) -> Result<Vec<(String, RegressionReport)>> {
    if archives.is_empty() {
        return Err(Error::config("archives", "no archive given"));
    }
    let loaded = archives.iter().map(|p| ParetoArchive::load(p)).collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::new();
    if options.pooled {
        let refs: Vec<&ParetoArchive> = loaded.iter().collect();
        reports.push(("pooled".to_string(), ols(&Design::load_on_gait(&refs, &options.groups)?, "f_load")?));
    } else {
        for (path, a) in archives.iter().zip(&loaded) {
            let stem = path.file_stem().map_or("archive".into(), |s| s.to_string_lossy().into_owned());
            reports.push((stem, ols(&Design::load_on_gait(&[a], &options.groups)?, "f_load")?));
        }
    }
    let mut files = Outputs::default();
    for (stem, r) in &reports {
        files.add(out.join(format!("{stem}.regression.json")), r.to_json());
        files.add(out.join(format!("{stem}.regression.txt")), r.to_text());
    }
    files.write()?;
    Ok(reports)
}

/// `compare` over two existing archives: comparison.json and comparison.txt.
pub fn compare_files(with_load: &Path, without_load: &Path, out: &Path) -> Result<ArchiveComparison> {
    let a = ParetoArchive::load(with_load)?;
    let b = ParetoArchive::load(without_load)?;
    let cmp = compare_archives(&a, &b)?;
    let mut files = Outputs::default();
    files.add(out.join("comparison.json"), json(&cmp));
    files.add(out.join("comparison.txt"), cmp.to_text());
    files.write()?;
    Ok(cmp)
}

/// `compare` from a config: runs the 3-objective and the 2-objective protocol with the
/// same seed, then compares. Load in the 2-objective archive is scored after the fact.
pub fn compare_protocols(cfg: &RunConfig, jobs: usize, out: &Path) -> Result<ArchiveComparison> {
    let mut with_cfg = cfg.clone();
    with_cfg.objective_count = 3;
    let mut without_cfg = cfg.clone();
    without_cfg.objective_count = 2;
    let (with_load, _) = run_optimization(&with_cfg, jobs, true)?;
    let (without_load, _) = run_optimization(&without_cfg, jobs, true)?;
    let cmp = compare_archives(&with_load, &without_load)?;
    let mut files = Outputs::default();
    files.add(out.join("with_load.archive.json"), with_load.to_json());
    files.add(out.join("without_load.archive.json"), without_load.to_json());
    files.add(out.join("comparison.json"), json(&cmp));
    files.add(out.join("comparison.txt"), cmp.to_text());
    files.write()?;
    Ok(cmp)
}
