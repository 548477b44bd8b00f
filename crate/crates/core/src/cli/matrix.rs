//! Success/failure matrix over morphology, gait and terrain.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{load_morphology, MatrixCell, RunConfig};
use crate::error::{Error, Result};

use super::commands::run_optimization;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "detail")]
pub enum CellStatus {
    /// The final population holds at least one feasible candidate.
    Success,
    Failure,
    NotExecuted,
    Error(String),
}

impl CellStatus {
    pub fn mark(&self) -> &'static str {
        match self {
            CellStatus::Success => "o",
            CellStatus::Failure => "x",
            CellStatus::NotExecuted => "-",
            CellStatus::Error(_) => "E",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub legs: Option<usize>,
    pub cell: MatrixCell,
    pub status: CellStatus,
    pub feasible_entries: usize,
    pub best_speed: Option<f64>,
}

pub fn run_cells(cfg: &RunConfig, jobs: usize) -> Result<(Vec<CellResult>, Vec<(String, String)>)> {
    let cells = cfg.matrix.as_ref().map(|m| m.cells.clone()).unwrap_or_default();
    if cells.is_empty() {
        return Err(Error::config("matrix.cells", "the matrix has no cells"));
    }
    let mut results = Vec::new();
    let mut archives = Vec::new();
    for cell in cells {
        let legs = load_morphology(&cell.morphology, &cfg.base_dir).ok().map(|r| r.leg_count());
        let mut result = CellResult {
            legs,
            cell: cell.clone(),
            status: CellStatus::NotExecuted,
            feasible_entries: 0,
            best_speed: None,
        };
        if cell.execute {
            let mut sub = cfg.clone();
            sub.morphology = cell.morphology.clone();
            sub.gait = cell.gait;
            sub.terrain = cell.terrain.clone();
            sub.matrix = None;
            match sub.validate().and_then(|_| run_optimization(&sub, jobs, false)) {
                Ok((archive, _)) => {
                    result.feasible_entries = archive.entries.len();
                    result.best_speed = archive.entries.iter().map(|e| e.objectives.f_speed).reduce(f64::max);
                    result.status = if archive.entries.is_empty() {
                        CellStatus::Failure
                    } else {
                        CellStatus::Success
                    };
                    let name = format!("{}_{}_{}.archive.json", stem(&cell.morphology), cell.gait, cell.terrain.name());
                    archives.push((name, archive.to_json()));
                }
                Err(e) => result.status = CellStatus::Error(e.to_string()),
            }
        }
        results.push(result);
    }
    Ok((results, archives))
}

fn stem(morphology: &str) -> String {
    Path::new(morphology)
        .file_stem()
        .map_or(morphology.to_string(), |s| s.to_string_lossy().into_owned())
}

/// Rows are (legs, gait), columns terrains, in first-seen order.
pub fn matrix_table(results: &[CellResult]) -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut cols: Vec<String> = Vec::new();
    for r in results {
        let row = (r.legs.map_or("?".into(), |l| l.to_string()), r.cell.gait.to_string());
        if !rows.contains(&row) {
            rows.push(row);
        }
        let col = r.cell.terrain.name().to_string();
        if !cols.contains(&col) {
            cols.push(col);
        }
    }
    let mut out = format!("{:<5} {:<9}", "legs", "gait");
    for c in &cols {
        out.push_str(&format!(" {c:<6}"));
    }
    out.push('\n');
    for (legs, gait) in &rows {
        out.push_str(&format!("{legs:<5} {gait:<9}"));
        for c in &cols {
            let mark = results
                .iter()
                .find(|r| {
                    r.legs.map_or("?".into(), |l| l.to_string()) == *legs
                        && r.cell.gait.to_string() == *gait
                        && r.cell.terrain.name() == c
                })
                .map_or("", |r| r.status.mark());
            out.push_str(&format!(" {mark:<6}"));
        }
        out.push('\n');
    }
    out.push_str("o: success  x: failure  -: not executed  E: error\n");
    for r in results {
        if let CellStatus::Error(e) = &r.status {
            out.push_str(&format!("E {}/{}/{}: {e}\n", r.cell.morphology, r.cell.gait, r.cell.terrain.name()));
        }
    }
    out
}

pub fn matrix_csv(results: &[CellResult]) -> String {
    let mut out = String::from("legs,morphology,gait,terrain,status,feasible_entries,best_speed,error\n");
    for r in results {
        let status = match &r.status {
            CellStatus::Success => "success",
            CellStatus::Failure => "failure",
            CellStatus::NotExecuted => "not_executed",
            CellStatus::Error(_) => "error",
        };
        let error = match &r.status {
            CellStatus::Error(e) => format!("\"{}\"", e.replace('"', "'")),
            _ => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{status},{},{},{error}\n",
            r.legs.map_or(String::new(), |l| l.to_string()),
            r.cell.morphology,
            r.cell.gait,
            r.cell.terrain.name(),
            r.feasible_entries,
            r.best_speed.map_or(String::new(), |v| v.to_string()),
        ));
    }
    out
}

/// `matrix`: matrix.txt, matrix.csv and one archive per executed cell under `cells/`.
pub fn matrix(cfg: &RunConfig, jobs: usize, out: &Path) -> Result<(Vec<CellResult>, Vec<PathBuf>)> {
    let (results, archives) = run_cells(cfg, jobs)?;
    let mut written = Vec::new();
    std::fs::create_dir_all(out.join("cells")).map_err(|e| Error::io(out, e))?;
    let mut files = vec![
        (out.join("matrix.txt"), matrix_table(&results)),
        (out.join("matrix.csv"), matrix_csv(&results)),
    ];
    files.extend(archives.into_iter().map(|(n, s)| (out.join("cells").join(n), s)));
    for (path, contents) in files {
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok((results, written))
}
