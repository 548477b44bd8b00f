//! Side-by-side statistics of a load-aware and a load-blind archive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::archive::ParetoArchive;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchiveStats {
    pub feasible_entries: usize,
    pub min_load: f64,
    pub median_load: f64,
    pub max_load: f64,
    pub max_speed: f64,
    pub max_stability: f64,
}

impl ArchiveStats {
    /// Statistics over the feasible entries.
    pub fn of(archive: &ParetoArchive) -> Result<Self> {
        let feasible: Vec<_> = archive.feasible().collect();
        if feasible.is_empty() {
            return Err(Error::InsufficientData(format!(
                "{} archive on {} has no feasible entries",
                archive.metadata.gait,
                archive.metadata.terrain.name()
            )));
        }
        let mut loads: Vec<f64> = feasible.iter().map(|e| e.objectives.f_load).collect();
        loads.sort_by(f64::total_cmp);
        let n = loads.len();
        let median = if n % 2 == 1 {
            loads[n / 2]
        } else {
            0.5 * (loads[n / 2 - 1] + loads[n / 2])
        };
        Ok(ArchiveStats {
            feasible_entries: n,
            min_load: loads[0],
            median_load: median,
            max_load: loads[n - 1],
            max_speed: feasible.iter().map(|e| e.objectives.f_speed).fold(f64::NEG_INFINITY, f64::max),
            max_stability: feasible.iter().map(|e| e.objectives.f_stability).fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Relative change `(with - without) / |without|`; zero when both are equal.
fn relative(with: f64, without: f64) -> f64 {
    if with == without {
        0.0
    } else {
        (with - without) / without.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveComparison {
    pub with_load: ArchiveStats,
    pub without_load: ArchiveStats,
    pub min_load_delta: f64,
    pub median_load_delta: f64,
    pub max_load_delta: f64,
    pub max_speed_delta: f64,
    pub max_stability_delta: f64,
}

impl ArchiveComparison {
    pub fn to_text(&self) -> String {
        let rows = [
            ("min f_load", self.with_load.min_load, self.without_load.min_load, self.min_load_delta),
            ("median f_load", self.with_load.median_load, self.without_load.median_load, self.median_load_delta),
            ("max f_load", self.with_load.max_load, self.without_load.max_load, self.max_load_delta),
            ("max f_speed", self.with_load.max_speed, self.without_load.max_speed, self.max_speed_delta),
            ("max f_stability", self.with_load.max_stability, self.without_load.max_stability, self.max_stability_delta),
        ];
        let mut out = format!("{:<16} {:>12} {:>12} {:>10}\n", "", "with load", "without", "delta");
        for (name, a, b, d) in rows {
            out.push_str(&format!("{name:<16} {a:>12.6} {b:>12.6} {:>9.2}%\n", 100.0 * d));
        }
        out
    }
}

/// Compares archives produced under the same gait, terrain, morphology and seed.
pub fn compare_archives(with_load: &ParetoArchive, without_load: &ParetoArchive) -> Result<ArchiveComparison> {
    let (a, b) = (&with_load.metadata, &without_load.metadata);
    let mut mismatches = Vec::new();
    if a.gait != b.gait {
        mismatches.push(format!("gait {} vs {}", a.gait, b.gait));
    }
    if a.terrain != b.terrain {
        mismatches.push(format!("terrain {} vs {}", a.terrain.name(), b.terrain.name()));
    }
    if a.morphology != b.morphology {
        mismatches.push(format!("morphology {} vs {}", a.morphology, b.morphology));
    }
    if a.seed != b.seed {
        mismatches.push(format!("seed {} vs {}", a.seed, b.seed));
    }
    if !mismatches.is_empty() {
        return Err(Error::Comparison(mismatches.join(", ")));
    }
    let s_with = ArchiveStats::of(with_load)?;
    let s_without = ArchiveStats::of(without_load)?;
    Ok(ArchiveComparison {
        with_load: s_with,
        without_load: s_without,
        min_load_delta: relative(s_with.min_load, s_without.min_load),
        median_load_delta: relative(s_with.median_load, s_without.median_load),
        max_load_delta: relative(s_with.max_load, s_without.max_load),
        max_speed_delta: relative(s_with.max_speed, s_without.max_speed),
        max_stability_delta: relative(s_with.max_stability, s_without.max_stability),
    })
}
