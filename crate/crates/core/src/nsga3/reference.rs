//! Das–Dennis structured reference points on the unit simplex.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePointSet {
    points: Vec<Vec<f64>>,
    divisions: usize,
}

impl ReferencePointSet {
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn divisions(&self) -> usize {
        self.divisions
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn objectives(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

/// Binomial coefficient `C(n, k)` computed without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of lattice points for `objectives` objectives and `divisions` divisions.
pub fn reference_point_count(objectives: usize, divisions: usize) -> usize {
    binomial(divisions + objectives - 1, objectives - 1)
}

/// Smallest number of divisions whose lattice has at least `population` points.
pub fn divisions_for_population(objectives: usize, population: usize) -> Result<usize> {
    if objectives < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 objectives, got {objectives}"
        )));
    }
    if population == 0 {
        return Err(Error::Parameter("population size must be positive".into()));
    }
    let mut p = 1;
    while reference_point_count(objectives, p) < population {
        p += 1;
    }
    Ok(p)
}

pub fn generate_reference_points(objectives: usize, divisions: usize) -> Result<ReferencePointSet> {
    if objectives < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 objectives, got {objectives}"
        )));
    }
    if divisions < 1 {
        return Err(Error::Parameter("divisions must be at least 1".into()));
    }

    let mut points = Vec::with_capacity(reference_point_count(objectives, divisions));
    let mut counts = vec![0usize; objectives];
    fill(&mut points, &mut counts, 0, divisions, divisions);
    Ok(ReferencePointSet { points, divisions })
}

fn fill(out: &mut Vec<Vec<f64>>, counts: &mut [usize], axis: usize, left: usize, total: usize) {
    if axis == counts.len() - 1 {
        counts[axis] = left;
        out.push(counts.iter().map(|&c| c as f64 / total as f64).collect());
        return;
    }
    for c in 0..=left {
        counts[axis] = c;
        fill(out, counts, axis + 1, left - c, total);
    }
}
