use serde::{Deserialize, Serialize};

/// One candidate solution. Objectives follow the minimization convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub objectives: Vec<f64>,
    /// Zero means feasible.
    pub constraint_violation: f64,
    pub rank: usize,
    pub niche: Option<usize>,
}

impl Individual {
    pub fn new(genome: Vec<f64>, objectives: Vec<f64>, constraint_violation: f64) -> Self {
        Individual {
            genome,
            objectives,
            constraint_violation,
            rank: 0,
            niche: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.constraint_violation <= 0.0
    }
}

/// Plain Pareto dominance on objective vectors (minimization).
pub fn pareto_dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Feasibility-first dominance: feasible beats infeasible, smaller violation beats larger,
/// and Pareto dominance decides among feasible individuals.
pub fn constrained_dominates(a: &Individual, b: &Individual) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.constraint_violation < b.constraint_violation,
        (true, true) => pareto_dominates(&a.objectives, &b.objectives),
    }
}
