//! Analytic test problems with known Pareto fronts.

use std::f64::consts::FRAC_PI_2;

use super::optimizer::Evaluation;
use super::variation::Bounds;

/// DTLZ2 with `objectives` objectives over `[0, 1]^variables`.
/// The Pareto front is the first-octant part of the unit sphere.
pub fn dtlz2(x: &[f64], objectives: usize) -> Vec<f64> {
    let k = objectives - 1;
    let g: f64 = x[k..].iter().map(|v| (v - 0.5).powi(2)).sum();
    (0..objectives)
        .map(|i| {
            let mut f = 1.0 + g;
            for v in &x[..objectives - 1 - i] {
                f *= (v * FRAC_PI_2).cos();
            }
            if i > 0 {
                f *= (x[objectives - 1 - i] * FRAC_PI_2).sin();
            }
            f
        })
        .collect()
}

pub fn dtlz2_bounds(variables: usize) -> Bounds {
    Bounds::uniform(variables, 0.0, 1.0)
}

/// The bi-objective pair `(Σx², Σ(x−1)²)`, whose Pareto set is the segment from 0 to 1.
pub fn sphere_pair(x: &[f64]) -> Vec<f64> {
    vec![
        x.iter().map(|v| v * v).sum(),
        x.iter().map(|v| (v - 1.0).powi(2)).sum(),
    ]
}

pub fn unconstrained(objectives: Vec<f64>) -> Evaluation {
    Evaluation {
        objectives,
        constraint_violation: 0.0,
    }
}

/// Exact two-objective hypervolume dominated by `points` relative to `reference` (minimization).
pub fn hypervolume_2d(points: &[Vec<f64>], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .map(|p| (p[0], p[1]))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for (x, y) in pts {
        if y < ceiling {
            volume += (reference[0] - x) * (ceiling - y);
            ceiling = y;
        }
    }
    volume
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dtlz2_on_front_has_unit_norm() {
        let x = [0.3, 0.8, 0.5, 0.5, 0.5];
        let f = dtlz2(&x, 3);
        let norm: f64 = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypervolume_of_known_staircase() {
        let hv = hypervolume_2d(&[vec![1.0, 2.0], vec![2.0, 1.0]], [3.0, 3.0]);
        // (3-1)*(3-2) + (3-2)*(2-1)
        assert!((hv - 3.0).abs() < 1e-12);
    }
}
