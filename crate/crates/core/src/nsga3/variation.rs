//! Simulated binary crossover and polynomial mutation for box-bounded real genomes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Structural(format!(
                "{} lower bounds vs {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] <= upper[i])) {
            return Err(Error::Parameter(format!(
                "bound {i}: lower {} exceeds upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Bounds {
            lower: vec![lower; dim],
            upper: vec![upper; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn contains(&self, genome: &[f64]) -> bool {
        genome.len() == self.len()
            && genome
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| lo <= x && x <= hi)
    }

    pub fn clamp(&self, i: usize, x: f64) -> f64 {
        x.clamp(self.lower[i], self.upper[i])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect()
    }
}

/// SBX on two parents. Each gene is recombined with probability 1/2 and the two child
/// values are swapped with probability 1/2, so each child is centred on the parent midpoint.
pub fn sbx_crossover<R: Rng + ?Sized>(
    parent_a: &[f64],
    parent_b: &[f64],
    distribution_index: f64,
    probability: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut a = parent_a.to_vec();
    let mut b = parent_b.to_vec();
    if probability <= 0.0 || !rng.gen_bool(probability.min(1.0)) {
        return (a, b);
    }
    let exponent = 1.0 / (distribution_index + 1.0);
    for i in 0..a.len() {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let (x1, x2) = (parent_a[i], parent_b[i]);
        if (x1 - x2).abs() <= 1e-14 {
            continue;
        }
        let u: f64 = rng.gen();
        let beta = if u <= 0.5 {
            (2.0 * u).powf(exponent)
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(exponent)
        };
        let mut c1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2);
        let mut c2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2);
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut c1, &mut c2);
        }
        a[i] = bounds.clamp(i, c1);
        b[i] = bounds.clamp(i, c2);
    }
    (a, b)
}

/// Bounded polynomial mutation, applied gene-wise with the given probability.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    genome: &[f64],
    distribution_index: f64,
    probability: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = genome.to_vec();
    if probability <= 0.0 {
        return out;
    }
    let p = probability.min(1.0);
    let power = 1.0 / (distribution_index + 1.0);
    for (i, gene) in out.iter_mut().enumerate() {
        if !rng.gen_bool(p) {
            continue;
        }
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        let y = *gene;
        let delta1 = (y - lo) / span;
        let delta2 = (hi - y) / span;
        let u: f64 = rng.gen();
        let deltaq = if u < 0.5 {
            let xy = 1.0 - delta1;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(distribution_index + 1.0);
            val.powf(power) - 1.0
        } else {
            let xy = 1.0 - delta2;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(distribution_index + 1.0);
            1.0 - val.powf(power)
        };
        *gene = (y + deltaq * span).clamp(lo, hi);
    }
    out
}
