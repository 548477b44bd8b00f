//! Reference-point based environmental selection: normalization, association and niching.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

use super::individual::Individual;
use super::reference::ReferencePointSet;
use super::sorting::assign_ranks;
use crate::error::{Error, Result};

/// Selection state carried across generations (the running ideal point).
#[derive(Debug, Clone, Default)]
pub struct EnvironmentalSelection {
    ideal: Option<Vec<f64>>,
}

impl EnvironmentalSelection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ideal(&self) -> Option<&[f64]> {
        self.ideal.as_deref()
    }

    pub fn select<R: Rng + ?Sized>(
        &mut self,
        mut merged: Vec<Individual>,
        refs: &ReferencePointSet,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<Individual>> {
        if n > merged.len() {
            return Err(Error::Parameter(format!(
                "cannot select {n} survivors from {} individuals",
                merged.len()
            )));
        }
        if refs.is_empty() {
            return Err(Error::Parameter("reference point set is empty".into()));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let m = refs.objectives();
        if merged.iter().any(|ind| ind.objectives.len() != m) {
            return Err(Error::Structural(format!(
                "reference points have {m} coordinates but objectives differ"
            )));
        }

        let fronts = assign_ranks(&mut merged)?;
        let mut chosen: Vec<usize> = Vec::with_capacity(n);
        let mut last_front: &[usize] = &[];
        for front in &fronts {
            if chosen.len() + front.len() <= n {
                chosen.extend_from_slice(front);
                if chosen.len() == n {
                    break;
                }
            } else {
                last_front = front;
                break;
            }
        }

        let considered: Vec<usize> = chosen.iter().chain(last_front).copied().collect();
        self.update_ideal(&merged, &considered);

        if chosen.len() == n {
            let mut out: Vec<Individual> = Vec::with_capacity(n);
            for i in chosen {
                out.push(merged[i].clone());
            }
            return Ok(out);
        }

        let ideal = self.ideal.clone().expect("ideal set above");
        let intercepts = intercepts(&merged, &considered, &ideal);
        let mut niche_of = vec![usize::MAX; merged.len()];
        let mut distance = vec![f64::INFINITY; merged.len()];
        for &i in &considered {
            let normalized: Vec<f64> = merged[i]
                .objectives
                .iter()
                .zip(&ideal)
                .zip(&intercepts)
                .map(|((f, z), a)| (f - z) / a)
                .collect();
            let (r, d) = nearest_reference(&normalized, refs);
            niche_of[i] = r;
            distance[i] = d;
        }

        let mut niche_count = vec![0usize; refs.len()];
        for &i in &chosen {
            niche_count[niche_of[i]] += 1;
        }

        let mut remaining: Vec<usize> = last_front.to_vec();
        let mut needed = n - chosen.len();

        // Keep the per-objective best feasible individuals if the cut front holds them.
        for i in per_objective_elites(&merged, m) {
            if needed == 0 {
                break;
            }
            if let Some(pos) = remaining.iter().position(|&r| r == i) {
                remaining.remove(pos);
                chosen.push(i);
                niche_count[niche_of[i]] += 1;
                needed -= 1;
            }
        }

        let mut active: Vec<bool> = vec![true; refs.len()];
        while needed > 0 {
            let min_count = (0..refs.len())
                .filter(|&r| active[r])
                .map(|r| niche_count[r])
                .min()
                .expect("some reference point stays active while members remain");
            let candidates: Vec<usize> = (0..refs.len())
                .filter(|&r| active[r] && niche_count[r] == min_count)
                .collect();
            let r = *candidates.choose(rng).expect("non-empty");

            let members: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| niche_of[i] == r)
                .collect();
            if members.is_empty() {
                active[r] = false;
                continue;
            }
            let pick = if niche_count[r] == 0 {
                let best = members
                    .iter()
                    .map(|&i| distance[i])
                    .fold(f64::INFINITY, f64::min);
                let closest: Vec<usize> =
                    members.into_iter().filter(|&i| distance[i] == best).collect();
                *closest.choose(rng).expect("non-empty")
            } else {
                *members.choose(rng).expect("non-empty")
            };
            remaining.retain(|&i| i != pick);
            chosen.push(pick);
            niche_count[r] += 1;
            needed -= 1;
        }

        Ok(chosen
            .into_iter()
            .map(|i| {
                let mut ind = merged[i].clone();
                if niche_of[i] != usize::MAX {
                    ind.niche = Some(niche_of[i]);
                }
                ind
            })
            .collect())
    }

    fn update_ideal(&mut self, pop: &[Individual], idx: &[usize]) {
        let m = pop[idx[0]].objectives.len();
        let ideal = self.ideal.get_or_insert_with(|| vec![f64::INFINITY; m]);
        for &i in idx {
            for (z, &f) in ideal.iter_mut().zip(&pop[i].objectives) {
                if f < *z {
                    *z = f;
                }
            }
        }
    }
}

/// Single-shot selection with a fresh ideal point.
pub fn environmental_selection<R: Rng + ?Sized>(
    merged: Vec<Individual>,
    refs: &ReferencePointSet,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    EnvironmentalSelection::new().select(merged, refs, n, rng)
}

/// Feasible minimizer of each objective; ties go to the better rank, then the lower index.
fn per_objective_elites(pop: &[Individual], m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for j in 0..m {
        let best = pop
            .iter()
            .enumerate()
            .filter(|(_, ind)| ind.is_feasible())
            .min_by(|(ia, a), (ib, b)| {
                a.objectives[j]
                    .total_cmp(&b.objectives[j])
                    .then(a.rank.cmp(&b.rank))
                    .then(ia.cmp(ib))
            })
            .map(|(i, _)| i);
        if let Some(i) = best {
            if !out.contains(&i) {
                out.push(i);
            }
        }
    }
    out
}

/// Hyperplane intercepts through the ASF extreme points, translated by the ideal point.
/// Falls back to the per-objective maximum when the hyperplane is degenerate.
fn intercepts(pop: &[Individual], idx: &[usize], ideal: &[f64]) -> Vec<f64> {
    let m = ideal.len();
    let translated = |i: usize| -> Vec<f64> {
        pop[i]
            .objectives
            .iter()
            .zip(ideal)
            .map(|(f, z)| f - z)
            .collect()
    };
    let worst: Vec<f64> = (0..m)
        .map(|j| {
            idx.iter()
                .map(|&i| pop[i].objectives[j] - ideal[j])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();

    let mut extremes = DMatrix::<f64>::zeros(m, m);
    for axis in 0..m {
        let asf = |v: &[f64]| -> f64 {
            v.iter()
                .enumerate()
                .map(|(k, &x)| x / if k == axis { 1.0 } else { 1e-6 })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let best = idx
            .iter()
            .copied()
            .min_by(|&a, &b| asf(&translated(a)).total_cmp(&asf(&translated(b))).then(a.cmp(&b)))
            .expect("non-empty");
        for (k, v) in translated(best).into_iter().enumerate() {
            extremes[(axis, k)] = v;
        }
    }

    let plane = extremes
        .lu()
        .solve(&DVector::from_element(m, 1.0))
        .map(|coef| coef.iter().map(|&c| 1.0 / c).collect::<Vec<f64>>());
    let fallback = || -> Vec<f64> {
        worst
            .iter()
            .map(|&w| if w > 1e-12 && w.is_finite() { w } else { 1.0 })
            .collect()
    };
    match plane {
        Some(a) if a.iter().all(|&x| x.is_finite() && x > 1e-6) => a,
        _ => fallback(),
    }
}

fn nearest_reference(point: &[f64], refs: &ReferencePointSet) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (r, w) in refs.points().iter().enumerate() {
        let ww: f64 = w.iter().map(|x| x * x).sum();
        let proj: f64 = point.iter().zip(w).map(|(p, x)| p * x).sum::<f64>() / ww;
        let d2: f64 = point
            .iter()
            .zip(w)
            .map(|(p, x)| (p - proj * x).powi(2))
            .sum();
        let d = d2.sqrt();
        if d < best.1 {
            best = (r, d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsga3::individual::constrained_dominates;
    use crate::nsga3::reference::generate_reference_points;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_pop(rng: &mut ChaCha8Rng, size: usize) -> Vec<Individual> {
        (0..size)
            .map(|k| {
                let obj = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
                Individual::new(vec![k as f64], obj, 0.0)
            })
            .collect()
    }

    #[test]
    fn complete_first_front_is_returned_verbatim() {
        let refs = generate_reference_points(2, 4).unwrap();
        let mut merged: Vec<Individual> = (0..5)
            .map(|k| {
                let x = k as f64 / 4.0;
                Individual::new(vec![k as f64], vec![x, 1.0 - x], 0.0)
            })
            .collect();
        merged.extend((0..5).map(|k| Individual::new(vec![10.0 + k as f64], vec![5.0, 5.0 + k as f64], 0.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = environmental_selection(merged.clone(), &refs, 5, &mut rng).unwrap();
        let genomes: Vec<f64> = out.iter().map(|i| i.genome[0]).collect();
        assert_eq!(genomes, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn identical_population_yields_requested_size() {
        let refs = generate_reference_points(3, 4).unwrap();
        let merged = vec![Individual::new(vec![0.5], vec![1.0, 1.0, 1.0], 0.0); 20];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = environmental_selection(merged, &refs, 10, &mut rng).unwrap();
        assert_eq!(out.len(), 10);
    }

    #[test]
    fn too_many_requested_is_an_error() {
        let refs = generate_reference_points(3, 4).unwrap();
        let merged = vec![Individual::new(vec![0.5], vec![1.0, 1.0, 1.0], 0.0); 4];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(environmental_selection(merged, &refs, 5, &mut rng).is_err());
    }

    #[test]
    fn survivors_respect_front_order() {
        let refs = generate_reference_points(3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let merged = random_pop(&mut rng, 20);
            let out = environmental_selection(merged.clone(), &refs, 10, &mut rng).unwrap();
            assert_eq!(out.len(), 10);
            let selected: Vec<usize> = out.iter().map(|i| i.genome[0] as usize).collect();
            let rejected: Vec<usize> = (0..20).filter(|k| !selected.contains(k)).collect();
            let cut_rank = out.iter().map(|i| i.rank).max().unwrap();
            for s in &out {
                let k = s.genome[0] as usize;
                let dominated_by_rejected = rejected
                    .iter()
                    .any(|&r| constrained_dominates(&merged[r], &merged[k]));
                assert!(!dominated_by_rejected || s.rank == cut_rank);
            }
        }
    }
}
