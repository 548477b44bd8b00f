use super::individual::{constrained_dominates, Individual};
use crate::error::{Error, Result};

/// Deb's fast non-dominated sort under feasibility-first dominance.
///
/// Returns fronts as lists of population indices, each front sorted ascending.
pub fn fast_nondominated_sort(population: &[Individual]) -> Result<Vec<Vec<usize>>> {
    let n = population.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = population[0].objectives.len();
    if let Some((i, bad)) = population
        .iter()
        .enumerate()
        .find(|(_, ind)| ind.objectives.len() != m)
    {
        return Err(Error::Structural(format!(
            "individual {i} has {} objectives, expected {m}",
            bad.objectives.len()
        )));
    }

    let mut dominated_by_count = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constrained_dominates(&population[i], &population[j]) {
                dominates[i].push(j);
                dominated_by_count[j] += 1;
            } else if constrained_dominates(&population[j], &population[i]) {
                dominates[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(fronts)
}

/// Writes each individual's front index into its `rank` field.
pub fn assign_ranks(population: &mut [Individual]) -> Result<Vec<Vec<usize>>> {
    let fronts = fast_nondominated_sort(population)?;
    for (rank, front) in fronts.iter().enumerate() {
        for &i in front {
            population[i].rank = rank;
        }
    }
    Ok(fronts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pop(objs: &[&[f64]]) -> Vec<Individual> {
        objs.iter()
            .map(|o| Individual::new(vec![], o.to_vec(), 0.0))
            .collect()
    }

    #[test]
    fn strict_dominance_chain() {
        let fronts = fast_nondominated_sort(&pop(&[&[1.0, 1.0], &[2.0, 2.0]])).unwrap();
        assert_eq!(fronts, vec![vec![0], vec![1]]);
    }

    #[test]
    fn mutual_non_dominance() {
        let fronts = fast_nondominated_sort(&pop(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap();
        assert_eq!(fronts, vec![vec![0, 1]]);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let err = fast_nondominated_sort(&pop(&[&[1.0, 2.0], &[2.0]])).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn infeasible_sorted_after_feasible() {
        let mut p = pop(&[&[0.0, 0.0], &[5.0, 5.0], &[0.0, 0.0]]);
        p[0].constraint_violation = 2.0;
        p[2].constraint_violation = 1.0;
        let fronts = fast_nondominated_sort(&p).unwrap();
        assert_eq!(fronts, vec![vec![1], vec![2], vec![0]]);
    }

    /// Brute force: peel off the set of individuals no remaining member dominates.
    fn brute_fronts(p: &[Individual]) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..p.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining
                        .iter()
                        .any(|&j| j != i && constrained_dominates(&p[j], &p[i]))
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    #[test]
    fn matches_brute_force_on_random_populations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p: Vec<Individual> = (0..30)
                .map(|_| {
                    let obj = (0..3).map(|_| rng.gen_range(0..5) as f64).collect();
                    let cv = if rng.gen_bool(0.2) { rng.gen_range(1..3) as f64 } else { 0.0 };
                    Individual::new(vec![], obj, cv)
                })
                .collect();
            assert_eq!(fast_nondominated_sort(&p).unwrap(), brute_fronts(&p));
        }
    }
}
