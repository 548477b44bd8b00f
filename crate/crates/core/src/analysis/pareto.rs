use crate::nsga3::pareto_dominates;

use super::archive::ArchiveEntry;

/// Indices of the feasible items no other feasible item dominates, in input order.
pub fn nondominated_indices<T>(items: &[T], feasible: impl Fn(&T) -> bool, objectives: impl Fn(&T) -> Vec<f64>) -> Vec<usize> {
    let keep: Vec<usize> = (0..items.len()).filter(|&i| feasible(&items[i])).collect();
    let objs: Vec<Vec<f64>> = keep.iter().map(|&i| objectives(&items[i])).collect();
    keep.iter()
        .enumerate()
        .filter(|&(a, _)| !(0..keep.len()).any(|b| b != a && pareto_dominates(&objs[b], &objs[a])))
        .map(|(_, &i)| i)
        .collect()
}

/// Mutually non-dominated feasible entries over the first `objective_count` objectives.
pub fn pareto_filter(entries: &[ArchiveEntry], objective_count: usize) -> Vec<ArchiveEntry> {
    nondominated_indices(entries, ArchiveEntry::is_feasible, |e| e.minimization(objective_count))
        .into_iter()
        .map(|i| entries[i].clone())
        .collect()
}
