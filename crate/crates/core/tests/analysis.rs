use gaitopt::analysis::{compare_archives, pareto_filter, regress_load, ParetoArchive};
use gaitopt::config::RunConfig;
use gaitopt::error::Error;
use gaitopt::gait::GaitName;
use gaitopt::problem::{GaitProblem, ProblemRun};
use gaitopt::robot::RobotModel;
use gaitopt::terrain::Terrain;

fn archive_with_loads(loads: &[f64]) -> ParetoArchive {
    let problem = GaitProblem::new(RobotModel::quad(), GaitName::Trot, Terrain::flat()).unwrap();
    let template = problem.evaluate(&[0.15, 0.15, 0.15, 0.15, 0.08, 0.08, 0.08, 0.08, 0.3, 0.6]).unwrap();
    let entries = loads
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let mut e = template.clone();
            e.objectives.f_load = l;
            e.objectives.f_speed = i as f64;
            e
        })
        .collect();
    let cfg = RunConfig::new("quad", GaitName::Trot);
    let run = ProblemRun {
        entries,
        history: Vec::new(),
        evaluations: loads.len(),
    };
    problem.archive(&run, "quad", &cfg.evolution(), &cfg.hash())
}

#[test]
fn identical_archives_have_zero_deltas() {
    let a = archive_with_loads(&[2.0, 2.5, 3.0]);
    let c = compare_archives(&a, &a).unwrap();
    for d in [c.min_load_delta, c.median_load_delta, c.max_load_delta, c.max_speed_delta, c.max_stability_delta] {
        assert_eq!(d, 0.0);
    }
}

#[test]
fn lower_loads_give_negative_delta() {
    let a = archive_with_loads(&[1.0, 1.2, 1.4]);
    let b = archive_with_loads(&[2.0, 2.2, 2.4, 3.0]);
    let c = compare_archives(&a, &b).unwrap();
    assert!(c.min_load_delta < 0.0);
    assert_eq!(c.min_load_delta, (1.0 - 2.0) / 2.0);
    assert_eq!(c.median_load_delta, (1.2 - 2.3) / 2.3);
    assert_eq!(c.without_load.median_load, 2.3);
}

#[test]
fn mismatched_protocols_are_rejected() {
    let a = archive_with_loads(&[1.0]);
    let mut b = a.clone();
    b.metadata.terrain = Terrain::slope(10.0);
    assert!(matches!(compare_archives(&a, &b), Err(Error::Comparison(_))));
    let mut empty = a.clone();
    empty.entries.clear();
    assert!(matches!(compare_archives(&a, &empty), Err(Error::InsufficientData(_))));
}

#[test]
fn filter_keeps_nondominated_feasible_entries() {
    let mut a = archive_with_loads(&[1.0, 2.0, 0.5]);
    // entry 1 is faster than 0 but heavier; entry 2 is faster and lighter than both
    a.entries[2].constraint_violation = 1.0;
    let kept = pareto_filter(&a.entries, 3);
    assert_eq!(kept.len(), 2);
    a.entries[2].constraint_violation = 0.0;
    let kept = pareto_filter(&a.entries, 3);
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].objectives.f_load, 0.5);
}

#[test]
fn regression_needs_enough_entries() {
    let a = archive_with_loads(&[1.0; 6]);
    assert!(matches!(regress_load(&a), Err(Error::InsufficientData(_))));
}
