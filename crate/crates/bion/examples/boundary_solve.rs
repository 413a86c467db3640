//! Solves instances with estimated objective boundaries posted as hard
//! constraints, comparing search effort against the unbounded solver, and
//! demonstrates the unsatisfiable-fallback that protects optimality when an
//! estimate turns out to be wrong.

use bion::estimators::Estimation;
use bion::generate::{generate, generate_batch, GenSpec};
use bion::pipeline::{
    build_corpus, solve_with_bion, solve_with_estimation, standard_trainer, BoundsMode,
};
use bion::solver::solve;
use bion::{EstimatorKind, LossSpec, SolverConfig};

fn main() {
    let instances = generate_batch(&GenSpec::bin_packing_default(9), 60).unwrap();
    let cfg = SolverConfig::default();
    let (corpus, _) = build_corpus(&instances, &cfg, 9);
    let all: Vec<usize> = (0..corpus.entries.len()).collect();
    let mut trainer = standard_trainer(
        EstimatorKind::Gtb,
        LossSpec::ShiftedSquaredError { a: -1.0 },
        0.2,
        Default::default(),
    );
    let estimator = trainer(&corpus, &all[..50].to_vec()).unwrap();

    println!("bounded vs unbounded search effort on unseen instances:");
    for entry in &corpus.entries[50..] {
        let unbounded = solve(&entry.instance, &cfg);
        let bounded = solve_with_bion(&entry.instance, &estimator, &cfg).unwrap();
        assert_eq!(bounded.outcome.best_objective, unbounded.best_objective);
        println!(
            "  {:<24} z_opt {:>2} bounds [{}, {}] nodes {:>5} -> {:>4}{}",
            entry.instance.name,
            entry.optimum,
            bounded.estimation.lo,
            bounded.estimation.hi,
            unbounded.nodes_explored,
            bounded.outcome.nodes_explored,
            if bounded.fallback_used { "  (fallback)" } else { "" }
        );
    }

    // force an inadmissible boundary: an upper bound strictly below the
    // optimum makes the first solve unsatisfiable and triggers the fallback
    let m = generate(&GenSpec::bin_packing_default(77)).unwrap();
    let z_opt = solve(&m, &cfg).best_objective.unwrap();
    let bad = Estimation { lo: m.objective_domain().lb, hi: z_opt - 1 };
    let r = solve_with_estimation(&m, bad, &cfg, BoundsMode::Both).unwrap();
    println!(
        "\nforced bad bound hi = {} on {} (optimum {}): fallback {:?}, returned {:?}",
        z_opt - 1,
        m.name,
        z_opt,
        r.fallback_reason,
        r.outcome.best_objective
    );
    assert_eq!(r.outcome.best_objective, Some(z_opt));
}
