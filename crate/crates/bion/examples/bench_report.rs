//! Compares bounded against unbounded solving with the three comparison
//! metrics (equivalent solution time, quality of first solution, time to
//! completion), including the fixed halfway-boundary baseline.

use bion::estimators::Estimation;
use bion::generate::{generate_batch, GenSpec};
use bion::metrics::{
    aggregate, fixed_boundary, solver_comparison, EffortMeasure, MetricValue,
};
use bion::pipeline::{build_corpus, solve_with_estimation, standard_trainer, BoundsMode};
use bion::solver::solve;
use bion::{EstimatorKind, LossSpec, SolverConfig};

fn fmt(v: &MetricValue) -> String {
    match v {
        MetricValue::Defined(x) => format!("{x:7.2}"),
        MetricValue::Undefined => format!("{:>7}", "-"),
    }
}

fn main() {
    let instances = generate_batch(&GenSpec::jobshop_default(13), 50).unwrap();
    let cfg = SolverConfig::default();
    let (corpus, _) = build_corpus(&instances, &cfg, 13);
    let train: Vec<usize> = (0..40).collect();
    let mut trainer = standard_trainer(
        EstimatorKind::Gtb,
        LossSpec::ShiftedSquaredError { a: -1.0 },
        0.1,
        Default::default(),
    );
    let estimator = trainer(&corpus, &train).unwrap();

    let mut est_cells = Vec::new();
    let mut qof_cells = Vec::new();
    let mut ttc_cells = Vec::new();
    for entry in &corpus.entries[40..] {
        let m = &entry.instance;
        let unbounded = solve(m, &cfg);
        let z_opt = unbounded.best_objective.unwrap();
        let z_first = unbounded.solution_log[0].objective;

        let bounded =
            bion::pipeline::solve_with_bion_mode(m, &estimator, &cfg, BoundsMode::Both).unwrap();
        let cmp = solver_comparison(&bounded.outcome, &unbounded, EffortMeasure::Nodes);

        // fixed halfway baseline for reference
        let fixed = solve_with_estimation(
            m,
            Estimation {
                lo: m.objective_domain().lb,
                hi: fixed_boundary(z_opt, z_first).unwrap(),
            },
            &cfg,
            BoundsMode::Both,
        )
        .unwrap();
        let fixed_cmp = solver_comparison(&fixed.outcome, &unbounded, EffortMeasure::Nodes);

        println!(
            "{:<20} EST {} QoF {} TtC {}   fixed EST {}",
            m.name,
            fmt(&cmp.equivalent_solution_time),
            fmt(&cmp.quality_of_first),
            fmt(&cmp.time_to_completion),
            fmt(&fixed_cmp.equivalent_solution_time),
        );
        est_cells.push(cmp.equivalent_solution_time);
        qof_cells.push(cmp.quality_of_first);
        ttc_cells.push(cmp.time_to_completion);
    }

    let (est_med, est_mad) = aggregate(&est_cells);
    let (qof_med, qof_mad) = aggregate(&qof_cells);
    let (ttc_med, ttc_mad) = aggregate(&ttc_cells);
    println!(
        "\nmedians (mad): EST {} ({}), QoF {} ({}), TtC {} ({})",
        fmt(&est_med),
        fmt(&est_mad),
        fmt(&qof_med),
        fmt(&qof_mad),
        fmt(&ttc_med),
        fmt(&ttc_mad)
    );
}
