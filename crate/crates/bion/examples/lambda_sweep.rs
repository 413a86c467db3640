//! Runs a small label-shift sweep: for each loss configuration and each
//! adjustment factor lambda, cross-validated estimators are scored for
//! admissibility, pruning, and boundary tightness.

use bion::estimators::{EstimatorKind, GtbParams, Hyperparams, LossSpec};
use bion::generate::{generate_batch, GenSpec};
use bion::metrics::{lambda_sweep, render_sweep, SweepConfig};
use bion::pipeline::build_corpus;
use bion::SolverConfig;

fn main() {
    let instances = generate_batch(&GenSpec::bin_packing_default(21), 60).unwrap();
    let (corpus, _) = build_corpus(&instances, &SolverConfig::default(), 21);

    let hyper = Hyperparams {
        gtb: GtbParams { rounds: 40, ..GtbParams::default() },
        ..Hyperparams::default()
    };
    let configs = vec![
        SweepConfig {
            label: "gtb_s".into(),
            kind: EstimatorKind::Gtb,
            loss: LossSpec::SquaredError,
            hyper,
        },
        SweepConfig {
            label: "gtb_a".into(),
            kind: EstimatorKind::Gtb,
            loss: LossSpec::ShiftedSquaredError { a: -1.0 },
            hyper,
        },
    ];
    let lambdas = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    let rows = lambda_sweep(&[corpus], &configs, &lambdas, 5, 2).unwrap();
    print!("{}", render_sweep(&rows));
}
