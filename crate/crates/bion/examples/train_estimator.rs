//! Builds a solved corpus, trains a boundary estimator with the asymmetric
//! loss, and checks its bound estimates against known optima on held-out
//! instances.

use bion::estimators::{estimate, is_admissible};
use bion::generate::{generate_batch, GenSpec};
use bion::pipeline::{build_corpus, split_dataset, standard_trainer, Split};
use bion::{EstimatorKind, LossSpec, SolverConfig};

fn main() {
    let instances = generate_batch(&GenSpec::bin_packing_default(5), 80).unwrap();
    let (corpus, skipped) = build_corpus(&instances, &SolverConfig::default(), 5);
    println!("corpus: {} solved, {} skipped", corpus.entries.len(), skipped.len());

    let split = split_dataset(&corpus, (0.8, 0.0, 0.2), 5).unwrap();
    let train_idx = split.indices_with_split(Split::Train);
    let test_idx = split.indices_with_split(Split::Test);

    let mut trainer = standard_trainer(
        EstimatorKind::Gtb,
        LossSpec::ShiftedSquaredError { a: -1.0 },
        0.2,
        Default::default(),
    );
    let estimator = trainer(&split, &train_idx).unwrap();
    println!("trained on {} instances, testing on {}\n", train_idx.len(), test_idx.len());

    let mut admissible = 0;
    for &i in &test_idx {
        let entry = &split.entries[i];
        let est = estimate(&estimator, &entry.instance).unwrap();
        let ok = is_admissible(&est, entry.optimum);
        admissible += ok as usize;
        println!(
            "  {:<24} optimum {:>2} estimated [{}, {}] {}",
            entry.instance.name,
            entry.optimum,
            est.lo,
            est.hi,
            if ok { "admissible" } else { "inadmissible" }
        );
    }
    println!("\n{admissible}/{} admissible on held-out instances", test_idx.len());
}
