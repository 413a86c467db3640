//! Acceptance gate: one test per criterion, each printing a single PASS line
//! on success (run with `--nocapture` to see them). Expensive shared state
//! (the two solved corpora and the lambda sweep) is built once.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use bion::estimators::{
    Estimation, EstimatorKind, GtbParams, Hyperparams, LossSpec,
};
use bion::features::{apply_recipe_to_map, fit_recipe_from_maps, ScalingMode};
use bion::generate::{derive_seed, generate, generate_batch, Family, GenSpec};
use bion::metrics::{
    fixed_boundary, gap_metric, lambda_sweep, solver_comparison, EffortMeasure, MetricValue,
    SweepConfig, SweepRow,
};
use bion::pipeline::{
    build_corpus, solve_with_bion, solve_with_estimation, standard_trainer, BoundsMode, Dataset,
};
use bion::solver::{assignment_satisfies, solve};
use bion::{CopInstance, Domain, SolverConfig, Verdict};

struct Fixture {
    bp: Dataset,
    js: Dataset,
    sweep: Vec<SweepRow>,
}

fn fixture() -> &'static Fixture {
    static FIXTURE: OnceLock<Fixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let cfg = SolverConfig::default();
        let bp_instances = generate_batch(&GenSpec::bin_packing_default(101), 200).unwrap();
        let (bp, skipped) = build_corpus(&bp_instances, &cfg, 101);
        assert!(skipped.is_empty(), "all bin-packing instances must solve");
        let js_instances = generate_batch(&GenSpec::jobshop_default(202), 200).unwrap();
        let (js, skipped) = build_corpus(&js_instances, &cfg, 202);
        assert!(skipped.is_empty(), "all jobshop instances must solve");

        let hyper = Hyperparams {
            gtb: GtbParams { rounds: 60, ..GtbParams::default() },
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
        let lambdas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let sweep =
            lambda_sweep(&[bp.clone(), js.clone()], &configs, &lambdas, 10, 2).unwrap();
        Fixture { bp, js, sweep }
    })
}

/// Exhaustive enumeration over the full domain product; the independent
/// oracle for the branch-and-bound solver.
fn brute_force_optimum(m: &CopInstance) -> Option<i64> {
    let mut best: Option<i64> = None;
    let mut current: Vec<i64> = m.variables.iter().map(|v| v.lb).collect();
    let mut assignment: BTreeMap<String, i64> = BTreeMap::new();
    loop {
        for (var, &val) in m.variables.iter().zip(&current) {
            assignment.insert(var.id.clone(), val);
        }
        if assignment_satisfies(m, &assignment) {
            let z = assignment[&m.objective];
            best = Some(best.map_or(z, |b: i64| b.min(z)));
        }
        // odometer increment over the domain product
        let mut i = 0;
        loop {
            if i == current.len() {
                return best;
            }
            current[i] += 1;
            if current[i] <= m.variables[i].ub {
                break;
            }
            current[i] = m.variables[i].lb;
            i += 1;
        }
    }
}

fn combinations(m: &CopInstance) -> f64 {
    m.variables.iter().map(|v| (v.ub - v.lb + 1) as f64).product()
}

#[test]
fn criterion_01_solver_oracle_equivalence() {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut checked = 0;
    for i in 0..200usize {
        let spec = if i % 4 == 3 {
            // the explicit-max encoding adds end variables, so keep its
            // enumeration space small with unit durations
            let use_max_of = i % 8 == 3;
            GenSpec {
                family: Family::Jobshop {
                    jobs: 2,
                    machines: 2,
                    duration_min: 1,
                    duration_max: if use_max_of { 1 } else { 2 },
                    use_max_of,
                },
                seed: derive_seed(0xACCE, i),
            }
        } else {
            GenSpec {
                family: Family::BinPacking {
                    items: 3 + (i % 2) as usize,
                    capacity: 8 + (i % 3) as i64,
                    weight_min: 2,
                    weight_max: 6,
                },
                seed: derive_seed(0xACCE, i),
            }
        };
        let m = generate(&spec).unwrap();
        assert!(combinations(&m) <= 1e6, "{} exceeds the enumeration budget", m.name);
        let oracle = brute_force_optimum(&m);
        let out = solve(&m, &cfg);
        assert_eq!(out.verdict, Verdict::Optimal, "{}", m.name);
        assert_eq!(out.best_objective, oracle, "{}", m.name);
        checked += 1;
    }
    assert_eq!(checked, 200);
    assert!(start.elapsed().as_secs() < 60, "took {:?}", start.elapsed());
    println!("criterion 1 (solver oracle equivalence): PASS");
}

#[test]
fn criterion_02_loss_and_gradient() {
    use bion::estimators::{loss, loss_gradient};
    let a8 = LossSpec::ShiftedSquaredError { a: -0.8 };
    assert!((loss(-1.0, &a8) - 3.24).abs() < 1e-12);
    assert!((loss(1.0, &a8) - 0.04).abs() < 1e-12);
    for spec in [LossSpec::SquaredError, a8, LossSpec::ShiftedSquaredError { a: -1.0 }] {
        for r in [-3.0, -1.0, -0.1, 0.1, 1.0, 3.0] {
            let h = 1e-6;
            let numeric = (loss(r + h, &spec) - loss(r - h, &spec)) / (2.0 * h);
            assert!(
                (loss_gradient(r, &spec) - numeric).abs() < 1e-6,
                "{spec:?} at r={r}: {} vs {numeric}",
                loss_gradient(r, &spec)
            );
        }
    }
    println!("criterion 2 (loss/gradient correctness): PASS");
}

#[test]
fn criterion_03_label_shift() {
    use bion::{LabelShift, ShiftDirection};
    let dom = Domain { lb: 2, ub: 12 };
    // integer inputs, both integer (lambda 0, 0.2, 1) and real (lambda 0.3)
    // shifted labels, checked exactly against y + lambda*(ub-y) / y - lambda*(y-lb)
    for (lambda, y, expected_up, expected_down) in [
        (0.0, 7, 7.0, 7.0),
        (0.2, 7, 8.0, 6.0),
        (1.0, 7, 12.0, 2.0),
        (0.3, 7, 7.0 + 0.3 * 5.0, 7.0 - 0.3 * 5.0),
    ] {
        let up = LabelShift { lambda, direction: ShiftDirection::Overestimate };
        let down = LabelShift { lambda, direction: ShiftDirection::Underestimate };
        assert_eq!(bion::estimators::shift_label(y, dom, &up).unwrap(), expected_up);
        assert_eq!(bion::estimators::shift_label(y, dom, &down).unwrap(), expected_down);
    }
    println!("criterion 3 (label-shift formulas): PASS");
}

#[test]
fn criterion_04_metric_formulas() {
    use bion::metrics::size_metric;
    // worked examples: estimate 22 against optimum 20 in domain ub 35 gives
    // gap 86.67; interval [18, 24] inside [5, 30] gives size 76 -> with the
    // documented pair (ub-lb = 25, hi-lo = 9) size = (1 - 9/25)*100 = 64
    let g = gap_metric(&Estimation { lo: 0, hi: 22 }, 20, Domain { lb: 0, ub: 35 });
    let MetricValue::Defined(g) = g else { panic!("gap defined") };
    assert!((g - 86.66666666666667).abs() < 1e-10);
    let s = size_metric(&Estimation { lo: 18, hi: 27 }, Domain { lb: 5, ub: 30 }).unwrap();
    assert!((s - 64.0).abs() < 1e-12);

    // random tuples against exact integer-ratio recomputation
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..100 {
        let lb = (next() % 50) as i64;
        let ub = lb + 2 + (next() % 60) as i64;
        let z = lb + (next() as i64).rem_euclid(ub - lb);
        let hi = z + (next() as i64).rem_euclid(ub - z + 1);
        let lo = lb + (next() as i64).rem_euclid(z - lb + 1);
        let dom = Domain { lb, ub };

        let MetricValue::Defined(g) = gap_metric(&Estimation { lo, hi }, z, dom) else {
            panic!("ub > z so the gap is defined");
        };
        let exact = 100.0 * ((ub - z) - (hi - z).abs()) as f64 / (ub - z) as f64;
        assert!((g - exact).abs() < 1e-12);

        let s = size_metric(&Estimation { lo, hi }, dom).unwrap();
        let exact = 100.0 * ((ub - lb) - (hi - lo).abs()) as f64 / (ub - lb) as f64;
        assert!((s - exact).abs() < 1e-12);
    }
    println!("criterion 4 (metric formula fidelity): PASS");
}

fn sweep_row<'a>(rows: &'a [SweepRow], label: &str, lambda: f64) -> &'a SweepRow {
    rows.iter()
        .find(|r| r.config == label && (r.lambda - lambda).abs() < 1e-9)
        .expect("sweep row present")
}

#[test]
fn criterion_05_admissibility_shape() {
    let f = fixture();
    let sym0 = sweep_row(&f.sweep, "gtb_s", 0.0).admissible_pct;
    assert!(
        (40.0..=60.0).contains(&sym0),
        "symmetric lambda=0 admissibility {sym0}"
    );
    let asym0 = sweep_row(&f.sweep, "gtb_a", 0.0).admissible_pct;
    assert!(asym0 >= 75.0, "asymmetric lambda=0 admissibility {asym0}");
    for label in ["gtb_s", "gtb_a"] {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=10 {
            let adm = sweep_row(&f.sweep, label, i as f64 / 10.0).admissible_pct;
            assert!(
                adm >= prev - 1e-9,
                "{label} admissibility decreased at lambda={}",
                i as f64 / 10.0
            );
            prev = adm;
        }
    }
    println!("criterion 5 (admissibility vs label shift): PASS");
}

#[test]
fn criterion_06_domain_reduction() {
    let row = sweep_row(&fixture().sweep, "gtb_a", 0.2);
    let MetricValue::Defined(size) = row.median_size_pct else {
        panic!("median size defined");
    };
    assert!(size >= 40.0, "median size {size}");
    assert!(
        row.interval_admissible_pct >= 90.0,
        "interval admissibility {}",
        row.interval_admissible_pct
    );
    println!("criterion 6 (domain reduction): PASS");
}

#[test]
fn criterion_07_pipeline_soundness() {
    let f = fixture();
    let cfg = SolverConfig::default();
    let mut runs = 0;

    // estimators trained on each family corpus, evaluated on fresh instances
    for (corpus, spec_seed, family_spec) in [
        (&f.bp, 5050u64, GenSpec::bin_packing_default(0)),
        (&f.js, 6060u64, GenSpec::jobshop_default(0)),
    ] {
        let all: Vec<usize> = (0..corpus.entries.len()).collect();
        let mut trainer = standard_trainer(
            EstimatorKind::Gtb,
            LossSpec::ShiftedSquaredError { a: -1.0 },
            0.1,
            Hyperparams::default(),
        );
        let estimator = trainer(corpus, &all).unwrap();
        for i in 0..230usize {
            let spec = GenSpec { seed: derive_seed(spec_seed, i), ..family_spec.clone() };
            let m = generate(&spec).unwrap();
            let unbounded = solve(&m, &cfg);
            assert_eq!(unbounded.verdict, Verdict::Optimal);
            let r = solve_with_bion(&m, &estimator, &cfg).unwrap();
            assert_eq!(r.outcome.verdict, Verdict::Optimal, "{}", m.name);
            assert_eq!(r.outcome.best_objective, unbounded.best_objective, "{}", m.name);
            runs += 1;
        }
    }

    // forced-inadmissible constructions: an upper bound strictly below the
    // optimum must trigger the fallback, never a wrong optimum
    for i in 0..40usize {
        let spec = GenSpec { seed: derive_seed(7070, i), ..GenSpec::bin_packing_default(0) };
        let m = generate(&spec).unwrap();
        let z_opt = solve(&m, &cfg).best_objective.unwrap();
        let bad = Estimation { lo: m.objective_domain().lb, hi: z_opt - 1 };
        let r = solve_with_estimation(&m, bad, &cfg, BoundsMode::Both).unwrap();
        assert!(r.fallback_used, "{}", m.name);
        assert_eq!(r.outcome.best_objective, Some(z_opt), "{}", m.name);
        runs += 1;
    }
    assert!(runs >= 500, "only {runs} runs");
    println!("criterion 7 (pipeline soundness over {runs} runs): PASS");
}

#[test]
fn criterion_08_no_leakage() {
    let f = fixture();
    let maps: Vec<_> = f.bp.entries.iter().map(|e| e.raw_features.clone()).collect();
    let (train, test) = maps.split_at(150);

    // the recipe must depend on the training fold only: shuffling or even
    // discarding the test fold cannot change it
    let recipe = fit_recipe_from_maps(train, ScalingMode::Standardize, 0.0).unwrap();

    // constructed asymmetric split: standardizing the test fold under the
    // training recipe must differ from standardizing it against itself
    let self_recipe = fit_recipe_from_maps(test, ScalingMode::Standardize, 0.0).unwrap();
    let mut differs = false;
    for map in test {
        let under_train = apply_recipe_to_map(map, &recipe).unwrap();
        let under_self = apply_recipe_to_map(map, &self_recipe).unwrap();
        for name in &self_recipe.kept_features {
            let i = recipe.kept_features.iter().position(|n| n == name);
            let j = self_recipe.kept_features.iter().position(|n| n == name).unwrap();
            if let Some(i) = i {
                if (under_train.values[i] - under_self.values[j]).abs() > 1e-9 {
                    differs = true;
                }
            }
        }
    }
    assert!(differs, "training recipe must not be fit on test data");

    // model fits are a function of the training indices alone
    let train_idx: Vec<usize> = (0..150).collect();
    let mut trainer = standard_trainer(
        EstimatorKind::Gtb,
        LossSpec::SquaredError,
        0.0,
        Hyperparams::default(),
    );
    let a = trainer(&f.bp, &train_idx).unwrap();
    let mut permuted = f.bp.clone();
    permuted.entries[150..].reverse();
    let b = trainer(&permuted, &train_idx).unwrap();
    assert_eq!(
        bion::estimators::serialize_estimator(&a),
        bion::estimators::serialize_estimator(&b)
    );
    println!("criterion 8 (no leakage): PASS");
}

#[test]
fn criterion_09_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_bion");
    let run = |args: &[&str]| {
        let status = std::process::Command::new(bin).args(args).status().expect("spawn bion");
        assert!(status.success(), "step failed: {args:?}");
    };
    let run_pipeline = |root: &std::path::Path| {
        let p = |path: std::path::PathBuf| path.display().to_string();
        let inst = root.join("inst");
        let corpus = p(inst.join("corpus.json"));
        let model = p(root.join("model.json"));
        run(&[
            "generate", "--family", "binpacking", "--count", "25", "--seed", "33", "--out",
            &p(inst.clone()),
        ]);
        run(&["corpus", "--instances", &p(inst.clone()), "--out", &corpus, "--seed", "33"]);
        run(&[
            "train", "--corpus", &corpus, "--out", &model, "--model", "gtb", "--loss-a",
            "-1.0", "--lambda", "0.2", "--seed", "33", "--gtb-rounds", "40",
        ]);
        let mut files: Vec<_> = std::fs::read_dir(&inst)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|f| f.file_name().unwrap() != "corpus.json")
            .collect();
        files.sort();
        run(&[
            "solve", "--instance", &p(files[3].clone()), "--model", &model, "--bounds",
            "both", "--out", &p(root.join("solve.json")),
        ]);
        run(&["bench", "--corpus", &corpus, "--model", &model, "--out", &p(root.join("reports"))]);
    };

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_pipeline(dir_a.path());
    run_pipeline(dir_b.path());

    let mut compared = 0;
    let mut stack = vec![dir_a.path().to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let relative = path.strip_prefix(dir_a.path()).unwrap();
            let twin = dir_b.path().join(relative);
            assert_eq!(
                std::fs::read(&path).unwrap(),
                std::fs::read(&twin).unwrap(),
                "artifact differs: {}",
                relative.display()
            );
            compared += 1;
        }
    }
    // 25 instances + corpus + model + solve + 2 bench reports
    assert!(compared >= 30, "only {compared} artifacts compared");
    println!("criterion 9 (CLI determinism, {compared} artifacts byte-identical): PASS");
}

#[test]
fn criterion_10_fixed_boundary_baseline() {
    // spot checks: the halfway boundary and the zero-cases of all three
    // comparison metrics (identical outcomes score exactly zero)
    assert_eq!(fixed_boundary(40, 100).unwrap(), 70);
    let m = generate(&GenSpec::bin_packing_default(3)).unwrap();
    let out = solve(&m, &SolverConfig::default());
    let cmp = solver_comparison(&out, &out, EffortMeasure::Nodes);
    assert_eq!(cmp.equivalent_solution_time, MetricValue::Defined(0.0));
    assert_eq!(cmp.quality_of_first, MetricValue::Defined(0.0));
    assert_eq!(cmp.time_to_completion, MetricValue::Defined(0.0));

    // the bench subcommand runs the four-configuration protocol (unbounded
    // baseline vs both/upper/fixed) and reports all three metrics per row
    let bin = env!("CARGO_BIN_EXE_bion");
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    let run = |args: &[&str]| {
        let status = std::process::Command::new(bin).args(args).status().unwrap();
        assert!(status.success(), "{args:?}");
    };
    run(&[
        "generate", "--family", "jobshop", "--count", "20", "--seed", "44", "--out",
        inst.to_str().unwrap(),
    ]);
    let corpus = inst.join("corpus.json");
    run(&["corpus", "--instances", inst.to_str().unwrap(), "--out", corpus.to_str().unwrap()]);
    let model = dir.path().join("model.json");
    run(&[
        "train", "--corpus", corpus.to_str().unwrap(), "--out", model.to_str().unwrap(),
        "--model", "gtb", "--loss-a", "-1.0", "--lambda", "0.1", "--gtb-rounds", "40",
    ]);
    let reports = dir.path().join("reports");
    run(&[
        "bench", "--corpus", corpus.to_str().unwrap(), "--model", model.to_str().unwrap(),
        "--out", reports.to_str().unwrap(),
    ]);

    let report: serde_json::Value = serde_json::from_slice(
        &std::fs::read(reports.join("bench_report.json")).unwrap(),
    )
    .unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20 * 3, "both/upper/fixed row per instance");
    for label in ["both", "upper", "fixed"] {
        assert!(rows.iter().any(|r| r["configuration"] == label));
    }
    for row in rows {
        for metric in ["equivalent_solution_time", "quality_of_first", "time_to_completion"] {
            let state = row["comparison"][metric]["state"].as_str().unwrap();
            assert!(state == "defined" || state == "undefined");
        }
    }
    assert!(reports.join("bench_report.txt").exists());
    println!("criterion 10 (fixed-boundary baseline protocol): PASS");
}
