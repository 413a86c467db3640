//! Subcommand implementations behind the `bion` binary: instance generation,
//! corpus building, estimator training, estimation, boundary-constrained
//! solving, and the benchmark/report pipeline. All stages are plain files in
//! and plain files out, deterministic for fixed flags and seeds.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 missing input artifact,
//! 4 estimator/instance schema mismatch, 1 other errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cop::{parse_instance, serialize_instance, CopInstance};
use crate::estimators::{
    parse_estimator, serialize_estimator, EstimateError, Estimator, EstimatorKind, GtbParams,
    Hyperparams, LossSpec, MlpParams,
};
use crate::generate::{generate_batch, Family, GenSpec};
use crate::metrics::{
    fixed_boundary, lambda_sweep, render_sweep, solver_comparison, EffortMeasure, MetricValue,
    SolverComparison, SweepConfig, SweepRow,
};
use crate::pipeline::{
    build_corpus, solve_with_estimation, split_dataset, standard_trainer, BoundsMode, Dataset,
    PipelineError, Split,
};
use crate::solver::{solve, SolverConfig, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISSING_ARTIFACT: i32 = 3;
pub const EXIT_SCHEMA_MISMATCH: i32 = 4;
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "bion",
    about = "Solve constraint optimization problems with learned objective-boundary estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate seeded problem instances into a directory.
    Generate(GenerateArgs),
    /// Solve instances to optimality and write a corpus manifest.
    Corpus(CorpusArgs),
    /// Train a boundary estimator on a corpus.
    Train(TrainArgs),
    /// Print the estimated objective bounds for one instance.
    Estimate(EstimateArgs),
    /// Solve one instance, optionally with estimated or fixed boundaries.
    Solve(SolveArgs),
    /// Run the four-configuration solver comparison and the lambda sweep.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Binpacking,
    Jobshop,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub family: FamilyArg,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Bin packing: item count.
    #[arg(long, default_value_t = 6)]
    pub items: usize,
    /// Bin packing: bin capacity.
    #[arg(long, default_value_t = 10)]
    pub capacity: i64,
    /// Jobshop: job count.
    #[arg(long, default_value_t = 3)]
    pub jobs: usize,
    /// Jobshop: machine count.
    #[arg(long, default_value_t = 2)]
    pub machines: usize,
    /// Jobshop: encode the makespan as an explicit max instead of
    /// per-operation upper bounds.
    #[arg(long, default_value_t = false)]
    pub max_of: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory of instance files (all *.json are read, sorted by name).
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0)]
    pub time_limit_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Lr,
    Knn,
    Gtb,
    Mlp,
}

impl From<ModelArg> for EstimatorKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Lr => EstimatorKind::Lr,
            ModelArg::Knn => EstimatorKind::Knn,
            ModelArg::Gtb => EstimatorKind::Gtb,
            ModelArg::Mlp => EstimatorKind::Mlp,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Gtb)]
    pub model: ModelArg,
    /// Loss shift parameter; omit for the symmetric squared error.
    #[arg(long, allow_negative_numbers = true)]
    pub loss_a: Option<f64>,
    /// Label-shift adjustment factor.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train/dev/test fractions.
    #[arg(long, num_args = 3, default_values_t = [0.8, 0.1, 0.1])]
    pub split: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub gtb_rounds: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundsArg {
    Both,
    Upper,
    None,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Trained estimator; required unless --bounds none and no baseline.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BoundsArg::None)]
    pub bounds: BoundsArg,
    /// Post the halfway fixed upper boundary computed from an unbounded run.
    #[arg(long, default_value_t = false)]
    pub fixed_baseline: bool,
    #[arg(long, default_value_t = 10.0)]
    pub time_limit_secs: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the outcome here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Report directory; falls back to $BION_REPORT_DIR, then ./reports.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    pub time_limit_secs: f64,
    /// Also run the lambda sweep over this corpus.
    #[arg(long, default_value_t = false)]
    pub sweep: bool,
    #[arg(long, default_value_t = 10)]
    pub sweep_folds: usize,
    #[arg(long, default_value_t = 3)]
    pub sweep_reps: usize,
    #[arg(long, default_value_t = 60)]
    pub sweep_gtb_rounds: usize,
}

#[derive(Debug)]
pub struct CmdError {
    pub exit_code: i32,
    pub message: String,
}

impl CmdError {
    fn failure(message: impl Into<String>) -> Self {
        CmdError { exit_code: EXIT_FAILURE, message: message.into() }
    }

    fn missing(path: &Path) -> Self {
        CmdError {
            exit_code: EXIT_MISSING_ARTIFACT,
            message: format!("missing input artifact: {}", path.display()),
        }
    }

    fn schema(message: impl Into<String>) -> Self {
        CmdError { exit_code: EXIT_SCHEMA_MISMATCH, message: message.into() }
    }
}

impl From<PipelineError> for CmdError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Estimate(EstimateError::Schema { .. }) => CmdError::schema(e.to_string()),
            PipelineError::Estimate(EstimateError::Feature(_)) => CmdError::schema(e.to_string()),
            other => CmdError::failure(other.to_string()),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Corpus(a) => cmd_corpus(a),
        Command::Train(a) => cmd_train(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CmdError> {
    if !path.exists() {
        return Err(CmdError::missing(path));
    }
    fs::read(path).map_err(|e| CmdError::failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CmdError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| CmdError::failure(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CmdError::failure(format!("{}: {e}", path.display())))
}

fn to_json_pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serialization cannot fail");
    out.push(b'\n');
    out
}

fn solver_config(time_limit_secs: f64, seed: u64) -> SolverConfig {
    SolverConfig {
        time_limit: Duration::from_secs_f64(time_limit_secs),
        seed,
        ..SolverConfig::default()
    }
}

pub fn cmd_generate(a: GenerateArgs) -> Result<(), CmdError> {
    let family = match a.family {
        FamilyArg::Binpacking => Family::BinPacking {
            items: a.items,
            capacity: a.capacity,
            weight_min: 2,
            weight_max: (a.capacity * 7 / 10).max(2),
        },
        FamilyArg::Jobshop => Family::Jobshop {
            jobs: a.jobs,
            machines: a.machines,
            duration_min: 1,
            duration_max: 9,
            use_max_of: a.max_of,
        },
    };
    let spec = GenSpec { family, seed: a.seed };
    let instances =
        generate_batch(&spec, a.count).map_err(|e| CmdError::failure(e.to_string()))?;
    for (i, m) in instances.iter().enumerate() {
        let path = a.out.join(format!("{:04}_{}.json", i, m.name));
        write_file(&path, &serialize_instance(m))?;
    }
    println!("wrote {} instances to {}", instances.len(), a.out.display());
    Ok(())
}

/// Corpus manifest: instance file names (relative to the manifest), raw
/// feature maps, verified optima, split labels, and the seed.
#[derive(Debug, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub entries: Vec<CorpusManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CorpusManifestEntry {
    pub file: String,
    pub name: String,
    pub optimum: i64,
    pub split: Split,
    pub raw_features: crate::features::FeatureMap,
}

fn load_instances_dir(dir: &Path) -> Result<Vec<(String, CopInstance)>, CmdError> {
    if !dir.is_dir() {
        return Err(CmdError::missing(dir));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CmdError::failure(format!("{}: {e}", dir.display())))?
        .filter_map(|r| r.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let m = parse_instance(&read_file(&p)?)
                .map_err(|e| CmdError::failure(format!("{}: {e}", p.display())))?;
            Ok((p.file_name().unwrap().to_string_lossy().into_owned(), m))
        })
        .collect()
}

pub fn cmd_corpus(a: CorpusArgs) -> Result<(), CmdError> {
    let named = load_instances_dir(&a.instances)?;
    let instances: Vec<CopInstance> = named.iter().map(|(_, m)| m.clone()).collect();
    let cfg = solver_config(a.time_limit_secs, a.seed);
    let (dataset, skipped) = build_corpus(&instances, &cfg, a.seed);
    for s in &skipped {
        eprintln!("skipped {} ({:?})", s.name, s.verdict);
    }
    // map entries back to their source files by position among kept instances
    let kept_files: Vec<&String> = named
        .iter()
        .filter(|(_, m)| dataset.entries.iter().any(|e| e.instance.name == m.name))
        .map(|(f, _)| f)
        .collect();
    let manifest = CorpusManifest {
        seed: a.seed,
        entries: dataset
            .entries
            .iter()
            .zip(kept_files)
            .map(|(e, f)| CorpusManifestEntry {
                file: f.clone(),
                name: e.instance.name.clone(),
                optimum: e.optimum,
                split: Split::Train,
                raw_features: e.raw_features.clone(),
            })
            .collect(),
    };
    write_file(&a.out, &to_json_pretty(&manifest))?;
    println!(
        "corpus: {} entries, {} skipped -> {}",
        manifest.entries.len(),
        skipped.len(),
        a.out.display()
    );
    Ok(())
}

/// Loads a manifest plus the instance files it references.
pub fn load_corpus(path: &Path) -> Result<Dataset, CmdError> {
    let manifest: CorpusManifest = serde_json::from_slice(&read_file(path)?)
        .map_err(|e| CmdError::failure(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let entries = manifest
        .entries
        .iter()
        .map(|e| {
            let p = base.join(&e.file);
            let instance = parse_instance(&read_file(&p)?)
                .map_err(|err| CmdError::failure(format!("{}: {err}", p.display())))?;
            Ok(crate::pipeline::DatasetEntry {
                instance,
                raw_features: e.raw_features.clone(),
                optimum: e.optimum,
            })
        })
        .collect::<Result<Vec<_>, CmdError>>()?;
    let splits = manifest.entries.iter().map(|e| e.split).collect();
    Ok(Dataset { entries, splits, seed: manifest.seed })
}

fn loss_from_flag(loss_a: Option<f64>) -> LossSpec {
    match loss_a {
        Some(a) => LossSpec::ShiftedSquaredError { a },
        None => LossSpec::SquaredError,
    }
}

pub fn cmd_train(a: TrainArgs) -> Result<(), CmdError> {
    let corpus = load_corpus(&a.corpus)?;
    let split = split_dataset(&corpus, (a.split[0], a.split[1], a.split[2]), a.seed)
        .map_err(CmdError::from)?;
    let train_idx = split.indices_with_split(Split::Train);
    let hyper = Hyperparams {
        gtb: GtbParams { rounds: a.gtb_rounds, ..GtbParams::default() },
        mlp: MlpParams { seed: a.seed, ..MlpParams::default() },
        ..Hyperparams::default()
    };
    let mut trainer =
        standard_trainer(a.model.into(), loss_from_flag(a.loss_a), a.lambda, hyper);
    let estimator = trainer(&split, &train_idx).map_err(CmdError::from)?;
    write_file(&a.out, &serialize_estimator(&estimator))?;
    println!(
        "trained {:?} on {} instances -> {}",
        estimator.kind,
        train_idx.len(),
        a.out.display()
    );
    Ok(())
}

fn load_estimator(path: &Path) -> Result<Estimator, CmdError> {
    parse_estimator(&read_file(path)?)
        .map_err(|e| CmdError::failure(format!("{}: {e}", path.display())))
}

pub fn cmd_estimate(a: EstimateArgs) -> Result<(), CmdError> {
    let estimator = load_estimator(&a.model)?;
    let instance = parse_instance(&read_file(&a.instance)?)
        .map_err(|e| CmdError::failure(format!("{}: {e}", a.instance.display())))?;
    let est = crate::estimators::estimate(&estimator, &instance)
        .map_err(|e| CmdError::schema(e.to_string()))?;
    println!("{}", serde_json::to_string(&est).unwrap());
    Ok(())
}

#[derive(Debug, Serialize)]
struct SolveReport {
    verdict: Verdict,
    best_objective: Option<i64>,
    nodes_explored: u64,
    estimation: Option<crate::estimators::Estimation>,
    fallback_used: bool,
    fixed_upper_bound: Option<i64>,
    solution_log: Vec<(u64, i64)>,
}

pub fn cmd_solve(a: SolveArgs) -> Result<(), CmdError> {
    let instance = parse_instance(&read_file(&a.instance)?)
        .map_err(|e| CmdError::failure(format!("{}: {e}", a.instance.display())))?;
    let cfg = solver_config(a.time_limit_secs, a.seed);
    let dom = instance.objective_domain();

    let report = if a.fixed_baseline {
        // halfway bound needs the unbounded run's optimum and first solution
        let unbounded = solve(&instance, &cfg);
        let (Some(z_opt), Some(first)) =
            (unbounded.best_objective, unbounded.solution_log.first())
        else {
            return Err(CmdError::failure("fixed baseline needs a solvable instance"));
        };
        let ub = fixed_boundary(z_opt, first.objective)
            .map_err(|e| CmdError::failure(e.to_string()))?;
        let est = crate::estimators::Estimation { lo: dom.lb, hi: ub };
        let r = solve_with_estimation(&instance, est, &cfg, BoundsMode::Both)?;
        SolveReport {
            verdict: r.outcome.verdict,
            best_objective: r.outcome.best_objective,
            nodes_explored: r.outcome.nodes_explored,
            estimation: None,
            fallback_used: r.fallback_used,
            fixed_upper_bound: Some(ub),
            solution_log: r.outcome.solution_log.iter().map(|s| (s.nodes, s.objective)).collect(),
        }
    } else {
        let mode = match a.bounds {
            BoundsArg::Both => BoundsMode::Both,
            BoundsArg::Upper => BoundsMode::Upper,
            BoundsArg::None => BoundsMode::None,
        };
        match (mode, &a.model) {
            (BoundsMode::None, _) => {
                let out = solve(&instance, &cfg);
                SolveReport {
                    verdict: out.verdict,
                    best_objective: out.best_objective,
                    nodes_explored: out.nodes_explored,
                    estimation: None,
                    fallback_used: false,
                    fixed_upper_bound: None,
                    solution_log: out.solution_log.iter().map(|s| (s.nodes, s.objective)).collect(),
                }
            }
            (_, None) => {
                return Err(CmdError::failure("--bounds both|upper requires --model"));
            }
            (_, Some(model_path)) => {
                let estimator = load_estimator(model_path)?;
                let r = crate::pipeline::solve_with_bion_mode(&instance, &estimator, &cfg, mode)?;
                SolveReport {
                    verdict: r.outcome.verdict,
                    best_objective: r.outcome.best_objective,
                    nodes_explored: r.outcome.nodes_explored,
                    estimation: Some(r.estimation),
                    fallback_used: r.fallback_used,
                    fixed_upper_bound: None,
                    solution_log: r.outcome.solution_log.iter().map(|s| (s.nodes, s.objective)).collect(),
                }
            }
        }
    };

    let bytes = to_json_pretty(&report);
    match &a.out {
        Some(path) => write_file(path, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

/// Per-instance rows of the four-configuration comparison: (1) unbounded,
/// (2) both estimated bounds, (3) upper estimated bound only, (4) fixed
/// halfway upper bound.
#[derive(Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub instances: usize,
    pub rows: Vec<BenchRow>,
    pub aggregate: Vec<BenchAggregate>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub configuration: String,
    pub comparison: SolverComparison,
    pub fallback_used: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchAggregate {
    pub configuration: String,
    pub est_median: MetricValue,
    pub est_mad: MetricValue,
    pub qof_median: MetricValue,
    pub qof_mad: MetricValue,
    pub ttc_median: MetricValue,
    pub ttc_mad: MetricValue,
}

fn render_bench(report: &BenchReport) -> String {
    let fmt = |v: &MetricValue| match v {
        MetricValue::Defined(x) => format!("{x:9.2}"),
        MetricValue::Undefined => format!("{:>9}", "-"),
    };
    let mut out = String::new();
    out.push_str(&format!("four-configuration comparison over {} instances\n", report.instances));
    out.push_str(&format!(
        "{:<12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
        "config", "EST med", "EST mad", "QoF med", "QoF mad", "TtC med", "TtC mad"
    ));
    for a in &report.aggregate {
        out.push_str(&format!(
            "{:<12} {} {} {} {} {} {}\n",
            a.configuration,
            fmt(&a.est_median),
            fmt(&a.est_mad),
            fmt(&a.qof_median),
            fmt(&a.qof_mad),
            fmt(&a.ttc_median),
            fmt(&a.ttc_mad)
        ));
    }
    out
}

pub fn cmd_bench(a: BenchArgs) -> Result<(), CmdError> {
    let corpus = load_corpus(&a.corpus)?;
    let estimator = load_estimator(&a.model)?;
    let out_dir = a
        .out
        .clone()
        .or_else(|| std::env::var_os("BION_REPORT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"));
    let cfg = solver_config(a.time_limit_secs, 0);

    let mut rows = Vec::new();
    for entry in &corpus.entries {
        let m = &entry.instance;
        let unbounded = solve(m, &cfg);
        let Some(first) = unbounded.solution_log.first().copied() else {
            continue;
        };
        let z_opt = unbounded.best_objective.expect("solved instance has an objective");

        let both = crate::pipeline::solve_with_bion_mode(m, &estimator, &cfg, BoundsMode::Both)?;
        let upper = crate::pipeline::solve_with_bion_mode(m, &estimator, &cfg, BoundsMode::Upper)?;
        let fixed_ub = fixed_boundary(z_opt, first.objective)
            .map_err(|e| CmdError::failure(e.to_string()))?;
        let fixed = solve_with_estimation(
            m,
            crate::estimators::Estimation { lo: m.objective_domain().lb, hi: fixed_ub },
            &cfg,
            BoundsMode::Both,
        )?;

        for (label, result) in
            [("both", &both), ("upper", &upper), ("fixed", &fixed)]
        {
            rows.push(BenchRow {
                instance: m.name.clone(),
                configuration: label.to_string(),
                comparison: solver_comparison(&result.outcome, &unbounded, EffortMeasure::Nodes),
                fallback_used: result.fallback_used,
            });
        }
    }

    let aggregate = ["both", "upper", "fixed"]
        .iter()
        .map(|label| {
            let of: Vec<&BenchRow> =
                rows.iter().filter(|r| r.configuration == *label).collect();
            let col = |f: &dyn Fn(&SolverComparison) -> MetricValue| {
                let cells: Vec<MetricValue> = of.iter().map(|r| f(&r.comparison)).collect();
                crate::metrics::aggregate(&cells)
            };
            let (est_median, est_mad) = col(&|c| c.equivalent_solution_time);
            let (qof_median, qof_mad) = col(&|c| c.quality_of_first);
            let (ttc_median, ttc_mad) = col(&|c| c.time_to_completion);
            BenchAggregate {
                configuration: label.to_string(),
                est_median,
                est_mad,
                qof_median,
                qof_mad,
                ttc_median,
                ttc_mad,
            }
        })
        .collect();

    let report = BenchReport { instances: corpus.entries.len(), rows, aggregate };
    write_file(&out_dir.join("bench_report.json"), &to_json_pretty(&report))?;
    write_file(&out_dir.join("bench_report.txt"), render_bench(&report).as_bytes())?;

    if a.sweep {
        let hyper = Hyperparams {
            gtb: GtbParams { rounds: a.sweep_gtb_rounds, ..GtbParams::default() },
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
        let rows: Vec<SweepRow> =
            lambda_sweep(&[corpus], &configs, &lambdas, a.sweep_folds, a.sweep_reps)
                .map_err(|e| CmdError::failure(e.to_string()))?;
        write_file(&out_dir.join("sweep.json"), &to_json_pretty(&rows))?;
        write_file(&out_dir.join("sweep.txt"), render_sweep(&rows).as_bytes())?;
    }
    println!("reports written to {}", out_dir.display());
    Ok(())
}
