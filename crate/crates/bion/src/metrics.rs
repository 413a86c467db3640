//! Estimation-quality metrics (admissibility, gap, size), solver-comparison
//! metrics with explicit undefined markers, the fixed-boundary baseline, and
//! the lambda sweep over estimator configurations.
//!
//! All percentage metrics are oriented so positive means the bounded or
//! estimated side is better. Undefined cells are first-class markers;
//! aggregation uses medians with median absolute deviation over defined
//! cells only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cop::Domain;
use crate::estimators::{
    is_admissible, EstimatorKind, Estimation, Hyperparams, LossSpec,
};
use crate::pipeline::{repeated_kfold, Dataset, FoldRecord, PipelineError};
use crate::solver::{SolveOutcome, Verdict};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("degenerate objective domain {lb}..{ub}")]
    DegenerateDomain { lb: i64, ub: i64 },
    #[error("inconsistent inputs: z_first {z_first} < z_opt {z_opt}")]
    FirstBelowOptimum { z_first: i64, z_opt: i64 },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// A percentage metric cell that may be undefined (never a sentinel number).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", content = "value", rename_all = "snake_case")]
pub enum MetricValue {
    Defined(f64),
    Undefined,
}

impl MetricValue {
    pub fn defined(&self) -> Option<f64> {
        match self {
            MetricValue::Defined(v) => Some(*v),
            MetricValue::Undefined => None,
        }
    }
}

/// `(1 - |hi - z_opt| / |ub - z_opt|) * 100`: how much closer the cutting
/// (upper) bound sits to the optimum than the original domain bound.
/// Undefined when the original bound already equals the optimum.
pub fn gap_metric(est: &Estimation, z_opt: i64, dom: Domain) -> MetricValue {
    if dom.ub == z_opt {
        return MetricValue::Undefined;
    }
    let ratio = (est.hi - z_opt).abs() as f64 / (dom.ub - z_opt).abs() as f64;
    MetricValue::Defined((1.0 - ratio) * 100.0)
}

/// `(1 - |hi - lo| / |ub - lb|) * 100`: relative reduction of the objective
/// domain width.
pub fn size_metric(est: &Estimation, dom: Domain) -> Result<f64, MetricsError> {
    if dom.ub <= dom.lb {
        return Err(MetricsError::DegenerateDomain { lb: dom.lb, ub: dom.ub });
    }
    let ratio = (est.hi - est.lo).abs() as f64 / (dom.ub - dom.lb).abs() as f64;
    Ok((1.0 - ratio) * 100.0)
}

/// Baseline upper bound halfway between the optimum and the first solution
/// of an unbounded run: `z_opt + floor((z_first - z_opt) / 2)`.
pub fn fixed_boundary(z_opt: i64, z_first: i64) -> Result<i64, MetricsError> {
    if z_first < z_opt {
        return Err(MetricsError::FirstBelowOptimum { z_first, z_opt });
    }
    Ok(z_opt + (z_first - z_opt) / 2)
}

/// Search-effort scale used by the time-ratio metrics. Node counts are
/// deterministic for a fixed config and keep reports byte-identical across
/// reruns; wall time is available for interactive use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffortMeasure {
    Nodes,
    WallTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverComparison {
    pub equivalent_solution_time: MetricValue,
    pub quality_of_first: MetricValue,
    pub time_to_completion: MetricValue,
}

fn effort_of(record_nodes: u64, record_secs: f64, measure: EffortMeasure) -> f64 {
    match measure {
        EffortMeasure::Nodes => record_nodes as f64,
        EffortMeasure::WallTime => record_secs,
    }
}

/// Compares a bounded run against the unbounded run of the same instance.
///
/// Equivalent solution time: `(t_original - t_bounds) / t_original * 100`
/// where `t_original` is when the unbounded run first reached a solution at
/// least as good as the bounded run's first, and `t_bounds` is the bounded
/// run's first-solution effort. Quality of first:
/// `(1 - z_bounds / z_original) * 100` over first objectives. Time to
/// completion: the same time ratio over total effort, defined only when both
/// runs completed. Positive always means the bounded run is better.
pub fn solver_comparison(
    bounded: &SolveOutcome,
    unbounded: &SolveOutcome,
    measure: EffortMeasure,
) -> SolverComparison {
    let first_b = bounded.solution_log.first();
    let first_o = unbounded.solution_log.first();

    let est = match (first_b, first_o) {
        (Some(fb), Some(_)) => {
            let reached = unbounded
                .solution_log
                .iter()
                .find(|r| r.objective <= fb.objective);
            match reached {
                Some(r) => {
                    let t_o = effort_of(r.nodes, r.wall_time.as_secs_f64(), measure);
                    let t_b = effort_of(fb.nodes, fb.wall_time.as_secs_f64(), measure);
                    if t_o > 0.0 {
                        MetricValue::Defined((t_o - t_b) / t_o * 100.0)
                    } else {
                        MetricValue::Undefined
                    }
                }
                None => MetricValue::Undefined,
            }
        }
        _ => MetricValue::Undefined,
    };

    let qof = match (first_b, first_o) {
        (Some(fb), Some(fo)) if fo.objective != 0 => MetricValue::Defined(
            (1.0 - fb.objective as f64 / fo.objective as f64) * 100.0,
        ),
        _ => MetricValue::Undefined,
    };

    let ttc = if bounded.verdict == Verdict::Optimal && unbounded.verdict == Verdict::Optimal {
        let t_b = effort_of(bounded.nodes_explored, bounded.wall_time.as_secs_f64(), measure);
        let t_o = effort_of(unbounded.nodes_explored, unbounded.wall_time.as_secs_f64(), measure);
        if t_o > 0.0 {
            MetricValue::Defined((t_o - t_b) / t_o * 100.0)
        } else {
            MetricValue::Undefined
        }
    } else {
        MetricValue::Undefined
    };

    SolverComparison {
        equivalent_solution_time: est,
        quality_of_first: qof,
        time_to_completion: ttc,
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// Median absolute deviation around the median.
pub fn mad(values: &[f64]) -> Option<f64> {
    let m = median(values)?;
    let dev: Vec<f64> = values.iter().map(|v| (v - m).abs()).collect();
    median(&dev)
}

/// Median and MAD over the defined cells of a metric column.
pub fn aggregate(cells: &[MetricValue]) -> (MetricValue, MetricValue) {
    let defined: Vec<f64> = cells.iter().filter_map(MetricValue::defined).collect();
    match (median(&defined), mad(&defined)) {
        (Some(m), Some(d)) => (MetricValue::Defined(m), MetricValue::Defined(d)),
        _ => (MetricValue::Undefined, MetricValue::Undefined),
    }
}

/// One estimator configuration entering the lambda sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub label: String,
    pub kind: EstimatorKind,
    pub loss: LossSpec,
    pub hyper: Hyperparams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub config: String,
    pub lambda: f64,
    /// Median per-repetition share of validation records whose raw cutting
    /// bound (clamped to the objective domain) is at or above the optimum.
    pub admissible_pct: f64,
    /// Median per-repetition share whose integer estimation is two-sided
    /// admissible (lo <= z_opt <= hi).
    pub interval_admissible_pct: f64,
    /// Median per-repetition share of records whose cutting bound strictly
    /// tightens the original domain.
    pub pruned_pct: f64,
    pub median_gap_pct: MetricValue,
    pub median_size_pct: MetricValue,
    pub records: usize,
}

fn cut_admissible(r: &FoldRecord) -> bool {
    let dom = r.objective_domain;
    let clamped = r.raw_hi.clamp(dom.lb as f64, dom.ub as f64);
    clamped >= r.z_opt as f64
}

fn per_repetition_pct(records: &[FoldRecord], pred: &dyn Fn(&FoldRecord) -> bool) -> Vec<f64> {
    let reps: usize = records.iter().map(|r| r.repetition).max().map_or(0, |m| m + 1);
    (0..reps)
        .map(|rep| {
            let of_rep: Vec<&FoldRecord> =
                records.iter().filter(|r| r.repetition == rep).collect();
            let hits = of_rep.iter().filter(|r| pred(r)).count();
            hits as f64 / of_rep.len() as f64 * 100.0
        })
        .collect()
}

/// Builds one sweep row from pooled fold records (possibly across several
/// problem families evaluated with the same repetition structure).
pub fn sweep_row_from_records(config: &str, lambda: f64, records: &[FoldRecord]) -> SweepRow {
    let adm = per_repetition_pct(records, &cut_admissible);
    let interval =
        per_repetition_pct(records, &|r| is_admissible(&r.estimation, r.z_opt));
    let pruned =
        per_repetition_pct(records, &|r| r.estimation.hi < r.objective_domain.ub);
    let gaps: Vec<MetricValue> = records
        .iter()
        .map(|r| gap_metric(&r.estimation, r.z_opt, r.objective_domain))
        .collect();
    let sizes: Vec<MetricValue> = records
        .iter()
        .map(|r| {
            size_metric(&r.estimation, r.objective_domain)
                .map_or(MetricValue::Undefined, MetricValue::Defined)
        })
        .collect();
    SweepRow {
        config: config.to_string(),
        lambda,
        admissible_pct: median(&adm).unwrap_or(0.0),
        interval_admissible_pct: median(&interval).unwrap_or(0.0),
        pruned_pct: median(&pruned).unwrap_or(0.0),
        median_gap_pct: aggregate(&gaps).0,
        median_size_pct: aggregate(&sizes).0,
        records: records.len(),
    }
}

/// Runs repeated k-fold for every (config, lambda) pair on each corpus
/// separately (families have different feature schemas), pools the fold
/// records, and reports median ratios per row.
pub fn lambda_sweep(
    corpora: &[Dataset],
    configs: &[SweepConfig],
    lambdas: &[f64],
    k: usize,
    repetitions: usize,
) -> Result<Vec<SweepRow>, MetricsError> {
    let mut rows = Vec::new();
    for config in configs {
        for &lambda in lambdas {
            let mut pooled: Vec<FoldRecord> = Vec::new();
            for corpus in corpora {
                let mut trainer = crate::pipeline::standard_trainer(
                    config.kind,
                    config.loss,
                    lambda,
                    config.hyper,
                );
                let records = repeated_kfold(corpus, k, repetitions, &mut trainer)
                    .map_err(MetricsError::from)?
                    .map_err(MetricsError::Pipeline)?;
                pooled.extend(records);
            }
            rows.push(sweep_row_from_records(&config.label, lambda, &pooled));
        }
    }
    Ok(rows)
}

/// Aligned-column rendering of a sweep report.
pub fn render_sweep(rows: &[SweepRow]) -> String {
    let fmt_mv = |v: &MetricValue| match v {
        MetricValue::Defined(x) => format!("{x:8.2}"),
        MetricValue::Undefined => format!("{:>8}", "-"),
    };
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7}\n",
        "config", "lambda", "adm%", "int-adm%", "pruned%", "gap%", "size%", "records"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<12} {:>6.1} {:>8.2} {:>8.2} {:>8.2} {} {} {:>7}\n",
            r.config,
            r.lambda,
            r.admissible_pct,
            r.interval_admissible_pct,
            r.pruned_pct,
            fmt_mv(&r.median_gap_pct),
            fmt_mv(&r.median_size_pct),
            r.records
        ));
    }
    out
}
