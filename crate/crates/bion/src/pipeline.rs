//! Boundary-constrained solving with unsatisfiable fallback, corpus building
//! from solved instances, deterministic train/dev/test splits, and the
//! repeated k-fold evaluation harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cop::{post_boundary_constraint, CopInstance, Domain, ModelError};
use crate::estimators::{estimate, Estimation, EstimateError, Estimator};
use crate::features::{raw_features, FeatureMap};
use crate::solver::{solve, SolveOutcome, SolverConfig, Verdict};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
    #[error("k-fold needs k >= 2 and at least k entries (k {k}, entries {entries})")]
    InsufficientData { k: usize, entries: usize },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
    #[error(transparent)]
    Train(#[from] crate::estimators::TrainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Dev,
    Test,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub instance: CopInstance,
    pub raw_features: FeatureMap,
    /// Solver-verified optimum of the instance.
    pub optimum: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
    pub splits: Vec<Split>,
    pub seed: u64,
}

impl Dataset {
    pub fn indices_with_split(&self, s: Split) -> Vec<usize> {
        self.splits
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == s)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Why an instance was left out of a corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedInstance {
    pub name: String,
    pub verdict: Verdict,
}

/// Solves every instance to optimality without boundary constraints and
/// records (instance, raw features, optimum). Timeouts and unsatisfiable
/// instances are excluded and reported, never silently dropped. Duplicates
/// are kept as-is.
pub fn build_corpus(
    instances: &[CopInstance],
    cfg: &SolverConfig,
    seed: u64,
) -> (Dataset, Vec<SkippedInstance>) {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for m in instances {
        let out = solve(m, cfg);
        match out.verdict {
            Verdict::Optimal => entries.push(DatasetEntry {
                instance: m.clone(),
                raw_features: raw_features(m),
                optimum: out.best_objective.expect("optimal outcome has an objective"),
            }),
            v => skipped.push(SkippedInstance { name: m.name.clone(), verdict: v }),
        }
    }
    let splits = vec![Split::Train; entries.len()];
    (Dataset { entries, splits, seed }, skipped)
}

/// Reassigns splits by seeded shuffle with largest-remainder sizing
/// (train, dev, test fractions; default 80/10/10).
pub fn split_dataset(
    d: &Dataset,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<Dataset, PipelineError> {
    let (ft, fd, fs) = fractions;
    if ft < 0.0 || fd < 0.0 || fs < 0.0 {
        return Err(PipelineError::InvalidFractions("negative fraction".into()));
    }
    if ((ft + fd + fs) - 1.0).abs() > 1e-9 {
        return Err(PipelineError::InvalidFractions(format!("sum {} != 1", ft + fd + fs)));
    }
    let n = d.entries.len();
    let sizes = largest_remainder(n, &[ft, fd, fs]);
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, seed);
    let mut splits = vec![Split::Train; n];
    for (pos, &i) in order.iter().enumerate() {
        splits[i] = if pos < sizes[0] {
            Split::Train
        } else if pos < sizes[0] + sizes[1] {
            Split::Dev
        } else {
            Split::Test
        };
    }
    Ok(Dataset { entries: d.entries.clone(), splits, seed })
}

/// Integer sizes summing to `n`, proportional to `fractions`, remainders
/// going to the largest fractional parts (ties by position).
pub fn largest_remainder(n: usize, fractions: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in 0..(n - assigned) {
        sizes[order[i % order.len()]] += 1;
    }
    sizes
}

fn shuffle(order: &mut [usize], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
}

/// One validation-fold evaluation record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldRecord {
    pub repetition: usize,
    pub fold: usize,
    pub entry_index: usize,
    pub estimation: Estimation,
    /// Raw (unrounded, unclamped) model outputs behind the estimation.
    pub raw_lo: f64,
    pub raw_hi: f64,
    pub z_opt: i64,
    pub objective_domain: Domain,
}

/// Repeated k-fold validation: each repetition reshuffles (seeded from the
/// dataset seed and repetition index), partitions into k folds, and calls
/// `trainer` with the training indices only. The trainer owns recipe fitting,
/// so no validation data can leak into preprocessing.
pub fn repeated_kfold<E>(
    d: &Dataset,
    k: usize,
    repetitions: usize,
    trainer: &mut dyn FnMut(&Dataset, &[usize]) -> Result<Estimator, E>,
) -> Result<Result<Vec<FoldRecord>, E>, PipelineError> {
    let n = d.entries.len();
    if k < 2 || n < k {
        return Err(PipelineError::InsufficientData { k, entries: n });
    }
    let mut records = Vec::new();
    for rep in 0..repetitions {
        let mut order: Vec<usize> = (0..n).collect();
        shuffle(&mut order, d.seed ^ crate::generate::derive_seed(d.seed, rep + 1));
        for fold in 0..k {
            // fold f takes positions f, f+k, f+2k, ... so sizes differ by <= 1
            let (val, train): (Vec<(usize, usize)>, Vec<(usize, usize)>) = order
                .iter()
                .enumerate()
                .map(|(pos, &i)| (pos % k, i))
                .partition(|&(pos_mod, _)| pos_mod == fold);
            let val: Vec<usize> = val.into_iter().map(|(_, i)| i).collect();
            let train: Vec<usize> = train.into_iter().map(|(_, i)| i).collect();
            let estimator = match trainer(d, &train) {
                Ok(e) => e,
                Err(e) => return Ok(Err(e)),
            };
            for &i in &val {
                let entry = &d.entries[i];
                let dom = entry.instance.objective_domain();
                let fv = crate::features::apply_recipe_to_map(
                    &entry.raw_features,
                    &estimator.recipe,
                )
                .map_err(EstimateError::from)?;
                let estimation =
                    crate::estimators::estimate_from_vector(&estimator, &fv, dom)?;
                let (raw_lo, raw_hi) = crate::estimators::predict_bounds_raw(&estimator, &fv);
                records.push(FoldRecord {
                    repetition: rep,
                    fold,
                    entry_index: i,
                    estimation,
                    raw_lo,
                    raw_hi,
                    z_opt: entry.optimum,
                    objective_domain: dom,
                });
            }
        }
    }
    Ok(Ok(records))
}

/// The conventional trainer closure for k-fold runs and the CLI: fits the
/// preprocessing recipe on the given training indices only, then trains the
/// upper/lower estimator pair.
pub fn standard_trainer(
    kind: crate::estimators::EstimatorKind,
    loss: crate::estimators::LossSpec,
    lambda: f64,
    hyper: crate::estimators::Hyperparams,
) -> impl FnMut(&Dataset, &[usize]) -> Result<Estimator, PipelineError> {
    move |d: &Dataset, train_idx: &[usize]| {
        let maps: Vec<FeatureMap> =
            train_idx.iter().map(|&i| d.entries[i].raw_features.clone()).collect();
        let recipe = crate::features::fit_recipe_from_maps(
            &maps,
            crate::features::ScalingMode::Standardize,
            0.0,
        )?;
        let examples: Vec<crate::estimators::TrainingExample> = train_idx
            .iter()
            .map(|&i| {
                let e = &d.entries[i];
                let fv = crate::features::apply_recipe_to_map(&e.raw_features, &recipe)?;
                Ok((fv, e.optimum, e.instance.objective_domain()))
            })
            .collect::<Result<_, crate::features::FeatureError>>()?;
        Ok(crate::estimators::train_estimator(kind, &examples, &loss, lambda, &hyper, recipe)?)
    }
}

/// Which estimated bounds are posted before solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    Both,
    Upper,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackReason {
    UnsatisfiableUnderBounds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BionResult {
    pub outcome: SolveOutcome,
    pub estimation: Estimation,
    pub fallback_used: bool,
    pub fallback_reason: Option<FallbackReason>,
}

/// Estimates objective bounds, posts them as hard constraints, and solves.
/// An unsatisfiable bounded solve retries once above the failed upper bound;
/// if that is also unsatisfiable, the instance is genuinely unsatisfiable.
pub fn solve_with_bion(
    m: &CopInstance,
    e: &Estimator,
    cfg: &SolverConfig,
) -> Result<BionResult, PipelineError> {
    solve_with_bion_mode(m, e, cfg, BoundsMode::Both)
}

pub fn solve_with_bion_mode(
    m: &CopInstance,
    e: &Estimator,
    cfg: &SolverConfig,
    mode: BoundsMode,
) -> Result<BionResult, PipelineError> {
    let estimation = estimate(e, m)?;
    solve_with_estimation(m, estimation, cfg, mode)
}

/// The solving half of the process, reusable with a precomputed estimation.
pub fn solve_with_estimation(
    m: &CopInstance,
    estimation: Estimation,
    cfg: &SolverConfig,
    mode: BoundsMode,
) -> Result<BionResult, PipelineError> {
    let dom = m.objective_domain();
    let (lo, hi) = match mode {
        BoundsMode::Both => (estimation.lo, estimation.hi),
        BoundsMode::Upper => (dom.lb, estimation.hi),
        BoundsMode::None => (dom.lb, dom.ub),
    };
    let bounded = post_boundary_constraint(m, lo, hi, false)?;
    let outcome = solve(&bounded, cfg);
    if outcome.verdict != Verdict::Unsatisfiable {
        // A solution sitting exactly on the posted limiting bound may have
        // been forced up to it by an overestimated lower bound; verify by
        // searching the region below before trusting it.
        if outcome.verdict == Verdict::Optimal && lo > dom.lb && outcome.best_objective == Some(lo)
        {
            let below = post_boundary_constraint(m, dom.lb, lo - 1, false)?;
            let mut check = solve(&below, cfg);
            if check.verdict == Verdict::Optimal && check.best_objective.is_some_and(|z| z < lo) {
                check.nodes_explored += outcome.nodes_explored;
                check.wall_time += outcome.wall_time;
                return Ok(BionResult {
                    outcome: check,
                    estimation,
                    fallback_used: false,
                    fallback_reason: None,
                });
            }
            let mut outcome = outcome;
            outcome.nodes_explored += check.nodes_explored;
            outcome.wall_time += check.wall_time;
            return Ok(BionResult {
                outcome,
                estimation,
                fallback_used: false,
                fallback_reason: None,
            });
        }
        return Ok(BionResult { outcome, estimation, fallback_used: false, fallback_reason: None });
    }
    let negated = post_boundary_constraint(m, lo, hi, true)?;
    let outcome = solve(&negated, cfg);
    Ok(BionResult {
        outcome,
        estimation,
        fallback_used: true,
        fallback_reason: Some(FallbackReason::UnsatisfiableUnderBounds),
    })
}
