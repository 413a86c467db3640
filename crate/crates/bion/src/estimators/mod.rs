//! Regression models for objective-boundary estimation. An [`Estimator`]
//! pairs two trained models: one shifted towards overestimation for the upper
//! (cutting) bound and a mirrored companion shifted towards underestimation
//! for the lower (limiting) bound.

pub mod gtb;
pub mod knn;
pub mod linear;
pub mod loss;
pub mod mlp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gtb::{GtbModel, GtbParams};
pub use knn::{KnnModel, KnnWeighting};
pub use linear::LinearModel;
pub use loss::{loss, loss_gradient, shift_label, LabelShift, LossSpec, ShiftDirection};
pub use mlp::{MlpModel, MlpParams};

use crate::cop::{CopInstance, Domain};
use crate::features::{apply_recipe, FeatureVector, PreprocessRecipe};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("empty training set")]
    EmptyDataset,
    #[error("feature vectors do not share one schema")]
    MixedSchemas,
    #[error("linear regression supports the squared error loss only")]
    UnsupportedLoss,
    #[error(transparent)]
    Label(#[from] loss::LossError),
}

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("schema mismatch: estimator expects {expected}, instance produced {got}")]
    Schema { expected: String, got: String },
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Lr,
    Knn,
    Gtb,
    Mlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Linear(LinearModel),
    Knn(KnnModel),
    Gtb(GtbModel),
    Mlp(MlpModel),
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Model::Linear(m) => m.predict(x),
            Model::Knn(m) => m.predict(x),
            Model::Gtb(m) => m.predict(x),
            Model::Mlp(m) => m.predict(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub knn_k: usize,
    pub knn_weighting: KnnWeighting,
    pub gtb: GtbParams,
    pub mlp: MlpParams,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            knn_k: 5,
            knn_weighting: KnnWeighting::Distance,
            gtb: GtbParams::default(),
            mlp: MlpParams::default(),
        }
    }
}

/// Predicted objective interval, clamped into the instance's original
/// objective domain and ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimation {
    pub lo: i64,
    pub hi: i64,
}

/// A trained boundary estimator: upper and lower models plus the
/// preprocessing recipe they were fit with. Serializes round-trip bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimator {
    pub version: u32,
    pub kind: EstimatorKind,
    pub loss: LossSpec,
    pub lambda: f64,
    pub upper: Model,
    pub lower: Model,
    pub recipe: PreprocessRecipe,
}

pub const ESTIMATOR_FORMAT_VERSION: u32 = 1;

/// One training example: preprocessed features, optimal objective value, and
/// the instance's original objective domain (needed by label shift).
pub type TrainingExample = (FeatureVector, i64, Domain);

/// Trains a single model: applies `shift` to every target, then fits under
/// `spec`. Linear regression rejects asymmetric losses.
pub fn train(
    kind: EstimatorKind,
    dataset: &[TrainingExample],
    spec: &LossSpec,
    shift: &LabelShift,
    hyper: &Hyperparams,
) -> Result<Model, TrainError> {
    if dataset.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let schema = &dataset[0].0.schema_id;
    if dataset.iter().any(|(fv, _, _)| &fv.schema_id != schema) {
        return Err(TrainError::MixedSchemas);
    }
    let xs: Vec<Vec<f64>> = dataset.iter().map(|(fv, _, _)| fv.values.clone()).collect();
    let ys: Vec<f64> = dataset
        .iter()
        .map(|(_, y, dom)| shift_label(*y, *dom, shift))
        .collect::<Result<_, _>>()?;
    Ok(match kind {
        EstimatorKind::Lr => {
            if !matches!(spec, LossSpec::SquaredError) {
                return Err(TrainError::UnsupportedLoss);
            }
            Model::Linear(linear::fit_ols(&xs, &ys))
        }
        EstimatorKind::Knn => Model::Knn(KnnModel {
            xs,
            ys,
            k: hyper.knn_k,
            weighting: hyper.knn_weighting,
        }),
        EstimatorKind::Gtb => Model::Gtb(gtb::fit_gtb(&xs, &ys, spec, &hyper.gtb)),
        EstimatorKind::Mlp => Model::Mlp(mlp::fit_mlp(&xs, &ys, spec, &hyper.mlp)),
    })
}

/// Trains the upper/lower model pair. The upper model shifts labels towards
/// the domain's upper bound; the companion mirrors both the shift direction
/// and the loss asymmetry.
pub fn train_estimator(
    kind: EstimatorKind,
    dataset: &[TrainingExample],
    spec: &LossSpec,
    lambda: f64,
    hyper: &Hyperparams,
    recipe: PreprocessRecipe,
) -> Result<Estimator, TrainError> {
    let up = LabelShift { lambda, direction: ShiftDirection::Overestimate };
    let down = LabelShift { lambda, direction: ShiftDirection::Underestimate };
    let upper = train(kind, dataset, spec, &up, hyper)?;
    let lower = train(kind, dataset, &spec.mirrored(), &down, hyper)?;
    Ok(Estimator {
        version: ESTIMATOR_FORMAT_VERSION,
        kind,
        loss: *spec,
        lambda,
        upper,
        lower,
        recipe,
    })
}

/// Clamps and orders raw bound predictions: floor for the lower bound, ceil
/// for the upper, so rounding never shrinks the interval.
pub fn estimation_from_raw(raw_lo: f64, raw_hi: f64, dom: Domain) -> Estimation {
    let lo = (raw_lo.floor() as i64).clamp(dom.lb, dom.ub);
    let hi = (raw_hi.ceil() as i64).clamp(dom.lb, dom.ub);
    Estimation { lo: lo.min(hi), hi: lo.max(hi) }
}

pub fn estimate(e: &Estimator, m: &CopInstance) -> Result<Estimation, EstimateError> {
    let fv = apply_recipe(m, &e.recipe)?;
    estimate_from_vector(e, &fv, m.objective_domain())
}

pub fn estimate_from_vector(
    e: &Estimator,
    fv: &FeatureVector,
    dom: Domain,
) -> Result<Estimation, EstimateError> {
    if fv.schema_id != e.recipe.schema_id {
        return Err(EstimateError::Schema {
            expected: e.recipe.schema_id.clone(),
            got: fv.schema_id.clone(),
        });
    }
    Ok(estimation_from_raw(e.lower.predict(&fv.values), e.upper.predict(&fv.values), dom))
}

/// Raw model outputs (lower, upper) before rounding and clamping. Used by
/// estimation-quality sweeps, where integer outward rounding would inflate
/// admissibility on unit-scale objectives.
pub fn predict_bounds_raw(e: &Estimator, fv: &FeatureVector) -> (f64, f64) {
    (e.lower.predict(&fv.values), e.upper.predict(&fv.values))
}

pub fn is_admissible(est: &Estimation, z_opt: i64) -> bool {
    est.lo <= z_opt && z_opt <= est.hi
}

pub fn serialize_estimator(e: &Estimator) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(e).expect("estimator serialization cannot fail");
    out.push(b'\n');
    out
}

pub fn parse_estimator(bytes: &[u8]) -> Result<Estimator, serde_json::Error> {
    serde_json::from_slice(bytes)
}
