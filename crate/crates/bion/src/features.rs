//! Instance feature extraction: 9 descriptive statistics per parameter array,
//! scalar parameters verbatim, and static model features, plus the fitted
//! preprocessing recipe (zero-variance removal and scaling) that is persisted
//! with every estimator and replayed verbatim on new instances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cop::CopInstance;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("recipe fitting needs at least 2 instances, got {0}")]
    TooFewInstances(usize),
    #[error("no feature varies across the fitting corpus")]
    NoInformativeFeatures,
    #[error("schema mismatch: instance is missing feature {0}")]
    SchemaMismatch(String),
}

pub type FeatureMap = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    Standardize,
    MinMax,
}

/// Per-feature scaling parameters learned from the training set only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessRecipe {
    pub kept_features: Vec<String>,
    pub mode: ScalingMode,
    /// Standardize: (mean, std). MinMax: (min, max).
    pub scale_params: Vec<(f64, f64)>,
    pub schema_id: String,
}

/// The 9 per-array statistics, in their fixed suffix order.
const ARRAY_STATS: [&str; 9] =
    ["count", "min", "max", "mean", "median", "std", "iqr", "skewness", "kurtosis"];

/// Quantile by linear interpolation between closest ranks: position p*(n-1).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n as f64 - 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// The 9 descriptive statistics of one integer array. Population standard
/// deviation; skewness and kurtosis (excess) are 0 for constant arrays.
pub fn array_stats(data: &[i64]) -> [f64; 9] {
    let n = data.len() as f64;
    let vals: Vec<f64> = data.iter().map(|&v| v as f64).collect();
    let mut sorted = vals.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = vals.iter().sum::<f64>() / n;
    let m2 = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = m2.sqrt();
    let (skew, kurt) = if m2 == 0.0 {
        (0.0, 0.0)
    } else {
        let m3 = vals.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        let m4 = vals.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };
    [
        n,
        sorted[0],
        sorted[sorted.len() - 1],
        mean,
        quantile(&sorted, 0.5),
        std,
        quantile(&sorted, 0.75) - quantile(&sorted, 0.25),
        skew,
        kurt,
    ]
}

/// Extracts the full named feature map: per-array statistics (prefixed with
/// the array name), scalar params verbatim, and static model features.
pub fn raw_features(m: &CopInstance) -> FeatureMap {
    let mut out = FeatureMap::new();
    for (name, arr) in &m.params.arrays {
        for (stat, value) in ARRAY_STATS.iter().zip(array_stats(arr)) {
            out.insert(format!("param_{name}_{stat}"), value);
        }
    }
    for (name, &value) in &m.params.scalars {
        out.insert(format!("param_{name}"), value as f64);
    }

    let nv = m.variables.len() as f64;
    let nc = m.constraints.len() as f64;
    out.insert("model_var_count".into(), nv);
    out.insert("model_constraint_count".into(), nc);
    for kind in ["linear_le", "linear_eq", "max_of", "disjunction"] {
        let count = m.constraints.iter().filter(|c| c.kind_name() == kind).count();
        out.insert(format!("model_count_{kind}"), count as f64);
    }
    out.insert("model_nv_nc_ratio".into(), if nc > 0.0 { nv / nc } else { 0.0 });
    out.insert("model_nc_nv_ratio".into(), if nv > 0.0 { nc / nv } else { 0.0 });

    let sizes: Vec<f64> = m.variables.iter().map(|v| v.domain().size() as f64).collect();
    let total: f64 = sizes.iter().sum();
    out.insert("model_domain_size_sum".into(), total);
    out.insert("model_domain_size_min".into(), sizes.iter().cloned().fold(f64::INFINITY, f64::min));
    out.insert(
        "model_domain_size_max".into(),
        sizes.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    out.insert("model_domain_size_mean".into(), total / nv);

    let obj_size = m.objective_domain().size() as f64;
    let degree = m
        .constraints
        .iter()
        .filter(|c| c.referenced_vars().contains(&m.objective.as_str()))
        .count() as f64;
    out.insert("obj_domain_size".into(), obj_size);
    out.insert("obj_degree".into(), degree);
    out.insert("obj_domain_degree_ratio".into(), if degree > 0.0 { obj_size / degree } else { 0.0 });
    out
}

fn schema_hash(names: &[String]) -> String {
    let mut h = Sha256::new();
    for n in names {
        h.update(n.as_bytes());
        h.update([0]);
    }
    hex_prefix(&h.finalize(), 16)
}

fn hex_prefix(bytes: &[u8], len: usize) -> String {
    bytes.iter().take(len / 2).map(|b| format!("{b:02x}")).collect()
}

/// Fits a preprocessing recipe over the training instances only: drops
/// features with variance <= `variance_eps` (default 0), then records the
/// scaling parameters of the kept features.
pub fn fit_recipe(
    instances: &[CopInstance],
    mode: ScalingMode,
    variance_eps: f64,
) -> Result<PreprocessRecipe, FeatureError> {
    let maps: Vec<FeatureMap> = instances.iter().map(raw_features).collect();
    fit_recipe_from_maps(&maps, mode, variance_eps)
}

/// Same as [`fit_recipe`] but over precomputed raw feature maps.
pub fn fit_recipe_from_maps(
    maps: &[FeatureMap],
    mode: ScalingMode,
    variance_eps: f64,
) -> Result<PreprocessRecipe, FeatureError> {
    if maps.len() < 2 {
        return Err(FeatureError::TooFewInstances(maps.len()));
    }
    let n = maps.len() as f64;
    let mut kept = Vec::new();
    let mut scale_params = Vec::new();
    for name in maps[0].keys() {
        let col: Vec<f64> = maps.iter().map(|m| m[name]).collect();
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        // an exactly constant column can still yield a tiny nonzero variance
        // from summation rounding; treat it as uninformative regardless
        if var <= variance_eps || lo == hi {
            continue;
        }
        let params = match mode {
            ScalingMode::Standardize => (mean, var.sqrt()),
            ScalingMode::MinMax => (
                col.iter().cloned().fold(f64::INFINITY, f64::min),
                col.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ),
        };
        kept.push(name.clone());
        scale_params.push(params);
    }
    if kept.is_empty() {
        return Err(FeatureError::NoInformativeFeatures);
    }
    let schema_id = schema_hash(&kept);
    Ok(PreprocessRecipe { kept_features: kept, mode, scale_params, schema_id })
}

/// Applies a fitted recipe to one instance, always with the recipe's stored
/// scaling parameters.
pub fn apply_recipe(m: &CopInstance, r: &PreprocessRecipe) -> Result<FeatureVector, FeatureError> {
    apply_recipe_to_map(&raw_features(m), r)
}

pub fn apply_recipe_to_map(
    raw: &FeatureMap,
    r: &PreprocessRecipe,
) -> Result<FeatureVector, FeatureError> {
    let mut values = Vec::with_capacity(r.kept_features.len());
    for (name, &(p0, p1)) in r.kept_features.iter().zip(&r.scale_params) {
        let &v = raw.get(name).ok_or_else(|| FeatureError::SchemaMismatch(name.clone()))?;
        let scaled = match r.mode {
            ScalingMode::Standardize => (v - p0) / p1,
            ScalingMode::MinMax => (v - p0) / (p1 - p0),
        };
        values.push(scaled);
    }
    Ok(FeatureVector { values, schema_id: r.schema_id.clone() })
}
