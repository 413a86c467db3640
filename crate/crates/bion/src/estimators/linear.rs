//! Ordinary least squares with a small ridge fallback when the normal
//! equations are singular.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// Fits by solving the normal equations over [1, x] columns. A singular
/// system falls back to ridge with penalty 1e-8.
pub fn fit_ols(xs: &[Vec<f64>], ys: &[f64]) -> LinearModel {
    let d = xs[0].len() + 1; // intercept column first
    let mut ata = vec![vec![0.0; d]; d];
    let mut atb = vec![0.0; d];
    for (x, &y) in xs.iter().zip(ys) {
        let row: Vec<f64> = std::iter::once(1.0).chain(x.iter().copied()).collect();
        for i in 0..d {
            for j in 0..d {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let coeffs = solve_spd(ata.clone(), atb.clone()).unwrap_or_else(|| {
        let mut ridge = ata;
        for (i, row) in ridge.iter_mut().enumerate() {
            row[i] += 1e-8;
        }
        solve_spd(ridge, atb).expect("ridge-regularized system is nonsingular")
    });
    LinearModel { intercept: coeffs[0], weights: coeffs[1..].to_vec() }
}

// Gaussian elimination with partial pivoting; None when singular.
fn solve_spd(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_fit() {
        let xs = vec![vec![0.0], vec![1.0], vec![2.0]];
        let ys = vec![0.0, 1.0, 2.0];
        let m = fit_ols(&xs, &ys);
        assert!((m.weights[0] - 1.0).abs() < 1e-9);
        assert!(m.intercept.abs() < 1e-9);
    }

    #[test]
    fn duplicated_feature_survives_via_ridge() {
        // two identical columns make the normal equations singular
        let xs = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let ys = vec![0.0, 2.0, 4.0, 6.0];
        let m = fit_ols(&xs, &ys);
        for (x, &y) in xs.iter().zip(&ys) {
            assert!((m.predict(x) - y).abs() < 1e-4);
        }
    }
}
