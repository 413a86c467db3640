//! Symmetric and shifted (asymmetric) squared error, and the label-shift
//! transform applied to training targets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cop::Domain;

#[derive(Debug, Error)]
pub enum LossError {
    #[error("label {y} outside objective domain {lb}..{ub}")]
    LabelOutsideDomain { y: i64, lb: i64, ub: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    SquaredError,
    /// `L(r) = r^2 * (sgn(r) + a)^2` with residual `r = prediction - target`.
    /// Negative `a` penalizes underestimation more than overestimation.
    ShiftedSquaredError { a: f64 },
}

impl LossSpec {
    /// Mirror for the companion lower-bound model: the shift parameter flips
    /// sign so underestimation becomes the cheap direction.
    pub fn mirrored(&self) -> LossSpec {
        match *self {
            LossSpec::SquaredError => LossSpec::SquaredError,
            LossSpec::ShiftedSquaredError { a } => LossSpec::ShiftedSquaredError { a: -a },
        }
    }
}

fn sgn(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn loss(r: f64, spec: &LossSpec) -> f64 {
    match *spec {
        LossSpec::SquaredError => r * r,
        LossSpec::ShiftedSquaredError { a } => r * r * (sgn(r) + a).powi(2),
    }
}

/// dL/d(prediction); equals dL/dr. Returns 0 at r = 0 by convention.
pub fn loss_gradient(r: f64, spec: &LossSpec) -> f64 {
    match *spec {
        LossSpec::SquaredError => 2.0 * r,
        LossSpec::ShiftedSquaredError { a } => 2.0 * r * (sgn(r) + a).powi(2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDirection {
    Overestimate,
    Underestimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelShift {
    pub lambda: f64,
    pub direction: ShiftDirection,
}

impl LabelShift {
    pub fn none() -> Self {
        LabelShift { lambda: 0.0, direction: ShiftDirection::Overestimate }
    }
}

/// Moves the training target a fraction `lambda` of the way towards the
/// objective domain bound in the shift direction.
pub fn shift_label(y: i64, dom: Domain, shift: &LabelShift) -> Result<f64, LossError> {
    if !dom.contains(y) {
        return Err(LossError::LabelOutsideDomain { y, lb: dom.lb, ub: dom.ub });
    }
    let y = y as f64;
    Ok(match shift.direction {
        ShiftDirection::Overestimate => y + shift.lambda * (dom.ub as f64 - y),
        ShiftDirection::Underestimate => y - shift.lambda * (y - dom.lb as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ASYM: LossSpec = LossSpec::ShiftedSquaredError { a: -0.8 };

    #[test]
    fn tabulated_asymmetric_values() {
        assert!((loss(-1.0, &ASYM) - 3.24).abs() < 1e-12);
        assert!((loss(1.0, &ASYM) - 0.04).abs() < 1e-12);
    }

    #[test]
    fn zero_residual_zero_loss() {
        assert_eq!(loss(0.0, &ASYM), 0.0);
        assert_eq!(loss(0.0, &LossSpec::SquaredError), 0.0);
    }

    #[test]
    fn squared_error_basics() {
        assert_eq!(loss(2.0, &LossSpec::SquaredError), 4.0);
        assert_eq!(loss_gradient(0.0, &ASYM), 0.0);
        assert!((loss_gradient(1.0, &ASYM) - 0.08).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let h = 1e-5;
        for spec in [LossSpec::SquaredError, ASYM, LossSpec::ShiftedSquaredError { a: -1.0 }] {
            for r in [-3.0, -1.0, -0.1, 0.1, 1.0, 3.0] {
                let fd = (loss(r + h, &spec) - loss(r - h, &spec)) / (2.0 * h);
                assert!(
                    (fd - loss_gradient(r, &spec)).abs() < 1e-6,
                    "r={r} spec={spec:?}"
                );
            }
        }
    }

    #[test]
    fn asymmetry_law() {
        // for all r > 0 and a < 0: loss(-r) > loss(r)
        for a in [-0.2, -0.8, -1.0, -1.5] {
            let spec = LossSpec::ShiftedSquaredError { a };
            for r in [0.1, 0.5, 1.0, 2.5, 10.0] {
                assert!(loss(-r, &spec) > loss(r, &spec), "r={r} a={a}");
            }
        }
    }

    #[test]
    fn shift_formula_and_saturation() {
        let dom = Domain { lb: 0, ub: 100 };
        let over = |l| LabelShift { lambda: l, direction: ShiftDirection::Overestimate };
        assert_eq!(shift_label(20, dom, &over(0.2)).unwrap(), 36.0);
        assert_eq!(shift_label(20, dom, &over(0.0)).unwrap(), 20.0);
        assert_eq!(shift_label(20, dom, &over(1.0)).unwrap(), 100.0);
        let under = LabelShift { lambda: 1.0, direction: ShiftDirection::Underestimate };
        assert_eq!(shift_label(20, dom, &under).unwrap(), 0.0);
    }

    #[test]
    fn shift_is_monotone_in_lambda() {
        let dom = Domain { lb: 0, ub: 50 };
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=10 {
            let shift = LabelShift {
                lambda: i as f64 / 10.0,
                direction: ShiftDirection::Overestimate,
            };
            let v = shift_label(17, dom, &shift).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn out_of_domain_label_rejected() {
        let dom = Domain { lb: 0, ub: 10 };
        assert!(shift_label(11, dom, &LabelShift::none()).is_err());
    }
}
