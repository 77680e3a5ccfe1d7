//! GLM losses on the scalar prediction `theta^T x` with constants derived
//! from data geometry.

use nalgebra::DMatrix;

use super::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Squared,
    Logistic,
    Hinge,
}

impl LossKind {
    /// Per-example loss as a function of the prediction.
    pub fn value(&self, pred: f64, y: f64) -> f64 {
        match self {
            LossKind::Squared => (pred - y) * (pred - y),
            LossKind::Logistic => {
                // log(1 + exp(-y*pred)), stable on both tails
                let m = y * pred;
                if m > 0.0 {
                    (-m).exp().ln_1p()
                } else {
                    -m + m.exp().ln_1p()
                }
            }
            LossKind::Hinge => (1.0 - y * pred).max(0.0),
        }
    }

    /// Derivative (a subgradient at kinks) w.r.t. the prediction.
    pub fn dpred(&self, pred: f64, y: f64) -> f64 {
        match self {
            LossKind::Squared => 2.0 * (pred - y),
            LossKind::Logistic => -y / (1.0 + (y * pred).exp()),
            // 0 is a valid subgradient at the kink; deterministic choice.
            LossKind::Hinge => {
                if y * pred < 1.0 {
                    -y
                } else {
                    0.0
                }
            }
        }
    }
}

/// A loss kind plus the constants the privacy formulas consume.
#[derive(Debug, Clone, Copy)]
pub struct LossModel {
    pub kind: LossKind,
    /// Lipschitz constant of the per-example loss in the scalar prediction;
    /// multiply by R2 for the Lipschitz constant in theta. For the squared
    /// loss this assumes the iterate stays within the domain bound.
    pub lipschitz: f64,
    /// Strong convexity of the mean empirical loss in theta; 0 when absent.
    pub strong_convexity: f64,
    /// Upper bound on the per-example second derivative in the prediction;
    /// infinite for the hinge.
    pub smoothness: f64,
}

impl LossModel {
    pub fn for_data(kind: LossKind, data: &Dataset, domain_bound: f64) -> Result<Self> {
        if domain_bound <= 0.0 || !domain_bound.is_finite() {
            return Err(Error::invalid("domain bound must be positive and finite"));
        }
        let ymax = data.max_abs_y();
        let lipschitz = match kind {
            LossKind::Squared => 2.0 * (domain_bound * data.r2() + ymax),
            LossKind::Logistic | LossKind::Hinge => ymax,
        };
        if lipschitz <= 0.0 {
            return Err(Error::invalid(
                "loss has zero Lipschitz constant on this data (all-zero labels?)",
            ));
        }
        let strong_convexity = match kind {
            // Mean squared loss has Hessian 2 X^T X / n everywhere.
            LossKind::Squared => 2.0 * min_eigenvalue_xtx_over_n(data),
            LossKind::Logistic | LossKind::Hinge => 0.0,
        };
        let smoothness = match kind {
            LossKind::Squared => 2.0,
            LossKind::Logistic => 0.25 * ymax * ymax,
            LossKind::Hinge => f64::INFINITY,
        };
        Ok(LossModel { kind, lipschitz, strong_convexity, smoothness })
    }

    pub fn value(&self, pred: f64, y: f64) -> f64 {
        self.kind.value(pred, y)
    }

    pub fn dpred(&self, pred: f64, y: f64) -> f64 {
        self.kind.dpred(pred, y)
    }
}

fn min_eigenvalue_xtx_over_n(data: &Dataset) -> f64 {
    let (n, p) = (data.n(), data.dim());
    let mut m = DMatrix::<f64>::zeros(p, p);
    for i in 0..n {
        let row = data.x_row(i);
        for a in 0..p {
            for b in 0..p {
                m[(a, b)] += row[a] * row[b];
            }
        }
    }
    m /= n as f64;
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v))
        .max(0.0)
}
