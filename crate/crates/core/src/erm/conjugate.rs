//! Convex conjugate of the mean empirical loss, with the maximizing point.
//!
//! The conjugate is the workhorse of the dual solver: its value gives the
//! dual objective and its maximizer is the gradient map back to the primal.
//! Squared loss is closed-form through the normal equations; logistic uses a
//! damped Newton inner solve. The hinge has no strongly convex structure to
//! exploit and is refused.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::data::Dataset;
use super::loss::{LossKind, LossModel};
use super::problem::dot;
use crate::error::{Error, Result};

const RIDGE_FACTOR: f64 = 1e-8;
const NEWTON_GRAD_TOL: f64 = 1e-10;
const NEWTON_MAX_ITERS: usize = 500;

enum Backend {
    Squared {
        factor: Cholesky<f64, Dyn>,
        v: DVector<f64>,
        kappa: f64,
        ridge: f64,
    },
    Logistic {
        data: Dataset,
    },
}

pub struct ConjugateOracle {
    backend: Backend,
    p: usize,
}

impl ConjugateOracle {
    pub fn new(data: &Dataset, loss: &LossModel) -> Result<Self> {
        let p = data.dim();
        match loss.kind {
            LossKind::Squared => {
                let n = data.n() as f64;
                let mut m = DMatrix::<f64>::zeros(p, p);
                let mut v = DVector::<f64>::zeros(p);
                let mut kappa = 0.0;
                for i in 0..data.n() {
                    let row = data.x_row(i);
                    let yi = data.y(i);
                    kappa += yi * yi;
                    for a in 0..p {
                        v[a] += row[a] * yi;
                        for b in 0..p {
                            m[(a, b)] += row[a] * row[b];
                        }
                    }
                }
                m /= n;
                v /= n;
                kappa /= n;
                // Rank-deficient designs get a trace-scaled ridge so the
                // conjugate stays finite.
                let mut ridge = 0.0;
                let factor = match Cholesky::new(m.clone()) {
                    Some(c) => c,
                    None => {
                        ridge = RIDGE_FACTOR * m.trace() / p as f64;
                        let mut mr = m;
                        for i in 0..p {
                            mr[(i, i)] += ridge;
                        }
                        Cholesky::new(mr).ok_or_else(|| {
                            Error::numeric("normal matrix not positive definite even with ridge")
                        })?
                    }
                };
                Ok(ConjugateOracle { backend: Backend::Squared { factor, v, kappa, ridge }, p })
            }
            LossKind::Logistic => {
                Ok(ConjugateOracle { backend: Backend::Logistic { data: data.clone() }, p })
            }
            LossKind::Hinge => Err(Error::capability(
                "conjugate oracle needs a strongly convex loss; hinge is not",
            )),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Ridge added to the normal matrix; 0 for full-rank designs.
    pub fn ridge(&self) -> f64 {
        match &self.backend {
            Backend::Squared { ridge, .. } => *ridge,
            Backend::Logistic { .. } => 0.0,
        }
    }

    /// `sup_theta z^T theta - mean_loss(theta)`, returned with the
    /// maximizing theta.
    pub fn eval(&self, z: &[f64]) -> Result<(f64, Vec<f64>)> {
        if z.len() != self.p || z.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("conjugate argument must be finite of matching length"));
        }
        match &self.backend {
            Backend::Squared { factor, v, kappa, .. } => {
                // theta = (M + ridge I)^{-1} (z + 2v) / 2; value = w^T theta / 2 - kappa
                let mut w = DVector::<f64>::from_column_slice(z);
                w += v * 2.0;
                let theta = factor.solve(&w) * 0.5;
                let value = 0.5 * w.dot(&theta) - kappa;
                Ok((value, theta.as_slice().to_vec()))
            }
            Backend::Logistic { data } => {
                let theta = newton_logistic(data, z)?;
                let value = dot(z, &theta) - mean_logistic(data, &theta);
                Ok((value, theta))
            }
        }
    }
}

fn mean_logistic(data: &Dataset, theta: &[f64]) -> f64 {
    let n = data.n();
    (0..n)
        .map(|i| LossKind::Logistic.value(dot(data.x_row(i), theta), data.y(i)))
        .sum::<f64>()
        / n as f64
}

/// Minimizes `mean_logistic(theta) - z^T theta` by damped Newton to gradient
/// norm 1e-10.
fn newton_logistic(data: &Dataset, z: &[f64]) -> Result<Vec<f64>> {
    let (n, p) = (data.n(), data.dim());
    let nf = n as f64;
    let mut theta = vec![0.0; p];
    let objective = |t: &[f64]| mean_logistic(data, t) - dot(z, t);
    for _ in 0..NEWTON_MAX_ITERS {
        let mut grad = DVector::<f64>::from_column_slice(z);
        grad.neg_mut();
        let mut hess = DMatrix::<f64>::zeros(p, p);
        for i in 0..n {
            let row = data.x_row(i);
            let yi = data.y(i);
            let pred = dot(row, &theta);
            let d = LossKind::Logistic.dpred(pred, yi);
            let m = yi * pred;
            // sigma(m)(1 - sigma(m)) * y^2, computed from the stable side
            let s = 1.0 / (1.0 + m.exp());
            let curv = yi * yi * s * (1.0 - s);
            for a in 0..p {
                grad[a] += d * row[a] / nf;
                for b in 0..p {
                    hess[(a, b)] += curv * row[a] * row[b] / nf;
                }
            }
        }
        if grad.norm() <= NEWTON_GRAD_TOL {
            return Ok(theta);
        }
        for i in 0..p {
            hess[(i, i)] += 1e-12;
        }
        let step = Cholesky::new(hess)
            .ok_or_else(|| Error::numeric("logistic Newton hessian not positive definite"))?
            .solve(&grad);
        // Backtracking keeps the flat tails from overshooting.
        let base = objective(&theta);
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = (0..p).map(|j| theta[j] - t * step[j]).collect();
            let expected = 0.25 * t * grad.dot(&step);
            // Once the predicted decrease is below float resolution the
            // Armijo test can no longer distinguish progress; in that
            // regime the damped Newton step is safe to take as-is.
            if objective(&cand) <= base - expected || expected <= 1e-16 * (1.0 + base.abs()) {
                theta = cand;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::unconverged(
                    "logistic conjugate line search stalled; z may be outside the gradient range",
                ));
            }
        }
    }
    Err(Error::unconverged(format!(
        "logistic conjugate did not reach gradient norm {NEWTON_GRAD_TOL}"
    )))
}

/// One-shot conjugate evaluation; builds the oracle and evaluates once.
pub fn fenchel_conjugate(
    data: &Dataset,
    loss: &LossModel,
    z: &[f64],
) -> Result<(f64, Vec<f64>)> {
    ConjugateOracle::new(data, loss)?.eval(z)
}
