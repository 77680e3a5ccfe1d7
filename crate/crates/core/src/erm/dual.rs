//! The dual problem over the scaled symmetric polyhedron.
//!
//! `K = (lambda/n) |P|(F)`; the dual objective is the negated conjugate of
//! the mean loss at `-s`. All vectors stored here live in `K` (the scale is
//! already applied).

use super::conjugate::ConjugateOracle;
use super::problem::{dot, ErmProblem};
use crate::error::{Error, Result};
use crate::submodular::{
    enumerate_vertices, gaussian_width_mc, membership_max_violation, WidthEstimate,
};

const FEASIBILITY_TOL: f64 = 1e-9;

pub struct DualProblem<'a> {
    prob: &'a ErmProblem,
    conj: ConjugateOracle,
    k_scale: f64,
    vertices: Vec<Vec<f64>>,
    gamma_k: f64,
    width: WidthEstimate,
}

impl<'a> DualProblem<'a> {
    /// Enumerates the scaled vertex set, measures its diameter exactly, and
    /// estimates the Gaussian width by Monte Carlo with the given budget.
    pub fn build(prob: &'a ErmProblem, width_samples: usize, width_seed: u64) -> Result<Self> {
        let conj = ConjugateOracle::new(prob.data(), prob.loss())?;
        let k_scale = prob.lambda_over_n();
        let mut vertices = enumerate_vertices(prob.f())?;
        for v in &mut vertices {
            for x in v.iter_mut() {
                *x *= k_scale;
            }
        }
        let mut gamma_k = 0.0_f64;
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                let d2: f64 = vertices[i]
                    .iter()
                    .zip(&vertices[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                gamma_k = gamma_k.max(d2);
            }
        }
        gamma_k = gamma_k.sqrt();
        let width = gaussian_width_mc(prob.f(), width_samples, width_seed)?;
        Ok(DualProblem { prob, conj, k_scale, vertices, gamma_k, width })
    }

    pub fn problem(&self) -> &ErmProblem {
        self.prob
    }

    pub fn conjugate(&self) -> &ConjugateOracle {
        &self.conj
    }

    pub fn k_scale(&self) -> f64 {
        self.k_scale
    }

    /// Extreme points of K, scale already applied.
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Exact diameter of the enumerated vertex set.
    pub fn gamma_k(&self) -> f64 {
        self.gamma_k
    }

    /// Gaussian width of K; the width scales linearly with K.
    pub fn g_k(&self) -> f64 {
        self.k_scale * self.width.mean
    }

    /// Width estimate of the unscaled polyhedron, with its error bar.
    pub fn width_estimate(&self) -> &WidthEstimate {
        &self.width
    }

    /// `-conjugate(-s)`; rejects points outside K, reporting the most
    /// violated constraint.
    pub fn dual_objective(&self, s: &[f64]) -> Result<f64> {
        if s.len() != self.prob.p() {
            return Err(Error::invalid("dual point has wrong dimension"));
        }
        let unscaled: Vec<f64> = s.iter().map(|v| v / self.k_scale).collect();
        let (violation, mask) = membership_max_violation(self.prob.f(), &unscaled)?;
        if violation > FEASIBILITY_TOL {
            return Err(Error::invalid(format!(
                "dual point infeasible: |s|(A) - F(A) = {violation:.3e} at subset mask {mask:#b} (after unscaling)"
            )));
        }
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        Ok(-self.conj.eval(&neg)?.0)
    }

    /// The primal point induced by a dual point: the maximizer inside the
    /// conjugate at `-s`, i.e. `argmin_theta mean_loss(theta) + s^T theta`.
    pub fn primal_from_dual(&self, s: &[f64]) -> Result<Vec<f64>> {
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        Ok(self.conj.eval(&neg)?.1)
    }

    /// L1-Lipschitz constant of the conjugate over K for the squared loss:
    /// the gradient map is affine in s, so its sup-norm peaks at a vertex.
    pub fn l1_lipschitz_bound(&self) -> Result<f64> {
        if !matches!(self.prob.loss().kind, crate::erm::LossKind::Squared) {
            return Err(Error::capability(
                "conjugate gradient bound is only exact for the squared loss; pass the constant explicitly",
            ));
        }
        let mut bound = 0.0_f64;
        for v in &self.vertices {
            let theta = self.primal_from_dual(v)?;
            let linf = theta.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
            bound = bound.max(linf);
        }
        Ok(bound)
    }

    /// Frank-Wolfe gap at s: the best linear improvement over K.
    pub(crate) fn fw_gap(&self, s: &[f64], theta: &[f64]) -> Result<f64> {
        let support = self.k_scale * crate::submodular::omega_inf(self.prob.f(), theta)?;
        let raw = support - dot(s, theta);
        let scale = 1.0 + support.abs() + dot(s, theta).abs();
        if raw < -1e-9 * scale {
            return Err(Error::numeric(format!(
                "negative Frank-Wolfe gap {raw:.3e}: dual point outside K?"
            )));
        }
        Ok(raw.max(0.0))
    }
}

/// Feasibility-checked dual objective.
pub fn dual_objective(dp: &DualProblem, s: &[f64]) -> Result<f64> {
    dp.dual_objective(s)
}

/// Primal point recovered from a dual point.
pub fn primal_from_dual(dp: &DualProblem, s: &[f64]) -> Result<Vec<f64>> {
    dp.primal_from_dual(s)
}
