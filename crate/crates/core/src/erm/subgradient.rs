//! Projected-free subgradient descent on the penalized objective.
//!
//! Nothing here needs smoothness: each step follows a subgradient assembled
//! from the loss derivative and the greedy maximizer of the norm. The solver
//! keeps the best iterate seen, declares convergence when the best objective
//! stalls (relative change below `STALL_TOL` across `STALL_WINDOW` steps) or
//! the iteration budget runs out, and reports failure only on divergence.

use super::problem::{dot, ErmProblem};
use super::SolveReport;
use crate::error::{Error, Result};

const STALL_TOL: f64 = 1e-9;
const STALL_WINDOW: usize = 50;
const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy)]
pub enum StepRule {
    /// eta0 / sqrt(t); the default.
    InvSqrt { eta0: f64 },
    /// eta0 / t.
    InvT { eta0: f64 },
    Constant { eta: f64 },
}

impl StepRule {
    fn at(&self, t: usize) -> f64 {
        match *self {
            StepRule::InvSqrt { eta0 } => eta0 / (t as f64).sqrt(),
            StepRule::InvT { eta0 } => eta0 / t as f64,
            StepRule::Constant { eta } => eta,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SubgradientConfig {
    pub max_iters: usize,
    pub step: StepRule,
    /// Recorded for provenance; the solver itself is deterministic.
    pub seed: u64,
}

impl SubgradientConfig {
    /// Default schedule: eta_t = eta0/sqrt(t) with eta0 the reciprocal of
    /// the loss Lipschitz constant in theta (per-prediction constant times
    /// R2).
    pub fn for_problem(prob: &ErmProblem) -> Self {
        let l_theta = prob.loss().lipschitz * prob.data().r2().max(1e-12);
        SubgradientConfig {
            max_iters: 10_000,
            step: StepRule::InvSqrt { eta0: 1.0 / l_theta },
            seed: 0,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }
}

pub fn solve_primal_subgradient(
    prob: &ErmProblem,
    max_iter: usize,
    step: StepRule,
    seed: u64,
) -> Result<SolveReport> {
    run(prob, None, &SubgradientConfig { max_iters: max_iter, step, seed })
}

/// Same solver with an extra linear term added to the objective, as used by
/// the perturbed-objective mechanism.
pub fn solve_primal_perturbed(
    prob: &ErmProblem,
    extra_linear: &[f64],
    config: &SubgradientConfig,
) -> Result<SolveReport> {
    if extra_linear.len() != prob.p() {
        return Err(Error::invalid("linear perturbation has wrong dimension"));
    }
    run(prob, Some(extra_linear), config)
}

pub fn solve_with_config(prob: &ErmProblem, config: &SubgradientConfig) -> Result<SolveReport> {
    run(prob, None, config)
}

fn run(prob: &ErmProblem, extra: Option<&[f64]>, config: &SubgradientConfig) -> Result<SolveReport> {
    if config.max_iters == 0 {
        return Err(Error::invalid("max_iters must be at least 1"));
    }
    let p = prob.p();
    let value = |theta: &[f64]| -> Result<f64> {
        let base = prob.objective(theta)?.total;
        Ok(base + extra.map_or(0.0, |e| dot(e, theta)))
    };

    let mut theta = vec![0.0; p];
    let mut best_theta = theta.clone();
    let mut best_val = value(&theta)?;
    let mut stall_anchor = best_val;
    let mut stall_count = 0usize;
    let mut trace = Vec::with_capacity(config.max_iters.min(1 << 20));

    for t in 1..=config.max_iters {
        let g = prob.objective_subgradient(&theta, extra)?;
        let eta = config.step.at(t);
        for j in 0..p {
            theta[j] -= eta * g[j];
        }
        let val = value(&theta)?;
        trace.push(val);
        if !val.is_finite() || val.abs() > DIVERGENCE_LIMIT {
            return Ok(SolveReport {
                theta_or_s: best_theta,
                objective_trace: trace,
                duality_gap_trace: Vec::new(),
                iterations: t,
                converged: false,
            });
        }
        if val < best_val {
            best_val = val;
            best_theta.copy_from_slice(&theta);
        }
        // Stall rule tracks the best value, which is monotone by
        // construction.
        if (stall_anchor - best_val).abs() <= STALL_TOL * (1.0 + best_val.abs()) {
            stall_count += 1;
            if stall_count >= STALL_WINDOW {
                return Ok(SolveReport {
                    theta_or_s: best_theta,
                    objective_trace: trace,
                    duality_gap_trace: Vec::new(),
                    iterations: t,
                    converged: true,
                });
            }
        } else {
            stall_anchor = best_val;
            stall_count = 0;
        }
    }
    Ok(SolveReport {
        theta_or_s: best_theta,
        objective_trace: trace,
        duality_gap_trace: Vec::new(),
        iterations: config.max_iters,
        converged: true,
    })
}
