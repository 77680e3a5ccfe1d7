//! Empirical risk minimization with a sparsity-inducing support penalty:
//! primal solvers, the Fenchel conjugate of the mean loss, and a dual
//! Frank-Wolfe method over the scaled symmetric polyhedron.

mod conjugate;
mod data;
mod dual;
mod frank_wolfe;
mod loss;
mod problem;
mod subgradient;

pub use conjugate::{fenchel_conjugate, ConjugateOracle};
pub use data::Dataset;
pub use dual::{dual_objective, primal_from_dual, DualProblem};
pub use frank_wolfe::{frank_wolfe_dual, frank_wolfe_iterates, frank_wolfe_vertex_iterates};
pub use loss::{LossKind, LossModel};
pub use problem::{primal_objective, ErmProblem, ObjectiveValue};
pub use subgradient::{
    solve_primal_perturbed, solve_primal_subgradient, solve_with_config, StepRule,
    SubgradientConfig,
};

pub(crate) use frank_wolfe::{run_fw, LinOracle};
pub(crate) use problem::dot;

/// Outcome of an iterative solve. `theta_or_s` is a primal point for the
/// subgradient method and a dual point for Frank-Wolfe.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub theta_or_s: Vec<f64>,
    /// Objective value after each iteration.
    pub objective_trace: Vec<f64>,
    /// For Frank-Wolfe: the certified gap after each iteration. Empty for
    /// methods without a gap certificate.
    pub duality_gap_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveReport {
    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().copied()
    }
}
