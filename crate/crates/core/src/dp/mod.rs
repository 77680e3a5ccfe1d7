//! Differentially private release mechanisms for the penalized ERM problem:
//! output perturbation (Gaussian and Gamma), objective perturbation with a
//! primal/dual equivalence check, and a noisy Frank-Wolfe over the dual
//! polytope. Every mechanism is a pure function of its inputs and a seed,
//! and records enough provenance to recompute its noise scale exactly.

mod experiment;
mod noise;
mod objective;
mod output;
mod private_fw;
mod sensitivity;

pub use experiment::{
    loglog_slope, run_excess_risk_experiment, DiagnosticsRow, ExperimentPoint, ExperimentSpec,
    ExperimentTable, LambdaSetting, MechanismChoice, SlopeFit,
};
pub use noise::{gamma_l2_vec, gaussian_vec, laplace};
pub use objective::{
    objective_perturb, objective_perturb_with, verify_primal_dual_equivalence, EquivalenceReport,
};
pub use output::{output_perturb, auto_lambda, LambdaRule, OutputVariant};
pub use private_fw::{auto_t_steps, private_frank_wolfe, private_fw_iterates};
pub use sensitivity::{empirical_sensitivity, SensitivityReport};

use crate::error::{Error, Result};
use serde::Serialize;

/// The (epsilon, delta) privacy budget. `delta = 0` is representable but
/// only the Gamma mechanism accepts it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::invalid("epsilon must be positive and finite"));
        }
        if !delta.is_finite() || !(0.0..=1.0).contains(&delta) {
            return Err(Error::invalid("delta must lie in [0, 1]"));
        }
        Ok(PrivacyParams { epsilon, delta })
    }

    /// For mechanisms whose scale involves log(1/delta).
    pub(crate) fn require_positive_delta(&self, mechanism: &str) -> Result<()> {
        if self.delta <= 0.0 {
            return Err(Error::invalid(format!(
                "{mechanism} needs delta > 0; only the Gamma mechanism supports delta = 0"
            )));
        }
        Ok(())
    }
}

/// Noise family actually sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mechanism {
    GammaL2,
    Gaussian,
    LaplacePerScore,
}

/// What was sampled, at what scale, from which seed. For `GammaL2` the
/// scale field stores the radius distribution's rate parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub mechanism: Mechanism,
    pub scale: f64,
    pub seed: u64,
}

/// Which release procedure produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MechanismKind {
    OutputGaussian,
    OutputGamma,
    ObjectivePerturb,
    PrivateFrankWolfe,
}

impl MechanismKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MechanismKind::OutputGaussian => "output_gauss",
            MechanismKind::OutputGamma => "output_gamma",
            MechanismKind::ObjectivePerturb => "obj_perturb",
            MechanismKind::PrivateFrankWolfe => "private_fw",
        }
    }
}

/// The constants the noise-scale formula consumed. `lipschitz` is the
/// constant the formula actually uses: the loss Lipschitz bound for the
/// primal mechanisms, the conjugate-gradient bound for the dual one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Provenance {
    pub lipschitz: f64,
    pub r2: f64,
    pub gamma_k: Option<f64>,
    pub g_width: Option<f64>,
    pub t_steps: Option<usize>,
    pub n: usize,
    pub p: usize,
}

/// A released point with everything needed to audit it.
#[derive(Debug, Clone, Serialize)]
pub struct PrivateResult {
    pub theta_priv: Vec<f64>,
    /// Dual iterate, for mechanisms that release through the dual.
    pub s_priv: Option<Vec<f64>>,
    pub kind: MechanismKind,
    pub noise: NoiseSpec,
    pub params: PrivacyParams,
    pub lambda_used: f64,
    /// The additive noise vector, when the mechanism has one.
    pub noise_vector: Option<Vec<f64>>,
    pub provenance: Provenance,
}

impl PrivateResult {
    /// Re-derives the noise scale from provenance alone.
    pub fn recompute_scale(&self) -> Result<f64> {
        let pr = &self.provenance;
        match self.kind {
            MechanismKind::OutputGaussian => Ok(gaussian_sigma(
                pr.lipschitz,
                pr.r2,
                self.params.epsilon,
                self.params.delta,
                self.lambda_used,
            )),
            MechanismKind::OutputGamma => Ok(gamma_rate(
                pr.lipschitz,
                pr.r2,
                self.params.epsilon,
                self.lambda_used,
            )),
            MechanismKind::ObjectivePerturb => Ok(objective_sigma(
                pr.lipschitz,
                pr.n,
                self.params.epsilon,
                self.params.delta,
            )),
            MechanismKind::PrivateFrankWolfe => {
                let gamma_k = pr
                    .gamma_k
                    .ok_or_else(|| Error::invalid("missing polytope diameter in provenance"))?;
                let t = pr
                    .t_steps
                    .ok_or_else(|| Error::invalid("missing step count in provenance"))?;
                Ok(fw_laplace_scale(
                    pr.lipschitz,
                    gamma_k,
                    t,
                    pr.n,
                    self.params.epsilon,
                    self.params.delta,
                ))
            }
        }
    }

    /// Errors unless the stored scale matches the recomputed one to `tol`.
    pub fn audit_scale(&self, tol: f64) -> Result<()> {
        let fresh = self.recompute_scale()?;
        let diff = (fresh - self.noise.scale).abs();
        if diff > tol * (1.0 + fresh.abs()) {
            return Err(Error::numeric(format!(
                "stored noise scale {} disagrees with recomputation {} by {diff:.3e}",
                self.noise.scale, fresh
            )));
        }
        Ok(())
    }
}

/// Gaussian output-perturbation deviation: sigma^2 = 16 (L R2)^2 (log(1/delta) + eps) / (lambda eps)^2.
pub fn gaussian_sigma(l: f64, r2: f64, epsilon: f64, delta: f64, lambda: f64) -> f64 {
    4.0 * l * r2 * ((1.0 / delta).ln() + epsilon).sqrt() / (lambda * epsilon)
}

/// Rate of the Gamma radius so the noise density is proportional to
/// exp(-||b|| * eps * lambda / (4 L R2)).
pub fn gamma_rate(l: f64, r2: f64, epsilon: f64, lambda: f64) -> f64 {
    epsilon * lambda / (4.0 * l * r2)
}

/// Objective-perturbation deviation: sigma^2 = L^2 * 2 log(1/delta) / (n eps)^2.
pub fn objective_sigma(l: f64, n: usize, epsilon: f64, delta: f64) -> f64 {
    l * (2.0 * (1.0 / delta).ln()).sqrt() / (n as f64 * epsilon)
}

/// Per-score Laplace scale for the noisy Frank-Wolfe:
/// L * Gamma_K * sqrt(8 T log(1/delta)) / (n eps).
pub fn fw_laplace_scale(l: f64, gamma_k: f64, t_steps: usize, n: usize, epsilon: f64, delta: f64) -> f64 {
    l * gamma_k * (8.0 * t_steps as f64 * (1.0 / delta).ln()).sqrt() / (n as f64 * epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_validation() {
        assert!(PrivacyParams::new(1.0, 1e-6).is_ok());
        assert!(PrivacyParams::new(1.0, 0.0).is_ok());
        assert!(PrivacyParams::new(0.0, 0.5).is_err());
        assert!(PrivacyParams::new(1.0, 1.5).is_err());
        assert!(PrivacyParams::new(f64::NAN, 0.5).is_err());
        let p = PrivacyParams::new(2.0, 0.0).unwrap();
        assert!(p.require_positive_delta("gaussian output").is_err());
    }

    #[test]
    fn gaussian_sigma_worked_value() {
        // L = R2 = 1, eps = 1, delta = 1e-6, lambda = 10:
        // sigma^2 = 16 (ln 1e6 + 1) / 100
        let sigma = gaussian_sigma(1.0, 1.0, 1.0, 1e-6, 10.0);
        let expected_sq = 16.0 * ((1e6_f64).ln() + 1.0) / 100.0;
        assert!((sigma * sigma - expected_sq).abs() < 1e-12);
        assert!((sigma - 1.5396368692890814).abs() < 1e-12);
    }

    #[test]
    fn scale_helpers_match_their_squares() {
        let (l, r2, eps, delta, lambda) = (1.7, 0.9, 0.5, 1e-5, 3.0);
        let s = gaussian_sigma(l, r2, eps, delta, lambda);
        let direct = 16.0 * (l * r2).powi(2) * ((1.0 / delta).ln() + eps) / (lambda * eps).powi(2);
        assert!((s * s - direct).abs() < 1e-12 * direct);

        let so = objective_sigma(l, 200, eps, delta);
        let direct_o = l * l * 2.0 * (1.0 / delta).ln() / (200.0 * eps).powi(2);
        assert!((so * so - direct_o).abs() < 1e-12 * direct_o);

        let sf = fw_laplace_scale(l, 2.0, 32, 100, eps, delta);
        let direct_f = l * 2.0 * (8.0 * 32.0 * (1.0 / delta).ln()).sqrt() / (100.0 * eps);
        assert!((sf - direct_f).abs() < 1e-12 * direct_f);
    }
}
