//! Output perturbation: solve the penalized problem, then add calibrated
//! noise to the minimizer. The Gamma variant gives pure epsilon-DP; the
//! Gaussian variant needs delta > 0 and a milder scale.
//!
//! Note the Gamma mechanism is implemented exactly as specified even though
//! the usual analysis of its epsilon-DP guarantee assumes a differentiable
//! regularizer, which the support penalty is not.

use super::noise::{gamma_l2_vec, gaussian_vec};
use super::{
    gamma_rate, gaussian_sigma, Mechanism, MechanismKind, NoiseSpec, PrivacyParams, PrivateResult,
    Provenance,
};
use crate::erm::{solve_with_config, ErmProblem, SubgradientConfig};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::submodular::{gaussian_width_mc, WidthEstimate};

/// Which noise family to add to the minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputVariant {
    Gaussian,
    GammaL2,
}

/// How the mechanism picks the regularization weight.
#[derive(Debug, Clone, Copy)]
pub enum LambdaRule {
    /// `lambda = L * R2 * sqrt(n) / G`, with the polytope width estimated
    /// by Monte Carlo at the given budget.
    Auto { width_samples: usize, width_seed: u64 },
    /// Keep the weight the problem was built with.
    FromProblem,
}

/// The automatic regularization weight and the width estimate behind it.
pub fn auto_lambda(
    prob: &ErmProblem,
    width_samples: usize,
    width_seed: u64,
) -> Result<(f64, WidthEstimate)> {
    let width = gaussian_width_mc(prob.f(), width_samples, width_seed)?;
    if width.mean <= 0.0 {
        return Err(Error::numeric("estimated polytope width is not positive"));
    }
    let l = prob.loss().lipschitz;
    let r2 = prob.data().r2();
    let lambda = l * r2 * (prob.n() as f64).sqrt() / width.mean;
    Ok((lambda, width))
}

/// Releases `theta_hat + b`. Refuses to add noise to a solve that did not
/// converge: the privacy calibration is about the exact minimizer.
pub fn output_perturb(
    prob: &ErmProblem,
    params: &PrivacyParams,
    variant: OutputVariant,
    lambda_rule: &LambdaRule,
    solver: &SubgradientConfig,
    seed: u64,
) -> Result<PrivateResult> {
    let (resolved, g_width) = match *lambda_rule {
        LambdaRule::FromProblem => (None, None),
        LambdaRule::Auto { width_samples, width_seed } => {
            let (lambda, width) = auto_lambda(prob, width_samples, width_seed)?;
            (Some(prob.with_lambda(lambda)?), Some(width.mean))
        }
    };
    let prob = resolved.as_ref().unwrap_or(prob);
    let lambda = prob.lambda();
    let l = prob.loss().lipschitz;
    let r2 = prob.data().r2();

    let report = solve_with_config(prob, solver)?;
    if !report.converged {
        return Err(Error::unconverged(
            "refusing to perturb a minimizer that did not converge",
        ));
    }
    let theta_hat = report.theta_or_s;

    let (noise, b) = match variant {
        OutputVariant::Gaussian => {
            params.require_positive_delta("gaussian output perturbation")?;
            let sigma = gaussian_sigma(l, r2, params.epsilon, params.delta, lambda);
            let mut rng = stream_rng(seed, "output-gaussian", 0);
            let b = gaussian_vec(prob.p(), sigma, &mut rng);
            (
                NoiseSpec { mechanism: Mechanism::Gaussian, scale: sigma, seed },
                b,
            )
        }
        OutputVariant::GammaL2 => {
            let rate = gamma_rate(l, r2, params.epsilon, lambda);
            let mut rng = stream_rng(seed, "output-gamma", 0);
            let b = gamma_l2_vec(prob.p(), rate, &mut rng)?;
            (
                NoiseSpec { mechanism: Mechanism::GammaL2, scale: rate, seed },
                b,
            )
        }
    };

    let theta_priv: Vec<f64> = theta_hat.iter().zip(&b).map(|(t, n)| t + n).collect();
    Ok(PrivateResult {
        theta_priv,
        s_priv: None,
        kind: match variant {
            OutputVariant::Gaussian => MechanismKind::OutputGaussian,
            OutputVariant::GammaL2 => MechanismKind::OutputGamma,
        },
        noise,
        params: *params,
        lambda_used: lambda,
        noise_vector: Some(b),
        provenance: Provenance {
            lipschitz: l,
            r2,
            gamma_k: None,
            g_width,
            t_steps: None,
            n: prob.n(),
            p: prob.p(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::{Dataset, LossKind};
    use crate::submodular::SubmodularFn;

    fn problem() -> ErmProblem {
        let data = Dataset::from_rows(
            &[vec![0.9, -0.1], vec![-0.4, 0.6], vec![0.3, 0.8], vec![-0.7, 0.2]],
            &[0.5, -0.1, 0.6, -0.4],
        )
        .unwrap();
        let f = SubmodularFn::cardinality(2).unwrap();
        ErmProblem::new(data, LossKind::Squared, f, 2.0, 1.0).unwrap()
    }

    #[test]
    fn seed_fixed_runs_are_identical() {
        let prob = problem();
        let params = PrivacyParams::new(1.0, 1e-6).unwrap();
        let solver = SubgradientConfig::for_problem(&prob).with_max_iters(3000);
        for variant in [OutputVariant::Gaussian, OutputVariant::GammaL2] {
            let a = output_perturb(&prob, &params, variant, &LambdaRule::FromProblem, &solver, 5)
                .unwrap();
            let b = output_perturb(&prob, &params, variant, &LambdaRule::FromProblem, &solver, 5)
                .unwrap();
            assert_eq!(a.theta_priv, b.theta_priv);
            let c = output_perturb(&prob, &params, variant, &LambdaRule::FromProblem, &solver, 6)
                .unwrap();
            assert_ne!(a.theta_priv, c.theta_priv);
        }
    }

    #[test]
    fn gaussian_needs_delta() {
        let prob = problem();
        let params = PrivacyParams::new(1.0, 0.0).unwrap();
        let solver = SubgradientConfig::for_problem(&prob).with_max_iters(500);
        let err = output_perturb(
            &prob,
            &params,
            OutputVariant::Gaussian,
            &LambdaRule::FromProblem,
            &solver,
            1,
        )
        .unwrap_err();
        assert!(err.to_string().contains("delta"));
        // the Gamma variant runs under the same pure-epsilon budget
        output_perturb(
            &prob,
            &params,
            OutputVariant::GammaL2,
            &LambdaRule::FromProblem,
            &solver,
            1,
        )
        .unwrap();
    }

    #[test]
    fn provenance_reproduces_the_scale() {
        let prob = problem();
        let params = PrivacyParams::new(0.7, 1e-5).unwrap();
        let solver = SubgradientConfig::for_problem(&prob).with_max_iters(500);
        for variant in [OutputVariant::Gaussian, OutputVariant::GammaL2] {
            let res = output_perturb(
                &prob,
                &params,
                variant,
                &LambdaRule::Auto { width_samples: 2000, width_seed: 9 },
                &solver,
                3,
            )
            .unwrap();
            res.audit_scale(1e-12).unwrap();
            assert!(res.lambda_used > 0.0);
            assert!(res.provenance.g_width.is_some());
        }
    }

    #[test]
    fn noise_vector_matches_release() {
        let prob = problem();
        let params = PrivacyParams::new(1.0, 1e-6).unwrap();
        let solver = SubgradientConfig::for_problem(&prob).with_max_iters(3000);
        let res = output_perturb(
            &prob,
            &params,
            OutputVariant::Gaussian,
            &LambdaRule::FromProblem,
            &solver,
            12,
        )
        .unwrap();
        let b = res.noise_vector.as_ref().unwrap();
        let direct = solve_with_config(&prob, &solver).unwrap().theta_or_s;
        for i in 0..prob.p() {
            assert!((res.theta_priv[i] - direct[i] - b[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_noise_second_moment() {
        // E||theta_priv - theta_hat||^2 = p sigma^2, checked to 3% over 1e5 draws
        let prob = problem();
        let params = PrivacyParams::new(1.0, 1e-6).unwrap();
        let solver = SubgradientConfig::for_problem(&prob).with_max_iters(200);
        let probe = output_perturb(
            &prob,
            &params,
            OutputVariant::Gaussian,
            &LambdaRule::FromProblem,
            &solver,
            0,
        )
        .unwrap();
        let sigma = probe.noise.scale;
        let p = prob.p();
        let trials = 100_000;
        let mut sum = 0.0;
        // sample the noise directly on fresh substreams; re-running the full
        // mechanism 1e5 times would only re-solve the same problem
        for k in 0..trials {
            let mut rng = stream_rng(99, "output-gaussian", k);
            let b = gaussian_vec(p, sigma, &mut rng);
            sum += b.iter().map(|x| x * x).sum::<f64>();
        }
        let mean = sum / trials as f64;
        let expect = p as f64 * sigma * sigma;
        assert!(
            (mean - expect).abs() < 0.03 * expect,
            "second moment {mean} vs {expect}"
        );
    }
}
