//! Noisy Frank-Wolfe over the dual polytope: each iteration scores every
//! enumerated vertex with fresh Laplace noise and steps toward the argmin.
//! Privacy comes from the report-noisy-min at each step; utility needs the
//! step count balanced against the per-step noise, which the automatic
//! schedule below does.

use super::noise::laplace;
use super::{
    fw_laplace_scale, Mechanism, MechanismKind, NoiseSpec, PrivacyParams, PrivateResult,
    Provenance,
};
use crate::erm::{dot, run_fw, DualProblem, LinOracle, SolveReport};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Step count balancing optimization error (falls like 1/T) against
/// injected noise (grows like sqrt(T)):
/// `T = ceil(Gamma_K^{4/3} (n eps)^{2/3} / (L G_K)^{2/3})`, at least 1.
pub fn auto_t_steps(gamma_k: f64, g_k: f64, l: f64, n: usize, epsilon: f64) -> Result<usize> {
    if !(gamma_k > 0.0 && g_k > 0.0 && l > 0.0) {
        return Err(Error::invalid(
            "step schedule needs positive diameter, width, and Lipschitz constant",
        ));
    }
    let ne = n as f64 * epsilon;
    let t = gamma_k.powf(4.0 / 3.0) * ne.powf(2.0 / 3.0) / (l * g_k).powf(2.0 / 3.0);
    if !t.is_finite() {
        return Err(Error::numeric("step schedule overflowed"));
    }
    let t = t.ceil() as usize;
    if t < 1 {
        log::warn!("automatic step count fell below 1; clamping");
        return Ok(1);
    }
    Ok(t)
}

/// Shared noisy loop. With `scale = 0` the Laplace draws are exactly zero
/// and the trajectory coincides with the deterministic vertex-argmin run.
fn run_noisy(
    dp: &DualProblem,
    t_steps: usize,
    scale: f64,
    seed: u64,
    record_iterates: bool,
) -> Result<(SolveReport, Vec<Vec<f64>>)> {
    if dp.vertices().is_empty() {
        return Err(Error::invalid("dual polytope has no enumerated vertices"));
    }
    let mut rng = stream_rng(seed, "private-fw", 0);
    let mut choose = |_t: usize, theta: &[f64], s_prev: &[f64]| -> Result<Vec<f64>> {
        let base = dot(s_prev, theta);
        let mut best = f64::INFINITY;
        let mut winner = None;
        // fresh draw per vertex per iteration, in enumeration order
        for v in dp.vertices() {
            let alpha = base - dot(v, theta) + laplace(scale, &mut rng);
            if alpha < best {
                best = alpha;
                winner = Some(v);
            }
        }
        Ok(winner.expect("nonempty vertex list").clone())
    };
    run_fw(dp, t_steps, record_iterates, LinOracle::Scored(&mut choose))
}

/// Runs the noisy method and packages the release with its provenance.
///
/// `l1_lipschitz` overrides the conjugate's gradient bound; required for
/// losses where the bound is not computed internally. `t_steps` of `None`
/// selects the automatic schedule.
pub fn private_frank_wolfe(
    dp: &DualProblem,
    l1_lipschitz: Option<f64>,
    params: &PrivacyParams,
    t_steps: Option<usize>,
    seed: u64,
) -> Result<PrivateResult> {
    params.require_positive_delta("noisy Frank-Wolfe")?;
    let l = match l1_lipschitz {
        Some(l) if l > 0.0 && l.is_finite() => l,
        Some(_) => return Err(Error::invalid("Lipschitz override must be positive")),
        None => dp.l1_lipschitz_bound()?,
    };
    let prob = dp.problem();
    let t = match t_steps {
        Some(t) => t,
        None => auto_t_steps(dp.gamma_k(), dp.g_k(), l, prob.n(), params.epsilon)?,
    };
    let scale = fw_laplace_scale(l, dp.gamma_k(), t, prob.n(), params.epsilon, params.delta);
    let (report, _) = run_noisy(dp, t, scale, seed, false)?;
    let theta_priv = dp.primal_from_dual(&report.theta_or_s)?;
    Ok(PrivateResult {
        theta_priv,
        s_priv: Some(report.theta_or_s),
        kind: MechanismKind::PrivateFrankWolfe,
        noise: NoiseSpec { mechanism: Mechanism::LaplacePerScore, scale, seed },
        params: *params,
        lambda_used: prob.lambda(),
        noise_vector: None,
        provenance: Provenance {
            lipschitz: l,
            r2: prob.data().r2(),
            gamma_k: Some(dp.gamma_k()),
            g_width: Some(dp.g_k()),
            t_steps: Some(t),
            n: prob.n(),
            p: prob.p(),
        },
    })
}

/// Diagnostic entry point with an explicit noise scale; returns every dual
/// iterate. Used to check the zero-noise reduction and noise robustness.
pub fn private_fw_iterates(
    dp: &DualProblem,
    t_steps: usize,
    scale: f64,
    seed: u64,
) -> Result<(SolveReport, Vec<Vec<f64>>)> {
    if scale < 0.0 || scale.is_nan() {
        return Err(Error::invalid("noise scale must be nonnegative"));
    }
    run_noisy(dp, t_steps, scale, seed, true)
}
