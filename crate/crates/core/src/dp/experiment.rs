//! Excess-risk scaling experiments: sweep the sample size, release a
//! (possibly private) minimizer per trial, and score it against empirical
//! and approximate-population optima. Output is a flat trial table plus
//! per-size diagnostics, ready for log-log slope fits downstream.

use super::output::{output_perturb, LambdaRule, OutputVariant};
use super::{objective_perturb, private_frank_wolfe, PrivacyParams};
use crate::erm::{solve_with_config, DualProblem, ErmProblem, LossKind, SubgradientConfig};
use crate::error::{Error, Result};
use crate::rng::stream_seed;
use crate::submodular::{gaussian_width_mc, SubmodularFn, WidthEstimate};
use crate::synth::DataGenerator;
use serde::Serialize;
use std::time::Instant;

/// Which release procedure the experiment exercises. `None` runs the
/// non-private baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismChoice {
    None,
    OutputGaussian,
    OutputGamma,
    ObjectivePerturb,
    PrivateFrankWolfe,
}

impl MechanismChoice {
    pub fn label(&self) -> &'static str {
        match self {
            MechanismChoice::None => "none",
            MechanismChoice::OutputGaussian => "output_gauss",
            MechanismChoice::OutputGamma => "output_gamma",
            MechanismChoice::ObjectivePerturb => "obj_perturb",
            MechanismChoice::PrivateFrankWolfe => "private_fw",
        }
    }
}

/// Regularization schedule across the sample-size grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSetting {
    /// `lambda_n = L * R2 * sqrt(n) / G`, constants taken from the large
    /// reference sample so every trial at a given n sees the same weight.
    Auto,
    Explicit(f64),
}

pub struct ExperimentSpec<'a> {
    pub generator: &'a dyn DataGenerator,
    pub loss: LossKind,
    pub f: SubmodularFn,
    pub lambda: LambdaSetting,
    pub mechanism: MechanismChoice,
    pub params: PrivacyParams,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub domain_bound: f64,
    /// Held-out sample size for the population-risk estimate.
    pub eval_samples: usize,
    /// Training-sample size for the approximate population minimizer.
    pub theta_star_samples: usize,
    pub width_samples: usize,
    pub solver_max_iters: usize,
    /// Explicit step count for the noisy Frank-Wolfe; `None` = automatic.
    pub fw_steps: Option<usize>,
}

impl ExperimentSpec<'_> {
    fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::invalid("sample-size grid is empty"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("need at least one trial"));
        }
        if self.eval_samples == 0 || self.theta_star_samples == 0 {
            return Err(Error::invalid("held-out sample sizes must be positive"));
        }
        Ok(())
    }
}

/// One released point.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentPoint {
    pub n: usize,
    pub trial: usize,
    pub mechanism: &'static str,
    pub excess_empirical: f64,
    pub excess_population: f64,
    pub runtime_ms: f64,
    pub noise_scale: f64,
    pub lambda: f64,
    pub g_width: f64,
    pub t_steps: Option<usize>,
    pub seed_used: u64,
}

/// Per-sample-size averages plus the two intermediate bound terms the
/// output-perturbation analysis is built from: the noise displacement term
/// `L * R2 * scale` and the penalty term `(lambda/n) * G`.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsRow {
    pub n: usize,
    pub lambda: f64,
    pub mean_excess_empirical: f64,
    pub mean_excess_population: f64,
    pub noise_scale: f64,
    pub lr2_scale: f64,
    pub lambda_g_over_n: f64,
    pub t_steps: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentTable {
    pub points: Vec<ExperimentPoint>,
    pub per_n: Vec<DiagnosticsRow>,
    pub width: WidthEstimate,
}

/// Ordinary least squares on (ln n, ln mean-excess); the standard
/// diagnostic for rate reproduction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope estimate.
    pub slope_se: f64,
    pub points: usize,
}

/// Least-squares line through (ln x, ln y). Pairs with nonpositive y are
/// rejected since the log is undefined there.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::invalid("slope fit needs at least two points"));
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| {
            if x > 0.0 && y > 0.0 {
                Ok((x.ln(), y.ln()))
            } else {
                Err(Error::invalid(format!(
                    "log-log fit needs positive coordinates, got ({x}, {y})"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let m = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx <= 0.0 {
        return Err(Error::invalid("slope fit needs at least two distinct x"));
    }
    let sxy: f64 = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let dof = (logs.len() as f64 - 2.0).max(1.0);
    let ss_res: f64 = logs
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let slope_se = (ss_res / dof / sxx).sqrt();
    Ok(SlopeFit { slope, intercept, slope_se, points: logs.len() })
}

pub fn run_excess_risk_experiment(spec: &ExperimentSpec) -> Result<ExperimentTable> {
    spec.validate()?;
    let gen = spec.generator;
    let p = gen.dim();
    if spec.f.p() != p {
        return Err(Error::invalid(
            "penalty ground set does not match the generator dimension",
        ));
    }
    let width = gaussian_width_mc(&spec.f, spec.width_samples, stream_seed(spec.seed, "width", 0))?;
    if width.mean <= 0.0 {
        return Err(Error::numeric("estimated polytope width is not positive"));
    }

    let mut points = Vec::with_capacity(spec.n_grid.len() * spec.trials);
    let mut per_n = Vec::with_capacity(spec.n_grid.len());
    for &n in &spec.n_grid {
        if n == 0 {
            return Err(Error::invalid("sample sizes must be positive"));
        }
        let big = gen.generate(spec.theta_star_samples, stream_seed(spec.seed, "theta-star-data", n as u64))?;
        let eval = gen.generate(spec.eval_samples, stream_seed(spec.seed, "eval-data", n as u64))?;

        // lambda for this sample size, from reference-sample constants
        let lambda_n = match spec.lambda {
            LambdaSetting::Explicit(v) => v,
            LambdaSetting::Auto => {
                let probe = ErmProblem::new(
                    big.clone(),
                    spec.loss,
                    spec.f.clone(),
                    1.0,
                    spec.domain_bound,
                )?;
                probe.loss().lipschitz * big.r2() * (n as f64).sqrt() / width.mean
            }
        };
        let w_n = lambda_n / n as f64;

        // approximate population minimizer under the same per-point weight
        let star_prob = ErmProblem::new(
            big,
            spec.loss,
            spec.f.clone(),
            w_n * spec.theta_star_samples as f64,
            spec.domain_bound,
        )?;
        let star_solver =
            SubgradientConfig::for_problem(&star_prob).with_max_iters(spec.solver_max_iters);
        let theta_star = solve_with_config(&star_prob, &star_solver)?.theta_or_s;

        let eval_prob = ErmProblem::new(
            eval,
            spec.loss,
            spec.f.clone(),
            w_n * spec.eval_samples as f64,
            spec.domain_bound,
        )?;
        let star_eval = eval_prob.objective(&theta_star)?.total;

        let mut sum_emp = 0.0;
        let mut sum_pop = 0.0;
        let mut rep_scale = 0.0;
        let mut rep_l = 0.0;
        let mut rep_r2 = 0.0;
        let mut rep_t = None;
        for trial in 0..spec.trials {
            let started = Instant::now();
            let data = gen.generate(
                n,
                stream_seed(spec.seed, &format!("trial-data-n{n}"), trial as u64),
            )?;
            let prob = ErmProblem::new(data, spec.loss, spec.f.clone(), lambda_n, spec.domain_bound)?;
            let solver =
                SubgradientConfig::for_problem(&prob).with_max_iters(spec.solver_max_iters);
            let report = solve_with_config(&prob, &solver)?;
            if !report.converged {
                return Err(Error::unconverged(format!(
                    "baseline solve diverged at n = {n}, trial {trial}"
                )));
            }
            let theta_hat = report.theta_or_s;
            let mech_seed = stream_seed(spec.seed, &format!("mech-n{n}"), trial as u64);

            let (theta_priv, noise_scale, t_steps) = match spec.mechanism {
                MechanismChoice::None => (theta_hat.clone(), 0.0, None),
                MechanismChoice::OutputGaussian | MechanismChoice::OutputGamma => {
                    let variant = if spec.mechanism == MechanismChoice::OutputGaussian {
                        OutputVariant::Gaussian
                    } else {
                        OutputVariant::GammaL2
                    };
                    let res = output_perturb(
                        &prob,
                        &spec.params,
                        variant,
                        &LambdaRule::FromProblem,
                        &solver,
                        mech_seed,
                    )?;
                    rep_l = res.provenance.lipschitz;
                    rep_r2 = res.provenance.r2;
                    (res.theta_priv, res.noise.scale, None)
                }
                MechanismChoice::ObjectivePerturb => {
                    let res = objective_perturb(&prob, &spec.params, &solver, mech_seed)?;
                    rep_l = res.provenance.lipschitz;
                    rep_r2 = res.provenance.r2;
                    (res.theta_priv, res.noise.scale, None)
                }
                MechanismChoice::PrivateFrankWolfe => {
                    let dp = DualProblem::build(
                        &prob,
                        spec.width_samples,
                        stream_seed(spec.seed, "fw-width", n as u64),
                    )?;
                    let res = private_frank_wolfe(&dp, None, &spec.params, spec.fw_steps, mech_seed)?;
                    rep_l = res.provenance.lipschitz;
                    rep_r2 = res.provenance.r2;
                    (res.theta_priv, res.noise.scale, res.provenance.t_steps)
                }
            };
            rep_scale = noise_scale;
            rep_t = t_steps;

            let excess_empirical =
                prob.objective(&theta_priv)?.total - prob.objective(&theta_hat)?.total;
            let excess_population = eval_prob.objective(&theta_priv)?.total - star_eval;
            sum_emp += excess_empirical;
            sum_pop += excess_population;
            points.push(ExperimentPoint {
                n,
                trial,
                mechanism: spec.mechanism.label(),
                excess_empirical,
                excess_population,
                runtime_ms: started.elapsed().as_secs_f64() * 1e3,
                noise_scale,
                lambda: lambda_n,
                g_width: width.mean,
                t_steps,
                seed_used: mech_seed,
            });
        }
        let trials = spec.trials as f64;
        per_n.push(DiagnosticsRow {
            n,
            lambda: lambda_n,
            mean_excess_empirical: sum_emp / trials,
            mean_excess_population: sum_pop / trials,
            noise_scale: rep_scale,
            lr2_scale: rep_l * rep_r2 * rep_scale,
            lambda_g_over_n: w_n * width.mean,
            t_steps: rep_t,
        });
    }
    Ok(ExperimentTable { points, per_n, width })
}
