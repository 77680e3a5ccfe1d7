//! Empirical sensitivity probe: how far does the minimizer move when one
//! data point is replaced? The sampled maximum is a lower bound on the
//! worst case, reported next to the scale the calibrated mechanisms assume
//! so gross calibration errors surface as a flag.

use crate::erm::{solve_with_config, ErmProblem, LossKind, SubgradientConfig};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, stream_seed};
use crate::submodular::SubmodularFn;
use crate::synth::DataGenerator;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct SensitivityReport {
    /// Max over sampled neighboring pairs of the minimizer displacement.
    pub max_l2: f64,
    /// Displacement scale the Gaussian calibration assumes: 4 L R2 / lambda.
    pub assumed_bound: f64,
    /// Set when the observed maximum exceeds the assumed bound.
    pub flagged: bool,
    pub pairs: usize,
}

/// Solves `num_pairs` neighboring dataset pairs (replace one point) and
/// reports the largest minimizer displacement observed.
#[allow(clippy::too_many_arguments)]
pub fn empirical_sensitivity(
    generator: &dyn DataGenerator,
    n: usize,
    loss: LossKind,
    f: &SubmodularFn,
    lambda: f64,
    domain_bound: f64,
    solver_max_iters: usize,
    num_pairs: usize,
    seed: u64,
) -> Result<SensitivityReport> {
    if num_pairs == 0 {
        return Err(Error::invalid("need at least one neighboring pair"));
    }
    if n == 0 {
        return Err(Error::invalid("need at least one data point"));
    }
    let mut max_l2 = 0.0_f64;
    let mut assumed_bound = 0.0_f64;
    for k in 0..num_pairs {
        let data = generator.generate(n, stream_seed(seed, "sens-data", k as u64))?;
        let replacement = generator.generate(1, stream_seed(seed, "sens-alt", k as u64))?;
        let mut rng = stream_rng(seed, "sens-index", k as u64);
        let idx = rng.random_range(0..n);
        let neighbor = data.with_replaced(idx, replacement.x_row(0), replacement.y(0))?;

        let prob = ErmProblem::new(data, loss, f.clone(), lambda, domain_bound)?;
        let prob_alt = ErmProblem::new(neighbor, loss, f.clone(), lambda, domain_bound)?;
        let solver = SubgradientConfig::for_problem(&prob).with_max_iters(solver_max_iters);
        let a = solve_with_config(&prob, &solver)?;
        let b = solve_with_config(&prob_alt, &solver)?;
        let dist: f64 = a
            .theta_or_s
            .iter()
            .zip(&b.theta_or_s)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        max_l2 = max_l2.max(dist);
        let l = prob.loss().lipschitz;
        let r2 = prob.data().r2();
        assumed_bound = assumed_bound.max(4.0 * l * r2 / lambda);
    }
    Ok(SensitivityReport {
        max_l2,
        assumed_bound,
        flagged: max_l2 > assumed_bound,
        pairs: num_pairs,
    })
}
