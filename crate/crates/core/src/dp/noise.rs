//! Noise samplers. Each consumes draws from a caller-provided generator so
//! mechanisms control their own stream derivation.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

/// i.i.d. N(0, sigma^2) coordinates.
pub fn gaussian_vec(p: usize, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..p)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            sigma * z
        })
        .collect()
}

/// Spherically symmetric vector with density proportional to
/// exp(-rate * ||b||_2): uniform direction, Gamma(p, rate) radius.
pub fn gamma_l2_vec(p: usize, rate: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::invalid("Gamma radius rate must be positive"));
    }
    let gamma = Gamma::new(p as f64, 1.0 / rate)
        .map_err(|e| Error::invalid(format!("Gamma radius parameters: {e}")))?;
    let radius = gamma.sample(rng);
    loop {
        let dir: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(dir.into_iter().map(|x| radius * x / norm).collect());
        }
    }
}

/// One Laplace(scale) draw by inverse CDF. A zero scale still consumes one
/// uniform so noisy and noiseless runs stay draw-for-draw aligned.
pub fn laplace(scale: f64, rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u = rng.random::<f64>() - 0.5;
        // u = -0.5 exactly would send the quantile to -infinity
        if u == -0.5 {
            continue;
        }
        if scale == 0.0 {
            return 0.0;
        }
        return -scale * u.signum() * (-2.0 * u.abs()).ln_1p();
    }
}
