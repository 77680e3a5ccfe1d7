//! Synthetic regression tasks on the clipped domain
//! `{(x, y): ||x||_inf <= 1, y in [-1, 1]}`, plus bootstrap resampling of a
//! fixed dataset. Generators keep their planted coefficients so experiments
//! can score against the generating model.

use crate::erm::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::StandardNormal;

const NOISE_SD: f64 = 0.1;

/// Built-in task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthTask {
    /// Sparse planted model: `ceil(p/4)` active coordinates at +/-0.5.
    Lasso,
    /// Dense planted model: every coordinate at +/-0.5.
    Linf,
}

/// A reproducible source of datasets of any size.
pub trait DataGenerator {
    fn dim(&self) -> usize;
    /// Deterministic in `seed`; independent draws for distinct seeds.
    fn generate(&self, n: usize, seed: u64) -> Result<Dataset>;
    /// The generating coefficients, when the task has them.
    fn theta_planted(&self) -> Option<&[f64]>;
}

fn draw_rows(theta: &[f64], n: usize, seed: u64) -> Result<Dataset> {
    let p = theta.len();
    let mut rng = stream_rng(seed, "synth-rows", 0);
    let mut x = Vec::with_capacity(n * p);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let start = x.len();
        let mut pred = 0.0;
        for j in 0..p {
            let xi = 2.0 * rng.random::<f64>() - 1.0;
            x.push(xi);
            pred += theta[j] * x[start + j];
        }
        let noise: f64 = rng.sample(StandardNormal);
        y.push((pred + NOISE_SD * noise).clamp(-1.0, 1.0));
    }
    Dataset::from_flat(x, y, p)
}

/// Sparse linear model with `ceil(p/4)` nonzero coefficients of magnitude 0.5.
pub struct LassoSynthetic {
    theta: Vec<f64>,
}

impl LassoSynthetic {
    pub fn new(p: usize, seed: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let k = p.div_ceil(4);
        let mut rng = stream_rng(seed, "synth-plant", 0);
        // sample the support without replacement, then flip signs
        let mut idx: Vec<usize> = (0..p).collect();
        for i in 0..k {
            let j = i + rng.random_range(0..p - i);
            idx.swap(i, j);
        }
        let mut theta = vec![0.0; p];
        for &i in &idx[..k] {
            theta[i] = if rng.random::<bool>() { 0.5 } else { -0.5 };
        }
        Ok(LassoSynthetic { theta })
    }
}

impl DataGenerator for LassoSynthetic {
    fn dim(&self) -> usize {
        self.theta.len()
    }

    fn generate(&self, n: usize, seed: u64) -> Result<Dataset> {
        draw_rows(&self.theta, n, seed)
    }

    fn theta_planted(&self) -> Option<&[f64]> {
        Some(&self.theta)
    }
}

/// Dense linear model: all coefficients at +/-0.5.
pub struct LinfSynthetic {
    theta: Vec<f64>,
}

impl LinfSynthetic {
    pub fn new(p: usize, seed: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let mut rng = stream_rng(seed, "synth-plant", 1);
        let theta = (0..p)
            .map(|_| if rng.random::<bool>() { 0.5 } else { -0.5 })
            .collect();
        Ok(LinfSynthetic { theta })
    }
}

impl DataGenerator for LinfSynthetic {
    fn dim(&self) -> usize {
        self.theta.len()
    }

    fn generate(&self, n: usize, seed: u64) -> Result<Dataset> {
        draw_rows(&self.theta, n, seed)
    }

    fn theta_planted(&self) -> Option<&[f64]> {
        Some(&self.theta)
    }
}

/// Bootstrap resampler over a fixed dataset (rows drawn with replacement).
pub struct ResampleData {
    source: Dataset,
}

impl ResampleData {
    pub fn new(source: Dataset) -> Self {
        ResampleData { source }
    }

    pub fn source(&self) -> &Dataset {
        &self.source
    }
}

impl DataGenerator for ResampleData {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn generate(&self, n: usize, seed: u64) -> Result<Dataset> {
        let mut rng = stream_rng(seed, "synth-resample", 0);
        let p = self.source.dim();
        let mut x = Vec::with_capacity(n * p);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let i = rng.random_range(0..self.source.n());
            x.extend_from_slice(self.source.x_row(i));
            y.push(self.source.y(i));
        }
        Dataset::from_flat(x, y, p)
    }

    fn theta_planted(&self) -> Option<&[f64]> {
        None
    }
}

/// One-shot dataset draw: plants coefficients and samples rows, both from
/// the same root seed.
pub fn gen_synthetic(task: SynthTask, p: usize, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("need at least one point"));
    }
    let generator: Box<dyn DataGenerator> = match task {
        SynthTask::Lasso => Box::new(LassoSynthetic::new(p, seed)?),
        SynthTask::Linf => Box::new(LinfSynthetic::new(p, seed)?),
    };
    generator.generate(n, seed)
}
