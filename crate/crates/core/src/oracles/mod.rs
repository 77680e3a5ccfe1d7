//! Brute-force reference implementations used to validate the production
//! algorithms. Everything here favors the most literal computation available
//! (exhaustive enumeration, dense grids, closed-form support functions) and
//! shares no solver code with the paths it checks.

mod linalg;
mod qp;

pub use qp::{
    extreme_points_bruteforce, min_penalized_quadratic, min_quadratic_over_hull, SquaredErmOracle,
};


use crate::error::{Error, Result};
use crate::submodular::{enumerate_vertices, SubmodularFn, WidthEstimate};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Exhaustive linear maximization `max_v w^T v` over the enumerated vertex
/// set of the symmetric polyhedron. Ties keep the first vertex in the
/// deterministic enumeration order.
pub fn lp_over_vertices(f: &SubmodularFn, w: &[f64]) -> Result<(f64, Vec<f64>)> {
    let verts = enumerate_vertices(f)?;
    lp_over_vertex_list(&verts, w)
}

/// Same maximization over a caller-supplied vertex list (for loops that reuse
/// one enumeration).
pub fn lp_over_vertex_list(vertices: &[Vec<f64>], w: &[f64]) -> Result<(f64, Vec<f64>)> {
    if vertices.is_empty() {
        return Err(Error::invalid("empty vertex list"));
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0usize;
    for (i, v) in vertices.iter().enumerate() {
        if v.len() != w.len() {
            return Err(Error::invalid("vertex/weight dimension mismatch"));
        }
        let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
        if dot > best {
            best = dot;
            arg = i;
        }
    }
    Ok((best, vertices[arg].clone()))
}

/// Axis-aligned evaluation grid.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Points per dimension, at least 3.
    pub steps: usize,
}

const GRID_MAX_POINTS: f64 = 1e7;
const GRID_REFINE_ROUNDS: usize = 3;

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, steps: usize) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("grid bounds must be nonempty and congruent"));
        }
        if steps < 3 {
            return Err(Error::invalid("grid needs at least 3 steps per dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b || a.is_nan() || b.is_nan()) {
            return Err(Error::invalid("grid bounds must satisfy lo < hi"));
        }
        let total = (steps as f64).powi(lo.len() as i32);
        if total > GRID_MAX_POINTS {
            return Err(Error::capability(format!(
                "grid would evaluate {total:.3e} points (limit {GRID_MAX_POINTS:.0e})"
            )));
        }
        Ok(GridSpec { lo, hi, steps })
    }
}

fn grid_scan(obj: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], steps: usize) -> (Vec<f64>, f64) {
    let d = lo.len();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0f64; d];
    let mut best_val = f64::INFINITY;
    let mut best_x = lo.to_vec();
    loop {
        for j in 0..d {
            x[j] = lo[j] + (hi[j] - lo[j]) * idx[j] as f64 / (steps - 1) as f64;
        }
        let v = obj(&x);
        // Strict comparison keeps the lowest scan index on ties.
        if v < best_val {
            best_val = v;
            best_x.copy_from_slice(&x);
        }
        // Odometer increment, last dimension fastest.
        let mut j = d;
        loop {
            if j == 0 {
                return (best_x, best_val);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < steps {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Dense grid minimization with three local refinement rounds.
///
/// After the coarse scan, the window shrinks to `best ± spacing` (clipped to
/// the original bounds) and is rescanned with the same step count; with five
/// or more steps per dimension each round at least halves the spacing. Ties
/// resolve toward the lowest scan index.
pub fn grid_minimize(obj: &dyn Fn(&[f64]) -> f64, spec: &GridSpec) -> Result<(Vec<f64>, f64)> {
    let d = spec.lo.len();
    let (mut best_x, mut best_val) = grid_scan(obj, &spec.lo, &spec.hi, spec.steps);
    let mut spacing: Vec<f64> = (0..d)
        .map(|j| (spec.hi[j] - spec.lo[j]) / (spec.steps - 1) as f64)
        .collect();
    for _ in 0..GRID_REFINE_ROUNDS {
        let lo: Vec<f64> = (0..d)
            .map(|j| (best_x[j] - spacing[j]).max(spec.lo[j]))
            .collect();
        let hi: Vec<f64> = (0..d)
            .map(|j| (best_x[j] + spacing[j]).min(spec.hi[j]))
            .collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            break;
        }
        let (x, v) = grid_scan(obj, &lo, &hi, spec.steps);
        if v < best_val {
            best_val = v;
            best_x = x;
        }
        for j in 0..d {
            spacing[j] = (hi[j] - lo[j]) / (spec.steps - 1) as f64;
        }
    }
    Ok((best_x, best_val))
}

/// Norm balls whose Gaussian widths have closed-form support functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedBall {
    /// Unit cross-polytope; support function `max_j |b_j|`.
    L1,
    /// Unit box; support function `sum_j |b_j|`.
    Linf,
}

/// Monte Carlo Gaussian width of a named unit ball, computed from the
/// closed-form support function (no greedy pass involved).
pub fn mc_width_named(ball: NamedBall, p: usize, num_samples: usize, seed: u64) -> Result<WidthEstimate> {
    if p == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if num_samples < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for i in 0..num_samples {
        let mut support = 0.0f64;
        match ball {
            NamedBall::L1 => {
                for _ in 0..p {
                    let g: f64 = rng.sample(StandardNormal);
                    if g.abs() > support {
                        support = g.abs();
                    }
                }
            }
            NamedBall::Linf => {
                for _ in 0..p {
                    let g: f64 = rng.sample(StandardNormal);
                    support += g.abs();
                }
            }
        }
        let delta = support - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (support - mean);
    }
    let var = m2 / (num_samples - 1) as f64;
    Ok(WidthEstimate {
        mean,
        std_error: (var / num_samples as f64).sqrt(),
        num_samples,
        seed,
    })
}
