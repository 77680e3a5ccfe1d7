//! Nondecreasing submodular set functions and the polyhedral norms they induce.
//!
//! A set function `F` over the ground set `V = {0, .., p-1}` is represented by
//! [`SubmodularFn`]. Construction validates the structural requirements every
//! downstream operation relies on: `F(∅) = 0`, `F({j}) > 0` for every
//! singleton, and `F` nondecreasing and submodular. Subsets are bitmasks
//! (`u64`), with bit `j` marking element `j`.

mod lovasz;
mod polytope;
mod width;

pub use lovasz::{lovasz_extension, omega_inf, polytope_linmax, GreedyVertex};
pub use polytope::{
    dual_norm_bruteforce, enumerate_vertices, membership_max_violation, polytope_membership,
};
pub use width::{gaussian_width_mc, WidthEstimate};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use rand::Rng;
use std::fmt;
use std::sync::Arc;

/// Largest ground set the exhaustive (`2^p` subset) operations accept.
pub const EXHAUSTIVE_P_MAX: usize = 24;
/// Largest ground set for vertex enumeration (permutation × sign expansion).
pub const ENUMERATE_P_MAX: usize = 8;
/// Up to this size, construction checks monotonicity and submodularity on
/// every subset; beyond it, on 1000 sampled pairs.
const VALIDATE_EXHAUSTIVE_P_MAX: usize = 12;
const VALIDATE_SAMPLES: usize = 1000;
const VALIDATE_SEED: u64 = 0x5eed_f00d;
/// Slack for validation comparisons on evaluated set functions.
const VALIDATE_TOL: f64 = 1e-9;

/// Ground set `{0, .., p-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundSet {
    p: usize,
}

impl GroundSet {
    pub fn new(p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::invalid("ground set must have at least one element"));
        }
        if p > 64 {
            return Err(Error::capability(format!(
                "ground sets above 64 elements are not representable (got p={p})"
            )));
        }
        Ok(GroundSet { p })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// Bitmask of the full ground set.
    #[inline]
    pub fn full_mask(&self) -> u64 {
        if self.p == 64 {
            u64::MAX
        } else {
            (1u64 << self.p) - 1
        }
    }
}

type SetFnEval = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Cardinality,
    TruncatedCardinality(usize),
    /// Table of `g(0), g(1), .., g(p)` for a concave nondecreasing `g`.
    ConcaveCardinality(Arc<[f64]>),
    Custom(SetFnEval),
}

impl fmt::Debug for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Cardinality => write!(f, "Cardinality"),
            Kind::TruncatedCardinality(k) => write!(f, "TruncatedCardinality({k})"),
            Kind::ConcaveCardinality(g) => write!(f, "ConcaveCardinality({g:?})"),
            Kind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A validated nondecreasing submodular function with `F(∅) = 0` and strictly
/// positive singleton values.
#[derive(Debug, Clone)]
pub struct SubmodularFn {
    ground: GroundSet,
    kind: Kind,
}

impl SubmodularFn {
    /// `F(A) = |A|`; the induced norm is the L1 norm.
    pub fn cardinality(p: usize) -> Result<Self> {
        Self::with_kind(GroundSet::new(p)?, Kind::Cardinality)
    }

    /// `F(A) = min(|A|, k)`; `k = 1` induces the L-infinity norm.
    pub fn truncated_cardinality(p: usize, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid(
                "truncation level must be at least 1 (k = 0 kills the singletons)",
            ));
        }
        Self::with_kind(GroundSet::new(p)?, Kind::TruncatedCardinality(k))
    }

    /// `F(A) = g(|A|)` for a user-supplied concave nondecreasing `g` with
    /// `g(0) = 0` and `g(1) > 0`. `g` is tabulated at construction.
    pub fn concave_cardinality(p: usize, g: impl Fn(usize) -> f64) -> Result<Self> {
        let ground = GroundSet::new(p)?;
        let table: Vec<f64> = (0..=p).map(g).collect();
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("concave table contains non-finite values"));
        }
        Self::with_kind(ground, Kind::ConcaveCardinality(table.into()))
    }

    /// `F(A) = sqrt(|A|)`.
    pub fn sqrt_cardinality(p: usize) -> Result<Self> {
        Self::concave_cardinality(p, |k| (k as f64).sqrt())
    }

    /// Wraps an arbitrary evaluation closure over bitmask subsets. The
    /// closure is validated like every other kind.
    pub fn custom(p: usize, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::with_kind(GroundSet::new(p)?, Kind::Custom(Arc::new(f)))
    }

    fn with_kind(ground: GroundSet, kind: Kind) -> Result<Self> {
        let f = SubmodularFn { ground, kind };
        f.validate()?;
        Ok(f)
    }

    #[inline]
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.ground.p
    }

    /// Evaluates `F` on the subset encoded by `mask`.
    #[inline]
    pub fn eval(&self, mask: u64) -> f64 {
        debug_assert_eq!(mask & !self.ground.full_mask(), 0, "mask outside ground set");
        match &self.kind {
            Kind::Cardinality => mask.count_ones() as f64,
            Kind::TruncatedCardinality(k) => (mask.count_ones() as usize).min(*k) as f64,
            Kind::ConcaveCardinality(g) => g[mask.count_ones() as usize],
            Kind::Custom(f) => f(mask),
        }
    }

    /// One-line description used by reports.
    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Cardinality => "cardinality".to_string(),
            Kind::TruncatedCardinality(k) => format!("min(|A|, {k})"),
            Kind::ConcaveCardinality(_) => "concave-of-cardinality".to_string(),
            Kind::Custom(_) => "custom".to_string(),
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.ground.p;
        let empty = self.eval(0);
        if empty.is_nan() || empty.abs() > 1e-12 {
            return Err(Error::InvalidSetFunction(format!(
                "F(empty set) must be 0, got {empty}"
            )));
        }
        for j in 0..p {
            let v = self.eval(1u64 << j);
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidSetFunction(format!(
                    "F must be strictly positive on singletons, got F({{{j}}}) = {v}"
                )));
            }
        }
        if p <= VALIDATE_EXHAUSTIVE_P_MAX {
            self.validate_exhaustive()
        } else {
            self.validate_sampled()
        }
    }

    /// Checks the local characterizations on every subset:
    /// `F(A + i) >= F(A)` (nondecreasing) and
    /// `F(A + i) + F(A + j) >= F(A + i + j) + F(A)` (submodular).
    fn validate_exhaustive(&self) -> Result<()> {
        let p = self.ground.p;
        let full = self.ground.full_mask();
        for mask in 0..=full {
            let fa = self.eval(mask);
            if !fa.is_finite() {
                return Err(Error::InvalidSetFunction(format!(
                    "F({mask:#b}) is not finite"
                )));
            }
            for i in 0..p {
                let bi = 1u64 << i;
                if mask & bi != 0 {
                    continue;
                }
                let fai = self.eval(mask | bi);
                if fai < fa - VALIDATE_TOL {
                    return Err(Error::InvalidSetFunction(format!(
                        "not nondecreasing: F(A+{{{i}}}) = {fai} < F(A) = {fa} at A = {mask:#b}"
                    )));
                }
                for j in (i + 1)..p {
                    let bj = 1u64 << j;
                    if mask & bj != 0 {
                        continue;
                    }
                    let faj = self.eval(mask | bj);
                    let faij = self.eval(mask | bi | bj);
                    if fai + faj < faij + fa - VALIDATE_TOL {
                        return Err(Error::InvalidSetFunction(format!(
                            "not submodular at A = {mask:#b}, i = {i}, j = {j}: \
                             {fai} + {faj} < {faij} + {fa}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_sampled(&self) -> Result<()> {
        let full = self.ground.full_mask();
        let mut rng = stream_rng(VALIDATE_SEED, "setfn-validate", self.ground.p as u64);
        for _ in 0..VALIDATE_SAMPLES {
            let a = rng.random::<u64>() & full;
            let b = rng.random::<u64>() & full;
            let fa = self.eval(a);
            let fb = self.eval(b);
            let fu = self.eval(a | b);
            let fi = self.eval(a & b);
            if !(fa.is_finite() && fb.is_finite() && fu.is_finite() && fi.is_finite()) {
                return Err(Error::InvalidSetFunction("non-finite value".to_string()));
            }
            if fa + fb < fu + fi - VALIDATE_TOL {
                return Err(Error::InvalidSetFunction(format!(
                    "not submodular on sampled pair A = {a:#b}, B = {b:#b}"
                )));
            }
            // Monotonicity on the sampled chain A ⊆ A ∪ B.
            if fu < fa - VALIDATE_TOL || fu < fb - VALIDATE_TOL {
                return Err(Error::InvalidSetFunction(format!(
                    "not nondecreasing on sampled pair A = {a:#b}, B = {b:#b}"
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_vector(f: &SubmodularFn, v: &[f64], name: &str) -> Result<()> {
    if v.len() != f.p() {
        return Err(Error::invalid(format!(
            "{name} has dimension {} but the ground set has p = {}",
            v.len(),
            f.p()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("{name} contains non-finite entries")));
    }
    Ok(())
}
