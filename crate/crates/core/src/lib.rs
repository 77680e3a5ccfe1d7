//! Sparse regression with differential privacy, built on submodular
//! geometry: the support penalty is the Lovász extension of a set function
//! evaluated at coordinate magnitudes, its dual ball is a symmetric
//! polyhedron with a greedy linear oracle, and private release mechanisms
//! calibrate their noise to that polytope's width and diameter.
//!
//! Layout:
//! - [`submodular`]: set functions, the extension, the polyhedron, widths
//! - [`erm`]: datasets, losses, primal/dual solvers
//! - [`dp`]: release mechanisms and scaling experiments
//! - [`synth`]: reproducible task generators
//! - [`oracles`]: brute-force reference implementations for tests
//! - [`rng`]: named, collision-resistant random streams

pub mod dp;
pub mod erm;
pub mod error;
pub mod oracles;
pub mod rng;
pub mod submodular;
pub mod synth;

pub use dp::{MechanismKind, NoiseSpec, PrivacyParams, PrivateResult, Provenance};
pub use erm::{Dataset, DualProblem, ErmProblem, LossKind, LossModel, SolveReport};
pub use error::{Error, Result};
pub use submodular::{SubmodularFn, WidthEstimate};
