//! Solvers and a benchmark harness for stochastic variational inequalities.
//!
//! The crate provides three stochastic approximation schemes over a problem
//! abstraction (`set` + sampled map oracle): a plain projection scheme, an
//! extragradient scheme, and a mirror-prox generalization parametrized by a
//! Bregman distance generator. A suite of randomized test problems, property
//! samplers, and a Monte-Carlo experiment runner round out the kit; the
//! `svi-kit` binary exposes the experiments as CLI subcommands.

pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::{DistanceGenerator, FeasibleSet};
pub use problem::{MapConstants, Matrix, Vector, ViProblem};
pub use problems::Family;
pub use rng::{Draw, HalfStep};
pub use solvers::{Scheme, SchemeRegistry, SchemeSpec, SolverConfig, Trajectory};
