//! Problem abstraction: a feasible set together with a sampled map oracle
//! and, when available, the exact mean map.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::rng::Draw;

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

/// Constants attached to a map when they are known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MapConstants {
    /// Slope `L` of the growth bound `|F(x) - F(y)| <= L|x - y| + B`.
    pub lipschitz: f64,
    /// Additive slack `B` of the growth bound (also a uniform bound on `2|F|`
    /// when `L = 0`).
    pub growth_slack: f64,
    /// Uniform bound `C` on `|F(x)|` over the set, when finite.
    pub sup_norm: f64,
    /// Strong (pseudo)monotonicity modulus `sigma`.
    pub strong_modulus: f64,
}

pub type SampleFn = dyn Fn(&Vector, &Draw) -> Result<Vector> + Send + Sync;
pub type MeanFn = dyn Fn(&Vector) -> Result<Vector> + Send + Sync;

/// A stochastic variational inequality instance: find `x*` in the set with
/// `(x - x*)' F(x*) >= 0` for all feasible `x`, where `F` is the expectation
/// of the sampled map.
#[derive(Clone)]
pub struct ViProblem {
    pub set: FeasibleSet,
    sample: Arc<SampleFn>,
    mean: Option<Arc<MeanFn>>,
    /// Bound `nu^2` on the conditional second moment of the noise, when known.
    pub noise_bound: Option<f64>,
    pub constants: Option<MapConstants>,
    /// Analytic solution, when one is known in closed form.
    pub solution: Option<Vector>,
    pub label: String,
}

impl fmt::Debug for ViProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ViProblem")
            .field("label", &self.label)
            .field("dim", &self.set.dim())
            .field("noise_bound", &self.noise_bound)
            .field("constants", &self.constants)
            .finish()
    }
}

impl ViProblem {
    pub fn new(set: FeasibleSet, label: impl Into<String>, sample: Arc<SampleFn>) -> Self {
        ViProblem {
            set,
            sample,
            mean: None,
            noise_bound: None,
            constants: None,
            solution: None,
            label: label.into(),
        }
    }

    pub fn with_mean(mut self, mean: Arc<MeanFn>) -> Self {
        self.mean = Some(mean);
        self
    }

    pub fn with_noise_bound(mut self, nu_sq: f64) -> Self {
        self.noise_bound = Some(nu_sq);
        self
    }

    pub fn with_constants(mut self, constants: MapConstants) -> Self {
        self.constants = Some(constants);
        self
    }

    pub fn with_solution(mut self, solution: Vector) -> Self {
        self.solution = Some(solution);
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn has_exact_mean(&self) -> bool {
        self.mean.is_some()
    }

    /// One sampled evaluation `F(x; omega)` for the realization addressed by
    /// `draw`. Feasibility of `x` is not required.
    pub fn evaluate_map(&self, x: &Vector, draw: &Draw) -> Result<Vector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let out = (self.sample)(x, draw)?;
        if out.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: out.len(),
            });
        }
        Ok(out)
    }

    /// Exact mean map, when the instance carries one.
    pub fn mean_map(&self, x: &Vector) -> Result<Vector> {
        match &self.mean {
            Some(mean) => mean(x),
            None => Err(Error::Unsupported(format!(
                "{}: no exact mean map attached",
                self.label
            ))),
        }
    }

    /// Mean-map estimate: exact when available, otherwise an `n_samples`-draw
    /// average on a dedicated stream derived from `seed`.
    pub fn mean_estimate(&self, x: &Vector, n_samples: usize, seed: u64) -> Result<Vector> {
        if let Some(mean) = &self.mean {
            return mean(x);
        }
        if n_samples == 0 {
            return Err(Error::Parameter(
                "mean estimation needs at least one sample".into(),
            ));
        }
        let mut acc = Vector::zeros(self.dim());
        for i in 0..n_samples {
            let draw = Draw::first(seed, MEAN_ESTIMATE_PATH, i as u64);
            acc += self.evaluate_map(x, &draw)?;
        }
        Ok(acc / n_samples as f64)
    }
}

/// Reserved path index for mean-estimation draws so they never collide with
/// solver sample paths.
pub const MEAN_ESTIMATE_PATH: u64 = u64::MAX - 1;

/// Free-function form of [`ViProblem::evaluate_map`].
pub fn evaluate_map(problem: &ViProblem, x: &Vector, draw: &Draw) -> Result<Vector> {
    problem.evaluate_map(x, draw)
}
