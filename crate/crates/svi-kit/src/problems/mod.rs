//! Generators for the benchmark test-problem suite. Each generator returns a
//! [`ViProblem`] whose sampled map pulls its noise from per-draw streams,
//! while "generated once" instance parameters come from a separate
//! instance-seed namespace.

mod cournot;
mod fractional;
mod watson;

pub use cournot::{gen_cournot, gen_cournot_with, gen_rate_cournot, gen_rate_cournot_with};
pub use fractional::{gen_frac_nonlin, gen_frac_nonlin_with, gen_frac_quad, gen_frac_quad_with};
pub use watson::{
    gen_watson, gen_watson_with, load_watson_matrix, parse_watson_matrix, watson_matrix,
    WATSON_CHECKSUM,
};

use crate::error::{Error, Result};
use crate::problem::{Vector, ViProblem};

/// Noise scale shared by the whole suite.
pub const NOISE_EPS: f64 = 0.025;

/// Benchmark problem families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    FracQuad,
    FracNonlin,
    Cournot,
    Watson,
    RateCournot,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "frac-quad" | "fracquad" => Ok(Family::FracQuad),
            "frac-nonlin" | "fracnonlin" => Ok(Family::FracNonlin),
            "cournot" | "nash-cournot" => Ok(Family::Cournot),
            "watson" | "watson-cp" => Ok(Family::Watson),
            "rate-cournot" => Ok(Family::RateCournot),
            other => Err(Error::Config(format!("unknown problem family '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::FracQuad => "frac-quad",
            Family::FracNonlin => "frac-nonlin",
            Family::Cournot => "cournot",
            Family::Watson => "watson",
            Family::RateCournot => "rate-cournot",
        }
    }

    pub(crate) fn tag(&self) -> u64 {
        match self {
            Family::FracQuad => 0x11,
            Family::FracNonlin => 0x12,
            Family::Cournot => 0x13,
            Family::Watson => 0x14,
            Family::RateCournot => 0x15,
        }
    }

    /// Benchmark default initial steplength per family.
    pub fn default_gamma0(&self) -> f64 {
        match self {
            Family::FracQuad => 1.0,
            Family::FracNonlin => 2.5,
            Family::Cournot => 2.5,
            Family::Watson => 0.6,
            Family::RateCournot => 2.5,
        }
    }

    /// Benchmark default start: `2e` for the fractional problems, the origin
    /// for the rest.
    pub fn default_x0(&self, dim: usize) -> Vector {
        match self {
            Family::FracQuad | Family::FracNonlin => Vector::from_element(dim, 2.0),
            _ => Vector::zeros(dim),
        }
    }

    /// Default half-open size parameter range used by the CLI when `--n` is
    /// omitted: dimension for the map families, instance index for the LCP
    /// family (which is fixed at ten variables).
    pub fn default_size_range(&self) -> (usize, usize) {
        match self {
            Family::Watson => (1, 10),
            Family::RateCournot => (5, 10),
            _ => (10, 19),
        }
    }

    /// Build one instance. For [`Family::Watson`] `size` is the unit-vector
    /// index `1..=10`; for every other family it is the dimension.
    pub fn generate(&self, size: usize, instance_seed: u64, kappa: f64) -> Result<ViProblem> {
        match self {
            Family::FracQuad => gen_frac_quad(size, instance_seed),
            Family::FracNonlin => gen_frac_nonlin(size, instance_seed),
            Family::Cournot => gen_cournot(size, kappa, instance_seed),
            Family::Watson => gen_watson(size, instance_seed),
            Family::RateCournot => gen_rate_cournot(size, instance_seed),
        }
    }
}
