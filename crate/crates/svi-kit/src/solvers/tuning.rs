//! Steplength safety bounds, optimal initial steplengths, and the constants
//! behind the `O(1/K)` mean-squared-error bound.

use crate::error::{Error, Result};
use crate::solvers::SchemeSpec;

fn require_positive(value: f64, what: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Parameter(format!(
            "{what} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// Largest initial steplength covered by the almost-sure convergence
/// guarantees. Returns infinity when the map has no Lipschitz slope
/// (`lipschitz = 0`), matching the bounded-map rate regime.
pub fn safety_bound_gamma0(scheme: &SchemeSpec, lipschitz: f64, beta: f64, theta: f64) -> f64 {
    if lipschitz <= 0.0 {
        return f64::INFINITY;
    }
    match scheme {
        // The plain projection scheme is run under the extragradient bound.
        SchemeSpec::Sa | SchemeSpec::Esa => {
            (1.0 / lipschitz) * (1.0 / (2.0 * (1.0 + beta))).sqrt()
        }
        SchemeSpec::Mpsa(_) => theta.sqrt() / (2.0 * lipschitz * (1.0 + beta).sqrt()),
    }
}

/// Minimizer `(1 + sqrt(33)) / (4 sigma)` of the strong-pseudomonotone rate
/// constant; satisfies `sigma * gamma0 > 1`.
pub fn optimal_gamma0_strong(sigma: f64) -> Result<f64> {
    require_positive(sigma, "sigma")?;
    Ok((1.0 + 33.0f64.sqrt()) / (4.0 * sigma))
}

/// Positive root of the mirror-prox rate stationarity condition.
pub fn optimal_gamma0_mpsa(l_v: f64, sigma: f64, theta: f64) -> Result<f64> {
    require_positive(l_v, "l_v")?;
    require_positive(sigma, "sigma")?;
    require_positive(theta, "theta")?;
    let lv2 = l_v * l_v;
    let head = (6.0 * lv2 - theta * theta) / (8.0 * sigma);
    let radicand =
        5.0 * theta * theta * lv2 / 16.0 + 9.0 * lv2 * lv2 / 16.0 + theta.powi(4) / 64.0;
    Ok(head + radicand.sqrt() / sigma)
}

/// Optimal tuning under monotonicity plus weak sharpness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakSharpTuning {
    pub gamma0: f64,
    pub beta: f64,
    pub c: f64,
    pub c_bar: f64,
}

/// Closed-form minimizer of the weak-sharp rate constant: the product of a
/// scalar convex function of `gamma0` and a separable convex function of
/// `(c, beta, c_bar)` minimized over their own sets.
pub fn optimal_gamma0_weaksharp(
    set_radius: f64,
    sharpness: f64,
    noise: f64,
    lipschitz: f64,
) -> Result<WeakSharpTuning> {
    require_positive(set_radius, "set radius")?;
    require_positive(sharpness, "sharpness modulus")?;
    require_positive(noise, "noise level")?;
    require_positive(lipschitz, "lipschitz constant")?;
    let beta = noise / (2.0f64.sqrt() * lipschitz * set_radius);
    Ok(WeakSharpTuning {
        gamma0: 2.0 * set_radius / sharpness,
        beta,
        c: 1.0 / beta,
        c_bar: 0.5f64.sqrt(),
    })
}

/// Constants of the mean-squared-error bound `psi_b(x_K) = M / K` for the
/// affine benchmark instance with price intercept `a` over `n` players.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RateBound {
    pub m_b: f64,
    pub m_nu: f64,
    pub m: f64,
}

impl RateBound {
    pub fn psi_b(&self, k: u64) -> f64 {
        self.m / k as f64
    }
}

/// `M_B = 4 a^2 n (2 sigma gamma0 + (1+beta))`,
/// `M_nu = 2 ((1+c) + sigma gamma0) nu^2`,
/// `M = gamma0^2 (M_nu + M_B) / (sigma gamma0 - 1)`.
pub fn rate_bound_constants(
    sigma: f64,
    gamma0: f64,
    a: f64,
    n: usize,
    nu_sq: f64,
    beta: f64,
    c: f64,
) -> Result<RateBound> {
    require_positive(sigma, "sigma")?;
    require_positive(gamma0, "gamma0")?;
    if a < 0.0 || nu_sq < 0.0 {
        return Err(Error::Parameter("a and nu^2 must be nonnegative".into()));
    }
    let sg = sigma * gamma0;
    if sg <= 1.0 {
        return Err(Error::BoundUndefined { sigma_gamma0: sg });
    }
    let m_b = 4.0 * a * a * n as f64 * (2.0 * sg + (1.0 + beta));
    let m_nu = 2.0 * ((1.0 + c) + sg) * nu_sq;
    let m = gamma0 * gamma0 * (m_nu + m_b) / (sg - 1.0);
    Ok(RateBound { m_b, m_nu, m })
}

/// Rate constant of the strong-pseudomonotone proof as a function of
/// `gamma0` (the branch that the optimal steplength minimizes):
/// `gamma0^2 (4 b_sq + 4 nu_sq + 2 sigma gamma0 (b_sq + nu_sq)) / (sigma gamma0 - 1)`.
pub fn strong_rate_objective(sigma: f64, b_sq: f64, nu_sq: f64, gamma0: f64) -> f64 {
    let sg = sigma * gamma0;
    if sg <= 1.0 {
        return f64::INFINITY;
    }
    let t0 = 4.0 * b_sq + 4.0 * nu_sq + 2.0 * sg * (b_sq + nu_sq);
    gamma0 * gamma0 * t0 / (sg - 1.0)
}

/// Mirror-prox analogue with generator constants `(l_v, theta)`:
/// `gamma0^2 l_v^2 t0 / (sigma gamma0 - l_v^2)` with
/// `t0 = 4 (b_sq + nu_sq) + 8 sigma gamma0 (b_sq + nu_sq) / theta^2`.
pub fn mpsa_rate_objective(
    sigma: f64,
    b_sq: f64,
    nu_sq: f64,
    l_v: f64,
    theta: f64,
    gamma0: f64,
) -> f64 {
    let lv2 = l_v * l_v;
    let sg = sigma * gamma0;
    if sg <= lv2 {
        return f64::INFINITY;
    }
    let w = b_sq + nu_sq;
    let t0 = 4.0 * w + 8.0 * sg * w / (theta * theta);
    gamma0 * gamma0 * lv2 * t0 / (sg - lv2)
}
