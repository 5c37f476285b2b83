//! Oligopoly pricing games: the concave-price game over a shared
//! box-polyhedron, and the affine-price benchmark instance with known
//! solution and rate constants.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::problem::{MapConstants, Matrix, Vector, ViProblem};
use crate::problems::{Family, NOISE_EPS};
use crate::rng::{instance_rng, Draw};

struct CournotParams {
    a: f64,
    kappa: f64,
    noise: bool,
}

impl CournotParams {
    /// Price slope realization: uniform with mean 1 and standard deviation
    /// `NOISE_EPS`; deterministic slope 1 with noise off.
    fn slope(&self, draw: &Draw) -> f64 {
        if !self.noise {
            return 1.0;
        }
        let half_width = NOISE_EPS * 3.0f64.sqrt();
        draw.rng().random_range(1.0 - half_width..1.0 + half_width)
    }

    /// Negated player payoff gradients, one coordinate per player.
    fn map(&self, x: &Vector, draw: &Draw) -> Result<Vector> {
        let b = self.slope(draw);
        let total: f64 = x.sum();
        let base = self.a - b * total;
        if base <= 0.0 {
            return Err(Error::MapDomain {
                quantity: "price base",
                value: base,
            });
        }
        let price = base.powf(self.kappa);
        let marginal = self.kappa * b * base.powf(self.kappa - 1.0);
        Ok(Vector::from_fn(x.len(), |i, _| -(price - marginal * x[i])))
    }
}

/// Largest attainable aggregate over the feasible set, estimated by
/// projected subgradient ascent on the sum. Used only to certify price
/// positivity when the raw box-corner bound is too loose.
fn estimate_max_aggregate(set: &FeasibleSet, n: usize) -> Result<f64> {
    let ones = Vector::from_element(n, 1.0);
    let mut x = set.project(&Vector::zeros(n))?;
    let mut best = x.sum();
    let scale = 3.0 * n as f64;
    for t in 1..=1500u64 {
        let step = scale / (t as f64).sqrt();
        x = set.project(&(&x + &ones * step))?;
        best = best.max(x.sum());
    }
    Ok(best)
}

/// Concave-price game over `{ A x <= v, 0 <= x <= 3n }` with price
/// `(a - b x_total)^kappa`, `a = 100 ceil(n/3)`.
pub fn gen_cournot(n: usize, kappa: f64, instance_seed: u64) -> Result<ViProblem> {
    gen_cournot_with(n, kappa, instance_seed, true)
}

pub fn gen_cournot_with(n: usize, kappa: f64, instance_seed: u64, noise: bool) -> Result<ViProblem> {
    if n < 2 {
        return Err(Error::Parameter("the game needs n >= 2 players".into()));
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Parameter(format!(
            "kappa must lie in (0, 1), got {kappa}"
        )));
    }
    let family = Family::Cournot;
    let a = 100.0 * (n as f64 / 3.0).ceil();
    let m = n.div_ceil(10);
    let mut rng = instance_rng(instance_seed, family.tag());
    let a_mat = Matrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let v = Vector::from_fn(m, |_, _| rng.random_range(0.0..1.0));
    let set = FeasibleSet::box_polyhedron(
        a_mat,
        v,
        Vector::zeros(n),
        Vector::from_element(n, 3.0 * n as f64),
    )?;

    // Certify a positive price base over the feasible set for slopes within
    // six standard deviations of their mean.
    let slope_cap = 1.0 + 6.0 * NOISE_EPS;
    let corner_aggregate = 3.0 * (n * n) as f64;
    let aggregate_cap = if a > slope_cap * corner_aggregate {
        corner_aggregate
    } else {
        1.1 * estimate_max_aggregate(&set, n)?
    };
    if a <= slope_cap * aggregate_cap {
        return Err(Error::Generation {
            family: family.name(),
            reason: format!(
                "price base can reach {:.3} <= 0 on the feasible set",
                a - slope_cap * aggregate_cap
            ),
        });
    }

    let params = Arc::new(CournotParams { a, kappa, noise });
    Ok(ViProblem::new(
        set,
        format!("{}-n{}-s{}", family.name(), n, instance_seed),
        Arc::new(move |x: &Vector, draw: &Draw| params.map(x, draw)),
    ))
}

/// Affine-price benchmark instance: mean map `b (I + ee')x - a e` over the
/// unit box, `a = 0.1 ceil(n/10)`, `b = a/n`, with per-draw slope
/// `Normal(b, (0.025 b)^2)`. Ships its analytic solution `(n/(n+1)) e` and
/// the closed-form rate constants.
pub fn gen_rate_cournot(n: usize, instance_seed: u64) -> Result<ViProblem> {
    gen_rate_cournot_with(n, instance_seed, true)
}

pub fn gen_rate_cournot_with(n: usize, instance_seed: u64, noise: bool) -> Result<ViProblem> {
    if n < 2 {
        return Err(Error::Parameter("the rate instance needs n >= 2".into()));
    }
    // The instance is parameter-free given n; the seed only labels it.
    let _ = instance_seed;
    let family = Family::RateCournot;
    let a = 0.1 * (n as f64 / 10.0).ceil();
    let b = a / n as f64;
    let eps = NOISE_EPS * b;
    let nf = n as f64;

    let set = FeasibleSet::bounded_box(Vector::zeros(n), Vector::from_element(n, 1.0))?;
    let affine = move |slope: f64, x: &Vector| -> Vector {
        let total: f64 = x.sum();
        Vector::from_fn(x.len(), |i, _| slope * (x[i] + total) - a)
    };

    let sample = {
        let affine = affine;
        move |x: &Vector, draw: &Draw| -> Result<Vector> {
            let slope = if noise {
                b + eps * draw.rng().sample::<f64, _>(StandardNormal)
            } else {
                b
            };
            Ok(affine(slope, x))
        }
    };
    let mean = move |x: &Vector| -> Result<Vector> { Ok(affine(b, x)) };

    Ok(ViProblem::new(
        set,
        format!("{}-n{}", family.name(), n),
        Arc::new(sample),
    )
    .with_mean(Arc::new(mean))
    .with_noise_bound(nf * (nf + 1.0) * (nf + 1.0) * eps * eps)
    .with_constants(MapConstants {
        lipschitz: b * (nf + 1.0),
        growth_slack: 2.0 * a * nf.sqrt(),
        sup_norm: a * nf.sqrt(),
        strong_modulus: b,
    })
    .with_solution(Vector::from_element(n, nf / (nf + 1.0))))
}
