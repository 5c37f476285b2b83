//! Stochastic fractional problems: a random convex quadratic numerator over
//! a deterministic positive denominator (linear or exponential), minimized
//! over a box-polyhedron. The solvers consume the gradient map of the ratio.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::problem::{Matrix, Vector, ViProblem};
use crate::problems::{Family, NOISE_EPS};
use crate::rng::{instance_rng, Draw};

/// Scale of the deterministic quadratic term.
const QUAD_WEIGHT: f64 = 0.025;
const MAX_GENERATION_ATTEMPTS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Denominator {
    Linear,
    Exponential,
}

struct FracParams {
    n: usize,
    base_quad: Matrix, // QUAD_WEIGHT * U U'
    base_quad_frobenius: f64,
    c: Vector,
    r: Vector,
    t: f64,
    denominator: Denominator,
    noise: bool,
}

impl FracParams {
    fn lambda_cap(&self) -> f64 {
        // Exponential-denominator ceiling e^{(8n+2)/2000}.
        ((8.0 * self.n as f64 + 2.0) / 2000.0).exp()
    }

    fn denominator(&self, x: &Vector) -> (f64, Vector) {
        let affine = self.r.dot(x) + self.t + 4.0 * self.n as f64;
        match self.denominator {
            Denominator::Linear => (affine, self.r.clone()),
            Denominator::Exponential => {
                let ew = (affine / 2000.0).exp();
                let g = 1e4 * (self.lambda_cap() - ew);
                let grad = &self.r * (-1e4 * ew / 2000.0);
                (g, grad)
            }
        }
    }

    /// Value and gradient of the sampled ratio at `x` for the realization
    /// addressed by `draw`.
    fn map(&self, x: &Vector, draw: &Draw) -> Result<Vector> {
        let n = self.n;
        // Numerator: 0.5 x'(Q + lambda V)x + 0.5 (a'x + 4n)^2 with
        // Q = QUAD_WEIGHT U U', a = c + c_bar, and lambda normalizing the
        // per-draw perturbation V to relative Frobenius scale NOISE_EPS.
        let (quad_grad, quad_value, a) = if self.noise {
            let mut rng = draw.rng();
            let v = Matrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
            let c_bar = Vector::from_fn(n, |_, _| rng.random_range(0.0..1.0));
            let lambda = NOISE_EPS * self.base_quad_frobenius / v.norm();
            let vx = &v * x;
            let vtx = v.transpose() * x;
            let quad_grad = &self.base_quad * x + (&vx + &vtx) * (0.5 * lambda);
            let quad_value = 0.5 * x.dot(&(&self.base_quad * x)) + 0.5 * lambda * x.dot(&vx);
            (quad_grad, quad_value, &self.c + c_bar)
        } else {
            let quad_grad = &self.base_quad * x;
            let quad_value = 0.5 * x.dot(&quad_grad);
            (quad_grad, quad_value, &self.c + Vector::from_element(n, 0.5))
        };
        let affine = a.dot(x) + 4.0 * n as f64;
        let numerator = quad_value + 0.5 * affine * affine;
        let numerator_grad = quad_grad + &a * affine;

        let (g, g_grad) = self.denominator(x);
        if g <= 0.0 {
            return Err(Error::MapDomain {
                quantity: "fractional denominator",
                value: g,
            });
        }
        Ok(numerator_grad / g - g_grad * (numerator / (g * g)))
    }
}

fn generate(
    n: usize,
    instance_seed: u64,
    denominator: Denominator,
    noise: bool,
) -> Result<ViProblem> {
    if n < 2 {
        return Err(Error::Parameter("fractional problems need n >= 2".into()));
    }
    let family = match denominator {
        Denominator::Linear => Family::FracQuad,
        Denominator::Exponential => Family::FracNonlin,
    };
    let m = n.div_ceil(10);
    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        let mut rng = instance_rng(instance_seed, family.tag() | (attempt << 32));
        let u = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let c = Vector::from_fn(n, |_, _| rng.sample(StandardNormal));
        let r = Vector::from_fn(n, |_, _| rng.random_range(0.0..1.0));
        let t: f64 = rng.random_range(0.0..1.0);
        let a_mat = Matrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let v = Vector::from_fn(m, |_, _| rng.random_range(0.0..1.0));

        let base_quad = &u * u.transpose() * QUAD_WEIGHT;
        let base_quad_frobenius = base_quad.norm();
        let params = FracParams {
            n,
            base_quad,
            base_quad_frobenius,
            c,
            r,
            t,
            denominator,
            noise,
        };

        // The denominator must stay positive over the whole box; with
        // nonnegative r the extremes sit at the box corners.
        let r_sum: f64 = params.r.sum();
        let positive = match denominator {
            Denominator::Linear => params.t + 4.0 * n as f64 > 0.0,
            Denominator::Exponential => 4.0 * r_sum + params.t < 4.0 * n as f64 + 2.0,
        };
        if !positive {
            continue;
        }
        let set = match FeasibleSet::box_polyhedron(
            a_mat,
            v,
            Vector::zeros(n),
            Vector::from_element(n, 4.0),
        ) {
            Ok(set) => set,
            Err(Error::InfeasibleSet { .. }) => continue,
            Err(e) => return Err(e),
        };

        let params = Arc::new(params);
        let map_params = params.clone();
        return Ok(ViProblem::new(
            set,
            format!("{}-n{}-s{}", family.name(), n, instance_seed),
            Arc::new(move |x: &Vector, draw: &Draw| map_params.map(x, draw)),
        ));
    }
    Err(Error::Generation {
        family: family.name(),
        reason: format!("no valid instance after {MAX_GENERATION_ATTEMPTS} attempts"),
    })
}

/// Fractional problem with a linear denominator `g(x) = r'x + t + 4n`.
pub fn gen_frac_quad(n: usize, instance_seed: u64) -> Result<ViProblem> {
    generate(n, instance_seed, Denominator::Linear, true)
}

pub fn gen_frac_quad_with(n: usize, instance_seed: u64, noise: bool) -> Result<ViProblem> {
    generate(n, instance_seed, Denominator::Linear, noise)
}

/// Fractional problem with the exponential denominator
/// `g(x) = 1e4 (lambda - e^{(r'x + t + 4n)/2000})`, `lambda = e^{(8n+2)/2000}`.
pub fn gen_frac_nonlin(n: usize, instance_seed: u64) -> Result<ViProblem> {
    generate(n, instance_seed, Denominator::Exponential, true)
}

pub fn gen_frac_nonlin_with(n: usize, instance_seed: u64, noise: bool) -> Result<ViProblem> {
    generate(n, instance_seed, Denominator::Exponential, noise)
}
