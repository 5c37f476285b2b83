//! Stochastic approximation schemes over variational inequality problems.

mod schemes;
mod tuning;

pub use schemes::{
    GeneratorSpec, Scheme, SchemeFactory, SchemeRegistry, SchemeSpec, SchemeStep,
};
pub use tuning::{
    mpsa_rate_objective, optimal_gamma0_mpsa, optimal_gamma0_strong, optimal_gamma0_weaksharp,
    rate_bound_constants, safety_bound_gamma0, strong_rate_objective, RateBound, WeakSharpTuning,
};

use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{generator_constants, prox_step, DistanceGenerator, PROJECTION_TOL};
use crate::problem::{Vector, ViProblem};
use crate::rng::Draw;

/// Checkpoint grid used by the benchmark tables.
pub const DEFAULT_CHECKPOINTS: &[u64] = &[1, 100, 1_000, 10_000, 15_000];

/// Diminishing steplength `gamma_k = gamma0 / k`, `k >= 1`; square-summable
/// but not summable.
pub fn steplength(k: u64, gamma0: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Index("steplength index starts at k = 1".into()));
    }
    if !(gamma0 > 0.0) {
        return Err(Error::Parameter(format!(
            "gamma0 must be positive, got {gamma0}"
        )));
    }
    Ok(gamma0 / k as f64)
}

/// One projection step `x+ = project(x - gamma (F(x) + w))`.
pub fn sa_step(problem: &ViProblem, x: &Vector, gamma: f64, draw: &Draw) -> Result<Vector> {
    let f = problem.evaluate_map(x, draw)?;
    problem.set.project(&(x - f * gamma))
}

/// Extragradient step: evaluate at the iterate, move to a midpoint, then
/// re-evaluate there with an independent draw before the real update.
pub fn esa_step(
    problem: &ViProblem,
    x: &Vector,
    gamma: f64,
    draw_first: &Draw,
    draw_second: &Draw,
) -> Result<(Vector, Vector)> {
    let f0 = problem.evaluate_map(x, draw_first)?;
    let midpoint = problem.set.project(&(x - f0 * gamma))?;
    let f1 = problem.evaluate_map(&midpoint, draw_second)?;
    let next = problem.set.project(&(x - f1 * gamma))?;
    Ok((midpoint, next))
}

/// Mirror-prox step: the extragradient pattern with both updates anchored at
/// the current iterate through the generator's prox mapping.
pub fn mpsa_step(
    problem: &ViProblem,
    gen: &DistanceGenerator,
    x: &Vector,
    gamma: f64,
    draw_first: &Draw,
    draw_second: &Draw,
) -> Result<(Vector, Vector)> {
    let f0 = problem.evaluate_map(x, draw_first)?;
    let midpoint = prox_step(gen, &problem.set, x, &(f0 * gamma))?;
    let f1 = problem.evaluate_map(&midpoint, draw_second)?;
    let next = prox_step(gen, &problem.set, x, &(f1 * gamma))?;
    Ok((midpoint, next))
}

/// Full run configuration for one sample path.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub scheme: SchemeSpec,
    pub gamma0: f64,
    pub iterations: u64,
    pub beta: f64,
    pub c: f64,
    pub c_bar: f64,
    pub master_seed: u64,
    /// Sample-path index; keys the noise streams together with the seed.
    pub path: u64,
    pub checkpoints: Vec<u64>,
    pub x0: Vector,
}

impl SolverConfig {
    pub fn new(scheme: SchemeSpec, gamma0: f64, iterations: u64, master_seed: u64, x0: Vector) -> Self {
        SolverConfig {
            scheme,
            gamma0,
            iterations,
            beta: 1.0,
            c: 1.0,
            c_bar: 0.5f64.sqrt(),
            master_seed,
            path: 0,
            checkpoints: DEFAULT_CHECKPOINTS.to_vec(),
            x0,
        }
    }

    pub fn with_path(mut self, path: u64) -> Self {
        self.path = path;
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<u64>) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    /// Hard-validates the scalar constants; soft conditions (steplength
    /// safety bound, prox-scheme constant constraint) come back as warnings
    /// because the benchmark protocols intentionally run outside them.
    pub fn validate(&self, problem: &ViProblem) -> Result<Vec<String>> {
        if !(self.gamma0 > 0.0) || !self.gamma0.is_finite() {
            return Err(Error::Config(format!("gamma0 = {} invalid", self.gamma0)));
        }
        if !(self.beta > 0.0) || !(self.c > 0.0) {
            return Err(Error::Config("beta and c must be positive".into()));
        }
        if !(self.c_bar > 0.0 && self.c_bar <= 0.5f64.sqrt() + 1e-12) {
            return Err(Error::Config(format!(
                "c_bar = {} outside (0, sqrt(1/2)]",
                self.c_bar
            )));
        }
        let slack = 1.0 - 1.0 / (1.0 + self.beta) - 1.0 / (1.0 + self.c);
        if slack < -1e-12 {
            return Err(Error::Config(format!(
                "constants violate 1 - 1/(1+beta) - 1/(1+c) >= 0 (got {slack})"
            )));
        }
        let mut warnings = Vec::new();
        if let SchemeSpec::Mpsa(gen_spec) = &self.scheme {
            let gen = gen_spec.build(problem.dim())?;
            if let Ok(consts) = generator_constants(&gen, &problem.set) {
                let prox_slack =
                    consts.theta / 2.0 - 1.0 / (1.0 + self.beta) - 1.0 / (1.0 + self.c);
                if prox_slack < 0.0 {
                    warnings.push(format!(
                        "prox constant condition theta/2 - 1/(1+beta) - 1/(1+c) = {prox_slack:.3e} < 0; convergence guarantee void",
                    ));
                }
            }
        }
        if let Some(consts) = &problem.constants {
            if consts.lipschitz > 0.0 {
                let theta = match &self.scheme {
                    SchemeSpec::Mpsa(gen_spec) => {
                        let gen = gen_spec.build(problem.dim())?;
                        generator_constants(&gen, &problem.set)
                            .map(|c| c.theta)
                            .unwrap_or(1.0)
                    }
                    _ => 1.0,
                };
                let bound =
                    safety_bound_gamma0(&self.scheme, consts.lipschitz, self.beta, theta);
                if self.gamma0 > bound {
                    warnings.push(format!(
                        "gamma0 = {:.4} exceeds the Lipschitz safety bound {:.4}; run relies on the bounded-map regime",
                        self.gamma0, bound
                    ));
                }
            }
        }
        Ok(warnings)
    }
}

/// Recorded output of one solver run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(k, x_k)` at the requested checkpoints; `(0, x_0)` is always first.
    pub checkpoints: Vec<(u64, Vector)>,
    pub final_iterate: Vector,
    /// Natural residuals per checkpoint, filled in by the harness.
    pub residuals: Vec<(u64, f64)>,
    pub seconds: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn at(&self, k: u64) -> Option<&Vector> {
        self.checkpoints
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, x)| x)
    }
}

/// Run the configured scheme for `iterations` steps with `gamma_k = gamma0/k`.
/// Deterministic in `(master_seed, path)`; an infeasible start is projected.
pub fn run(problem: &ViProblem, config: &SolverConfig) -> Result<Trajectory> {
    let scheme = config.scheme.build_scheme(&problem.set, problem.dim())?;
    run_with(problem, config, scheme.as_ref())
}

/// Run with an explicit scheme object (e.g. one built from a custom
/// registry). `config.scheme` is ignored in favor of `scheme`.
pub fn run_with(
    problem: &ViProblem,
    config: &SolverConfig,
    scheme: &dyn Scheme,
) -> Result<Trajectory> {
    let warnings = config.validate(problem)?;
    let start = Instant::now();
    let mut x = if problem.set.contains(&config.x0, PROJECTION_TOL) {
        config.x0.clone()
    } else {
        problem.set.project(&config.x0)?
    };

    let mut wanted: Vec<u64> = config
        .checkpoints
        .iter()
        .copied()
        .filter(|&k| k >= 1 && k <= config.iterations)
        .collect();
    wanted.sort_unstable();
    wanted.dedup();

    let mut recorded = Vec::with_capacity(wanted.len() + 1);
    recorded.push((0, x.clone()));

    for k in 1..=config.iterations {
        let gamma = steplength(k, config.gamma0)?;
        let first = Draw::first(config.master_seed, config.path, k);
        let second = Draw::second(config.master_seed, config.path, k);
        let step = scheme
            .step(problem, &x, gamma, &first, &second)
            .map_err(|e| e.at_iteration(k))?;
        x = step.next;
        debug_assert!(problem.set.contains(&x, 10.0 * PROJECTION_TOL));
        if wanted.binary_search(&k).is_ok() {
            recorded.push((k, x.clone()));
        }
    }

    Ok(Trajectory {
        checkpoints: recorded,
        final_iterate: x,
        residuals: Vec::new(),
        seconds: start.elapsed().as_secs_f64(),
        warnings,
    })
}
