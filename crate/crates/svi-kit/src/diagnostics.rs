//! Solution-quality metrics, empirical map-property samplers, and numeric
//! validators for the supporting recursion and product-minimization lemmas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::problem::{Vector, ViProblem};
use crate::rng::{uniform_vector, Draw};
use crate::solvers::Trajectory;

/// Relative tolerance scale for the implication-style property samplers.
pub const SAMPLER_TOL: f64 = 1e-8;

/// Map properties probed by the samplers. A report never certifies a
/// property; it can only fail to find a violation at the stated tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyKind {
    Monotone,
    Pseudomonotone,
    StrictlyPseudomonotone,
    StronglyPseudomonotone,
    WeakSharp,
}

impl PropertyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PropertyKind::Monotone => "monotone",
            PropertyKind::Pseudomonotone => "pseudomonotone",
            PropertyKind::StrictlyPseudomonotone => "strictly-pseudomonotone",
            PropertyKind::StronglyPseudomonotone => "strongly-pseudomonotone",
            PropertyKind::WeakSharp => "weak-sharp",
        }
    }
}

/// A recorded counterexample pair with its witness inner products.
#[derive(Debug, Clone)]
pub struct Violation {
    pub x: Vector,
    pub y: Vector,
    pub premise: f64,
    pub conclusion: f64,
}

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub property: PropertyKind,
    pub pairs_tested: usize,
    pub violations: Vec<Violation>,
    pub modulus: Option<f64>,
}

impl PropertyReport {
    pub fn no_violation_found(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Norm of the natural map `x - project(x - F(x))` under the exact mean map
/// when available, otherwise an `mean_samples`-draw average seeded by `seed`.
/// Zero exactly at solutions.
pub fn natural_residual(
    problem: &ViProblem,
    x: &Vector,
    mean_samples: usize,
    seed: u64,
) -> Result<f64> {
    let f = problem.mean_estimate(x, mean_samples, seed)?;
    let projected = problem.set.project(&(x - f))?;
    Ok((x - projected).norm())
}

/// Draw a feasible point: uniform over the sampling box, then projected.
fn sample_feasible(set: &FeasibleSet, draw: &Draw) -> Result<Vector> {
    let (lo, hi) = set.sampling_bounds();
    let mut raw = uniform_vector(draw, set.dim(), 0.0, 1.0)?;
    for i in 0..raw.len() {
        raw[i] = lo[i] + raw[i] * (hi[i] - lo[i]);
    }
    set.project(&raw)
}

type PointMap<'a> = &'a dyn Fn(&Vector) -> Result<Vector>;

/// Search for pairs violating "`(x-y)'F(y) >= 0` implies `(x-y)'F(x) >= 0`".
/// The tolerance is relative: a pair counts as a violation only when the
/// premise clears `+tol_eff` and the conclusion falls below `-tol_eff` with
/// `tol_eff = tol (1 + |F(y)| |x-y|)`.
pub fn pseudomonotonicity_sampler(
    map: PointMap<'_>,
    set: &FeasibleSet,
    n_pairs: usize,
    tol: f64,
    base: &Draw,
) -> Result<PropertyReport> {
    let mut violations = Vec::new();
    for pair in 0..n_pairs {
        let x = sample_feasible(set, &Draw::first(base.master_seed, base.path, 2 * pair as u64))?;
        let y = sample_feasible(
            set,
            &Draw::first(base.master_seed, base.path, 2 * pair as u64 + 1),
        )?;
        let d = &x - &y;
        let fy = map(&y)?;
        let premise = d.dot(&fy);
        let tol_eff = tol * (1.0 + fy.norm() * d.norm());
        if premise >= tol_eff {
            let fx = map(&x)?;
            let conclusion = d.dot(&fx);
            if conclusion < -tol_eff {
                violations.push(Violation {
                    x,
                    y,
                    premise,
                    conclusion,
                });
            }
        }
    }
    Ok(PropertyReport {
        property: PropertyKind::Pseudomonotone,
        pairs_tested: n_pairs,
        violations,
        modulus: None,
    })
}

/// Upper estimate of the strong pseudomonotonicity modulus: the smallest
/// `(x-y)'F(x) / |x-y|^2` over sampled pairs whose premise holds.
pub fn strong_modulus_estimate(
    map: PointMap<'_>,
    set: &FeasibleSet,
    n_pairs: usize,
    base: &Draw,
) -> Result<f64> {
    let mut best: Option<f64> = None;
    for pair in 0..n_pairs {
        let x = sample_feasible(set, &Draw::first(base.master_seed, base.path, 2 * pair as u64))?;
        let y = sample_feasible(
            set,
            &Draw::first(base.master_seed, base.path, 2 * pair as u64 + 1),
        )?;
        let d = &x - &y;
        let dd = d.norm_squared();
        if dd < 1e-20 {
            continue;
        }
        if d.dot(&map(&y)?) >= 0.0 {
            let ratio = d.dot(&map(&x)?) / dd;
            best = Some(best.map_or(ratio, |b: f64| b.min(ratio)));
        }
    }
    best.ok_or(Error::EstimateUnavailable)
}

/// Lower-envelope estimate of the weak-sharpness modulus around a verified
/// solution treated as a singleton solution set: the smallest
/// `(x - x*)'F(x*) / |x - x*|` over sampled feasible `x != x*`. Zero when
/// the solution is interior, which is reported, not hidden.
pub fn weak_sharp_estimate(
    map: PointMap<'_>,
    set: &FeasibleSet,
    x_star: &Vector,
    n_points: usize,
    base: &Draw,
) -> Result<f64> {
    let f_star = map(x_star)?;
    let residual = (x_star - set.project(&(x_star - &f_star))?).norm();
    if residual > 1e-6 {
        return Err(Error::Precondition(format!(
            "x_star natural residual {residual:.3e} exceeds 1e-6"
        )));
    }
    let mut best: Option<f64> = None;
    for i in 0..n_points {
        let x = sample_feasible(set, &Draw::first(base.master_seed, base.path, i as u64))?;
        let d = &x - x_star;
        let norm = d.norm();
        if norm < 1e-12 {
            continue;
        }
        let ratio = d.dot(&f_star) / norm;
        best = Some(best.map_or(ratio, |b: f64| b.min(ratio)));
    }
    best.ok_or(Error::EstimateUnavailable)
}

/// Iterate `a_{k+1} = (1 - 2 c theta / k)_+ a_k + theta^2 M^2 / (2 k^2)` and
/// verify `2 a_k <= max(theta^2 M^2 / (2 c theta - 1), 2 a_1) / k` along the
/// whole trajectory. The contraction factor is clamped at zero for the early
/// indices where it would go negative.
pub fn recursion_bound_check(theta: f64, m: f64, c: f64, a1: f64, k_max: u64) -> Result<bool> {
    if !(theta > 0.0) || !(m >= 0.0) || !(c > 0.0) || !(a1 >= 0.0) {
        return Err(Error::Parameter(
            "recursion needs theta, c > 0 and M, a1 >= 0".into(),
        ));
    }
    if 2.0 * c * theta <= 1.0 {
        return Err(Error::Hypothesis(format!(
            "2 c theta = {} must exceed 1",
            2.0 * c * theta
        )));
    }
    let cap = (theta * theta * m * m / (2.0 * c * theta - 1.0)).max(2.0 * a1);
    let mut a = a1;
    for k in 1..=k_max {
        let kf = k as f64;
        if 2.0 * a > cap / kf * (1.0 + 1e-12) {
            return Ok(false);
        }
        let factor = (1.0 - 2.0 * c * theta / kf).max(0.0);
        a = factor * a + theta * theta * m * m / (2.0 * kf * kf);
    }
    Ok(true)
}

/// Verify on finite grids that the minimum of a positive separable product
/// `h(gamma) g(z)` is attained at the componentwise minimizers.
pub fn product_min_check(
    h: impl Fn(f64) -> f64,
    g: impl Fn(&[f64]) -> f64,
    gamma_grid: &[f64],
    z_grid: &[Vec<f64>],
) -> bool {
    if gamma_grid.is_empty() || z_grid.is_empty() {
        return false;
    }
    let mut h_best = (f64::INFINITY, 0usize);
    for (i, &gamma) in gamma_grid.iter().enumerate() {
        let v = h(gamma);
        if v <= 0.0 {
            return false;
        }
        if v < h_best.0 {
            h_best = (v, i);
        }
    }
    let mut g_best = (f64::INFINITY, 0usize);
    for (j, z) in z_grid.iter().enumerate() {
        let v = g(z);
        if v <= 0.0 {
            return false;
        }
        if v < g_best.0 {
            g_best = (v, j);
        }
    }
    let mut product_best = f64::INFINITY;
    for &gamma in gamma_grid {
        let hv = h(gamma);
        for z in z_grid {
            product_best = product_best.min(hv * g(z));
        }
    }
    let separable = h_best.0 * g_best.0;
    (product_best - separable).abs() <= 1e-9 * separable.max(1.0)
}

/// Sample mean of the squared distance to `reference` at checkpoint `k`.
pub fn mse_against(reference: &Vector, trajectories: &[Trajectory], k: u64) -> Result<f64> {
    if trajectories.is_empty() {
        return Err(Error::Parameter("no trajectories given".into()));
    }
    let mut acc = 0.0;
    for (j, t) in trajectories.iter().enumerate() {
        let x = t
            .at(k)
            .ok_or_else(|| Error::Index(format!("trajectory {j} lacks checkpoint {k}")))?;
        acc += (x - reference).norm_squared();
    }
    Ok(acc / trajectories.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_rate_cournot, gen_watson};

    fn unit_box(n: usize) -> FeasibleSet {
        FeasibleSet::bounded_box(Vector::zeros(n), Vector::from_element(n, 1.0)).unwrap()
    }

    #[test]
    fn residual_values_on_rate_instance() {
        let p = gen_rate_cournot(5, 0).unwrap();
        let x_star = p.solution.clone().unwrap();
        assert!(natural_residual(&p, &x_star, 1, 0).unwrap() < 1e-8);
        // F(0) = -0.1 e, projection of 0.1 e is itself: residual 0.1 sqrt(5).
        let r0 = natural_residual(&p, &Vector::zeros(5), 1, 0).unwrap();
        assert!((r0 - 0.1 * 5.0f64.sqrt()).abs() < 1e-12);
        assert!((r0 - 0.22360679).abs() < 1e-6);
    }

    #[test]
    fn residual_on_orthant_is_clamped_min_identity() {
        // x = 0 with F(0) = e_i >= 0 satisfies complementarity: residual 0.
        let p = gen_watson(4, 0).unwrap();
        let zero = Vector::zeros(10);
        assert_eq!(natural_residual(&p, &zero, 1, 0).unwrap(), 0.0);
        // Identity: residual = |componentwise min(x, F(x))| on the orthant.
        let x = Vector::from_fn(10, |i, _| (i as f64 - 4.0) / 7.0);
        let x = p.set.project(&x).unwrap();
        let f = p.mean_map(&x).unwrap();
        let direct = natural_residual(&p, &x, 1, 0).unwrap();
        let minimum = Vector::from_fn(10, |i, _| x[i].min(f[i]));
        assert!((direct - minimum.norm()).abs() < 1e-12);
    }

    #[test]
    fn residual_is_lipschitz_in_x_for_affine_map() {
        let p = gen_rate_cournot(5, 0).unwrap();
        let l_hat = p.constants.unwrap().lipschitz;
        let x = Vector::from_element(5, 0.4);
        let base = natural_residual(&p, &x, 1, 0).unwrap();
        for i in 0..5 {
            let mut xp = x.clone();
            let delta = 1e-4;
            xp[i] += delta;
            let r = natural_residual(&p, &xp, 1, 0).unwrap();
            assert!((r - base).abs() <= (2.0 + l_hat) * delta + 1e-12);
        }
    }

    #[test]
    fn monotone_map_has_no_pseudomonotone_violations() {
        let set = unit_box(3);
        let map = |x: &Vector| -> Result<Vector> { Ok(x.clone()) };
        let report =
            pseudomonotonicity_sampler(&map, &set, 2000, SAMPLER_TOL, &Draw::first(5, 0, 0))
                .unwrap();
        assert!(report.no_violation_found());
        assert_eq!(report.pairs_tested, 2000);
    }

    #[test]
    fn constructed_counterexample_is_recorded_and_sound() {
        // F(x) = -x on [-1, 1]: y = 0, x = 1 gives premise 0 >= 0 but
        // conclusion -1 < 0.
        let set = FeasibleSet::bounded_box(
            Vector::from_element(1, -1.0),
            Vector::from_element(1, 1.0),
        )
        .unwrap();
        let map = |x: &Vector| -> Result<Vector> { Ok(-x.clone()) };
        let report =
            pseudomonotonicity_sampler(&map, &set, 4000, SAMPLER_TOL, &Draw::first(6, 0, 0))
                .unwrap();
        assert!(!report.no_violation_found());
        // Soundness: every recorded violation re-checks with margin tol/2.
        for v in &report.violations {
            let d = &v.x - &v.y;
            let tol_eff = SAMPLER_TOL * (1.0 + map(&v.y).unwrap().norm() * d.norm());
            assert!(d.dot(&map(&v.y).unwrap()) > tol_eff / 2.0);
            assert!(d.dot(&map(&v.x).unwrap()) < -tol_eff / 2.0);
        }
    }

    #[test]
    fn rate_mean_map_shows_no_violations() {
        let p = gen_rate_cournot(5, 0).unwrap();
        let mean = |x: &Vector| p.mean_map(x);
        let report =
            pseudomonotonicity_sampler(&mean, &p.set, 10_000, SAMPLER_TOL, &Draw::first(8, 0, 0))
                .unwrap();
        assert!(report.no_violation_found());
    }

    #[test]
    fn strong_modulus_estimates() {
        let set = unit_box(2);
        // Isotropic linear map: exact modulus 2, sampled minimum approaches
        // it from above.
        let double = |x: &Vector| -> Result<Vector> { Ok(x * 2.0) };
        let sigma = strong_modulus_estimate(&double, &set, 1000, &Draw::first(9, 0, 0)).unwrap();
        assert!(sigma >= 2.0 - 1e-6, "sigma {sigma}");
        assert!(sigma <= 2.2, "sigma {sigma}");

        // Affine benchmark: eigenvalues of the Jacobian span [b, b(n+1)].
        let p = gen_rate_cournot(5, 0).unwrap();
        let mean = |x: &Vector| p.mean_map(x);
        let sigma = strong_modulus_estimate(&mean, &p.set, 1000, &Draw::first(10, 0, 0)).unwrap();
        assert!((0.02..=0.12).contains(&sigma), "sigma {sigma}");

        // Constant map: no quadratic growth, the estimate collapses to ~0.
        let constant = |_: &Vector| -> Result<Vector> { Ok(Vector::from_element(2, 1.0)) };
        let sigma =
            strong_modulus_estimate(&constant, &set, 1000, &Draw::first(11, 0, 0)).unwrap();
        assert!((0.0..=0.05).contains(&sigma), "sigma {sigma}");

        // No admissible pair: a map whose premise never fires.
        let negative = |x: &Vector| -> Result<Vector> {
            Ok(Vector::from_element(x.len(), -1e6) - x * 1e6)
        };
        assert!(matches!(
            strong_modulus_estimate(&negative, &set, 10, &Draw::first(12, 0, 0)),
            Err(Error::EstimateUnavailable)
        ));
    }

    #[test]
    fn weak_sharp_estimates() {
        // Interior solution: F(x*) = 0 so the modulus estimate is zero.
        let p = gen_rate_cournot(5, 0).unwrap();
        let mean = |x: &Vector| p.mean_map(x);
        let x_star = p.solution.clone().unwrap();
        let alpha =
            weak_sharp_estimate(&mean, &p.set, &x_star, 500, &Draw::first(13, 0, 0)).unwrap();
        assert!(alpha.abs() < 1e-10, "alpha {alpha}");

        // Constant map e on the unit box with x* = 0: min e'x / |x| = 1 at
        // the corners (corner-enumeration oracle), so estimates stay >= 1.
        let set = unit_box(3);
        let ones_map = |_: &Vector| -> Result<Vector> { Ok(Vector::from_element(3, 1.0)) };
        let corner_min = (1..8u32)
            .map(|mask| {
                let x = Vector::from_fn(3, |i, _| ((mask >> i) & 1) as f64);
                x.sum() / x.norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((corner_min - 1.0).abs() < 1e-12);
        let alpha =
            weak_sharp_estimate(&ones_map, &set, &Vector::zeros(3), 500, &Draw::first(14, 0, 0))
                .unwrap();
        assert!(alpha >= 1.0 - 1e-9);

        // Residual precondition.
        let bad_star = Vector::from_element(5, 0.1);
        assert!(matches!(
            weak_sharp_estimate(&mean, &p.set, &bad_star, 10, &Draw::first(15, 0, 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn recursion_bound_examples() {
        // theta = M = c = a1 = 1: cap = max(1, 2) = 2, so a_k <= 1/k.
        assert!(recursion_bound_check(1.0, 1.0, 1.0, 1.0, 100_000).unwrap());
        // Noiseless recursion decays under the cap trivially.
        assert!(recursion_bound_check(1.0, 0.0, 1.0, 1.0, 100_000).unwrap());
        // Zero start.
        assert!(recursion_bound_check(1.0, 1.0, 1.0, 0.0, 100_000).unwrap());
        // Hypothesis violation.
        assert!(matches!(
            recursion_bound_check(1.0, 1.0, 0.5, 1.0, 10),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn recursion_bound_full_grid() {
        for theta in [0.5, 1.0, 2.0] {
            for m in [0.0, 1.0, 10.0] {
                for two_c_theta in [1.5, 2.0, 5.0] {
                    let c = two_c_theta / (2.0 * theta);
                    for a1 in [0.0, 1.0, 10.0] {
                        assert!(
                            recursion_bound_check(theta, m, c, a1, 100_000).unwrap(),
                            "failed at theta={theta} M={m} c={c} a1={a1}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn product_min_examples() {
        // h(g) = g^2/(g-1) on g >= 1.1 is minimized at 2; g(z) = z^2 + 1 at 0.
        let gamma_grid: Vec<f64> = (0..2000).map(|i| 1.1 + 4.9 * i as f64 / 1999.0).collect();
        let z_grid: Vec<Vec<f64>> = (0..401).map(|i| vec![-1.0 + i as f64 / 200.0]).collect();
        let h = |g: f64| g * g / (g - 1.0);
        let g = |z: &[f64]| z[0] * z[0] + 1.0;
        assert!(product_min_check(h, g, &gamma_grid, &z_grid));
        let h_argmin = gamma_grid
            .iter()
            .cloned()
            .min_by(|a, b| h(*a).total_cmp(&h(*b)))
            .unwrap();
        assert!((h_argmin - 2.0).abs() < 5e-3);

        // Constant second factor: the product minimizer is h's minimizer.
        assert!(product_min_check(h, |_| 7.0, &gamma_grid, &z_grid));
    }

    #[test]
    fn product_min_matches_weaksharp_closed_form() {
        use crate::solvers::optimal_gamma0_weaksharp;
        let (u, alpha, nu, l, c_big) = (1.0, 1.0, 2.0f64.sqrt(), 1.0, 1.0);
        let tuning = optimal_gamma0_weaksharp(u, alpha, nu, l).unwrap();

        let h = |g: f64| g * g * u / (alpha * g - u);
        // z = (c, beta, c_bar) constrained to the boundary beta = 1/c and
        // c_bar in (0, sqrt(1/2)].
        let g = |z: &[f64]| {
            let (c, beta, c_bar) = (z[0], z[1], z[2]);
            2.0 * (1.0 + c) * nu * nu
                + (c_big * c_big + 16.0 * l * l * u * u) / (4.0 * c_bar * c_bar)
                + 4.0 * (1.0 + beta) * l * l * u * u
        };
        let gamma_grid: Vec<f64> =
            (0..4000).map(|i| u / alpha * (1.001 + i as f64 * 0.002)).collect();
        let mut z_grid = Vec::new();
        for i in 1..=400 {
            let c = i as f64 * 0.02;
            for j in 1..=20 {
                let c_bar = 0.5f64.sqrt() * j as f64 / 20.0;
                z_grid.push(vec![c, 1.0 / c, c_bar]);
            }
        }
        assert!(product_min_check(h, g, &gamma_grid, &z_grid));

        let h_argmin = gamma_grid
            .iter()
            .cloned()
            .min_by(|a, b| h(*a).total_cmp(&h(*b)))
            .unwrap();
        assert!((h_argmin - tuning.gamma0).abs() / tuning.gamma0 < 2e-3);
        let z_argmin = z_grid
            .iter()
            .min_by(|a, b| g(a).total_cmp(&g(b)))
            .unwrap();
        assert!((z_argmin[0] - tuning.c).abs() < 0.05);
        assert!((z_argmin[2] - tuning.c_bar).abs() < 0.05);
    }

    #[test]
    fn mse_checkpoint_arithmetic() {
        use crate::solvers::Trajectory;
        let reference = Vector::zeros(2);
        let mk = |x: Vector| Trajectory {
            checkpoints: vec![(0, Vector::zeros(2)), (10, x.clone())],
            final_iterate: x,
            residuals: vec![],
            seconds: 0.0,
            warnings: vec![],
        };
        let t1 = mk(Vector::from_vec(vec![1.0, 0.0]));
        let t2 = mk(Vector::from_vec(vec![3.0, 0.0]));
        let both = vec![t1.clone(), t2];
        assert_eq!(mse_against(&reference, &both, 10).unwrap(), 5.0);
        assert_eq!(
            mse_against(&Vector::from_vec(vec![1.0, 0.0]), &[t1], 10).unwrap(),
            0.0
        );
        assert!(matches!(
            mse_against(&reference, &both, 11),
            Err(Error::Index(_))
        ));
    }
}
