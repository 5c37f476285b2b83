//! Feasible sets with exact or iterative Euclidean projection.

mod bregman;

pub use bregman::{
    bregman, generator_constants, prox_step, DistanceGenerator, GeneratorConstants,
    DEFAULT_ENTROPY_SHIFT, PROX_BISECTION_TOL, PROX_SUBPROBLEM_TOL,
};

use crate::error::{Error, Result};
use crate::problem::{Matrix, Vector};

/// Euclidean projection tolerance for the iterative (polyhedral) case.
pub const PROJECTION_TOL: f64 = 1e-8;
/// Sweep budget for Dykstra's alternating projections.
pub const MAX_PROJECTION_SWEEPS: usize = 100_000;

/// Closed convex feasible sets supported by the solvers.
#[derive(Debug, Clone)]
pub enum FeasibleSet {
    /// `lo <= x <= hi` componentwise.
    Box { lo: Vector, hi: Vector },
    /// `a x <= v` intersected with `lo <= x <= hi`.
    BoxPolyhedron {
        a: Matrix,
        v: Vector,
        lo: Vector,
        hi: Vector,
    },
    /// `x >= 0`.
    NonnegativeOrthant { dim: usize },
}

impl FeasibleSet {
    pub fn bounded_box(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.len() == 0 {
            return Err(Error::EmptyDimension);
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for i in 0..lo.len() {
            if !(lo[i] <= hi[i]) || !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(Error::InvalidRange { lo: lo[i], hi: hi[i] });
            }
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    /// Construction certifies nonemptiness by projecting the box midpoint
    /// onto the intersection and checking the constraint violation.
    pub fn box_polyhedron(a: Matrix, v: Vector, lo: Vector, hi: Vector) -> Result<Self> {
        if a.nrows() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: v.len(),
            });
        }
        if a.ncols() != lo.len() {
            return Err(Error::DimensionMismatch {
                expected: a.ncols(),
                got: lo.len(),
            });
        }
        // Validate the box part first.
        let boxed = FeasibleSet::bounded_box(lo, hi)?;
        let (lo, hi) = match boxed {
            FeasibleSet::Box { lo, hi } => (lo, hi),
            _ => unreachable!(),
        };
        let set = FeasibleSet::BoxPolyhedron { a, v, lo, hi };
        let mid = set.box_midpoint();
        let witness = set.project(&mid)?;
        let violation = set.violation(&witness);
        if violation > 10.0 * PROJECTION_TOL {
            return Err(Error::InfeasibleSet { violation });
        }
        Ok(set)
    }

    pub fn orthant(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(FeasibleSet::NonnegativeOrthant { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::BoxPolyhedron { lo, .. } => lo.len(),
            FeasibleSet::NonnegativeOrthant { dim } => *dim,
        }
    }

    /// Box bounds when the set carries them; `None` for the orthant.
    pub fn bounds(&self) -> Option<(&Vector, &Vector)> {
        match self {
            FeasibleSet::Box { lo, hi } | FeasibleSet::BoxPolyhedron { lo, hi, .. } => {
                Some((lo, hi))
            }
            FeasibleSet::NonnegativeOrthant { .. } => None,
        }
    }

    /// Bounds used by randomized samplers. The orthant is unbounded, so
    /// samplers draw from `[0, 4]^n` there.
    pub fn sampling_bounds(&self) -> (Vector, Vector) {
        match self.bounds() {
            Some((lo, hi)) => (lo.clone(), hi.clone()),
            None => (
                Vector::zeros(self.dim()),
                Vector::from_element(self.dim(), 4.0),
            ),
        }
    }

    fn box_midpoint(&self) -> Vector {
        match self.bounds() {
            Some((lo, hi)) => (lo + hi) * 0.5,
            None => Vector::zeros(self.dim()),
        }
    }

    /// Largest constraint violation at `x` (0 when feasible).
    pub fn violation(&self, x: &Vector) -> f64 {
        let mut worst: f64 = 0.0;
        match self {
            FeasibleSet::Box { lo, hi } => {
                for i in 0..x.len() {
                    worst = worst.max(lo[i] - x[i]).max(x[i] - hi[i]);
                }
            }
            FeasibleSet::BoxPolyhedron { a, v, lo, hi } => {
                for i in 0..x.len() {
                    worst = worst.max(lo[i] - x[i]).max(x[i] - hi[i]);
                }
                let ax = a * x;
                for i in 0..v.len() {
                    worst = worst.max(ax[i] - v[i]);
                }
            }
            FeasibleSet::NonnegativeOrthant { .. } => {
                for i in 0..x.len() {
                    worst = worst.max(-x[i]);
                }
            }
        }
        worst.max(0.0)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.violation(x) <= tol
    }

    /// Euclidean projection. Exact (componentwise clamp) for the box and the
    /// orthant; Dykstra's alternating projections for the box-polyhedron, to
    /// tolerance [`PROJECTION_TOL`].
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        match self {
            FeasibleSet::Box { lo, hi } => Ok(clamp(x, lo, hi)),
            FeasibleSet::NonnegativeOrthant { .. } => Ok(x.map(|t| t.max(0.0))),
            FeasibleSet::BoxPolyhedron { a, v, lo, hi } => dykstra(x, a, v, lo, hi),
        }
    }
}

fn clamp(x: &Vector, lo: &Vector, hi: &Vector) -> Vector {
    Vector::from_fn(x.len(), |i, _| x[i].max(lo[i]).min(hi[i]))
}

/// Projection onto the halfspace `a'x <= b`.
fn project_halfspace(y: &Vector, a: &Vector, b: f64) -> Vector {
    let aa = a.dot(a);
    if aa <= 1e-300 {
        return y.clone();
    }
    let ay = a.dot(y);
    if ay <= b {
        y.clone()
    } else {
        y - a * ((ay - b) / aa)
    }
}

/// Dykstra's alternating projections over the box and each halfspace.
/// Exact in the limit for intersections of convex sets.
fn dykstra(x: &Vector, a: &Matrix, v: &Vector, lo: &Vector, hi: &Vector) -> Result<Vector> {
    let m = v.len();
    let mut z = x.clone();
    let mut corrections = vec![Vector::zeros(x.len()); m + 1];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_PROJECTION_SWEEPS {
        let before = z.clone();

        let y = &z + &corrections[0];
        let z_new = clamp(&y, lo, hi);
        corrections[0] = y - &z_new;
        z = z_new;

        for row in 0..m {
            let normal = a.row(row).transpose();
            let y = &z + &corrections[row + 1];
            let z_new = project_halfspace(&y, &normal, v[row]);
            corrections[row + 1] = y - &z_new;
            z = z_new;
        }

        let sweep_change = (&z - &before).norm();
        let violation = violation_poly(&z, a, v, lo, hi);
        residual = sweep_change.max(violation);
        if sweep_change <= 0.1 * PROJECTION_TOL && violation <= PROJECTION_TOL {
            return Ok(z);
        }
    }
    Err(Error::ProjectionNonConvergence {
        sweeps: MAX_PROJECTION_SWEEPS,
        residual,
    })
}

fn violation_poly(x: &Vector, a: &Matrix, v: &Vector, lo: &Vector, hi: &Vector) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        worst = worst.max(lo[i] - x[i]).max(x[i] - hi[i]);
    }
    let ax = a * x;
    for i in 0..v.len() {
        worst = worst.max(ax[i] - v[i]);
    }
    worst.max(0.0)
}

/// Free-function form of [`FeasibleSet::project`].
pub fn project(set: &FeasibleSet, x: &Vector) -> Result<Vector> {
    set.project(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_box() -> FeasibleSet {
        // { x1 + x2 <= 4, 0 <= x <= 4 }
        FeasibleSet::box_polyhedron(
            Matrix::from_row_slice(1, 2, &[1.0, 1.0]),
            Vector::from_vec(vec![4.0]),
            Vector::zeros(2),
            Vector::from_element(2, 4.0),
        )
        .unwrap()
    }

    #[test]
    fn box_projection_fixes_interior_points() {
        let set =
            FeasibleSet::bounded_box(Vector::zeros(3), Vector::from_element(3, 4.0)).unwrap();
        let x = Vector::from_vec(vec![1.0, 2.0, 3.5]);
        assert_eq!(set.project(&x).unwrap(), x);
    }

    #[test]
    fn orthant_projection_clamps() {
        let set = FeasibleSet::orthant(2).unwrap();
        let p = set.project(&Vector::from_vec(vec![-1.0, 2.0])).unwrap();
        assert_eq!(p, Vector::from_vec(vec![0.0, 2.0]));
    }

    #[test]
    fn polyhedron_projection_matches_grid_oracle() {
        let set = simplex_box();
        let x = Vector::from_vec(vec![5.0, 5.0]);
        let p = set.project(&x).unwrap();

        // Brute-force oracle: minimize |z - x| over a fine feasible grid.
        let mut best = (f64::INFINITY, Vector::zeros(2));
        let step = 1e-3;
        let mut z1 = 0.0;
        while z1 <= 4.0 {
            let z2 = (4.0 - z1).min(4.0).max(0.0);
            // The optimum lies on the active constraint line for this x;
            // scan that line.
            let z = Vector::from_vec(vec![z1, z2]);
            let d = (&z - &x).norm();
            if d < best.0 {
                best = (d, z);
            }
            z1 += step;
        }
        assert!((&p - &best.1).norm() < 2.0 * step, "p = {p:?}");
        // Analytic KKT solution is (2, 2).
        assert!((&p - Vector::from_vec(vec![2.0, 2.0])).norm() < 1e-6);
    }

    #[test]
    fn empty_polyhedron_rejected() {
        // x1 <= -1 intersected with x >= 0 is empty.
        let r = FeasibleSet::box_polyhedron(
            Matrix::from_row_slice(1, 2, &[1.0, 0.0]),
            Vector::from_vec(vec![-1.0]),
            Vector::zeros(2),
            Vector::from_element(2, 4.0),
        );
        assert!(matches!(r, Err(Error::InfeasibleSet { .. })));
    }

    #[test]
    fn variational_characterization_holds() {
        let set = simplex_box();
        let mut rng_state = 0x1234_5678_u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 11) as f64 / (1u64 << 53) as f64) * 12.0 - 6.0
        };
        for _ in 0..200 {
            let x = Vector::from_vec(vec![next(), next()]);
            let px = set.project(&x).unwrap();
            // Feasible witness points.
            for y in [
                Vector::zeros(2),
                Vector::from_vec(vec![4.0, 0.0]),
                Vector::from_vec(vec![1.0, 1.0]),
            ] {
                let lhs = (&y - &px).dot(&(&px - &x));
                assert!(
                    lhs >= -PROJECTION_TOL * (&y - &px).norm(),
                    "variational characterization violated: {lhs}"
                );
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn projection_idempotent_and_nonexpansive(
                xs in proptest::collection::vec(-10.0f64..10.0, 4),
                ys in proptest::collection::vec(-10.0f64..10.0, 4),
            ) {
                let set = FeasibleSet::box_polyhedron(
                    Matrix::from_row_slice(2, 4, &[1.0, 1.0, 0.0, 0.5, -1.0, 0.0, 1.0, 1.0]),
                    Vector::from_vec(vec![4.0, 3.0]),
                    Vector::zeros(4),
                    Vector::from_element(4, 4.0),
                ).unwrap();
                let x = Vector::from_vec(xs);
                let y = Vector::from_vec(ys);
                let px = set.project(&x).unwrap();
                let ppx = set.project(&px).unwrap();
                prop_assert!((&ppx - &px).norm() <= 10.0 * PROJECTION_TOL);
                let py = set.project(&y).unwrap();
                prop_assert!((&px - &py).norm() <= (&x - &y).norm() + 2.0 * PROJECTION_TOL);
            }
        }
    }
}
