//! Linear radial basis function interpolation of Voronoi-normalized loads.
//!
//! The interpolant is `D(p) = Σ_r w_r ‖l_r − p‖`, with weights solving
//! `Φ w = n̄`, `Φ_ij = ‖l_i − l_j‖`. `Φ` has a zero diagonal and is
//! indefinite, so it is solved by partially pivoted LU. No polynomial term is
//! appended.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{normalize_with_factor, LoadObservation};
use crate::error::{invalid, Error, Result};
use crate::geometry::{DensityField, GridSpec, Point2D};

/// Systems with a larger 2-norm condition number are rejected.
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfModel {
    pub centers: Vec<Point2D>,
    pub weights: Vec<f64>,
    /// Multiplier that makes the clamped field integrate to the user count.
    pub scale_factor: f64,
    pub condition_number: f64,
}

/// Fits interpolation weights to `obs` and the mass normalizer on `grid`.
pub fn fit_rbf(obs: &LoadObservation, grid: &GridSpec) -> Result<RbfModel> {
    let centers = &obs.errh_locations;
    let n = centers.len();
    if n < 2 {
        return Err(invalid(format!("rbf interpolation needs at least 2 centres, got {n}")));
    }
    let phi = DMatrix::from_fn(n, n, |i, j| centers[i].distance(&centers[j]));
    let singular = phi.singular_values();
    let s_max = singular.max();
    let s_min = singular.min();
    let condition_number = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if !(condition_number <= MAX_CONDITION_NUMBER) {
        return Err(Error::IllConditioned(format!(
            "interpolation matrix condition number {condition_number:e} exceeds {MAX_CONDITION_NUMBER:e}"
        )));
    }
    let rhs = DVector::from_vec(obs.normalized_loads());
    let weights = phi
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::IllConditioned("interpolation matrix is singular".into()))?;

    let mut model = RbfModel {
        centers: centers.clone(),
        weights: weights.iter().copied().collect(),
        scale_factor: 1.0,
        condition_number,
    };
    let (_, factor) = normalize_with_factor(&model.raw_field(grid), obs.total_users)?;
    model.scale_factor = factor;
    Ok(model)
}

impl RbfModel {
    /// Unclamped, unscaled interpolant at `p`.
    #[inline]
    pub fn raw_value(&self, p: &Point2D) -> f64 {
        self.centers.iter().zip(&self.weights).map(|(c, w)| w * c.distance(p)).sum()
    }

    pub fn raw_field(&self, grid: &GridSpec) -> DensityField {
        DensityField::from_fn(*grid, |p| self.raw_value(&p))
    }

    /// Clamped at zero and scaled to the observed user mass.
    pub fn eval(&self, grid: &GridSpec) -> Result<DensityField> {
        let values = grid
            .centers()
            .map(|p| self.raw_value(&p).max(0.0) * self.scale_factor)
            .collect();
        DensityField::new(*grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Region;
    use rand::Rng;

    fn grid() -> GridSpec {
        GridSpec::new(Region::square(5.0).unwrap(), 100, 100).unwrap()
    }

    fn obs(centers: Vec<Point2D>, loads: Vec<usize>) -> LoadObservation {
        let areas = vec![1.0; centers.len()];
        LoadObservation::new(centers, loads, areas).unwrap()
    }

    /// Gaussian elimination with partial pivoting, written against plain
    /// vectors so it shares nothing with the nalgebra path.
    fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / a[row][row];
        }
        x
    }

    #[test]
    fn two_centres_closed_form() {
        let d = 2.0;
        let o = obs(vec![Point2D::new(1.0, 2.0), Point2D::new(3.0, 2.0)], vec![6, 10]);
        let m = fit_rbf(&o, &grid()).unwrap();
        // Φ = [[0,d],[d,0]] so w = (b/d, a/d).
        assert!((m.weights[0] - 10.0 / d).abs() < 1e-12);
        assert!((m.weights[1] - 6.0 / d).abs() < 1e-12);
    }

    #[test]
    fn three_centres_match_elimination_oracle() {
        let centers = vec![Point2D::new(0.7, 0.4), Point2D::new(3.9, 1.3), Point2D::new(2.2, 4.1)];
        let o = obs(centers.clone(), vec![13, 71, 29]);
        let m = fit_rbf(&o, &grid()).unwrap();
        let a: Vec<Vec<f64>> =
            centers.iter().map(|ci| centers.iter().map(|cj| ci.distance(cj)).collect()).collect();
        let oracle = gauss_solve(a, o.normalized_loads());
        for (w, x) in m.weights.iter().zip(oracle) {
            assert!((w - x).abs() < 1e-9, "{w} vs {x}");
        }
    }

    #[test]
    fn interpolates_at_centres_on_random_scenes() {
        let mut rng = crate::rng::seeded(99);
        for _ in 0..20 {
            let n = rng.random_range(5..60);
            let centers: Vec<_> = (0..n).map(|_| Region::square(5.0).unwrap().sample_uniform(&mut rng)).collect();
            let loads: Vec<usize> = (0..n).map(|_| rng.random_range(0..400)).collect();
            let o = obs(centers, loads);
            let m = fit_rbf(&o, &grid()).unwrap();
            let target = o.normalized_loads();
            let scale = target.iter().copied().fold(0.0, f64::max);
            for (c, t) in o.errh_locations.iter().zip(&target) {
                assert!((m.raw_value(c) - t).abs() < 1e-6 * scale);
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        let o = obs(vec![Point2D::new(1.0, 1.0)], vec![5]);
        assert!(matches!(fit_rbf(&o, &grid()), Err(Error::InvalidParameter(_))));
        let p = Point2D::new(1.0, 1.0);
        let o = obs(vec![p, p, Point2D::new(2.0, 3.0)], vec![5, 5, 5]);
        assert!(matches!(fit_rbf(&o, &grid()), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn normalized_field_carries_user_mass() {
        let centers = vec![
            Point2D::new(1.0, 1.0),
            Point2D::new(4.0, 1.5),
            Point2D::new(2.5, 4.0),
            Point2D::new(2.4, 2.6),
        ];
        let o = obs(centers, vec![100, 300, 50, 400]);
        let g = grid();
        let f = fit_rbf(&o, &g).unwrap().eval(&g).unwrap();
        assert!(f.is_nonnegative());
        assert!((f.integral() - 850.0).abs() < 0.85);
    }

    #[test]
    fn reflection_symmetry() {
        // Mirror pairs about x = 2.5 with equal loads.
        let centers = vec![
            Point2D::new(1.0, 1.0),
            Point2D::new(4.0, 1.0),
            Point2D::new(1.5, 3.5),
            Point2D::new(3.5, 3.5),
        ];
        let o = obs(centers, vec![40, 40, 90, 90]);
        let g = grid();
        let f = fit_rbf(&o, &g).unwrap().eval(&g).unwrap();
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let a = f.value(ix, iy);
                let b = f.value(g.nx - 1 - ix, iy);
                assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
            }
        }
    }
}
