//! Load-weighted Gaussian kernel density baseline.

use std::f64::consts::PI;

use super::{normalize_field, LoadObservation};
use crate::error::{invalid, Error, Result};
use crate::geometry::{DensityField, GridSpec};

/// Silverman's rule for a 2-D Gaussian kernel on load-weighted centres:
/// `h = σ n_eff^(-1/6)` with `σ² = (σ_x² + σ_y²) / 2` and Kish's effective
/// sample size. Returns `None` when the weighted spread is zero.
pub fn silverman_bandwidth(obs: &LoadObservation) -> Option<f64> {
    let total: f64 = obs.loads.iter().map(|&n| n as f64).sum();
    if total <= 0.0 {
        return None;
    }
    let w = |i: usize| obs.loads[i] as f64 / total;
    let (mut mx, mut my) = (0.0, 0.0);
    for (i, c) in obs.errh_locations.iter().enumerate() {
        mx += w(i) * c.x;
        my += w(i) * c.y;
    }
    let mut var = 0.0;
    let mut w2 = 0.0;
    for (i, c) in obs.errh_locations.iter().enumerate() {
        var += w(i) * ((c.x - mx).powi(2) + (c.y - my).powi(2));
        w2 += w(i) * w(i);
    }
    let sigma = (0.5 * var).sqrt();
    let n_eff = 1.0 / w2;
    (sigma > 0.0).then(|| sigma * n_eff.powf(-1.0 / 6.0))
}

/// Gaussian kernels at the eRRHs weighted by their loads, normalized to the
/// user count. `bandwidth_km = None` selects Silverman's rule; a single
/// location falls back to a tenth of the region's side.
pub fn fit_kde(obs: &LoadObservation, grid: &GridSpec, bandwidth_km: Option<f64>) -> Result<DensityField> {
    if obs.total_users == 0 {
        return Err(Error::DegenerateEstimate("kde with zero total load".into()));
    }
    let h = match bandwidth_km {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(invalid(format!("kde bandwidth {h} must be positive"))),
        None => silverman_bandwidth(obs).unwrap_or(0.1 * grid.region.area().sqrt()),
    };
    let two_h2 = 2.0 * h * h;
    let norm = 1.0 / (PI * two_h2);
    let kernels: Vec<_> = obs
        .errh_locations
        .iter()
        .zip(&obs.loads)
        .filter(|(_, &n)| n > 0)
        .map(|(c, &n)| (*c, n as f64 * norm))
        .collect();
    let raw = DensityField::from_fn(*grid, |p| {
        kernels.iter().map(|(c, a)| a * (-c.distance_sq(&p) / two_h2).exp()).sum()
    });
    normalize_field(&raw, obs.total_users)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Point2D, Region};

    fn grid() -> GridSpec {
        GridSpec::new(Region::square(5.0).unwrap(), 100, 100).unwrap()
    }

    #[test]
    fn single_kernel_integrates_to_users() {
        let obs = LoadObservation::new(vec![Point2D::new(2.5, 2.5)], vec![500], vec![25.0]).unwrap();
        let f = fit_kde(&obs, &grid(), Some(0.3)).unwrap();
        assert!((f.integral() - 500.0).abs() < 1e-6);
        let peak = f.grid.center_of(f.argmax());
        assert!(peak.distance(&Point2D::new(2.5, 2.5)) < 0.05);
        // Interior peak: truncation is negligible, so the height is the
        // analytic Gaussian maximum at the nearest cell centre.
        let expect = 500.0 / (2.0 * PI * 0.09) * (-peak.distance_sq(&Point2D::new(2.5, 2.5)) / 0.18).exp();
        assert!((f.values[f.argmax()] - expect).abs() / expect < 1e-6);
    }

    #[test]
    fn wide_bandwidth_is_flat() {
        let obs = LoadObservation::new(
            vec![Point2D::new(1.0, 1.0), Point2D::new(4.0, 3.0)],
            vec![300, 700],
            vec![12.0, 13.0],
        )
        .unwrap();
        let f = fit_kde(&obs, &grid(), Some(1e4)).unwrap();
        for v in &f.values {
            assert!((v - 40.0).abs() < 1e-3);
        }
    }

    #[test]
    fn silverman_matches_hand_computation() {
        // Two equal-weight points 2 km apart on the x-axis:
        // σ_x² = 1, σ_y² = 0 → σ = sqrt(1/2), n_eff = 2.
        let obs = LoadObservation::new(
            vec![Point2D::new(1.0, 2.0), Point2D::new(3.0, 2.0)],
            vec![10, 10],
            vec![1.0, 1.0],
        )
        .unwrap();
        let h = silverman_bandwidth(&obs).unwrap();
        assert!((h - 0.5f64.sqrt() * 2f64.powf(-1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_load_is_degenerate() {
        let obs = LoadObservation::new(vec![Point2D::new(1.0, 1.0)], vec![0], vec![25.0]).unwrap();
        assert!(matches!(fit_kde(&obs, &grid(), None), Err(Error::DegenerateEstimate(_))));
    }
}
