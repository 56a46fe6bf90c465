//! Exhaustive search over grid cell centres; the reference optimum against
//! which the stochastic optimizers are judged.

use rayon::prelude::*;

use super::{PlacementResult, Strategy};
use crate::error::{invalid, Result};
use crate::geometry::{GridSpec, Point2D, Region};

/// Argmax of `objective` over the `nx × ny` cell centres of `region`
/// (lowest flat index on ties).
pub fn grid_search<F>(objective: F, region: &Region, nx: usize, ny: usize) -> Result<PlacementResult>
where
    F: Fn(Point2D) -> f64 + Sync,
{
    if nx < 2 || ny < 2 {
        return Err(invalid(format!("grid search needs at least 2x2 cells, got {nx}x{ny}")));
    }
    let grid = GridSpec::new(*region, nx, ny)?;
    let values: Vec<f64> = (0..grid.len()).into_par_iter().map(|i| objective(grid.center_of(i))).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(PlacementResult {
        strategy: Strategy::Grid,
        location: grid.center_of(best),
        value: values[best],
        trace: vec![values[best]],
        evaluations: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bowl_picks_centre_cell() {
        let region = Region::new(1.0, 4.0, 1.0, 4.0).unwrap();
        let r = grid_search(|p| -((p.x - 2.5).powi(2) + (p.y - 2.5).powi(2)), &region, 5, 5).unwrap();
        assert_eq!(r.location, Point2D::new(2.5, 2.5));
        assert_eq!(r.evaluations, 25);
    }

    #[test]
    fn plane_picks_east_column() {
        let region = Region::square(2.0).unwrap();
        let r = grid_search(|p| p.x, &region, 4, 3).unwrap();
        assert_eq!(r.location.x, 1.75);
        // Ties along the column resolve to the first row.
        assert_eq!(r.location.y, 2.0 / 6.0);
    }

    #[test]
    fn too_small_grid() {
        let region = Region::square(1.0).unwrap();
        assert!(grid_search(|p| p.x, &region, 1, 5).is_err());
    }
}
