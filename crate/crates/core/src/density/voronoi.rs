//! Region-based baselines. Both spread each eRRH's load `n_r` uniformly over
//! a disk of area `area(A_r)`: Vor-T centres it at the eRRH, Vor-B at the
//! signal-dominance barycentre of the cell. The cell-uniform variant is kept
//! as [`fit_vor_cells`].

use super::{normalize_field, LoadObservation};
use crate::channel::Dominance;
use crate::error::{invalid, Result};
use crate::geometry::{DensityField, GridSpec, Point2D};
use crate::scene::label_grid;

/// Every grid cell takes the normalized load `n_r / area(A_r)` of its
/// nearest eRRH.
pub fn fit_vor_cells(obs: &LoadObservation, grid: &GridSpec) -> Result<DensityField> {
    let levels = obs.normalized_loads();
    let labels = label_grid(&obs.errh_locations, grid);
    let raw = DensityField::new(*grid, labels.into_iter().map(|r| levels[r]).collect())?;
    normalize_field(&raw, obs.total_users)
}

/// Uniform disks of area `area(A_r)` centred at the eRRHs.
pub fn fit_vor_t(obs: &LoadObservation, grid: &GridSpec) -> Result<DensityField> {
    uniform_disks(obs, grid, &obs.errh_locations)
}

/// Uniform disks of area `area(A_r)` centred at the mean-SIR weighted
/// barycentre of each cell.
///
/// `dominance` must be the per-cell mean-SIR profile of `grid`.
pub fn fit_vor_b(obs: &LoadObservation, grid: &GridSpec, dominance: &[Dominance]) -> Result<DensityField> {
    if dominance.len() != grid.len() {
        return Err(invalid(format!(
            "dominance profile has {} cells for a grid of {}",
            dominance.len(),
            grid.len()
        )));
    }
    let n = obs.len();
    let mut wsum = vec![0.0; n];
    let mut wx = vec![0.0; n];
    let mut wy = vec![0.0; n];
    for (i, d) in dominance.iter().enumerate() {
        if d.errh >= n {
            return Err(invalid(format!("dominance names eRRH {} of {n}", d.errh)));
        }
        let c = grid.center_of(i);
        wsum[d.errh] += d.sir;
        wx[d.errh] += d.sir * c.x;
        wy[d.errh] += d.sir * c.y;
    }
    let centers: Vec<Point2D> = (0..n)
        .map(|r| {
            if wsum[r] > 0.0 {
                Point2D::new(wx[r] / wsum[r], wy[r] / wsum[r])
            } else {
                obs.errh_locations[r]
            }
        })
        .collect();
    uniform_disks(obs, grid, &centers)
}

/// Spreads `n_r` over the `area(A_r) / cell` grid cells closest to
/// `centers[r]`: a disk grown inside the region until it covers the
/// cell's area.
fn uniform_disks(obs: &LoadObservation, grid: &GridSpec, centers: &[Point2D]) -> Result<DensityField> {
    let cell_area = grid.cell_area();
    let mut values = vec![0.0; grid.len()];
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(grid.len());
    for (r, center) in centers.iter().enumerate() {
        if obs.loads[r] == 0 {
            continue;
        }
        let k = ((obs.voronoi_areas[r] / cell_area).round() as usize).clamp(1, grid.len());
        dist.clear();
        dist.extend((0..grid.len()).map(|i| (grid.center_of(i).distance_sq(center), i)));
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).expect("finite distances"));
        }
        let level = obs.loads[r] as f64 / (k as f64 * cell_area);
        for &(_, i) in &dist[..k] {
            values[i] += level;
        }
    }
    normalize_field(&DensityField::new(*grid, values)?, obs.total_users)
}
