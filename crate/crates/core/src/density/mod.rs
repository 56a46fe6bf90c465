//! User-density estimation from per-eRRH load counts.
//!
//! The proposed estimator interpolates Voronoi-normalized loads with linear
//! radial basis functions ([`rbf`]); [`kde`] and [`voronoi`] hold the
//! baselines it is compared against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{mean_sir_dominance, ChannelParams};
use crate::error::{invalid, Error, Result};
use crate::geometry::{DensityField, GridSpec, Point2D, Region};

pub mod kde;
pub mod rbf;
pub mod voronoi;

pub use kde::{fit_kde, silverman_bandwidth};
pub use rbf::{fit_rbf, RbfModel};
pub use voronoi::{fit_vor_b, fit_vor_t};

/// What the operator observes: eRRH locations, their loads and Voronoi areas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadObservation {
    pub errh_locations: Vec<Point2D>,
    pub loads: Vec<usize>,
    pub voronoi_areas: Vec<f64>,
    pub total_users: usize,
}

impl LoadObservation {
    pub fn new(errh_locations: Vec<Point2D>, loads: Vec<usize>, voronoi_areas: Vec<f64>) -> Result<Self> {
        if errh_locations.len() != loads.len() || loads.len() != voronoi_areas.len() {
            return Err(invalid(format!(
                "observation lengths differ: {} locations, {} loads, {} areas",
                errh_locations.len(),
                loads.len(),
                voronoi_areas.len()
            )));
        }
        if errh_locations.is_empty() {
            return Err(invalid("observation has no eRRHs"));
        }
        if voronoi_areas.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(invalid("voronoi areas must be positive"));
        }
        let total_users = loads.iter().sum();
        Ok(Self { errh_locations, loads, voronoi_areas, total_users })
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    /// Loads per km² of Voronoi cell.
    pub fn normalized_loads(&self) -> Vec<f64> {
        self.loads
            .iter()
            .zip(&self.voronoi_areas)
            .map(|(n, a)| *n as f64 / a)
            .collect()
    }
}

/// Clamps negative values to zero and rescales so the field integrates to
/// `total_users`. Returns the field and the applied factor.
pub fn normalize_with_factor(raw: &DensityField, total_users: usize) -> Result<(DensityField, f64)> {
    let clamped: Vec<f64> = raw.values.iter().map(|v| v.max(0.0)).collect();
    let mass = clamped.iter().sum::<f64>() * raw.grid.cell_area();
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::DegenerateEstimate(format!("clamped field integrates to {mass}")));
    }
    let factor = total_users as f64 / mass;
    let values = clamped.into_iter().map(|v| v * factor).collect();
    Ok((DensityField { grid: raw.grid, values }, factor))
}

pub fn normalize_field(raw: &DensityField, total_users: usize) -> Result<DensityField> {
    normalize_with_factor(raw, total_users).map(|(f, _)| f)
}

/// Mean squared difference over the cells whose centres lie in `eval_region`.
pub fn density_mse(estimate: &DensityField, truth: &DensityField, eval_region: &Region) -> Result<f64> {
    if estimate.grid != truth.grid {
        return Err(invalid("estimate and truth are on different grids"));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for (i, (e, t)) in estimate.values.iter().zip(&truth.values).enumerate() {
        if eval_region.contains(&estimate.grid.center_of(i)) {
            sum += (e - t).powi(2);
            n += 1;
        }
    }
    if n == 0 {
        return Err(invalid("evaluation region contains no grid cells"));
    }
    Ok(sum / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Estimator {
    #[serde(rename = "rbf")]
    Rbf,
    #[serde(rename = "kde")]
    Kde,
    #[serde(rename = "vor-t")]
    VorT,
    #[serde(rename = "vor-b")]
    VorB,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [Estimator::Rbf, Estimator::Kde, Estimator::VorT, Estimator::VorB];

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Rbf => "rbf",
            Estimator::Kde => "kde",
            Estimator::VorT => "vor-t",
            Estimator::VorB => "vor-b",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown estimator '{s}' (rbf|kde|vor-t|vor-b)")))
    }
}

/// Runs `estimator` on `obs` over `grid`.
pub fn estimate_density(
    estimator: Estimator,
    obs: &LoadObservation,
    grid: &GridSpec,
    kde_bandwidth_km: Option<f64>,
    channel: &ChannelParams,
) -> Result<DensityField> {
    match estimator {
        Estimator::Rbf => fit_rbf(obs, grid)?.eval(grid),
        Estimator::Kde => fit_kde(obs, grid, kde_bandwidth_km),
        Estimator::VorT => fit_vor_t(obs, grid),
        Estimator::VorB => {
            let dominance = mean_sir_dominance(grid, &obs.errh_locations, channel)?;
            fit_vor_b(obs, grid, &dominance)
        }
    }
}
