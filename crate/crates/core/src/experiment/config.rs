use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{AssociationMode, ChannelParams};
use crate::density::Estimator;
use crate::error::{invalid, Result};
use crate::geometry::{GridSpec, Region};
use crate::optimize::{GaParams, PsoParams, Strategy};
use crate::scene::SceneParams;

/// Default λ_R sweep (per km²), bracketing the 6/km² baseline.
pub const DEFAULT_SWEEP: [f64; 6] = [3.0, 4.0, 5.0, 6.0, 7.0, 8.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Estimate that feeds the placement objective.
    pub primary: Estimator,
    /// Estimators scored against the true density in every trial.
    pub compare: Vec<Estimator>,
    /// Estimation grid over the full region.
    pub grid: (usize, usize),
    /// Voronoi-area labelling resolution, cells per km.
    pub voronoi_resolution: f64,
    /// Fixed KDE bandwidth; `null` selects Silverman's rule.
    pub kde_bandwidth_km: Option<f64>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            primary: Estimator::Rbf,
            compare: Estimator::ALL.to_vec(),
            grid: (100, 100),
            voronoi_resolution: 100.0,
            kde_bandwidth_km: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSearchConfig {
    pub nx: usize,
    pub ny: usize,
    /// Run the exhaustive oracle in every trial.
    pub enabled: bool,
}

impl Default for GridSearchConfig {
    fn default() -> Self {
        Self { nx: 100, ny: 100, enabled: false }
    }
}

/// Everything that determines an experiment run. Units: km, users or
/// nodes per km², dB accepted for the SIR threshold via `gamma_bar_db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub region: Region,
    /// Central evaluation window: MSE scoring and the placement domain.
    pub window: Region,
    /// Let optimizers search the whole region instead of the window.
    pub optimize_full_region: bool,
    pub lambda_r: f64,
    pub lambda_c: f64,
    pub lambda_u: f64,
    pub sigma2_range: (f64, f64),
    pub nc_range: (usize, usize),
    pub channel: ChannelParams,
    pub association: AssociationMode,
    pub density_estimator: EstimatorConfig,
    pub pso: PsoParams,
    pub ga: GaParams,
    pub grid_search: GridSearchConfig,
    pub strategies: Vec<Strategy>,
    pub trials: usize,
    pub seed: u64,
    pub sweep: Vec<f64>,
    /// Also score every placement on the true density.
    pub score_on_true_density: bool,
    pub outputs: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let scene = SceneParams::default();
        Self {
            region: scene.region,
            window: Region::new(1.0, 4.0, 1.0, 4.0).expect("valid window"),
            optimize_full_region: false,
            lambda_r: scene.lambda_r,
            lambda_c: scene.lambda_c,
            lambda_u: scene.lambda_u,
            sigma2_range: scene.sigma2_range,
            nc_range: scene.nc_range,
            channel: ChannelParams::default(),
            association: AssociationMode::Expectation,
            density_estimator: EstimatorConfig::default(),
            pso: PsoParams::default(),
            ga: GaParams::default(),
            grid_search: GridSearchConfig::default(),
            strategies: Strategy::COMPARED.to_vec(),
            trials: 50,
            seed: 20250101,
            sweep: DEFAULT_SWEEP.to_vec(),
            score_on_true_density: false,
            outputs: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.sweep.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(invalid("sweep intensities must be positive"));
        }
        if !self.region.contains_region(&self.window) {
            return Err(invalid("evaluation window must lie inside the region"));
        }
        let (nx, ny) = self.density_estimator.grid;
        GridSpec::new(self.region, nx, ny)?;
        if !(self.density_estimator.voronoi_resolution > 0.0) {
            return Err(invalid("voronoi resolution must be positive"));
        }
        if self.density_estimator.compare.is_empty() {
            return Err(invalid("at least one estimator must be compared"));
        }
        if self.strategies.is_empty() {
            return Err(invalid("at least one placement strategy is required"));
        }
        if self.grid_search.nx < 2 || self.grid_search.ny < 2 {
            return Err(invalid("grid search needs at least 2x2 cells"));
        }
        self.scene_params(self.lambda_r).validate()?;
        self.channel.validate()?;
        self.pso_params().validate()?;
        self.ga_params().validate()
    }

    pub fn scene_params(&self, lambda_r: f64) -> SceneParams {
        SceneParams {
            region: self.region,
            lambda_r,
            lambda_c: self.lambda_c,
            lambda_u: self.lambda_u,
            sigma2_range: self.sigma2_range,
            nc_range: self.nc_range,
        }
    }

    pub fn estimation_grid(&self) -> Result<GridSpec> {
        let (nx, ny) = self.density_estimator.grid;
        GridSpec::new(self.region, nx, ny)
    }

    /// Where the SH may be placed.
    pub fn search_region(&self) -> Region {
        if self.optimize_full_region {
            self.region
        } else {
            self.window
        }
    }

    pub fn pso_params(&self) -> PsoParams {
        PsoParams { bounds: self.search_region(), ..self.pso.clone() }
    }

    pub fn ga_params(&self) -> GaParams {
        GaParams { bounds: self.search_region(), ..self.ga.clone() }
    }

    /// The estimators to fit: the compared set plus the primary.
    pub fn estimators(&self) -> Vec<Estimator> {
        let mut all = self.density_estimator.compare.clone();
        all.push(self.density_estimator.primary);
        all.sort();
        all.dedup();
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_baseline_scenario() {
        let c = ExperimentConfig::default();
        assert_eq!((c.lambda_r, c.lambda_c, c.lambda_u), (6.0, 6.0, 10.0));
        assert_eq!((c.pso.inertia, c.pso.cognitive, c.pso.social), (0.5, 1.5, 2.0));
        assert_eq!((c.pso.particles, c.pso.iterations), (20, 20));
        assert!((c.channel.gamma_bar - 3.16228).abs() < 1e-5);
        assert_eq!(c.channel.p_c, 0.3);
        assert_eq!(c.window.area(), 9.0);
        c.validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"trials": 3, "channel": {"gamma_bar_db": 10}, "density_estimator": {"primary": "kde"}}"#,
        )
        .unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.density_estimator.primary, Estimator::Kde);
        assert!((c.channel.gamma_bar - 10.0).abs() < 1e-12);
        assert_eq!(c.lambda_r, 6.0);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"trials": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"sweep": [4, -1]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"unknown_key": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"window": {"x_min": 1, "x_max": 6, "y_min": 1, "y_max": 4}}"#
        )
        .is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap(), c);
    }

    #[test]
    fn optimizer_bounds_follow_window() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.pso_params().bounds, c.window);
        c.optimize_full_region = true;
        assert_eq!(c.ga_params().bounds, c.region);
    }
}
