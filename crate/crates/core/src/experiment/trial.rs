use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::channel::{associate_users, AssociationResult};
use crate::density::{density_mse, estimate_density, Estimator, LoadObservation};
use crate::error::{invalid, Result};
use crate::geometry::{DensityField, GridSpec, Point2D};
use crate::hit_rate::CoverageObjective;
use crate::optimize::{
    ga_optimize, grid_search, heuristic_placements, pso_optimize, HeuristicPlacements, PlacementResult,
    Strategy,
};
use crate::rng::{stage_stream, trial_seed, Stage};
use crate::scene::{voronoi_areas, Scene};

/// Everything derived from one scene before any placement is made.
#[derive(Debug, Clone)]
pub struct TrialContext {
    pub seed: u64,
    pub scene: Scene,
    pub association: AssociationResult,
    pub observation: LoadObservation,
    pub grid: GridSpec,
    pub truth: DensityField,
    pub estimates: BTreeMap<Estimator, DensityField>,
}

impl TrialContext {
    pub fn build(config: &ExperimentConfig, lambda_r: f64, seed: u64) -> Result<Self> {
        let mut scene = Scene::sample(&config.scene_params(lambda_r), &mut stage_stream(seed, Stage::Scene))?;
        scene.seed = Some(seed);
        let association = associate_users(
            &scene,
            &config.channel,
            config.association,
            &mut stage_stream(seed, Stage::Association),
        )?;
        let areas = voronoi_areas(&scene.errhs, &scene.region, config.density_estimator.voronoi_resolution)?;
        let observation = LoadObservation::new(scene.errhs.clone(), association.loads.clone(), areas)?;
        let grid = config.estimation_grid()?;
        let truth = scene.true_density(grid.nx, grid.ny)?;
        let estimates = config
            .estimators()
            .into_iter()
            .map(|e| {
                let field = estimate_density(
                    e,
                    &observation,
                    &grid,
                    config.density_estimator.kde_bandwidth_km,
                    &config.channel,
                )?;
                Ok((e, field))
            })
            .collect::<Result<_>>()?;
        Ok(Self { seed, scene, association, observation, grid, truth, estimates })
    }

    pub fn estimate(&self, estimator: Estimator) -> Result<&DensityField> {
        self.estimates
            .get(&estimator)
            .ok_or_else(|| invalid(format!("estimator {estimator} was not fitted")))
    }

    /// The placement objective on the configured primary estimate.
    pub fn objective(&self, config: &ExperimentConfig) -> Result<CoverageObjective> {
        let density = self.estimate(config.density_estimator.primary)?;
        CoverageObjective::new(density, &self.scene.errhs, &config.channel)
    }

    pub fn true_objective(&self, config: &ExperimentConfig) -> Result<CoverageObjective> {
        CoverageObjective::new(&self.truth, &self.scene.errhs, &config.channel)
    }

    pub fn heuristics(&self, config: &ExperimentConfig) -> Result<HeuristicPlacements> {
        heuristic_placements(
            &self.scene.errhs,
            &self.association.loads,
            self.estimate(config.density_estimator.primary)?,
            &config.search_region(),
            &mut stage_stream(self.seed, Stage::Random),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub lambda_r: f64,
    pub status: TrialStatus,
    pub n_errhs: usize,
    pub n_users: usize,
    pub mse: BTreeMap<Estimator, f64>,
    /// One result per configured strategy, all scored on the same objective.
    pub placements: Vec<PlacementResult>,
    /// Peak of the true density inside the search region, scored on the
    /// same objective as the placements.
    pub true_hotspot: Option<(Point2D, f64)>,
    /// Placement values re-scored on the true density, when requested.
    pub true_scores: BTreeMap<Strategy, f64>,
}

impl TrialRecord {
    fn failed(trial: usize, seed: u64, lambda_r: f64, reason: String) -> Self {
        Self {
            trial,
            seed,
            lambda_r,
            status: TrialStatus::Failed(reason),
            n_errhs: 0,
            n_users: 0,
            mse: BTreeMap::new(),
            placements: Vec::new(),
            true_hotspot: None,
            true_scores: BTreeMap::new(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == TrialStatus::Ok
    }

    pub fn placement(&self, strategy: Strategy) -> Option<&PlacementResult> {
        self.placements.iter().find(|p| p.strategy == strategy)
    }

    pub fn value(&self, strategy: Strategy) -> Option<f64> {
        self.placement(strategy).map(|p| p.value)
    }
}

/// Runs one trial at the configured λ_R.
pub fn run_trial(config: &ExperimentConfig, trial_index: usize) -> TrialRecord {
    run_trial_at(config, config.lambda_r, trial_index)
}

/// Runs one trial at `lambda_r`. Failures are recorded, never raised.
pub fn run_trial_at(config: &ExperimentConfig, lambda_r: f64, trial_index: usize) -> TrialRecord {
    let seed = trial_seed(config.seed, trial_index as u64);
    match try_trial(config, lambda_r, trial_index, seed) {
        Ok(record) => record,
        Err(e) => TrialRecord::failed(trial_index, seed, lambda_r, e.to_string()),
    }
}

fn try_trial(config: &ExperimentConfig, lambda_r: f64, trial: usize, seed: u64) -> Result<TrialRecord> {
    let ctx = TrialContext::build(config, lambda_r, seed)?;
    let window = config.window;
    let mse = config
        .density_estimator
        .compare
        .iter()
        .map(|e| Ok((*e, density_mse(ctx.estimate(*e)?, &ctx.truth, &window)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;

    let objective = ctx.objective(config)?;
    let f = |p: Point2D| objective.hit_rate(p);
    let heuristics = ctx.heuristics(config)?;
    let search = config.search_region();

    let mut strategies = config.strategies.clone();
    if config.grid_search.enabled && !strategies.contains(&Strategy::Grid) {
        strategies.push(Strategy::Grid);
    }
    let placements = strategies
        .iter()
        .map(|s| match s {
            Strategy::Pso => pso_optimize(f, &config.pso_params(), &mut stage_stream(seed, Stage::Pso)),
            Strategy::Ga => ga_optimize(f, &config.ga_params(), &mut stage_stream(seed, Stage::Ga)),
            Strategy::Busiest => Ok(PlacementResult::fixed(Strategy::Busiest, heuristics.busiest, f)),
            Strategy::Hotspot => Ok(PlacementResult::fixed(Strategy::Hotspot, heuristics.hotspot, f)),
            Strategy::Random => Ok(PlacementResult::fixed(Strategy::Random, heuristics.random, f)),
            Strategy::Grid => grid_search(f, &search, config.grid_search.nx, config.grid_search.ny),
        })
        .collect::<Result<Vec<_>>>()?;

    let true_hotspot = crate::optimize::heuristics::hotspot(&ctx.truth, &search);
    let true_scores = if config.score_on_true_density {
        let truth = ctx.true_objective(config)?;
        placements.iter().map(|p| (p.strategy, truth.hit_rate(p.location))).collect()
    } else {
        BTreeMap::new()
    };

    Ok(TrialRecord {
        trial,
        seed,
        lambda_r,
        status: TrialStatus::Ok,
        n_errhs: ctx.scene.errhs.len(),
        n_users: ctx.scene.n_users(),
        mse,
        placements,
        true_hotspot: Some((true_hotspot, objective.hit_rate(true_hotspot))),
        true_scores,
    })
}
