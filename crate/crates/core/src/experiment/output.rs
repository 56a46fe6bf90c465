//! CSV/JSON artifacts. Every file is written to a temporary sibling and
//! renamed into place. Each output directory carries a `manifest.json`
//! naming the schema version and the columns of every file written there.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::{run_sweep, run_trials, ExperimentConfig, SweepReport, TrialContext, TrialRecord, TrialStatus};
use crate::error::{Error, Result};
use crate::hit_rate::hit_rate_surface;
use crate::geometry::GridSpec;
use crate::rng::trial_seed;

pub const SCHEMA_VERSION: u32 = 1;

pub const PLACEMENT_COLUMNS: [&str; 10] =
    ["trial", "lambda_r", "seed", "strategy", "x", "y", "value", "cached_value", "evaluations", "status"];
pub const SWEEP_COLUMNS: [&str; 5] = ["lambda_r", "name", "trial", "metric", "value"];
pub const SUMMARY_COLUMNS: [&str; 8] = ["lambda_r", "name", "metric", "n", "mean", "std", "min", "max"];
pub const VORONOI_COLUMNS: [&str; 6] = ["errh", "x", "y", "n_r", "area", "n_bar"];
pub const SURFACE_COLUMNS: [&str; 3] = ["x", "y", "hit_rate"];
pub const FIELD_COLUMNS: [&str; 3] = ["x", "y", "value"];
pub const BOXPLOT_COLUMNS: [&str; 4] = ["trial", "strategy", "value", "cached_value"];
pub const MSE_COLUMNS: [&str; 3] = ["trial", "estimator", "mse"];

/// Writes `bytes` to `path` via a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Output directory plus the manifest entries accumulated while writing.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    command: &'a str,
    files: &'a BTreeMap<String, Vec<String>>,
    sweep_lambda_r: &'a [f64],
    sweep_note: &'static str,
    config: &'a ExperimentConfig,
}

impl OutputDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into(), files: BTreeMap::new() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, columns: &[&str], bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        write_atomic(&path, bytes)?;
        self.files.insert(name.to_string(), columns.iter().map(|c| c.to_string()).collect());
        Ok(path)
    }

    pub fn write_rows<T: Serialize>(
        &mut self,
        name: &str,
        columns: &[&str],
        rows: impl IntoIterator<Item = T>,
    ) -> Result<PathBuf> {
        let bytes = csv_bytes(rows)?;
        self.write(name, columns, &bytes)
    }

    pub fn finish(self, command: &str, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            command,
            files: &self.files,
            sweep_lambda_r: &config.sweep,
            sweep_note: "swept eRRH intensities are a configurable grid around the baseline",
            config,
        };
        let path = self.root.join("manifest.json");
        write_atomic(&path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        let mut paths: Vec<PathBuf> = self.files.keys().map(|f| self.root.join(f)).collect();
        paths.push(path);
        Ok(paths)
    }
}

#[derive(Serialize)]
struct PlacementRow<'a> {
    trial: usize,
    lambda_r: f64,
    seed: u64,
    strategy: &'a str,
    x: f64,
    y: f64,
    value: f64,
    cached_value: f64,
    evaluations: usize,
    status: &'a str,
}

/// Long-format placement rows, one per trial and strategy. Failed trials
/// produce a single flagged row.
pub fn placement_rows(records: &[TrialRecord], p_c: f64) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for r in records {
        match &r.status {
            TrialStatus::Failed(reason) => rows.push(PlacementRow {
                trial: r.trial,
                lambda_r: r.lambda_r,
                seed: r.seed,
                strategy: "none",
                x: f64::NAN,
                y: f64::NAN,
                value: f64::NAN,
                cached_value: f64::NAN,
                evaluations: 0,
                status: reason,
            }),
            TrialStatus::Ok => {
                for p in &r.placements {
                    rows.push(PlacementRow {
                        trial: r.trial,
                        lambda_r: r.lambda_r,
                        seed: r.seed,
                        strategy: p.strategy.name(),
                        x: p.location.x,
                        y: p.location.y,
                        value: p.value,
                        cached_value: p.value * p_c,
                        evaluations: p.evaluations,
                        status: "ok",
                    });
                }
                if let Some((loc, value)) = r.true_hotspot {
                    rows.push(PlacementRow {
                        trial: r.trial,
                        lambda_r: r.lambda_r,
                        seed: r.seed,
                        strategy: "hotspot_true",
                        x: loc.x,
                        y: loc.y,
                        value,
                        cached_value: value * p_c,
                        evaluations: 1,
                        status: "ok",
                    });
                }
            }
        }
    }
    csv_bytes(rows)
}

#[derive(Serialize)]
struct BoxplotRow<'a> {
    trial: usize,
    strategy: &'a str,
    value: f64,
    cached_value: f64,
}

fn boxplot_rows(records: &[TrialRecord], config: &ExperimentConfig) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for r in records.iter().filter(|r| r.is_ok()) {
        for s in &config.strategies {
            if let Some(v) = r.value(*s) {
                rows.push(BoxplotRow { trial: r.trial, strategy: s.name(), value: v, cached_value: v * config.channel.p_c });
            }
        }
    }
    csv_bytes(rows)
}

#[derive(Serialize)]
struct MseRow<'a> {
    trial: usize,
    estimator: &'a str,
    mse: f64,
}

/// Per-trial MSE of every compared estimator.
pub fn mse_rows(records: &[TrialRecord]) -> Result<Vec<u8>> {
    let rows = records
        .iter()
        .flat_map(|r| r.mse.iter().map(move |(e, m)| MseRow { trial: r.trial, estimator: e.name(), mse: *m }));
    csv_bytes(rows)
}

pub fn write_sweep(out: &mut OutputDir, report: &SweepReport, prefix: &str) -> Result<()> {
    out.write_rows(&format!("{prefix}.csv"), &SWEEP_COLUMNS, &report.rows)?;
    out.write_rows(&format!("{prefix}_summary.csv"), &SUMMARY_COLUMNS, &report.summary)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    VoronoiLoads,
    DensityPair,
    MseCurves,
    Surface,
    Boxplot,
    Sweep,
}

impl FigureKind {
    pub const ALL: [FigureKind; 6] = [
        FigureKind::VoronoiLoads,
        FigureKind::DensityPair,
        FigureKind::MseCurves,
        FigureKind::Surface,
        FigureKind::Boxplot,
        FigureKind::Sweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureKind::VoronoiLoads => "voronoi_loads",
            FigureKind::DensityPair => "density_pair",
            FigureKind::MseCurves => "mse_curves",
            FigureKind::Surface => "surface",
            FigureKind::Boxplot => "boxplot",
            FigureKind::Sweep => "sweep",
        }
    }
}

impl fmt::Display for FigureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            Error::Usage(format!(
                "unknown figure '{s}' (voronoi_loads|density_pair|mse_curves|surface|boxplot|sweep)"
            ))
        })
    }
}

#[derive(Serialize)]
struct VoronoiRow {
    errh: usize,
    x: f64,
    y: f64,
    n_r: usize,
    area: f64,
    n_bar: f64,
}

/// Per-eRRH loads, Voronoi areas and normalized loads of one trial.
pub fn voronoi_rows(ctx: &TrialContext) -> Result<Vec<u8>> {
    let obs = &ctx.observation;
    let levels = obs.normalized_loads();
    csv_bytes((0..obs.len()).map(|i| VoronoiRow {
        errh: i,
        x: obs.errh_locations[i].x,
        y: obs.errh_locations[i].y,
        n_r: obs.loads[i],
        area: obs.voronoi_areas[i],
        n_bar: levels[i],
    }))
}

/// Grid of true and estimated densities: `x, y, truth, <estimator>...`.
pub fn density_pair_bytes(ctx: &TrialContext) -> Result<(Vec<u8>, Vec<String>)> {
    let mut columns = vec!["x".to_string(), "y".to_string(), "truth".to_string()];
    columns.extend(ctx.estimates.keys().map(|e| e.name().to_string()));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&columns)?;
    for i in 0..ctx.grid.len() {
        let c = ctx.grid.center_of(i);
        let mut rec = vec![c.x.to_string(), c.y.to_string(), ctx.truth.values[i].to_string()];
        rec.extend(ctx.estimates.values().map(|f| f.values[i].to_string()));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok((bytes, columns))
}

/// Writes the data behind one figure into `out` and returns the written
/// paths (manifest last). Single-scene figures use trial 0.
pub fn emit_figure_data(config: &ExperimentConfig, which: FigureKind, out_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let mut out = OutputDir::new(out_dir);
    let scene_ctx = || TrialContext::build(config, config.lambda_r, trial_seed(config.seed, 0));
    match which {
        FigureKind::VoronoiLoads => {
            let ctx = scene_ctx()?;
            out.write("voronoi_loads.csv", &VORONOI_COLUMNS, &voronoi_rows(&ctx)?)?;
        }
        FigureKind::DensityPair => {
            let ctx = scene_ctx()?;
            let (bytes, columns) = density_pair_bytes(&ctx)?;
            let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
            out.write("density_pair.csv", &cols, &bytes)?;
        }
        FigureKind::Surface => {
            let ctx = scene_ctx()?;
            let grid = GridSpec::new(config.search_region(), config.grid_search.nx, config.grid_search.ny)?;
            let surface = hit_rate_surface(&ctx.objective(config)?, &grid)?;
            let mut buf = Vec::new();
            surface.write_csv(&mut buf)?;
            out.write("surface.csv", &SURFACE_COLUMNS, &buf)?;
            if config.score_on_true_density {
                let truth = hit_rate_surface(&ctx.true_objective(config)?, &grid)?;
                let mut buf = Vec::new();
                truth.write_csv(&mut buf)?;
                out.write("surface_true.csv", &SURFACE_COLUMNS, &buf)?;
            }
        }
        FigureKind::Boxplot => {
            let records = run_trials(config, config.lambda_r);
            out.write("boxplot.csv", &BOXPLOT_COLUMNS, &boxplot_rows(&records, config)?)?;
        }
        FigureKind::MseCurves => {
            // Estimators only; no placement.
            let mse_only = ExperimentConfig { strategies: vec![], ..config.clone() };
            let report = run_sweep(&mse_only)?;
            write_sweep(&mut out, &report, "mse_curves")?;
        }
        FigureKind::Sweep => {
            let report = run_sweep(config)?;
            write_sweep(&mut out, &report, "sweep")?;
        }
    }
    out.finish(which.name(), config)
}

pub fn write_boxplot(out: &mut OutputDir, records: &[TrialRecord], config: &ExperimentConfig) -> Result<PathBuf> {
    out.write("boxplot.csv", &BOXPLOT_COLUMNS, &boxplot_rows(records, config)?)
}
