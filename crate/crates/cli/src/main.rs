//! `shplace`: command-line front end for the SH placement experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use shplace_core::density::density_mse;
use shplace_core::experiment::output::{mse_rows, placement_rows, write_boxplot, write_sweep, MSE_COLUMNS, PLACEMENT_COLUMNS, SURFACE_COLUMNS, FIELD_COLUMNS};
use shplace_core::experiment::{emit_figure_data, run_sweep, run_trial, run_trials, OutputDir, SweepReport, TrialContext};
use shplace_core::hit_rate::hit_rate_surface;
use shplace_core::rng::trial_seed;
use shplace_core::{Error, Estimator, ExperimentConfig, FigureKind, GridSpec, Strategy};

#[derive(Parser)]
#[command(name = "shplace", version, about = "Smart-helper placement experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; defaults to the baseline scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output directory; defaults to the config's `outputs`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Density estimator feeding the placement objective.
    #[arg(long, global = true, value_parser = parse_estimator)]
    estimator: Option<Estimator>,
    /// Restrict placement to a single strategy.
    #[arg(long, global = true, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one scene and write it as JSON.
    Generate,
    /// Estimate the density of one scene and report the MSE against the truth.
    Estimate,
    /// Hit-rate surface of one scene over the search region.
    Surface,
    /// Place the SH in one scene.
    Optimize,
    /// Compare strategies over `trials` scenes at the configured λ_R.
    Compare,
    /// Compare strategies across the configured λ_R sweep.
    Sweep,
    /// Write the data behind one figure.
    Figure {
        #[arg(long, value_parser = parse_figure)]
        which: FigureKind,
    },
}

fn parse_estimator(s: &str) -> Result<Estimator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_figure(s: &str) -> Result<FigureKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    if let Some(e) = common.estimator {
        config.density_estimator.primary = e;
    }
    if let Some(s) = common.strategy {
        config.strategies = vec![s];
    }
    if let Some(out) = &common.out {
        config.outputs = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn first_scene(config: &ExperimentConfig) -> Result<TrialContext> {
    Ok(TrialContext::build(config, config.lambda_r, trial_seed(config.seed, 0))?)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn summary_line(report: &SweepReport, config: &ExperimentConfig, lambda_r: f64) {
    for s in &config.strategies {
        if let Some(m) = report.mean(lambda_r, s.name(), "hit_rate") {
            println!("lambda_r={lambda_r} {:<8} mean hit rate {m:.2}", s.name());
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli.common)?;
    let out_dir: &Path = &config.outputs;
    let mut out = OutputDir::new(out_dir);
    let name = match &cli.command {
        Command::Generate => {
            let ctx = first_scene(&config)?;
            out.write("scene.json", &[], ctx.scene.to_json()?.as_bytes())?;
            println!("{} eRRHs, {} users", ctx.scene.errhs.len(), ctx.scene.n_users());
            "generate"
        }
        Command::Estimate => {
            let ctx = first_scene(&config)?;
            let e = config.density_estimator.primary;
            let field = ctx.estimate(e)?;
            let mut buf = Vec::new();
            field.write_csv(&mut buf)?;
            out.write(&format!("density_{e}.csv"), &FIELD_COLUMNS, &buf)?;
            let mut buf = Vec::new();
            ctx.truth.write_csv(&mut buf)?;
            out.write("density_true.csv", &FIELD_COLUMNS, &buf)?;
            let mse = density_mse(field, &ctx.truth, &config.window)?;
            println!("{e} mse {mse:.4}");
            "estimate"
        }
        Command::Surface => {
            let ctx = first_scene(&config)?;
            let grid = GridSpec::new(config.search_region(), config.grid_search.nx, config.grid_search.ny)?;
            let surface = hit_rate_surface(&ctx.objective(&config)?, &grid)?;
            let mut buf = Vec::new();
            surface.write_csv(&mut buf)?;
            out.write("surface.csv", &SURFACE_COLUMNS, &buf)?;
            let (p, v) = surface.max();
            println!("surface max {v:.2} at ({:.3}, {:.3})", p.x, p.y);
            "surface"
        }
        Command::Optimize => {
            let record = run_trial(&config, 0);
            out.write("placements.csv", &PLACEMENT_COLUMNS, &placement_rows(std::slice::from_ref(&record), config.channel.p_c)?)?;
            for p in &record.placements {
                println!("{:<8} ({:.3}, {:.3}) hit rate {:.2}", p.strategy.name(), p.location.x, p.location.y, p.value);
            }
            "optimize"
        }
        Command::Compare => {
            let records = run_trials(&config, config.lambda_r);
            let report = SweepReport::from_records(records, config.channel.p_c);
            out.write("placements.csv", &PLACEMENT_COLUMNS, &placement_rows(&report.records, config.channel.p_c)?)?;
            out.write("mse.csv", &MSE_COLUMNS, &mse_rows(&report.records)?)?;
            write_boxplot(&mut out, &report.records, &config)?;
            write_sweep(&mut out, &report, "compare")?;
            summary_line(&report, &config, config.lambda_r);
            if report.failed_trials() > 0 {
                eprintln!("{} trial(s) failed; see placements.csv", report.failed_trials());
            }
            "compare"
        }
        Command::Sweep => {
            let report = run_sweep(&config)?;
            out.write("placements.csv", &PLACEMENT_COLUMNS, &placement_rows(&report.records, config.channel.p_c)?)?;
            write_sweep(&mut out, &report, "sweep")?;
            for &l in &config.sweep {
                summary_line(&report, &config, l);
            }
            "sweep"
        }
        Command::Figure { which } => {
            report(&emit_figure_data(&config, *which, out_dir)?);
            return Ok(());
        }
    };
    report(&out.finish(name, &config)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Usage(_)) | Some(Error::InvalidParameter(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
