mod config;
mod error;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use singmap::{
    integrate_path, long_jump_path, pole_vault_path, Atlas, AtlasError, IntegrationFailure, PainleveI, PathSolution,
    PathSpec, VaultSpec,
};

use crate::config::{vault_spec, PathKind, RunConfig};
use crate::error::CliError;

/// Complex-path Taylor integration and singularity mapping for Painleve I.
#[derive(Debug, Parser)]
#[command(name = "singmap", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Atlas JSON file; overrides `outputs.atlas_json`.
    #[arg(long, global = true)]
    atlas: Option<PathBuf>,
    /// Directory for output files; relative output paths resolve against it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate along the configured path and print the step table.
    Integrate,
    /// Integrate, then merge the located singularities into the atlas.
    Map,
    /// Value of the solution at a real point past the real-axis poles.
    ValueAt {
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "long_jump")]
        method: Method,
        /// Height of the long-jump detour; negative goes below the axis.
        #[arg(long, default_value_t = 0.3)]
        offset: f64,
    },
    /// Emit plot-ready CSV from an atlas (scatter) or a steps CSV (trace).
    PlotData {
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// Input file; defaults to the atlas (scatter) or the configured steps CSV (trace).
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    #[value(name = "long_jump")]
    LongJump,
    #[value(name = "pole_vault")]
    PoleVault,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlotKind {
    Scatter,
    Trace,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
    }
    match &cli.command {
        Command::Integrate => integrate(cli, false),
        Command::Map => integrate(cli, true),
        Command::ValueAt { t, method, offset } => value_at(cli, *t, *method, *offset),
        Command::PlotData { kind, input } => plot_data(cli, *kind, input.as_deref()),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    RunConfig::load(path)
}

fn resolve(cli: &Cli, configured: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    match (configured, &cli.out) {
        (Some(p), Some(dir)) => Some(dir.join(p)),
        (Some(p), None) => Some(p.to_path_buf()),
        (None, Some(dir)) => Some(dir.join(default_name)),
        (None, None) => None,
    }
}

fn atlas_path(cli: &Cli, config: Option<&RunConfig>) -> Option<PathBuf> {
    cli.atlas
        .clone()
        .or_else(|| config.and_then(|c| resolve(cli, c.outputs.atlas_json.as_deref(), "atlas.json")))
}

fn vault_poles(cli: &Cli, config: &RunConfig, t: f64) -> Result<Vec<f64>, CliError> {
    let path = atlas_path(cli, Some(config))
        .filter(|p| p.exists())
        .ok_or_else(|| CliError::MissingAtlas("pole vaulting needs an existing atlas (--atlas)".into()))?;
    let atlas = Atlas::load(&path)?;
    let poles = atlas.real_poles_between(0.0, t);
    log::info!("vaulting over {} poles from {}", poles.len(), path.display());
    Ok(poles)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_outputs(cli: &Cli, config: &RunConfig, sol: &PathSolution) -> Result<(), CliError> {
    if let Some(p) = resolve(cli, config.outputs.steps_csv.as_deref(), "steps.csv") {
        output::write_steps(create(&p)?, sol, config.problem.y0.len())?;
    }
    if let Some(p) = resolve(cli, config.outputs.estimates_csv.as_deref(), "estimates.csv") {
        output::write_estimates(create(&p)?, sol)?;
    }
    Ok(())
}

fn solve(config: &RunConfig, path: &PathSpec) -> (PathSolution, Option<singmap::StepError>) {
    match integrate_path(&PainleveI, &config.problem().y0, path, &config.options) {
        Ok(sol) => (sol, None),
        Err(IntegrationFailure { error, partial }) => (partial, Some(error)),
    }
}

fn integrate(cli: &Cli, map: bool) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let path = config.build_path(|t| vault_poles(cli, &config, t))?;
    let atlas_file = if map {
        Some(atlas_path(cli, Some(&config)).ok_or_else(|| CliError::Config("map needs --atlas".into()))?)
    } else {
        None
    };
    let (sol, failure) = solve(&config, &path);
    write_outputs(cli, &config, &sol)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    if let Some(file) = atlas_file {
        let existed = file.exists();
        let mut atlas = if existed {
            Atlas::load(&file)?
        } else {
            Atlas::new(config.options.merge_tol)
        };
        if existed {
            let audit = atlas.audit_reproducibility(&sol.estimates);
            writeln!(
                out,
                "audit: {} estimates matched {} entries; {} unmatched beyond 2*merge_tol; max distance {:.3e}",
                audit.matched,
                audit.matched_entries,
                audit.unmatched_beyond(2.0 * atlas.merge_tol),
                audit.max_distance
            )?;
            if let Some(dir) = &cli.out {
                serde_json::to_writer_pretty(create(&dir.join("audit.json"))?, &audit)?;
            }
        }
        let id = config
            .campaign_id
            .clone()
            .unwrap_or_else(|| format!("campaign-{}", atlas.campaigns().len() + 1));
        let campaign = singmap::Campaign::new(id, config.problem(), path, config.options.clone(), &sol);
        let summary = atlas.ingest(campaign, &sol.estimates).map_err(|e| match e {
            AtlasError::DuplicateCampaign(_) => CliError::Config(e.to_string()),
            e => e.into(),
        })?;
        atlas.save(&file)?;
        writeln!(
            out,
            "ingest: {} new, {} merged, {} rejected; atlas has {} entries ({} confirmed)",
            summary.new,
            summary.merged,
            summary.rejected,
            atlas.len(),
            atlas.confirmed().count()
        )?;
    } else {
        output::write_table(&mut out, &sol)?;
    }
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn value_at(cli: &Cli, t: f64, method: Method, offset: f64) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let path = match method {
        Method::LongJump => long_jump_path(t, offset),
        Method::PoleVault => {
            let poles = vault_poles(cli, &config, t)?;
            let spec = match &config.path {
                Some(p) if p.kind == Some(PathKind::PoleVault) => vault_spec(poles, p),
                _ => VaultSpec::new(poles),
            };
            pole_vault_path(&spec, t)
        }
    }
    .map_err(|e| CliError::Config(format!("invalid path: {e}")))?;
    config.check_start(&path)?;
    let (sol, failure) = solve(&config, &path);
    write_outputs(cli, &config, &sol)?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let y = sol.final_state().expect("successful integration has records");
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let name = match method {
        Method::LongJump => "long_jump",
        Method::PoleVault => "pole_vault",
    };
    writeln!(out, "method  {name}")?;
    writeln!(out, "steps   {}", sol.records.len() - 1)?;
    writeln!(out, "y({t})  = {:.10} {:+.3e} i", y[0].re, y[0].im)?;
    writeln!(out, "y'({t}) = {:.10} {:+.3e} i", y[1].re, y[1].im)?;
    Ok(())
}

fn plot_data(cli: &Cli, kind: PlotKind, input: Option<&Path>) -> Result<(), CliError> {
    let (name, source) = match kind {
        PlotKind::Scatter => (
            "scatter.csv",
            input.map(Path::to_path_buf).or_else(|| cli.atlas.clone()),
        ),
        PlotKind::Trace => {
            let configured = match (input, &cli.config) {
                (Some(p), _) => Some(p.to_path_buf()),
                (None, Some(_)) => {
                    let config = load_config(cli)?;
                    resolve(cli, config.outputs.steps_csv.as_deref(), "steps.csv")
                }
                (None, None) => None,
            };
            ("trace.csv", configured)
        }
    };
    let source = source.ok_or_else(|| CliError::Config("plot-data needs --input, --atlas or --config".into()))?;
    let sink: Box<dyn Write> = match &cli.out {
        Some(dir) => Box::new(create(&dir.join(name))?),
        None => Box::new(std::io::stdout().lock()),
    };
    match kind {
        PlotKind::Scatter => output::write_scatter(sink, &Atlas::load(&source)?),
        PlotKind::Trace => output::write_trace(File::open(&source)?, sink),
    }
}
