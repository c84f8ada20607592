use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use macrobell_cli::config::{Experiment, Format, RunConfig, SCHEMA};
use macrobell_cli::error::CliError;
use macrobell_cli::{default_figure_alphas, env_out_dir, figures, output_path, run, Overrides};
use macrobell_core::QuadratureGrid;

/// Bell and EPR tests of macroscopic local realism with homodyne measurements.
#[derive(Debug, Parser)]
#[command(name = "macrobell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment named in --config.
    Run(Common),
    /// S against quadrature noise sigma0 for fixed analyzer angles.
    BellScan(Common),
    /// Largest noise that still gives a violation, per local-oscillator amplitude.
    NoiseThreshold(Common),
    /// Analyzer angles maximizing S.
    AngleOpt(Common),
    /// Exact finite-alpha engine against the quadrature limit.
    OracleCompare(Common),
    /// EPR criterion and margins for two-mode squeezed light.
    EprSweep(Common),
    /// Write fig3a.csv and fig3b.csv into --out (a directory).
    Figures(Common),
    /// Print the JSON schema for config files.
    Schema,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pair-coherent amplitude r0.
    #[arg(long, allow_negative_numbers = true)]
    r0: Option<f64>,
    /// Quadrature-unit noise; for bell-scan, scan only this value.
    #[arg(long, allow_negative_numbers = true)]
    sigma0: Option<f64>,
    /// Local-oscillator amplitudes, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    alpha: Option<Vec<f64>>,
    /// Analyzer phases theta,phi,theta',phi'.
    #[arg(long, value_parser = parse_angles, allow_hyphen_values = true)]
    angles: Option<[f64; 4]>,
    /// Fock cutoff of the state.
    #[arg(long)]
    nmax: Option<usize>,
    /// Quadrature grid lo:hi:step.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<QuadratureGrid>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output file (a directory for `figures`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            r0: self.r0,
            sigma0: self.sigma0,
            alpha: self.alpha.clone(),
            angles: self.angles,
            n_max: self.nmax,
            grid: self.grid,
            format: self.format,
        }
    }
}

fn parse_angles(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 comma-separated angles, got {}", v.len()))
}

fn parse_grid(s: &str) -> Result<QuadratureGrid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err("expected lo:hi:step".into());
    };
    QuadratureGrid::new(lo, hi, step).map_err(|e| e.to_string())
}

fn load(common: &Common, experiment: Option<Experiment>) -> Result<RunConfig, CliError> {
    let mut config = match (&common.config, experiment) {
        (Some(path), wanted) => {
            let config = RunConfig::from_path(path)?;
            if let Some(wanted) = wanted {
                if config.experiment != wanted {
                    return Err(CliError::Config(format!(
                        "{} describes a {} run, not {}",
                        path.display(),
                        config.experiment.name(),
                        wanted.name()
                    )));
                }
            }
            config
        }
        (None, Some(experiment)) => RunConfig::new(experiment),
        (None, None) => return Err(CliError::Config("`run` needs --config".into())),
    };
    common.overrides().apply(&mut config)?;
    Ok(config)
}

fn execute(command: Command) -> Result<(), CliError> {
    let (common, experiment) = match command {
        Command::Schema => {
            print!("{SCHEMA}");
            return Ok(());
        }
        Command::Figures(common) => {
            let mut config = match &common.config {
                Some(_) => load(&common, None)?,
                None => {
                    let mut c = RunConfig::new(Experiment::OracleCompare);
                    c.scan.alphas = default_figure_alphas();
                    c
                }
            };
            common.overrides().apply(&mut config)?;
            let dir = common
                .out
                .clone()
                .or_else(env_out_dir)
                .unwrap_or_else(|| PathBuf::from("."));
            for path in figures(&config, &dir, common.jobs)? {
                println!("{}", path.display());
            }
            return Ok(());
        }
        Command::Run(common) => (common, None),
        Command::BellScan(common) => (common, Some(Experiment::BellScan)),
        Command::NoiseThreshold(common) => (common, Some(Experiment::NoiseThreshold)),
        Command::AngleOpt(common) => (common, Some(Experiment::AngleOpt)),
        Command::OracleCompare(common) => (common, Some(Experiment::OracleCompare)),
        Command::EprSweep(common) => (common, Some(Experiment::EprSweep)),
    };
    let config = load(&common, experiment)?;
    let path = output_path(&config, common.out.as_deref(), env_out_dir().as_deref());
    run(&config, &path, common.jobs)?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap reports usage errors with status 2, which is reserved here
            // for truncation failures.
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("macrobell: error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
