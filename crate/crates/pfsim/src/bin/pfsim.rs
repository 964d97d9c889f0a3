//! Command-line front end: simulate trajectories, run the verification
//! suite, locate collapse-revival landmarks, and fan out parameter sweeps.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
//! 3 numerical contract violation.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pfsim::experiment::{
    preset, run_revival, run_simulate, run_sweep, run_verify, write_trajectory, ExperimentConfig,
    OutputFormat, SweepItem, VerifyScope, PRESET_NAMES,
};
use pfsim::{PfError, Result, Tolerances};

#[derive(Parser)]
#[command(
    name = "pfsim",
    version,
    about = "Simulator and verifier for even-order deformed oscillators hosted in a two-cavity qubit system"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve a configuration and write the trajectory
    Simulate(RunArgs),
    /// Run the verification suite and emit a JSON report
    Verify(VerifyArgs),
    /// Locate collapse and revival landmarks of a configuration
    Revival(RunArgs),
    /// Run several configurations concurrently
    Sweep(SweepArgs),
    /// List preset names, or dump one preset as config text
    Presets(PresetsArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Start from a named preset
    #[arg(long)]
    preset: Option<String>,
    /// Load a key-value config file on top
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override single keys, repeatable: --set key=value
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Override the algebra tolerance
    #[arg(long, value_name = "X")]
    tol_algebra: Option<f64>,
    /// Override the unitarity tolerance
    #[arg(long, value_name = "X")]
    tol_unitarity: Option<f64>,
}

impl ConfigArgs {
    fn build(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.preset {
            Some(name) => preset(name)?,
            None => ExperimentConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            cfg.merge_kv(&text)?;
        }
        for pair in &self.set {
            let Some((key, value)) = pair.split_once('=') else {
                return Err(PfError::InvalidConfig(format!(
                    "--set expects key=value, got '{pair}'"
                )));
            };
            cfg.apply_set(key, value)?;
        }
        if let Some(t) = self.tol_algebra {
            cfg.tol_algebra = t;
        }
        if let Some(t) = self.tol_unitarity {
            cfg.tol_unitarity = t;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trajectory format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// What to verify: algebra, frames, closedform, or all
    #[arg(long, default_value = "all")]
    scope: String,
    /// Largest subspace size covered
    #[arg(long, default_value_t = 6)]
    lambda_max: u32,
    /// Output file for the JSON report (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the algebra tolerance
    #[arg(long, value_name = "X")]
    tol_algebra: Option<f64>,
    /// Override the unitarity tolerance
    #[arg(long, value_name = "X")]
    tol_unitarity: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Presets to include, repeatable
    #[arg(long = "preset")]
    presets: Vec<String>,
    /// Config files to include, repeatable
    #[arg(long = "config")]
    configs: Vec<PathBuf>,
    /// Overrides applied to every item, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Directory the per-item output files go to
    #[arg(long)]
    out_dir: PathBuf,
    /// Trajectory format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct PresetsArgs {
    /// Preset to dump as config text; lists all names when omitted
    name: Option<String>,
}

fn open_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json<T: serde::Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut sink = open_sink(path)?;
    serde_json::to_writer_pretty(&mut sink, value)
        .map_err(|e| PfError::Io(std::io::Error::other(e)))?;
    sink.write_all(b"\n")?;
    sink.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Simulate(args) => {
            let cfg = args.config.build()?;
            let format: OutputFormat = args.format.parse()?;
            let sim = run_simulate(&cfg)?;
            let mut sink = open_sink(&args.out)?;
            write_trajectory(&mut sink, &sim, format)?;
            sink.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify(args) => {
            let scope: VerifyScope = args.scope.parse()?;
            let mut tol = Tolerances::default();
            if let Some(t) = args.tol_algebra {
                tol.algebra = t;
            }
            if let Some(t) = args.tol_unitarity {
                tol.unitarity = t;
            }
            let report = run_verify(scope, args.lambda_max, &tol)?;
            emit_json(&args.out, &report)?;
            if report.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                if let Some(w) = &report.worst {
                    eprintln!(
                        "verification failed: {} ({}) = {:.3e} against {:.1e}",
                        w.location, w.quantity, w.value, w.tolerance
                    );
                }
                Ok(ExitCode::from(1))
            }
        }
        Cmd::Revival(args) => {
            let cfg = args.config.build()?;
            let outcome = run_revival(&cfg)?;
            emit_json(&args.out, &outcome)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sweep(args) => {
            let format: OutputFormat = args.format.parse()?;
            let mut items = Vec::new();
            for name in &args.presets {
                let mut cfg = preset(name)?;
                apply_sets(&mut cfg, &args.set)?;
                items.push(SweepItem { name: name.clone(), config: cfg });
            }
            for path in &args.configs {
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| {
                        PfError::InvalidConfig(format!("config path '{}' has no stem", path.display()))
                    })?
                    .to_string();
                let mut cfg = ExperimentConfig::default();
                cfg.merge_kv(&std::fs::read_to_string(path)?)?;
                apply_sets(&mut cfg, &args.set)?;
                items.push(SweepItem { name: stem, config: cfg });
            }
            let entries = run_sweep(&items, &args.out_dir, format)?;
            for e in &entries {
                println!("{}\t{}\t{} points", e.name, e.path.display(), e.points);
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Presets(args) => {
            match args.name {
                Some(name) => print!("{}", preset(&name)?.to_kv_string()),
                None => {
                    for name in PRESET_NAMES {
                        println!("{name}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn apply_sets(cfg: &mut ExperimentConfig, sets: &[String]) -> Result<()> {
    for pair in sets {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(PfError::InvalidConfig(format!(
                "--set expects key=value, got '{pair}'"
            )));
        };
        cfg.apply_set(key, value)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
