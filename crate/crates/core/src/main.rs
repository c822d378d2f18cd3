use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qd_transport::scenario::{NMax, Scenario, Variant, PRESETS};
use qd_transport::{runner, Error, Result};

#[derive(Parser)]
#[command(name = "qd-transport", version, about = "Steady-state transmission of a driven cavity-QED waveguide system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML scenario and write CSV tables plus a manifest.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
    /// Print a preset as TOML, a starting point for custom configs.
    Show { preset: String },
}

#[derive(Args)]
struct RunArgs {
    /// Preset name (same as --preset).
    #[arg(value_name = "PRESET", conflicts_with_all = ["preset", "config"])]
    positional: Option<String>,
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the number of sweep points.
    #[arg(long)]
    points: Option<usize>,
    /// "auto" or a fixed photon cutoff.
    #[arg(long)]
    n_max: Option<NMax>,
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated variant list, e.g. full,wea3.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<Variant>>,
    #[arg(long)]
    threads: Option<usize>,
}

fn load(args: &RunArgs) -> Result<Scenario> {
    let mut s = match (&args.positional, &args.preset, &args.config) {
        (Some(p), _, _) | (None, Some(p), _) => Scenario::preset(p)?,
        (None, None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Scenario::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        (None, None, None) => return Err(Error::Config("give a preset or --config FILE".into())),
    };
    if let Some(n) = args.points {
        s.grid.points = n;
    }
    if let Some(n) = args.n_max {
        s.n_max = n;
    }
    if let Some(t) = args.tol {
        s.tol = t;
    }
    if let Some(v) = &args.variants {
        s.variants = v.clone();
    }
    s.validate()?;
    Ok(s)
}

fn run(args: RunArgs) -> Result<()> {
    let s = load(&args)?;
    let manifest = runner::execute(&s, &args.out, args.threads)?;
    for r in &manifest.runs {
        println!(
            "{:<28} {:>5} points  n_max {}..{}  {:.2} s",
            r.file, r.points, r.n_max_min, r.n_max_max, r.runtime_s
        );
    }
    if let Some(f) = &manifest.conditional_phase_file {
        println!("{f}");
    }
    if manifest.phonon.enabled {
        println!(
            "<B> = {:.4}  Gamma+ = {:.3} ueV  Gamma- = {:.3} ueV",
            manifest.phonon.mean_B, manifest.phonon.gamma_ph_plus_ueV, manifest.phonon.gamma_ph_minus_ueV
        );
    }
    println!(
        "wrote {} ({:.2} s, {} threads)",
        runner::manifest_path(&args.out, &s.name).display(),
        manifest.total_runtime_s,
        manifest.threads
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            Ok(())
        }
        Command::Show { preset } => Scenario::preset(&preset)
            .and_then(|s| s.to_toml())
            .map(|t| print!("{t}")),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
