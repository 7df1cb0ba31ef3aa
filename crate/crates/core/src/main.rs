use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use overlay_ber::fm::{fit_gaussian_psd, read_spectrum_csv};
use overlay_ber::sim::DEFAULT_SEED;
use overlay_ber::sweep::{figure_preset, reproduce_figure, run_sweep, Axis, Method};
use overlay_ber::parse_scenario;

/// BER of a DSSS link overlaid on FM broadcast stations.
#[derive(Parser)]
#[command(name = "overlay-ber", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-user analytic BER.
    Analytic(SweepArgs),
    /// Multi-user BER with the simplified improved Gaussian approximation.
    Siga(SweepArgs),
    /// Monte Carlo waveform simulation.
    Simulate(SweepArgs),
    /// Fit the Gaussian station model to a `freq_hz,psd_dbm` spectrum CSV.
    Fit {
        spectrum: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Reproduce a figure preset (fig3 .. fig10).
    Figure {
        id: String,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "NAME", default_value = "eb_n0")]
    axis: Axis,
    /// Write `<method>_<axis>.csv` here instead of to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the scenario seed (simulate only).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        anyhow::ensure!(n >= 1, "--jobs must be at least 1");
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => io::stdout().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn sweep(method: Method, label: &str, args: SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut scenario =
        parse_scenario(&text).with_context(|| format!("in {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        scenario.sim.seed = seed;
    }
    if method == Method::Simulate {
        eprintln!("seed: {}", scenario.sim.seed);
    }
    let result = pool(args.jobs)?.install(|| run_sweep(&scenario, method, args.axis))?;
    for row in &result.rows {
        for w in &row.warnings {
            eprintln!("warning: {} at {} = {}", w.label(), args.axis, row.sweep_value);
        }
        if !row.converged {
            eprintln!("warning: not converged at {} = {}", args.axis, row.sweep_value);
        }
    }
    emit(args.out.as_deref(), &format!("{label}_{}.csv", args.axis), &result.to_csv_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analytic(a) => sweep(Method::Analytic, "analytic", a),
        Command::Siga(a) => sweep(Method::Siga, "siga", a),
        Command::Simulate(a) => sweep(Method::Simulate, "simulate", a),
        Command::Fit { spectrum, out } => {
            let file =
                fs::File::open(&spectrum).with_context(|| format!("opening {}", spectrum.display()))?;
            let samples = read_spectrum_csv(file)?;
            let p = fit_gaussian_psd(&samples)?;
            let csv = format!(
                "floor_dbm,amplitude_db,center_hz,std_dev_hz,r_squared\n{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}\n",
                p.floor_dbm(),
                p.amplitude_db(),
                p.center_hz(),
                p.std_dev_hz(),
                p.r_squared().unwrap_or(f64::NAN)
            );
            emit(out.as_deref(), "fit.csv", &csv)
        }
        Command::Figure { id, out, seed, jobs } => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let preset = figure_preset(&id, seed)?;
            if preset.method == Method::Simulate {
                eprintln!("seed: {seed}");
            }
            let written = pool(jobs)?.install(|| reproduce_figure(&preset, &out))?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
    }
}
