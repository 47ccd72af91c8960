//! Command-line entry point: copy-solver runs, classical baselines,
//! measurement demos, resource estimates, and the batch experiments.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 runtime or
//! resource error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qode_core::baselines::{self, EnsembleSpec};
use qode_core::copy_solver::{self, marginal};
use qode_core::error::Error;
use qode_core::experiments::{self, ExperimentConfig, ExperimentId, OutputFormat};
use qode_core::ode::OdeSpec;
use qode_core::qubit::{self, Gate};
use qode_core::resources;

#[derive(Parser, Debug)]
#[command(name = "qode", version, about = "Mean-field multi-copy emulator for the cubic toy ODE")]
struct Cli {
    /// RNG seed for all stochastic operations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output directory (falls back to $QODE_OUT_DIR, then ".").
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Optional TOML config file; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Which artifacts to emit for figure experiments.
    #[arg(long, global = true, value_parser = parse_format, default_value = "both")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

fn parse_format(s: &str) -> Result<String, String> {
    match s {
        "csv" | "svg" | "both" => Ok(s.to_string()),
        other => Err(format!("unknown format '{other}', expected csv|svg|both")),
    }
}

#[derive(Args, Debug, Clone)]
struct OdeArgs {
    /// Cubic coupling strength α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Linear growth coefficient λ.
    #[arg(long)]
    linear: Option<f64>,
    /// Step size Δt.
    #[arg(long)]
    dt: Option<f64>,
    /// Number of integration steps T.
    #[arg(long)]
    steps: Option<usize>,
    /// Initial value x₀.
    #[arg(long)]
    x0: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the two-qubit entangled state and dump its amplitudes as CSV.
    Bell,
    /// Born-sample a demo state and print outcome counts.
    Measure {
        /// State to sample: bell | plus.
        #[arg(long, default_value = "bell")]
        state: String,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
    },
    /// Run the multi-copy solver and export its trajectory.
    Solve {
        #[command(flatten)]
        ode: OdeArgs,
        /// Number of identical copies N.
        #[arg(long)]
        copies: Option<usize>,
    },
    /// Classical reference trajectories on a common grid.
    Baseline {
        #[command(flatten)]
        ode: OdeArgs,
    },
    /// Ensemble-averaged Euler over perturbed initial conditions.
    Ensemble {
        #[command(flatten)]
        ode: OdeArgs,
        /// Ensemble size.
        #[arg(long)]
        size: Option<usize>,
        /// Std deviation of the initial-condition perturbation.
        #[arg(long)]
        sigma: Option<f64>,
        /// Additive per-step noise; adds an Euler–Maruyama column when > 0.
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
    },
    /// Quantum-hardware resource arithmetic.
    Resources {
        #[arg(long, default_value_t = 3)]
        vars: u64,
        #[arg(long, default_value_t = 100)]
        steps: u64,
        #[arg(long, default_value_t = 100)]
        ancilla: u32,
        #[arg(long, default_value_t = 1e29)]
        depth: f64,
        #[arg(long, default_value_t = 1e-9)]
        gate_time: f64,
        /// Also write the table as CSV into the output directory.
        #[arg(long)]
        csv: bool,
    },
    /// Reproduce the left Fig. 2 panel (three initial values, α = 2).
    Fig2Left,
    /// Reproduce the right Fig. 2 panel (α ∈ {2, 8, 16}).
    Fig2Right,
    /// Reproduce Fig. 3 (solver vs Euler, ensemble mean, RK4 at α = 8).
    Fig3,
    /// Deviation-from-Euler profiles across copy counts.
    ErrorGrowth {
        /// Comma-separated copy counts.
        #[arg(long, value_delimiter = ',', default_values_t = vec![5usize, 10, 15])]
        copies: Vec<usize>,
    },
}

/// Values readable from the optional config file.
#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    ode: Option<FileOde>,
    copies: Option<usize>,
    seed: Option<u64>,
    shots: Option<u64>,
    ensemble: Option<FileEnsemble>,
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
struct FileOde {
    alpha: Option<f64>,
    linear: Option<f64>,
    dt: Option<f64>,
    steps: Option<usize>,
    x0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct FileEnsemble {
    size: Option<usize>,
    sigma: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) | Error::Validation(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Error> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("bad config file: {e}")))
}

/// Merge CLI flags over config-file values over the locked defaults and
/// record which fields left the defaults.
fn resolve_ode(
    args: &OdeArgs,
    file: &FileConfig,
    defaults: OdeSpec,
    overridden: &mut Vec<String>,
) -> Result<OdeSpec, Error> {
    let file_ode = file.ode.as_ref();
    let mut pick = |name: &str, cli: Option<f64>, cfg: Option<f64>, default: f64| -> f64 {
        match cli.or(cfg) {
            Some(v) => {
                if v != default {
                    overridden.push(name.to_string());
                }
                v
            }
            None => default,
        }
    };
    let spec = OdeSpec {
        cubic_coeff: pick(
            "alpha",
            args.alpha,
            file_ode.and_then(|o| o.alpha),
            defaults.cubic_coeff,
        ),
        linear_coeff: pick(
            "linear",
            args.linear,
            file_ode.and_then(|o| o.linear),
            defaults.linear_coeff,
        ),
        dt: pick("dt", args.dt, file_ode.and_then(|o| o.dt), defaults.dt),
        x0: pick("x0", args.x0, file_ode.and_then(|o| o.x0), defaults.x0),
        steps: match args.steps.or(file_ode.and_then(|o| o.steps)) {
            Some(v) => {
                if v != defaults.steps {
                    overridden.push("steps".to_string());
                }
                v
            }
            None => defaults.steps,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), Error> {
    let file = load_config(cli.config.as_deref())?;
    let seed = file.seed.unwrap_or(cli.seed);
    let seed = if cli.seed != 0 { cli.seed } else { seed };
    let out_dir = cli
        .out_dir
        .clone()
        .or(file.out_dir.clone())
        .or_else(|| std::env::var_os("QODE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = match cli.format.as_str() {
        "csv" => OutputFormat::Csv,
        "svg" => OutputFormat::Svg,
        _ => OutputFormat::Both,
    };

    let solve_defaults = OdeSpec::new(2.0, 0.05, 30, 0.1).expect("valid defaults");
    let stdout = std::io::stdout();

    match &cli.command {
        Command::Bell => {
            let state = qubit::bell_circuit();
            state
                .write_csv(stdout.lock())
                .map_err(|e| Error::io("<stdout>", e))?;
        }
        Command::Measure { state, shots } => {
            let shots = file.shots.unwrap_or(*shots);
            let target = match state.as_str() {
                "bell" => qubit::bell_circuit(),
                "plus" => qubit::apply_gate(&qubit::basis_state(1, 0)?, &Gate::h(), &[0])?,
                other => {
                    return Err(Error::Domain(format!(
                        "unknown state '{other}', expected bell|plus"
                    )))
                }
            };
            let record = qubit::measure(&target, shots, seed)?;
            let mut out = stdout.lock();
            writeln!(out, "index,count").map_err(|e| Error::io("<stdout>", e))?;
            for (index, count) in &record.counts {
                writeln!(out, "{index},{count}").map_err(|e| Error::io("<stdout>", e))?;
            }
        }
        Command::Solve { ode, copies } => {
            let mut overridden = Vec::new();
            let spec = resolve_ode(ode, &file, solve_defaults, &mut overridden)?;
            let n_copies = copies.or(file.copies).unwrap_or(15);
            if n_copies != 15 {
                overridden.push("copies".to_string());
            }
            let history = copy_solver::solve_history(&spec, n_copies)?;
            let path = out_dir.join("solve.csv");
            let mut csv = create(&path)?;
            writeln!(csv, "step,t,x_quantum").map_err(|e| Error::io(&path, e))?;
            for (k, block) in history.blocks.iter().enumerate() {
                writeln!(
                    csv,
                    "{k},{},{}",
                    k as f64 * spec.dt,
                    marginal(block, 0)?.x_est
                )
                .map_err(|e| Error::io(&path, e))?;
            }
            write_sidecar(
                &out_dir.join("solve.meta.toml"),
                &ExperimentConfig {
                    id: ExperimentId::Custom,
                    ode: spec,
                    n_copies,
                    ensemble: None,
                    seed,
                    overridden,
                },
            )?;
            println!("wrote {}", path.display());
        }
        Command::Baseline { ode } => {
            let mut overridden = Vec::new();
            let spec = resolve_ode(ode, &file, solve_defaults, &mut overridden)?;
            let euler = baselines::euler(&spec)?;
            let rk4 = baselines::rk4(&spec)?;
            let path = out_dir.join("baseline.csv");
            let mut csv = create(&path)?;
            writeln!(csv, "step,t,x_euler,x_rk4,x_analytic").map_err(|e| Error::io(&path, e))?;
            for k in 0..=spec.steps {
                let t = k as f64 * spec.dt;
                writeln!(
                    csv,
                    "{k},{t},{},{},{}",
                    euler.points[k].1,
                    rk4.points[k].1,
                    baselines::analytic(&spec, t)?
                )
                .map_err(|e| Error::io(&path, e))?;
            }
            println!("wrote {}", path.display());
        }
        Command::Ensemble {
            ode,
            size,
            sigma,
            noise_sigma,
        } => {
            let mut overridden = Vec::new();
            let spec = resolve_ode(ode, &file, solve_defaults, &mut overridden)?;
            let file_ens = file.ensemble.as_ref();
            let ens = EnsembleSpec {
                size: size.or(file_ens.and_then(|e| e.size)).unwrap_or(100),
                sigma: sigma.or(file_ens.and_then(|e| e.sigma)).unwrap_or(0.05),
                seed,
            };
            let mean = baselines::ensemble_mean(&spec, &ens)?;
            let noisy = if *noise_sigma > 0.0 {
                Some(baselines::euler_maruyama(&spec, *noise_sigma, seed)?)
            } else {
                None
            };
            let path = out_dir.join("ensemble.csv");
            let mut csv = create(&path)?;
            match &noisy {
                Some(_) => writeln!(csv, "step,t,x_ensemble,x_euler_maruyama"),
                None => writeln!(csv, "step,t,x_ensemble"),
            }
            .map_err(|e| Error::io(&path, e))?;
            for k in 0..=spec.steps {
                let t = k as f64 * spec.dt;
                match &noisy {
                    Some(n) => writeln!(
                        csv,
                        "{k},{t},{},{}",
                        mean.points[k].1, n.points[k].1
                    ),
                    None => writeln!(csv, "{k},{t},{}", mean.points[k].1),
                }
                .map_err(|e| Error::io(&path, e))?;
            }
            write_sidecar(
                &out_dir.join("ensemble.meta.toml"),
                &ExperimentConfig {
                    id: ExperimentId::Custom,
                    ode: spec,
                    n_copies: 0,
                    ensemble: Some(ens),
                    seed,
                    overridden,
                },
            )?;
            println!("wrote {}", path.display());
        }
        Command::Resources {
            vars,
            steps,
            ancilla,
            depth,
            gate_time,
            csv,
        } => {
            if *vars < 1 || *steps < 1 {
                return Err(Error::Domain("vars and steps must be at least 1".into()));
            }
            if !(*depth >= 1.0) || !(*gate_time > 0.0) {
                return Err(Error::Domain(
                    "depth must be >= 1 and gate-time positive".into(),
                ));
            }
            let est = resources::estimate(*vars, *steps, *ancilla, *depth, *gate_time);
            let rows = resources::report(&est, *vars, *steps);
            resources::write_table(&rows, stdout.lock()).map_err(|e| Error::io("<stdout>", e))?;
            if *csv {
                let path = out_dir.join("resources.csv");
                let w = create(&path)?;
                resources::write_csv(&rows, w).map_err(|e| Error::io(&path, e))?;
                println!("wrote {}", path.display());
            }
        }
        Command::Fig2Left => report_run(experiments::run_fig2_left(&out_dir, format)?),
        Command::Fig2Right => report_run(experiments::run_fig2_right(&out_dir, format)?),
        Command::Fig3 => report_run(experiments::run_fig3(&out_dir, format, seed)?),
        Command::ErrorGrowth { copies } => {
            report_run(experiments::run_error_growth(&out_dir, copies)?)
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>, Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    Ok(std::io::BufWriter::new(
        fs::File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    experiment: &'a ExperimentConfig,
    artifact_version: &'static str,
}

fn write_sidecar(path: &Path, config: &ExperimentConfig) -> Result<(), Error> {
    let text = toml::to_string_pretty(&Sidecar {
        experiment: config,
        artifact_version: env!("CARGO_PKG_VERSION"),
    })
    .expect("sidecar serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn report_run(run: experiments::RunArtifacts) {
    println!("wrote {}", run.csv.display());
    if let Some(svg) = &run.svg {
        println!("wrote {}", svg.display());
    }
    println!("wrote {}", run.metadata.display());
    if let Some(m) = run.ensemble_affinity {
        println!("ensemble affinity metric: {m}");
    }
}
