//! Command-line driver: single-point steady states and evolutions,
//! master-equation runs and breakdown scans, phase-diagram sweeps, spectral
//! reports, and trapped-ion parameter conversion.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use dicke::cumulant::{
    evolve_moments_with, initial_moments, steady_state_closed_form, steady_state_numeric,
    InitialState, MomentVector,
};
use dicke::ionmap::{
    lamb_dicke_warning, lasers_to_model, model_to_lasers, FrequencyConvention, LaserSettings,
};
use dicke::liouville::{detect_breakdown, evolve_density, DensityState};
use dicke::ode::stepper_by_name;
use dicke::output;
use dicke::spectral::spectral_report;
use dicke::sweep::{run_sweep_to_path, SweepConfig};
use dicke::{Error, ModelParams};

#[derive(Parser)]
#[command(name = "dicke", version, about = "Driven-dissipative Dicke model simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

/// Model parameters, taken from `--config` JSON and overridden per flag.
#[derive(Args, Debug)]
struct PointArgs {
    /// JSON file with model parameters (keys n_spins, omega0, omega, g,
    /// gamma, kappa; all optional).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_spins: Option<usize>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, short = 'g')]
    g: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    n_spins: Option<usize>,
    omega0: Option<f64>,
    omega: Option<f64>,
    g: Option<f64>,
    gamma: Option<f64>,
    kappa: Option<f64>,
}

impl PointArgs {
    fn resolve(&self) -> Result<ModelParams, Error> {
        let file: PointFile = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => PointFile::default(),
        };
        ModelParams::new(
            self.n_spins.or(file.n_spins).unwrap_or(1),
            self.omega0.or(file.omega0).unwrap_or(1.0),
            self.omega.or(file.omega).unwrap_or(1.0),
            self.g.or(file.g).unwrap_or(0.0),
            self.gamma.or(file.gamma).unwrap_or(0.0),
            self.kappa.or(file.kappa).unwrap_or(0.0),
        )
    }
}

fn parse_nmax_list(text: &str) -> Result<Vec<usize>, Error> {
    let cutoffs: Result<Vec<usize>, _> =
        text.split(',').map(|s| s.trim().parse::<usize>()).collect();
    cutoffs.map_err(|e| Error::Config(format!("--nmax: {e}")))
}

#[derive(Subcommand)]
enum Command {
    /// Numeric steady state of the cumulant equations, with the closed-form
    /// solution set for comparison (JSON).
    Steady {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Cumulant trajectory from the ground state (CSV).
    Evolve {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 100.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Stepper name (dp54, rk4).
        #[arg(long, default_value = "dp54")]
        stepper: String,
    },
    /// Master-equation run. One cutoff: snapshot CSV (plus optional Fock
    /// file). Several cutoffs: breakdown report (JSON).
    Master {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 100.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Fock cutoffs, comma separated.
        #[arg(long, default_value = "30")]
        nmax: String,
        /// Optional per-snapshot Fock distribution CSV (single-cutoff runs).
        #[arg(long)]
        fock: Option<PathBuf>,
    },
    /// Phase-diagram sweep from a JSON config (CSV plus manifest).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Override the config's Fock cutoffs, comma separated.
        #[arg(long)]
        nmax: Option<String>,
    },
    /// Dressed detuning, breakdown resonance, and effective heating rate
    /// (JSON).
    Spectral {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trapped-ion laser settings ↔ model parameters (JSON in, JSON out).
    Ionmap {
        /// JSON file: either laser settings (forward map) or
        /// `{"model": …, "lamb_dicke": …}` (reverse map).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IonmapConfig {
    // Forward map inputs.
    delta_r: Option<f64>,
    delta_b: Option<f64>,
    rabi_r: Option<f64>,
    rabi_b: Option<f64>,
    lamb_dicke: Option<f64>,
    n_spins: Option<usize>,
    convention: Option<FrequencyConvention>,
    n_max: Option<usize>,
    // Reverse map inputs.
    model: Option<ModelParams>,
}

#[derive(Debug, Serialize)]
struct IonmapReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lasers: Option<LaserSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lamb_dicke_warning: Option<String>,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization: {e}")))?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Command::Steady { point, out, tol: _ } => {
            let p = point.resolve()?;
            let guess = initial_moments(&p, InitialState::Ground)?;
            let numeric = steady_state_numeric(&p, &guess)?;
            let closed_form = steady_state_closed_form(&p).ok();
            #[derive(Serialize)]
            struct SteadyReport {
                params: ModelParams,
                critical_coupling_spt: f64,
                breakdown_coupling: f64,
                numeric: MomentVector,
                #[serde(skip_serializing_if = "Option::is_none")]
                closed_form: Option<Vec<dicke::cumulant::ClosedFormSolution>>,
            }
            emit_json(
                out.as_deref(),
                &SteadyReport {
                    params: p,
                    critical_coupling_spt: p.critical_coupling_spt(),
                    breakdown_coupling: p.breakdown_coupling(),
                    numeric,
                    closed_form,
                },
            )
        }
        Command::Evolve { point, out, t_final, tol, stepper } => {
            let p = point.resolve()?;
            let m0 = initial_moments(&p, InitialState::Ground)?;
            let traj = evolve_moments_with(&m0, &p, t_final, tol, stepper_by_name(&stepper)?)?;
            let mut buf = Vec::new();
            output::write_moment_trajectory(&mut buf, &traj)?;
            emit(out.as_deref(), &buf)
        }
        Command::Master { point, out, t_final, tol, nmax, fock } => {
            let p = point.resolve()?;
            let cutoffs = parse_nmax_list(&nmax)?;
            match cutoffs.as_slice() {
                [] => Err(Error::Config("--nmax list is empty".into())),
                [n_max] => {
                    let rho0 = DensityState::ground(p.n_spins, *n_max)?;
                    let traj = evolve_density(&rho0, &p, t_final, tol)?;
                    let mut buf = Vec::new();
                    output::write_snapshots(&mut buf, &traj.times, &traj.observables)?;
                    emit(out.as_deref(), &buf)?;
                    if let Some(path) = fock {
                        let mut buf = Vec::new();
                        output::write_fock_distributions(
                            &mut buf,
                            &traj.times,
                            &traj.observables,
                        )?;
                        fs::write(path, buf)?;
                    }
                    Ok(())
                }
                _ => {
                    let report = detect_breakdown(&p, &cutoffs, t_final, tol)?;
                    emit_json(out.as_deref(), &report)
                }
            }
        }
        Command::Sweep { config, out, workers, t_final, tol, nmax } => {
            let text = fs::read_to_string(&config)?;
            let mut cfg = SweepConfig::from_json(&text)?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(t) = t_final {
                cfg.t_final = t;
            }
            if let Some(t) = tol {
                cfg.tol = t;
            }
            if let Some(list) = nmax {
                cfg.cutoffs = parse_nmax_list(&list)?;
            }
            cfg.validate()?;
            run_sweep_to_path(&cfg, &out)?;
            Ok(())
        }
        Command::Spectral { point, out } => {
            let p = point.resolve()?;
            emit_json(out.as_deref(), &spectral_report(&p)?)
        }
        Command::Ionmap { config, out } => {
            let text = fs::read_to_string(&config)?;
            let cfg: IonmapConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let report = match (&cfg.model, cfg.delta_r) {
                (Some(model), _) => {
                    let eta = cfg.lamb_dicke.ok_or_else(|| {
                        Error::Config("reverse map needs lamb_dicke".into())
                    })?;
                    let lasers = model_to_lasers(model, eta)?;
                    IonmapReport {
                        model: None,
                        lasers: Some(lasers),
                        lamb_dicke_warning: cfg
                            .n_max
                            .and_then(|n| lamb_dicke_warning(&lasers, n)),
                    }
                }
                (None, Some(_)) => {
                    let missing = |k: &str| Error::Config(format!("ionmap config needs {k}"));
                    let lasers = LaserSettings {
                        delta_r: cfg.delta_r.ok_or_else(|| missing("delta_r"))?,
                        delta_b: cfg.delta_b.ok_or_else(|| missing("delta_b"))?,
                        rabi_r: cfg.rabi_r.ok_or_else(|| missing("rabi_r"))?,
                        rabi_b: cfg.rabi_b.ok_or_else(|| missing("rabi_b"))?,
                        lamb_dicke: cfg.lamb_dicke.ok_or_else(|| missing("lamb_dicke"))?,
                    };
                    let model = lasers_to_model(
                        &lasers,
                        cfg.n_spins.unwrap_or(1),
                        cfg.convention.unwrap_or_default(),
                    )?;
                    IonmapReport {
                        model: Some(model),
                        lasers: None,
                        lamb_dicke_warning: cfg
                            .n_max
                            .and_then(|n| lamb_dicke_warning(&lasers, n)),
                    }
                }
                (None, None) => {
                    return Err(Error::Config(
                        "ionmap config needs laser settings or a model block".into(),
                    ))
                }
            };
            emit_json(out.as_deref(), &report)
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParams(_) | Error::Unsupported(_) | Error::Io(_) => 1,
        Error::StepSizeUnderflow { .. }
        | Error::NoRoot(_)
        | Error::TraceDrift { .. }
        | Error::Numerical(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
