//! Phase-diagram sweeps: a grid of parameter points, evaluated by one or
//! both phase strategies, with deterministic CSV output.

use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::method::{method_by_name, Diagnostics, Phase, PhaseThresholds, PointRequest};
use crate::output::{fmt15, SCHEMA_LINE};
use crate::{Error, ModelParams, Result};

/// Grid specification: either a scaled `(√N·g, N)` product grid on top of
/// shared base frequencies, or explicit parameter points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Scaled { sqrt_n_g: Vec<f64>, n_spins: Vec<usize> },
    Explicit { points: Vec<ModelParams> },
}

/// Base frequencies applied to every scaled grid point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BaseParams {
    pub omega0: f64,
    pub omega: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl Default for BaseParams {
    fn default() -> Self {
        BaseParams { omega0: 1.0, omega: 1.0, gamma: 0.1, kappa: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Cumulant,
    Master,
    Both,
}

impl MethodChoice {
    fn method_names(self) -> &'static [&'static str] {
        match self {
            MethodChoice::Cumulant => &["cumulant"],
            MethodChoice::Master => &["master"],
            MethodChoice::Both => &["cumulant", "master"],
        }
    }
}

fn default_workers() -> usize {
    1
}

fn default_cutoffs() -> Vec<usize> {
    vec![30, 60]
}

/// One sweep run, loadable from a JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub base: BaseParams,
    pub method: MethodChoice,
    /// Fock cutoffs for the master strategy.
    #[serde(default = "default_cutoffs")]
    pub cutoffs: Vec<usize>,
    pub t_final: f64,
    pub tol: f64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub thresholds: PhaseThresholds,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("sweep config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolve_points()?.is_empty() {
            return Err(Error::Config("empty sweep grid".into()));
        }
        if matches!(self.method, MethodChoice::Master | MethodChoice::Both) {
            if self.cutoffs.len() < 2 || !self.cutoffs.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Config(
                    "master method needs at least two strictly increasing cutoffs".into(),
                ));
            }
        }
        if !(self.t_final > 0.0) {
            return Err(Error::Config("t_final must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if self.workers < 1 {
            return Err(Error::Config("workers must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Grid points in deterministic order: scaled grids iterate `n_spins`
    /// outermost, `sqrt_n_g` innermost.
    pub fn resolve_points(&self) -> Result<Vec<ModelParams>> {
        match &self.grid {
            GridSpec::Scaled { sqrt_n_g, n_spins } => {
                let mut out = Vec::with_capacity(sqrt_n_g.len() * n_spins.len());
                for &n in n_spins {
                    for &v in sqrt_n_g {
                        if v < 0.0 {
                            return Err(Error::Config(format!("negative √N g value {v}")));
                        }
                        let b = self.base;
                        out.push(ModelParams::new(
                            n,
                            b.omega0,
                            b.omega,
                            v / (n as f64).sqrt(),
                            b.gamma,
                            b.kappa,
                        )?);
                    }
                }
                Ok(out)
            }
            GridSpec::Explicit { points } => {
                for p in points {
                    p.validate()?;
                }
                Ok(points.clone())
            }
        }
    }
}

/// One evaluated (point, method) pair. Failures are recorded, not fatal.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub index: usize,
    pub method: &'static str,
    pub params: ModelParams,
    pub phase: Option<Phase>,
    pub sz: Option<f64>,
    pub n_over_n: Option<f64>,
    pub diagnostics: Option<Diagnostics>,
    pub error: Option<String>,
}

/// Evaluates every grid point with the selected strategies. Tasks fan out
/// over `workers` threads; records are returned in grid order regardless of
/// scheduling, so the serialized output is byte-identical for any worker
/// count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let points = cfg.resolve_points()?;
    let mut tasks = Vec::new();
    for p in &points {
        for &name in cfg.method.method_names() {
            tasks.push((*p, name));
        }
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<SweepRecord>>> = Mutex::new(vec![None; tasks.len()]);
    let workers = cfg.workers.min(tasks.len()).max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let (params, name) = tasks[i];
                let record = evaluate_task(i, &params, name, cfg);
                slots.lock().expect("sweep result lock").as_mut_slice()[i] = Some(record);
            });
        }
    });

    let records = slots
        .into_inner()
        .expect("sweep result lock")
        .into_iter()
        .map(|r| r.expect("every task produces a record"))
        .collect();
    Ok(records)
}

fn evaluate_task(
    index: usize,
    params: &ModelParams,
    method_name: &'static str,
    cfg: &SweepConfig,
) -> SweepRecord {
    let req = PointRequest {
        params: *params,
        t_final: cfg.t_final,
        tol: cfg.tol,
        cutoffs: cfg.cutoffs.clone(),
        thresholds: cfg.thresholds,
    };
    let outcome = method_by_name(method_name).and_then(|m| m.evaluate(&req));
    match outcome {
        Ok(out) => SweepRecord {
            index,
            method: method_name,
            params: *params,
            phase: Some(out.phase),
            sz: Some(out.sz),
            n_over_n: Some(out.n_over_n),
            diagnostics: Some(out.diagnostics),
            error: None,
        },
        Err(e) => SweepRecord {
            index,
            method: method_name,
            params: *params,
            phase: None,
            sz: None,
            n_over_n: None,
            diagnostics: None,
            error: Some(e.to_string()),
        },
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt15).unwrap_or_default()
}

/// Sweep CSV: `# schema=1` then one row per record in grid order.
pub fn write_sweep_csv<W: Write>(w: &mut W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(
        w,
        "index,method,n_spins,omega0,omega,g,gamma,kappa,sqrt_n_g,phase,sz,n_over_N,error"
    )?;
    for r in records {
        let p = r.params;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},\"{}\"",
            r.index,
            r.method,
            p.n_spins,
            fmt15(p.omega0),
            fmt15(p.omega),
            fmt15(p.g),
            fmt15(p.gamma),
            fmt15(p.kappa),
            fmt15(p.renormalized_coupling()),
            r.phase.map(|ph| ph.to_string()).unwrap_or_default(),
            opt(r.sz),
            opt(r.n_over_n),
            r.error.as_deref().unwrap_or("").replace('"', "'"),
        )?;
    }
    Ok(())
}

/// Runs the sweep and writes the CSV plus a manifest copy of the resolved
/// config (`<out>.manifest.json`) beside it.
pub fn run_sweep_to_path(cfg: &SweepConfig, out: &Path) -> Result<Vec<SweepRecord>> {
    let records = run_sweep(cfg)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &records)?;
    std::fs::write(out, &buf)?;
    let manifest = serde_json::to_string_pretty(cfg)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    let mut manifest_path = out.as_os_str().to_owned();
    manifest_path.push(".manifest.json");
    std::fs::write(std::path::PathBuf::from(manifest_path), manifest)?;
    Ok(records)
}
