//! Phase-evaluation strategies behind a common trait.
//!
//! Each strategy takes one parameter point and returns a phase label plus the
//! steady-state observables that justify it. Strategies are stateless,
//! registered by name, and selected at runtime; the sweep driver treats them
//! uniformly.

use serde::Serialize;

use crate::cumulant::{
    evolve_moments, initial_moments, steady_state_numeric, InitialState,
};
use crate::liouville::{detect_breakdown, BreakdownReport, Classification};
use crate::{Error, ModelParams, Result};

/// Phase label of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Normal,
    Superradiant,
    Breakdown,
    Inconclusive,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Phase::Normal => "normal",
            Phase::Superradiant => "superradiant",
            Phase::Breakdown => "breakdown",
            Phase::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Classification thresholds; configuration keys with these defaults.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct PhaseThresholds {
    /// Superradiance threshold on `⟨n̂⟩/N`.
    pub n_over_n: f64,
    /// Superradiance threshold on `⟨σ̂_z⟩` (must exceed it).
    pub sz: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        PhaseThresholds { n_over_n: 0.01, sz: -0.99 }
    }
}

/// Steady-state observables → phase label. Breakdown and inconclusive
/// outcomes are decided upstream; this splits the steady side.
pub fn classify_phase(sz: f64, n_over_n: f64, thresholds: &PhaseThresholds) -> Phase {
    if n_over_n > thresholds.n_over_n && sz > thresholds.sz {
        Phase::Superradiant
    } else {
        Phase::Normal
    }
}

/// One evaluation request.
#[derive(Debug, Clone)]
pub struct PointRequest {
    pub params: ModelParams,
    pub t_final: f64,
    pub tol: f64,
    /// Fock cutoffs, used by the master-equation strategy.
    pub cutoffs: Vec<usize>,
    pub thresholds: PhaseThresholds,
}

/// Per-method evidence attached to an outcome.
#[derive(Debug, Clone, Serialize)]
pub enum Diagnostics {
    /// Largest residual of the cumulant fixed point.
    CumulantResidual(f64),
    /// The cumulant evolution diverged (no physical fixed point).
    CumulantDiverged,
    Master(BreakdownReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct PointOutcome {
    pub phase: Phase,
    pub sz: f64,
    pub n_over_n: f64,
    pub diagnostics: Diagnostics,
}

/// A phase-evaluation strategy.
pub trait PhaseMethod: Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, req: &PointRequest) -> Result<PointOutcome>;
}

/// Second-order cumulant route: Newton fixed point, with time evolution as
/// the breakdown witness when no physical root exists.
pub struct CumulantMethod;

impl PhaseMethod for CumulantMethod {
    fn name(&self) -> &'static str {
        "cumulant"
    }

    fn evaluate(&self, req: &PointRequest) -> Result<PointOutcome> {
        let p = &req.params;
        let guess = initial_moments(p, InitialState::Ground)?;
        match steady_state_numeric(p, &guess) {
            Ok(m) => {
                let d = crate::cumulant::moment_derivatives(&m, p);
                let residual =
                    d.as_array().iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let n_over_n = m.n / p.n_spins as f64;
                Ok(PointOutcome {
                    phase: classify_phase(m.sz, n_over_n, &req.thresholds),
                    sz: m.sz,
                    n_over_n,
                    diagnostics: Diagnostics::CumulantResidual(residual),
                })
            }
            Err(Error::NoRoot(_)) => {
                let traj = evolve_moments(&guess, p, req.t_final, req.tol)?;
                let (_, m_end) = traj.last();
                let phase = if traj.diverged || traj.breakdown_detected() {
                    Phase::Breakdown
                } else {
                    Phase::Inconclusive
                };
                Ok(PointOutcome {
                    phase,
                    sz: m_end.sz,
                    n_over_n: m_end.n / p.n_spins as f64,
                    diagnostics: Diagnostics::CumulantDiverged,
                })
            }
            Err(e) => Err(e),
        }
    }
}

/// Full master-equation route: Fock-cutoff dependence scan.
pub struct MasterMethod;

impl PhaseMethod for MasterMethod {
    fn name(&self) -> &'static str {
        "master"
    }

    fn evaluate(&self, req: &PointRequest) -> Result<PointOutcome> {
        let p = &req.params;
        if req.cutoffs.len() < 2 {
            return Err(Error::Config(
                "master method needs at least two Fock cutoffs".into(),
            ));
        }
        let report = detect_breakdown(p, &req.cutoffs, req.t_final, req.tol)?;
        let sz = *report.sz_final.last().expect("nonempty report");
        let n_over_n = report.n_final.last().expect("nonempty report") / p.n_spins as f64;
        let phase = match report.classification {
            Classification::Breakdown => Phase::Breakdown,
            Classification::Steady => classify_phase(sz, n_over_n, &req.thresholds),
            Classification::Inconclusive => Phase::Inconclusive,
        };
        Ok(PointOutcome { phase, sz, n_over_n, diagnostics: Diagnostics::Master(report) })
    }
}

const REGISTRY: &[&dyn PhaseMethod] = &[&CumulantMethod, &MasterMethod];

/// Looks up a strategy by its registered name (`"cumulant"`, `"master"`).
pub fn method_by_name(name: &str) -> Result<&'static dyn PhaseMethod> {
    REGISTRY
        .iter()
        .copied()
        .find(|m| m.name() == name)
        .ok_or_else(|| Error::Config(format!("unknown method '{name}'")))
}

pub fn method_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|m| m.name()).collect()
}
