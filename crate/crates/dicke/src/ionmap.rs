//! Trapped-ion implementation layer: bichromatic sideband settings ↔ model
//! parameters, repumper-induced effective decay, and the blue-sideband
//! phonon-readout signal.
//!
//! All laser quantities are angular frequencies in the same unit system as
//! [`ModelParams`]; no 2π bookkeeping is performed.

use serde::{Deserialize, Serialize};

use crate::{Error, ModelParams, Result};

/// Bichromatic sideband drive settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserSettings {
    /// Red-sideband detuning `δ_r`.
    pub delta_r: f64,
    /// Blue-sideband detuning `δ_b`.
    pub delta_b: f64,
    /// Red-sideband Rabi frequency `Ω_r` (≥ 0).
    pub rabi_r: f64,
    /// Blue-sideband Rabi frequency `Ω_b` (≥ 0).
    pub rabi_b: f64,
    /// Lamb-Dicke parameter `η` (> 0, `≪ 1` advisory).
    pub lamb_dicke: f64,
}

/// Optical-pumping settings producing the effective spin decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepumperSettings {
    /// Repumper Rabi frequency `Ω_rep` (≥ 0).
    pub rabi_rep: f64,
    /// Decay rate `Γ₀` of the auxiliary level into the spin ground state.
    pub gamma_e_to_0: f64,
    /// Total decay rate `Γ_e` of the auxiliary level (> 0).
    pub gamma_e_total: f64,
}

/// Which published (δ_r, δ_b) ↔ (ω₀, ω) identification to use.
///
/// The displayed effective Hamiltonian and the surrounding prose disagree by
/// a factor of two and a sign; the displayed equation is the only variant
/// consistent with the model Hamiltonian and is the default. The prose
/// mapping ships behind this flag for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyConvention {
    /// `ω₀ = (δ_r + δ_b)/2`, `ω = (δ_b − δ_r)/2` (from the displayed
    /// effective Hamiltonian).
    #[default]
    Displayed,
    /// `ω₀ = (δ_b + δ_r)/4`, `ω = (δ_r − δ_b)/2` (from the prose).
    Prose,
}

impl LaserSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.lamb_dicke > 0.0) {
            return Err(Error::InvalidParams("lamb_dicke ≤ 0".into()));
        }
        if self.rabi_r < 0.0 || self.rabi_b < 0.0 {
            return Err(Error::InvalidParams("sideband Rabi frequency < 0".into()));
        }
        Ok(())
    }
}

impl RepumperSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_e_total > 0.0) {
            return Err(Error::InvalidParams("gamma_e_total ≤ 0".into()));
        }
        if self.rabi_rep < 0.0 || self.gamma_e_to_0 < 0.0 {
            return Err(Error::InvalidParams("negative repumper rate".into()));
        }
        if self.gamma_e_to_0 > self.gamma_e_total {
            return Err(Error::InvalidParams("gamma_e_to_0 > gamma_e_total".into()));
        }
        Ok(())
    }

    /// True when the adiabatic-elimination validity window `Γ₀² ≫ Ω_rep²`
    /// (here: `Γ₀² ≥ 100 Ω_rep²`) is *not* met.
    pub fn elimination_marginal(&self) -> bool {
        self.gamma_e_to_0 * self.gamma_e_to_0 < 100.0 * self.rabi_rep * self.rabi_rep
    }
}

/// Maps balanced bichromatic sideband settings to model parameters
/// (`γ` and `κ` are left zero; they come from the repumper and the cooling
/// channel respectively).
pub fn lasers_to_model(
    ls: &LaserSettings,
    n_spins: usize,
    convention: FrequencyConvention,
) -> Result<ModelParams> {
    ls.validate()?;
    let scale = ls.rabi_r.abs().max(ls.rabi_b.abs()).max(1.0);
    if (ls.rabi_r - ls.rabi_b).abs() > 1e-9 * scale {
        return Err(Error::InvalidParams(
            "rabi_r ≠ rabi_b: unbalanced sidebands do not realize the model coupling".into(),
        ));
    }
    let (omega0, omega) = match convention {
        FrequencyConvention::Displayed => {
            ((ls.delta_r + ls.delta_b) / 2.0, (ls.delta_b - ls.delta_r) / 2.0)
        }
        FrequencyConvention::Prose => {
            ((ls.delta_b + ls.delta_r) / 4.0, (ls.delta_r - ls.delta_b) / 2.0)
        }
    };
    if !(omega0 > 0.0) || !(omega > 0.0) {
        return Err(Error::InvalidParams(format!(
            "derived frequencies not positive (omega0 = {omega0}, omega = {omega})"
        )));
    }
    ModelParams::new(n_spins, omega0, omega, ls.lamb_dicke * ls.rabi_r, 0.0, 0.0)
}

/// Exact right-inverse of [`lasers_to_model`] under the displayed-equation
/// convention: `δ_r = ω₀ − ω`, `δ_b = ω₀ + ω`, `Ω = g/η`.
pub fn model_to_lasers(p: &ModelParams, lamb_dicke: f64) -> Result<LaserSettings> {
    p.validate()?;
    if !(lamb_dicke > 0.0) {
        return Err(Error::InvalidParams("lamb_dicke ≤ 0".into()));
    }
    let rabi = p.g / lamb_dicke;
    Ok(LaserSettings {
        delta_r: p.omega0 - p.omega,
        delta_b: p.omega0 + p.omega,
        rabi_r: rabi,
        rabi_b: rabi,
        lamb_dicke,
    })
}

/// Advisory check of the Lamb-Dicke expansion: warns once `ηΩ√(n_max+1)`
/// stops being small against the sideband Rabi scale.
pub fn lamb_dicke_warning(ls: &LaserSettings, n_max: usize) -> Option<String> {
    let expansion = ls.lamb_dicke * ((n_max + 1) as f64).sqrt();
    (expansion > 0.3).then(|| {
        format!(
            "η√(n_max+1) = {expansion:.3} approaches the Lamb-Dicke validity limit"
        )
    })
}

/// Effective spin decay from repumper optical pumping,
/// `Γ_{0,eff} = Γ₀ Ω_rep² / Γ_e²`.
pub fn repumper_effective_gamma(rs: &RepumperSettings) -> Result<f64> {
    rs.validate()?;
    Ok(rs.gamma_e_to_0 * rs.rabi_rep * rs.rabi_rep / (rs.gamma_e_total * rs.gamma_e_total))
}

/// Blue-sideband flopping signal `P↑(t) = Σ_n p_n sin²(ηΩ√(n+1) t)` mapping
/// a phonon distribution onto the excitation probability trace.
pub fn sideband_flopping_signal(
    fock_dist: &[f64],
    eta_omega: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    if !(eta_omega > 0.0) {
        return Err(Error::InvalidParams("ηΩ_probe ≤ 0".into()));
    }
    if fock_dist.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidParams("negative probability in Fock distribution".into()));
    }
    let total: f64 = fock_dist.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!(
            "Fock distribution sums to {total}, expected 1"
        )));
    }
    Ok(times
        .iter()
        .map(|&t| {
            fock_dist
                .iter()
                .enumerate()
                .map(|(n, &p)| {
                    let phase = eta_omega * ((n + 1) as f64).sqrt() * t;
                    p * phase.sin().powi(2)
                })
                .sum()
        })
        .collect())
}
