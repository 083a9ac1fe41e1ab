//! Physical parameter set and closed-form critical couplings.
//!
//! Units: `omega0` sets the energy scale (ħ = 1), so all frequencies and rates
//! are expressed in units of `omega0` by default. Inputs with `omega0 != 1`
//! are accepted; everything downstream is unit-consistent either way.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The six physical parameters of the open Dicke model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of spins `N`.
    pub n_spins: usize,
    /// Spin splitting `ω₀` (> 0).
    pub omega0: f64,
    /// Oscillator frequency `ω` (> 0).
    pub omega: f64,
    /// Spin-oscillator coupling `g` (≥ 0).
    pub g: f64,
    /// Spontaneous-emission rate `γ` (≥ 0), acting locally on every spin.
    pub gamma: f64,
    /// Oscillator decay (cooling) rate `κ` (≥ 0).
    pub kappa: f64,
}

/// Frequencies derived from the bare parameters that show up in the
/// steady-state formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedFrequencies {
    /// `ω₀,γ = (ω₀² + (γ/2)²)/ω₀`, the decay-shifted spin frequency.
    pub omega0_gamma: f64,
    /// Imaginary part of `ω̃₀ = ω₀ − iγ/2`, i.e. `−γ/2`.
    pub omega0_tilde_im: f64,
}

impl ModelParams {
    pub fn new(
        n_spins: usize,
        omega0: f64,
        omega: f64,
        g: f64,
        gamma: f64,
        kappa: f64,
    ) -> Result<Self> {
        let p = Self { n_spins, omega0, omega, g, gamma, kappa };
        p.validate()?;
        Ok(p)
    }

    /// Resonant model (`ω = ω₀ = 1`) with coupling `g` and decay `γ`.
    pub fn resonant(n_spins: usize, g: f64, gamma: f64) -> Result<Self> {
        Self::new(n_spins, 1.0, 1.0, g, gamma, 0.0)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        self.kappa = kappa;
        self.validate()?;
        Ok(self)
    }

    pub fn with_coupling(mut self, g: f64) -> Result<Self> {
        self.g = g;
        self.validate()?;
        Ok(self)
    }

    /// Checks every invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 1 {
            return Err(Error::InvalidParams("n_spins < 1".into()));
        }
        for (name, v) in [("omega0", self.omega0), ("omega", self.omega)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} ≤ 0")));
            }
        }
        for (name, v) in [("g", self.g), ("gamma", self.gamma), ("kappa", self.kappa)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} < 0")));
            }
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedFrequencies {
        let half_gamma = 0.5 * self.gamma;
        DerivedFrequencies {
            omega0_gamma: (self.omega0 * self.omega0 + half_gamma * half_gamma) / self.omega0,
            omega0_tilde_im: -half_gamma,
        }
    }

    /// Critical coupling of the superradiant phase transition,
    /// `g_c = sqrt(ω ω₀,γ / (4N))`.
    pub fn critical_coupling_spt(&self) -> f64 {
        (self.omega * self.derived().omega0_gamma / (4.0 * self.n_spins as f64)).sqrt()
    }

    /// Critical coupling of the blockade breakdown, `g_b = sqrt(ω ω₀ / N)`.
    ///
    /// For `N = 1` this coincides with the pole of the single-particle
    /// steady-state oscillator population, `g_{b,1} = sqrt(ω ω₀)`.
    pub fn breakdown_coupling(&self) -> f64 {
        (self.omega * self.omega0 / self.n_spins as f64).sqrt()
    }

    /// `√N g`, the coupling axis on which finite-size phase boundaries
    /// collapse.
    pub fn renormalized_coupling(&self) -> f64 {
        (self.n_spins as f64).sqrt() * self.g
    }
}
