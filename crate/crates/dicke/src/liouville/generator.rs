//! Matrix-free Lindblad generator on the permutation-symmetric state.
//!
//! `Lρ = −i[Ĥ, ρ] + γ Σ_i D[σ̂₋ⁱ]ρ + κ D[â]ρ` with
//! `Ĥ = (ω₀/2)Σσ̂_z + ω â†â + g Σ(â†+â)σ̂_x`. The Hamiltonian and the `â`
//! channel act block diagonally in `j`; the local decay splits into an
//! analytic anticommutator (`Σ σ̂₊ⁱσ̂₋ⁱ = N/2 + Ĵ_z`) and the cached
//! sandwich transfer between blocks.

use std::sync::Arc;

use num_complex::Complex64;

use crate::{Error, ModelParams, Result};

use super::basis::{build_dicke_basis, DickeBasis};
use super::coupling::{transfer_table, TransferTable};
use super::state::DensityState;

pub struct SymmetricGenerator {
    pub params: ModelParams,
    pub basis: DickeBasis,
    pub n_max: usize,
    table: Arc<TransferTable>,
    sqrt_n: Vec<f64>,
}

/// Builds the generator for `p` at Fock cutoff `n_max`.
pub fn build_generator(p: &ModelParams, n_max: usize) -> Result<SymmetricGenerator> {
    p.validate()?;
    if n_max < 1 {
        return Err(Error::InvalidParams("n_max < 1".into()));
    }
    let basis = build_dicke_basis(p.n_spins)?;
    let table = transfer_table(&basis)?;
    let sqrt_n = (0..=n_max + 1).map(|i| (i as f64).sqrt()).collect();
    Ok(SymmetricGenerator { params: *p, basis, n_max, table, sqrt_n })
}

impl SymmetricGenerator {
    pub fn state_len(&self) -> usize {
        let f = self.n_max + 1;
        self.basis.element_count() * f * f
    }

    pub fn matches(&self, rho: &DensityState) -> bool {
        rho.basis == self.basis && rho.n_max == self.n_max
    }

    /// Writes `Lρ` into `out`; both slices hold [`Self::state_len`] coefficients.
    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(rho.len(), self.state_len());
        assert_eq!(out.len(), self.state_len());
        let f = self.n_max + 1;
        let ff = f * f;
        let ModelParams { omega0: w0, omega: w, g, gamma, kappa, .. } = self.params;
        let nf = self.params.n_spins as f64;
        let sq = &self.sqrt_n;

        for (bi, blk) in self.basis.blocks.iter().enumerate() {
            let dim = blk.dim;
            let tj = blk.two_j as f64;
            let base = self.basis.element_offset(bi) * ff;
            let jp = |s: usize| (((dim - 1 - s) * (s + 1)) as f64).sqrt();
            let jm = |s: usize| ((s * (dim - s)) as f64).sqrt();
            for s in 0..dim {
                let ms = s as f64 - 0.5 * tj;
                for sp in 0..dim {
                    let msp = sp as f64 - 0.5 * tj;
                    // Decay anticommutator plus κ number damping are real;
                    // the coherent detuning is imaginary.
                    let anti = -0.5 * gamma * (nf + ms + msp);
                    let spin_det = -(w0 * (ms - msp));
                    let e0 = base + (s * dim + sp) * ff;
                    let e_su = base + ((s + 1).min(dim - 1) * dim + sp) * ff;
                    let e_sd = base + (s.saturating_sub(1) * dim + sp) * ff;
                    let e_pu = base + (s * dim + (sp + 1).min(dim - 1)) * ff;
                    let e_pd = base + (s * dim + sp.saturating_sub(1)) * ff;
                    let g_su = Complex64::new(0.0, -g * jp(s));
                    let g_sd = Complex64::new(0.0, -g * jm(s));
                    let g_pu = Complex64::new(0.0, g * jp(sp));
                    let g_pd = Complex64::new(0.0, g * jm(sp));
                    for n in 0..f {
                        let row = e0 + n * f;
                        for np in 0..f {
                            let idx = row + np;
                            let diag = Complex64::new(
                                anti - 0.5 * kappa * (n + np) as f64,
                                spin_det - w * (n as f64 - np as f64),
                            );
                            let mut acc = rho[idx] * diag;
                            if kappa != 0.0 && n + 1 < f && np + 1 < f {
                                acc += kappa
                                    * sq[n + 1]
                                    * sq[np + 1]
                                    * rho[e0 + (n + 1) * f + np + 1];
                            }
                            if s + 1 < dim {
                                let mut t = Complex64::new(0.0, 0.0);
                                if n + 1 < f {
                                    t += sq[n + 1] * rho[e_su + (n + 1) * f + np];
                                }
                                if n >= 1 {
                                    t += sq[n] * rho[e_su + (n - 1) * f + np];
                                }
                                acc += g_su * t;
                            }
                            if s >= 1 {
                                let mut t = Complex64::new(0.0, 0.0);
                                if n + 1 < f {
                                    t += sq[n + 1] * rho[e_sd + (n + 1) * f + np];
                                }
                                if n >= 1 {
                                    t += sq[n] * rho[e_sd + (n - 1) * f + np];
                                }
                                acc += g_sd * t;
                            }
                            if sp + 1 < dim {
                                let mut t = Complex64::new(0.0, 0.0);
                                if np + 1 < f {
                                    t += sq[np + 1] * rho[e_pu + n * f + np + 1];
                                }
                                if np >= 1 {
                                    t += sq[np] * rho[e_pu + n * f + np - 1];
                                }
                                acc += g_pu * t;
                            }
                            if sp >= 1 {
                                let mut t = Complex64::new(0.0, 0.0);
                                if np + 1 < f {
                                    t += sq[np + 1] * rho[e_pd + n * f + np + 1];
                                }
                                if np >= 1 {
                                    t += sq[np] * rho[e_pd + n * f + np - 1];
                                }
                                acc += g_pd * t;
                            }
                            out[idx] = acc;
                        }
                    }
                }
            }
        }

        if gamma != 0.0 {
            for e in &self.table.entries {
                let src = e.src * ff;
                let dst = e.dst * ff;
                let c = gamma * e.coeff;
                for k in 0..ff {
                    out[dst + k] += c * rho[src + k];
                }
            }
        }
    }

    /// `Lρ` as a new [`DensityState`] (test and inspection convenience).
    pub fn apply_state(&self, rho: &DensityState) -> DensityState {
        assert!(self.matches(rho));
        let mut out = rho.clone();
        self.apply(&rho.data, &mut out.data);
        out
    }
}
