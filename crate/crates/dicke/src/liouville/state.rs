//! Permutation-symmetric density state and its observables.

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

use super::basis::{build_dicke_basis, DickeBasis};

/// Density matrix on the symmetric spin sector ⊗ truncated Fock space.
///
/// Layout: blocks in basis order; within a block the complex coefficient of
/// `(s, s′, n, n′)` sits at `((s·dim + s′)·(n_max+1) + n)·(n_max+1) + n′`
/// relative to the block, with `s = m + j`. Each `(j, m, m′)` element owns a
/// contiguous Fock chunk, which is what the decay transfer acts on.
#[derive(Debug, Clone)]
pub struct DensityState {
    pub basis: DickeBasis,
    pub n_max: usize,
    pub time: f64,
    pub data: Vec<Complex64>,
}

impl DensityState {
    pub fn zero(n_spins: usize, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParams("n_max < 1".into()));
        }
        let basis = build_dicke_basis(n_spins)?;
        let f = n_max + 1;
        let data = vec![Complex64::new(0.0, 0.0); basis.element_count() * f * f];
        Ok(DensityState { basis, n_max, time: 0.0, data })
    }

    /// Ground product state `|↓…↓⟩⟨↓…↓| ⊗ |0⟩⟨0|`: lowest projection of the
    /// maximal-spin block, oscillator vacuum.
    pub fn ground(n_spins: usize, n_max: usize) -> Result<Self> {
        let mut st = Self::zero(n_spins, n_max)?;
        let idx = st.chunk_offset(0, 0, 0);
        st.data[idx] = Complex64::new(1.0, 0.0);
        Ok(st)
    }

    /// Fully inverted product state `|↑…↑⟩⟨↑…↑| ⊗ |0⟩⟨0|`.
    pub fn all_up(n_spins: usize, n_max: usize) -> Result<Self> {
        let mut st = Self::zero(n_spins, n_max)?;
        let top = st.basis.blocks[0].dim - 1;
        let idx = st.chunk_offset(0, top, top);
        st.data[idx] = Complex64::new(1.0, 0.0);
        Ok(st)
    }

    fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Offset of the `(n, n′) = (0, 0)` coefficient of element `(block, s, s′)`.
    pub fn chunk_offset(&self, block: usize, s: usize, sp: usize) -> usize {
        let f = self.fock_dim();
        self.basis.element_index(block, s, sp) * f * f
    }

    pub fn coeff(&self, block: usize, s: usize, sp: usize, n: usize, np: usize) -> Complex64 {
        let f = self.fock_dim();
        self.data[self.chunk_offset(block, s, sp) + n * f + np]
    }

    pub fn coeff_mut(
        &mut self,
        block: usize,
        s: usize,
        sp: usize,
        n: usize,
        np: usize,
    ) -> &mut Complex64 {
        let f = self.fock_dim();
        let idx = self.chunk_offset(block, s, sp) + n * f + np;
        &mut self.data[idx]
    }

    /// Degeneracy-weighted trace `Σ_j d_j Σ_{m,n} ρ_j[m,m,n,n]`.
    pub fn trace(&self) -> f64 {
        let f = self.fock_dim();
        let mut tr = 0.0;
        for (bi, blk) in self.basis.blocks.iter().enumerate() {
            let d = blk.degeneracy as f64;
            for s in 0..blk.dim {
                let base = self.chunk_offset(bi, s, s);
                for n in 0..f {
                    tr += d * self.data[base + n * f + n].re;
                }
            }
        }
        tr
    }

    /// Largest violation of `ρ[s,s′,n,n′] = conj(ρ[s′,s,n′,n])`.
    pub fn hermiticity_error(&self) -> f64 {
        let f = self.fock_dim();
        let mut worst: f64 = 0.0;
        for (bi, blk) in self.basis.blocks.iter().enumerate() {
            for s in 0..blk.dim {
                for sp in 0..blk.dim {
                    let a = self.chunk_offset(bi, s, sp);
                    let b = self.chunk_offset(bi, sp, s);
                    for n in 0..f {
                        for np in 0..f {
                            let diff = self.data[a + n * f + np] - self.data[b + np * f + n].conj();
                            worst = worst.max(diff.norm());
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Expectation values of one snapshot.
#[derive(Debug, Clone, Serialize)]
pub struct Observables {
    /// Mean inversion `⟨σ̂_z⟩ = (2/N)⟨Ĵ_z⟩`.
    pub sz: f64,
    /// Mean phonon number `⟨n̂⟩`.
    pub n: f64,
    /// Pair correlator `⟨σ̂_zⁱσ̂_zᵏ⟩_{i≠k} = (4⟨Ĵ_z²⟩ − N)/(N(N−1))`; 0 for N = 1.
    pub szsz: f64,
    /// Pair correlator `⟨σ̂_xⁱσ̂_xᵏ⟩_{i≠k} = (4⟨Ĵ_x²⟩ − N)/(N(N−1))`; 0 for N = 1.
    pub sxsx: f64,
    /// Diagonal Fock weights; sums to the trace.
    pub fock_distribution: Vec<f64>,
}

/// Degeneracy-weighted expectation values in the Dicke basis.
pub fn observables(rho: &DensityState) -> Observables {
    let f = rho.n_max + 1;
    let nf = rho.basis.n_spins as f64;
    let mut jz = 0.0;
    let mut jz2 = 0.0;
    let mut jx2 = 0.0;
    let mut phonons = 0.0;
    let mut fock = vec![0.0; f];
    for (bi, blk) in rho.basis.blocks.iter().enumerate() {
        let d = blk.degeneracy as f64;
        let tj = blk.two_j as f64;
        let dim = blk.dim;
        let jp = |s: usize| (((dim - 1 - s) * (s + 1)) as f64).sqrt();
        for s in 0..dim {
            let m = s as f64 - 0.5 * tj;
            let base = rho.chunk_offset(bi, s, s);
            let mut pop = 0.0;
            for n in 0..f {
                let p = rho.data[base + n * f + n].re;
                pop += p;
                phonons += d * n as f64 * p;
                fock[n] += d * p;
            }
            jz += d * m * pop;
            jz2 += d * m * m * pop;
            // Jx² = (J₊J₋ + J₋J₊ + J₊² + J₋²)/4; diagonal piece on (s,s):
            let jpjm = if s >= 1 { jp(s - 1) * jp(s - 1) } else { 0.0 };
            let jmjp = if s + 1 < dim { jp(s) * jp(s) } else { 0.0 };
            jx2 += d * 0.25 * (jpjm + jmjp) * pop;
            // Off-diagonal piece pairs (s, s±2); count each pair once via s+2.
            if s + 2 < dim {
                let b2 = rho.chunk_offset(bi, s, s + 2);
                let mut re = 0.0;
                for n in 0..f {
                    re += rho.data[b2 + n * f + n].re;
                }
                // ⟨s|Jx²|s+2⟩ = jp(s) jp(s+1) / 4; Hermitian partner doubles it.
                jx2 += d * 0.5 * jp(s) * jp(s + 1) * re;
            }
        }
    }
    let (szsz, sxsx) = if rho.basis.n_spins >= 2 {
        let denom = nf * (nf - 1.0);
        ((4.0 * jz2 - nf) / denom, (4.0 * jx2 - nf) / denom)
    } else {
        (0.0, 0.0)
    };
    Observables { sz: 2.0 * jz / nf, n: phonons, szsz, sxsx, fock_distribution: fock }
}
