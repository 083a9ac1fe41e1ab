//! Unsymmetrized reference Liouvillian on the full `2^N (n_max+1)` space.
//!
//! Literal tensor-product construction used as the correctness oracle for the
//! symmetric generator. Guarded to N ≤ 4.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, ModelParams, Result};

use super::basis::DickeBasis;
use super::coupling::build_symmetric_vectors;
use super::state::DensityState;

pub struct BruteForceGenerator {
    pub params: ModelParams,
    pub n_max: usize,
    /// Full dimension `2^N (n_max+1)`.
    pub dim: usize,
    h: DMatrix<Complex64>,
    jumps: Vec<DMatrix<Complex64>>,
    /// `−(1/2) Σ L†L`, applied from both sides.
    damping: DMatrix<Complex64>,
}

/// Full-space generator; `N ≤ 4` guard against exponential blowup.
pub fn brute_force_generator(p: &ModelParams, n_max: usize) -> Result<BruteForceGenerator> {
    p.validate()?;
    if p.n_spins > 4 {
        return Err(Error::Unsupported(format!(
            "brute-force oracle limited to N ≤ 4, got {}",
            p.n_spins
        )));
    }
    if n_max < 1 {
        return Err(Error::InvalidParams("n_max < 1".into()));
    }
    let spin_dim = 1usize << p.n_spins;
    let f = n_max + 1;
    let dim = spin_dim * f;
    let idx = |spin: usize, n: usize| spin * f + n;
    let c = |x: f64| Complex64::new(x, 0.0);

    let mut h = DMatrix::zeros(dim, dim);
    for spin in 0..spin_dim {
        let ups = spin.count_ones() as f64;
        let sz_sum = 2.0 * ups - p.n_spins as f64;
        for n in 0..f {
            h[(idx(spin, n), idx(spin, n))] = c(0.5 * p.omega0 * sz_sum + p.omega * n as f64);
            for i in 0..p.n_spins {
                let flipped = spin ^ (1 << i);
                if n + 1 < f {
                    h[(idx(flipped, n + 1), idx(spin, n))] += c(p.g * ((n + 1) as f64).sqrt());
                }
                if n >= 1 {
                    h[(idx(flipped, n - 1), idx(spin, n))] += c(p.g * (n as f64).sqrt());
                }
            }
        }
    }

    let mut jumps = Vec::new();
    if p.gamma > 0.0 {
        for i in 0..p.n_spins {
            let bit = 1usize << i;
            let mut l = DMatrix::zeros(dim, dim);
            for spin in 0..spin_dim {
                if spin & bit != 0 {
                    for n in 0..f {
                        l[(idx(spin ^ bit, n), idx(spin, n))] = c(p.gamma.sqrt());
                    }
                }
            }
            jumps.push(l);
        }
    }
    if p.kappa > 0.0 {
        let mut l = DMatrix::zeros(dim, dim);
        for spin in 0..spin_dim {
            for n in 1..f {
                l[(idx(spin, n - 1), idx(spin, n))] = c(p.kappa.sqrt() * (n as f64).sqrt());
            }
        }
        jumps.push(l);
    }

    let mut damping = DMatrix::zeros(dim, dim);
    for l in &jumps {
        damping -= (l.adjoint() * l) * c(0.5);
    }

    Ok(BruteForceGenerator { params: *p, n_max, dim, h, jumps, damping })
}

impl BruteForceGenerator {
    pub fn hamiltonian(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let mut out = (&self.h * rho - rho * &self.h) * (-i);
        out += &self.damping * rho + rho * &self.damping;
        for l in &self.jumps {
            out += l * rho * l.adjoint();
        }
        out
    }
}

/// Expands a symmetric state to the full product space.
pub fn symmetric_to_full(rho: &DensityState) -> DMatrix<Complex64> {
    let sym = build_symmetric_vectors(&rho.basis);
    let f = rho.n_max + 1;
    let spin_dim = 1usize << rho.basis.n_spins;
    let mut full = DMatrix::zeros(spin_dim * f, spin_dim * f);
    for (bi, blk) in rho.basis.blocks.iter().enumerate() {
        for copy in &sym.vectors[bi] {
            for s in 0..blk.dim {
                for sp in 0..blk.dim {
                    let chunk = rho.chunk_offset(bi, s, sp);
                    for (a, &va) in copy[s].iter().enumerate() {
                        if va == 0.0 {
                            continue;
                        }
                        for (b, &vb) in copy[sp].iter().enumerate() {
                            if vb == 0.0 {
                                continue;
                            }
                            let w = Complex64::new(va * vb, 0.0);
                            for n in 0..f {
                                for np in 0..f {
                                    full[(a * f + n, b * f + np)] +=
                                        w * rho.data[chunk + n * f + np];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    full
}

/// Projects a full-space (permutation-invariant) matrix back onto the
/// symmetric representation, averaging over block copies.
pub fn full_to_symmetric(full: &DMatrix<Complex64>, basis: &DickeBasis, n_max: usize) -> DensityState {
    let sym = build_symmetric_vectors(basis);
    let f = n_max + 1;
    let mut rho = DensityState::zero(basis.n_spins, n_max).expect("valid dims");
    rho.basis = basis.clone();
    for (bi, blk) in basis.blocks.iter().enumerate() {
        let inv_deg = 1.0 / blk.degeneracy as f64;
        for copy in &sym.vectors[bi] {
            for s in 0..blk.dim {
                for sp in 0..blk.dim {
                    let chunk = rho.chunk_offset(bi, s, sp);
                    for n in 0..f {
                        for np in 0..f {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for (a, &va) in copy[s].iter().enumerate() {
                                if va == 0.0 {
                                    continue;
                                }
                                for (b, &vb) in copy[sp].iter().enumerate() {
                                    if vb == 0.0 {
                                        continue;
                                    }
                                    acc += va * vb * full[(a * f + n, b * f + np)];
                                }
                            }
                            rho.data[chunk + n * f + np] += inv_deg * acc;
                        }
                    }
                }
            }
        }
    }
    rho
}
