//! Transfer coefficients of the local spin decay between total-spin blocks.
//!
//! The sandwich part of `Σ_i D[σ̂₋ⁱ]` moves weight between blocks with
//! `Δj ∈ {−1, 0, +1}` while lowering both projections by one. Its
//! coefficients are derived once per `N`: the symmetric basis vectors are
//! built explicitly in the full `2^N` product space by sequentially coupling
//! one spin-1/2 at a time, `σ̂₋ⁱ` is applied numerically, and the result is
//! projected back onto the invariant operator basis
//! `P_{jmm'} = Σ_α |j,m,α⟩⟨j,m',α|` through the trace inner product
//! (`⟨P, P⟩ = d_j`). The anticommutator part is analytic
//! (`Σ_i σ̂₊ⁱσ̂₋ⁱ = N/2 + Ĵ_z`) and lives in the generator, not here.
//!
//! Correctness rests on the brute-force equivalence tests against the
//! unsymmetrized Liouvillian at small `N`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{Error, Result};

use super::basis::DickeBasis;

/// Largest `N` for which the full-space construction is attempted. The
/// product space has `2^N` amplitudes per basis vector, so this bound keeps
/// table construction in milliseconds-to-seconds territory.
pub const MAX_TRANSFER_SPINS: usize = 12;

/// One sandwich term: `dρ[dst] += γ · coeff · ρ[src]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferEntry {
    /// Flat element index of the source `(j, m, m′)` in the basis enumeration.
    pub src: usize,
    /// Flat element index of the target `(j₂, m−1, m′−1)`.
    pub dst: usize,
    pub coeff: f64,
}

/// Cached sandwich coefficients for one particle number.
#[derive(Debug, Clone)]
pub struct TransferTable {
    pub n_spins: usize,
    pub entries: Vec<TransferEntry>,
}

/// Symmetric basis vectors grouped per block: `vectors[block][alpha][s]` is a
/// `2^N` amplitude vector with `s = m + j`. Copies `alpha` enumerate the
/// multiplicity of the block.
pub(crate) struct SymmetricVectors {
    pub(crate) vectors: Vec<Vec<Vec<Vec<f64>>>>,
}

/// One multiplet under construction: all `2j + 1` projection vectors of a
/// single copy, indexed by `s = m + j` in the current `2^k` product space.
struct Multiplet {
    two_j: u32,
    vecs: Vec<Vec<f64>>,
}

/// Couples one further spin-1/2 to `m` (Condon–Shortley phases):
///
/// `|j+1/2, M⟩ =  √((j+M+1/2)/(2j+1)) |j, M−1/2⟩|↑⟩ + √((j−M+1/2)/(2j+1)) |j, M+1/2⟩|↓⟩`
/// `|j−1/2, M⟩ = −√((j−M+1/2)/(2j+1)) |j, M−1/2⟩|↑⟩ + √((j+M+1/2)/(2j+1)) |j, M+1/2⟩|↓⟩`
fn couple_one(m: &Multiplet, spin_index: usize) -> Vec<Multiplet> {
    let tj = m.two_j as i64;
    let old_dim = 1usize << spin_index;
    let up_bit = old_dim;
    let embed = |old: &[f64], up: bool, scale: f64, out: &mut [f64]| {
        let base = if up { up_bit } else { 0 };
        for (i, &a) in old.iter().enumerate() {
            out[base + i] += scale * a;
        }
    };
    let mut result = Vec::new();
    // two_m of the new states runs over −(tj+1) ..= tj+1 in steps of 2.
    for delta in [1i64, -1] {
        let tj_new = tj + delta;
        if tj_new < 0 {
            continue;
        }
        let mut vecs = Vec::with_capacity(tj_new as usize + 1);
        let mut tm = -tj_new;
        while tm <= tj_new {
            let mut v = vec![0.0; old_dim * 2];
            let c_plus = ((tj + tm + 1) as f64 / (2 * (tj + 1)) as f64).sqrt();
            let c_minus = ((tj - tm + 1) as f64 / (2 * (tj + 1)) as f64).sqrt();
            let (c_up, c_down) = if delta == 1 { (c_plus, c_minus) } else { (-c_minus, c_plus) };
            // Component |j, M−1/2⟩|↑⟩: old two_m = tm − 1.
            if (tm - 1).abs() <= tj {
                let s_old = ((tm - 1 + tj) / 2) as usize;
                embed(&m.vecs[s_old], true, c_up, &mut v);
            }
            // Component |j, M+1/2⟩|↓⟩: old two_m = tm + 1.
            if (tm + 1).abs() <= tj {
                let s_old = ((tm + 1 + tj) / 2) as usize;
                embed(&m.vecs[s_old], false, c_down, &mut v);
            }
            vecs.push(v);
            tm += 2;
        }
        result.push(Multiplet { two_j: tj_new as u32, vecs });
    }
    result
}

pub(crate) fn build_symmetric_vectors(basis: &DickeBasis) -> SymmetricVectors {
    let n = basis.n_spins;
    // Spin 0 alone: j = 1/2, index 0 = |↓⟩, index 1 = |↑⟩.
    let mut multiplets = vec![Multiplet { two_j: 1, vecs: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }];
    for spin in 1..n {
        let mut next = Vec::with_capacity(2 * multiplets.len());
        for m in &multiplets {
            next.extend(couple_one(m, spin));
        }
        multiplets = next;
    }
    let mut vectors: Vec<Vec<Vec<Vec<f64>>>> = vec![Vec::new(); basis.blocks.len()];
    for m in multiplets {
        let bi = basis
            .block_of_two_j(m.two_j)
            .expect("coupling produced a total spin outside the basis");
        vectors[bi].push(m.vecs);
    }
    for (bi, blk) in basis.blocks.iter().enumerate() {
        assert_eq!(vectors[bi].len() as u64, blk.degeneracy, "multiplicity mismatch");
    }
    SymmetricVectors { vectors }
}

/// `⟨t| σ̂₋ⁱ |v⟩` in the product space; `σ̂₋ⁱ` clears bit `i`.
fn lowering_overlap(t: &[f64], v: &[f64], bit: usize) -> f64 {
    let mut acc = 0.0;
    for idx in 0..v.len() {
        if idx & bit != 0 {
            acc += t[idx ^ bit] * v[idx];
        }
    }
    acc
}

fn build_table(basis: &DickeBasis) -> Result<TransferTable> {
    let n = basis.n_spins;
    if n > MAX_TRANSFER_SPINS {
        return Err(Error::Unsupported(format!(
            "local-decay transfer table limited to N ≤ {MAX_TRANSFER_SPINS}, got {n}"
        )));
    }
    let sym = build_symmetric_vectors(basis);
    let mut entries = Vec::new();
    for (bi, blk) in basis.blocks.iter().enumerate() {
        let tj = blk.two_j as i64;
        for (bj, blk2) in basis.blocks.iter().enumerate() {
            let tj2 = blk2.two_j as i64;
            if (tj - tj2).abs() > 2 {
                continue;
            }
            let shift = (tj2 - tj) / 2;
            let n_alpha = sym.vectors[bi].len();
            let n_beta = sym.vectors[bj].len();
            // Amplitude matrix per source projection: rows flatten (α, i),
            // columns run over target copies β.
            let mut mats: Vec<Option<Vec<f64>>> = vec![None; blk.dim];
            for s in 0..blk.dim {
                let s2 = s as i64 - 1 + shift;
                if s2 < 0 || s2 > tj2 {
                    continue;
                }
                let s2 = s2 as usize;
                let mut mat = vec![0.0; n_alpha * n * n_beta];
                for (a, copy) in sym.vectors[bi].iter().enumerate() {
                    let v = &copy[s];
                    for i in 0..n {
                        let bit = 1usize << i;
                        for (b, copy2) in sym.vectors[bj].iter().enumerate() {
                            mat[(a * n + i) * n_beta + b] =
                                lowering_overlap(&copy2[s2], v, bit);
                        }
                    }
                }
                mats[s] = Some(mat);
            }
            let inv_deg = 1.0 / blk2.degeneracy as f64;
            for s in 0..blk.dim {
                let Some(ms) = &mats[s] else { continue };
                for sp in 0..blk.dim {
                    let Some(msp) = &mats[sp] else { continue };
                    let coeff: f64 =
                        ms.iter().zip(msp).map(|(x, y)| x * y).sum::<f64>() * inv_deg;
                    if coeff.abs() > 1e-13 {
                        let s2 = (s as i64 - 1 + shift) as usize;
                        let sp2 = (sp as i64 - 1 + shift) as usize;
                        entries.push(TransferEntry {
                            src: basis.element_index(bi, s, sp),
                            dst: basis.element_index(bj, s2, sp2),
                            coeff,
                        });
                    }
                }
            }
        }
    }
    Ok(TransferTable { n_spins: n, entries })
}

/// Returns the (process-wide cached) transfer table for `n_spins`.
pub fn transfer_table(basis: &DickeBasis) -> Result<Arc<TransferTable>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<TransferTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("transfer table cache poisoned");
    if let Some(t) = guard.get(&basis.n_spins) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(build_table(basis)?);
    guard.insert(basis.n_spins, Arc::clone(&table));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::basis::build_dicke_basis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_vectors_are_orthonormal() {
        for n in [2usize, 3, 4, 5] {
            let basis = build_dicke_basis(n).unwrap();
            let sym = build_symmetric_vectors(&basis);
            let mut all: Vec<&Vec<f64>> = Vec::new();
            for block in &sym.vectors {
                for copy in block {
                    for v in copy {
                        all.push(v);
                    }
                }
            }
            assert_eq!(all.len(), 1 << n);
            for (i, u) in all.iter().enumerate() {
                for (k, v) in all.iter().enumerate() {
                    let dot: f64 = u.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
                    let expect = if i == k { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(dot, expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_spin_table() {
        let basis = build_dicke_basis(1).unwrap();
        let t = transfer_table(&basis).unwrap();
        // Only |↑⟩⟨↑| → |↓⟩⟨↓| with unit weight.
        assert_eq!(t.entries.len(), 1);
        let e = t.entries[0];
        assert_eq!(e.src, basis.element_index(0, 1, 1));
        assert_eq!(e.dst, basis.element_index(0, 0, 0));
        assert_abs_diff_eq!(e.coeff, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn two_spin_top_state_feeds_both_blocks_equally() {
        let basis = build_dicke_basis(2).unwrap();
        let t = transfer_table(&basis).unwrap();
        let src = basis.element_index(0, 2, 2);
        let into_triplet = basis.element_index(0, 1, 1);
        let into_singlet = basis.element_index(1, 0, 0);
        let find = |dst: usize| {
            t.entries
                .iter()
                .find(|e| e.src == src && e.dst == dst)
                .map(|e| e.coeff)
                .unwrap_or(0.0)
        };
        assert_abs_diff_eq!(find(into_triplet), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(find(into_singlet), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_flow_balances_anticommutator() {
        // For every diagonal source (j, m, m) the degeneracy-weighted inflow
        // to target diagonals must equal d_j (N/2 + m), the analytic loss.
        for n in [2usize, 3, 4] {
            let basis = build_dicke_basis(n).unwrap();
            let t = transfer_table(&basis).unwrap();
            for (bi, blk) in basis.blocks.iter().enumerate() {
                for s in 0..blk.dim {
                    let m = s as f64 - blk.two_j as f64 / 2.0;
                    let loss = blk.degeneracy as f64 * (n as f64 / 2.0 + m);
                    let src = basis.element_index(bi, s, s);
                    let mut gain = 0.0;
                    for e in t.entries.iter().filter(|e| e.src == src) {
                        for (bj, blk2) in basis.blocks.iter().enumerate() {
                            let off = basis.element_offset(bj);
                            if e.dst >= off && e.dst < off + blk2.dim * blk2.dim {
                                let local = e.dst - off;
                                if local % (blk2.dim + 1) == 0 {
                                    gain += blk2.degeneracy as f64 * e.coeff;
                                }
                            }
                        }
                    }
                    assert_abs_diff_eq!(gain, loss, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn rejects_oversized_n() {
        let basis = build_dicke_basis(13).unwrap();
        assert!(build_table(&basis).is_err());
    }
}
