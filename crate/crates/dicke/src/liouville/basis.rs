//! Permutation-symmetric spin sector: total-spin blocks and degeneracies.
//!
//! A permutation-invariant density operator on `N` spin-1/2 particles block
//! diagonalizes over total spin `j`, with each `(2j+1)×(2j+1)` block carrying
//! a combinatorial multiplicity `d_N(j)`. Only one representative copy per
//! block is stored; traces weight it with the degeneracy.

use crate::{Error, Result};

/// One total-spin block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinBlock {
    /// Twice the total spin (`2j`), so half-integers stay exact.
    pub two_j: u32,
    /// Block dimension `2j + 1`.
    pub dim: usize,
    /// Multiplicity `d_N(j) = N!(2j+1)/((N/2−j)!(N/2+j+1)!)`.
    pub degeneracy: u64,
}

/// Block structure of the permutation-symmetric spin sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DickeBasis {
    pub n_spins: usize,
    /// Blocks ordered by decreasing `j` (the ground product state lives in
    /// the first block).
    pub blocks: Vec<SpinBlock>,
    /// Flat offset of each block in the `(j, m, m′)` element enumeration.
    element_offsets: Vec<usize>,
    element_count: usize,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Builds the block list for `n_spins ≥ 1`.
pub fn build_dicke_basis(n_spins: usize) -> Result<DickeBasis> {
    if n_spins < 1 {
        return Err(Error::InvalidParams("n_spins < 1".into()));
    }
    if n_spins > 20 {
        // factorial(20) is the largest fitting u64; far beyond desk scale.
        return Err(Error::Unsupported(format!(
            "permutation-symmetric basis limited to N ≤ 20, got {n_spins}"
        )));
    }
    let mut blocks = Vec::new();
    let mut two_j = n_spins as u32;
    loop {
        let dim = two_j as usize + 1;
        // d = N! (2j+1) / ((N/2−j)! (N/2+j+1)!), all arguments integral.
        let lower = (n_spins - two_j as usize) / 2;
        let upper = (n_spins + two_j as usize) / 2 + 1;
        let degeneracy =
            factorial(n_spins) * (two_j as u64 + 1) / (factorial(lower) * factorial(upper));
        blocks.push(SpinBlock { two_j, dim, degeneracy });
        if two_j < 2 {
            break;
        }
        two_j -= 2;
    }
    let mut element_offsets = Vec::with_capacity(blocks.len());
    let mut acc = 0usize;
    for b in &blocks {
        element_offsets.push(acc);
        acc += b.dim * b.dim;
    }
    Ok(DickeBasis { n_spins, blocks, element_offsets, element_count: acc })
}

impl DickeBasis {
    /// Total number of `(j, m, m′)` matrix elements, `Σ_j (2j+1)²`.
    pub fn element_count(&self) -> usize {
        self.element_count
    }

    /// Flat index of element `(block, s, s′)`; `s = m + j` counts from the
    /// lowest projection.
    pub fn element_index(&self, block: usize, s: usize, sp: usize) -> usize {
        let dim = self.blocks[block].dim;
        debug_assert!(s < dim && sp < dim);
        self.element_offsets[block] + s * dim + sp
    }

    pub fn element_offset(&self, block: usize) -> usize {
        self.element_offsets[block]
    }

    /// Index of the block holding total spin `two_j/2`, if present.
    pub fn block_of_two_j(&self, two_j: u32) -> Option<usize> {
        self.blocks.iter().position(|b| b.two_j == two_j)
    }

    /// `Σ_j d_N(j)(2j+1)`, which must equal `2^N`.
    pub fn weighted_dimension(&self) -> u64 {
        self.blocks.iter().map(|b| b.degeneracy * b.dim as u64).sum()
    }
}
