//! Shift and clock operators and the off-diagonal Weyl family.
//!
//! `X = Σ_j |j+1⟩⟨j|` (indices mod d) and `Z = diag(ω^j)` with `ω = e^{2πi/d}`.
//! The family `X^m Z^n` with `m >= 1` spans exactly the matrices with zero
//! diagonal, so its orthogonal complement is the diagonal matrices.

use crate::error::{Error, Result};
use crate::numerics::{root_of_unity, ComplexMatrix, ONE};

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// Exponent pair `(m, n)` of `X^m Z^n` in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylIndex {
    m: usize,
    n: usize,
    d: usize,
}

impl WeylIndex {
    pub fn new(m: usize, n: usize, d: usize) -> Result<Self> {
        check_dim(d)?;
        if m >= d || n >= d {
            return Err(Error::Domain(format!("weyl exponents ({m}, {n}) out of range for d = {d}")));
        }
        Ok(WeylIndex { m, n, d })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

pub fn shift_matrix(d: usize) -> Result<ComplexMatrix> {
    check_dim(d)?;
    let mut x = ComplexMatrix::zeros(d, d);
    for c in 0..d {
        x[((c + 1) % d, c)] = ONE;
    }
    Ok(x)
}

pub fn clock_matrix(d: usize) -> Result<ComplexMatrix> {
    check_dim(d)?;
    let diag: Vec<_> = (0..d).map(|j| root_of_unity(j as i64, d)).collect();
    Ok(ComplexMatrix::diagonal(&diag))
}

/// `X^m Z^n`, built entrywise: column `c` carries `ω^{nc}` in row `c + m`.
pub fn weyl(idx: WeylIndex) -> ComplexMatrix {
    let d = idx.d;
    let mut w = ComplexMatrix::zeros(d, d);
    for c in 0..d {
        w[((c + idx.m) % d, c)] = root_of_unity((idx.n * c) as i64, d);
    }
    w
}

/// All `d²` Weyl matrices in lexicographic `(m, n)` order.
pub fn weyl_family(d: usize) -> Result<Vec<(WeylIndex, ComplexMatrix)>> {
    check_dim(d)?;
    Ok(indices(d, 0).map(|idx| (idx, weyl(idx))).collect())
}

/// The `d(d-1)` matrices `X^m Z^n` with `m in 1..d`, `n in 0..d`, lexicographic.
pub fn s0_family(d: usize) -> Result<Vec<(WeylIndex, ComplexMatrix)>> {
    check_dim(d)?;
    Ok(indices(d, 1).map(|idx| (idx, weyl(idx))).collect())
}

fn indices(d: usize, m_from: usize) -> impl Iterator<Item = WeylIndex> {
    (m_from..d).flat_map(move |m| (0..d).map(move |n| WeylIndex { m, n, d }))
}
