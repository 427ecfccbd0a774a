//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Everything here works on small, exactly structured matrices (roots of
//! unity, Hadamard rows), so plain row-major storage and modified
//! Gram–Schmidt are enough. The only decompositions needed elsewhere (SVD
//! for polar factors) are delegated to `nalgebra` at the call site.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Deref, Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Numerical thresholds used by every verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Orthogonality and rank threshold.
    pub eps_orth: f64,
    pub eps_unitary: f64,
    pub eps_unimodular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_orth: 1e-9,
            eps_unitary: 1e-8,
            eps_unimodular: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_orth, self.eps_unitary, self.eps_unimodular];
        if all.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::Domain(format!("tolerances must be positive and finite: {self:?}")));
        }
        if self.eps_orth > self.eps_unitary {
            return Err(Error::Domain(format!(
                "eps_orth ({}) must not exceed eps_unitary ({})",
                self.eps_orth, self.eps_unitary
            )));
        }
        Ok(())
    }
}

/// `exp(2πi k / d)` with `k` reduced modulo `d` before the angle is formed.
pub fn root_of_unity(k: i64, d: usize) -> C64 {
    assert!(d >= 1, "root_of_unity: order must be positive");
    let r = k.rem_euclid(d as i64);
    if r == 0 {
        return ONE;
    }
    // exact values on the axes keep Fourier-type sums free of drift
    if 4 * r == d as i64 {
        return I;
    }
    if 2 * r == d as i64 {
        return C64::new(-1.0, 0.0);
    }
    if 4 * r == 3 * d as i64 {
        return C64::new(0.0, -1.0);
    }
    let theta = 2.0 * PI * r as f64 / d as f64;
    C64::new(theta.cos(), theta.sin())
}

/// `Σ conj(a_i) b_i`, the coefficient of `b` along a unit vector `a`.
pub fn hermitian_dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_finite(entries: &[C64], what: &str) -> Result<()> {
    match entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(format!("{what}[{i}]"))),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("vector must have at least one entry".into()));
        }
        check_finite(&entries, "vector")?;
        Ok(ComplexVector(entries))
    }

    /// Wraps entries produced by arithmetic on already-validated values.
    pub(crate) fn from_vec(entries: Vec<C64>) -> Self {
        ComplexVector(entries)
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(d: usize) -> Self {
        ComplexVector(vec![ZERO; d])
    }

    /// Canonical basis vector `e_i` of length `d`.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = vec![ZERO; d];
        v[i] = ONE;
        ComplexVector(v)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scaled(&self, s: C64) -> Self {
        ComplexVector(self.0.iter().map(|z| z * s).collect())
    }

    pub fn conj(&self) -> Self {
        ComplexVector(self.0.iter().map(|z| z.conj()).collect())
    }

    /// Largest entrywise `|a_i - b_i|`.
    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `| |v_i| - 1 |`.
    pub fn unimodular_deviation(&self) -> f64 {
        self.0.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Rotates the vector so its first entry of modulus above `floor` is real
    /// and positive.
    pub fn gauge_fixed(&self, floor: f64) -> Self {
        match self.0.iter().find(|z| z.norm() > floor) {
            Some(z) => {
                let phase = z.conj() / z.norm();
                self.scaled(phase)
            }
            None => self.clone(),
        }
    }
}

impl Deref for ComplexVector {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        check_finite(&data, "matrix")?;
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Shape(format!("row {r} has length {} instead of {cols}", rows[r].len())));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_row_vectors(rows: &[ComplexVector]) -> Result<Self> {
        let raw: Vec<Vec<C64>> = rows.iter().map(|r| r.as_slice().to_vec()).collect();
        Self::from_rows(&raw)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d, d);
        for (i, z) in diag.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> ComplexVector {
        ComplexVector(self.row(r).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<ComplexVector> {
        (0..self.rows).map(|r| self.row_vector(r)).collect()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        Ok(out)
    }

    /// `M M†`.
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let z: C64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b.conj()).sum();
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        g
    }

    pub fn scaled(&self, s: C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        self.diag().into_iter().sum()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("matrix power needs a square matrix".into()));
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..e {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    pub fn with_row(&self, row: &[C64]) -> Result<Self> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!("row of length {} for {} columns", row.len(), self.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(row);
        Self::new(self.rows + 1, self.cols, data)
    }

    pub fn without_row(&self, r: usize) -> Self {
        let rows: Vec<Vec<C64>> = (0..self.rows).filter(|&i| i != r).map(|i| self.row(i).to_vec()).collect();
        let data = rows.concat();
        ComplexMatrix { rows: self.rows - 1, cols: self.cols, data }
    }

    /// Row-major flattening, the vectorisation used for matrix subspaces.
    pub fn to_vector(&self) -> ComplexVector {
        ComplexVector(self.data.clone())
    }

    pub fn from_vector(rows: usize, cols: usize, v: &ComplexVector) -> Result<Self> {
        Self::new(rows, cols, v.as_slice().to_vec())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// `Tr(a b†)`.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Dimension(format!(
            "trace inner product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.entries().iter().zip(b.entries()).map(|(x, y)| x * y.conj()).sum())
}

/// Removes from `w` its components along the orthonormal `basis`, twice.
fn strip(basis: &[ComplexVector], w: &mut [C64]) {
    for _ in 0..2 {
        for q in basis {
            let c = hermitian_dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q.iter()) {
                *wi -= c * qi;
            }
        }
    }
}

/// Extends the orthonormal `basis` with the components of `candidates` not
/// already spanned. Candidates whose residual norm falls below
/// `eps * max(1, |candidate|)` are dropped.
fn extend_orthonormal(basis: &mut Vec<ComplexVector>, candidates: &[ComplexVector], eps: f64, cap: usize) {
    for v in candidates {
        if basis.len() >= cap {
            break;
        }
        let before = v.norm();
        let mut w = v.as_slice().to_vec();
        strip(basis, &mut w);
        let after = norm(&w);
        if after <= eps * before.max(1.0) {
            continue;
        }
        w.iter_mut().for_each(|z| *z /= after);
        basis.push(ComplexVector(w));
    }
}

/// Modified Gram–Schmidt with one reorthogonalisation pass. Dependent
/// vectors are dropped; survivors keep their input order.
pub fn orthonormalize(vs: &[ComplexVector], eps: f64) -> Result<Vec<ComplexVector>> {
    let Some(first) = vs.first() else {
        return Ok(Vec::new());
    };
    let d = first.len();
    if let Some(i) = vs.iter().position(|v| v.len() != d) {
        return Err(Error::Dimension(format!("vector {i} has length {} instead of {d}", vs[i].len())));
    }
    let mut basis = Vec::new();
    extend_orthonormal(&mut basis, vs, eps, d);
    Ok(basis)
}

/// Orthonormal basis of the orthogonal complement of the row span of `rows`,
/// obtained by orthogonalising `e_1 .. e_d` against the rows in index order.
pub fn complement_basis(rows: &ComplexMatrix, eps: f64) -> Result<Vec<ComplexVector>> {
    complement_basis_seeded(rows, &[], eps)
}

/// Like [`complement_basis`], but the `seeds` are orthogonalised first (in
/// order) before the canonical vectors fill the rest of the complement.
pub fn complement_basis_seeded(rows: &ComplexMatrix, seeds: &[ComplexVector], eps: f64) -> Result<Vec<ComplexVector>> {
    let d = rows.cols();
    if rows.rows() > d {
        return Err(Error::Shape(format!("{} rows exceed ambient dimension {d}", rows.rows())));
    }
    if let Some(i) = seeds.iter().position(|s| s.len() != d) {
        return Err(Error::Dimension(format!("seed {i} has length {} instead of {d}", seeds[i].len())));
    }
    let mut row_basis = Vec::new();
    extend_orthonormal(&mut row_basis, &rows.row_vectors(), eps, d);
    let rank = row_basis.len();

    let mut all = row_basis;
    extend_orthonormal(&mut all, seeds, eps, d);
    let canonical: Vec<ComplexVector> = (0..d).map(|i| ComplexVector::unit(d, i)).collect();
    extend_orthonormal(&mut all, &canonical, eps, d);
    Ok(all.split_off(rank))
}

/// Largest deviation of the Gram matrix of `basis` from the identity.
pub fn orthonormality_defect(basis: &[ComplexVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((hermitian_dot(a, b) - target).norm());
        }
    }
    worst
}

/// `Σ_i ⟨b_i, v⟩ b_i` for an orthonormal basis.
pub fn project_onto_span(basis: &[ComplexVector], v: &ComplexVector, eps_orth: f64) -> Result<ComplexVector> {
    if let Some(i) = basis.iter().position(|b| b.len() != v.len()) {
        return Err(Error::Dimension(format!("basis vector {i} has length {} but v has {}", basis[i].len(), v.len())));
    }
    let defect = orthonormality_defect(basis);
    if defect > eps_orth {
        return Err(Error::Precondition(format!("basis is not orthonormal (defect {defect:.3e})")));
    }
    Ok(project_unchecked(basis, v))
}

pub(crate) fn project_unchecked(basis: &[ComplexVector], v: &[C64]) -> ComplexVector {
    let mut out = vec![ZERO; v.len()];
    for b in basis {
        let c = hermitian_dot(b, v);
        for (o, bi) in out.iter_mut().zip(b.iter()) {
            *o += c * bi;
        }
    }
    ComplexVector(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityReport {
    pub unitary: bool,
    /// Largest entry of `|M M† - I|`.
    pub max_deviation: f64,
}

pub fn is_unitary(m: &ComplexMatrix, tol: &Tolerances) -> Result<UnitarityReport> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix cannot be unitary", m.rows(), m.cols())));
    }
    let dev = m.gram().max_abs_diff(&ComplexMatrix::identity(m.rows()));
    Ok(UnitarityReport { unitary: dev <= tol.eps_unitary, max_deviation: dev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{clock_matrix, shift_matrix, weyl, WeylIndex};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fourier_rows(d: usize) -> ComplexMatrix {
        let rows: Vec<Vec<C64>> =
            (0..d).map(|r| (0..d).map(|c| root_of_unity((r * c) as i64, d)).collect()).collect();
        ComplexMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn roots_of_unity_close_exactly() {
        for d in 1..40 {
            let w = root_of_unity(1, d);
            let mut acc = ONE;
            for _ in 0..d {
                acc *= w;
            }
            assert!((acc - ONE).norm() < 1e-13, "d = {d}");
            assert_eq!(root_of_unity(d as i64 + 3, d), root_of_unity(3, d));
            assert_eq!(root_of_unity(-1, d), root_of_unity(d as i64 - 1, d));
        }
        assert_eq!(root_of_unity(1, 4), I);
    }

    #[test]
    fn trace_inner_examples() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(trace_inner(&i3, &i3).unwrap(), c(3.0, 0.0));
        let x5 = shift_matrix(5).unwrap();
        let z5 = clock_matrix(5).unwrap();
        assert!(trace_inner(&x5, &z5).unwrap().norm() < 1e-15);
        let w = weyl(WeylIndex::new(1, 2, 5).unwrap());
        assert!((trace_inner(&w, &w).unwrap() - c(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_inner_rejects_mismatch() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(matches!(trace_inner(&a, &b), Err(Error::Dimension(_))));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(trace_inner(&r, &r).is_err());
    }

    #[test]
    fn orthonormalize_examples() {
        let vs = vec![ComplexVector::from_real(&[1.0, 0.0]).unwrap(), ComplexVector::from_real(&[1.0, 1.0]).unwrap()];
        let out = orthonormalize(&vs, 1e-9).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[0].max_abs_diff(&ComplexVector::from_real(&[1.0, 0.0]).unwrap()) < 1e-15);
        assert!(out[1].max_abs_diff(&ComplexVector::from_real(&[0.0, 1.0]).unwrap()) < 1e-15);

        let dep = vec![ComplexVector::from_real(&[1.0, 1.0]).unwrap(), ComplexVector::from_real(&[2.0, 2.0]).unwrap()];
        let out = orthonormalize(&dep, 1e-9).unwrap();
        assert_eq!(out.len(), 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(out[0].max_abs_diff(&ComplexVector::from_real(&[h, h]).unwrap()) < 1e-15);

        assert!(orthonormalize(&[], 1e-9).unwrap().is_empty());
        let ragged = vec![ComplexVector::zeros(2), ComplexVector::zeros(3)];
        assert!(orthonormalize(&ragged, 1e-9).is_err());
    }

    #[test]
    fn complement_of_fourier() {
        for d in 2..10 {
            let f = fourier_rows(d);
            assert!(complement_basis(&f, 1e-9).unwrap().is_empty());
            let head = f.without_row(d - 1);
            let comp = complement_basis(&head, 1e-9).unwrap();
            assert_eq!(comp.len(), 1);
            // collinear with the removed row / sqrt(d)
            let last = f.row_vector(d - 1).scaled(C64::new(1.0 / (d as f64).sqrt(), 0.0));
            let overlap = hermitian_dot(&last, &comp[0]).norm();
            assert!((overlap - 1.0).abs() < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn complement_rejects_tall_input() {
        let m = ComplexMatrix::zeros(3, 2);
        assert!(matches!(complement_basis(&m, 1e-9), Err(Error::Shape(_))));
    }

    #[test]
    fn projection_examples() {
        let e1 = ComplexVector::unit(2, 0);
        let v = ComplexVector::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        let p = project_onto_span(&[e1.clone()], &v, 1e-9).unwrap();
        assert!(p.max_abs_diff(&ComplexVector::new(vec![c(3.0, 0.0), ZERO]).unwrap()) < 1e-15);

        let inside = ComplexVector::new(vec![c(0.0, 2.0), ZERO]).unwrap();
        assert!(project_onto_span(&[e1.clone()], &inside, 1e-9).unwrap().max_abs_diff(&inside) < 1e-15);

        let bad = vec![e1.clone(), e1];
        assert!(matches!(project_onto_span(&bad, &v, 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn unitarity_examples() {
        let tol = Tolerances::default();
        let rep = is_unitary(&ComplexMatrix::identity(4), &tol).unwrap();
        assert!(rep.unitary);
        assert_eq!(rep.max_deviation, 0.0);
        let d = ComplexMatrix::diagonal(&[ONE, c(2.0, 0.0)]);
        assert!(!is_unitary(&d, &tol).unwrap().unitary);
        let f = fourier_rows(5).scaled(c(1.0 / 5f64.sqrt(), 0.0));
        assert!(is_unitary(&f, &tol).unwrap().unitary);
        assert!(is_unitary(&ComplexMatrix::zeros(2, 3), &tol).is_err());
    }

    #[test]
    fn tolerances_validate() {
        assert!(Tolerances::default().validate().is_ok());
        let mut t = Tolerances::default();
        t.eps_orth = 1e-6;
        assert!(t.validate().is_err());
        t.eps_orth = 0.0;
        assert!(t.validate().is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(ComplexVector::new(vec![c(f64::NAN, 0.0)]), Err(Error::NonFinite(_))));
        assert!(ComplexMatrix::new(1, 1, vec![c(0.0, f64::INFINITY)]).is_err());
        assert!(ComplexVector::new(vec![]).is_err());
    }
}
