//! Does a subspace of `C^d` contain a vector whose entries all have modulus 1?
//!
//! A partial Hadamard matrix extends by one row exactly when the orthogonal
//! complement of its rows contains such a vector, so this question decides
//! whether `S_0 ∪ S(A)` is unextendible. Three independent routes are offered:
//!
//! * [`find_unimodular_in_span`]: multi-start alternating projections between
//!   the subspace and the torus, followed by a Gauss–Newton polish on the
//!   phases once a trajectory comes close. Failure is heuristic evidence only.
//! * [`grid_oracle`]: brute-force enumeration of root-of-unity vectors.
//! * [`magnitude_constraint_reduce`]: necessary conditions on the coefficients
//!   that can be read off the zero pattern of a structured basis.
//!
//! [`nearest_unitary_in_span`] is the matrix analogue for general unitary
//! sets, projecting onto the unitary group through the polar factor.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hadamard::{PartialHadamard, PartialHadamardReport};
use crate::numerics::{
    complement_basis, hermitian_dot, orthonormality_defect, project_unchecked, root_of_unity, trace_inner,
    ComplexMatrix, ComplexVector, Tolerances, C64, ZERO,
};

/// Entries below this modulus get a fresh random phase instead of being
/// normalised.
const ZERO_ENTRY: f64 = 1e-14;
/// Trajectories are merged in batches of this many starts.
const BATCH: usize = 32;
/// Iterations between stall checks.
const STALL_WINDOW: usize = 50;
const STALL_RATIO: f64 = 1e-4;
/// Coefficient magnitude treated as structurally zero.
const SUPPORT_EPS: f64 = 1e-10;
/// Largest enumeration the grid oracle will attempt.
pub const GRID_BUDGET: u128 = 100_000_000;
pub const GRID_MAX_DIM: usize = 8;

/// An orthonormal basis of a subspace of `C^d`.
#[derive(Debug, Clone)]
pub struct SubspaceSpec {
    ambient_dim: usize,
    basis: Vec<ComplexVector>,
    /// Orthonormal basis of the orthogonal complement of the span.
    normal: Vec<ComplexVector>,
}

impl SubspaceSpec {
    pub fn new(basis: Vec<ComplexVector>, tol: &Tolerances) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::Shape("subspace basis must not be empty".into()));
        };
        let d = first.len();
        if let Some(i) = basis.iter().position(|b| b.len() != d) {
            return Err(Error::Dimension(format!("basis vector {i} has length {} instead of {d}", basis[i].len())));
        }
        if basis.len() > d {
            return Err(Error::Shape(format!("{} basis vectors in dimension {d}", basis.len())));
        }
        let defect = orthonormality_defect(&basis);
        if defect > tol.eps_orth {
            return Err(Error::Precondition(format!("subspace basis is not orthonormal (defect {defect:.3e})")));
        }
        let as_rows = ComplexMatrix::from_row_vectors(&basis)?;
        let normal = complement_basis(&as_rows, tol.eps_orth)?;
        Ok(SubspaceSpec { ambient_dim: d, basis, normal })
    }

    /// The orthogonal complement of the rows of `h`.
    pub fn complement_of(h: &PartialHadamard, tol: &Tolerances) -> Result<Self> {
        Self::new(h.complement(tol)?, tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    pub fn project(&self, v: &[C64]) -> ComplexVector {
        project_unchecked(&self.basis, v)
    }

    /// `k_i = ⟨β_i, v⟩`.
    pub fn coefficients(&self, v: &[C64]) -> Vec<C64> {
        self.basis.iter().map(|b| hermitian_dot(b, v)).collect()
    }

    pub fn reconstruct(&self, coeffs: &[C64]) -> ComplexVector {
        let mut out = vec![ZERO; self.ambient_dim];
        for (k, b) in coeffs.iter().zip(&self.basis) {
            for (o, bi) in out.iter_mut().zip(b.iter()) {
                *o += k * bi;
            }
        }
        ComplexVector::from_vec(out)
    }

    /// `max_j |v_j - (Pv)_j|`.
    pub fn distance_inf(&self, v: &[C64]) -> f64 {
        let p = self.project(v);
        v.iter().zip(p.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max(span distance, max_j ||v_j| - 1|)`.
    pub fn residual(&self, v: &ComplexVector) -> f64 {
        self.distance_inf(v).max(v.unimodular_deviation())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub starts: usize,
    pub max_iter: usize,
    pub tol_success: f64,
    pub tol_evidence: f64,
    pub seed: u64,
    pub grid_order: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { starts: 1000, max_iter: 2000, tol_success: 1e-7, tol_evidence: 1e-3, seed: 0, grid_order: 24 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts < 1 || self.max_iter < 1 {
            return Err(Error::Domain("solver needs at least one start and one iteration".into()));
        }
        if !(self.tol_success > 0.0 && self.tol_success < self.tol_evidence) {
            return Err(Error::Domain(format!(
                "need 0 < tol_success ({}) < tol_evidence ({})",
                self.tol_success, self.tol_evidence
            )));
        }
        if self.grid_order < 2 {
            return Err(Error::Domain("grid order must be at least 2".into()));
        }
        Ok(())
    }

    fn with_seed(&self, seed: u64) -> Self {
        SolverConfig { seed, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Found,
    /// Nothing found. Heuristic evidence, never a proof of absence.
    NotFoundEvidence,
}

#[derive(Debug, Clone)]
pub struct FeasibilityOutcome {
    pub status: FeasibilityStatus,
    /// Best candidate seen; a witness only when `status` is `Found`.
    pub vector: Option<ComplexVector>,
    /// Coefficients of `vector` over the subspace basis.
    pub coefficients: Option<Vec<C64>>,
    pub residual: f64,
    /// Trajectories run (solver) or candidates enumerated (grid oracle).
    pub starts_used: usize,
    /// True when the outcome comes from the grid oracle.
    pub oracle_checked: bool,
}

impl FeasibilityOutcome {
    pub fn is_found(&self) -> bool {
        self.status == FeasibilityStatus::Found
    }

    pub fn witness(&self) -> Option<&ComplexVector> {
        self.vector.as_ref().filter(|_| self.is_found())
    }
}

struct Trajectory {
    index: usize,
    residual: f64,
    vector: ComplexVector,
}

fn random_phases(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    (0..d).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..TAU))).collect()
}

fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    rng
}

/// Runs one alternating-projection trajectory. When `log` is given it
/// receives the Euclidean distance to the span before every projection.
fn run_trajectory(s: &SubspaceSpec, cfg: &SolverConfig, index: usize, mut log: Option<&mut Vec<f64>>) -> Trajectory {
    let mut rng = start_rng(cfg.seed, index);
    let d = s.ambient_dim;
    let mut v = random_phases(&mut rng, d);
    let mut best = f64::INFINITY;
    let mut best_v = v.clone();
    let mut checkpoint = f64::INFINITY;

    for it in 0..cfg.max_iter {
        let u = s.project(&v);
        let mut inf: f64 = 0.0;
        let mut sq = 0.0;
        for (a, b) in v.iter().zip(u.iter()) {
            let e = (a - b).norm();
            inf = inf.max(e);
            sq += e * e;
        }
        if let Some(log) = log.as_deref_mut() {
            log.push(sq.sqrt());
        }
        if inf < best {
            best = inf;
            best_v.copy_from_slice(&v);
        }
        if best <= cfg.tol_success * 1e-3 {
            break;
        }
        if it % STALL_WINDOW == 0 {
            if checkpoint.is_finite() && checkpoint - best <= STALL_RATIO * checkpoint {
                break;
            }
            checkpoint = best;
        }
        for (vj, uj) in v.iter_mut().zip(u.iter()) {
            let m = uj.norm();
            *vj = if m < ZERO_ENTRY { C64::from_polar(1.0, rng.gen_range(0.0..TAU)) } else { uj / m };
        }
    }

    let mut vector = ComplexVector::from_vec(best_v);
    let mut residual = best;
    if residual <= 10.0 * cfg.tol_evidence {
        let (polished, r) = polish_phases(s, &vector);
        if r < residual {
            vector = polished;
            residual = r;
        }
    }
    Trajectory { index, residual, vector }
}

/// Damped Gauss–Newton on the phases `θ` of `v = e^{iθ}`, driving the
/// components of `v` along the normal space of the span to zero. Returns
/// the best unimodular vector and its residual.
fn polish_phases(s: &SubspaceSpec, start: &ComplexVector) -> (ComplexVector, f64) {
    let d = s.ambient_dim;
    let m = s.normal.len();
    let eval = |theta: &[f64]| -> (Vec<C64>, Vec<C64>, f64) {
        let v: Vec<C64> = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let f: Vec<C64> = s.normal.iter().map(|n| hermitian_dot(n, &v)).collect();
        let cost = f.iter().map(|z| z.norm_sqr()).sum::<f64>();
        (v, f, cost)
    };
    if m == 0 {
        return (start.clone(), s.residual(start));
    }

    let mut theta: Vec<f64> = start.iter().map(|z| z.arg()).collect();
    let (mut v, mut f, mut cost) = eval(&theta);
    let mut lambda = 1e-9;
    for _ in 0..60 {
        if cost.sqrt() < 1e-15 {
            break;
        }
        // J[l][j] = conj(n_lj) * i v_j, split into real and imaginary rows
        let mut jac = DMatrix::<f64>::zeros(2 * m, d);
        for (l, n) in s.normal.iter().enumerate() {
            for j in 0..d {
                let g = n[j].conj() * C64::new(0.0, 1.0) * v[j];
                jac[(l, j)] = g.re;
                jac[(m + l, j)] = g.im;
            }
        }
        let resid = DVector::from_iterator(2 * m, f.iter().map(|z| z.re).chain(f.iter().map(|z| z.im)));
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * &resid;
        let mut accepted = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..d {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&grad);
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t - s).collect();
            let (tv, tf, tc) = eval(&trial);
            if tc < cost {
                theta = trial;
                v = tv;
                f = tf;
                cost = tc;
                lambda = (lambda * 0.1).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let vector = ComplexVector::from_vec(v);
    let r = s.residual(&vector);
    (vector, r)
}

fn package(s: &SubspaceSpec, cfg: &SolverConfig, best: Trajectory, starts_used: usize) -> FeasibilityOutcome {
    let found = best.residual <= cfg.tol_success;
    let vector = best.vector.gauge_fixed(0.5);
    let coefficients = s.coefficients(&vector);
    let residual = s.residual(&vector);
    FeasibilityOutcome {
        status: if found && residual <= cfg.tol_success {
            FeasibilityStatus::Found
        } else {
            FeasibilityStatus::NotFoundEvidence
        },
        vector: Some(vector),
        coefficients: Some(coefficients),
        residual,
        starts_used,
        oracle_checked: false,
    }
}

/// Multi-start alternating projections. Starts run in parallel in fixed
/// batches; the first batch containing a success returns its lowest-index
/// success, otherwise the minimum residual over all starts is reported
/// (ties broken by start index).
pub fn find_unimodular_in_span(s: &SubspaceSpec, cfg: &SolverConfig) -> FeasibilityOutcome {
    let mut best: Option<Trajectory> = None;
    let mut used = 0;
    while used < cfg.starts {
        let end = (used + BATCH).min(cfg.starts);
        let batch: Vec<Trajectory> = (used..end).into_par_iter().map(|i| run_trajectory(s, cfg, i, None)).collect();
        used = end;
        for t in batch {
            let better = match &best {
                None => true,
                Some(b) => t.residual < b.residual || (t.residual == b.residual && t.index < b.index),
            };
            if better {
                best = Some(t);
            }
        }
        if best.as_ref().is_some_and(|b| b.residual <= cfg.tol_success) {
            break;
        }
    }
    package(s, cfg, best.expect("at least one start"), used)
}

/// Euclidean span distances of a single logged trajectory, one entry per
/// projection step.
pub fn trace_trajectory(s: &SubspaceSpec, cfg: &SolverConfig, start: usize) -> Vec<f64> {
    let mut log = Vec::new();
    run_trajectory(s, cfg, start, Some(&mut log));
    log
}

/// Enumerates every vector with entries in the `L`-th roots of unity and
/// first entry fixed to 1, scoring each by its Euclidean distance
/// `‖v - Pv‖₂` to the span. `Found` means the best candidate lies within
/// `2π/L` of the span, i.e. a witness is suspected nearby; an exact on-grid
/// witness shows up as a residual at rounding level. Since `I - P` is a
/// contraction, rounding a true witness onto the grid costs at most
/// `√(d-1)·π/L`.
pub fn grid_oracle(s: &SubspaceSpec, order: usize) -> Result<FeasibilityOutcome> {
    if order < 2 {
        return Err(Error::Domain("grid order must be at least 2".into()));
    }
    let d = s.ambient_dim;
    let required = (order as u128).checked_pow(d as u32 - 1).unwrap_or(u128::MAX);
    if d > GRID_MAX_DIM || required > GRID_BUDGET {
        return Err(Error::Budget { required, limit: GRID_BUDGET });
    }
    let roots: Vec<C64> = (0..order).map(|k| root_of_unity(k as i64, order)).collect();

    // columns of I - P
    let mut cols = vec![vec![ZERO; d]; d];
    for (j, col) in cols.iter_mut().enumerate() {
        let p = s.project(&ComplexVector::unit(d, j));
        for (i, c) in col.iter_mut().enumerate() {
            *c = if i == j { C64::new(1.0, 0.0) } else { ZERO } - p[i];
        }
    }

    let search = |head: usize| -> (f64, Vec<usize>) {
        let mut best = (f64::INFINITY, Vec::new());
        let mut digits = vec![0usize; d];
        digits[1] = head;
        let mut partial = vec![vec![ZERO; d]; d + 1];
        for i in 0..d {
            partial[1][i] = cols[0][i];
            if d > 1 {
                partial[2][i] = cols[0][i] + cols[1][i] * roots[head];
            }
        }
        if d == 1 {
            let r = partial[1].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            return (r, digits);
        }
        descend(2, d, &cols, &roots, &mut digits, &mut partial, &mut best);
        best
    };

    let heads: Vec<usize> = if d == 1 { vec![0] } else { (0..order).collect() };
    let results: Vec<(f64, Vec<usize>)> = heads.into_par_iter().map(search).collect();
    let (residual, digits) = results
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, r| if r.0 < acc.0 { r } else { acc });

    let vector = ComplexVector::from_vec(
        digits.iter().enumerate().map(|(j, &k)| if j == 0 { C64::new(1.0, 0.0) } else { roots[k] }).collect(),
    );
    let coefficients = s.coefficients(&vector);
    let threshold = TAU / order as f64;
    Ok(FeasibilityOutcome {
        status: if residual <= threshold { FeasibilityStatus::Found } else { FeasibilityStatus::NotFoundEvidence },
        vector: Some(vector),
        coefficients: Some(coefficients),
        residual,
        starts_used: required as usize,
        oracle_checked: true,
    })
}

fn descend(
    depth: usize,
    d: usize,
    cols: &[Vec<C64>],
    roots: &[C64],
    digits: &mut Vec<usize>,
    partial: &mut Vec<Vec<C64>>,
    best: &mut (f64, Vec<usize>),
) {
    if depth == d {
        let r = partial[d].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if r < best.0 {
            *best = (r, digits.clone());
        }
        return;
    }
    for (k, root) in roots.iter().enumerate() {
        digits[depth] = k;
        for i in 0..d {
            partial[depth + 1][i] = partial[depth][i] + cols[depth][i] * root;
        }
        descend(depth + 1, d, cols, roots, digits, partial, best);
    }
}

/// A necessary condition on the coefficients `k` of any unimodular vector
/// `Σ k_i β_i` in the span. Indices are zero-based positions in the basis.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcedConstraint {
    /// Coordinate `coordinate` is supported only by `β_index`, so
    /// `|k_index| = modulus`.
    Modulus { index: usize, coordinate: usize, modulus: f64 },
    /// Two coordinates are supported only by `β_first, β_second`, with
    /// entries `(a, b)` and `(a', b')` where `a'/b' = -a/b` and
    /// `|a'| = |a|`. Then `|a k_first|² + |b k_second|² = 1` and
    /// `Re(a k_first · conj(b k_second)) = 0`; for real `a, b` of one sign
    /// this says `k_first ⊥ k_second` as plane vectors.
    OrthogonalCoupling { first: usize, second: usize, coordinates: (usize, usize), weights: (C64, C64) },
}

impl ForcedConstraint {
    /// How far the coefficient vector `k` is from satisfying the constraint.
    pub fn violation(&self, k: &[C64]) -> f64 {
        match *self {
            ForcedConstraint::Modulus { index, modulus, .. } => (k[index].norm() - modulus).abs(),
            ForcedConstraint::OrthogonalCoupling { first, second, weights: (a, b), .. } => {
                let x = a * k[first];
                let y = b * k[second];
                let ortho = (x * y.conj()).re.abs();
                let energy = (x.norm_sqr() + y.norm_sqr() - 1.0).abs();
                ortho.max(energy)
            }
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Reads necessary conditions off the zero pattern of the basis: coordinates
/// carried by a single basis vector force that coefficient's modulus, and
/// coordinate pairs carried by the same two vectors with a sign-flipped
/// ratio force an orthogonal coupling.
pub fn magnitude_constraint_reduce(s: &SubspaceSpec) -> Vec<ForcedConstraint> {
    let d = s.ambient_dim;
    let mut out: Vec<ForcedConstraint> = Vec::new();
    let mut pairs: Vec<(usize, usize, usize, C64, C64)> = Vec::new();

    for j in 0..d {
        let support: Vec<usize> = (0..s.dim()).filter(|&i| s.basis[i][j].norm() > SUPPORT_EPS).collect();
        match support[..] {
            [i] => {
                let modulus = 1.0 / s.basis[i][j].norm();
                let duplicate = out.iter().any(|c| {
                    matches!(c, ForcedConstraint::Modulus { index, modulus: m, .. } if *index == i && close(*m, modulus))
                });
                if !duplicate {
                    out.push(ForcedConstraint::Modulus { index: i, coordinate: j, modulus });
                }
            }
            [i, i2] => pairs.push((j, i, i2, s.basis[i][j], s.basis[i2][j])),
            _ => {}
        }
    }

    for (x, &(j, i, i2, a, b)) in pairs.iter().enumerate() {
        for &(j2, k, k2, a2, b2) in &pairs[x + 1..] {
            if (k, k2) != (i, i2) {
                continue;
            }
            let flipped = (a2 / b2 + a / b).norm() <= 1e-9 * (a / b).norm().max(1.0);
            if close(a.norm(), a2.norm()) && close(b.norm(), b2.norm()) && flipped {
                let known = out.iter().any(|c| {
                    matches!(c, ForcedConstraint::OrthogonalCoupling { first, second, .. } if (*first, *second) == (i, i2))
                });
                if !known {
                    out.push(ForcedConstraint::OrthogonalCoupling {
                        first: i,
                        second: i2,
                        coordinates: (j, j2),
                        weights: (a, b),
                    });
                }
            }
        }
    }
    out
}

/// Solves the forced constraints together with `Σ |k_i|² = d` for every
/// coefficient modulus, when the constraints pin all indices but one coupled
/// pair. Returns `None` when the system is not of that shape or has no
/// non-negative solution.
pub fn forced_moduli(s: &SubspaceSpec, constraints: &[ForcedConstraint]) -> Option<Vec<f64>> {
    let k = s.dim();
    let mut moduli = vec![None; k];
    let mut coupling = None;
    for c in constraints {
        match *c {
            ForcedConstraint::Modulus { index, modulus, .. } => moduli[index] = Some(modulus),
            ForcedConstraint::OrthogonalCoupling { first, second, weights, .. } => {
                coupling.get_or_insert((first, second, weights));
            }
        };
    }
    let (p, q, (a, b)) = coupling?;
    let pinned: f64 = moduli
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != p && *i != q)
        .map(|(_, m)| m.map(|x| x * x))
        .sum::<Option<f64>>()?;
    // x + y = d - pinned, |a|² x + |b|² y = 1
    let total = s.ambient_dim as f64 - pinned;
    let (wa, wb) = (a.norm_sqr(), b.norm_sqr());
    if close(wa, wb) {
        return None;
    }
    let y = (1.0 - wa * total) / (wb - wa);
    let x = total - y;
    if x < 0.0 || y < 0.0 {
        return None;
    }
    moduli[p] = Some(x.sqrt());
    moduli[q] = Some(y.sqrt());
    moduli.into_iter().collect()
}

/// Two real quadratics `a r² + b r + c` and a check that they share no real
/// root.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticInconsistency {
    pub first: [f64; 3],
    pub second: [f64; 3],
    pub first_discriminant: f64,
    pub second_discriminant: f64,
    pub common_real_root: bool,
}

pub fn quadratic_inconsistency(first: [f64; 3], second: [f64; 3]) -> QuadraticInconsistency {
    let disc = |[a, b, c]: [f64; 3]| b * b - 4.0 * a * c;
    let real_roots = |q: [f64; 3]| -> Vec<f64> {
        let dq = disc(q);
        if dq < 0.0 {
            return Vec::new();
        }
        let [a, b, _] = q;
        vec![(-b + dq.sqrt()) / (2.0 * a), (-b - dq.sqrt()) / (2.0 * a)]
    };
    let eval = |[a, b, c]: [f64; 3], r: f64| a * r * r + b * r + c;
    let common = real_roots(first).into_iter().any(|r| eval(second, r).abs() <= 1e-12 * (1.0 + r * r));
    QuadraticInconsistency {
        first,
        second,
        first_discriminant: disc(first),
        second_discriminant: disc(second),
        common_real_root: common,
    }
}

/// The pair `r² - r + 1/2 = 0`, `r² - 2r - 1 = 0` that closes the published
/// argument for the `d = 7` instance.
pub fn example7_quadratic_certificate() -> QuadraticInconsistency {
    quadratic_inconsistency([1.0, -1.0, 0.5], [1.0, -2.0, -1.0])
}

#[derive(Debug, Clone)]
pub struct MatrixFeasibilityOutcome {
    pub status: FeasibilityStatus,
    /// Best unitary iterate; a witness only when `status` is `Found`.
    pub unitary: Option<ComplexMatrix>,
    /// Coefficients of the projected iterate over the basis.
    pub coefficients: Option<Vec<C64>>,
    pub residual: f64,
    pub starts_used: usize,
    /// Trajectories restarted after hitting a singular iterate.
    pub restarts: usize,
}

impl MatrixFeasibilityOutcome {
    pub fn is_found(&self) -> bool {
        self.status == FeasibilityStatus::Found
    }
}

fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// Polar factor `U V†` of `m = U Σ V†`, or `None` when `m` is numerically
/// singular.
fn polar_factor(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let svd = to_na(m).svd(true, true);
    let smallest = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smallest > 1e-12) {
        return None;
    }
    let q = svd.u? * svd.v_t?;
    let d = m.rows();
    ComplexMatrix::new(d, d, (0..d * d).map(|i| q[(i / d, i % d)]).collect()).ok()
}

struct MatrixTrajectory {
    index: usize,
    residual: f64,
    unitary: ComplexMatrix,
    restarts: usize,
}

/// Alternating projections between the span of `matrix_basis` and the
/// unitary group. The basis must satisfy `Tr(B_i B_j†) = d δ_ij`.
pub fn nearest_unitary_in_span(matrix_basis: &[ComplexMatrix], cfg: &SolverConfig) -> Result<MatrixFeasibilityOutcome> {
    let Some(first) = matrix_basis.first() else {
        return Err(Error::Shape("matrix basis must not be empty".into()));
    };
    let d = first.rows();
    if !first.is_square() || matrix_basis.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::Dimension("matrix basis must consist of equal-size square matrices".into()));
    }
    for (i, a) in matrix_basis.iter().enumerate() {
        for (j, b) in matrix_basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (trace_inner(a, b)? / d as f64 - C64::new(target, 0.0)).norm();
            if dev > Tolerances::default().eps_orth {
                return Err(Error::Precondition(format!(
                    "matrix basis not orthonormal under Tr(AB†)/d at ({i}, {j}): {dev:.3e}"
                )));
            }
        }
    }
    let scale = 1.0 / (d as f64).sqrt();
    let vecs: Vec<ComplexVector> = matrix_basis.iter().map(|m| m.to_vector().scaled(C64::new(scale, 0.0))).collect();
    let project = |u: &ComplexMatrix| -> ComplexMatrix {
        let p = project_unchecked(&vecs, u.entries());
        ComplexMatrix::from_vector(d, d, &p).expect("projection keeps shape")
    };

    let trajectory = |index: usize| -> MatrixTrajectory {
        let mut rng = start_rng(cfg.seed, index);
        let mut restarts = 0;
        let random_unitary = |rng: &mut ChaCha8Rng| loop {
            let data = (0..d * d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            if let Some(u) = ComplexMatrix::new(d, d, data).ok().and_then(|m| polar_factor(&m)) {
                break u;
            }
        };
        let mut u = random_unitary(&mut rng);
        let mut best = (f64::INFINITY, u.clone());
        let mut checkpoint = f64::INFINITY;
        for it in 0..cfg.max_iter {
            let y = project(&u);
            let r = u.max_abs_diff(&y);
            if r < best.0 {
                best = (r, u.clone());
            }
            if r <= cfg.tol_success * 1e-3 {
                break;
            }
            if it % STALL_WINDOW == 0 {
                if checkpoint.is_finite() && checkpoint - best.0 <= STALL_RATIO * checkpoint {
                    break;
                }
                checkpoint = best.0;
            }
            u = match polar_factor(&y) {
                Some(next) => next,
                None => {
                    restarts += 1;
                    random_unitary(&mut rng)
                }
            };
        }
        MatrixTrajectory { index, residual: best.0, unitary: best.1, restarts }
    };

    let mut best: Option<MatrixTrajectory> = None;
    let mut used = 0;
    let mut restarts = 0;
    while used < cfg.starts {
        let end = (used + BATCH).min(cfg.starts);
        let batch: Vec<MatrixTrajectory> = (used..end).into_par_iter().map(trajectory).collect();
        used = end;
        for t in batch {
            restarts += t.restarts;
            let better = match &best {
                None => true,
                Some(b) => t.residual < b.residual || (t.residual == b.residual && t.index < b.index),
            };
            if better {
                best = Some(t);
            }
        }
        if best.as_ref().is_some_and(|b| b.residual <= cfg.tol_success) {
            break;
        }
    }
    let best = best.expect("at least one start");
    let projected = project(&best.unitary);
    let coefficients = matrix_basis.iter().map(|b| trace_inner(&projected, b).map(|z| z / d as f64)).collect::<Result<Vec<_>>>()?;
    Ok(MatrixFeasibilityOutcome {
        status: if best.residual <= cfg.tol_success { FeasibilityStatus::Found } else { FeasibilityStatus::NotFoundEvidence },
        unitary: Some(best.unitary),
        coefficients: Some(coefficients),
        residual: best.residual,
        starts_used: used,
        restarts,
    })
}

#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub matrix: PartialHadamard,
    pub added: usize,
    /// One solver outcome per round; the last is the stall when the result
    /// is not complete.
    pub rounds: Vec<FeasibilityOutcome>,
    /// Set when a witness was found but the enlarged matrix failed
    /// verification.
    pub rejected: Option<PartialHadamardReport>,
}

impl ExtensionResult {
    pub fn stalled(&self) -> bool {
        !self.matrix.is_complete()
    }
}

/// Appends solver witnesses (first entry real positive) one row at a time
/// until the solver fails or the matrix is square. Round `r` uses seed
/// `cfg.seed + r`.
pub fn greedy_unimodular_extension(h: &PartialHadamard, cfg: &SolverConfig) -> Result<ExtensionResult> {
    let tol = Tolerances::default();
    let mut current = h.clone();
    let mut rounds = Vec::new();
    let mut rejected = None;
    while !current.is_complete() {
        let spec = SubspaceSpec::complement_of(&current, &tol)?;
        let outcome = find_unimodular_in_span(&spec, &cfg.with_seed(cfg.seed.wrapping_add(rounds.len() as u64)));
        let witness = outcome.witness().cloned();
        rounds.push(outcome);
        let Some(w) = witness else { break };
        let enlarged = current.matrix().with_row(&w)?;
        match PartialHadamard::new(enlarged, &tol) {
            Ok(next) => current = next,
            Err(Error::NotPartialHadamard(rep)) => {
                rejected = Some(*rep);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ExtensionResult { added: current.rows() - h.rows(), matrix: current, rounds, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{example5_b, fourier, prop2_beta_basis, prop2_matrix};
    use crate::numerics::ONE;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn quick(starts: usize) -> SolverConfig {
        SolverConfig { starts, ..SolverConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { starts: 0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { tol_success: 1e-2, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { grid_order: 1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn subspace_rejects_bad_bases() {
        assert!(SubspaceSpec::new(vec![], &tol()).is_err());
        let e = ComplexVector::unit(2, 0);
        assert!(matches!(SubspaceSpec::new(vec![e.clone(), e], &tol()), Err(Error::Precondition(_))));
    }

    #[test]
    fn full_space_is_feasible() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b1 = ComplexVector::from_real(&[h, h]).unwrap();
        let b2 = ComplexVector::from_real(&[h, -h]).unwrap();
        let s = SubspaceSpec::new(vec![b1, b2], &tol()).unwrap();
        let out = find_unimodular_in_span(&s, &quick(4));
        assert!(out.is_found());
        assert_eq!(out.starts_used, 4);
        let w = out.witness().unwrap();
        assert!(w.unimodular_deviation() < 1e-12);
        assert!(w[0].im.abs() < 1e-12 && w[0].re > 0.0);
    }

    #[test]
    fn missing_fourier_row_is_found() {
        let f = fourier(6).unwrap();
        let head = f.without_row(5).unwrap().without_row(4).unwrap();
        let s = SubspaceSpec::complement_of(&head, &tol()).unwrap();
        let out = find_unimodular_in_span(&s, &quick(64));
        assert!(out.is_found());
        assert!(out.residual < 1e-12);
        let k = out.coefficients.as_ref().unwrap();
        assert!(s.reconstruct(k).max_abs_diff(out.witness().unwrap()) < 1e-12);
    }

    #[test]
    fn example5_b_complement_has_no_witness() {
        let s = SubspaceSpec::complement_of(&example5_b().unwrap(), &tol()).unwrap();
        assert_eq!(s.dim(), 2);
        let out = find_unimodular_in_span(&s, &quick(64));
        assert!(!out.is_found());
        assert!(out.residual > SolverConfig::default().tol_evidence);
    }

    #[test]
    fn same_seed_same_answer() {
        let s = SubspaceSpec::complement_of(&prop2_matrix(1).unwrap(), &tol()).unwrap();
        let a = find_unimodular_in_span(&s, &SolverConfig { seed: 7, ..quick(8) });
        let b = find_unimodular_in_span(&s, &SolverConfig { seed: 7, ..quick(8) });
        assert_eq!(a.vector, b.vector);
        assert_eq!(a.residual, b.residual);
    }

    #[test]
    fn trajectory_distance_never_increases() {
        for inst in [example5_b().unwrap(), prop2_matrix(2).unwrap()] {
            let s = SubspaceSpec::complement_of(&inst, &tol()).unwrap();
            for start in 0..5 {
                let log = trace_trajectory(&s, &quick(1), start);
                for w in log.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "{} then {}", w[0], w[1]);
                }
            }
        }
    }

    #[test]
    fn grid_finds_on_grid_fourier_row() {
        let f = fourier(4).unwrap();
        let head = f.without_row(3).unwrap();
        let s = SubspaceSpec::complement_of(&head, &tol()).unwrap();
        let out = grid_oracle(&s, 4).unwrap();
        assert!(out.is_found());
        assert!(out.residual < 1e-12);
        let expect = f.row(3);
        assert!(out.vector.unwrap().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn grid_rejects_non_unimodular_line() {
        let v = ComplexVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let s = SubspaceSpec::new(vec![v], &tol()).unwrap();
        let out = grid_oracle(&s, 12).unwrap();
        assert!(!out.is_found());
        assert!((out.residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_budget() {
        let s = SubspaceSpec::complement_of(&prop2_matrix(2).unwrap(), &tol()).unwrap();
        match grid_oracle(&s, 24) {
            Err(Error::Budget { required, .. }) => assert_eq!(required, 24u128.pow(8)),
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(matches!(grid_oracle(&s, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn constraints_for_block_family() {
        for n in 1..=3 {
            let s = SubspaceSpec::new(prop2_beta_basis(n).unwrap(), &tol()).unwrap();
            let cs = magnitude_constraint_reduce(&s);
            let forced = ((4 * n + 1) as f64 / (2 * n + 1) as f64).sqrt();
            let mut moduli: Vec<usize> = cs
                .iter()
                .filter_map(|c| match c {
                    ForcedConstraint::Modulus { index, modulus, .. } => {
                        assert!((modulus - forced).abs() < 1e-10);
                        Some(*index)
                    }
                    _ => None,
                })
                .collect();
            moduli.sort();
            assert_eq!(moduli, (2..=2 * n).collect::<Vec<_>>());
            assert!(cs.iter().any(|c| matches!(
                c,
                ForcedConstraint::OrthogonalCoupling { first: 0, second: 1, .. }
            )));
            let all = forced_moduli(&s, &cs).unwrap();
            assert!(all.iter().all(|m| (m - forced).abs() < 1e-10), "{all:?}");
        }
    }

    #[test]
    fn no_structure_no_constraints() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SubspaceSpec::new(
            vec![ComplexVector::from_real(&[h, h]).unwrap(), ComplexVector::from_real(&[h, -h]).unwrap()],
            &tol(),
        )
        .unwrap();
        // both coordinates carry both vectors with a sign-flipped ratio
        assert_eq!(magnitude_constraint_reduce(&s).len(), 1);
        let comp = SubspaceSpec::complement_of(&example5_b().unwrap(), &tol()).unwrap();
        let (b0, b1) = (&comp.basis()[0], &comp.basis()[1]);
        let mix = |a: C64, b: C64| {
            ComplexVector::new(b0.iter().zip(b1.iter()).map(|(x, y)| a * x + b * y).collect()).unwrap()
        };
        let c = C64::new(0.6, 0.0);
        let sn = C64::new(0.0, 0.8);
        let dense = SubspaceSpec::new(vec![mix(c, sn), mix(sn, c)], &tol()).unwrap();
        assert!(dense.basis().iter().all(|b| b.iter().all(|z| z.norm() > 1e-3)));
        assert!(magnitude_constraint_reduce(&dense).is_empty());
    }

    #[test]
    fn quadratics_are_inconsistent() {
        let c = example7_quadratic_certificate();
        assert_eq!(c.first_discriminant, -1.0);
        assert_eq!(c.second_discriminant, 8.0);
        assert!(!c.common_real_root);
        let shared = quadratic_inconsistency([1.0, -3.0, 2.0], [1.0, -1.0, 0.0]);
        assert!(shared.common_real_root);
    }

    #[test]
    fn unitary_in_full_weyl_span() {
        let basis: Vec<ComplexMatrix> =
            crate::weyl::weyl_family(3).unwrap().into_iter().map(|(_, m)| m).collect();
        let out = nearest_unitary_in_span(&basis, &quick(2)).unwrap();
        assert!(out.is_found());
    }

    #[test]
    fn no_unitary_with_zero_corner() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(1, 1)] = C64::new(2f64.sqrt(), 0.0);
        let out = nearest_unitary_in_span(&[m], &quick(8)).unwrap();
        assert!(!out.is_found());
        assert!(out.residual > 0.1);
    }

    #[test]
    fn matrix_basis_must_be_orthonormal() {
        let i2 = ComplexMatrix::identity(2);
        assert!(matches!(nearest_unitary_in_span(&[i2.clone(), i2], &quick(1)), Err(Error::Precondition(_))));
        assert!(nearest_unitary_in_span(&[], &quick(1)).is_err());
    }

    #[test]
    fn greedy_completes_fourier() {
        let f = fourier(5).unwrap();
        let head = f.without_row(4).unwrap().without_row(3).unwrap();
        let ext = greedy_unimodular_extension(&head, &quick(64)).unwrap();
        assert!(ext.matrix.is_complete());
        assert_eq!(ext.added, 2);
    }

    #[test]
    fn greedy_stalls_on_d5_block() {
        let ext = greedy_unimodular_extension(&prop2_matrix(1).unwrap(), &quick(64)).unwrap();
        assert_eq!(ext.matrix.rows(), 3);
        assert!(ext.stalled());
        assert!(ext.rounds.last().is_some_and(|o| !o.is_found()));
        let _ = ONE;
    }
}
