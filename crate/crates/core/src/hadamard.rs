//! Partial Hadamard matrices: `k x d` matrices with unimodular entries and
//! `H H† = d I_k`.
//!
//! Besides the verifier this module carries the explicit families used to
//! build unextendible bases: the Fourier matrix, the `2n x (4n+1)` block
//! family with its structured complement basis, the `d = 5` and `d = 7`
//! instances, the one-row completion of a `(d-1) x d` matrix, and the parity
//! certificate that blocks completion of the block family.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    complement_basis, complement_basis_seeded, hermitian_dot, orthonormality_defect, root_of_unity, ComplexMatrix,
    ComplexVector, Tolerances, C64, I, ONE, ZERO,
};

/// Outcome of checking both defining clauses of a partial Hadamard matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialHadamardReport {
    pub rows: usize,
    pub cols: usize,
    pub max_modulus_deviation: f64,
    pub worst_modulus_entry: (usize, usize),
    pub max_gram_deviation: f64,
    pub worst_gram_entry: (usize, usize),
    pub unimodular: bool,
    pub orthogonal: bool,
}

impl PartialHadamardReport {
    pub fn accepted(&self) -> bool {
        self.unimodular && self.orthogonal
    }
}

/// Checks unimodularity first, then `H H† = d I`; both clauses are always
/// evaluated and reported.
pub fn verify_partial(mat: &ComplexMatrix, tol: &Tolerances) -> Result<PartialHadamardReport> {
    let (k, d) = (mat.rows(), mat.cols());
    if k > d {
        return Err(Error::Shape(format!("{k} rows exceed {d} columns")));
    }
    if k == 0 {
        return Err(Error::Shape("partial Hadamard matrix needs at least one row".into()));
    }

    let mut max_mod = 0.0;
    let mut worst_mod = (0, 0);
    for r in 0..k {
        for c in 0..d {
            let dev = (mat[(r, c)].norm() - 1.0).abs();
            if dev > max_mod {
                max_mod = dev;
                worst_mod = (r, c);
            }
        }
    }

    let gram = mat.gram();
    let mut max_gram = 0.0;
    let mut worst_gram = (0, 0);
    for r in 0..k {
        for c in 0..k {
            let target = if r == c { d as f64 } else { 0.0 };
            let dev = (gram[(r, c)] - C64::new(target, 0.0)).norm();
            if dev > max_gram {
                max_gram = dev;
                worst_gram = (r, c);
            }
        }
    }

    Ok(PartialHadamardReport {
        rows: k,
        cols: d,
        max_modulus_deviation: max_mod,
        worst_modulus_entry: worst_mod,
        max_gram_deviation: max_gram,
        worst_gram_entry: worst_gram,
        unimodular: max_mod <= tol.eps_unimodular,
        orthogonal: max_gram <= tol.eps_orth,
    })
}

/// A verified partial Hadamard matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialHadamard {
    mat: ComplexMatrix,
}

impl PartialHadamard {
    pub fn new(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let report = verify_partial(&mat, tol)?;
        if !report.accepted() {
            return Err(Error::NotPartialHadamard(Box::new(report)));
        }
        Ok(PartialHadamard { mat })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn rows(&self) -> usize {
        self.mat.rows()
    }

    /// Ambient dimension (number of columns).
    pub fn d(&self) -> usize {
        self.mat.cols()
    }

    pub fn is_complete(&self) -> bool {
        self.rows() == self.d()
    }

    pub fn row(&self, r: usize) -> ComplexVector {
        self.mat.row_vector(r)
    }

    /// Drops row `r`; `None` if that would leave no rows.
    pub fn without_row(&self, r: usize) -> Option<PartialHadamard> {
        (self.rows() > 1 && r < self.rows()).then(|| PartialHadamard { mat: self.mat.without_row(r) })
    }

    /// Orthonormal basis of the complement of the row span.
    pub fn complement(&self, tol: &Tolerances) -> Result<Vec<ComplexVector>> {
        complement_basis(&self.mat, tol.eps_orth)
    }
}

/// `F_d` with entries `ω_d^{rc}`.
pub fn fourier(d: usize) -> Result<PartialHadamard> {
    if d == 0 {
        return Err(Error::Domain("Fourier matrix needs d >= 1".into()));
    }
    let rows: Vec<Vec<C64>> = (0..d).map(|r| (0..d).map(|c| root_of_unity((r * c) as i64, d)).collect()).collect();
    PartialHadamard::new(ComplexMatrix::from_rows(&rows)?, &Tolerances::default())
}

/// The `2n x (4n+1)` matrix whose row `r` is `(ω^{rj})_{j<2n}` followed by
/// `(σ^{rj})_{j<=2n}`, with `ω = e^{2πi/2n}` and `σ = e^{2πi/(2n+1)}`.
pub fn prop2_matrix(n: usize) -> Result<PartialHadamard> {
    if n < 1 {
        return Err(Error::Domain("block family needs n >= 1".into()));
    }
    let (a, b) = (2 * n, 2 * n + 1);
    let rows: Vec<Vec<C64>> = (0..a)
        .map(|r| {
            (0..a)
                .map(|j| root_of_unity((r * j) as i64, a))
                .chain((0..b).map(|j| root_of_unity((r * j) as i64, b)))
                .collect()
        })
        .collect();
    PartialHadamard::new(ComplexMatrix::from_rows(&rows)?, &Tolerances::default())
}

/// Structured orthonormal basis `β_1 .. β_{2n+1}` of the complement of
/// [`prop2_matrix`]`(n)`.
///
/// `β_1 = (e_0 - e_{2n})/√2`, `β_2` puts `1` on the two unit columns and
/// `2σ^{-j}` on the remaining `σ` columns, and `β_3 ..` come from
/// orthogonalising `e_1 .. e_{2n-1}`. Each of the latter is the only basis
/// vector supported on its coordinate, with entry `√((2n+1)/(4n+1))`.
pub fn prop2_beta_basis(n: usize) -> Result<Vec<ComplexVector>> {
    let h = prop2_matrix(n)?;
    let d = 4 * n + 1;
    let b = 2 * n + 1;
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut beta1 = vec![ZERO; d];
    beta1[0] = C64::new(h2, 0.0);
    beta1[2 * n] = C64::new(-h2, 0.0);

    let s = 1.0 / ((8 * n + 2) as f64).sqrt();
    let mut beta2 = vec![ZERO; d];
    beta2[0] = C64::new(s, 0.0);
    beta2[2 * n] = C64::new(s, 0.0);
    for j in 1..b {
        beta2[2 * n + j] = root_of_unity(-(j as i64), b) * (2.0 * s);
    }

    let mut seeds = vec![ComplexVector::from_vec(beta1), ComplexVector::from_vec(beta2)];
    seeds.extend((1..2 * n).map(|i| ComplexVector::unit(d, i)));
    let basis = complement_basis_seeded(h.matrix(), &seeds, Tolerances::default().eps_orth)?;
    if basis.len() != b {
        return Err(Error::Rank { expected: b, found: basis.len() });
    }
    Ok(basis)
}

/// The three vectors spanning the complement of the `d = 5` block matrix,
/// evaluated from their closed forms.
pub fn example5_nu() -> [ComplexVector; 3] {
    let w = root_of_unity(1, 3);
    let w2 = root_of_unity(2, 3);
    let r = |x: f64| C64::new(x, 0.0);
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    let s10 = 10f64.sqrt();
    let s15 = 15f64.sqrt();
    [
        ComplexVector::from_vec(vec![r(h2), ZERO, r(-h2), ZERO, ZERO]),
        ComplexVector::from_vec(vec![r(1.0 / s10), ZERO, r(1.0 / s10), w2 * (2.0 / s10), w * (2.0 / s10)]),
        ComplexVector::from_vec(vec![ZERO, r((3.0f64 / 5.0).sqrt()), ZERO, (w - ONE) / s15, (w2 - ONE) / s15]),
    ]
}

/// `prop2_matrix(1)` extended by `α_3 = √(5/3) (ν_1 + i ν_2 + i ν_3)`.
pub fn example5_b() -> Result<PartialHadamard> {
    let a = prop2_matrix(1)?;
    let [nu1, nu2, nu3] = example5_nu();
    let scale = (5.0f64 / 3.0).sqrt();
    let alpha3: Vec<C64> = (0..5).map(|j| (nu1[j] + I * nu2[j] + I * nu3[j]) * scale).collect();
    PartialHadamard::new(a.matrix().with_row(&alpha3)?, &Tolerances::default())
}

/// The `3 x 7` matrix with rows `(1,...,1)`, `(1,ω,ω²,1,i,-1,-i)`,
/// `(1,ω²,ω,1,-1,1,-1)`, `ω = e^{2πi/3}`.
pub fn example7_a() -> Result<PartialHadamard> {
    let w = root_of_unity(1, 3);
    let w2 = root_of_unity(2, 3);
    let m = C64::new(-1.0, 0.0);
    let rows = vec![
        vec![ONE; 7],
        vec![ONE, w, w2, ONE, I, m, -I],
        vec![ONE, w2, w, ONE, m, ONE, m],
    ];
    PartialHadamard::new(ComplexMatrix::from_rows(&rows)?, &Tolerances::default())
}

/// The four complement vectors printed alongside the `d = 7` instance,
/// transcribed verbatim. Only used as a cross-check; see
/// [`check_printed_basis`].
pub fn example7_printed_beta() -> Vec<ComplexVector> {
    let w = root_of_unity(1, 3);
    let w2 = root_of_unity(2, 3);
    let r = |x: f64| C64::new(x, 0.0);
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    let s = 1.0 / 14f64.sqrt();
    vec![
        ComplexVector::from_vec(vec![r(h2), ZERO, ZERO, r(-h2), ZERO, ZERO, ZERO]),
        ComplexVector::from_vec(vec![r(s), ZERO, ZERO, r(s), -I * 2.0 * s, r(-2.0 * s), I * 2.0 * s]),
        ComplexVector::from_vec(vec![ZERO, w * 2.0 * s, w2 * 2.0 * s, ZERO, -I * s, r(2.0 * s), I * s]),
        ComplexVector::from_vec(vec![ZERO, r(2.0 * s), -w2 * 2.0 * s, ZERO, (w - ONE) * s, ZERO, (w - ONE) * s]),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrintedVectorCheck {
    pub index: usize,
    /// Largest `|⟨row, β⟩| / |row|` over the matrix rows.
    pub max_row_overlap: f64,
    pub norm_deviation: f64,
    /// Largest `|⟨β_j, β⟩|` over the earlier printed vectors.
    pub max_cross_overlap: f64,
    pub consistent: bool,
}

/// Compares externally supplied complement vectors against the rows they
/// are meant to complement. Mismatches beyond `threshold` are flagged, not
/// treated as errors.
pub fn check_printed_basis(h: &PartialHadamard, printed: &[ComplexVector], threshold: f64) -> Vec<PrintedVectorCheck> {
    let rows = h.matrix().row_vectors();
    printed
        .iter()
        .enumerate()
        .map(|(i, beta)| {
            let max_row_overlap =
                rows.iter().map(|r| hermitian_dot(r, beta).norm() / r.norm()).fold(0.0, f64::max);
            let norm_deviation = (beta.norm() - 1.0).abs();
            let max_cross_overlap =
                printed[..i].iter().map(|b| hermitian_dot(b, beta).norm()).fold(0.0, f64::max);
            PrintedVectorCheck {
                index: i,
                max_row_overlap,
                norm_deviation,
                max_cross_overlap,
                consistent: max_row_overlap <= threshold
                    && norm_deviation <= threshold
                    && max_cross_overlap <= threshold,
            }
        })
        .collect()
}

/// Appends the unique (up to phase) row completing a `(d-1) x d` partial
/// Hadamard matrix. The new row is `√d ν` for the unit vector `ν` spanning
/// the complement, rotated so its first entry is real and positive.
pub fn complete_last_row(h: &PartialHadamard) -> Result<PartialHadamard> {
    let tol = Tolerances::default();
    let d = h.d();
    let comp = h.complement(&tol)?;
    if comp.len() != 1 {
        return Err(Error::Rank { expected: 1, found: comp.len() });
    }
    let row = comp[0].scaled(C64::new((d as f64).sqrt(), 0.0)).gauge_fixed(0.5);
    let dev = row.unimodular_deviation();
    if dev > tol.eps_unimodular {
        return Err(Error::Consistency(format!(
            "completion row has modulus deviation {dev:.3e}; the input was not a partial Hadamard matrix"
        )));
    }
    PartialHadamard::new(h.matrix().with_row(&row)?, &tol)
}

/// One element of the Hadamard equivalence group: `H -> P_r D_r H D_c P_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceMoves {
    pub row_phases: Vec<C64>,
    pub col_phases: Vec<C64>,
    /// Output row `i` is input row `row_perm[i]`.
    pub row_perm: Vec<usize>,
    /// Output column `j` is input column `col_perm[j]`.
    pub col_perm: Vec<usize>,
}

impl EquivalenceMoves {
    pub fn identity(k: usize, d: usize) -> Self {
        EquivalenceMoves {
            row_phases: vec![ONE; k],
            col_phases: vec![ONE; d],
            row_perm: (0..k).collect(),
            col_perm: (0..d).collect(),
        }
    }

    pub fn random(k: usize, d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phase = |rng: &mut ChaCha8Rng| C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let row_phases = (0..k).map(|_| phase(&mut rng)).collect();
        let col_phases = (0..d).map(|_| phase(&mut rng)).collect();
        let mut row_perm: Vec<usize> = (0..k).collect();
        let mut col_perm: Vec<usize> = (0..d).collect();
        row_perm.shuffle(&mut rng);
        col_perm.shuffle(&mut rng);
        EquivalenceMoves { row_phases, col_phases, row_perm, col_perm }
    }
}

pub fn scramble_with(h: &PartialHadamard, moves: &EquivalenceMoves) -> Result<PartialHadamard> {
    let (k, d) = (h.rows(), h.d());
    if moves.row_phases.len() != k
        || moves.row_perm.len() != k
        || moves.col_phases.len() != d
        || moves.col_perm.len() != d
    {
        return Err(Error::Dimension(format!("equivalence moves do not fit a {k}x{d} matrix")));
    }
    let src = h.matrix();
    let mut out = ComplexMatrix::zeros(k, d);
    for i in 0..k {
        for j in 0..d {
            let (r, c) = (moves.row_perm[i], moves.col_perm[j]);
            out[(i, j)] = moves.row_phases[i] * src[(r, c)] * moves.col_phases[j];
        }
    }
    PartialHadamard::new(out, &Tolerances::default())
}

/// Random Hadamard-equivalent copy of `h`, deterministic in `seed`.
pub fn scramble(h: &PartialHadamard, seed: u64) -> PartialHadamard {
    scramble_with(h, &EquivalenceMoves::random(h.rows(), h.d(), seed))
        .expect("equivalence moves preserve both partial Hadamard clauses")
}

/// Evidence that the block family of size `n` cannot be completed: every
/// unimodular vector in its complement has coefficients of the forced
/// modulus with `k_1 = ±i k_2`, and an odd number (`2n+1`) of `±i` cannot sum
/// to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityCertificate {
    pub n: usize,
    /// `√((4n+1)/(2n+1))`.
    pub forced_modulus: f64,
    pub modulus_verified: bool,
    pub coupling_verified: bool,
    pub parity_rows: usize,
    pub solutions_checked: usize,
    pub max_modulus_deviation: f64,
    pub max_coupling_deviation: f64,
    pub warning: Option<String>,
}

impl ParityCertificate {
    pub fn is_valid(&self) -> bool {
        self.solutions_checked > 0 && self.modulus_verified && self.coupling_verified && self.parity_rows % 2 == 1
    }
}

pub const PARITY_TOLERANCE: f64 = 1e-6;

/// Checks coefficient vectors over [`prop2_beta_basis`]`(n)` for the forced
/// structure.
pub fn parity_certificate(n: usize, solutions: &[Vec<C64>]) -> Result<ParityCertificate> {
    if n < 1 {
        return Err(Error::Domain("block family needs n >= 1".into()));
    }
    let b = 2 * n + 1;
    let forced_modulus = ((4 * n + 1) as f64 / b as f64).sqrt();
    if let Some(s) = solutions.iter().find(|s| s.len() != b) {
        return Err(Error::Dimension(format!("solution has {} coefficients, expected {b}", s.len())));
    }

    let mut max_mod: f64 = 0.0;
    let mut max_coup: f64 = 0.0;
    for k in solutions {
        for z in k {
            max_mod = max_mod.max((z.norm() - forced_modulus).abs());
        }
        let ratio = k[0] / k[1];
        max_coup = max_coup.max((ratio - I).norm().min((ratio + I).norm()));
    }

    let empty = solutions.is_empty();
    Ok(ParityCertificate {
        n,
        forced_modulus,
        modulus_verified: !empty && max_mod <= PARITY_TOLERANCE,
        coupling_verified: !empty && max_coup <= PARITY_TOLERANCE,
        parity_rows: b,
        solutions_checked: solutions.len(),
        max_modulus_deviation: max_mod,
        max_coupling_deviation: max_coup,
        warning: empty.then(|| "no solutions supplied; certificate is vacuous".to_string()),
    })
}

/// Row orthonormality of a basis, exposed for report generation.
pub fn basis_defect(basis: &[ComplexVector]) -> f64 {
    orthonormality_defect(basis)
}
