//! Unextendible maximally entangled bases as sets of unitaries.
//!
//! A maximally entangled state of `C^d ⊗ C^d` is `(I ⊗ U) Σ_i |i⟩|i⟩ / √d`
//! for a unitary `U`, and two such states are orthogonal exactly when
//! `Tr(U_a† U_b) = 0`. A set of `n < d²` unitaries with `Tr(U_a† U_b) = d δ_ab`
//! is unextendible when no unitary is trace-orthogonal to all of them.
//!
//! The special sets handled here are `S_0 ∪ S(A)`: the off-diagonal Weyl
//! family plus the diagonal unitaries built from the rows of a partial
//! Hadamard matrix `A`. Since the complement of `S_0` is the diagonal
//! matrices, the set is unextendible iff the complement of `A`'s rows holds
//! no unimodular vector.

use std::fmt;

use crate::error::{Error, Result};
use crate::feasibility::{
    find_unimodular_in_span, grid_oracle, magnitude_constraint_reduce, FeasibilityOutcome, ForcedConstraint,
    SolverConfig, SubspaceSpec,
};
use crate::hadamard::{example5_b, example7_a, PartialHadamard};
use crate::numerics::{complement_basis, is_unitary, trace_inner, ComplexMatrix, ComplexVector, Tolerances, C64};
use crate::weyl::s0_family;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberLabel {
    Weyl { m: usize, n: usize },
    /// Diagonal unitary carrying row `row` of the partial Hadamard matrix.
    DiagRow { row: usize },
    External,
}

impl fmt::Display for MemberLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemberLabel::Weyl { m, n } => write!(f, "weyl({m},{n})"),
            MemberLabel::DiagRow { row } => write!(f, "diag-row({row})"),
            MemberLabel::External => write!(f, "external"),
        }
    }
}

/// A finite set of `d x d` matrices standing for maximally entangled states.
/// Construction only checks shapes; [`verify_meb_conditions`] checks the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryBasisSet {
    d: usize,
    members: Vec<ComplexMatrix>,
    labels: Vec<MemberLabel>,
}

impl UnitaryBasisSet {
    pub fn new(d: usize, members: Vec<ComplexMatrix>, labels: Vec<MemberLabel>) -> Result<Self> {
        if d < 1 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if members.len() != labels.len() {
            return Err(Error::Shape(format!("{} members but {} labels", members.len(), labels.len())));
        }
        if let Some(i) = members.iter().position(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::Dimension(format!(
                "member {i} is {}x{}, expected {d}x{d}",
                members[i].rows(),
                members[i].cols()
            )));
        }
        Ok(UnitaryBasisSet { d, members, labels })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    pub fn labels(&self) -> &[MemberLabel] {
        &self.labels
    }

    /// `d² - |members|`.
    pub fn deficiency(&self) -> usize {
        (self.d * self.d).saturating_sub(self.len())
    }
}

/// `diag(α_s)` for every row `α_s` of `h`.
pub fn diag_set(h: &PartialHadamard) -> Vec<ComplexMatrix> {
    (0..h.rows()).map(|s| ComplexMatrix::diagonal(h.matrix().row(s))).collect()
}

/// `S_0 ∪ S(h)`: the `d(d-1)` Weyl members in lexicographic order followed
/// by one diagonal member per row of `h`.
pub fn special_umeb(h: &PartialHadamard) -> Result<UnitaryBasisSet> {
    let d = h.d();
    if h.rows() >= d {
        return Err(Error::Shape(format!(
            "a {}x{d} matrix would give {} members, not fewer than d² = {}",
            h.rows(),
            d * (d - 1) + h.rows(),
            d * d
        )));
    }
    let mut members = Vec::with_capacity(d * (d - 1) + h.rows());
    let mut labels = Vec::with_capacity(members.capacity());
    for (idx, w) in s0_family(d)? {
        members.push(w);
        labels.push(MemberLabel::Weyl { m: idx.m(), n: idx.n() });
    }
    for (row, m) in diag_set(h).into_iter().enumerate() {
        members.push(m);
        labels.push(MemberLabel::DiagRow { row });
    }
    UnitaryBasisSet::new(d, members, labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MebReport {
    pub d: usize,
    pub member_count: usize,
    pub count_ok: bool,
    pub worst_unitarity: f64,
    pub unitary_ok: bool,
    /// Largest `|Tr(U_a U_b†) - d δ_ab|`.
    pub worst_gram: f64,
    pub worst_gram_pair: (usize, usize),
    pub gram_ok: bool,
}

impl MebReport {
    pub fn passes(&self) -> bool {
        self.count_ok && self.unitary_ok && self.gram_ok
    }
}

/// Checks `n < d²`, unitarity of every member and `Tr(U_a† U_b) = d δ_ab`.
pub fn verify_meb_conditions(s: &UnitaryBasisSet, tol: &Tolerances) -> Result<MebReport> {
    let d = s.d;
    let mut worst_unitarity: f64 = 0.0;
    for m in &s.members {
        worst_unitarity = worst_unitarity.max(is_unitary(m, tol)?.max_deviation);
    }
    let mut worst_gram: f64 = 0.0;
    let mut worst_pair = (0, 0);
    for (a, ua) in s.members.iter().enumerate() {
        for (b, ub) in s.members.iter().enumerate().skip(a) {
            let target = if a == b { d as f64 } else { 0.0 };
            let dev = (trace_inner(ua, ub)? - C64::new(target, 0.0)).norm();
            if dev > worst_gram {
                worst_gram = dev;
                worst_pair = (a, b);
            }
        }
    }
    Ok(MebReport {
        d,
        member_count: s.len(),
        count_ok: s.len() < d * d,
        worst_unitarity,
        unitary_ok: worst_unitarity <= tol.eps_unitary,
        worst_gram,
        worst_gram_pair: worst_pair,
        gram_ok: worst_gram <= tol.eps_orth,
    })
}

/// How much weight an unextendibility verdict can bear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceTier {
    /// A closed-form certificate backs the claim.
    Algebraic,
    /// Only failed searches back the claim.
    Heuristic,
}

impl fmt::Display for EvidenceTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvidenceTier::Algebraic => "algebraic",
            EvidenceTier::Heuristic => "heuristic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnextendibilityVerdict {
    /// A unimodular vector orthogonal to every row exists; it becomes a new
    /// diagonal member.
    Extendible { witness: ComplexVector },
    /// Every search came back empty.
    UmebCertified { tier: EvidenceTier },
    /// The solver found nothing but the grid oracle saw a candidate within
    /// its resolution.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct UnextendibilityReport {
    pub verdict: UnextendibilityVerdict,
    pub complement_dim: usize,
    pub solver: FeasibilityOutcome,
    /// `None` when the enumeration budget was exceeded.
    pub oracle: Option<FeasibilityOutcome>,
    pub oracle_skipped_reason: Option<String>,
    pub constraints: Vec<ForcedConstraint>,
}

/// Searches the complement of `h`'s rows for a unimodular vector with the
/// solver and, within budget, the grid oracle of order `cfg.grid_order`.
pub fn verify_unextendible_special(h: &PartialHadamard, cfg: &SolverConfig) -> Result<UnextendibilityReport> {
    cfg.validate()?;
    let tol = Tolerances::default();
    if h.is_complete() {
        return Err(Error::Shape("a complete Hadamard matrix has an empty complement".into()));
    }
    let spec = SubspaceSpec::complement_of(h, &tol)?;
    let constraints = magnitude_constraint_reduce(&spec);
    let solver = find_unimodular_in_span(&spec, cfg);
    let (oracle, oracle_skipped_reason) = match grid_oracle(&spec, cfg.grid_order) {
        Ok(o) => (Some(o), None),
        Err(Error::Budget { required, limit }) => {
            (None, Some(format!("grid of {required} candidates exceeds budget {limit}")))
        }
        Err(e) => return Err(e),
    };

    let verdict = if let Some(w) = solver.witness() {
        UnextendibilityVerdict::Extendible { witness: w.clone() }
    } else if oracle.as_ref().is_some_and(|o| o.is_found()) {
        UnextendibilityVerdict::Inconclusive
    } else {
        UnextendibilityVerdict::UmebCertified { tier: EvidenceTier::Heuristic }
    };
    Ok(UnextendibilityReport {
        verdict,
        complement_dim: spec.dim(),
        solver,
        oracle,
        oracle_skipped_reason,
        constraints,
    })
}

/// Amplitudes of `(I ⊗ u) Σ_i |i⟩|i⟩ / √d`; entry `i·d + j` is `u[j][i] / √d`.
pub fn state_vector(u: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexVector> {
    let rep = is_unitary(u, tol)?;
    if !rep.unitary {
        return Err(Error::Precondition(format!("matrix is not unitary (deviation {:.3e})", rep.max_deviation)));
    }
    let d = u.rows();
    let s = 1.0 / (d as f64).sqrt();
    let mut amps = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            amps.push(u[(j, i)] * s);
        }
    }
    ComplexVector::new(amps)
}

/// Orthonormal basis (under `Tr(AB†)/d`) of the matrices trace-orthogonal to
/// every member of `s`. A unitary in this span would extend the set.
pub fn complement_span(s: &UnitaryBasisSet) -> Result<Vec<ComplexMatrix>> {
    let d = s.d;
    let rows: Vec<ComplexVector> = s.members.iter().map(|m| m.to_vector()).collect();
    let rows = ComplexMatrix::from_row_vectors(&rows)?;
    let scale = C64::new((d as f64).sqrt(), 0.0);
    complement_basis(&rows, Tolerances::default().eps_orth)?
        .iter()
        .map(|v| ComplexMatrix::from_vector(d, d, &v.scaled(scale)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceStatus {
    Exists,
    NotExists,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceRoute {
    D2Impossible,
    KnownSmall,
    DivisibleBy3,
    DivisibleBy4,
    /// Smallest divisor `m > 1` with `m ≡ 1 (mod 4)`.
    Divisor4nPlus1(u64),
    Dimension7Example,
    DivisibleBy7,
    None,
}

impl fmt::Display for ExistenceRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExistenceRoute::D2Impossible => write!(f, "d2-impossible"),
            ExistenceRoute::KnownSmall => write!(f, "known-small"),
            ExistenceRoute::DivisibleBy3 => write!(f, "divisible-by-3"),
            ExistenceRoute::DivisibleBy4 => write!(f, "divisible-by-4"),
            ExistenceRoute::Divisor4nPlus1(m) => write!(f, "divisor-4n+1({m})"),
            ExistenceRoute::Dimension7Example => write!(f, "dimension-7-example"),
            ExistenceRoute::DivisibleBy7 => write!(f, "divisible-by-7"),
            ExistenceRoute::None => write!(f, "none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExistenceVerdict {
    pub d: u64,
    pub status: ExistenceStatus,
    pub route: ExistenceRoute,
}

/// Existence of a UMEB in `C^d ⊗ C^d` by the first applicable route:
/// known small cases, multiples of 4, a divisor `≡ 1 (mod 4)`, multiples of
/// 3, the explicit `d = 7` instance, multiples of 7. Everything left is
/// `p` or `2p` with `p ≡ 3 (mod 4)` prime, `p >= 11`.
pub fn classify_dimension(d: u64) -> Result<ExistenceVerdict> {
    use ExistenceRoute::*;
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
    }
    let (status, route) = if d == 2 {
        (ExistenceStatus::NotExists, D2Impossible)
    } else if d == 3 || d == 4 {
        (ExistenceStatus::Exists, KnownSmall)
    } else if d % 4 == 0 {
        (ExistenceStatus::Exists, DivisibleBy4)
    } else if let Some(m) = (2..=d).find(|m| m % 4 == 1 && d % m == 0) {
        (ExistenceStatus::Exists, Divisor4nPlus1(m))
    } else if d % 3 == 0 {
        (ExistenceStatus::Exists, DivisibleBy3)
    } else if d == 7 {
        (ExistenceStatus::Exists, Dimension7Example)
    } else if d % 7 == 0 {
        (ExistenceStatus::Exists, DivisibleBy7)
    } else {
        (ExistenceStatus::Unknown, None)
    };
    Ok(ExistenceVerdict { d, status, route })
}

/// Which deficiency rule to apply when lifting from `d` to `qd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftFormula {
    /// Deficiency preserved: `(qd)² - (d² - N)`.
    LemmaStatement,
    /// Deficiency scaled by `q`: `(qd)² - q (d² - N)`.
    DiscussionParagraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftCount {
    pub members: u64,
    pub deficiency: u64,
    pub formula: LiftFormula,
}

pub fn lift_count(d: u64, n_members: u64, q: u64, formula: LiftFormula) -> Result<LiftCount> {
    if q < 1 {
        return Err(Error::Domain("lift factor q must be at least 1".into()));
    }
    if n_members >= d * d {
        return Err(Error::Domain(format!("{n_members} members is not fewer than d² = {}", d * d)));
    }
    let base = d * d - n_members;
    let deficiency = match formula {
        LiftFormula::LemmaStatement => base,
        LiftFormula::DiscussionParagraph => q * base,
    };
    let side = q * d;
    Ok(LiftCount { members: side * side - deficiency, deficiency, formula })
}

/// The 23-member set in `d = 5`.
pub fn umeb5() -> Result<UnitaryBasisSet> {
    special_umeb(&example5_b()?)
}

/// The 45-member set in `d = 7`. Its Gram conditions hold; note that the
/// complement of the underlying `3 x 7` rows does contain unimodular
/// vectors, so [`verify_unextendible_special`] reports it as extendible.
pub fn umeb7() -> Result<UnitaryBasisSet> {
    special_umeb(&example7_a()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{fourier, prop2_matrix};
    use crate::numerics::{hermitian_dot, ONE};
    use crate::weyl::{weyl, WeylIndex};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn diag_set_examples() {
        let h = fourier(2).unwrap();
        let ds = diag_set(&h);
        assert_eq!(ds[0], ComplexMatrix::identity(2));
        assert_eq!(ds[1], ComplexMatrix::diagonal(&[ONE, C64::new(-1.0, 0.0)]));

        let b = example5_b().unwrap();
        let ds = diag_set(&b);
        assert_eq!(ds.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 5.0 } else { 0.0 };
                assert!((trace_inner(&ds[i], &ds[j]).unwrap() - C64::new(expect, 0.0)).norm() < 1e-9);
            }
            for m in 1..5 {
                for n in 0..5 {
                    let w = weyl(WeylIndex::new(m, n, 5).unwrap());
                    assert!(trace_inner(&ds[i], &w).unwrap().norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn special_umeb_sizes() {
        assert_eq!(special_umeb(&example5_b().unwrap()).unwrap().len(), 23);
        assert_eq!(special_umeb(&example7_a().unwrap()).unwrap().len(), 45);
        let s = special_umeb(&prop2_matrix(1).unwrap()).unwrap();
        assert_eq!(s.len(), 22);
        assert_eq!(s.labels()[20], MemberLabel::DiagRow { row: 0 });
        assert_eq!(s.labels()[0], MemberLabel::Weyl { m: 1, n: 0 });
        assert!(matches!(special_umeb(&fourier(3).unwrap()), Err(Error::Shape(_))));
    }

    #[test]
    fn meb_condition_examples() {
        assert!(verify_meb_conditions(&umeb5().unwrap(), &tol()).unwrap().passes());

        let fam: Vec<_> = s0_family(3).unwrap();
        let labels = fam.iter().map(|(i, _)| MemberLabel::Weyl { m: i.m(), n: i.n() }).collect();
        let set = UnitaryBasisSet::new(3, fam.into_iter().map(|(_, m)| m).collect(), labels).unwrap();
        let rep = verify_meb_conditions(&set, &tol()).unwrap();
        assert!(rep.passes());
        assert_eq!(rep.member_count, 6);

        let i3 = ComplexMatrix::identity(3);
        let dup = UnitaryBasisSet::new(3, vec![i3.clone(), i3], vec![MemberLabel::External; 2]).unwrap();
        let rep = verify_meb_conditions(&dup, &tol()).unwrap();
        assert!(!rep.passes());
        assert!((rep.worst_gram - 3.0).abs() < 1e-12);
        assert_eq!(rep.worst_gram_pair, (0, 1));
    }

    #[test]
    fn set_construction_checks_shapes() {
        assert!(UnitaryBasisSet::new(2, vec![ComplexMatrix::identity(3)], vec![MemberLabel::External]).is_err());
        assert!(UnitaryBasisSet::new(2, vec![ComplexMatrix::identity(2)], vec![]).is_err());
    }

    #[test]
    fn state_vector_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = state_vector(&ComplexMatrix::identity(2), &tol()).unwrap();
        let expect = ComplexVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        assert!(bell.max_abs_diff(&expect) < 1e-15);
        let z = crate::weyl::clock_matrix(2).unwrap();
        let expect = ComplexVector::from_real(&[h, 0.0, 0.0, -h]).unwrap();
        assert!(state_vector(&z, &tol()).unwrap().max_abs_diff(&expect) < 1e-15);
        let x = crate::weyl::shift_matrix(3).unwrap();
        let a = state_vector(&x, &tol()).unwrap();
        let b = state_vector(&ComplexMatrix::identity(3), &tol()).unwrap();
        assert!(hermitian_dot(&a, &b).norm() < 1e-15);
        let bad = ComplexMatrix::diagonal(&[ONE, C64::new(2.0, 0.0)]);
        assert!(matches!(state_vector(&bad, &tol()), Err(Error::Precondition(_))));
    }

    #[test]
    fn classify_examples() {
        use ExistenceRoute::*;
        let v = |d| classify_dimension(d).unwrap();
        assert_eq!(v(2).status, ExistenceStatus::NotExists);
        assert_eq!(v(6).route, DivisibleBy3);
        assert_eq!(v(5).route, Divisor4nPlus1(5));
        assert_eq!(v(11).status, ExistenceStatus::Unknown);
        assert_eq!(v(21).route, Divisor4nPlus1(21));
        assert_eq!(v(105).route, Divisor4nPlus1(5));
        assert_eq!(v(7).route, Dimension7Example);
        assert_eq!(v(14).route, DivisibleBy7);
        assert_eq!(v(3).route, KnownSmall);
        assert_eq!(v(12).route, DivisibleBy4);
        assert!(classify_dimension(1).is_err());
    }

    #[test]
    fn lift_examples() {
        let disc = lift_count(3, 6, 35, LiftFormula::DiscussionParagraph).unwrap();
        assert_eq!((disc.members, disc.deficiency), (10920, 105));
        let lemma = lift_count(3, 6, 35, LiftFormula::LemmaStatement).unwrap();
        assert_eq!((lemma.members, lemma.deficiency), (11022, 3));
        for f in [LiftFormula::LemmaStatement, LiftFormula::DiscussionParagraph] {
            assert_eq!(lift_count(5, 23, 1, f).unwrap().members, 23);
        }
        assert!(lift_count(3, 9, 2, LiftFormula::LemmaStatement).is_err());
        assert!(lift_count(3, 6, 0, LiftFormula::LemmaStatement).is_err());
    }

    #[test]
    fn complement_span_of_special_set_is_diagonal() {
        let s = umeb5().unwrap();
        let comp = complement_span(&s).unwrap();
        assert_eq!(comp.len(), 2);
        for m in &comp {
            for r in 0..5 {
                for c in 0..5 {
                    if r != c {
                        assert!(m[(r, c)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn unextendible_verdicts() {
        let cfg = SolverConfig { starts: 64, ..SolverConfig::default() };
        let rep = verify_unextendible_special(&example5_b().unwrap(), &cfg).unwrap();
        assert_eq!(rep.verdict, UnextendibilityVerdict::UmebCertified { tier: EvidenceTier::Heuristic });
        assert!(rep.oracle.as_ref().is_some_and(|o| !o.is_found()));

        let f = fourier(5).unwrap();
        let head = f.without_row(4).unwrap();
        let rep = verify_unextendible_special(&head, &cfg).unwrap();
        match rep.verdict {
            UnextendibilityVerdict::Extendible { witness } => {
                let overlap = hermitian_dot(&f.row(4), &witness).norm();
                assert!((overlap - 5.0).abs() < 1e-9);
            }
            other => panic!("expected extendible, got {other:?}"),
        }
    }

    #[test]
    fn d7_instance_is_extendible() {
        // v = (1, ω, ω², a, b, -a, -b) with conj(a) + i conj(b) = -3/2
        let w = crate::numerics::root_of_unity(1, 3);
        let s7 = 7f64.sqrt();
        let a = C64::new(-0.75, -s7 / 4.0);
        let b = C64::new(-s7 / 4.0, -0.75);
        let v = ComplexVector::new(vec![ONE, w, w * w, a, b, -a, -b]).unwrap();
        assert!(v.unimodular_deviation() < 1e-15);
        let h = example7_a().unwrap();
        for r in h.matrix().row_vectors() {
            assert!(hermitian_dot(&r, &v).norm() < 1e-14);
        }
        let cfg = SolverConfig { starts: 64, grid_order: 8, ..SolverConfig::default() };
        let rep = verify_unextendible_special(&h, &cfg).unwrap();
        assert!(matches!(rep.verdict, UnextendibilityVerdict::Extendible { .. }));
    }
}
