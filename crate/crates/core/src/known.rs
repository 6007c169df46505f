//! Known-partner schemes: the rank test, layered synthesis, Reed–Solomon
//! threshold schemes and symbolic verification.
//!
//! For a minimal authorized pair `A = {T1, T2}` the matrix `M(A)` has one row
//! `z_{U1}` per pair `U = {U1, U2}` below some unauthorized pair with
//! `U1 ∪ U2 = T1 ∪ T2`, followed by the all-ones row; columns are the parties
//! of `T1 ∪ T2` in ascending order. `M̃(A)` appends `z_{T1}`. The structure
//! is realizable iff `rank M(A) < rank M̃(A)` for every minimal `A`.

use serde::Serialize;
use thiserror::Error;

use crate::access::{preceq, threshold_structure, AccessError, MonotonicityViolation, Pair, PairAccessStructure, PartySubset};
use crate::field::{next_prime_at_least, FieldError, FieldMatrix, PrimeField};
use crate::pauli::{pair_distillation_witness, PauliError, PauliString, QuditLayout, StabilizerGroup};
use crate::rscode::{build_rs, RsError};
use crate::scheme::{significant_share_checks, EssScheme, PairWitness, SchemeMode, ShareCheck};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KnownError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error("structure is not realizable: {0}")]
    Infeasible(Box<KnownCertificate>),
    #[error("{0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, KnownError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMatrices {
    pub pair: Pair,
    /// Parties indexing the columns.
    pub columns: Vec<usize>,
    /// The pairs contributing rows, in canonical order (the all-ones row follows them).
    pub rows: Vec<Pair>,
    pub m: FieldMatrix,
    pub m_tilde: FieldMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnownCertificate {
    NotMonotone(Vec<MonotonicityViolation>),
    RankEquality { pair: Pair, rank: usize, rank_tilde: usize, matrices: PairMatrices },
}

impl std::fmt::Display for KnownCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KnownCertificate::NotMonotone(v) => write!(
                f,
                "authorized pair {} lies below unauthorized pair {}",
                v[0].authorized, v[0].unauthorized
            ),
            KnownCertificate::RankEquality { pair, rank, rank_tilde, .. } => {
                write!(f, "rank M = rank M~ = {rank} (= {rank_tilde}) for minimal pair {}", pair.key())
            }
        }
    }
}

impl KnownCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            KnownCertificate::NotMonotone(v) => serde_json::json!({
                "verdict": "infeasible",
                "reason": "not_monotone",
                "violations": v,
            }),
            KnownCertificate::RankEquality { pair, rank, rank_tilde, matrices } => serde_json::json!({
                "verdict": "infeasible",
                "reason": "rank_equality",
                "pair": pair.key(),
                "rank": rank,
                "rank_tilde": rank_tilde,
                "columns": matrices.columns,
                "rows": matrices.rows.iter().map(|p| p.key()).collect::<Vec<_>>(),
                "m": matrices.m.to_rows(),
                "m_tilde": matrices.m_tilde.to_rows(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnownVerdict {
    /// One kernel vector per minimal pair, indexed like the matrix columns.
    Feasible { witnesses: Vec<(Pair, Vec<usize>, Vec<u32>)> },
    Infeasible(KnownCertificate),
}

impl KnownVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, KnownVerdict::Feasible { .. })
    }
}

fn restricted_indicator(t: PartySubset, columns: &[usize]) -> Vec<i64> {
    columns.iter().map(|&c| t.contains(c) as i64).collect()
}

/// `M(A)` and `M̃(A)` for a minimal authorized pair.
pub fn pair_matrices(a: Pair, s: &PairAccessStructure, field: PrimeField) -> Result<PairMatrices> {
    let union = a.union();
    let columns = union.to_vec();
    let rows: Vec<Pair> = s.unauthorized_down_closure().into_iter().filter(|u| u.union() == union).collect();
    let mut m_rows: Vec<Vec<i64>> = rows.iter().map(|u| restricted_indicator(u.first(), &columns)).collect();
    m_rows.push(vec![1; columns.len()]);
    let m = FieldMatrix::from_rows(field, &m_rows)?;
    m_rows.push(restricted_indicator(a.first(), &columns));
    let m_tilde = FieldMatrix::from_rows(field, &m_rows)?;
    Ok(PairMatrices { pair: a, columns, rows, m, m_tilde })
}

/// Decides realizability over F_p.
pub fn feasibility_known(s: &PairAccessStructure, p: u64) -> Result<KnownVerdict> {
    let field = PrimeField::new(p)?;
    let mut violations = Vec::new();
    for &u in s.unauthorized() {
        for &a in s.authorized() {
            if preceq(a, u) {
                violations.push(MonotonicityViolation { authorized: a.key(), unauthorized: u.key() });
            }
        }
    }
    if !violations.is_empty() {
        return Ok(KnownVerdict::Infeasible(KnownCertificate::NotMonotone(violations)));
    }
    let mut witnesses = Vec::new();
    for a in s.minimal_authorized() {
        let mats = pair_matrices(a, s, field)?;
        let (rank, rank_tilde) = (mats.m.rank(), mats.m_tilde.rank());
        if rank == rank_tilde {
            return Ok(KnownVerdict::Infeasible(KnownCertificate::RankEquality { pair: a, rank, rank_tilde, matrices: mats }));
        }
        let z_a: Vec<u32> = restricted_indicator(a.first(), &mats.columns).iter().map(|&v| v as u32).collect();
        let mut x = mats
            .m
            .kernel()
            .into_iter()
            .find(|k| field.dot(k, &z_a) != 0)
            .expect("rank gap guarantees a kernel vector off z_A");
        let inv = field.inv(field.dot(&x, &z_a))?;
        field.scale(&mut x, inv);
        witnesses.push((a, mats.columns, x));
    }
    Ok(KnownVerdict::Feasible { witnesses })
}

/// Canonically least minimal pair below `pair`.
fn delegate_for(pair: Pair, minimal: &[Pair]) -> Option<Pair> {
    minimal.iter().copied().filter(|&m| preceq(m, pair)).min()
}

fn attach_delegations(scheme: &mut EssScheme, s: &PairAccessStructure, minimal: &[Pair]) {
    for &a in s.authorized() {
        if scheme.witnesses.contains_key(&a) {
            continue;
        }
        if let Some(via) = delegate_for(a, minimal) {
            scheme.delegations.insert(a, via);
        }
    }
}

/// Layered construction: one block of qudits per minimal authorized pair,
/// stabilized by `Z^{⊗}` and `X^{x}` for the pair's kernel vector `x`.
pub fn synthesize_known(s: &PairAccessStructure, p: u64) -> Result<EssScheme> {
    let field = PrimeField::new(p)?;
    let witnesses = match feasibility_known(s, p)? {
        KnownVerdict::Feasible { witnesses } => witnesses,
        KnownVerdict::Infeasible(c) => return Err(KnownError::Infeasible(Box::new(c))),
    };
    let owners: Vec<usize> = witnesses.iter().flat_map(|(_, cols, _)| cols.iter().copied()).collect();
    let m = owners.len();
    let layout = QuditLayout::new(field, s.parties(), owners)?;
    let mut gens = Vec::new();
    let mut pair_witnesses = Vec::new();
    let mut offset = 0;
    for (a, cols, x) in &witnesses {
        let mut v = PauliString::identity(m);
        let mut w = PauliString::identity(m);
        for (j, &xj) in x.iter().enumerate() {
            v.z[offset + j] = 1;
            w.x[offset + j] = xj;
        }
        offset += cols.len();
        gens.push(v.clone());
        gens.push(w.clone());
        pair_witnesses.push((*a, PairWitness { t1: a.first(), v, w, phase: 1 }));
    }
    let group = StabilizerGroup::new(layout, gens)?;
    let mut scheme = EssScheme::new(SchemeMode::Known, group);
    let minimal: Vec<Pair> = pair_witnesses.iter().map(|(a, _)| *a).collect();
    scheme.witnesses.extend(pair_witnesses);
    attach_delegations(&mut scheme, s, &minimal);
    Ok(scheme)
}

/// Reed–Solomon scheme for the `(p, q)` threshold structure on `p + 2q − 1` parties.
///
/// Uses `k = 1`, `r = q − 1`, the smallest prime field with at least `n`
/// elements and evaluation points `0..n`. The state is the X-logical
/// eigenstate of the code.
pub fn threshold_rs_scheme(p: usize, q: usize) -> Result<(EssScheme, PairAccessStructure)> {
    if q == 0 || p < q {
        return Err(KnownError::Parameter(format!("threshold parameters need p >= q >= 1, got p = {p}, q = {q}")));
    }
    let n = p + 2 * q - 1;
    let prime = next_prime_at_least(n as u64);
    let code = build_rs(n, 1, q - 1, prime, None)?;
    let field = code.field();
    let group = code.x_eigenstate_group()?;
    let structure = threshold_structure(p, q, n)?;
    let r = code.r;
    let v = code.v();
    let mut scheme = EssScheme::new(SchemeMode::Known, group);
    let minimal = structure.minimal_authorized();
    for &pair in &minimal {
        let outside = pair.union().complement(n).to_vec();
        // X logical supported on the pair: b^T V[0..=r] vanishing outside, with b_r = 1.
        let rows: Vec<usize> = (0..=r).collect();
        let vt = v.select_rows(&rows).select_columns(&outside).transpose();
        let mut b = vt.kernel().into_iter().find(|k| k[r] != 0).expect("an X logical fits on the pair");
        let inv = field.inv(b[r])?;
        field.scale(&mut b, inv);
        let mut x_bar = vec![0u32; n];
        for (i, &bi) in b.iter().enumerate() {
            field.axpy(&mut x_bar, bi, v.row(i));
        }
        // Z logicals on each side, normalized against the X logical row.
        let z_side = |t: PartySubset| -> Result<Vec<u32>> {
            let cols = t.to_vec();
            let stab = v.select_rows(&(0..r).collect::<Vec<_>>()).select_columns(&cols);
            let logical = v.select_rows(&[r]).select_columns(&cols);
            let candidates = if r == 0 {
                FieldMatrix::identity(field, cols.len()).to_rows()
            } else {
                stab.kernel()
            };
            let mut qv = candidates
                .into_iter()
                .find(|k| field.dot(logical.row(0), k) != 0)
                .ok_or_else(|| KnownError::Parameter(format!("no Z logical on {t}")))?;
            let inv = field.inv(field.dot(logical.row(0), &qv))?;
            field.scale(&mut qv, inv);
            let mut full = vec![0u32; n];
            for (j, &c) in cols.iter().enumerate() {
                full[c] = qv[j];
            }
            Ok(full)
        };
        let z1 = z_side(pair.first())?;
        let z2 = z_side(pair.second())?;
        let z: Vec<u32> = z1.iter().zip(&z2).map(|(a, b)| field.sub(*a, *b)).collect();
        let w_op = PauliString::new(vec![0; n], z);
        let x_op = PauliString::new(x_bar, vec![0; n]);
        scheme.witnesses.insert(pair, PairWitness { t1: pair.first(), v: w_op, w: x_op, phase: 1 });
    }
    attach_delegations(&mut scheme, &structure, &minimal);
    Ok((scheme, structure))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub pair: String,
    pub witness_found: bool,
    /// Whether the witness recorded in the scheme checks out; `None` if none is recorded.
    pub recorded_witness_valid: Option<bool>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCheck {
    pub vertex: String,
    /// Largest number of pairwise-disjoint authorized partners.
    pub disjoint_partners: usize,
    /// Entropy of the vertex in units of `log p`.
    pub entropy: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnownReport {
    pub authorized: Vec<PairCheck>,
    pub unauthorized: Vec<PairCheck>,
    pub degree: Vec<DegreeCheck>,
    pub significant_shares: Vec<ShareCheck>,
    pub passed: bool,
}

/// Largest family of pairwise-disjoint sets among `sets`.
pub fn max_disjoint(sets: &[PartySubset]) -> usize {
    fn go(sets: &[PartySubset], used: PartySubset) -> usize {
        let Some((first, rest)) = sets.split_first() else { return 0 };
        let skip = go(rest, used);
        if first.is_disjoint(used) {
            skip.max(1 + go(rest, used.union(*first)))
        } else {
            skip
        }
    }
    go(sets, PartySubset::EMPTY)
}

/// Degree lower bound `S(T) ≥ t log p` for every vertex of the authorized graph.
pub fn degree_checks(group: &StabilizerGroup, s: &PairAccessStructure) -> Vec<DegreeCheck> {
    s.vertices()
        .into_iter()
        .map(|t| {
            let partners: Vec<PartySubset> = s.authorized().iter().filter_map(|p| p.partner_of(t)).collect();
            let t_count = max_disjoint(&partners);
            let entropy = group.entropy(t);
            DegreeCheck { vertex: t.key(), disjoint_partners: t_count, entropy, passed: entropy >= t_count }
        })
        .collect()
}

pub fn verify_known(scheme: &EssScheme, s: &PairAccessStructure) -> KnownReport {
    let g = &scheme.group;
    let check = |pair: Pair, want: bool| {
        let found = pair_distillation_witness(g, pair.first(), pair.second()).is_some();
        let recorded = scheme.witness_for(pair).map(|w| scheme.witness_is_valid(pair, w));
        let passed = found == want && (!want || recorded != Some(false));
        PairCheck { pair: pair.key(), witness_found: found, recorded_witness_valid: recorded, passed }
    };
    let authorized: Vec<PairCheck> = s.authorized().iter().map(|&p| check(p, true)).collect();
    let unauthorized: Vec<PairCheck> = s.unauthorized().iter().map(|&p| check(p, false)).collect();
    let degree = degree_checks(g, s);
    let significant_shares = significant_share_checks(scheme, s);
    let passed = authorized.iter().chain(&unauthorized).all(|c| c.passed)
        && degree.iter().all(|d| d.passed)
        && significant_shares.iter().all(|c| c.passed);
    KnownReport { authorized, unauthorized, degree, significant_shares, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::all_pairs;
    use proptest::prelude::*;

    fn counterexample() -> PairAccessStructure {
        PairAccessStructure::new(3, [Pair::of(&[0], &[1, 2])], [Pair::of(&[1], &[0, 2]), Pair::of(&[2], &[0, 1])]).unwrap()
    }

    #[test]
    fn rank_counterexample_matrices() {
        let s = counterexample();
        let f = PrimeField::new(2).unwrap();
        let mats = pair_matrices(Pair::of(&[0], &[1, 2]), &s, f).unwrap();
        let m = FieldMatrix::from_rows(f, &[[0, 1, 0], [0, 0, 1], [1, 1, 1]]).unwrap();
        let mt = FieldMatrix::from_rows(f, &[[0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 0, 0]]).unwrap();
        assert_eq!(mats.m, m);
        assert_eq!(mats.m_tilde, mt);
        for p in [2, 3, 5, 7] {
            match feasibility_known(&s, p).unwrap() {
                KnownVerdict::Infeasible(KnownCertificate::RankEquality { rank, rank_tilde, .. }) => {
                    assert_eq!((rank, rank_tilde), (3, 3));
                }
                other => panic!("expected rank equality, got {other:?}"),
            }
        }
    }

    #[test]
    fn single_pair_witness_vector() {
        let s = PairAccessStructure::new(2, [Pair::of(&[0], &[1])], []).unwrap();
        for p in [2u64, 3, 5, 7] {
            let KnownVerdict::Feasible { witnesses } = feasibility_known(&s, p).unwrap() else { panic!() };
            assert_eq!(witnesses[0].2, vec![1, p as u32 - 1]);
        }
    }

    #[test]
    fn not_monotone_detected() {
        let s = PairAccessStructure::new(3, [Pair::of(&[0], &[1])], [Pair::of(&[0, 2], &[1])]).unwrap();
        assert!(matches!(feasibility_known(&s, 2).unwrap(), KnownVerdict::Infeasible(KnownCertificate::NotMonotone(_))));
    }

    #[test]
    fn threshold_225_verifies() {
        let (scheme, s) = threshold_rs_scheme(2, 2).unwrap();
        assert_eq!(scheme.p(), 5);
        assert_eq!(scheme.group.qudits(), 5);
        assert!(scheme.group.is_pure());
        let report = verify_known(&scheme, &s);
        assert!(report.passed, "{report:?}");
        assert_eq!(report.authorized.iter().filter(|c| c.recorded_witness_valid == Some(true)).count(), s.authorized().len());
    }

    #[test]
    fn threshold_11_is_epr() {
        let (scheme, s) = threshold_rs_scheme(1, 1).unwrap();
        assert_eq!(scheme.p(), 2);
        assert_eq!(scheme.group.qudits(), 2);
        assert!(verify_known(&scheme, &s).passed);
    }

    #[test]
    fn threshold_schemes_verify() {
        for (p, q) in [(2, 1), (3, 1), (3, 2), (3, 3), (4, 2)] {
            let (scheme, s) = threshold_rs_scheme(p, q).unwrap();
            let report = verify_known(&scheme, &s);
            assert!(report.passed, "({p},{q}): {report:?}");
        }
        assert!(threshold_rs_scheme(1, 2).is_err());
    }

    #[test]
    fn max_disjoint_small() {
        let ps = |v: &[usize]| PartySubset::from_parties(v.iter().copied());
        assert_eq!(max_disjoint(&[ps(&[0, 1]), ps(&[1, 2]), ps(&[2, 3]), ps(&[3])]), 2);
        assert_eq!(max_disjoint(&[]), 0);
    }

    #[test]
    fn scheme_json_roundtrip() {
        let (scheme, _) = threshold_rs_scheme(2, 2).unwrap();
        let back = EssScheme::from_json_str(&scheme.to_json_string()).unwrap();
        assert_eq!(back.to_json_string(), scheme.to_json_string());
    }

    /// Brute-force realizability for tiny structures: any single layer must
    /// already separate `z_T1` from the span of the row constraints.
    fn brute_rank_gap(a: Pair, s: &PairAccessStructure, p: u64) -> bool {
        let f = PrimeField::new(p).unwrap();
        let mats = pair_matrices(a, s, f).unwrap();
        let cols = mats.columns.len();
        let pu = p as usize;
        // exists x with M x = 0 and z_A x != 0
        (0..pu.pow(cols as u32)).any(|code| {
            let mut c = code;
            let x: Vec<u32> = (0..cols)
                .map(|_| {
                    let d = (c % pu) as u32;
                    c /= pu;
                    d
                })
                .collect();
            let mx = mats.m.mul_vec(&x).unwrap();
            let last = mats.m_tilde.rows() - 1;
            mx.iter().all(|&v| v == 0) && f.dot(mats.m_tilde.row(last), &x) != 0
        })
    }

    fn up_set_structure(n: usize) -> impl Strategy<Value = PairAccessStructure> {
        let pairs = all_pairs(n);
        prop::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            let seeds: Vec<Pair> = pairs.iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| *p).take(3).collect();
            let auth: Vec<Pair> = pairs.iter().copied().filter(|&y| seeds.iter().any(|&x| preceq(x, y))).collect();
            let unauth: Vec<Pair> = pairs.iter().copied().filter(|p| !auth.contains(p)).collect();
            PairAccessStructure::new(n, auth, unauth).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn feasible_iff_rank_gap_and_synthesis_verifies(s in up_set_structure(4), p in prop::sample::select(vec![2u64, 3])) {
            let verdict = feasibility_known(&s, p).unwrap();
            let brute = s.minimal_authorized().iter().all(|&a| brute_rank_gap(a, &s, p));
            prop_assert_eq!(verdict.is_feasible(), brute);
            if verdict.is_feasible() {
                let scheme = synthesize_known(&s, p).unwrap();
                let report = verify_known(&scheme, &s);
                prop_assert!(report.passed, "{:?}", report);
            }
        }
    }
}
