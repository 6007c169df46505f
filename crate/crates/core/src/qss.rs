//! Qubit secret sharing for monotone no-cloning set structures.
//!
//! Each minimal authorized set `A` gets a logical pair `(X_A, Z_A)`; the
//! scheme is the state stabilized by `X_A X_ℓ` and `Z_A Z_ℓ`, where `ℓ` is a
//! reference qubit held by an extra party.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access::{all_subsets, AccessError, PartySubset, MAX_PARTIES};
use crate::field::{PrimeField, RowReducer};
use crate::pauli::{commutation_phase_masked, PauliError, PauliString, QuditLayout, StabilizerGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QssError {
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("invalid set access structure: {0}")]
    Invalid(String),
    #[error("invalid structure file: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, QssError>;

/// Authorized sets of a secret sharing scheme, stored explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetAccessStructure {
    n: usize,
    authorized: BTreeSet<PartySubset>,
}

#[derive(Serialize, Deserialize)]
struct SetStructureFile {
    parties: usize,
    authorized: Vec<Vec<usize>>,
}

impl SetAccessStructure {
    /// Stores `sets` as given, without closing them upward.
    pub fn new<I: IntoIterator<Item = PartySubset>>(n: usize, sets: I) -> Result<Self> {
        if n > MAX_PARTIES {
            return Err(AccessError::TooManyParties(n).into());
        }
        let full = PartySubset::full(n);
        let authorized: BTreeSet<PartySubset> = sets.into_iter().collect();
        if let Some(bad) = authorized.iter().find(|s| !s.is_subset_of(full)) {
            return Err(QssError::Invalid(format!("set {bad} mentions a party outside 0..{n}")));
        }
        Ok(SetAccessStructure { n, authorized })
    }

    /// Monotone closure of `sets`.
    pub fn from_minimal<I: IntoIterator<Item = PartySubset>>(n: usize, sets: I) -> Result<Self> {
        let base = Self::new(n, sets)?;
        let authorized = all_subsets(n)
            .into_iter()
            .filter(|s| base.authorized.iter().any(|a| a.is_subset_of(*s)))
            .collect();
        Ok(SetAccessStructure { n, authorized })
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn authorized(&self) -> &BTreeSet<PartySubset> {
        &self.authorized
    }

    pub fn is_authorized(&self, s: PartySubset) -> bool {
        self.authorized.contains(&s)
    }

    /// Authorized sets with no authorized proper subset, in canonical order.
    pub fn minimal_sets(&self) -> Vec<PartySubset> {
        self.authorized
            .iter()
            .copied()
            .filter(|&s| !self.authorized.iter().any(|&t| t != s && t.is_subset_of(s)))
            .collect()
    }

    /// Reads `{"parties": n, "authorized": [[...], ...]}`; the closure is taken.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SetStructureFile = serde_json::from_str(text).map_err(|e| QssError::Json(e.to_string()))?;
        let sets = file
            .authorized
            .iter()
            .map(|s| PartySubset::try_from_parties(s, file.parties))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::from_minimal(file.parties, sets)
    }

    /// Writes the minimal sets.
    pub fn to_json_string(&self) -> String {
        let file = SetStructureFile {
            parties: self.n,
            authorized: self.minimal_sets().into_iter().map(|s| s.to_vec()).collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityGap {
    pub authorized: String,
    pub missing: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisjointSets {
    pub first: String,
    pub second: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub monotonicity: Vec<MonotonicityGap>,
    pub no_cloning: Vec<DisjointSets>,
    pub empty: bool,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.monotonicity.is_empty() && self.no_cloning.is_empty() && !self.empty
    }
}

pub fn validate_structure(a: &SetAccessStructure) -> Validation {
    let mut v = Validation { empty: a.authorized.is_empty(), ..Validation::default() };
    for &s in &a.authorized {
        for i in 0..a.n {
            let t = s.with(i);
            if t != s && !a.is_authorized(t) {
                v.monotonicity.push(MonotonicityGap { authorized: s.to_string(), missing: t.to_string() });
            }
        }
    }
    let minimal = a.minimal_sets();
    for (i, &x) in minimal.iter().enumerate() {
        for &y in &minimal[i..] {
            if x.is_disjoint(y) {
                v.no_cloning.push(DisjointSets { first: x.to_string(), second: y.to_string() });
            }
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QssScheme {
    pub minimal_sets: Vec<PartySubset>,
    /// Layout over `n + 1` parties; the last party holds only the reference qubit.
    pub layout: QuditLayout,
    pub reference: usize,
    /// `(X_A, Z_A)` per minimal set, identity on the reference qubit.
    pub logicals: Vec<(PauliString, PauliString)>,
    /// Qubits allocated in the initialization step, per minimal set.
    pub init_qubits: Vec<Vec<usize>>,
    pub group: StabilizerGroup,
}

impl QssScheme {
    pub fn parties(&self) -> usize {
        self.layout.parties() - 1
    }

    pub fn qubits(&self) -> usize {
        self.layout.qudits()
    }
}

/// Runs initialization, the pairwise anticommutation step and the parity fix.
pub fn build_qss(a: &SetAccessStructure) -> Result<QssScheme> {
    let v = validate_structure(a);
    if !v.is_ok() {
        return Err(QssError::Invalid(serde_json::to_string(&v).expect("serializable")));
    }
    let minimal = a.minimal_sets();
    let k = minimal.len();
    let mut owners = Vec::new();
    // (owner, X-holders, Z-holders) per qubit, as indices into `minimal`.
    let mut x_of: Vec<Vec<usize>> = Vec::new();
    let mut z_of: Vec<Vec<usize>> = Vec::new();
    let mut init_qubits = vec![Vec::new(); k];
    for (i, set) in minimal.iter().enumerate() {
        for party in set.iter() {
            init_qubits[i].push(owners.len());
            owners.push(party);
            x_of.push(vec![i]);
            z_of.push(vec![i]);
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let s = minimal[i].intersection(minimal[j]).least().expect("no-cloning holds");
                owners.push(s);
                x_of.push(vec![i]);
                z_of.push(vec![j]);
            }
        }
    }
    for (i, set) in minimal.iter().enumerate() {
        if set.len() % 2 == 0 {
            owners.push(set.least().expect("nonempty"));
            x_of.push(vec![i]);
            z_of.push(vec![i]);
        }
    }
    let reference = owners.len();
    owners.push(a.n);
    let m = owners.len();
    let mut logicals = vec![(PauliString::identity(m), PauliString::identity(m)); k];
    for q in 0..reference {
        for &i in &x_of[q] {
            logicals[i].0.x[q] = 1;
        }
        for &i in &z_of[q] {
            logicals[i].1.z[q] = 1;
        }
    }
    let field = PrimeField::new(2).expect("2 is prime");
    let layout = QuditLayout::new(field, a.n + 1, owners)?;
    let mut gens = Vec::with_capacity(2 * k);
    for (x, z) in &logicals {
        let mut gx = x.clone();
        gx.x[reference] = 1;
        let mut gz = z.clone();
        gz.z[reference] = 1;
        gens.push(gx);
        gens.push(gz);
    }
    let group = StabilizerGroup::new(layout.clone(), gens)?;
    Ok(QssScheme { minimal_sets: minimal, layout, reference, logicals, init_qubits, group })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationFailure {
    pub first: String,
    pub second: String,
    pub relation: &'static str,
    pub expected: u32,
    pub found: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetCheck {
    pub set: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QssReport {
    pub relations_checked: usize,
    pub relation_failures: Vec<RelationFailure>,
    pub recovery: Vec<SetCheck>,
    pub security: Vec<SetCheck>,
    pub passed: bool,
}

/// Rank of the reference-qubit components of group elements supported on `region`.
pub fn reference_rank(q: &QssScheme, region: PartySubset) -> usize {
    let mut mask = q.layout.mask_of(region);
    mask[q.reference] = true;
    let field = q.group.field();
    let mut r = RowReducer::new(field, 2);
    for s in q.group.supported_subgroup_masked(&mask) {
        r.insert(&[s.x[q.reference], s.z[q.reference]]);
    }
    r.rank()
}

pub fn verify_qss(q: &QssScheme, a: &SetAccessStructure) -> QssReport {
    let f = q.group.field();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (i, (xi, zi)) in q.logicals.iter().enumerate() {
        for (j, (xj, zj)) in q.logicals.iter().enumerate() {
            let name = |k: usize| q.minimal_sets.get(k).map(|s| s.to_string()).unwrap_or_default();
            for (relation, found, expected) in [
                ("X-Z", commutation_phase_masked(f, xi, zj, None), 1),
                ("X-X", commutation_phase_masked(f, xi, xj, None), 0),
                ("Z-Z", commutation_phase_masked(f, zi, zj, None), 0),
            ] {
                checked += 1;
                if found != expected {
                    failures.push(RelationFailure { first: name(i), second: name(j), relation, expected, found });
                }
            }
        }
    }
    let mut recovery = Vec::new();
    let mut security = Vec::new();
    for s in all_subsets(a.parties()) {
        let rank = reference_rank(q, s);
        if a.is_authorized(s) {
            recovery.push(SetCheck { set: s.to_string(), passed: rank == 2 });
        } else {
            security.push(SetCheck { set: s.to_string(), passed: rank == 0 });
        }
    }
    let passed = failures.is_empty() && recovery.iter().chain(&security).all(|c| c.passed);
    QssReport { relations_checked: checked, relation_failures: failures, recovery, security, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(v: &[usize]) -> PartySubset {
        PartySubset::from_parties(v.iter().copied())
    }

    fn threshold23() -> SetAccessStructure {
        SetAccessStructure::from_minimal(3, [ps(&[0, 1]), ps(&[1, 2]), ps(&[0, 2])]).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_structure(&threshold23()).is_ok());
        let disjoint = SetAccessStructure::from_minimal(4, [ps(&[0, 1]), ps(&[2, 3])]).unwrap();
        assert_eq!(validate_structure(&disjoint).no_cloning.len(), 1);
        let gap = SetAccessStructure::new(2, [ps(&[0])]).unwrap();
        let v = validate_structure(&gap);
        assert_eq!(v.monotonicity, vec![MonotonicityGap { authorized: "{0}".into(), missing: "{0,1}".into() }]);
    }

    #[test]
    fn threshold23_counts_and_verifies() {
        let a = threshold23();
        let q = build_qss(&a).unwrap();
        assert_eq!(q.qubits(), 15 + 1);
        let report = verify_qss(&q, &a);
        assert!(report.passed, "{report:?}");
        assert_eq!(report.recovery.len(), 4);
        assert!(report.security.iter().all(|c| c.passed));
    }

    #[test]
    fn trivial_structure_is_epr_with_reference() {
        let a = SetAccessStructure::from_minimal(1, [ps(&[0])]).unwrap();
        let q = build_qss(&a).unwrap();
        assert_eq!(q.qubits(), 2);
        let gens: Vec<String> = q.group.generators().iter().map(|g| g.encode()).collect();
        assert_eq!(gens, vec![PauliString::new(vec![1, 1], vec![0, 0]).encode(), PauliString::new(vec![0, 0], vec![1, 1]).encode()]);
        assert!(verify_qss(&q, &a).passed);
    }

    #[test]
    fn cross_support_is_one_qubit() {
        let q = build_qss(&threshold23()).unwrap();
        for (i, (x, _)) in q.logicals.iter().enumerate() {
            for (j, (_, z)) in q.logicals.iter().enumerate() {
                let overlap = (0..q.qubits()).filter(|&k| x.x[k] != 0 && z.z[k] != 0).count();
                let set = q.minimal_sets[i];
                let expected = if i == j { set.len() + usize::from(set.len() % 2 == 0) } else { 1 };
                assert_eq!(overlap, expected);
            }
        }
    }

    #[test]
    fn mutation_breaks_relations() {
        let a = threshold23();
        let mut q = build_qss(&a).unwrap();
        // first pairing qubit follows the six initialization qubits
        q.logicals[0].0.x[6] = 0;
        let report = verify_qss(&q, &a);
        assert!(!report.passed);
        assert!(!report.relation_failures.is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let a = threshold23();
        let back = SetAccessStructure::from_json_str(&a.to_json_string()).unwrap();
        assert_eq!(back, a);
        assert!(SetAccessStructure::from_json_str("{\"parties\": 2, \"authorized\": [[0, 5]]}").is_err());
    }

    fn antichain(n: usize) -> impl Strategy<Value = SetAccessStructure> {
        prop::collection::vec(1u32..(1 << n), 1..4)
            .prop_map(move |bits| SetAccessStructure::from_minimal(n, bits.into_iter().map(PartySubset::from_bits)).unwrap())
    }

    proptest! {
        #[test]
        fn valid_structures_roundtrip(a in antichain(4)) {
            prop_assume!(validate_structure(&a).is_ok());
            let q = build_qss(&a).unwrap();
            for (i, set) in q.minimal_sets.iter().enumerate() {
                let mask = q.layout.mask_of(*set);
                prop_assert!(q.logicals[i].0.support().iter().all(|&k| mask[k]));
            }
            let report = verify_qss(&q, &a);
            prop_assert!(report.passed, "{:?}", report);
        }
    }
}
