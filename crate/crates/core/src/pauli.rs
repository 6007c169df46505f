//! Generalized Pauli operators, stabilizer groups and their restrictions to
//! party regions.
//!
//! A Pauli string is the symplectic pair `(x, z)` of exponent vectors for
//! `X^x Z^z`; global phases are not tracked. The commutation phase
//! `κ_R(a, b) = Σ_{q ∈ R} z_a[q] x_b[q] − x_a[q] z_b[q]` satisfies
//! `ab = ω^κ ba` when `R` covers all qudits.

use std::fmt;

use thiserror::Error;

use crate::access::PartySubset;
use crate::field::{FieldMatrix, PrimeField, RowReducer};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("Pauli string acts on {found} qudits, layout has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("generators {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("generator {0} depends on the previous generators")]
    Dependent(usize),
    #[error("qudit {qudit} is owned by party {owner}, but there are only {parties} parties")]
    OwnerOutOfRange { qudit: usize, owner: usize, parties: usize },
    #[error("malformed tableau: {0}")]
    Tableau(String),
}

pub type Result<T> = std::result::Result<T, PauliError>;

/// Assignment of qudits to parties, plus the local dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuditLayout {
    field: PrimeField,
    parties: usize,
    owners: Vec<usize>,
}

impl QuditLayout {
    pub fn new(field: PrimeField, parties: usize, owners: Vec<usize>) -> Result<Self> {
        for (q, &o) in owners.iter().enumerate() {
            if o >= parties {
                return Err(PauliError::OwnerOutOfRange { qudit: q, owner: o, parties });
            }
        }
        Ok(QuditLayout { field, parties, owners })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn qudits(&self) -> usize {
        self.owners.len()
    }

    pub fn owners(&self) -> &[usize] {
        &self.owners
    }

    pub fn owner(&self, q: usize) -> usize {
        self.owners[q]
    }

    pub fn qudits_of(&self, region: PartySubset) -> Vec<usize> {
        (0..self.owners.len()).filter(|&q| region.contains(self.owners[q])).collect()
    }

    pub fn count_in(&self, region: PartySubset) -> usize {
        self.owners.iter().filter(|&&o| region.contains(o)).count()
    }

    pub fn mask_of(&self, region: PartySubset) -> Vec<bool> {
        self.owners.iter().map(|&o| region.contains(o)).collect()
    }

    /// Qudits held by each party.
    pub fn share_sizes(&self) -> Vec<usize> {
        let mut v = vec![0; self.parties];
        for &o in &self.owners {
            v[o] += 1;
        }
        v
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: Vec<u32>,
    pub z: Vec<u32>,
}

impl PauliString {
    pub fn identity(m: usize) -> Self {
        PauliString { x: vec![0; m], z: vec![0; m] }
    }

    pub fn new(x: Vec<u32>, z: Vec<u32>) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts differ in length");
        PauliString { x, z }
    }

    /// `X^e` on qudit `q` of `m`.
    pub fn single_x(m: usize, q: usize, e: u32) -> Self {
        let mut s = Self::identity(m);
        s.x[q] = e;
        s
    }

    pub fn single_z(m: usize, q: usize, e: u32) -> Self {
        let mut s = Self::identity(m);
        s.z[q] = e;
        s
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.x[q] != 0 || self.z[q] != 0).collect()
    }

    /// Product up to phase: exponent vectors add.
    pub fn mul(&self, other: &PauliString, f: PrimeField) -> PauliString {
        PauliString {
            x: self.x.iter().zip(&other.x).map(|(a, b)| f.add(*a, *b)).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| f.add(*a, *b)).collect(),
        }
    }

    pub fn pow(&self, k: u32, f: PrimeField) -> PauliString {
        PauliString {
            x: self.x.iter().map(|&a| f.mul(a, k)).collect(),
            z: self.z.iter().map(|&a| f.mul(a, k)).collect(),
        }
    }

    pub fn inverse(&self, f: PrimeField) -> PauliString {
        self.pow(f.modulus() - 1, f)
    }

    /// Copy with every qudit outside `mask` set to the identity.
    pub fn restrict(&self, mask: &[bool]) -> PauliString {
        PauliString {
            x: self.x.iter().zip(mask).map(|(&v, &m)| if m { v } else { 0 }).collect(),
            z: self.z.iter().zip(mask).map(|(&v, &m)| if m { v } else { 0 }).collect(),
        }
    }

    /// Extends with `extra` identity qudits.
    pub fn padded(&self, extra: usize) -> PauliString {
        let mut s = self.clone();
        s.x.extend(std::iter::repeat(0).take(extra));
        s.z.extend(std::iter::repeat(0).take(extra));
        s
    }

    /// The vector `(x | z)` of length `2m`.
    pub fn symplectic(&self) -> Vec<u32> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.z);
        v
    }

    pub fn from_symplectic(v: &[u32]) -> PauliString {
        let m = v.len() / 2;
        PauliString { x: v[..m].to_vec(), z: v[m..].to_vec() }
    }

    /// Text form `X:<digits>|Z:<digits>`, one base-36 digit per qudit.
    pub fn encode(&self) -> String {
        format!("X:{}|Z:{}", encode_digits(&self.x), encode_digits(&self.z))
    }

    pub fn decode(s: &str, p: u32) -> Result<PauliString> {
        let (xs, zs) = s
            .trim()
            .split_once('|')
            .ok_or_else(|| PauliError::Tableau(format!("missing '|' in '{s}'")))?;
        let x = decode_digits(xs.strip_prefix("X:").ok_or_else(|| PauliError::Tableau(format!("missing 'X:' in '{s}'")))?, p)?;
        let z = decode_digits(zs.strip_prefix("Z:").ok_or_else(|| PauliError::Tableau(format!("missing 'Z:' in '{s}'")))?, p)?;
        if x.len() != z.len() {
            return Err(PauliError::Tableau(format!("x and z parts differ in length in '{s}'")));
        }
        Ok(PauliString { x, z })
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

fn encode_digits(v: &[u32]) -> String {
    v.iter()
        .map(|&d| {
            assert!((d as usize) < DIGITS.len(), "exponent {d} has no single-digit encoding");
            DIGITS[d as usize] as char
        })
        .collect()
}

fn decode_digits(s: &str, p: u32) -> Result<Vec<u32>> {
    s.chars()
        .map(|c| {
            let d = c.to_digit(36).ok_or_else(|| PauliError::Tableau(format!("bad digit '{c}'")))?;
            if d >= p {
                return Err(PauliError::Tableau(format!("digit '{c}' is not below p = {p}")));
            }
            Ok(d)
        })
        .collect()
}

/// `κ_R(a, b)` over the qudits selected by `mask` (all qudits when `None`).
pub fn commutation_phase_masked(f: PrimeField, a: &PauliString, b: &PauliString, mask: Option<&[bool]>) -> u32 {
    let p = f.modulus() as u64;
    let mut pos = 0u64;
    let mut neg = 0u64;
    for q in 0..a.len() {
        if let Some(m) = mask {
            if !m[q] {
                continue;
            }
        }
        pos += a.z[q] as u64 * b.x[q] as u64;
        neg += a.x[q] as u64 * b.z[q] as u64;
        if pos > u32::MAX as u64 {
            pos %= p;
        }
        if neg > u32::MAX as u64 {
            neg %= p;
        }
    }
    f.sub((pos % p) as u32, (neg % p) as u32)
}

/// `κ_R(a, b)` restricted to the qudits owned by `region` (all qudits when `None`).
pub fn commutation_phase(layout: &QuditLayout, a: &PauliString, b: &PauliString, region: Option<PartySubset>) -> u32 {
    match region {
        None => commutation_phase_masked(layout.field, a, b, None),
        Some(r) => commutation_phase_masked(layout.field, a, b, Some(&layout.mask_of(r))),
    }
}

/// An abelian group given by independent commuting generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    layout: QuditLayout,
    generators: Vec<PauliString>,
}

impl StabilizerGroup {
    /// Checks lengths, pairwise commutation and independence.
    pub fn new(layout: QuditLayout, generators: Vec<PauliString>) -> Result<Self> {
        Self::build(layout, generators, false)
    }

    /// Like [`StabilizerGroup::new`] but silently drops dependent generators.
    pub fn new_reduced(layout: QuditLayout, generators: Vec<PauliString>) -> Result<Self> {
        Self::build(layout, generators, true)
    }

    fn build(layout: QuditLayout, generators: Vec<PauliString>, drop_dependent: bool) -> Result<Self> {
        let m = layout.qudits();
        for g in &generators {
            if g.len() != m {
                return Err(PauliError::LengthMismatch { expected: m, found: g.len() });
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if commutation_phase_masked(layout.field, &generators[i], &generators[j], None) != 0 {
                    return Err(PauliError::NotCommuting(i, j));
                }
            }
        }
        let mut rr = RowReducer::new(layout.field, 2 * m);
        let mut kept = Vec::with_capacity(generators.len());
        for (i, g) in generators.into_iter().enumerate() {
            if rr.insert(&g.symplectic()).is_some() {
                kept.push(g);
            } else if !drop_dependent {
                return Err(PauliError::Dependent(i));
            }
        }
        Ok(StabilizerGroup { layout, generators: kept })
    }

    pub fn layout(&self) -> &QuditLayout {
        &self.layout
    }

    pub fn field(&self) -> PrimeField {
        self.layout.field
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn qudits(&self) -> usize {
        self.layout.qudits()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == self.qudits()
    }

    /// Membership up to phase.
    pub fn contains(&self, s: &PauliString) -> bool {
        if s.len() != self.qudits() {
            return false;
        }
        let mut rr = RowReducer::new(self.field(), 2 * self.qudits());
        for g in &self.generators {
            rr.insert(&g.symplectic());
        }
        rr.contains(&s.symplectic())
    }

    /// Coefficient vectors of group elements that act trivially outside `mask`.
    pub(crate) fn supported_coefficient_basis(&self, mask: &[bool]) -> Vec<Vec<u32>> {
        let outside: Vec<usize> = (0..self.qudits()).filter(|&q| !mask[q]).collect();
        let m = self.generators.len();
        if outside.is_empty() {
            return (0..m)
                .map(|i| {
                    let mut v = vec![0; m];
                    v[i] = 1;
                    v
                })
                .collect();
        }
        let mut r = FieldMatrix::zeros(self.field(), 2 * outside.len(), m);
        for (i, g) in self.generators.iter().enumerate() {
            for (k, &q) in outside.iter().enumerate() {
                r.set(2 * k, i, g.x[q]);
                r.set(2 * k + 1, i, g.z[q]);
            }
        }
        r.kernel()
    }

    fn combine(&self, coeffs: &[u32]) -> PauliString {
        let f = self.field();
        let mut acc = PauliString::identity(self.qudits());
        for (g, &c) in self.generators.iter().zip(coeffs) {
            if c != 0 {
                f.axpy(&mut acc.x, c, &g.x);
                f.axpy(&mut acc.z, c, &g.z);
            }
        }
        acc
    }

    pub fn supported_subgroup_masked(&self, mask: &[bool]) -> Vec<PauliString> {
        self.supported_coefficient_basis(mask).iter().map(|c| self.combine(c)).collect()
    }

    /// Basis of the subgroup of elements acting trivially outside `region`.
    pub fn supported_subgroup(&self, region: PartySubset) -> Vec<PauliString> {
        self.supported_subgroup_masked(&self.layout.mask_of(region))
    }

    /// Dimension of the supported subgroup, without building its elements.
    pub fn supported_dimension(&self, region: PartySubset) -> usize {
        let mask = self.layout.mask_of(region);
        let outside: Vec<usize> = (0..self.qudits()).filter(|&q| !mask[q]).collect();
        let mut rr = RowReducer::new(self.field(), 2 * outside.len());
        let mut rank = 0;
        for g in &self.generators {
            let row: Vec<u32> = outside.iter().flat_map(|&q| [g.x[q], g.z[q]]).collect();
            if rr.insert(&row).is_some() {
                rank += 1;
            }
        }
        self.generators.len() - rank
    }

    /// Entropy of `region` in units of `log p`.
    pub fn entropy(&self, region: PartySubset) -> usize {
        self.layout.count_in(region) - self.supported_dimension(region)
    }

    /// Text tableau: header, owner line, then sorted generator lines.
    pub fn to_tableau(&self) -> String {
        let mut lines: Vec<String> = self.generators.iter().map(|g| g.encode()).collect();
        lines.sort();
        let owners: Vec<String> = self.layout.owners.iter().map(|o| o.to_string()).collect();
        let mut out = format!(
            "p={} qudits={} parties={}\nowner: {}\n",
            self.layout.p(),
            self.qudits(),
            self.layout.parties,
            owners.join(" ")
        );
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    pub fn from_tableau(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| PauliError::Tableau("empty tableau".into()))?;
        let mut p = None;
        let mut m = None;
        let mut n = None;
        for tok in header.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| PauliError::Tableau(format!("bad header token '{tok}'")))?;
            let v: u64 = v.parse().map_err(|_| PauliError::Tableau(format!("bad number in '{tok}'")))?;
            match k {
                "p" => p = Some(v),
                "qudits" => m = Some(v as usize),
                "parties" => n = Some(v as usize),
                _ => return Err(PauliError::Tableau(format!("unknown header key '{k}'"))),
            }
        }
        let (p, m, n) = match (p, m, n) {
            (Some(p), Some(m), Some(n)) => (p, m, n),
            _ => return Err(PauliError::Tableau("header needs p, qudits and parties".into())),
        };
        let field = PrimeField::new(p).map_err(|e| PauliError::Tableau(e.to_string()))?;
        if p > 36 {
            return Err(PauliError::Tableau(format!("p = {p} has no single-digit encoding")));
        }
        let owner_line = lines.next().ok_or_else(|| PauliError::Tableau("missing owner line".into()))?;
        let owners: Vec<usize> = owner_line
            .strip_prefix("owner:")
            .ok_or_else(|| PauliError::Tableau("missing 'owner:' line".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| PauliError::Tableau(format!("bad owner '{t}'"))))
            .collect::<Result<_>>()?;
        if owners.len() != m {
            return Err(PauliError::Tableau(format!("{} owners listed for {m} qudits", owners.len())));
        }
        let layout = QuditLayout::new(field, n, owners)?;
        let gens = lines.map(|l| PauliString::decode(l, p as u32)).collect::<Result<Vec<_>>>()?;
        StabilizerGroup::new(layout, gens)
    }
}

/// A pair of group elements supported on `T1 ∪ T2` whose restricted
/// commutation phase on `T1` is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistillationWitness {
    pub v: PauliString,
    pub w: PauliString,
    pub phase: u32,
}

pub fn supported_subgroup(g: &StabilizerGroup, region: PartySubset) -> Vec<PauliString> {
    g.supported_subgroup(region)
}

pub fn group_entropy(g: &StabilizerGroup, region: PartySubset) -> usize {
    g.entropy(region)
}

/// First basis pair `(i < j)` of the subgroup supported on `t1 ∪ t2` with
/// nonzero `κ_{t1}`; `None` when the restricted form vanishes.
pub fn pair_distillation_witness(g: &StabilizerGroup, t1: PartySubset, t2: PartySubset) -> Option<DistillationWitness> {
    let basis = g.supported_subgroup(t1.union(t2));
    let mask = g.layout().mask_of(t1);
    let f = g.field();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let phase = commutation_phase_masked(f, &basis[i], &basis[j], Some(&mask));
            if phase != 0 {
                return Some(DistillationWitness { v: basis[i].clone(), w: basis[j].clone(), phase });
            }
        }
    }
    None
}

impl StabilizerGroup {
    /// Pairs `(a_j, b_j)` with `κ(a_j, b_j) = 1`, commuting with the group and
    /// with every other pair, spanning the normalizer modulo the group.
    pub fn logical_pairs(&self) -> Vec<(PauliString, PauliString)> {
        let f = self.field();
        let m = self.qudits();
        let rows: Vec<Vec<u32>> = self
            .generators
            .iter()
            .map(|g| g.z.iter().map(|&v| f.neg(v)).chain(g.x.iter().copied()).collect())
            .collect();
        let mut pool: Vec<PauliString> = if rows.is_empty() {
            FieldMatrix::identity(f, 2 * m).to_rows()
        } else {
            FieldMatrix::from_reduced_rows(f, 2 * m, &rows).expect("row lengths").kernel()
        }
        .iter()
        .map(|v| PauliString::from_symplectic(v))
        .collect();
        let mut span = RowReducer::new(f, 2 * m);
        for g in &self.generators {
            span.insert(&g.symplectic());
        }
        let kappa = |a: &PauliString, b: &PauliString| commutation_phase_masked(f, a, b, None);
        let mut pairs = Vec::new();
        while let Some(i) = pool.iter().position(|a| !span.contains(&a.symplectic())) {
            let a = pool.swap_remove(i);
            let j = pool.iter().position(|b| kappa(&a, b) != 0).expect("normalizer modulo the group is symplectic");
            let b = pool.swap_remove(j);
            let b = b.pow(f.inv(kappa(&a, &b)).expect("nonzero"), f);
            pool = pool
                .into_iter()
                .map(|c| {
                    let cb = kappa(&c, &b);
                    let ca = kappa(&c, &a);
                    c.mul(&a.pow(f.neg(cb), f), f).mul(&b.pow(ca, f), f)
                })
                .collect();
            span.insert(&a.symplectic());
            span.insert(&b.symplectic());
            pairs.push((a, b));
        }
        pairs
    }

    /// A pure group on the original qudits plus one reference qudit per
    /// logical pair, held by an extra party, whose reduction is this group's state.
    pub fn purified(&self) -> Result<StabilizerGroup> {
        let pairs = self.logical_pairs();
        let m = self.qudits();
        let extra = pairs.len();
        let mut owners = self.layout.owners.clone();
        owners.extend(std::iter::repeat(self.layout.parties).take(extra));
        let layout = QuditLayout::new(self.field(), self.layout.parties + 1, owners)?;
        let mut gens: Vec<PauliString> = self.generators.iter().map(|g| g.padded(extra)).collect();
        for (j, (a, b)) in pairs.iter().enumerate() {
            let mut xa = a.padded(extra);
            xa.x[m + j] = 1;
            let mut zb = b.padded(extra);
            zb.z[m + j] = 1;
            gens.push(xa);
            gens.push(zb);
        }
        StabilizerGroup::new(layout, gens)
    }
}

/// Random independent commuting generators, grown greedily. Test helper.
#[cfg(test)]
pub(crate) fn random_group(p: u64, parties: usize, qudits: usize, target_rank: usize, seed: u64) -> StabilizerGroup {
    use rand::{Rng, SeedableRng};
    let f = PrimeField::new(p).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let owners: Vec<usize> = (0..qudits).map(|_| rng.gen_range(0..parties)).collect();
    let layout = QuditLayout::new(f, parties, owners).unwrap();
    let mut gens: Vec<PauliString> = Vec::new();
    let mut rr = RowReducer::new(f, 2 * qudits);
    let mut attempts = 0;
    while gens.len() < target_rank && attempts < 10_000 {
        attempts += 1;
        let cand = PauliString::new(
            (0..qudits).map(|_| rng.gen_range(0..p as u32)).collect(),
            (0..qudits).map(|_| rng.gen_range(0..p as u32)).collect(),
        );
        if gens.iter().all(|g| commutation_phase_masked(f, g, &cand, None) == 0) && !rr.contains(&cand.symplectic()) {
            rr.insert(&cand.symplectic());
            gens.push(cand);
        }
    }
    StabilizerGroup::new(layout, gens).unwrap()
}
