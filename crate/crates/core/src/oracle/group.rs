//! Numeric states of stabilizer groups.
//!
//! Pure states are obtained by projecting a seeded random vector onto the
//! joint +1 eigenspace. Mixed states are never materialized in full: reduced
//! density matrices are summed directly from the group elements supported on
//! the region, with operator phases tracked exactly. Groups whose generators
//! split into blocks on disjoint qudits are handled block by block.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{apply_pauli_to, checked_dimension, pauli_matrix, single_qudit_action, Spectrum, StateVector, C64};
use super::{amplitude_budget, OracleError, Result};
use crate::access::PartySubset;
use crate::pauli::{PauliString, QuditLayout, StabilizerGroup};

/// Largest reduced density matrix the oracle will diagonalize.
pub const DENSITY_LIMIT: usize = 1024;
/// Largest number of group elements summed for one reduced density matrix.
pub const ENUMERATION_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub layout: QuditLayout,
    pub rho: DMatrix<C64>,
}

#[derive(Clone, Debug)]
pub enum GroupState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

/// Applies `Π_i (1/p) Σ_k g_i^k` to `amps`.
fn project(amps: &mut Vec<C64>, g: &StabilizerGroup) {
    let p = g.layout().p();
    let m = g.qudits();
    for gen in g.generators() {
        let mut acc = amps.clone();
        let mut cur = amps.clone();
        for _ in 1..p {
            cur = apply_pauli_to(&cur, p, m, gen);
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a += c;
            }
        }
        for a in acc.iter_mut() {
            *a /= p as f64;
        }
        *amps = acc;
    }
}

fn pure_state(g: &StabilizerGroup, budget: usize) -> Result<StateVector> {
    let d = checked_dimension(g.layout().p(), g.qudits(), budget, "state vector")?;
    for seed in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ seed);
        let mut amps: Vec<C64> = (0..d).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        project(&mut amps, g);
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return StateVector::from_amplitudes(g.layout().clone(), amps);
        }
    }
    Err(OracleError::Invalid("projection onto the stabilized subspace vanished".into()))
}

/// The state stabilized by `g`: a vector when pure, else the normalized projector.
pub fn state_from_group(g: &StabilizerGroup) -> Result<GroupState> {
    let budget = amplitude_budget();
    if g.is_pure() {
        return Ok(GroupState::Pure(pure_state(g, budget)?));
    }
    let d = checked_dimension(g.layout().p(), g.qudits(), budget, "state vector")?;
    if d.saturating_mul(d) > budget {
        return Err(OracleError::Budget {
            what: "density matrix".into(),
            requested: format!("{d}x{d}"),
            budget,
        });
    }
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        let mut e = vec![C64::new(0.0, 0.0); d];
        e[j] = C64::new(1.0, 0.0);
        project(&mut e, g);
        for (i, v) in e.into_iter().enumerate() {
            rho[(i, j)] = v;
        }
    }
    let tr: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
    rho /= C64::new(tr, 0.0);
    Ok(GroupState::Mixed(DensityMatrix { layout: g.layout().clone(), rho }))
}

/// Operator product `Π_i g_i^{c_i}` as `(phase, x, z)` with canonical single-qudit factors.
fn group_element(g: &StabilizerGroup, coeffs: &[u32]) -> (C64, PauliString) {
    let p = g.layout().p();
    let m = g.qudits();
    let mut x = vec![0u32; m];
    let mut z = vec![0u32; m];
    // exponent of the primitive root of unity: ω for odd p, i for p = 2
    let modulus: u64 = if p == 2 { 4 } else { p as u64 };
    let mut phase_exp: u64 = 0;
    for (gen, &c) in g.generators().iter().zip(coeffs) {
        for _ in 0..c {
            for q in 0..m {
                let (a, b) = (x[q] as u64, z[q] as u64);
                let (a2, b2) = (gen.x[q] as u64, gen.z[q] as u64);
                if a2 == 0 && b2 == 0 {
                    continue;
                }
                let na = (a + a2) % p as u64;
                let nb = (b + b2) % p as u64;
                if p == 2 {
                    // i^{ab} X^a Z^b · i^{a'b'} X^{a'} Z^{b'} = i^{ab+a'b'+2ba'-AB} i^{AB} X^A Z^B
                    phase_exp += a * b + a2 * b2 + 2 * b * a2 + 4 - na * nb;
                } else {
                    phase_exp += b * a2;
                }
                phase_exp %= modulus;
                x[q] = na as u32;
                z[q] = nb as u32;
            }
        }
    }
    let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase_exp as f64 / modulus as f64);
    (phase, PauliString::new(x, z))
}

/// Coefficient vectors of every element supported on `qudits`.
fn supported_elements(g: &StabilizerGroup, qudits: &[usize]) -> Result<Vec<Vec<u32>>> {
    let p = g.layout().p() as usize;
    let mut mask = vec![false; g.qudits()];
    for &q in qudits {
        mask[q] = true;
    }
    let basis = g.supported_coefficient_basis(&mask);
    let count = (p as f64).powi(basis.len() as i32);
    if count > ENUMERATION_LIMIT as f64 {
        return Err(OracleError::Budget {
            what: "group elements on region".into(),
            requested: format!("{p}^{}", basis.len()),
            budget: ENUMERATION_LIMIT,
        });
    }
    let f = g.field();
    let rank = g.rank();
    let mut out = Vec::with_capacity(count as usize);
    for code in 0..count as usize {
        let mut c = code;
        let mut v = vec![0u32; rank];
        for b in &basis {
            let k = (c % p) as u32;
            c /= p;
            f.axpy(&mut v, k, b);
        }
        out.push(v);
    }
    Ok(out)
}

/// `ρ_R = p^{-|R|} Σ_{h ∈ G, supp h ⊆ R} h|_R`, ordered as `qudits`.
pub fn reduced_density_from_group(g: &StabilizerGroup, qudits: &[usize]) -> Result<DMatrix<C64>> {
    let p = g.layout().p();
    let d = checked_dimension(p, qudits.len(), DENSITY_LIMIT, "reduced density matrix")?;
    let elements = supported_elements(g, qudits)?;
    let mut rho = DMatrix::<C64>::zeros(d, d);
    let pu = p as usize;
    let k = qudits.len();
    let mut digits = vec![0u32; k];
    for c in elements {
        let (phase, s) = group_element(g, &c);
        for col in 0..d {
            let mut rem = col;
            for t in (0..k).rev() {
                digits[t] = (rem % pu) as u32;
                rem /= pu;
            }
            let mut ph = phase;
            let mut row = 0usize;
            for (t, &q) in qudits.iter().enumerate() {
                let (target, f) = single_qudit_action(p, s.x[q], s.z[q], digits[t]);
                ph *= f;
                row = row * pu + target as usize;
            }
            rho[(row, col)] += ph;
        }
    }
    rho /= C64::new(d as f64, 0.0);
    Ok(rho)
}

#[derive(Clone, Debug)]
enum FactorState {
    Vector(StateVector),
    GroupSum,
}

/// One block of generators acting on a set of qudits disjoint from the other blocks.
#[derive(Clone, Debug)]
pub struct Factor {
    /// Global qudit indices, ascending.
    pub qudits: Vec<usize>,
    pub group: StabilizerGroup,
    state: FactorState,
    /// Purification of a mixed factor; references follow the factor's qudits.
    purified: Option<StabilizerGroup>,
}

impl Factor {
    pub fn is_vector(&self) -> bool {
        matches!(self.state, FactorState::Vector(_))
    }

    pub fn vector(&self) -> Option<&StateVector> {
        match &self.state {
            FactorState::Vector(v) => Some(v),
            FactorState::GroupSum => None,
        }
    }

    fn local(&self, global: &[usize]) -> Vec<usize> {
        global.iter().filter_map(|q| self.qudits.binary_search(q).ok()).collect()
    }

    /// Reduced density on the factor's qudits among `global` (listed order).
    pub fn reduced_density(&self, global: &[usize]) -> Result<DMatrix<C64>> {
        let local = self.local(global);
        match &self.state {
            FactorState::Vector(v) => {
                checked_dimension(self.group.layout().p(), local.len(), DENSITY_LIMIT, "reduced density matrix")?;
                Ok(v.reduced_density(&local))
            }
            FactorState::GroupSum => reduced_density_from_group(&self.group, &local),
        }
    }

    pub fn spectrum(&self, global: &[usize]) -> Result<Spectrum> {
        let local = self.local(global);
        if local.is_empty() {
            return Ok(Spectrum::new(vec![1.0]));
        }
        match &self.state {
            FactorState::Vector(v) => Ok(v.cut_spectrum(&local)),
            FactorState::GroupSum => {
                // The nonzero spectrum of R equals that of its complement in the purification.
                let m = self.qudits.len();
                let region = match &self.purified {
                    Some(pure) if pure.qudits() - local.len() < local.len() => {
                        let rest: Vec<usize> = (0..pure.qudits()).filter(|q| *q >= m || !local.contains(q)).collect();
                        Some((pure, rest))
                    }
                    _ => None,
                };
                let rho = match region {
                    Some((pure, rest)) => reduced_density_from_group(pure, &rest)?,
                    None => reduced_density_from_group(&self.group, &local)?,
                };
                Ok(super::dense::spectrum_of_density(&rho))
            }
        }
    }

    /// `⟨s⟩` for the restriction of a global string to this factor.
    pub fn expectation(&self, s: &PauliString) -> Result<C64> {
        let local = PauliString::new(
            self.qudits.iter().map(|&q| s.x[q]).collect(),
            self.qudits.iter().map(|&q| s.z[q]).collect(),
        );
        match &self.state {
            FactorState::Vector(v) => Ok(v.expectation(&local)),
            FactorState::GroupSum => {
                let support = local.support();
                if support.is_empty() {
                    return Ok(C64::new(1.0, 0.0));
                }
                let rho = reduced_density_from_group(&self.group, &support)?;
                let op = pauli_matrix(self.group.layout().p(), &local, &support);
                Ok(rho.component_mul(&op.transpose()).sum())
            }
        }
    }
}

/// A stabilizer state split into independent blocks.
#[derive(Clone, Debug)]
pub struct NumericState {
    layout: QuditLayout,
    factors: Vec<Factor>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl NumericState {
    pub fn build(g: &StabilizerGroup) -> Result<Self> {
        let budget = amplitude_budget();
        let m = g.qudits();
        let mut parent: Vec<usize> = (0..m).collect();
        for gen in g.generators() {
            let sup = gen.support();
            for w in sup.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
        for q in 0..m {
            let r = find(&mut parent, q);
            blocks.entry(r).or_default().push(q);
        }
        let f = g.field();
        let mut factors = Vec::new();
        for (_, qudits) in blocks {
            let owners: Vec<usize> = qudits.iter().map(|&q| g.layout().owner(q)).collect();
            let layout = QuditLayout::new(f, g.layout().parties(), owners)?;
            let gens: Vec<PauliString> = g
                .generators()
                .iter()
                .filter(|s| s.support().first().is_some_and(|q| qudits.binary_search(q).is_ok()))
                .map(|s| {
                    PauliString::new(qudits.iter().map(|&q| s.x[q]).collect(), qudits.iter().map(|&q| s.z[q]).collect())
                })
                .collect();
            let group = StabilizerGroup::new(layout, gens)?;
            let state = if group.is_pure() {
                match pure_state(&group, budget) {
                    Ok(v) => FactorState::Vector(v),
                    Err(OracleError::Budget { .. }) => FactorState::GroupSum,
                    Err(e) => return Err(e),
                }
            } else {
                FactorState::GroupSum
            };
            let purified = match state {
                FactorState::GroupSum if !group.is_pure() => Some(group.purified()?),
                _ => None,
            };
            factors.push(Factor { qudits, group, state, purified });
        }
        Ok(NumericState { layout: g.layout().clone(), factors })
    }

    pub fn layout(&self) -> &QuditLayout {
        &self.layout
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Factors holding at least one qudit of `region`.
    pub fn factors_touching(&self, region: PartySubset) -> Vec<&Factor> {
        self.factors
            .iter()
            .filter(|f| f.qudits.iter().any(|&q| region.contains(self.layout.owner(q))))
            .collect()
    }

    /// Spectrum of the reduced state on `region`.
    pub fn region_spectrum(&self, region: PartySubset) -> Result<Spectrum> {
        let qudits = self.layout.qudits_of(region);
        let mut acc = Spectrum::new(vec![1.0]);
        for f in self.factors_touching(region) {
            let s = f.spectrum(&qudits)?;
            if acc.len().saturating_mul(s.len()) > ENUMERATION_LIMIT {
                return Err(OracleError::Budget {
                    what: "combined spectrum".into(),
                    requested: format!("{}x{}", acc.len(), s.len()),
                    budget: ENUMERATION_LIMIT,
                });
            }
            acc = acc.tensor(&s);
        }
        Ok(acc)
    }

    /// `⟨s⟩` of a global string, multiplied over the factors it touches.
    pub fn expectation(&self, s: &PauliString) -> Result<C64> {
        let support = s.support();
        let mut acc = C64::new(1.0, 0.0);
        for f in &self.factors {
            if support.iter().any(|q| f.qudits.binary_search(q).is_ok()) {
                acc *= f.expectation(s)?;
            }
        }
        Ok(acc)
    }

    /// Von Neumann entropy of `region` in nats.
    pub fn region_entropy(&self, region: PartySubset) -> Result<f64> {
        let qudits = self.layout.qudits_of(region);
        let mut total = 0.0;
        for f in self.factors_touching(region) {
            total += f.spectrum(&qudits)?.entropy();
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::pauli::random_group;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn epr_from_group() {
        let layout = QuditLayout::new(gf(2), 2, vec![0, 1]).unwrap();
        let g = StabilizerGroup::new(
            layout.clone(),
            vec![PauliString::new(vec![0, 0], vec![1, 1]), PauliString::new(vec![1, 1], vec![0, 0])],
        )
        .unwrap();
        let GroupState::Pure(v) = state_from_group(&g).unwrap() else { panic!("pure") };
        let s = 0.5f64.sqrt();
        let bell = StateVector::from_amplitudes(
            layout,
            vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
        )
        .unwrap();
        assert!((v.overlap(&bell) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_z_gives_zero_state() {
        let layout = QuditLayout::new(gf(2), 1, vec![0]).unwrap();
        let g = StabilizerGroup::new(layout, vec![PauliString::single_z(1, 0, 1)]).unwrap();
        let GroupState::Pure(v) = state_from_group(&g).unwrap() else { panic!("pure") };
        assert!((v.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_is_normalized_projector() {
        let layout = QuditLayout::new(gf(3), 2, vec![0, 1]).unwrap();
        let g = StabilizerGroup::new(layout, vec![PauliString::new(vec![1, 1], vec![0, 0])]).unwrap();
        let GroupState::Mixed(d) = state_from_group(&g).unwrap() else { panic!("mixed") };
        let rho = &d.rho;
        assert!((rho * rho * C64::new(3.0, 0.0) - rho).norm() < 1e-12);
        let tr: f64 = (0..9).map(|i| rho[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
    }

    /// Group-sum reduction must agree with partial traces of the projected vector.
    #[test]
    fn group_sum_matches_vector_reduction() {
        for (p, seed) in [(2u64, 1u64), (2, 7), (3, 3), (3, 11), (5, 2)] {
            let g = random_group(p, 3, 3, 3, seed);
            if !g.is_pure() {
                continue;
            }
            let v = pure_state(&g, 1 << 20).unwrap();
            for region in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
                let a = v.reduced_density(&region);
                let b = reduced_density_from_group(&g, &region).unwrap();
                assert!((&a - &b).norm() < 1e-10, "p={p} seed={seed} region={region:?}");
            }
        }
    }

    #[test]
    fn group_sum_matches_dense_projector_for_mixed_states() {
        for (p, seed) in [(2u64, 5u64), (3, 4)] {
            let g = random_group(p, 3, 3, 2, seed);
            let GroupState::Mixed(d) = state_from_group(&g).unwrap() else { panic!("mixed") };
            let full = reduced_density_from_group(&g, &[0, 1, 2]).unwrap();
            assert!((&full - &d.rho).norm() < 1e-10);
        }
    }

    #[test]
    fn large_mixed_regions_go_through_the_purification() {
        let mut compared = 0;
        for seed in 0..6u64 {
            let g = random_group(2, 3, 6, 5, seed);
            let ns = NumericState::build(&g).unwrap();
            let region: Vec<usize> = (0..5).collect();
            for f in ns.factors().iter().filter(|f| f.purified.is_some()) {
                let local = f.local(&region);
                let direct = super::super::dense::spectrum_of_density(&reduced_density_from_group(&f.group, &local).unwrap());
                let via = f.spectrum(&region).unwrap();
                assert_eq!(direct.len(), via.len(), "seed {seed}");
                for (a, b) in direct.values().iter().zip(via.values()) {
                    assert!((a - b).abs() < 1e-10, "seed {seed}");
                }
                compared += 1;
            }
        }
        assert!(compared > 0);
    }

    #[test]
    fn entropy_matches_symbolic_on_random_groups() {
        for seed in 0..20u64 {
            let p = [2u64, 3][seed as usize % 2];
            let g = random_group(p, 3, 4, 1 + seed as usize % 4, seed);
            let ns = NumericState::build(&g).unwrap();
            for bits in 1u32..8 {
                let r = PartySubset::from_bits(bits);
                let symbolic = g.entropy(r) as f64 * (p as f64).ln();
                let numeric = ns.region_entropy(r).unwrap();
                assert!((symbolic - numeric).abs() < 1e-9, "seed {seed} region {r}");
            }
        }
    }
}
