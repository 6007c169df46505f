//! Non-stabilizer reference schemes built from EPR pairs and generic local
//! unitaries, with numeric reports on exact extraction.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::dense::{epr_extractable, local_unitary_fidelity, Spectrum, StateVector, C64};
use super::group::{state_from_group, GroupState};
use super::verify::Status;
use super::{amplitude_budget, OracleError, Result};
use crate::access::{Pair, PairAccessStructure, PartySubset};
use crate::field::PrimeField;
use crate::pauli::{PauliString, QuditLayout};
use crate::unknown::bipartite_qss;

pub const EXACT_TOL: f64 = 1e-9;
/// Largest local-unitary fidelity tolerated for a pair that is not meant to extract.
pub const INEXACT_MARGIN: f64 = 1e-3;
const CLUSTER_TOL: f64 = 1e-8;
const REPORTED_SPECTRUM: usize = 64;

/// Haar-distributed unitary of size `d`: QR of a complex Ginibre matrix with
/// the diagonal phases of `R` moved into `Q`.
pub fn haar_unitary(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::<C64>::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Two-qubit unitary taking `|00⟩` to `(|00⟩+|11⟩)/√2`.
fn bell_preparation() -> DMatrix<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c(h), c(0.0), c(h), c(0.0),
        c(0.0), c(h), c(0.0), c(h),
        c(0.0), c(h), c(0.0), c(-h),
        c(h), c(0.0), c(-h), c(0.0),
    ]);
    m
}

/// The fixed two-qubit unitary `U_23`: `|10⟩ ↦ (|01⟩+|10⟩)/√2`,
/// `|01⟩ ↦ (|01⟩−|10⟩)/√2`, identity on `|00⟩` and `|11⟩`.
pub fn u23() -> DMatrix<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c(1.0), c(0.0), c(0.0), c(0.0),
        c(0.0), c(h), c(h), c(0.0),
        c(0.0), c(-h), c(h), c(0.0),
        c(0.0), c(0.0), c(0.0), c(1.0),
    ]);
    m
}

fn qubits() -> PrimeField {
    PrimeField::new(2).expect("2 is prime")
}

fn zero_state(layout: QuditLayout) -> Result<StateVector> {
    let d = 1usize << layout.qudits();
    let mut amps = vec![c(0.0); d];
    amps[0] = c(1.0);
    StateVector::from_amplitudes(layout, amps)
}

/// `(I ⊗ U_23)(|00⟩+|11⟩)|0⟩/√2`, one qubit per party.
pub fn explicit_three_qubit_state() -> StateVector {
    let layout = QuditLayout::new(qubits(), 3, vec![0, 1, 2]).expect("owners in range");
    let mut v = zero_state(layout).expect("valid dimension");
    v.apply_unitary(&[0, 1], &bell_preparation());
    v.apply_unitary(&[1, 2], &u23());
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ancilla {
    Pure,
    MaximallyMixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntendedCheck {
    pub pair: String,
    /// Fidelity with `Φ_2` after undoing the local unitaries.
    pub fidelity: f64,
    /// Spectral test across the pair's cut, when the state is pure.
    pub extractable: Option<bool>,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutCheck {
    pub cut: String,
    pub intended: bool,
    pub spectrum: Vec<f64>,
    pub extractable: bool,
    pub lu_fidelity: f64,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonStabReport {
    pub seed: u64,
    pub pure: bool,
    pub intended: Vec<IntendedCheck>,
    /// Complete bipartitions of the parties; only evaluated for pure states.
    pub cuts: Vec<CutCheck>,
    pub skipped: Vec<String>,
    pub passed: bool,
}

impl NonStabReport {
    fn finish(mut self) -> Self {
        self.passed = self.intended.iter().all(|c| c.status != Status::Failed)
            && self.cuts.iter().all(|c| c.status != Status::Failed);
        self
    }
}

/// One stacked block: an EPR pair dressed with ancillas and a generic unitary per side.
#[derive(Clone, Debug)]
pub struct HaarBlock {
    pub pair: Pair,
    pub state: StateVector,
    /// Qubits of the first and second side, and the unitary applied there.
    pub sides: [(Vec<usize>, DMatrix<C64>); 2],
    /// The two EPR halves, in the original frame.
    pub epr: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct HaarKnownScheme {
    pub parties: usize,
    pub ancilla: Ancilla,
    pub blocks: Vec<HaarBlock>,
}

fn monotone_check(s: &PairAccessStructure) -> Result<()> {
    for &a in s.authorized() {
        if let Some(&u) = s.unauthorized().iter().find(|&&u| crate::access::preceq(a, u)) {
            return Err(OracleError::Invalid(format!("not monotone: {} lies below unauthorized {}", a.key(), u.key())));
        }
    }
    Ok(())
}

fn build_block(pair: Pair, n: usize, ancilla: Ancilla, rng: &mut ChaCha8Rng) -> Result<HaarBlock> {
    let env = n;
    let mut owners = Vec::new();
    let mut side_qubits = [Vec::new(), Vec::new()];
    for (i, t) in [pair.first(), pair.second()].into_iter().enumerate() {
        let members = t.to_vec();
        let k = members.len().max(2);
        for j in 0..k {
            side_qubits[i].push(owners.len());
            owners.push(members[j % members.len()]);
        }
    }
    let epr = (side_qubits[0][0], side_qubits[1][0]);
    let ancillas: Vec<usize> = side_qubits.iter().flat_map(|s| s[1..].iter().copied()).collect();
    let mut purifiers = Vec::new();
    if ancilla == Ancilla::MaximallyMixed {
        for _ in &ancillas {
            purifiers.push(owners.len());
            owners.push(env);
        }
    }
    let m = owners.len();
    super::dense::checked_dimension(2, m, amplitude_budget(), "state vector")?;
    let layout = QuditLayout::new(qubits(), n + 1, owners)?;
    let mut state = zero_state(layout)?;
    let bell = bell_preparation();
    state.apply_unitary(&[epr.0, epr.1], &bell);
    for (&a, &e) in ancillas.iter().zip(&purifiers) {
        state.apply_unitary(&[a, e], &bell);
    }
    let sides = side_qubits.map(|q| {
        let u = haar_unitary(1 << q.len(), rng);
        state.apply_unitary(&q, &u);
        (q, u)
    });
    Ok(HaarBlock { pair, state, sides, epr })
}

fn bell_fidelity(state: &StateVector, a: usize, b: usize) -> f64 {
    let rho = state.reduced_density(&[a, b]);
    let idx = [0usize, 3];
    let mut f = C64::new(0.0, 0.0);
    for &i in &idx {
        for &j in &idx {
            f += rho[(i, j)];
        }
    }
    f.re / 2.0
}

/// Fidelity with `Φ_2` insensitive to the Pauli frame of the decoded pair:
/// `(1 + |⟨XX⟩| + |⟨YY⟩| + |⟨ZZ⟩|)/4`.
fn frame_free_fidelity(state: &StateVector, xx: &PauliString, zz: &PauliString) -> f64 {
    let f = qubits();
    let yy = xx.mul(zz, f);
    (1.0 + state.expectation(xx).norm() + state.expectation(&yy).norm() + state.expectation(zz).norm()) / 4.0
}

fn intended_status(fidelity: f64, extractable: Option<bool>) -> Status {
    if (1.0 - fidelity).abs() <= EXACT_TOL && extractable != Some(false) {
        Status::Passed
    } else {
        Status::Failed
    }
}

fn cut_check(cut: PartySubset, n: usize, intended: bool, spectrum: Spectrum) -> CutCheck {
    let extractable = epr_extractable(&spectrum, 2, CLUSTER_TOL);
    let lu_fidelity = local_unitary_fidelity(&spectrum, 2);
    let ok = if intended { extractable } else { !extractable && lu_fidelity < 1.0 - INEXACT_MARGIN };
    CutCheck {
        cut: Pair::new(cut, cut.complement(n)).map(|p| p.key()).unwrap_or_else(|_| cut.key()),
        intended,
        spectrum: spectrum.values().iter().take(REPORTED_SPECTRUM).copied().collect(),
        extractable,
        lu_fidelity,
        status: if ok { Status::Passed } else { Status::Failed },
    }
}

/// Bipartitions `{T, T^c}` of `n` parties with party 0 in `T`.
fn bipartitions(n: usize) -> impl Iterator<Item = PartySubset> {
    let full = PartySubset::full(n);
    full.iter_nonempty_subsets().filter(move |t| t.contains(0) && *t != full)
}

/// Stacks one EPR block per minimal authorized pair, each side scrambled by
/// an independent Haar unitary acting on its EPR half and ancillas.
pub fn haar_known_scheme(s: &PairAccessStructure, seed: u64, ancilla: Ancilla) -> Result<(HaarKnownScheme, NonStabReport)> {
    monotone_check(s)?;
    let n = s.parties();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = s
        .minimal_authorized()
        .into_iter()
        .map(|pair| build_block(pair, n, ancilla, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let pure = ancilla == Ancilla::Pure;
    let mut report = NonStabReport { seed, pure, intended: Vec::new(), cuts: Vec::new(), skipped: Vec::new(), passed: false };
    for b in &blocks {
        let mut undone = b.state.clone();
        for (q, u) in &b.sides {
            undone.apply_unitary(q, &u.adjoint());
        }
        let fidelity = bell_fidelity(&undone, b.epr.0, b.epr.1);
        let extractable = pure.then(|| epr_extractable(&b.state.cut_spectrum(&b.sides[0].0), 2, CLUSTER_TOL));
        report.intended.push(IntendedCheck {
            pair: b.pair.key(),
            fidelity,
            extractable,
            status: intended_status(fidelity, extractable),
        });
    }
    if pure {
        let budget = amplitude_budget();
        for t in bipartitions(n) {
            let intended = s.is_implied_authorized(Pair::new(t, t.complement(n)).expect("disjoint"));
            let mut spectrum = Spectrum::new(vec![1.0]);
            let mut over = false;
            for b in &blocks {
                let part = b.state.cut_spectrum(&b.state.layout().qudits_of(t));
                if spectrum.len().saturating_mul(part.len()) > budget {
                    over = true;
                    break;
                }
                spectrum = spectrum.tensor(&part);
            }
            if over {
                report.skipped.push(format!("cut {}: spectrum exceeds the budget", t.key()));
                continue;
            }
            report.cuts.push(cut_check(t, n, intended, spectrum));
        }
    } else {
        report.skipped.push("other pairs: mixed ancillas leave no pure cut to test".into());
    }
    Ok((HaarKnownScheme { parties: n, ancilla, blocks }, report.finish()))
}

#[derive(Clone, Debug)]
pub struct NonStabUnknownScheme {
    pub parties: usize,
    /// Pure state over the parties plus, when the stabilizer construction is
    /// mixed, a purifying party with index `parties`.
    pub state: StateVector,
    pub init_qubits: Vec<Vec<usize>>,
    pub unitaries: Vec<DMatrix<C64>>,
}

/// Runs the two-sided secret-sharing construction on the authorized pairs,
/// purifies it, and scrambles each minimal set's initialization qubits.
pub fn nonstab_unknown_scheme(s: &PairAccessStructure, seed: u64) -> Result<(NonStabUnknownScheme, NonStabReport)> {
    let n = s.parties();
    let authorized_only = PairAccessStructure::new(n, s.authorized().iter().copied(), std::iter::empty())
        .map_err(|e| OracleError::Invalid(e.to_string()))?;
    let b = bipartite_qss(&authorized_only).map_err(|e| OracleError::Invalid(e.to_string()))?;
    let group = &b.scheme.group;
    let pure = group.is_pure();
    let purified = group.purified()?;
    let m = purified.qudits();
    let mut state = match state_from_group(&purified)? {
        GroupState::Pure(v) => v,
        GroupState::Mixed(_) => return Err(OracleError::Invalid("purification left a mixed state".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unitaries: Vec<DMatrix<C64>> = b
        .init_qubits
        .iter()
        .map(|q| {
            let u = haar_unitary(1 << q.len(), &mut rng);
            state.apply_unitary(q, &u);
            u
        })
        .collect();
    let mut report = NonStabReport { seed, pure, intended: Vec::new(), cuts: Vec::new(), skipped: Vec::new(), passed: false };
    let f = qubits();
    for &pair in s.authorized() {
        let (Some(v1), Some(v2)) = (b.scheme.vertex_witnesses.get(&pair.first()), b.scheme.vertex_witnesses.get(&pair.second()))
        else {
            report.skipped.push(format!("pair {}: no vertex witnesses", pair.key()));
            continue;
        };
        let xx = v1.x.mul(&v2.x, f).padded(m - group.qudits());
        let zz = v1.z.mul(&v2.z, f).padded(m - group.qudits());
        let touched: Vec<bool> = (0..m).map(|q| xx.x[q] != 0 || xx.z[q] != 0 || zz.x[q] != 0 || zz.z[q] != 0).collect();
        let mut undone = state.clone();
        for (q, u) in b.init_qubits.iter().zip(&unitaries) {
            if q.iter().any(|&k| touched[k]) {
                undone.apply_unitary(q, &u.adjoint());
            }
        }
        let fidelity = frame_free_fidelity(&undone, &xx, &zz);
        let extractable = (pure && pair.union() == PartySubset::full(n))
            .then(|| epr_extractable(&state.cut_spectrum(&state.layout().qudits_of(pair.first())), 2, CLUSTER_TOL));
        report.intended.push(IntendedCheck { pair: pair.key(), fidelity, extractable, status: intended_status(fidelity, extractable) });
    }
    if pure {
        for t in bipartitions(n) {
            let intended = authorized_only.is_authorized(Pair::new(t, t.complement(n)).expect("disjoint"));
            report.cuts.push(cut_check(t, n, intended, state.cut_spectrum(&state.layout().qudits_of(t))));
        }
    } else {
        report.skipped.push("other pairs: the construction is mixed on the parties".into());
    }
    let scheme = NonStabUnknownScheme { parties: n, state, init_qubits: b.init_qubits, unitaries };
    Ok((scheme, report.finish()))
}
