//! Numeric cross-check of synthesized schemes against their access structures.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::dense::{epr_extractable, pauli_matrix, C64};
use super::group::NumericState;
use crate::access::{structure_report, Pair, PairAccessStructure, PartySubset};
use crate::known::max_disjoint;
use crate::pauli::{pair_distillation_witness, PauliString, StabilizerGroup};
use crate::scheme::{EssScheme, SchemeMode};

/// Eigenvalues closer than this count as degenerate.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Tolerance on expectations, entropies and off-diagonal entries.
pub const NUMERIC_TOL: f64 = 1e-9;
/// Spectra in reports are cut to this many values.
pub const REPORTED_SPECTRUM: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Passed
        } else {
            Status::Failed
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuthorizedCheck {
    pub pair: String,
    pub status: Status,
    /// `|⟨V⟩|`, `|⟨W⟩|` for the witness operators.
    pub witness_expectations: Option<(f64, f64)>,
    /// Spectrum across the first side, for pure global states.
    pub cut_spectrum: Option<Vec<f64>>,
    pub extractable: Option<bool>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparabilityCheck {
    pub pair: String,
    pub status: Status,
    /// Largest off-diagonal magnitude in the local product eigenbasis.
    pub max_off_diagonal: Option<f64>,
    /// Largest Pauli expectation on the two decoded vertex qubits, for pairs
    /// where only the fixed vertex channels have to fail.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_output_correlation: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyCheck {
    pub vertex: String,
    /// Entropy in units of `log p`.
    pub numeric: f64,
    pub symbolic: usize,
    pub disjoint_partners: usize,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericReport {
    pub dimension: u32,
    pub pure: bool,
    pub authorized: Vec<AuthorizedCheck>,
    pub unauthorized: Vec<SeparabilityCheck>,
    pub vertices: Vec<EntropyCheck>,
    pub skipped: usize,
    pub note: Option<String>,
    pub passed: bool,
}

/// Witness operators `(V, W)` for a pair: recorded ones first, then vertex
/// operators, then a fresh search.
fn pair_operators(scheme: &EssScheme, pair: Pair) -> Option<(PauliString, PauliString)> {
    let f = scheme.group.field();
    match scheme.mode {
        SchemeMode::Known => scheme.witness_for(pair).map(|w| (w.v.clone(), w.w.clone())),
        SchemeMode::Unknown => {
            let a = scheme.vertex_witnesses.get(&pair.first())?;
            let b = scheme.vertex_witnesses.get(&pair.second())?;
            Some((a.x.mul(&b.x, f), a.z.mul(&b.z, f)))
        }
    }
    .or_else(|| pair_distillation_witness(&scheme.group, pair.first(), pair.second()).map(|w| (w.v, w.w)))
}

fn authorized_check(state: &NumericState, scheme: &EssScheme, pair: Pair) -> AuthorizedCheck {
    let skipped = |note: String| AuthorizedCheck {
        pair: pair.key(),
        status: Status::Skipped,
        witness_expectations: None,
        cut_spectrum: None,
        extractable: None,
        note: Some(note),
    };
    let Some((v, w)) = pair_operators(scheme, pair) else {
        return AuthorizedCheck {
            pair: pair.key(),
            status: Status::Failed,
            witness_expectations: None,
            cut_spectrum: None,
            extractable: None,
            note: Some("no witness operators".into()),
        };
    };
    let (ev, ew) = match (state.expectation(&v), state.expectation(&w)) {
        (Ok(a), Ok(b)) => (a.norm(), b.norm()),
        (Err(e), _) | (_, Err(e)) => return skipped(e.to_string()),
    };
    let mut ok = (ev - 1.0).abs() <= NUMERIC_TOL && (ew - 1.0).abs() <= NUMERIC_TOL;
    let (mut cut_spectrum, mut extractable) = (None, None);
    if scheme.group.is_pure() {
        match state.region_spectrum(pair.first()) {
            Ok(spec) => {
                let e = epr_extractable(&spec, scheme.p() as usize, CLUSTER_TOL);
                ok &= e;
                extractable = Some(e);
                cut_spectrum = Some(spec.values().iter().take(REPORTED_SPECTRUM).copied().collect());
            }
            Err(e) => return skipped(e.to_string()),
        }
    }
    AuthorizedCheck { pair: pair.key(), status: Status::from_bool(ok), witness_expectations: Some((ev, ew)), cut_spectrum, extractable, note: None }
}

/// Eigenvectors of a generic Hermitian combination of the commuting family
/// `family` restricted to `qudits`.
fn family_eigenbasis(p: u32, family: &[PauliString], qudits: &[usize], rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let d = (p as usize).pow(qudits.len() as u32);
    let mut h = DMatrix::<C64>::zeros(d, d);
    for s in family {
        let m = pauli_matrix(p, s, qudits);
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let herm = &m + m.adjoint();
        let anti = (&m - m.adjoint()) * C64::new(0.0, 1.0);
        h += herm * C64::new(a, 0.0) + anti * C64::new(b, 0.0);
    }
    SymmetricEigen::new(h).eigenvectors
}

/// Confirms that the reduced state of an unauthorized pair is diagonal in a
/// product basis adapted to the restrictions of the group to each side.
fn separability_check(state: &NumericState, g: &StabilizerGroup, pair: Pair, seed: u64) -> SeparabilityCheck {
    let mut out = SeparabilityCheck { pair: pair.key(), status: Status::Failed, max_off_diagonal: None, max_output_correlation: None, note: None };
    if pair_distillation_witness(g, pair.first(), pair.second()).is_some() {
        out.note = Some("group holds a distillation witness; no separability certificate".into());
        return out;
    }
    let layout = g.layout();
    let p = layout.p();
    let family = g.supported_subgroup(pair.union());
    let side = |t: PartySubset, qs: &[usize]| -> Vec<usize> {
        qs.iter().copied().filter(|&q| t.contains(layout.owner(q))).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for f in state.factors_touching(pair.union()) {
        let a = side(pair.first(), &f.qudits);
        let b = side(pair.second(), &f.qudits);
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let order: Vec<usize> = a.iter().chain(&b).copied().collect();
        let rho = match f.reduced_density(&order) {
            Ok(r) => r,
            Err(e) => {
                out.status = Status::Skipped;
                out.note = Some(e.to_string());
                return out;
            }
        };
        let local: Vec<PauliString> = family.iter().filter(|s| s.support().iter().any(|q| f.qudits.binary_search(q).is_ok())).cloned().collect();
        let basis = family_eigenbasis(p, &local, &a, &mut rng).kronecker(&family_eigenbasis(p, &local, &b, &mut rng));
        let rotated = basis.adjoint() * rho * basis;
        for i in 0..rotated.nrows() {
            for j in 0..rotated.ncols() {
                if i != j {
                    worst = worst.max(rotated[(i, j)].norm());
                }
            }
        }
    }
    out.max_off_diagonal = Some(worst);
    out.status = Status::from_bool(worst <= NUMERIC_TOL);
    out
}

/// The decoded qubits of two vertices in different components must be in the
/// maximally mixed state: every nontrivial Pauli on them has expectation zero.
fn fixed_channel_check(state: &NumericState, scheme: &EssScheme, pair: Pair) -> SeparabilityCheck {
    let mut out = SeparabilityCheck {
        pair: pair.key(),
        status: Status::Failed,
        max_off_diagonal: None,
        max_output_correlation: None,
        note: Some("fixed vertex channels only".into()),
    };
    let f = scheme.group.field();
    let (Some(a), Some(b)) = (scheme.vertex_witnesses.get(&pair.first()), scheme.vertex_witnesses.get(&pair.second())) else {
        out.note = Some("missing vertex witnesses".into());
        return out;
    };
    let identity = PauliString::identity(a.x.len());
    let ops = |x: &PauliString, z: &PauliString| [identity.clone(), x.clone(), z.clone(), x.mul(z, f)];
    let mut worst = 0.0f64;
    for (i, pa) in ops(&a.x, &a.z).iter().enumerate() {
        for (j, pb) in ops(&b.x, &b.z).iter().enumerate() {
            if i == 0 && j == 0 {
                continue;
            }
            match state.expectation(&pa.mul(pb, f)) {
                Ok(e) => worst = worst.max(e.norm()),
                Err(e) => {
                    out.status = Status::Skipped;
                    out.note = Some(e.to_string());
                    return out;
                }
            }
        }
    }
    out.max_output_correlation = Some(worst);
    out.status = Status::from_bool(worst <= NUMERIC_TOL);
    out
}

fn entropy_checks(state: &NumericState, g: &StabilizerGroup, s: &PairAccessStructure) -> Vec<EntropyCheck> {
    let ln_p = (g.layout().p() as f64).ln();
    s.vertices()
        .into_iter()
        .map(|t| {
            let partners: Vec<PartySubset> = s.authorized().iter().filter_map(|p| p.partner_of(t)).collect();
            let t_count = max_disjoint(&partners);
            let symbolic = g.entropy(t);
            match state.region_entropy(t) {
                Ok(e) => {
                    let numeric = e / ln_p;
                    let ok = (numeric - symbolic as f64).abs() <= NUMERIC_TOL && numeric >= t_count as f64 - NUMERIC_TOL;
                    EntropyCheck { vertex: t.key(), numeric, symbolic, disjoint_partners: t_count, status: Status::from_bool(ok) }
                }
                Err(_) => EntropyCheck { vertex: t.key(), numeric: f64::NAN, symbolic, disjoint_partners: t_count, status: Status::Skipped },
            }
        })
        .collect()
}

/// Builds the state of `scheme` and checks every listed pair numerically.
/// Entries whose matrices exceed the budget are reported as skipped.
pub fn verify_scheme_numerically(scheme: &EssScheme, s: &PairAccessStructure) -> NumericReport {
    let g = &scheme.group;
    let mut report = NumericReport {
        dimension: scheme.p(),
        pure: g.is_pure(),
        authorized: Vec::new(),
        unauthorized: Vec::new(),
        vertices: Vec::new(),
        skipped: 0,
        note: None,
        passed: false,
    };
    let state = match NumericState::build(g) {
        Ok(st) => st,
        Err(e) => {
            report.skipped = s.authorized().len() + s.unauthorized().len();
            report.note = Some(e.to_string());
            return report;
        }
    };
    report.authorized = s.authorized().iter().map(|&p| authorized_check(&state, scheme, p)).collect();
    let conditions = (scheme.mode == SchemeMode::Unknown).then(|| structure_report(s));
    report.unauthorized = s
        .unauthorized()
        .iter()
        .enumerate()
        .map(|(i, &p)| match &conditions {
            Some(c) if c.across_components(p) => fixed_channel_check(&state, scheme, p),
            _ => separability_check(&state, g, p, i as u64),
        })
        .collect();
    report.vertices = entropy_checks(&state, g, s);
    report.skipped = report.authorized.iter().filter(|c| c.status == Status::Skipped).count()
        + report.unauthorized.iter().filter(|c| c.status == Status::Skipped).count()
        + report.vertices.iter().filter(|c| c.status == Status::Skipped).count();
    report.passed = report.authorized.iter().all(|c| c.status != Status::Failed)
        && report.unauthorized.iter().all(|c| c.status != Status::Failed)
        && report.vertices.iter().all(|c| c.status != Status::Failed);
    report
}

/// Numeric verdict for a single pair: `Some(true)` distillable, `Some(false)`
/// separable, `None` when the budget does not allow a verdict.
pub fn numeric_pair_verdict(state: &NumericState, scheme: &EssScheme, pair: Pair) -> Option<bool> {
    if pair_distillation_witness(&scheme.group, pair.first(), pair.second()).is_some() {
        return match authorized_check(state, scheme, pair).status {
            Status::Passed => Some(true),
            Status::Failed => Some(false),
            Status::Skipped => None,
        };
    }
    match separability_check(state, &scheme.group, pair, 0).status {
        Status::Passed => Some(false),
        Status::Failed => Some(true),
        Status::Skipped => None,
    }
}
