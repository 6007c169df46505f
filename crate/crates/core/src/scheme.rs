//! Synthesized entanglement sharing schemes and their JSON form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access::{AccessError, Pair, PairAccessStructure, PartySubset};
use crate::pauli::{commutation_phase, PauliError, PauliString, StabilizerGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error("invalid scheme file: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeMode {
    Known,
    Unknown,
}

/// Group elements `(V, W)` supported on a pair with `κ_{T1}(V, W) = phase ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWitness {
    pub t1: PartySubset,
    pub v: PauliString,
    pub w: PauliString,
    pub phase: u32,
}

/// Fixed per-vertex operators `(X_T, Z_T)` used in the unknown-partner setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWitness {
    pub x: PauliString,
    pub z: PauliString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssScheme {
    pub mode: SchemeMode,
    pub group: StabilizerGroup,
    /// Witnesses for minimal authorized pairs (known partner).
    pub witnesses: BTreeMap<Pair, PairWitness>,
    /// Non-minimal authorized pairs and the minimal pair whose witness they reuse.
    pub delegations: BTreeMap<Pair, Pair>,
    pub vertex_witnesses: BTreeMap<PartySubset, VertexWitness>,
}

#[derive(Serialize, Deserialize)]
struct WitnessEntry {
    pair: String,
    t1: String,
    v: String,
    w: String,
    phase: u32,
}

#[derive(Serialize, Deserialize)]
struct DelegationEntry {
    pair: String,
    via: String,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    vertex: String,
    x: String,
    z: String,
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    mode: SchemeMode,
    p: u32,
    parties: usize,
    tableau: String,
    #[serde(default)]
    witnesses: Vec<WitnessEntry>,
    #[serde(default)]
    delegations: Vec<DelegationEntry>,
    #[serde(default)]
    vertex_witnesses: Vec<VertexEntry>,
}

impl EssScheme {
    pub fn new(mode: SchemeMode, group: StabilizerGroup) -> Self {
        EssScheme {
            mode,
            group,
            witnesses: BTreeMap::new(),
            delegations: BTreeMap::new(),
            vertex_witnesses: BTreeMap::new(),
        }
    }

    pub fn p(&self) -> u32 {
        self.group.layout().p()
    }

    pub fn parties(&self) -> usize {
        self.group.layout().parties()
    }

    /// Recorded witness for `pair`, following a delegation if needed.
    pub fn witness_for(&self, pair: Pair) -> Option<&PairWitness> {
        self.witnesses
            .get(&pair)
            .or_else(|| self.delegations.get(&pair).and_then(|via| self.witnesses.get(via)))
    }

    /// Checks a recorded witness against `pair`: both operators in the group,
    /// supported on the pair, with nonzero phase on one side.
    pub fn witness_is_valid(&self, pair: Pair, w: &PairWitness) -> bool {
        let layout = self.group.layout();
        let mask = layout.mask_of(pair.union());
        let supported = |s: &PauliString| s.support().iter().all(|&q| mask[q]);
        self.group.contains(&w.v)
            && self.group.contains(&w.w)
            && supported(&w.v)
            && supported(&w.w)
            && commutation_phase(layout, &w.v, &w.w, Some(pair.first())) != 0
    }

    /// Qudits held by each party.
    pub fn share_sizes(&self) -> Vec<usize> {
        self.group.layout().share_sizes()
    }

    pub fn to_json_string(&self) -> String {
        let file = SchemeFile {
            mode: self.mode,
            p: self.p(),
            parties: self.parties(),
            tableau: self.group.to_tableau(),
            witnesses: self
                .witnesses
                .iter()
                .map(|(pair, w)| WitnessEntry {
                    pair: pair.key(),
                    t1: w.t1.key(),
                    v: w.v.encode(),
                    w: w.w.encode(),
                    phase: w.phase,
                })
                .collect(),
            delegations: self
                .delegations
                .iter()
                .map(|(pair, via)| DelegationEntry { pair: pair.key(), via: via.key() })
                .collect(),
            vertex_witnesses: self
                .vertex_witnesses
                .iter()
                .map(|(t, vw)| VertexEntry { vertex: t.key(), x: vw.x.encode(), z: vw.z.encode() })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }

    pub fn from_json_str(s: &str) -> Result<Self, SchemeError> {
        let file: SchemeFile = serde_json::from_str(s).map_err(|e| SchemeError::Json(e.to_string()))?;
        let group = StabilizerGroup::from_tableau(&file.tableau)?;
        if group.layout().p() != file.p || group.layout().parties() != file.parties {
            return Err(SchemeError::Json("header fields disagree with the tableau".into()));
        }
        let m = group.qudits();
        let decode = |t: &str| -> Result<PauliString, SchemeError> {
            let s = PauliString::decode(t, file.p)?;
            if s.len() != m {
                return Err(SchemeError::Pauli(PauliError::LengthMismatch { expected: m, found: s.len() }));
            }
            Ok(s)
        };
        let mut scheme = EssScheme::new(file.mode, group.clone());
        for e in &file.witnesses {
            scheme.witnesses.insert(
                Pair::parse_key(&e.pair)?,
                PairWitness { t1: PartySubset::parse_key(&e.t1)?, v: decode(&e.v)?, w: decode(&e.w)?, phase: e.phase },
            );
        }
        for e in &file.delegations {
            scheme.delegations.insert(Pair::parse_key(&e.pair)?, Pair::parse_key(&e.via)?);
        }
        for e in &file.vertex_witnesses {
            scheme
                .vertex_witnesses
                .insert(PartySubset::parse_key(&e.vertex)?, VertexWitness { x: decode(&e.x)?, z: decode(&e.z)? });
        }
        Ok(scheme)
    }
}

/// Whether party `i` is significant: some unauthorized `{T1, T2}` becomes
/// authorized as `{T1 ∪ {i}, T2}`.
pub fn significant_parties(s: &PairAccessStructure) -> Vec<usize> {
    let all: Vec<Pair> = s.unauthorized().iter().copied().collect();
    significant_parties_among(s, &all)
}

/// As [`significant_parties`], witnessed only by the given unauthorized pairs.
pub fn significant_parties_among(s: &PairAccessStructure, unauthorized: &[Pair]) -> Vec<usize> {
    (0..s.parties())
        .filter(|&i| {
            unauthorized.iter().any(|u| {
                [(u.first(), u.second()), (u.second(), u.first())].iter().any(|&(t1, t2)| {
                    !t1.contains(i)
                        && !t2.contains(i)
                        && s.is_implied_authorized(Pair::new(t1.with(i), t2).expect("disjoint"))
                })
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShareCheck {
    pub party: usize,
    pub qudits: usize,
    pub passed: bool,
}

/// Every significant party must hold at least one qudit (an EPR pair of
/// dimension `p` needs `log d_S ≥ log p`).
pub fn significant_share_checks(scheme: &EssScheme, s: &PairAccessStructure) -> Vec<ShareCheck> {
    share_checks(scheme, significant_parties(s))
}

pub fn share_checks(scheme: &EssScheme, parties: Vec<usize>) -> Vec<ShareCheck> {
    let sizes = scheme.share_sizes();
    parties
        .into_iter()
        .map(|i| {
            let q = sizes.get(i).copied().unwrap_or(0);
            ShareCheck { party: i, qudits: q, passed: q >= 1 }
        })
        .collect()
}
