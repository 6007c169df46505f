//! Entanglement summoning on a ring of labs, reduced to unknown-partner sharing.
//!
//! Lab `i` (1-based) holds two subsystems `Y_{i,-}` and `Y_{i,+}`, mapped to
//! parties `2(i-1)` and `2(i-1)+1`. A request at lab `i` is served from
//! `T_i = Y_{i-1,+} Y_{i,-} Y_{i,+} Y_{i+1,-}`, and every pair of non-adjacent
//! labs must be able to share an EPR pair.

use serde::Serialize;
use thiserror::Error;

use crate::access::{Pair, PairAccessStructure, PartySubset, MAX_PARTIES};
use crate::scheme::EssScheme;
use crate::unknown::{feasibility_unknown, synthesize_unknown, UnknownCertificate, UnknownError, UnknownVerdict};

#[derive(Debug, Error)]
pub enum SummonError {
    #[error("no non-adjacent request pattern exists on a ring of {0} labs")]
    TooSmall(usize),
    #[error("a ring of {0} labs needs more than {MAX_PARTIES} subsystems")]
    TooLarge(usize),
    #[error(transparent)]
    Unknown(#[from] UnknownError),
}

/// The ring size for which the reduction is worked out by hand; other sizes
/// apply the same construction mechanically.
pub const REFERENCE_RING: usize = 5;

#[derive(Clone, Debug)]
pub struct RingReduction {
    pub n: usize,
    /// `T_1, …, T_n`.
    pub vertices: Vec<PartySubset>,
    pub structure: PairAccessStructure,
    /// Non-adjacent lab pairs whose sets overlap, left out of the structure.
    pub excluded: Vec<(usize, usize)>,
}

impl RingReduction {
    /// 1-based lab index of a vertex.
    pub fn label_of(&self, t: PartySubset) -> Option<usize> {
        self.vertices.iter().position(|&v| v == t).map(|i| i + 1)
    }
}

pub fn subsystem_name(party: usize) -> String {
    format!("Y{}{}", party / 2 + 1, if party % 2 == 0 { '-' } else { '+' })
}

fn minus(i: usize) -> usize {
    2 * i
}

fn plus(i: usize) -> usize {
    2 * i + 1
}

/// Ring distance between 0-based labs.
fn distance(n: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

pub fn ring_structure(n: usize) -> Result<RingReduction, SummonError> {
    if n <= 3 {
        return Err(SummonError::TooSmall(n));
    }
    if 2 * n > MAX_PARTIES {
        return Err(SummonError::TooLarge(n));
    }
    let vertices: Vec<PartySubset> = (0..n)
        .map(|i| {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            PartySubset::from_parties([plus(prev), minus(i), plus(i), minus(next)])
        })
        .collect();
    let mut authorized = Vec::new();
    let mut excluded = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if distance(n, i, j) < 2 {
                continue;
            }
            match Pair::new(vertices[i], vertices[j]) {
                Ok(p) => authorized.push(p),
                Err(_) => excluded.push((i + 1, j + 1)),
            }
        }
    }
    let structure = PairAccessStructure::new(2 * n, authorized, std::iter::empty()).expect("parties in range");
    Ok(RingReduction { n, vertices, structure, excluded })
}

#[derive(Clone, Debug)]
pub enum SummonVerdict {
    Feasible { scheme: Box<EssScheme> },
    Infeasible { certificate: UnknownCertificate, cycle: Option<Vec<usize>> },
}

#[derive(Clone, Debug)]
pub struct SummonOutcome {
    pub reduction: RingReduction,
    pub verdict: SummonVerdict,
}

#[derive(Serialize)]
struct OutcomeJson<'a> {
    ring: usize,
    verdict: &'static str,
    extrapolated: bool,
    vertices: Vec<VertexJson>,
    excluded: &'a [(usize, usize)],
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<Vec<[String; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    share_sizes: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct VertexJson {
    label: String,
    subsystems: Vec<String>,
}

impl SummonOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, SummonVerdict::Feasible { .. })
    }

    /// Edges of the odd cycle as lab labels, closing back to the start.
    pub fn cycle_edges(&self) -> Option<Vec<(usize, usize)>> {
        match &self.verdict {
            SummonVerdict::Infeasible { cycle: Some(c), .. } => {
                Some((0..c.len()).map(|k| (c[k], c[(k + 1) % c.len()])).collect())
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let r = &self.reduction;
        let vertices = r
            .vertices
            .iter()
            .enumerate()
            .map(|(i, t)| VertexJson { label: format!("T{}", i + 1), subsystems: t.iter().map(subsystem_name).collect() })
            .collect();
        let (certificate, share_sizes) = match &self.verdict {
            SummonVerdict::Feasible { scheme } => (None, Some(scheme.share_sizes())),
            SummonVerdict::Infeasible { certificate, .. } => (Some(certificate.to_json()), None),
        };
        let file = OutcomeJson {
            ring: r.n,
            verdict: if self.is_feasible() { "feasible" } else { "infeasible" },
            extrapolated: r.n != REFERENCE_RING,
            vertices,
            excluded: &r.excluded,
            cycle: self
                .cycle_edges()
                .map(|e| e.into_iter().map(|(a, b)| [format!("T{a}"), format!("T{b}")]).collect()),
            certificate,
            share_sizes,
        };
        serde_json::to_value(file).expect("serializable")
    }
}

/// Rotates a cycle of labels to start at its least label and walks toward the
/// smaller neighbour.
fn canonical_labels(mut c: Vec<usize>) -> Vec<usize> {
    let k = c.iter().enumerate().min_by_key(|e| e.1).map(|e| e.0).unwrap_or(0);
    c.rotate_left(k);
    if c.len() > 2 && c[c.len() - 1] < c[1] {
        c[1..].reverse();
    }
    c
}

pub fn summon_feasible(n: usize) -> Result<SummonOutcome, SummonError> {
    let reduction = ring_structure(n)?;
    let verdict = match feasibility_unknown(&reduction.structure) {
        UnknownVerdict::Feasible { .. } => {
            SummonVerdict::Feasible { scheme: Box::new(synthesize_unknown(&reduction.structure)?) }
        }
        UnknownVerdict::Infeasible(certificate) => {
            let cycle = match &certificate {
                UnknownCertificate::OddCycle { cycle } => cycle
                    .iter()
                    .map(|k| PartySubset::parse_key(k.trim_matches(|c| c == '{' || c == '}')).ok().and_then(|t| reduction.label_of(t)))
                    .collect::<Option<Vec<usize>>>()
                    .map(canonical_labels),
                _ => None,
            };
            SummonVerdict::Infeasible { certificate, cycle }
        }
    };
    Ok(SummonOutcome { reduction, verdict })
}
