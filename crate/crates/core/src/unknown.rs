//! Unknown-partner schemes over qubits: graph conditions, the linear system
//! for the commutation vectors `u_pq`, synthesis and verification.
//!
//! Variables are the coordinates of `u_pq` inside `T_p ∩ T_q` for every
//! ordered vertex pair of a component. Constraints:
//! * `z_0 · u_pq = 1` iff `T_p`, `T_q` lie on the same side;
//! * when unauthorized pairs are listed, `z_R · (u_pq + u_ps + u_rq + u_rs) = 0`
//!   for every `R` outside the flattening and every two tree edges `(p, r)`, `(q, s)`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::access::{
    all_subsets, preceq, structure_report, AccessError, Component, ConditionReport, MonotonicityViolation, Pair,
    PairAccessStructure, PartySubset, PathViolation, WeakMonotonicityViolation,
};
use crate::field::{PrimeField, RowReducer};
use crate::pauli::{commutation_phase, pair_distillation_witness, PauliError, PauliString, QuditLayout, StabilizerGroup};
use crate::qss::{build_qss, QssError, SetAccessStructure};
use crate::scheme::{share_checks, significant_parties_among, EssScheme, SchemeMode, ShareCheck, VertexWitness};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnknownError {
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Qss(#[from] QssError),
    #[error("structure is not realizable: {0}")]
    Infeasible(Box<UnknownCertificate>),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, UnknownError>;

/// Which separability constraints to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadruples {
    /// Pairs of spanning-tree edges.
    SpanningTree,
    /// Every quadruple of vertices in the component.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    SameSide { p: String, q: String, rhs: u32 },
    Separability { region: String, p: String, r: String, q: String, s: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum UnknownCertificate {
    NotMonotone { violations: Vec<MonotonicityViolation> },
    OddCycle { cycle: Vec<String> },
    Monogamy { violation: PathViolation },
    Transitivity { violation: PathViolation },
    WeakMonotonicity { violation: WeakMonotonicityViolation },
    /// The listed constraint is the first one that makes the system inconsistent.
    Unsolvable { component: Vec<String>, constraint: Constraint },
}

impl std::fmt::Display for UnknownCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnknownCertificate::NotMonotone { violations } => write!(
                f,
                "authorized pair {} lies below unauthorized pair {}",
                violations[0].authorized, violations[0].unauthorized
            ),
            UnknownCertificate::OddCycle { cycle } => write!(f, "odd cycle of length {}: {}", cycle.len(), cycle.join(" - ")),
            UnknownCertificate::Monogamy { violation } => {
                write!(f, "monogamy: {} and {} are an even path apart but disjoint", violation.from, violation.to)
            }
            UnknownCertificate::Transitivity { violation } => {
                write!(f, "transitivity: {} and {} are an odd path apart, disjoint, and not authorized", violation.from, violation.to)
            }
            UnknownCertificate::WeakMonotonicity { violation } => {
                write!(f, "weak monotonicity: {} extends pair {} but has no partner", violation.superset, violation.pair)
            }
            UnknownCertificate::Unsolvable { constraint, .. } => write!(f, "commutation system has no solution at {constraint:?}"),
        }
    }
}

impl UnknownCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        v["verdict"] = "infeasible".into();
        v
    }
}

/// A solved component: `u[(p, q)]` is a length-`n` vector over F_2, indexed by
/// positions in `vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSolution {
    pub vertices: Vec<PartySubset>,
    /// Side of each vertex; the least vertex is on side 0.
    pub sides: Vec<u8>,
    pub u: BTreeMap<(usize, usize), Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownVerdict {
    Feasible { maximality: bool, components: Vec<ComponentSolution> },
    Infeasible(UnknownCertificate),
}

impl UnknownVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, UnknownVerdict::Feasible { .. })
    }
}

/// Condition failures from the structure report, in the order they are checked.
pub fn condition_certificate(s: &PairAccessStructure, report: &ConditionReport) -> Option<UnknownCertificate> {
    if !report.monotonicity.is_empty() {
        return Some(UnknownCertificate::NotMonotone { violations: report.monotonicity.clone() });
    }
    if let Some(cycle) = &report.odd_cycle {
        return Some(UnknownCertificate::OddCycle { cycle: cycle.iter().map(|t| t.to_string()).collect() });
    }
    if let Some(v) = report.monogamy.first() {
        return Some(UnknownCertificate::Monogamy { violation: v.clone() });
    }
    if report.maximality_applies {
        if let Some(v) = report.transitivity.first() {
            return Some(UnknownCertificate::Transitivity { violation: v.clone() });
        }
        if let Some(v) = report.weak_monotonicity.first() {
            return Some(UnknownCertificate::WeakMonotonicity { violation: v.clone() });
        }
    }
    debug_assert!(s.parties() <= crate::access::MAX_PARTIES);
    None
}

struct System {
    n: usize,
    /// Column offset of each ordered pair's variables, and the parties they cover.
    offsets: BTreeMap<(usize, usize), (usize, Vec<usize>)>,
    cols: usize,
}

impl System {
    fn new(n: usize, vertices: &[PartySubset]) -> Self {
        let mut offsets = BTreeMap::new();
        let mut cols = 0;
        for p in 0..vertices.len() {
            for q in 0..vertices.len() {
                let parties = vertices[p].intersection(vertices[q]).to_vec();
                let width = parties.len();
                offsets.insert((p, q), (cols, parties));
                cols += width;
            }
        }
        System { n, offsets, cols }
    }

    /// Row of `z_R · u_pq` contributions added into `row`.
    fn add_dot(&self, row: &mut [u32], region: PartySubset, p: usize, q: usize) {
        let (off, parties) = &self.offsets[&(p, q)];
        for (k, &s) in parties.iter().enumerate() {
            if region.contains(s) {
                row[off + k] ^= 1;
            }
        }
    }

    fn unpack(&self, x: &[u32]) -> BTreeMap<(usize, usize), Vec<u32>> {
        self.offsets
            .iter()
            .map(|(&key, (off, parties))| {
                let mut u = vec![0u32; self.n];
                for (k, &s) in parties.iter().enumerate() {
                    u[s] = x[off + k];
                }
                (key, u)
            })
            .collect()
    }
}

fn solve_component(
    s: &PairAccessStructure,
    report: &ConditionReport,
    comp: &Component,
    maximality: bool,
    mode: Quadruples,
) -> std::result::Result<ComponentSolution, UnknownCertificate> {
    let n = s.parties();
    let graph = &report.graph;
    let vertices: Vec<PartySubset> = comp.vertices.iter().map(|&v| graph.vertices[v]).collect();
    let local: BTreeMap<usize, usize> = comp.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let coloring = comp.coloring.as_ref().expect("bipartite component");
    let sides: Vec<u8> = comp.vertices.iter().map(|v| coloring[v]).collect();
    let sys = System::new(n, &vertices);
    let f2 = PrimeField::new(2).expect("prime");
    let mut reducer = RowReducer::new(f2, sys.cols + 1);
    let names = |i: usize| vertices[i].to_string();
    let component_names = || vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    let full = PartySubset::full(n);
    let k = vertices.len();

    let mut push = |row: Vec<u32>, constraint: &dyn Fn() -> Constraint| -> std::result::Result<(), UnknownCertificate> {
        if reducer.insert(&row) == Some(sys.cols) {
            return Err(UnknownCertificate::Unsolvable { component: component_names(), constraint: constraint() });
        }
        Ok(())
    };

    for p in 0..k {
        for q in 0..k {
            let rhs = u32::from(sides[p] == sides[q]);
            let mut row = vec![0u32; sys.cols + 1];
            sys.add_dot(&mut row, full, p, q);
            row[sys.cols] = rhs;
            push(row, &|| Constraint::SameSide { p: names(p), q: names(q), rhs })?;
        }
    }

    if maximality {
        let flattening: std::collections::BTreeSet<PartySubset> = graph.vertices.iter().copied().collect();
        let regions: Vec<PartySubset> = all_subsets(n).into_iter().filter(|r| !r.is_empty() && !flattening.contains(r)).collect();
        let quads: Vec<(usize, usize, usize, usize)> = match mode {
            Quadruples::SpanningTree => {
                let edges: Vec<(usize, usize)> = comp.tree_edges().into_iter().map(|(a, b)| (local[&a], local[&b])).collect();
                let mut v = Vec::new();
                for &(p, r) in &edges {
                    for &(q, s2) in &edges {
                        v.push((p, r, q, s2));
                    }
                }
                v
            }
            Quadruples::Full => {
                let mut v = Vec::new();
                for p in 0..k {
                    for r in 0..k {
                        for q in 0..k {
                            for s2 in 0..k {
                                v.push((p, r, q, s2));
                            }
                        }
                    }
                }
                v
            }
        };
        for &region in &regions {
            for &(p, r, q, s2) in &quads {
                let mut row = vec![0u32; sys.cols + 1];
                for (a, b) in [(p, q), (p, s2), (r, q), (r, s2)] {
                    sys.add_dot(&mut row, region, a, b);
                }
                push(row, &|| Constraint::Separability {
                    region: region.to_string(),
                    p: names(p),
                    r: names(r),
                    q: names(q),
                    s: names(s2),
                })?;
            }
        }
    }

    // Reduced rows have distinct pivots; free variables are set to zero.
    let mut x = vec![0u32; sys.cols];
    for (row, &pivot) in reducer.basis().iter().zip(reducer.pivots()) {
        x[pivot] = row[sys.cols];
    }
    Ok(ComponentSolution { u: sys.unpack(&x), vertices: vertices.clone(), sides })
}

pub fn feasibility_unknown_with(s: &PairAccessStructure, mode: Quadruples) -> UnknownVerdict {
    let report = structure_report(s);
    if let Some(c) = condition_certificate(s, &report) {
        return UnknownVerdict::Infeasible(c);
    }
    let maximality = report.maximality_applies;
    let mut components = Vec::new();
    for comp in &report.components {
        match solve_component(s, &report, comp, maximality, mode) {
            Ok(sol) => components.push(sol),
            Err(c) => return UnknownVerdict::Infeasible(c),
        }
    }
    UnknownVerdict::Feasible { maximality, components }
}

pub fn feasibility_unknown(s: &PairAccessStructure) -> UnknownVerdict {
    feasibility_unknown_with(s, Quadruples::SpanningTree)
}

/// One qubit per nonzero coordinate of each `u_pq`; generators
/// `X_root X_p`, `Z_root Z_p` per component.
pub fn synthesize_unknown(s: &PairAccessStructure) -> Result<EssScheme> {
    let components = match feasibility_unknown(s) {
        UnknownVerdict::Feasible { components, .. } => components,
        UnknownVerdict::Infeasible(c) => return Err(UnknownError::Infeasible(Box::new(c))),
    };
    let mut owners = Vec::new();
    // (component, vertex) receiving X and Z on each qubit
    let mut marks: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for (c, sol) in components.iter().enumerate() {
        for (&(p, q), u) in &sol.u {
            for (party, &bit) in u.iter().enumerate() {
                if bit == 1 {
                    owners.push(party);
                    marks.push(((c, p), (c, q)));
                }
            }
        }
    }
    let m = owners.len();
    let field = PrimeField::new(2).expect("prime");
    let layout = QuditLayout::new(field, s.parties(), owners)?;
    let mut ops: BTreeMap<(usize, usize), VertexWitness> = BTreeMap::new();
    for (c, sol) in components.iter().enumerate() {
        for v in 0..sol.vertices.len() {
            ops.insert((c, v), VertexWitness { x: PauliString::identity(m), z: PauliString::identity(m) });
        }
    }
    for (qubit, (xv, zv)) in marks.iter().enumerate() {
        ops.get_mut(xv).expect("vertex").x.x[qubit] = 1;
        ops.get_mut(zv).expect("vertex").z.z[qubit] = 1;
    }
    let mut gens = Vec::new();
    for (c, sol) in components.iter().enumerate() {
        let root = &ops[&(c, 0)];
        for v in 1..sol.vertices.len() {
            gens.push(root.x.mul(&ops[&(c, v)].x, field));
            gens.push(root.z.mul(&ops[&(c, v)].z, field));
        }
    }
    let group = StabilizerGroup::new_reduced(layout, gens)?;
    let mut scheme = EssScheme::new(SchemeMode::Unknown, group);
    for (c, sol) in components.iter().enumerate() {
        for (v, &t) in sol.vertices.iter().enumerate() {
            scheme.vertex_witnesses.insert(t, ops[&(c, v)].clone());
        }
    }
    Ok(scheme)
}

/// Scheme built from one EPR pair per component whose halves are shared with
/// secret sharing over the two sides.
#[derive(Clone, Debug)]
pub struct BipartiteQss {
    pub scheme: EssScheme,
    /// Initialization qubits of each minimal set of each side, as global indices.
    pub init_qubits: Vec<Vec<usize>>,
}

pub fn bipartite_qss(s: &PairAccessStructure) -> Result<BipartiteQss> {
    if !s.unauthorized().is_empty() {
        return Err(UnknownError::Unsupported("the secret-sharing construction takes structures without unauthorized pairs".into()));
    }
    let report = structure_report(s);
    if let Some(c) = condition_certificate(s, &report) {
        return Err(UnknownError::Infeasible(Box::new(c)));
    }
    let n = s.parties();
    let field = PrimeField::new(2).expect("prime");
    // Each side: (vertices, scheme), in component order then side 0, side 1.
    let mut sides = Vec::new();
    for comp in &report.components {
        let coloring = comp.coloring.as_ref().expect("bipartite");
        for side in [0u8, 1] {
            let members: Vec<PartySubset> =
                comp.vertices.iter().filter(|v| coloring[v] == side).map(|&v| report.graph.vertices[v]).collect();
            let structure = SetAccessStructure::from_minimal(n, members.iter().copied())?;
            sides.push((members, build_qss(&structure)?));
        }
    }
    let mut owners = Vec::new();
    let mut offsets = Vec::new();
    for (_, q) in &sides {
        offsets.push(owners.len());
        owners.extend_from_slice(&q.layout.owners()[..q.reference]);
    }
    let m = owners.len();
    let layout = QuditLayout::new(field, n, owners)?;
    let embed = |s: &PauliString, off: usize, reference: usize| {
        let mut out = PauliString::identity(m);
        out.x[off..off + reference].copy_from_slice(&s.x[..reference]);
        out.z[off..off + reference].copy_from_slice(&s.z[..reference]);
        out
    };
    let mut logicals: Vec<Vec<(PauliString, PauliString)>> = Vec::new();
    let mut init_qubits = Vec::new();
    for ((_, q), &off) in sides.iter().zip(&offsets) {
        logicals.push(q.logicals.iter().map(|(x, z)| (embed(x, off, q.reference), embed(z, off, q.reference))).collect());
        init_qubits.extend(q.init_qubits.iter().map(|v| v.iter().map(|&k| k + off).collect::<Vec<_>>()));
    }
    let mut gens = Vec::new();
    for side in &logicals {
        let (x0, z0) = &side[0];
        for (x, z) in &side[1..] {
            gens.push(x0.mul(x, field));
            gens.push(z0.mul(z, field));
        }
    }
    for pair in logicals.chunks(2) {
        let ((xl, zl), (xr, zr)) = (&pair[0][0], &pair[1][0]);
        gens.push(xl.mul(xr, field));
        gens.push(zl.mul(zr, field));
    }
    let group = StabilizerGroup::new_reduced(layout, gens)?;
    let mut scheme = EssScheme::new(SchemeMode::Unknown, group);
    for ((members, q), side_logicals) in sides.iter().zip(&logicals) {
        for &t in members {
            let i = q.minimal_sets.iter().position(|a| a.is_subset_of(t)).expect("closure contains the vertex");
            let (x, z) = &side_logicals[i];
            scheme.vertex_witnesses.insert(t, VertexWitness { x: x.clone(), z: z.clone() });
        }
    }
    Ok(BipartiteQss { scheme, init_qubits })
}

pub fn synthesize_bipartite_qss(s: &PairAccessStructure) -> Result<EssScheme> {
    bipartite_qss(s).map(|b| b.scheme)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeCheck {
    pub pair: String,
    pub in_group: bool,
    pub phase: u32,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexCheck {
    pub vertex: String,
    pub supported: bool,
    pub anticommute: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionCheck {
    pub region: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub first: String,
    pub second: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCheck {
    pub from: String,
    pub to: String,
    pub length: usize,
    pub phase: u32,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnknownReport {
    pub vertices: Vec<VertexCheck>,
    pub edges: Vec<EdgeCheck>,
    pub calibrated: bool,
    /// Maximality checks run only for structures that list unauthorized pairs.
    pub maximality_checked: bool,
    pub separable_regions: Vec<RegionCheck>,
    pub cross_component: Vec<CrossCheck>,
    pub path_relations: Vec<PathCheck>,
    /// Listed unauthorized pairs with a known-partner witness (informational).
    pub unauthorized_with_witness: Vec<String>,
    pub significant_shares: Vec<ShareCheck>,
    pub passed: bool,
}

fn combos(x: &PauliString, z: &PauliString, f: PrimeField) -> [PauliString; 3] {
    [x.clone(), z.clone(), x.mul(z, f)]
}

pub fn verify_unknown(scheme: &EssScheme, s: &PairAccessStructure) -> UnknownReport {
    let g = &scheme.group;
    let layout = g.layout();
    let f = g.field();
    let report = structure_report(s);
    let graph = &report.graph;
    let witness = |t: PartySubset| scheme.vertex_witnesses.get(&t);

    let vertices: Vec<VertexCheck> = graph
        .vertices
        .iter()
        .map(|&t| match witness(t) {
            Some(w) => {
                let mask = layout.mask_of(t);
                let supported = w.x.support().iter().chain(w.z.support().iter()).all(|&q| mask[q]);
                let anticommute = commutation_phase(layout, &w.x, &w.z, None) != 0;
                VertexCheck { vertex: t.key(), supported, anticommute, passed: supported && anticommute }
            }
            None => VertexCheck { vertex: t.key(), supported: false, anticommute: false, passed: false },
        })
        .collect();

    let edges: Vec<EdgeCheck> = s
        .authorized()
        .iter()
        .map(|&pair| match (witness(pair.first()), witness(pair.second())) {
            (Some(a), Some(b)) => {
                let xx = a.x.mul(&b.x, f);
                let zz = a.z.mul(&b.z, f);
                let in_group = g.contains(&xx) && g.contains(&zz);
                let phase = commutation_phase(layout, &xx, &zz, Some(pair.first()));
                EdgeCheck { pair: pair.key(), in_group, phase, passed: in_group && phase != 0 }
            }
            _ => EdgeCheck { pair: pair.key(), in_group: false, phase: 0, passed: false },
        })
        .collect();
    // With fixed per-vertex operators every edge must show the same phase.
    let calibrated = edges.iter().all(|e| e.passed && e.phase == edges[0].phase);

    let maximality_checked = report.maximality_applies;
    let mut separable_regions = Vec::new();
    let mut cross_component = Vec::new();
    if maximality_checked {
        let n = s.parties();
        let full = PartySubset::full(n);
        for region in all_subsets(n) {
            if region.is_empty() || region == full || graph.index_of(region).is_some() {
                continue;
            }
            let passed = pair_distillation_witness(g, region, region.complement(n)).is_none();
            separable_regions.push(RegionCheck { region: region.key(), passed });
        }
        for (i, &a) in graph.vertices.iter().enumerate() {
            for (j, &b) in graph.vertices.iter().enumerate().skip(i + 1) {
                if !a.is_disjoint(b) || report.component_of(i) == report.component_of(j) {
                    continue;
                }
                let passed = match (witness(a), witness(b)) {
                    (Some(wa), Some(wb)) => combos(&wa.x, &wa.z, f)
                        .iter()
                        .all(|pa| combos(&wb.x, &wb.z, f).iter().all(|pb| !g.contains(&pa.mul(pb, f)))),
                    _ => false,
                };
                cross_component.push(CrossCheck { first: a.key(), second: b.key(), passed });
            }
        }
    }

    let mut path_relations = Vec::new();
    for comp in &report.components {
        for (i, &a) in comp.vertices.iter().enumerate() {
            for &b in &comp.vertices[i..] {
                let path = comp.tree_path(a, b);
                let (ta, tb) = (graph.vertices[a], graph.vertices[b]);
                let (Some(wa), Some(wb)) = (witness(ta), witness(tb)) else { continue };
                let len = path.len() - 1;
                let phase = commutation_phase(layout, &wa.x, &wb.z, None);
                let expected = u32::from(len % 2 == 0);
                path_relations.push(PathCheck { from: ta.key(), to: tb.key(), length: len, phase, passed: phase == expected });
            }
        }
    }

    let unauthorized_with_witness = s
        .unauthorized()
        .iter()
        .filter(|u| pair_distillation_witness(g, u.first(), u.second()).is_some())
        .map(|u| u.key())
        .collect();
    // The share bound needs a separable unauthorized state, which pairs
    // across components need not have.
    let separable: Vec<Pair> = s.unauthorized().iter().copied().filter(|&u| !report.across_components(u)).collect();
    let significant_shares = share_checks(scheme, significant_parties_among(s, &separable));

    let passed = vertices.iter().all(|c| c.passed)
        && edges.iter().all(|c| c.passed)
        && calibrated
        && separable_regions.iter().all(|c| c.passed)
        && cross_component.iter().all(|c| c.passed)
        && path_relations.iter().all(|c| c.passed)
        && significant_shares.iter().all(|c| c.passed);
    UnknownReport {
        vertices,
        edges,
        calibrated,
        maximality_checked,
        separable_regions,
        cross_component,
        path_relations,
        unauthorized_with_witness,
        significant_shares,
        passed,
    }
}

/// Lists as unauthorized every pair not lying above one of `authorized`.
pub fn with_complement(n: usize, authorized: &[Pair]) -> Result<PairAccessStructure> {
    let rest: Vec<Pair> = crate::access::all_pairs(n)
        .into_iter()
        .filter(|&p| !authorized.iter().any(|&a| preceq(a, p)))
        .collect();
    Ok(PairAccessStructure::new(n, authorized.iter().copied(), rest)?)
}
