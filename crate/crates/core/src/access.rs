//! Party subsets, pair access structures and the authorization graph.
//!
//! Subsets are ordered shortlex: by size first, then lexicographically on
//! their sorted elements. A pair is stored with its smaller subset first and
//! pairs compare component-wise. Every enumeration in the crate follows this
//! order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_PARTIES: usize = 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AccessError {
    #[error("{0} parties requested, at most {MAX_PARTIES} are supported")]
    TooManyParties(usize),
    #[error("party {party} is out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },
    #[error("pair contains an empty subset")]
    EmptySubset,
    #[error("pair {0} has overlapping subsets")]
    Overlapping(String),
    #[error("pair {0} is listed as both authorized and unauthorized")]
    Conflicting(String),
    #[error("invalid structure file: {0}")]
    Json(String),
}

/// A subset of parties `{0, .., n-1}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PartySubset(u32);

impl PartySubset {
    pub const EMPTY: PartySubset = PartySubset(0);

    pub fn from_bits(bits: u32) -> Self {
        PartySubset(bits)
    }

    pub fn from_parties<I: IntoIterator<Item = usize>>(parties: I) -> Self {
        let mut bits = 0u32;
        for p in parties {
            assert!(p < MAX_PARTIES, "party index {p} too large");
            bits |= 1 << p;
        }
        PartySubset(bits)
    }

    /// Checked variant of [`PartySubset::from_parties`] for `n` parties.
    pub fn try_from_parties(parties: &[usize], n: usize) -> Result<Self, AccessError> {
        let mut bits = 0u32;
        for &p in parties {
            if p >= n {
                return Err(AccessError::PartyOutOfRange { party: p, parties: n });
            }
            bits |= 1 << p;
        }
        Ok(PartySubset(bits))
    }

    pub fn full(n: usize) -> Self {
        if n == 32 {
            PartySubset(u32::MAX)
        } else {
            PartySubset((1u32 << n) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        PartySubset(1 << p)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, p: usize) -> bool {
        p < 32 && self.0 >> p & 1 == 1
    }

    pub fn is_subset_of(self, other: PartySubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: PartySubset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: PartySubset) -> Self {
        PartySubset(self.0 | other.0)
    }

    pub fn intersection(self, other: PartySubset) -> Self {
        PartySubset(self.0 & other.0)
    }

    pub fn difference(self, other: PartySubset) -> Self {
        PartySubset(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        PartySubset(!self.0 & PartySubset::full(n).0)
    }

    pub fn with(self, p: usize) -> Self {
        PartySubset(self.0 | 1 << p)
    }

    pub fn least(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let p = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(p)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Indicator vector of length `n` (the `z_T` of the text).
    pub fn indicator(self, n: usize) -> Vec<u32> {
        (0..n).map(|p| self.contains(p) as u32).collect()
    }

    /// Comma separated party list, e.g. `0,2`.
    pub fn key(self) -> String {
        self.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_key(s: &str) -> Result<Self, AccessError> {
        let mut parties = Vec::new();
        for t in s.split(',').filter(|t| !t.is_empty()) {
            parties.push(t.trim().parse::<usize>().map_err(|e| AccessError::Json(format!("bad party '{t}': {e}")))?);
        }
        PartySubset::try_from_parties(&parties, MAX_PARTIES)
    }
}

impl Ord for PartySubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for PartySubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PartySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Display for PartySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// All subsets of `n` parties, including the empty set, in shortlex order.
pub fn all_subsets(n: usize) -> Vec<PartySubset> {
    let mut v: Vec<PartySubset> = (0..1u32 << n).map(PartySubset).collect();
    v.sort();
    v
}

/// An unordered pair of disjoint nonempty subsets, stored smaller-first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    first: PartySubset,
    second: PartySubset,
}

impl Pair {
    pub fn new(a: PartySubset, b: PartySubset) -> Result<Self, AccessError> {
        if a.is_empty() || b.is_empty() {
            return Err(AccessError::EmptySubset);
        }
        if !a.is_disjoint(b) {
            return Err(AccessError::Overlapping(format!("{a}|{b}")));
        }
        Ok(if a <= b { Pair { first: a, second: b } } else { Pair { first: b, second: a } })
    }

    /// Panicking constructor for literals in code and tests.
    pub fn of(a: &[usize], b: &[usize]) -> Self {
        Pair::new(PartySubset::from_parties(a.iter().copied()), PartySubset::from_parties(b.iter().copied()))
            .expect("valid pair")
    }

    pub fn first(self) -> PartySubset {
        self.first
    }

    pub fn second(self) -> PartySubset {
        self.second
    }

    pub fn union(self) -> PartySubset {
        self.first.union(self.second)
    }

    pub fn contains(self, t: PartySubset) -> bool {
        self.first == t || self.second == t
    }

    /// The other member of the pair, if `t` is one of them.
    pub fn partner_of(self, t: PartySubset) -> Option<PartySubset> {
        if self.first == t {
            Some(self.second)
        } else if self.second == t {
            Some(self.first)
        } else {
            None
        }
    }

    /// Sizes of the two members, smaller first.
    pub fn shape(self) -> (usize, usize) {
        let (a, b) = (self.first.len(), self.second.len());
        (a.min(b), a.max(b))
    }

    /// Key of the form `0,1|2,3`.
    pub fn key(self) -> String {
        format!("{}|{}", self.first.key(), self.second.key())
    }

    pub fn parse_key(s: &str) -> Result<Self, AccessError> {
        let (a, b) = s.split_once('|').ok_or_else(|| AccessError::Json(format!("bad pair key '{s}'")))?;
        Pair::new(PartySubset::parse_key(a)?, PartySubset::parse_key(b)?)
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// `x ⪯ y`: each member of `x` sits inside a distinct member of `y`.
pub fn preceq(x: Pair, y: Pair) -> bool {
    (x.first.is_subset_of(y.first) && x.second.is_subset_of(y.second))
        || (x.first.is_subset_of(y.second) && x.second.is_subset_of(y.first))
}

/// Every pair of disjoint nonempty subsets of `n` parties, in canonical order.
pub fn all_pairs(n: usize) -> Vec<Pair> {
    let subsets: Vec<PartySubset> = all_subsets(n).into_iter().filter(|s| !s.is_empty()).collect();
    let mut out = Vec::new();
    for (i, &a) in subsets.iter().enumerate() {
        for &b in &subsets[i + 1..] {
            if a.is_disjoint(b) {
                out.push(Pair { first: a, second: b });
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairAccessStructure {
    parties: usize,
    authorized: BTreeSet<Pair>,
    unauthorized: BTreeSet<Pair>,
}

#[derive(Serialize, Deserialize)]
struct StructureFile {
    parties: usize,
    authorized: Vec<[Vec<usize>; 2]>,
    #[serde(default)]
    unauthorized: Vec<[Vec<usize>; 2]>,
}

impl PairAccessStructure {
    pub fn new<A, U>(parties: usize, authorized: A, unauthorized: U) -> Result<Self, AccessError>
    where
        A: IntoIterator<Item = Pair>,
        U: IntoIterator<Item = Pair>,
    {
        if parties > MAX_PARTIES {
            return Err(AccessError::TooManyParties(parties));
        }
        let full = PartySubset::full(parties);
        let check = |p: &Pair| -> Result<(), AccessError> {
            if let Some(bad) = p.union().difference(full).least() {
                return Err(AccessError::PartyOutOfRange { party: bad, parties });
            }
            Ok(())
        };
        let authorized: BTreeSet<Pair> = authorized.into_iter().collect();
        let unauthorized: BTreeSet<Pair> = unauthorized.into_iter().collect();
        for p in authorized.iter().chain(&unauthorized) {
            check(p)?;
        }
        if let Some(p) = authorized.intersection(&unauthorized).next() {
            return Err(AccessError::Conflicting(p.key()));
        }
        Ok(PairAccessStructure { parties, authorized, unauthorized })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn authorized(&self) -> &BTreeSet<Pair> {
        &self.authorized
    }

    pub fn unauthorized(&self) -> &BTreeSet<Pair> {
        &self.unauthorized
    }

    pub fn is_authorized(&self, p: Pair) -> bool {
        self.authorized.contains(&p)
    }

    /// True when some listed authorized pair sits below `p`.
    pub fn is_implied_authorized(&self, p: Pair) -> bool {
        self.authorized.iter().any(|&a| preceq(a, p))
    }

    /// Authorized pairs with no other authorized pair strictly below them.
    pub fn minimal_authorized(&self) -> Vec<Pair> {
        self.authorized
            .iter()
            .copied()
            .filter(|&a| !self.authorized.iter().any(|&b| b != a && preceq(b, a)))
            .collect()
    }

    /// Unauthorized pairs together with everything below them.
    pub fn unauthorized_down_closure(&self) -> BTreeSet<Pair> {
        let mut out = BTreeSet::new();
        for &u in &self.unauthorized {
            for a in u.first.iter_nonempty_subsets() {
                for b in u.second.iter_nonempty_subsets() {
                    out.insert(Pair::new(a, b).expect("disjoint"));
                }
            }
        }
        out
    }

    /// The subsets appearing in some authorized pair.
    pub fn vertices(&self) -> Vec<PartySubset> {
        let set: BTreeSet<PartySubset> = self.authorized.iter().flat_map(|p| [p.first, p.second]).collect();
        set.into_iter().collect()
    }

    /// Every pair of disjoint subsets is listed as authorized or unauthorized.
    pub fn is_maximal(&self) -> bool {
        self.authorized.len() + self.unauthorized.len() == all_pairs(self.parties).len()
    }

    pub fn from_json_str(s: &str) -> Result<Self, AccessError> {
        let file: StructureFile = serde_json::from_str(s).map_err(|e| AccessError::Json(e.to_string()))?;
        let n = file.parties;
        if n > MAX_PARTIES {
            return Err(AccessError::TooManyParties(n));
        }
        let conv = |list: &[[Vec<usize>; 2]]| -> Result<Vec<Pair>, AccessError> {
            list.iter()
                .map(|[a, b]| {
                    Pair::new(PartySubset::try_from_parties(a, n)?, PartySubset::try_from_parties(b, n)?)
                })
                .collect()
        };
        PairAccessStructure::new(n, conv(&file.authorized)?, conv(&file.unauthorized)?)
    }

    pub fn to_json_string(&self) -> String {
        let conv = |set: &BTreeSet<Pair>| -> Vec<[Vec<usize>; 2]> {
            set.iter().map(|p| [p.first.to_vec(), p.second.to_vec()]).collect()
        };
        let file = StructureFile {
            parties: self.parties,
            authorized: conv(&self.authorized),
            unauthorized: conv(&self.unauthorized),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

impl PartySubset {
    /// Nonempty subsets of `self` (including itself), in shortlex order.
    pub fn iter_nonempty_subsets(self) -> impl Iterator<Item = PartySubset> {
        let mut v = Vec::new();
        let mut s = self.0;
        while s != 0 {
            v.push(PartySubset(s));
            s = (s - 1) & self.0;
        }
        v.sort();
        v.into_iter()
    }
}

/// Pair structure for threshold parameters `(p, q)` on `n` parties.
///
/// Authorized: pairs whose sizes dominate `{p, q}` in some orientation.
/// Unauthorized: pairs fitting under `{p, q}` that are not authorized.
pub fn threshold_structure(p: usize, q: usize, n: usize) -> Result<PairAccessStructure, AccessError> {
    let mut auth = Vec::new();
    let mut unauth = Vec::new();
    for pair in all_pairs(n) {
        let (a, b) = (pair.first.len(), pair.second.len());
        let dominates = (a >= p && b >= q) || (a >= q && b >= p);
        let fits = (a <= p && b <= q) || (a <= q && b <= p);
        if dominates {
            auth.push(pair);
        } else if fits {
            unauth.push(pair);
        }
    }
    PairAccessStructure::new(n, auth, unauth)
}

/// Graph whose vertices are subsets in some authorized pair and whose edges
/// are the authorized pairs.
#[derive(Clone, Debug)]
pub struct AuthGraph {
    pub vertices: Vec<PartySubset>,
    pub edges: Vec<(usize, usize)>,
    pub adjacency: Vec<Vec<usize>>,
}

impl AuthGraph {
    pub fn new(s: &PairAccessStructure) -> Self {
        let vertices = s.vertices();
        let index: BTreeMap<PartySubset, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        let mut edges = Vec::new();
        for p in s.authorized() {
            let (a, b) = (index[&p.first], index[&p.second]);
            edges.push((a.min(b), a.max(b)));
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
        }
        edges.sort_unstable();
        AuthGraph { vertices, edges, adjacency }
    }

    pub fn index_of(&self, t: PartySubset) -> Option<usize> {
        self.vertices.binary_search(&t).ok()
    }
}

/// A connected component of the authorization graph.
#[derive(Clone, Debug)]
pub struct Component {
    /// Vertex indices in ascending (canonical) order.
    pub vertices: Vec<usize>,
    /// BFS parent of each vertex in the component; the root maps to itself.
    pub parent: BTreeMap<usize, usize>,
    pub depth: BTreeMap<usize, usize>,
    /// Two-colouring, present when the component is bipartite.
    pub coloring: Option<BTreeMap<usize, u8>>,
}

impl Component {
    pub fn root(&self) -> usize {
        self.vertices[0]
    }

    /// Path between two vertices through the BFS tree.
    pub fn tree_path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = (a, b);
        let mut left = vec![x];
        let mut right = vec![y];
        while x != y {
            if self.depth[&x] >= self.depth[&y] {
                x = self.parent[&x];
                left.push(x);
            } else {
                y = self.parent[&y];
                right.push(y);
            }
        }
        right.pop();
        left.extend(right.into_iter().rev());
        left
    }

    /// Tree edges `(parent, child)` in BFS discovery order.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self
            .vertices
            .iter()
            .filter(|&&c| self.parent[&c] != c)
            .map(|&c| (self.parent[&c], c))
            .collect();
        v.sort_by_key(|&(_, c)| (self.depth[&c], c));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityViolation {
    pub authorized: String,
    pub unauthorized: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathViolation {
    pub from: String,
    pub to: String,
    pub path: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakMonotonicityViolation {
    pub pair: String,
    pub superset: String,
}

/// Structural conditions on a pair access structure.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub graph: AuthGraph,
    pub components: Vec<Component>,
    pub monotonicity: Vec<MonotonicityViolation>,
    pub odd_cycle: Option<Vec<PartySubset>>,
    pub monogamy: Vec<PathViolation>,
    /// Whether the structure lists unauthorized pairs, which switches on the
    /// transitivity and weak monotonicity conditions.
    pub maximality_applies: bool,
    pub transitivity: Vec<PathViolation>,
    pub weak_monotonicity: Vec<WeakMonotonicityViolation>,
}

impl ConditionReport {
    pub fn bipartite(&self) -> bool {
        self.odd_cycle.is_none()
    }

    /// All conditions needed for the unknown-partner setting hold.
    pub fn unknown_conditions_hold(&self) -> bool {
        self.odd_cycle.is_none()
            && self.monogamy.is_empty()
            && (!self.maximality_applies || (self.transitivity.is_empty() && self.weak_monotonicity.is_empty()))
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.components.iter().position(|c| c.vertices.binary_search(&v).is_ok()).expect("vertex in a component")
    }

    /// Both sides are vertices of the graph, in different components. Only
    /// the fixed per-vertex channels are required to fail on such a pair.
    pub fn across_components(&self, pair: Pair) -> bool {
        match (self.graph.index_of(pair.first()), self.graph.index_of(pair.second())) {
            (Some(a), Some(b)) => self.component_of(a) != self.component_of(b),
            _ => false,
        }
    }
}

fn names(graph: &AuthGraph, path: &[usize]) -> Vec<String> {
    path.iter().map(|&i| graph.vertices[i].to_string()).collect()
}

/// Rotates a cycle to start at its least vertex, heading toward the smaller neighbour.
fn canonical_cycle(mut cycle: Vec<usize>) -> Vec<usize> {
    let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).expect("nonempty");
    cycle.rotate_left(start);
    if cycle.len() > 2 && cycle[cycle.len() - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

pub fn structure_report(s: &PairAccessStructure) -> ConditionReport {
    let graph = AuthGraph::new(s);
    let nv = graph.vertices.len();

    let mut monotonicity = Vec::new();
    for &u in s.unauthorized() {
        for &a in s.authorized() {
            if preceq(a, u) {
                monotonicity.push(MonotonicityViolation { authorized: a.key(), unauthorized: u.key() });
            }
        }
    }

    let mut seen = vec![false; nv];
    let mut components = Vec::new();
    let mut odd_cycle: Option<Vec<usize>> = None;
    for root in 0..nv {
        if seen[root] {
            continue;
        }
        let mut parent = BTreeMap::new();
        let mut depth = BTreeMap::new();
        let mut color = BTreeMap::new();
        let mut bipartite = true;
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        parent.insert(root, root);
        depth.insert(root, 0usize);
        color.insert(root, 0u8);
        let mut conflict = None;
        while let Some(u) = queue.pop_front() {
            for &w in &graph.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent.insert(w, u);
                    depth.insert(w, depth[&u] + 1);
                    color.insert(w, 1 - color[&u]);
                    queue.push_back(w);
                } else if color[&w] == color[&u] && conflict.is_none() {
                    bipartite = false;
                    conflict = Some((u, w));
                }
            }
        }
        let mut vertices: Vec<usize> = parent.keys().copied().collect();
        vertices.sort_unstable();
        let comp = Component { vertices, parent, depth, coloring: bipartite.then_some(color) };
        if let (Some((u, w)), None) = (conflict, &odd_cycle) {
            odd_cycle = Some(canonical_cycle(comp.tree_path(u, w)));
        }
        components.push(comp);
    }

    let mut monogamy = Vec::new();
    let mut transitivity = Vec::new();
    for comp in &components {
        let Some(col) = &comp.coloring else { continue };
        for (i, &a) in comp.vertices.iter().enumerate() {
            for &b in &comp.vertices[i + 1..] {
                let (ta, tb) = (graph.vertices[a], graph.vertices[b]);
                if !ta.is_disjoint(tb) {
                    continue;
                }
                let violation = || PathViolation {
                    from: ta.to_string(),
                    to: tb.to_string(),
                    path: names(&graph, &comp.tree_path(a, b)),
                };
                if col[&a] == col[&b] {
                    monogamy.push(violation());
                } else if !s.unauthorized().is_empty() && !s.is_authorized(Pair::new(ta, tb).expect("disjoint")) {
                    transitivity.push(violation());
                }
            }
        }
    }

    let maximality_applies = !s.unauthorized().is_empty();
    let mut weak_monotonicity = Vec::new();
    if maximality_applies {
        let vertex_set: BTreeSet<PartySubset> = graph.vertices.iter().copied().collect();
        let full = PartySubset::full(s.parties());
        let mut found = BTreeSet::new();
        for &p in s.authorized() {
            for (t1, t2) in [(p.first, p.second), (p.second, p.first)] {
                let room = full.difference(t2).difference(t1);
                for extra in std::iter::once(PartySubset::EMPTY).chain(room.iter_nonempty_subsets()) {
                    let t3 = t1.union(extra);
                    if !vertex_set.contains(&t3) && found.insert((p, t3)) {
                        weak_monotonicity.push(WeakMonotonicityViolation { pair: p.key(), superset: t3.key() });
                    }
                }
            }
        }
    }

    ConditionReport {
        odd_cycle: odd_cycle.map(|c| c.into_iter().map(|i| graph.vertices[i]).collect()),
        graph,
        components,
        monotonicity,
        monogamy,
        maximality_applies,
        transitivity,
        weak_monotonicity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(v: &[usize]) -> PartySubset {
        PartySubset::from_parties(v.iter().copied())
    }

    #[test]
    fn shortlex_order() {
        let mut v = vec![ps(&[0, 2]), ps(&[1]), ps(&[0, 1]), ps(&[2]), ps(&[1, 2]), ps(&[0])];
        v.sort();
        assert_eq!(v, vec![ps(&[0]), ps(&[1]), ps(&[2]), ps(&[0, 1]), ps(&[0, 2]), ps(&[1, 2])]);
        assert!(ps(&[0, 3]) < ps(&[1, 2]));
        assert!(ps(&[1, 2]) < ps(&[1, 3]));
    }

    #[test]
    fn preceq_examples() {
        assert!(preceq(Pair::of(&[0], &[1]), Pair::of(&[0, 2], &[1])));
        assert!(!preceq(Pair::of(&[0], &[1]), Pair::of(&[0, 1], &[2])));
        assert!(preceq(Pair::of(&[0], &[1]), Pair::of(&[1], &[0, 2])));
    }

    #[test]
    fn conflicting_pair_rejected() {
        let p = Pair::of(&[0], &[1]);
        assert_eq!(PairAccessStructure::new(2, [p], [p]), Err(AccessError::Conflicting("0|1".into())));
    }

    #[test]
    fn overlapping_pair_rejected() {
        assert!(matches!(Pair::new(ps(&[0, 1]), ps(&[1])), Err(AccessError::Overlapping(_))));
        assert_eq!(Pair::new(ps(&[]), ps(&[1])), Err(AccessError::EmptySubset));
    }

    #[test]
    fn pair_key_roundtrip() {
        let p = Pair::of(&[2, 3], &[0, 1]);
        assert_eq!(p.key(), "0,1|2,3");
        assert_eq!(Pair::parse_key(&p.key()).unwrap(), p);
    }

    #[test]
    fn threshold_counts() {
        let s = threshold_structure(2, 1, 4).unwrap();
        assert_eq!(s.authorized().iter().filter(|p| p.shape() == (1, 2)).count(), 12);
        let s = threshold_structure(2, 2, 5).unwrap();
        assert_eq!(s.authorized().iter().filter(|p| p.shape() == (2, 2)).count(), 15);
        // 5 singletons times 6 disjoint doubletons.
        assert_eq!(s.unauthorized().iter().filter(|p| p.shape() == (1, 2)).count(), 30);
        assert_eq!(s.minimal_authorized().len(), 15);
    }

    #[test]
    fn triangle_has_odd_cycle() {
        let s = PairAccessStructure::new(
            3,
            [Pair::of(&[0], &[1]), Pair::of(&[1], &[2]), Pair::of(&[0], &[2])],
            [],
        )
        .unwrap();
        let r = structure_report(&s);
        assert_eq!(r.odd_cycle, Some(vec![ps(&[0]), ps(&[1]), ps(&[2])]));
    }

    #[test]
    fn monogamy_path_is_even() {
        // {0} - {1} - {2}: {0} and {2} share a colour and are disjoint.
        let s = PairAccessStructure::new(3, [Pair::of(&[0], &[1]), Pair::of(&[1], &[2])], []).unwrap();
        let r = structure_report(&s);
        assert!(r.bipartite());
        assert_eq!(r.monogamy.len(), 1);
        assert_eq!(r.monogamy[0].path, vec!["{0}", "{1}", "{2}"]);
    }

    #[test]
    fn weak_monotonicity_only_in_maximal_mode() {
        let a = [Pair::of(&[0], &[1])];
        let r = structure_report(&PairAccessStructure::new(3, a, []).unwrap());
        assert!(!r.maximality_applies && r.weak_monotonicity.is_empty());
        let u = all_pairs(3).into_iter().filter(|p| *p != a[0]);
        let r = structure_report(&PairAccessStructure::new(3, a, u).unwrap());
        assert!(r.weak_monotonicity.iter().any(|w| w.superset == "0,2"));
    }

    #[test]
    fn json_roundtrip() {
        let s = threshold_structure(1, 1, 3).unwrap();
        let back = PairAccessStructure::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"parties":2,"authorized":[[[0],[5]]]}"#;
        assert_eq!(
            PairAccessStructure::from_json_str(bad),
            Err(AccessError::PartyOutOfRange { party: 5, parties: 2 })
        );
    }

    /// Brute-force odd cycle search over closed walks.
    fn has_odd_closed_walk(s: &PairAccessStructure) -> bool {
        let g = AuthGraph::new(s);
        let n = g.vertices.len();
        // reach[v][parity] from each start
        for start in 0..n {
            let mut reach = vec![[false; 2]; n];
            reach[start][0] = true;
            let mut changed = true;
            while changed {
                changed = false;
                for &(a, b) in &g.edges {
                    for par in 0..2 {
                        for (x, y) in [(a, b), (b, a)] {
                            if reach[x][par] && !reach[y][1 - par] {
                                reach[y][1 - par] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if reach[start][1] {
                return true;
            }
        }
        false
    }

    fn random_structure(n: usize) -> impl Strategy<Value = PairAccessStructure> {
        let pairs = all_pairs(n);
        prop::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            let a = pairs.iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| *p);
            PairAccessStructure::new(n, a, []).unwrap()
        })
    }

    proptest! {
        #[test]
        fn order_is_total_and_consistent(a in 0u32..256, b in 0u32..256) {
            let (x, y) = (PartySubset(a), PartySubset(b));
            let lx = x.to_vec();
            let ly = y.to_vec();
            let expected = lx.len().cmp(&ly.len()).then(lx.cmp(&ly));
            prop_assert_eq!(x.cmp(&y), expected);
        }

        #[test]
        fn odd_cycle_iff_closed_odd_walk(s in random_structure(4)) {
            let r = structure_report(&s);
            prop_assert_eq!(r.odd_cycle.is_some(), has_odd_closed_walk(&s));
            if let Some(c) = r.odd_cycle {
                prop_assert_eq!(c.len() % 2, 1);
                for i in 0..c.len() {
                    let e = Pair::new(c[i], c[(i + 1) % c.len()]).unwrap();
                    prop_assert!(s.is_authorized(e));
                }
            }
        }

        #[test]
        fn report_is_deterministic(s in random_structure(4)) {
            let a = structure_report(&s);
            let b = structure_report(&s.clone());
            prop_assert_eq!(a.odd_cycle, b.odd_cycle);
            prop_assert_eq!(a.monogamy, b.monogamy);
        }
    }
}
