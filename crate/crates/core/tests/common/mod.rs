//! Enumerators and brute-force oracles shared by the integration tests and
//! the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ess_core::access::{all_pairs, preceq, Pair, PairAccessStructure, PartySubset};
use ess_core::known::{feasibility_known, synthesize_known, verify_known, KnownCertificate, KnownError, KnownVerdict};
use ess_core::oracle::verify_scheme_numerically;
use ess_core::qss::SetAccessStructure;
use ess_core::scheme::{significant_parties_among, EssScheme, SchemeMode};
use ess_core::unknown::{
    feasibility_unknown, feasibility_unknown_with, synthesize_unknown, verify_unknown, with_complement, Quadruples,
    UnknownCertificate, UnknownVerdict,
};

// ---------------------------------------------------------------- enumeration

/// Antichains of the pair order on `n` parties, each listed in pair order.
pub fn pair_antichains(n: usize) -> Vec<Vec<Pair>> {
    let pairs = all_pairs(n);
    let comparable = |a: Pair, b: Pair| preceq(a, b) || preceq(b, a);
    let mut out = Vec::new();
    let mut chosen: Vec<Pair> = Vec::new();
    fn go(i: usize, pairs: &[Pair], chosen: &mut Vec<Pair>, out: &mut Vec<Vec<Pair>>, cmp: &dyn Fn(Pair, Pair) -> bool) {
        if i == pairs.len() {
            out.push(chosen.clone());
            return;
        }
        go(i + 1, pairs, chosen, out, cmp);
        if chosen.iter().all(|&c| !cmp(c, pairs[i])) {
            chosen.push(pairs[i]);
            go(i + 1, pairs, chosen, out, cmp);
            chosen.pop();
        }
    }
    go(0, &pairs, &mut chosen, &mut out, &comparable);
    out
}

pub fn up_closure(n: usize, minimal: &[Pair]) -> Vec<Pair> {
    all_pairs(n).into_iter().filter(|&p| minimal.iter().any(|&a| preceq(a, p))).collect()
}

/// Every monotone structure on `n ≤ 3` parties: each pair is authorized,
/// unauthorized or unlisted, with nothing authorized below an unauthorized pair.
pub fn all_monotone_structures(n: usize) -> Vec<PairAccessStructure> {
    assert!(n <= 3, "exhaustive listing is only practical for n ≤ 3");
    let pairs = all_pairs(n);
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let (mut a, mut u) = (Vec::new(), Vec::new());
        for &p in &pairs {
            match c % 3 {
                1 => a.push(p),
                2 => u.push(p),
                _ => {}
            }
            c /= 3;
        }
        if a.iter().any(|&x| u.iter().any(|&y| preceq(x, y))) {
            continue;
        }
        out.push(PairAccessStructure::new(n, a, u).unwrap());
    }
    out
}

/// Up-sets on `n` parties with no unauthorized pairs and with the complement unauthorized.
pub fn upset_structures(n: usize) -> Vec<PairAccessStructure> {
    let mut out = Vec::new();
    for minimal in pair_antichains(n) {
        if minimal.is_empty() {
            continue;
        }
        let up = up_closure(n, &minimal);
        let rest: Vec<Pair> = all_pairs(n).into_iter().filter(|p| !up.contains(p)).collect();
        out.push(PairAccessStructure::new(n, up.iter().copied(), std::iter::empty()).unwrap());
        out.push(PairAccessStructure::new(n, up, rest).unwrap());
    }
    out
}

/// Seeded monotone structures with a random up-set and a random part of its complement unauthorized.
pub fn sampled_monotone_structures(n: usize, count: usize, seed: u64) -> Vec<PairAccessStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let antichains = pair_antichains(n);
    (0..count)
        .map(|_| {
            let minimal = antichains.choose(&mut rng).unwrap();
            let up = up_closure(n, minimal);
            let rest: Vec<Pair> =
                all_pairs(n).into_iter().filter(|p| !up.contains(p) && rng.gen_bool(0.5)).collect();
            PairAccessStructure::new(n, up, rest).unwrap()
        })
        .collect()
}

/// Authorized edge sets whose graph is bipartite and monogamous, found by
/// backtracking (both properties only get worse as edges are added). The
/// second list holds the first failing extension at each branch point.
pub fn unknown_candidates(n: usize) -> (Vec<Vec<Pair>>, Vec<Vec<Pair>>) {
    let pairs = all_pairs(n);
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    let mut chosen = Vec::new();
    fn go(i: usize, n: usize, pairs: &[Pair], chosen: &mut Vec<Pair>, acc: &mut Vec<Vec<Pair>>, rej: &mut Vec<Vec<Pair>>) {
        if i == pairs.len() {
            acc.push(chosen.clone());
            return;
        }
        go(i + 1, n, pairs, chosen, acc, rej);
        chosen.push(pairs[i]);
        let b = brute_conditions(&PairAccessStructure::new(n, chosen.iter().copied(), std::iter::empty()).unwrap());
        if b.odd_cycle || b.monogamy {
            rej.push(chosen.clone());
        } else {
            go(i + 1, n, pairs, chosen, acc, rej);
        }
        chosen.pop();
    }
    go(0, n, &pairs, &mut chosen, &mut accepted, &mut rejected);
    (accepted, rejected)
}

/// Seeded structures with arbitrary authorized and unauthorized lists.
pub fn sampled_unknown_structures(n: usize, count: usize, seed: u64) -> Vec<PairAccessStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = all_pairs(n);
    (0..count)
        .map(|_| {
            let pa = rng.gen_range(0.05..0.35);
            let pu = rng.gen_range(0.0..0.6);
            let (mut a, mut u) = (Vec::new(), Vec::new());
            for &p in &pairs {
                if rng.gen_bool(pa) {
                    a.push(p);
                } else if rng.gen_bool(pu) {
                    u.push(p);
                }
            }
            PairAccessStructure::new(n, a, u).unwrap()
        })
        .collect()
}

// ------------------------------------------------------- brute-force oracles

/// Rank of an integer matrix over F_p by plain elimination.
pub fn rank_mod_p(rows: &[Vec<u32>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&v| v as u64 % p).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let inv = |a: u64| -> u64 {
        let mut r = 1;
        for _ in 0..p - 2 {
            r = r * a % p;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let s = inv(m[rank][c]);
        for v in m[rank].iter_mut() {
            *v = *v * s % p;
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + p * p - f * m[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, Default)]
pub struct BruteConditions {
    pub not_monotone: bool,
    pub odd_cycle: bool,
    pub monogamy: bool,
    pub transitivity: bool,
    pub weak_monotonicity: bool,
}

impl BruteConditions {
    pub fn all_hold(&self) -> bool {
        !(self.not_monotone || self.odd_cycle || self.monogamy || self.transitivity || self.weak_monotonicity)
    }
}

/// Colour classes and component ids of the authorized graph, or `None` when it has an odd cycle.
pub fn two_colouring(s: &PairAccessStructure) -> Option<BTreeMap<PartySubset, (usize, u8)>> {
    let mut adj: BTreeMap<PartySubset, Vec<PartySubset>> = BTreeMap::new();
    for p in s.authorized() {
        adj.entry(p.first()).or_default().push(p.second());
        adj.entry(p.second()).or_default().push(p.first());
    }
    let mut colour: BTreeMap<PartySubset, (usize, u8)> = BTreeMap::new();
    let mut comp = 0;
    for &start in adj.keys() {
        if colour.contains_key(&start) {
            continue;
        }
        colour.insert(start, (comp, 0));
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let c = colour[&v].1;
            for &w in &adj[&v] {
                match colour.get(&w) {
                    None => {
                        colour.insert(w, (comp, 1 - c));
                        queue.push_back(w);
                    }
                    Some(&(_, cw)) if cw == c => return None,
                    _ => {}
                }
            }
        }
        comp += 1;
    }
    Some(colour)
}

/// The unknown-partner necessary conditions, checked pair by pair.
pub fn brute_conditions(s: &PairAccessStructure) -> BruteConditions {
    let mut b = BruteConditions {
        not_monotone: s.authorized().iter().any(|&a| s.unauthorized().iter().any(|&u| preceq(a, u))),
        ..Default::default()
    };
    let Some(colour) = two_colouring(s) else {
        b.odd_cycle = true;
        return b;
    };
    let maximality = !s.unauthorized().is_empty();
    let verts: Vec<(PartySubset, (usize, u8))> = colour.iter().map(|(&t, &c)| (t, c)).collect();
    for (i, &(t1, (c1, s1))) in verts.iter().enumerate() {
        for &(t2, (c2, s2)) in &verts[i + 1..] {
            if c1 != c2 || !t1.is_disjoint(t2) {
                continue;
            }
            if s1 == s2 {
                b.monogamy = true;
            } else if maximality && !s.is_authorized(Pair::new(t1, t2).unwrap()) {
                b.transitivity = true;
            }
        }
    }
    if maximality {
        let full = PartySubset::full(s.parties());
        for p in s.authorized() {
            for (t1, t2) in [(p.first(), p.second()), (p.second(), p.first())] {
                for t3 in full.iter_nonempty_subsets() {
                    if t1.is_subset_of(t3) && t3.is_disjoint(t2) && !colour.contains_key(&t3) {
                        b.weak_monotonicity = true;
                    }
                }
            }
        }
    }
    b
}

/// Checks that an infeasibility certificate names a genuine violation.
pub fn audit_unknown_certificate(s: &PairAccessStructure, cert: &UnknownCertificate) -> bool {
    let parse = |k: &str| PartySubset::parse_key(k.trim_matches(|c| c == '{' || c == '}')).unwrap();
    let b = brute_conditions(s);
    match cert {
        UnknownCertificate::NotMonotone { violations } => violations.iter().all(|v| {
            let a = Pair::parse_key(&v.authorized).unwrap();
            let u = Pair::parse_key(&v.unauthorized).unwrap();
            s.is_authorized(a) && s.unauthorized().contains(&u) && preceq(a, u)
        }),
        UnknownCertificate::OddCycle { cycle } => {
            let c: Vec<PartySubset> = cycle.iter().map(|k| parse(k)).collect();
            c.len() % 2 == 1
                && (0..c.len()).all(|i| {
                    Pair::new(c[i], c[(i + 1) % c.len()]).map_or(false, |p| s.is_authorized(p))
                })
        }
        UnknownCertificate::Monogamy { violation } => {
            let (a, z) = (parse(&violation.from), parse(&violation.to));
            let col = two_colouring(s).unwrap();
            !b.not_monotone && a.is_disjoint(z) && col[&a].0 == col[&z].0 && col[&a].1 == col[&z].1
        }
        UnknownCertificate::Transitivity { violation } => {
            let (a, z) = (parse(&violation.from), parse(&violation.to));
            let col = two_colouring(s).unwrap();
            !b.monogamy
                && a.is_disjoint(z)
                && col[&a].0 == col[&z].0
                && col[&a].1 != col[&z].1
                && !s.is_authorized(Pair::new(a, z).unwrap())
        }
        UnknownCertificate::WeakMonotonicity { violation } => {
            let p = Pair::parse_key(&violation.pair).unwrap();
            let t3 = parse(&violation.superset);
            b.weak_monotonicity
                && s.is_authorized(p)
                && !s.vertices().contains(&t3)
                && [(p.first(), p.second()), (p.second(), p.first())]
                    .iter()
                    .any(|&(t1, t2)| t1.is_subset_of(t3) && t3.is_disjoint(t2))
        }
        UnknownCertificate::Unsolvable { .. } => {
            b.all_hold() && !feasibility_unknown_with(s, Quadruples::Full).is_feasible()
        }
    }
}

/// Largest number of pairwise-disjoint sets, by subset enumeration.
pub fn brute_max_disjoint(sets: &[PartySubset]) -> usize {
    let k = sets.len();
    assert!(k <= 20);
    (0u32..1 << k)
        .filter(|mask| {
            let chosen: Vec<PartySubset> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| sets[i]).collect();
            chosen.iter().enumerate().all(|(i, a)| chosen[i + 1..].iter().all(|b| a.is_disjoint(*b)))
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Entropy and share-size lower bounds, recomputed outside the library's reports.
pub fn bounds_hold(scheme: &EssScheme, s: &PairAccessStructure) -> bool {
    let partners = |t: PartySubset| -> Vec<PartySubset> {
        let set: BTreeSet<PartySubset> = s.authorized().iter().filter_map(|p| p.partner_of(t)).collect();
        set.into_iter().collect()
    };
    let degree = s.vertices().into_iter().all(|t| scheme.group.entropy(t) >= brute_max_disjoint(&partners(t)));
    // Unknown-partner schemes only promise separability for unauthorized
    // pairs that do not join two components of the authorized graph.
    let separable: Vec<Pair> = match (scheme.mode, two_colouring(s)) {
        (SchemeMode::Unknown, Some(colours)) => s
            .unauthorized()
            .iter()
            .copied()
            .filter(|u| match (colours.get(&u.first()), colours.get(&u.second())) {
                (Some(a), Some(b)) => a.0 == b.0,
                _ => true,
            })
            .collect(),
        _ => s.unauthorized().iter().copied().collect(),
    };
    let sizes = scheme.share_sizes();
    let shares = significant_parties_among(s, &separable).into_iter().all(|i| sizes[i] >= 1);
    degree && shares
}

// ------------------------------------------------------------------ sweeps

#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub structures: usize,
    pub feasible: usize,
    pub infeasible: usize,
    pub oracle_skipped: usize,
    /// Structures also sent through the numeric oracle.
    pub oracle_checked: usize,
    pub failures: Vec<String>,
    pub bound_failures: Vec<String>,
    /// Verified unauthorized pairs with a side outside the flattening.
    pub outside_flattening: usize,
    /// Verified unauthorized pairs joining two components of the authorized graph.
    pub across_components: usize,
}

impl Tally {
    pub fn merge(&mut self, other: Tally) {
        self.structures += other.structures;
        self.feasible += other.feasible;
        self.infeasible += other.infeasible;
        self.oracle_skipped += other.oracle_skipped;
        self.oracle_checked += other.oracle_checked;
        self.failures.extend(other.failures);
        self.bound_failures.extend(other.bound_failures);
        self.outside_flattening += other.outside_flattening;
        self.across_components += other.across_components;
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn describe(s: &PairAccessStructure) -> String {
    s.to_json_string().split_whitespace().collect()
}

/// Known partner: verdict, synthesis, symbolic and numeric verification must agree.
pub fn known_roundtrip(s: &PairAccessStructure, p: u64, oracle: bool, tally: &mut Tally) {
    tally.structures += 1;
    match feasibility_known(s, p).unwrap() {
        KnownVerdict::Feasible { .. } => {
            tally.feasible += 1;
            let scheme = match synthesize_known(s, p) {
                Ok(x) => x,
                Err(e) => return tally.failures.push(format!("synthesis failed ({e}) for {}", describe(s))),
            };
            let rep = verify_known(&scheme, s);
            if !rep.passed {
                tally.failures.push(format!("symbolic verification failed for {}", describe(s)));
            }
            if oracle {
                tally.oracle_checked += 1;
                let num = verify_scheme_numerically(&scheme, s);
                if !num.passed {
                    tally.failures.push(format!("oracle verification failed for {}", describe(s)));
                }
                tally.oracle_skipped += num.skipped;
            }
            if !bounds_hold(&scheme, s) {
                tally.bound_failures.push(describe(s));
            }
        }
        KnownVerdict::Infeasible(cert) => {
            tally.infeasible += 1;
            if !matches!(synthesize_known(s, p), Err(KnownError::Infeasible(_))) {
                tally.failures.push(format!("synthesis did not refuse {}", describe(s)));
            }
            let genuine = match &cert {
                KnownCertificate::NotMonotone(v) => !v.is_empty(),
                KnownCertificate::RankEquality { rank, rank_tilde, matrices, .. } => {
                    let r = rank_mod_p(&matrices.m.to_rows(), p);
                    let rt = rank_mod_p(&matrices.m_tilde.to_rows(), p);
                    r == *rank && rt == *rank_tilde && r == rt
                }
            };
            if !genuine {
                tally.failures.push(format!("bad certificate for {}", describe(s)));
            }
        }
    }
}

/// Unknown partner: conditions against brute force, certificates audited,
/// feasible structures synthesized and verified.
pub fn unknown_roundtrip(s: &PairAccessStructure, oracle: bool, tally: &mut Tally) {
    tally.structures += 1;
    let brute = brute_conditions(s);
    match feasibility_unknown(s) {
        UnknownVerdict::Feasible { .. } => {
            tally.feasible += 1;
            if !brute.all_hold() {
                tally.failures.push(format!("accepted despite {brute:?}: {}", describe(s)));
            }
            let scheme = match synthesize_unknown(s) {
                Ok(x) => x,
                Err(e) => return tally.failures.push(format!("synthesis failed ({e}) for {}", describe(s))),
            };
            if !verify_unknown(&scheme, s).passed {
                tally.failures.push(format!("symbolic verification failed for {}", describe(s)));
            } else if let Some(colours) = two_colouring(s) {
                for u in s.unauthorized() {
                    match (colours.get(&u.first()), colours.get(&u.second())) {
                        (Some(a), Some(b)) if a.0 != b.0 => tally.across_components += 1,
                        (Some(_), Some(_)) => {}
                        _ => tally.outside_flattening += 1,
                    }
                }
            }
            if oracle {
                tally.oracle_checked += 1;
                let num = verify_scheme_numerically(&scheme, s);
                if !num.passed {
                    tally.failures.push(format!("oracle verification failed for {}", describe(s)));
                }
                tally.oracle_skipped += num.skipped;
            }
            if !bounds_hold(&scheme, s) {
                tally.bound_failures.push(describe(s));
            }
        }
        UnknownVerdict::Infeasible(cert) => {
            tally.infeasible += 1;
            if !audit_unknown_certificate(s, &cert) {
                tally.failures.push(format!("certificate {cert} not confirmed for {}", describe(s)));
            }
        }
    }
}

/// The unknown-partner sweep on `n` parties: every bipartite monogamous edge
/// set with no unauthorized pairs and with the complement unauthorized, the
/// first failing extensions, and a seeded sample of arbitrary structures.
/// Every `oracle_every`-th structure (0 for none) is also checked numerically.
pub fn unknown_sweep(n: usize, sample: usize, oracle_every: usize) -> Tally {
    let mut tally = Tally::default();
    let mut index = 0usize;
    let mut next = |tally: &mut Tally, s: &PairAccessStructure| {
        let oracle = oracle_every > 0 && index % oracle_every == 0;
        index += 1;
        unknown_roundtrip(s, oracle, tally);
    };
    let (accepted, rejected) = unknown_candidates(n);
    for a in accepted.iter().filter(|a| !a.is_empty()) {
        next(&mut tally, &PairAccessStructure::new(n, a.iter().copied(), std::iter::empty()).unwrap());
        next(&mut tally, &with_complement(n, a).unwrap());
    }
    for a in &rejected {
        unknown_roundtrip(&PairAccessStructure::new(n, a.iter().copied(), std::iter::empty()).unwrap(), false, &mut tally);
    }
    for s in sampled_unknown_structures(n, sample, 0x5u64 + n as u64) {
        next(&mut tally, &s);
    }
    tally
}

/// Minimal-set families on `n` parties that are monotone and satisfy no-cloning.
pub fn no_cloning_structures(n: usize) -> Vec<SetAccessStructure> {
    let subsets: Vec<PartySubset> = PartySubset::full(n).iter_nonempty_subsets().collect();
    let mut out = Vec::new();
    let mut chosen: Vec<PartySubset> = Vec::new();
    fn go(i: usize, subs: &[PartySubset], chosen: &mut Vec<PartySubset>, n: usize, out: &mut Vec<SetAccessStructure>) {
        if i == subs.len() {
            if !chosen.is_empty() {
                out.push(SetAccessStructure::from_minimal(n, chosen.iter().copied()).unwrap());
            }
            return;
        }
        go(i + 1, subs, chosen, n, out);
        let t = subs[i];
        let antichain = chosen.iter().all(|&c| !c.is_subset_of(t) && !t.is_subset_of(c));
        let intersecting = chosen.iter().all(|&c| !c.is_disjoint(t));
        if antichain && intersecting {
            chosen.push(t);
            go(i + 1, subs, chosen, n, out);
            chosen.pop();
        }
    }
    go(0, &subsets, &mut chosen, n, &mut out);
    out
}
