//! Small-n versions of the feasibility sweeps; the full n = 4 runs live in
//! the acceptance harness.

mod common;

use common::*;
use ess_core::access::all_pairs;

#[test]
fn known_partner_all_structures_up_to_three_parties() {
    for p in [2, 3] {
        let mut tally = Tally::default();
        for n in 2..=3 {
            for s in all_monotone_structures(n) {
                known_roundtrip(&s, p, true, &mut tally);
            }
        }
        assert!(tally.ok(), "{:#?}", tally.failures);
        assert!(tally.bound_failures.is_empty(), "{:#?}", tally.bound_failures);
        assert!(tally.feasible > 0 && tally.infeasible > 0, "{tally:?}");
    }
}

#[test]
fn unknown_partner_up_to_three_parties() {
    for n in 2..=3 {
        let tally = unknown_sweep(n, 200, 1);
        assert!(tally.ok(), "{:#?}", tally.failures);
        assert!(tally.bound_failures.is_empty(), "{:#?}", tally.bound_failures);
    }
}

#[test]
fn unknown_partner_arbitrary_three_party_structures() {
    let mut tally = Tally::default();
    let pairs = ess_core::access::all_pairs(3);
    for code in 0..3usize.pow(pairs.len() as u32) {
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
        let s = ess_core::access::PairAccessStructure::new(3, a, u).unwrap();
        unknown_roundtrip(&s, false, &mut tally);
    }
    assert!(tally.ok(), "{:#?}", tally.failures);
}

#[test]
fn known_partner_upsets_on_four_parties_symbolic() {
    let mut tally = Tally::default();
    for s in upset_structures(4).into_iter().step_by(7) {
        known_roundtrip(&s, 2, false, &mut tally);
    }
    assert!(tally.ok(), "{:#?}", tally.failures);
}

#[test]
fn enumeration_counts() {
    let plain: Vec<_> = all_monotone_structures(3).into_iter().filter(|s| s.unauthorized().is_empty()).collect();
    assert_eq!(plain.len(), 1 << all_pairs(3).len());
    let upsets = plain.iter().filter(|s| up_closure(3, &s.minimal_authorized()).len() == s.authorized().len()).count();
    assert_eq!(upsets, pair_antichains(3).len());
    assert_eq!(pair_antichains(4).len(), 11422);
    assert_eq!(no_cloning_structures(2).len(), 3);
}
