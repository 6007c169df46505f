//! Quantum secret sharing for a monotone set structure with no two disjoint
//! authorized sets, checked symbolically and through I(R:U) numerically.
//!
//! ```text
//! cargo run --example qss
//! ```

use ess_core::access::{all_subsets, PartySubset};
use ess_core::oracle::NumericState;
use ess_core::qss::{build_qss, verify_qss, SetAccessStructure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The (2,3) threshold structure.
    let a = SetAccessStructure::from_json_str(r#"{"parties": 3, "authorized": [[0, 1], [0, 2], [1, 2]]}"#)?;
    let q = build_qss(&a)?;
    println!("{} qubits including the reference", q.qubits());
    let rep = verify_qss(&q, &a);
    println!("relations checked {}, passed {}", rep.relations_checked, rep.passed);

    // Symbolic mutual information for every set, in bits (qubits).
    let r = PartySubset::singleton(a.parties());
    let g = &q.group;
    for u in all_subsets(a.parties()).into_iter().filter(|u| !u.is_empty()) {
        let i = g.entropy(r) + g.entropy(u) - g.entropy(u.union(r));
        let kind = if a.is_authorized(u) { "authorized" } else { "unauthorized" };
        println!("  I(R:{u}) = {i} ({kind})");
    }

    // Dense check on the unauthorized sets.
    let state = NumericState::build(g)?;
    let s_r = state.region_entropy(r)?;
    for u in all_subsets(a.parties()).into_iter().filter(|u| !u.is_empty() && !a.is_authorized(*u)) {
        let i = s_r + state.region_entropy(u)? - state.region_entropy(u.union(r))?;
        println!("  numeric I(R:{u}) = {:.2e}", i.abs());
    }
    Ok(())
}
