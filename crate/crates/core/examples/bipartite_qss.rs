//! Structures with no unauthorized pairs: one EPR pair per component, each
//! half spread over its side by secret sharing.
//!
//! ```text
//! cargo run --example bipartite_qss
//! ```

use ess_core::access::{Pair, PairAccessStructure};
use ess_core::oracle::verify_scheme_numerically;
use ess_core::unknown::{bipartite_qss, verify_unknown};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = PairAccessStructure::new(
        5,
        [Pair::of(&[0, 1], &[2, 3]), Pair::of(&[2, 3], &[0, 4]), Pair::of(&[0, 4], &[1, 2])],
        [],
    )?;
    let built = bipartite_qss(&s)?;
    let scheme = &built.scheme;
    println!("{} qubits, shares {:?}", scheme.group.qudits(), scheme.share_sizes());
    println!("initialization qubits per minimal set: {:?}", built.init_qubits);
    println!("symbolic: {}", verify_unknown(scheme, &s).passed);
    let numeric = verify_scheme_numerically(scheme, &s);
    for c in &numeric.authorized {
        println!("  {} {:?} |<V>|,|<W>| = {:?}", c.pair, c.status, c.witness_expectations);
    }
    Ok(())
}
