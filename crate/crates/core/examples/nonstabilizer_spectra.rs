//! Non-stabilizer reference states: the explicit three-qubit state and a
//! Haar-dressed known-partner scheme.
//!
//! ```text
//! cargo run --example nonstabilizer_spectra
//! ```

use ess_core::access::{Pair, PairAccessStructure, PartySubset};
use ess_core::oracle::{epr_extractable, explicit_three_qubit_state, haar_known_scheme, schmidt_spectrum, Ancilla};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = explicit_three_qubit_state();
    for party in 0..3 {
        let spec = schmidt_spectrum(&v, PartySubset::singleton(party));
        println!("S_{}: {:?} extractable {}", party + 1, spec.values(), epr_extractable(&spec, 2, 1e-8));
    }

    let s = PairAccessStructure::new(3, [Pair::of(&[0], &[1, 2])], [])?;
    for ancilla in [Ancilla::Pure, Ancilla::MaximallyMixed] {
        let (scheme, report) = haar_known_scheme(&s, 0, ancilla)?;
        println!("{ancilla:?}: {} blocks, passed {}", scheme.blocks.len(), report.passed);
        for c in &report.intended {
            println!("  intended {} fidelity {:.12}", c.pair, c.fidelity);
        }
        for c in &report.cuts {
            println!("  cut {} extractable {} LU fidelity {:.4}", c.cut, c.extractable, c.lu_fidelity);
        }
    }
    Ok(())
}
