//! The ((2,2,5)) threshold scheme: five parties, any two can share an EPR
//! pair of dimension 5 with any other two.
//!
//! ```text
//! cargo run --example threshold_225
//! ```

use ess_core::known::{threshold_rs_scheme, verify_known};
use ess_core::access::PartySubset;
use ess_core::oracle::{verify_scheme_numerically, NumericState, Status};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (scheme, structure) = threshold_rs_scheme(2, 2)?;
    println!("{} qudits over F_{}, shares {:?}", scheme.group.qudits(), scheme.p(), scheme.share_sizes());
    println!("{}", scheme.group.to_tableau());

    let symbolic = verify_known(&scheme, &structure);
    let numeric = verify_scheme_numerically(&scheme, &structure);
    let ok = |s: &Status| *s == Status::Passed;
    println!(
        "authorized pairs: {} symbolic, {} numeric (of {})",
        symbolic.authorized.iter().filter(|c| c.passed).count(),
        numeric.authorized.iter().filter(|c| ok(&c.status)).count(),
        structure.authorized().len()
    );
    println!(
        "unauthorized pairs certified separable: {} of {}",
        numeric.unauthorized.iter().filter(|c| ok(&c.status)).count(),
        structure.unauthorized().len()
    );
    let state = NumericState::build(&scheme.group)?;
    let spectrum = state.region_spectrum(PartySubset::from_parties([0, 1]))?;
    println!("spectrum across {{0,1}} : {{2,3,4}}: (value, multiplicity) {:?}", spectrum.clusters(1e-9));
    Ok(())
}
