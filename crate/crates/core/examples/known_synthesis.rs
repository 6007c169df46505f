//! Known-partner synthesis for a structure given as JSON, with symbolic and
//! numeric verification.
//!
//! ```text
//! cargo run --example known_synthesis
//! cargo run --example known_synthesis -- structure.json 3
//! ```

use ess_core::access::PairAccessStructure;
use ess_core::known::{feasibility_known, synthesize_known, verify_known, KnownVerdict};
use ess_core::oracle::verify_scheme_numerically;

const DEFAULT: &str = r#"{
  "parties": 4,
  "authorized": [[[0], [1]], [[2], [0, 3]]],
  "unauthorized": [[[1], [2]], [[0], [2]]]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let p: u64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2);
    let s = PairAccessStructure::from_json_str(&text)?;

    if let KnownVerdict::Infeasible(cert) = feasibility_known(&s, p)? {
        println!("infeasible over F_{p}: {cert}");
        return Ok(());
    }
    let scheme = synthesize_known(&s, p)?;
    println!("{}", scheme.group.to_tableau());
    println!("share sizes {:?}", scheme.share_sizes());
    let symbolic = verify_known(&scheme, &s);
    let numeric = verify_scheme_numerically(&scheme, &s);
    println!("symbolic {}, numeric {} ({} checks over budget)", symbolic.passed, numeric.passed, numeric.skipped);
    for d in &symbolic.degree {
        println!("  S({}) = {} log p >= {} disjoint partners", d.vertex, d.entropy, d.disjoint_partners);
    }
    Ok(())
}
