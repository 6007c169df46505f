//! A monotone three-party structure with no stabilizer scheme: the pair
//! ({0},{1,2}) is authorized while ({1},{0,2}) and ({2},{0,1}) are not.
//!
//! ```text
//! cargo run --example rank_counterexample
//! ```

use ess_core::access::{Pair, PairAccessStructure};
use ess_core::known::{feasibility_known, KnownVerdict};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = PairAccessStructure::new(3, [Pair::of(&[0], &[1, 2])], [Pair::of(&[1], &[0, 2]), Pair::of(&[2], &[0, 1])])?;
    for p in [2, 3, 5] {
        match feasibility_known(&s, p)? {
            KnownVerdict::Feasible { .. } => println!("F_{p}: feasible"),
            KnownVerdict::Infeasible(cert) => {
                println!("F_{p}: {cert}");
                println!("{}", serde_json::to_string_pretty(&cert.to_json())?);
            }
        }
    }
    Ok(())
}
