//! Unknown-partner feasibility: structures that work, and two that fail for
//! different reasons.
//!
//! ```text
//! cargo run --example unknown_partner
//! ```

use ess_core::access::{Pair, PairAccessStructure};
use ess_core::unknown::{feasibility_unknown, synthesize_unknown, verify_unknown, with_complement, UnknownVerdict};

fn report(name: &str, s: &PairAccessStructure) -> Result<(), Box<dyn std::error::Error>> {
    match feasibility_unknown(s) {
        UnknownVerdict::Infeasible(cert) => println!("{name}: infeasible, {cert}"),
        UnknownVerdict::Feasible { components, .. } => {
            let scheme = synthesize_unknown(s)?;
            let rep = verify_unknown(&scheme, s);
            println!(
                "{name}: {} component(s), {} qubits, shares {:?}, verified {}",
                components.len(),
                scheme.group.qudits(),
                scheme.share_sizes(),
                rep.passed
            );
            for (t, w) in &scheme.vertex_witnesses {
                println!("  {t}: X on {:?}, Z on {:?}", w.x.support(), w.z.support());
            }
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A path {0} - {1,2} - {3}: both ends must intersect, so it fails.
    let path = PairAccessStructure::new(4, [Pair::of(&[0], &[1, 2]), Pair::of(&[1, 2], &[3])], [])?;
    report("path", &path)?;

    // A triangle of singletons is an odd cycle.
    let triangle = PairAccessStructure::new(3, [Pair::of(&[0], &[1]), Pair::of(&[1], &[2]), Pair::of(&[0], &[2])], [])?;
    report("triangle", &triangle)?;

    // Two components, {0} - {1,2} and {1} - {0,2}, with every other pair unauthorized.
    let two = with_complement(3, &[Pair::of(&[0], &[1, 2]), Pair::of(&[1], &[0, 2])])?;
    report("two components", &two)?;

    // A four-cycle {0} - {1,2} - {0,3} - {1} - {0}.
    let square = PairAccessStructure::new(
        4,
        [Pair::of(&[0], &[1, 2]), Pair::of(&[1, 2], &[0, 3]), Pair::of(&[0, 3], &[1]), Pair::of(&[1], &[0])],
        [],
    )?;
    report("square", &square)?;
    Ok(())
}
