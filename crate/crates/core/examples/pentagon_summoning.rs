//! Entanglement summoning on rings of labs. Five labs cannot serve every
//! non-adjacent request pair; four can.
//!
//! ```text
//! cargo run --example pentagon_summoning
//! ```

use ess_core::summon::{subsystem_name, summon_feasible};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 4..=7 {
        let out = summon_feasible(n)?;
        let sets: Vec<String> = out
            .reduction
            .vertices
            .iter()
            .map(|t| t.iter().map(subsystem_name).collect::<Vec<_>>().join(" "))
            .collect();
        println!("ring {n}: T = [{}]", sets.join("] ["));
        match out.cycle_edges() {
            Some(edges) => {
                let e: Vec<String> = edges.iter().map(|(a, b)| format!("{{T{a},T{b}}}")).collect();
                println!("  infeasible, odd cycle {}", e.join(" "));
            }
            None if out.is_feasible() => println!("  feasible"),
            None => println!("  infeasible"),
        }
    }
    Ok(())
}
