//! Logical operator counts, distances and the cleaning identity for a quantum
//! Reed-Solomon code.
//!
//! ```text
//! cargo run --example rs_code_lemmas
//! cargo run --example rs_code_lemmas -- 7 2 2
//! ```

use ess_core::access::all_subsets;
use ess_core::field::next_prime_at_least;
use ess_core::rscode::build_rs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (n, k, r) = match args[..] {
        [n, k, r] => (n, k, r),
        _ => (5, 1, 1),
    };
    let p = next_prime_at_least(n as u64);
    let code = build_rs(n, k, r, p, None)?;
    println!("n={n} k={k} r={r} over F_{p}");
    println!("formula distances {:?}", code.distance(false)?);
    println!("enumerated distances {:?}", code.distance(true)?);
    let mut mismatches = 0;
    for a in all_subsets(n) {
        let (gx, gz) = code.logical_counts(a);
        let (_, gz_c) = code.logical_counts(a.complement(n));
        if (gx, gz) != code.predicted_counts(a.len()) || gx + gz_c != k {
            mismatches += 1;
        }
    }
    println!("{} subsets, {mismatches} mismatches", 1usize << n);
    Ok(())
}
