//! Verify the whole enumerated algorithm family against the exact oracle:
//! every configuration's composed algorithm must equal direct convolution,
//! exactly, on randomized rational inputs in both 1D and 2D.
//!
//! Run with: cargo run --example verify_exactness

use rayon::prelude::*;
use winconv::convolve::verify_exact;
use winconv::winograd::{build_transform_set, enumerate_family, format_ratio, ratio, Dims};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = enumerate_family();
    println!("verifying {} configurations, 100 trials each\n", family.len());

    let results: Vec<(String, usize, String, bool)> = family
        .par_iter()
        .map(|(id, cfg)| {
            let ts = build_transform_set(cfg).expect("family configs are valid");
            let ok = verify_exact(&ts, 100, 42).expect("trial count is positive");
            (
                id.clone(),
                ts.mu,
                format_ratio(&ratio(cfg, Dims::Two)),
                ok,
            )
        })
        .collect();

    let mut failures = 0;
    for (id, mu, ratio_2d, ok) in &results {
        println!(
            "{:<18} mu={:<3} ratio2d={:<6} {}",
            id,
            mu,
            ratio_2d,
            if *ok { "ok" } else { "MISMATCH" }
        );
        if !ok {
            failures += 1;
        }
    }
    println!("\n{} verified, {} failed", results.len() - failures, failures);
    if failures > 0 {
        std::process::exit(1);
    }
    Ok(())
}
