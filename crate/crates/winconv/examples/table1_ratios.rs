//! Print the multiplication-ratio table for 3x3 kernels: output tiles 2, 4
//! and 6 with every linear/quadratic split of the modulus budget. The ratio
//! is elementwise multiplications per output point in 2D, mu^2 / n_o^2.
//!
//! Run with: cargo run --example table1_ratios

use winconv::winograd::{format_ratio, table1};

fn main() {
    println!("{:>4} {:>7} {:>10} {:>4} {:>7}", "n_o", "linear", "quadratic", "mu", "ratio");
    let mut last_n_o = 0;
    for row in table1() {
        if row.n_o != last_n_o && last_n_o != 0 {
            println!();
        }
        last_n_o = row.n_o;
        println!(
            "{:>4} {:>7} {:>10} {:>4} {:>7}",
            row.n_o,
            row.linear,
            row.quadratic,
            row.mu,
            format_ratio(&row.ratio_2d)
        );
    }
    println!("\ndirect convolution is ratio 9 (a 3x3 kernel per output point);");
    println!("each quadratic spends 2 of the degree budget but costs 3 products,");
    println!("trading multiplications for better-conditioned root points.");
}
