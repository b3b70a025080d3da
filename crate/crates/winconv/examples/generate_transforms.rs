//! Construct the transform matrices for F(2x2, 3x3) with moduli
//! {a, a^2+1, inf} and print them in exact form, then save them as a
//! round-trippable JSON document.
//!
//! Run with: cargo run --example generate_transforms

use winconv::exact::{format_rational, rat, Polynomial, Rational};
use winconv::io::{write_transforms_json, TRANSFORMS_JSON};
use winconv::matrix::Matrix;
use winconv::winograd::{build_transform_set, format_ratio, one_quadratic_config, ratio, Dims};

fn print_matrix(name: &str, m: &Matrix<Rational>) {
    println!("{name} ({}x{}):", m.rows(), m.cols());
    for row in m.iter_rows() {
        let cells: Vec<String> = row.iter().map(format_rational).collect();
        println!("  [{}]", cells.join(", "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a^2 + 1, constant coefficient first.
    let quad = Polynomial::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]);
    let cfg = one_quadratic_config(3, 2, quad)?;

    println!("moduli:");
    for m in &cfg.moduli {
        println!("  {m}");
    }
    let ts = build_transform_set(&cfg)?;
    println!(
        "mu = {} (direct 1D needs {}), 2D ratio = {}\n",
        ts.mu,
        cfg.n_h * cfg.n_o,
        format_ratio(&ratio(&cfg, Dims::Two))
    );

    print_matrix("kernel transform G", &ts.kernel_transform);
    print_matrix("input transform B^T", &ts.input_transform);
    print_matrix("output transform A^T", &ts.output_transform);

    let out = std::env::temp_dir().join("winconv_example");
    std::fs::create_dir_all(&out)?;
    let path = out.join(TRANSFORMS_JSON);
    write_transforms_json(&path, &ts)?;
    println!("\nwrote {}", path.display());
    Ok(())
}
