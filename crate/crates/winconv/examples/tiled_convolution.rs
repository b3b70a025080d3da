//! Tile a two-channel 14x14 input with the F(4x4, 3x3) algorithm, compare
//! the result and the multiplication count against direct convolution, and
//! show that exact-mode tiling is transparent (bit-identical output).
//!
//! Run with: cargo run --example tiled_convolution

use winconv::convolve::{tiled_conv_2d, tiled_direct_2d, Tensor};
use winconv::precision::NumberMode;
use winconv::winograd::{build_transform_set, toom_cook_config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = toom_cook_config(3, 4)?;
    let ts = build_transform_set(&cfg)?;

    // Two channels of small integer data; 14 = 3 tiles of n_o=4 plus the
    // n_h-1 = 2 overlap border.
    let channels = 2;
    let size = 14;
    let kernel = Tensor::new(
        channels,
        3,
        3,
        (0..channels * 9).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect(),
    )?;
    let input = Tensor::new(
        channels,
        size,
        size,
        (0..channels * size * size)
            .map(|i| ((i * 11 + 1) % 9) as f64 - 4.0)
            .collect(),
    )?;

    let wino = tiled_conv_2d(&ts, &kernel, &input, NumberMode::Exact)?;
    let direct = tiled_direct_2d(&kernel, &input, NumberMode::Exact)?;

    println!(
        "output {}x{}, tiles of {}x{}",
        wino.output.rows(),
        wino.output.cols(),
        cfg.n_o,
        cfg.n_o
    );
    println!(
        "elementwise multiplications: winograd {} vs direct {} ({:.2}x fewer)",
        wino.elementwise_mults,
        direct.elementwise_mults,
        direct.elementwise_mults as f64 / wino.elementwise_mults as f64
    );

    let identical = wino
        .output
        .data()
        .iter()
        .zip(direct.output.data())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("exact-mode outputs bit-identical to direct: {identical}");

    // The same convolution in fp32 picks up rounding error but stays close.
    let fp32 = tiled_conv_2d(&ts, &kernel, &input, NumberMode::Fp32)?;
    let max_dev = fp32
        .output
        .data()
        .iter()
        .zip(direct.output.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("fp32 max deviation from exact: {max_dev:.3e}");
    Ok(())
}
