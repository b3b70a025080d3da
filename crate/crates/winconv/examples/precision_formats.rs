//! Tour of the simulated number formats: bit-level rounding behavior,
//! fp16-vs-bf16 trade-offs (precision versus range), and how overflow is
//! surfaced during a convolution.
//!
//! Run with: cargo run --example precision_formats

use winconv::convolve::{tiled_conv_2d, Tensor};
use winconv::precision::{round_to, NumberMode};
use winconv::winograd::{build_transform_set, toom_cook_config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = 1.0 / 3.0;
    println!("rounding 1/3 = {v:.17}:");
    for mode in NumberMode::ALL {
        let r = round_to(mode, v);
        println!("  {mode:>5}: {r:.17}  (bits 0x{:016x})", r.to_bits());
    }

    // bf16 keeps fp32's exponent range but only 8 significand bits; fp16
    // keeps 11 significand bits but saturates just above 65504.
    println!("\nvalue 65504 (fp16 max finite) and 65536:");
    for x in [65504.0, 65536.0] {
        println!(
            "  fp16({x}) = {}, bf16({x}) = {}",
            round_to(NumberMode::Fp16Sim, x),
            round_to(NumberMode::Bf16Sim, x)
        );
    }

    // A convolution whose intermediates exceed the fp16 range: inputs near
    // 200 are individually representable, but a 3x3 dot of ~200x200
    // products reaches ~360000 > 65504.
    let cfg = toom_cook_config(3, 2)?;
    let ts = build_transform_set(&cfg)?;
    let kernel = Tensor::new(1, 3, 3, vec![200.0; 9])?;
    let input = Tensor::new(1, 4, 4, vec![200.0; 16])?;
    for mode in [NumberMode::Fp16Sim, NumberMode::Bf16Sim, NumberMode::Fp32] {
        let out = tiled_conv_2d(&ts, &kernel, &input, mode)?;
        println!(
            "\n{mode}: output[0][0] = {}, overflowed ops = {}",
            out.output.get(0, 0),
            out.overflow_count
        );
    }
    println!("\nfp16 overflows on magnitudes bf16 absorbs without drama;");
    println!("bf16 pays for the range in precision (see the 1/3 roundings).");
    Ok(())
}
