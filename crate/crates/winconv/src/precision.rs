//! Simulated floating-point formats and instrumented elementwise kernels.
//!
//! Everything is carried in `f64`; a [`NumberMode`] says which format each
//! intermediate is rounded to. fp16 and bf16 values are simulated the way
//! mixed-precision hardware produces them: the operation itself runs at
//! fp32, then the result is converted down to the storage format (fp16 with
//! round-to-nearest-even, bf16 by truncating the fp32 representation to its
//! top 16 bits). The converters are bit-level so subnormals and overflow
//! behave exactly like the real formats.

use std::fmt;
use std::str::FromStr;

use num::traits::Zero;

use crate::exact::{f64_to_rational, rational_to_f64, Rational};
use crate::Error;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum NumberMode {
    Exact,
    Fp64,
    Fp32,
    Fp16Sim,
    Bf16Sim,
}

impl NumberMode {
    pub const ALL: [NumberMode; 5] = [
        NumberMode::Exact,
        NumberMode::Fp64,
        NumberMode::Fp32,
        NumberMode::Fp16Sim,
        NumberMode::Bf16Sim,
    ];
}

impl fmt::Display for NumberMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NumberMode::Exact => "exact",
            NumberMode::Fp64 => "fp64",
            NumberMode::Fp32 => "fp32",
            NumberMode::Fp16Sim => "fp16",
            NumberMode::Bf16Sim => "bf16",
        };
        f.write_str(s)
    }
}

impl FromStr for NumberMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(NumberMode::Exact),
            "fp64" | "f64" | "float64" => Ok(NumberMode::Fp64),
            "fp32" | "f32" | "float32" => Ok(NumberMode::Fp32),
            "fp16" | "f16" | "fp16sim" | "half" => Ok(NumberMode::Fp16Sim),
            "bf16" | "bf16sim" | "bfloat16" => Ok(NumberMode::Bf16Sim),
            other => Err(Error::Parse(format!(
                "unknown number mode {other:?} (expected exact, fp64, fp32, fp16 or bf16)"
            ))),
        }
    }
}

/// Round-half-to-even of a nonnegative value known to fit in u64.
fn round_half_even_u64(x: f64) -> u64 {
    let fl = x.floor();
    let diff = x - fl;
    let fl = fl as u64;
    if diff > 0.5 || (diff == 0.5 && fl % 2 == 1) {
        fl + 1
    } else {
        fl
    }
}

/// IEEE binary16 encoding with round-to-nearest-even. Values of magnitude
/// ≥ 65520 round past the maximum finite half (65504) to infinity;
/// magnitudes below 2⁻²⁴ round through the subnormal range to zero.
pub fn f64_to_f16_bits(x: f64) -> u16 {
    let bits = x.to_bits();
    let sign = ((bits >> 63) as u16) << 15;
    if x.is_nan() {
        return sign | 0x7e00;
    }
    let a = x.abs();
    if a >= 65520.0 {
        return sign | 0x7c00; // infinity (includes actual infinities)
    }
    if a < f64::from_bits(0x3f10000000000000) {
        // Below 2⁻¹⁴ (minimum normal): subnormal range. Scaling by 2²⁴ is
        // exact, so one round-half-even gives the subnormal significand;
        // a carry into bit 10 lands on the minimum normal encoding.
        let scaled = a * f64::from_bits(0x4170000000000000); // × 2²⁴
        return sign | (round_half_even_u64(scaled) as u16);
    }
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut he = (exp + 15) as u16;
    let m52 = bits & ((1u64 << 52) - 1);
    let mut m10 = m52 >> 42;
    let rest = m52 & ((1u64 << 42) - 1);
    let half = 1u64 << 41;
    if rest > half || (rest == half && m10 & 1 == 1) {
        m10 += 1;
        if m10 == 1 << 10 {
            m10 = 0;
            he += 1;
        }
    }
    debug_assert!(he < 31, "overflow handled by magnitude check");
    sign | (he << 10) | (m10 as u16)
}

pub fn f16_bits_to_f64(b: u16) -> f64 {
    let sign = if b & 0x8000 != 0 { -1.0 } else { 1.0 };
    let e = (b >> 10) & 0x1f;
    let m = (b & 0x3ff) as f64;
    match e {
        31 => {
            if m == 0.0 {
                sign * f64::INFINITY
            } else {
                f64::NAN
            }
        }
        0 => sign * m * f64::from_bits(0x3e70000000000000), // × 2⁻²⁴
        // Scale by 2^(e−25), built exactly from the exponent bits
        // (biased exponent e − 25 + 1023 = e + 998).
        _ => sign * (1024.0 + m) * f64::from_bits((e as u64 + 998) << 52),
    }
}

/// bfloat16 as produced by storage truncation: represent at fp32, keep the
/// top 16 bits. NaN is preserved explicitly (truncation alone could clear
/// every payload bit and turn a NaN into an infinity).
pub fn bf16_truncate(x: f64) -> f64 {
    let f = x as f32;
    if f.is_nan() {
        return f64::NAN;
    }
    f32::from_bits(f.to_bits() & 0xffff_0000) as f64
}

/// bfloat16 with round-to-nearest-even, for comparison against the
/// truncating store path used by [`NumberMode::Bf16Sim`].
pub fn bf16_round_nearest(x: f64) -> f64 {
    let f = x as f32;
    if f.is_nan() {
        return f64::NAN;
    }
    if f.is_infinite() {
        return f as f64;
    }
    let bits = f.to_bits();
    let rounded = bits.wrapping_add(0x7fff + ((bits >> 16) & 1)) & 0xffff_0000;
    f32::from_bits(rounded) as f64
}

/// Rounds a value to the representable set of the mode. Idempotent in every
/// mode; Exact and Fp64 are the identity.
pub fn round_to(mode: NumberMode, x: f64) -> f64 {
    match mode {
        NumberMode::Exact | NumberMode::Fp64 => x,
        NumberMode::Fp32 => x as f32 as f64,
        NumberMode::Fp16Sim => f16_bits_to_f64(f64_to_f16_bits(x)),
        NumberMode::Bf16Sim => bf16_truncate(x),
    }
}

/// Rounding-instrumented scalar ops: every multiply and add is rounded to
/// the mode, and each op whose finite inputs produce a non-finite result
/// bumps `overflow_count`.
#[derive(Clone, Debug)]
pub struct FpOps {
    mode: NumberMode,
    pub overflow_count: u64,
}

impl FpOps {
    pub fn new(mode: NumberMode) -> Self {
        FpOps {
            mode,
            overflow_count: 0,
        }
    }

    pub fn mode(&self) -> NumberMode {
        self.mode
    }

    /// For the 16-bit modes the op result is first taken at fp32 (the
    /// simulated compute precision), then stored down.
    fn lower(&self, v: f64) -> f64 {
        match self.mode {
            NumberMode::Exact | NumberMode::Fp64 => v,
            NumberMode::Fp32 => v as f32 as f64,
            NumberMode::Fp16Sim => f16_bits_to_f64(f64_to_f16_bits(v as f32 as f64)),
            NumberMode::Bf16Sim => bf16_truncate(v),
        }
    }

    pub fn round(&mut self, x: f64) -> f64 {
        let r = round_to(self.mode, x);
        if x.is_finite() && !r.is_finite() {
            self.overflow_count += 1;
        }
        r
    }

    pub fn mul(&mut self, a: f64, b: f64) -> f64 {
        let r = self.lower(a * b);
        if a.is_finite() && b.is_finite() && !r.is_finite() {
            self.overflow_count += 1;
        }
        r
    }

    pub fn add(&mut self, a: f64, b: f64) -> f64 {
        let r = self.lower(a + b);
        if a.is_finite() && b.is_finite() && !r.is_finite() {
            self.overflow_count += 1;
        }
        r
    }
}

/// Dot product under the mode's semantics: ascending index order, rounding
/// after every multiply and every add. Exact mode converts both vectors to
/// rationals, sums exactly, and rounds once at the end.
pub fn fp_dot(mode: NumberMode, u: &[f64], v: &[f64]) -> f64 {
    let mut ops = FpOps::new(mode);
    fp_dot_with(&mut ops, u, v)
}

pub fn fp_dot_with(ops: &mut FpOps, u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "dot product length mismatch");
    if ops.mode == NumberMode::Exact {
        // Non-finite values have no rational counterpart; let them
        // propagate through plain f64 arithmetic instead.
        if u.iter().chain(v).any(|x| !x.is_finite()) {
            return u.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        let mut acc = Rational::zero();
        for (a, b) in u.iter().zip(v) {
            let (a, b) = (f64_to_rational(*a), f64_to_rational(*b));
            acc += a.expect("finite") * b.expect("finite");
        }
        return rational_to_f64(&acc);
    }
    let mut acc = 0.0;
    for (a, b) in u.iter().zip(v) {
        let p = ops.mul(*a, *b);
        acc = ops.add(acc, p);
    }
    acc
}

/// ‖a − b‖₂ computed in fp64. Any non-finite entry on either side yields
/// +∞, which is how overflowed trials are flagged.
pub fn euclidean_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "error vector length mismatch");
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Aggregated accuracy measurement for one (config, mode) pair.
#[derive(Clone, Debug)]
pub struct ErrorReport {
    pub config_id: String,
    pub n_o: usize,
    pub n_quadratic: usize,
    pub ratio: f64,
    pub mode: NumberMode,
    pub trials: usize,
    pub mean_err: f64,
    pub max_err: f64,
    pub overflow_count: u64,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mode_strings_round_trip() {
        for mode in NumberMode::ALL {
            assert_eq!(mode.to_string().parse::<NumberMode>().unwrap(), mode);
        }
        assert_eq!("float32".parse::<NumberMode>().unwrap(), NumberMode::Fp32);
        assert!("fp8".parse::<NumberMode>().is_err());
    }

    #[test]
    fn bf16_truncation_bit_example() {
        // 0x3EAAAAAB is the float32 nearest to 1/3; truncating the lower
        // 16 bits gives 0x3EAA0000 = 0.33203125.
        let x = f32::from_bits(0x3eaa_aaab) as f64;
        let t = bf16_truncate(x);
        assert_eq!((t as f32).to_bits(), 0x3eaa_0000);
        assert_eq!(t, 0.33203125);
        // Round-to-nearest would have gone up instead.
        assert_eq!((bf16_round_nearest(x) as f32).to_bits(), 0x3eab_0000);
    }

    #[test]
    fn f16_overflow_and_max_finite() {
        assert_eq!(round_to(NumberMode::Fp16Sim, 65504.0), 65504.0);
        assert_eq!(round_to(NumberMode::Fp16Sim, 65536.0), f64::INFINITY);
        assert_eq!(round_to(NumberMode::Fp16Sim, 65520.0), f64::INFINITY);
        assert_eq!(round_to(NumberMode::Fp16Sim, 65519.0), 65504.0);
        assert_eq!(round_to(NumberMode::Fp16Sim, -65536.0), f64::NEG_INFINITY);
        assert_eq!(f64_to_f16_bits(65504.0), 0x7bff);
        assert_eq!(f64_to_f16_bits(f64::INFINITY), 0x7c00);
    }

    #[test]
    fn f16_subnormals() {
        let min_sub = f64::from_bits(0x3e70000000000000); // 2⁻²⁴
        assert_eq!(round_to(NumberMode::Fp16Sim, min_sub), min_sub);
        // 2⁻²⁵ ties to even → 0; anything below goes to 0 too.
        assert_eq!(round_to(NumberMode::Fp16Sim, min_sub / 2.0), 0.0);
        assert_eq!(round_to(NumberMode::Fp16Sim, 1e-12), 0.0);
        // Carry out of the subnormal significand lands on the min normal.
        let min_normal = f64::from_bits(0x3f10000000000000); // 2⁻¹⁴
        let just_below = min_normal * (1.0 - 1e-9);
        assert_eq!(round_to(NumberMode::Fp16Sim, just_below), min_normal);
        assert_eq!(f64_to_f16_bits(just_below), 0x0400);
    }

    #[test]
    fn f16_known_values() {
        assert_eq!(round_to(NumberMode::Fp16Sim, 1.0), 1.0);
        assert_eq!(round_to(NumberMode::Fp16Sim, 0.5), 0.5);
        assert_eq!(f64_to_f16_bits(1.0), 0x3c00);
        assert_eq!(f64_to_f16_bits(-2.0), 0xc000);
        // 1/3 in binary16 is 0x3555 = 0.333251953125.
        assert_eq!(f64_to_f16_bits(1.0 / 3.0), 0x3555);
        assert_eq!(round_to(NumberMode::Fp16Sim, 1.0 / 3.0), 0.333251953125);
        assert!(round_to(NumberMode::Fp16Sim, f64::NAN).is_nan());
        assert!(bf16_truncate(f64::NAN).is_nan());
    }

    #[test]
    fn rounding_idempotent_on_samples() {
        let samples = [
            0.0, 1.0, -1.0, 0.1, -0.3, 1e-3, 7.25, 65504.0, 1e5, 1e30, -1e30, 1e-30,
            std::f64::consts::PI,
        ];
        for mode in NumberMode::ALL {
            for &x in &samples {
                let once = round_to(mode, x);
                assert_eq!(round_to(mode, once), once, "{mode} {x}");
            }
        }
    }

    #[test]
    fn fp16_dot_overflows_at_70000() {
        let u = [100.0; 7];
        let mut ops = FpOps::new(NumberMode::Fp16Sim);
        let r = fp_dot_with(&mut ops, &u, &u);
        assert_eq!(r, f64::INFINITY);
        assert_eq!(ops.overflow_count, 1);
        // The same accumulation fits comfortably in bf16.
        let mut ops = FpOps::new(NumberMode::Bf16Sim);
        let r = fp_dot_with(&mut ops, &u, &u);
        assert!(r.is_finite());
        assert_eq!(ops.overflow_count, 0);
    }

    #[test]
    fn fp64_dot_is_exact_on_small_integers() {
        let u: Vec<f64> = (1..=10).map(f64::from).collect();
        let v: Vec<f64> = (11..=20).map(f64::from).collect();
        let want: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert_eq!(fp_dot(NumberMode::Fp64, &u, &v), want);
        assert_eq!(fp_dot(NumberMode::Exact, &u, &v), want);
    }

    #[test]
    fn exact_dot_beats_rounded_dot() {
        let u = [0.1, 0.2, 0.3, 0.4];
        let v = [0.7, -0.6, 0.5, -0.4];
        let exact = fp_dot(NumberMode::Exact, &u, &v);
        // Reference computed exactly over the f64 bit patterns.
        let mut acc = Rational::zero();
        for (a, b) in u.iter().zip(&v) {
            acc += f64_to_rational(*a).unwrap() * f64_to_rational(*b).unwrap();
        }
        assert_eq!(exact, rational_to_f64(&acc));
        let half = fp_dot(NumberMode::Fp16Sim, &u, &v);
        assert!((half - exact).abs() > 0.0);
        assert!((half - exact).abs() < 1e-2);
    }

    #[test]
    fn euclidean_error_cases() {
        assert_eq!(euclidean_error(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(euclidean_error(&[1.0], &[1.0]), 0.0);
        assert_eq!(
            euclidean_error(&[f64::INFINITY, 0.0], &[0.0, 0.0]),
            f64::INFINITY
        );
        assert_eq!(
            euclidean_error(&[0.0], &[f64::NAN]),
            f64::INFINITY
        );
    }

    #[test]
    fn overflow_counting_via_round() {
        let mut ops = FpOps::new(NumberMode::Fp16Sim);
        ops.round(1e30);
        assert_eq!(ops.overflow_count, 1);
        ops.round(f64::INFINITY); // already non-finite: not a new overflow
        assert_eq!(ops.overflow_count, 1);
        let mut ops = FpOps::new(NumberMode::Bf16Sim);
        ops.round(1e30); // within bf16 range
        assert_eq!(ops.overflow_count, 0);
        ops.round(1e39);
        assert_eq!(ops.overflow_count, 1);
        let mut ops = FpOps::new(NumberMode::Fp32);
        ops.mul(1e30, 1e30);
        assert_eq!(ops.overflow_count, 1);
    }

    proptest! {
        #[test]
        fn rounding_idempotent(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
            for mode in NumberMode::ALL {
                let once = round_to(mode, x);
                prop_assert_eq!(round_to(mode, once), once);
            }
        }

        #[test]
        fn fp32_relative_error_bound(x in -1e30f64..1e30) {
            let r = round_to(NumberMode::Fp32, x);
            prop_assert!((r - x).abs() <= x.abs() * (0.5f64).powi(24));
        }

        #[test]
        fn bf16_truncation_error_bound(x in -1e30f64..1e30) {
            let r = round_to(NumberMode::Bf16Sim, x);
            // Truncation is biased toward zero but bounded by one ulp.
            prop_assert!((r - x).abs() <= x.abs() * (0.5f64).powi(7));
            prop_assert!(r.abs() <= x.abs());
        }

        #[test]
        fn fp16_round_trip_through_bits(x in -60000.0f64..60000.0) {
            let r = f16_bits_to_f64(f64_to_f16_bits(x));
            prop_assert!((r - x).abs() <= x.abs() * (0.5f64).powi(11) + (0.5f64).powi(25));
        }
    }
}
