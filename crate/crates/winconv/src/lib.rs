//! winconv — a generator and verification laboratory for Winograd-family
//! short-convolution algorithms.
//!
//! The crate constructs the kernel/input/output transform matrices of
//! F(n_o×n_o, n_h×n_h) convolution algorithms from an ordered list of
//! modulus polynomials — linear root points, irreducible quadratics, and
//! the pseudo-point ∞ — in exact rational arithmetic (CRT over Q[a]),
//! verifies the generated algorithms against direct convolution, executes
//! tiled 1D/2D convolution under simulated floating-point formats
//! (fp64/fp32/fp16/bf16), and runs reproducible multiplication-ratio and
//! floating-point-accuracy experiments.
//!
//! Layering, bottom up:
//! - [`exact`] — arbitrary-precision rationals and dense univariate
//!   polynomial algebra (division with remainder, gcd, extended Euclid).
//! - [`matrix`] — small dense matrices, exact Gauss-Jordan inverse.
//! - [`toomcook`] — Toom-Cook transform generation from root points
//!   (including ∞), used standalone and as the degree-2 sub-solver.
//! - [`winograd`] — general construction from modulus lists, multiplication
//!   counts and per-output-point ratios, config validation.
//! - [`convolve`] — direct, Winograd-domain, and tiled convolution in exact
//!   or simulated floating-point arithmetic; the exactness oracle.
//! - [`precision`] — number modes, bit-level rounding, error metrics.
//! - [`bench`] — randomized error experiments with paired sampling.
//! - [`io`] — transform/tensor/report serialization.
//! - [`cli`] — the `winconv` command-line front end.
//!
//! The central invariant: for every valid configuration, the composed
//! algorithm in exact arithmetic equals direct convolution, exactly. All
//! floating-point behavior is then measured relative to that guarantee.

pub mod bench;
pub mod cli;
pub mod convolve;
pub mod exact;
pub mod io;
pub mod matrix;
pub mod precision;
pub mod toomcook;
pub mod winograd;

use rand::SeedableRng;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    InvalidArgument(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration:\n{}", format_violations(.0))]
    Validation(Vec<winograd::Violation>),
    #[error("singular matrix")]
    Singular,
    #[error("internal construction bug: {0}")]
    ConstructionBug(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_violations(violations: &[winograd::Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Deterministic per-trial random stream: one ChaCha stream per trial index
/// on a shared seed, so that trial t of one experiment draws the same values
/// as trial t of another (paired sampling across configurations).
pub(crate) fn trial_rng(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
