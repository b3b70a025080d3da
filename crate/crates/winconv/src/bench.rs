//! Seeded random-data error experiments: per-trial Euclidean error of a
//! reduced-precision Winograd convolution against the fp64 direct reference,
//! aggregated per configuration.
//!
//! Sampling protocol (frozen so results are reproducible across runs and
//! machines): each trial draws from an independent RNG stream derived from
//! (seed, trial index); the kernel values are drawn first, then the input,
//! row-major; values come from a normal distribution with σ = 1/3,
//! rejection-resampled until strictly inside (−bound, bound). Configs that
//! share a trial index therefore see the same kernel and an identical input
//! prefix, which pairs A-vs-B comparisons and cuts their variance. Inputs
//! are rounded once to the experiment mode; the reference is the fp64
//! direct convolution of those rounded values (the exact direct convolution
//! when the mode itself is exact, so exact mode reports zero error). Trials
//! run in parallel but are reduced in ascending trial order, so aggregates
//! are bit-identical regardless of thread count.

use num::traits::Zero;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;

use crate::convolve::{
    direct_conv_1d, direct_conv_1d_exact, direct_conv_2d, direct_conv_2d_exact, verify_exact,
    winograd_conv_1d_with, winograd_conv_2d_with,
};
use crate::exact::{finite_rational, rational_to_f64, Rational};
use crate::matrix::Matrix;
use crate::precision::{euclidean_error, round_to, ErrorReport, FpOps, NumberMode};
use crate::winograd::{build_transform_set, ratio, validate_config, AlgorithmConfig, Dims, TransformSet};
use crate::{trial_rng, Error, Result};

pub const DEFAULT_TRIALS: usize = 5000;
pub const DEFAULT_SEED: u64 = 42;

/// Input value distribution: normal with the given σ, rejection-resampled
/// into (−bound, bound).
#[derive(Copy, Clone, Debug)]
pub struct InputDistribution {
    pub sigma: f64,
    pub bound: f64,
}

impl Default for InputDistribution {
    fn default() -> Self {
        InputDistribution {
            sigma: 1.0 / 3.0,
            bound: 1.0,
        }
    }
}

/// Everything needed to reproduce one experiment run bit for bit.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub dims: Dims,
    pub n_h: usize,
    pub configs: Vec<(String, AlgorithmConfig)>,
    pub trials: usize,
    pub seed: u64,
    pub mode: NumberMode,
    pub distribution: InputDistribution,
}

impl ExperimentSpec {
    pub fn new(configs: Vec<(String, AlgorithmConfig)>) -> Self {
        ExperimentSpec {
            dims: Dims::Two,
            n_h: 3,
            configs,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            mode: NumberMode::Fp32,
            distribution: InputDistribution::default(),
        }
    }
}

/// Kernel and input samples for one trial: kernel first, then input, both
/// row-major, from the (seed, trial) stream. 1D sizes are (n_h, n_x); 2D
/// sizes are (n_h², n_x²).
pub fn sample_inputs(spec: &ExperimentSpec, trial: u64, n_x: usize) -> (Vec<f64>, Vec<f64>) {
    let (h_len, x_len) = match spec.dims {
        Dims::One => (spec.n_h, n_x),
        Dims::Two => (spec.n_h * spec.n_h, n_x * n_x),
    };
    let mut rng = trial_rng(spec.seed, trial);
    let normal = Normal::new(0.0, spec.distribution.sigma).expect("finite sigma");
    let bound = spec.distribution.bound;
    let mut draw = || loop {
        let v = normal.sample(&mut rng);
        if v > -bound && v < bound {
            return v;
        }
    };
    let h: Vec<f64> = (0..h_len).map(|_| draw()).collect();
    let x: Vec<f64> = (0..x_len).map(|_| draw()).collect();
    (h, x)
}

fn trial_error_1d(
    ts: &TransformSet,
    mode: NumberMode,
    h: &[f64],
    x: &[f64],
) -> Result<f64> {
    let hr: Vec<f64> = h.iter().map(|&v| round_to(mode, v)).collect();
    let xr: Vec<f64> = x.iter().map(|&v| round_to(mode, v)).collect();
    let mut ops = FpOps::new(mode);
    let y = winograd_conv_1d_with(ts, &hr, &xr, &mut ops)?;
    // The reference is the fp64 direct convolution of the rounded inputs;
    // in exact mode it is the exact direct convolution (lowered the same
    // way as the Winograd result), so exact mode reports error 0.
    let reference = if mode == NumberMode::Exact {
        let hq: Vec<Rational> = hr.iter().map(|&v| finite_rational(v)).collect::<Result<_>>()?;
        let xq: Vec<Rational> = xr.iter().map(|&v| finite_rational(v)).collect::<Result<_>>()?;
        direct_conv_1d_exact(&hq, &xq)?.iter().map(rational_to_f64).collect()
    } else {
        direct_conv_1d(&hr, &xr)?
    };
    Ok(euclidean_error(&y, &reference))
}

fn trial_error_2d(
    ts: &TransformSet,
    mode: NumberMode,
    h: &[f64],
    x: &[f64],
) -> Result<f64> {
    let n_h = ts.n_h;
    let n_x = ts.n_x();
    let hm = Matrix::from_fn(n_h, n_h, |i, j| round_to(mode, h[i * n_h + j]));
    let xm = Matrix::from_fn(n_x, n_x, |i, j| round_to(mode, x[i * n_x + j]));
    let mut ops = FpOps::new(mode);
    let y = winograd_conv_2d_with(ts, &hm, &xm, &mut ops)?;
    let reference = if mode == NumberMode::Exact {
        let to_q = |m: &Matrix<f64>| -> Result<Matrix<Rational>> {
            let mut out = Matrix::filled(m.rows(), m.cols(), Rational::zero());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    out.set(i, j, finite_rational(*m.get(i, j))?);
                }
            }
            Ok(out)
        };
        direct_conv_2d_exact(&to_q(&hm)?, &to_q(&xm)?)?.map(rational_to_f64)
    } else {
        direct_conv_2d(&hm, &xm)?
    };
    Ok(euclidean_error(y.data(), reference.data()))
}

/// Per-trial Euclidean errors for one already-built transform set, in trial
/// order. Exposed so paired A-vs-B comparisons can difference the trials.
pub fn per_trial_errors(
    spec: &ExperimentSpec,
    ts: &TransformSet,
) -> Result<Vec<f64>> {
    (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| {
            let (h, x) = sample_inputs(spec, t, ts.n_x());
            match spec.dims {
                Dims::One => trial_error_1d(ts, spec.mode, &h, &x),
                Dims::Two => trial_error_2d(ts, spec.mode, &h, &x),
            }
        })
        .collect()
}

/// Runs the full experiment. Every config is validated, built, and checked
/// against the exact oracle before any trial runs; reports come back in
/// config order with deterministic aggregates.
pub fn run_error_experiment(spec: &ExperimentSpec) -> Result<Vec<ErrorReport>> {
    if spec.trials == 0 {
        return Err(Error::InvalidArgument("experiment needs at least one trial".into()));
    }
    if spec.configs.is_empty() {
        return Err(Error::InvalidArgument("experiment needs at least one config".into()));
    }
    let mut built: Vec<(&String, &AlgorithmConfig, TransformSet)> = Vec::new();
    for (id, cfg) in &spec.configs {
        if cfg.n_h != spec.n_h {
            return Err(Error::InvalidArgument(format!(
                "config {id} has n_h={}, experiment expects {}",
                cfg.n_h, spec.n_h
            )));
        }
        let violations = validate_config(cfg);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let ts = build_transform_set(cfg)?;
        if !verify_exact(&ts, 10, spec.seed)? {
            return Err(Error::VerificationFailed(format!(
                "config {id} failed the exact oracle"
            )));
        }
        built.push((id, cfg, ts));
    }
    let mut reports = Vec::with_capacity(built.len());
    for (id, cfg, ts) in built {
        let errors = per_trial_errors(spec, &ts)?;
        let mut sum = 0.0;
        let mut max = 0.0f64;
        let mut overflows = 0u64;
        for &e in &errors {
            sum += e;
            max = max.max(e);
            if !e.is_finite() {
                overflows += 1;
            }
        }
        reports.push(ErrorReport {
            config_id: id.clone(),
            n_o: cfg.n_o,
            n_quadratic: cfg.quadratic_count(),
            ratio: rational_to_f64(&ratio(cfg, spec.dims)),
            mode: spec.mode,
            trials: spec.trials,
            mean_err: sum / spec.trials as f64,
            max_err: max,
            overflow_count: overflows,
            seed: spec.seed,
        });
    }
    Ok(reports)
}

/// One row of the ratio-vs-error frontier table.
#[derive(Clone, Debug)]
pub struct ParetoRow {
    pub config_id: String,
    pub ratio: f64,
    pub mean_err: f64,
    pub dominated: bool,
}

/// Sorts reports by ratio and flags rows dominated by another row that is
/// at least as good in both ratio and mean error and better in one.
pub fn pareto_table(reports: &[ErrorReport]) -> Result<Vec<ParetoRow>> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("pareto table needs at least one report".into()));
    }
    let mut rows: Vec<ParetoRow> = reports
        .iter()
        .map(|r| ParetoRow {
            config_id: r.config_id.clone(),
            ratio: r.ratio,
            mean_err: r.mean_err,
            dominated: false,
        })
        .collect();
    rows.sort_by(|a, b| {
        a.ratio
            .total_cmp(&b.ratio)
            .then(a.mean_err.total_cmp(&b.mean_err))
    });
    for i in 0..rows.len() {
        rows[i].dominated = (0..rows.len()).any(|j| {
            j != i
                && rows[j].ratio <= rows[i].ratio
                && rows[j].mean_err <= rows[i].mean_err
                && (rows[j].ratio < rows[i].ratio || rows[j].mean_err < rows[i].mean_err)
        });
    }
    Ok(rows)
}
