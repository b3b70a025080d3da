//! Direct and Winograd-domain convolution: single tiles, tiled multi-tile
//! inputs, multi-channel accumulation, exact or simulated floating point.
//!
//! "Convolution" throughout is valid correlation (no kernel flip), the DNN
//! convention; [`flip_kernel_2d`]/[`flip_tensor`] convert a kernel for
//! signal-processing-style true convolution. Every floating-point dot
//! product runs in fixed ascending index order with rounding after each
//! multiply and each add, so results are bit-reproducible regardless of
//! thread count. Tiles are computed independently (in parallel) and
//! assembled in order; channel accumulation inside a tile is sequential
//! ascending, performed in the Winograd domain before the output transform.

use num::traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::exact::{f64_to_rational, finite_rational, rat, rational_to_f64, Rational};
use crate::matrix::Matrix;
use crate::precision::{FpOps, NumberMode};
use crate::winograd::TransformSet;
use crate::{trial_rng, Error, Result};

/// Multi-channel planar data: `channels` row-major `rows`×`cols` planes.
#[derive(Clone, PartialEq, Debug)]
pub struct Tensor {
    channels: usize,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(channels: usize, rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "tensor {channels}x{rows}x{cols} needs {} values, got {}",
                channels * rows * cols,
                data.len()
            )));
        }
        Ok(Tensor {
            channels,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(channels: usize, rows: usize, cols: usize) -> Self {
        Tensor {
            channels,
            rows,
            cols,
            data: vec![0.0; channels * rows * cols],
        }
    }

    pub fn from_channels(planes: Vec<Matrix<f64>>) -> Result<Self> {
        let Some(first) = planes.first() else {
            return Err(Error::InvalidArgument("tensor needs at least one channel".into()));
        };
        let (rows, cols) = (first.rows(), first.cols());
        let mut data = Vec::with_capacity(planes.len() * rows * cols);
        for p in &planes {
            if p.rows() != rows || p.cols() != cols {
                return Err(Error::ShapeMismatch(
                    "tensor channels must share one shape".into(),
                ));
            }
            data.extend_from_slice(p.data());
        }
        Tensor::new(planes.len(), rows, cols, data)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, c: usize, i: usize, j: usize) -> f64 {
        self.data[(c * self.rows + i) * self.cols + j]
    }

    pub fn set(&mut self, c: usize, i: usize, j: usize, v: f64) {
        self.data[(c * self.rows + i) * self.cols + j] = v;
    }

    pub fn channel_matrix(&self, c: usize) -> Matrix<f64> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(c, i, j))
    }

    fn map(&self, mut f: impl FnMut(f64) -> f64) -> Tensor {
        Tensor {
            channels: self.channels,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Reverses a 1D kernel for true convolution.
pub fn flip_kernel_1d(h: &[f64]) -> Vec<f64> {
    h.iter().rev().copied().collect()
}

/// Reverses both kernel dimensions for true convolution.
pub fn flip_kernel_2d<T: Clone>(h: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(h.rows(), h.cols(), |i, j| {
        h.get(h.rows() - 1 - i, h.cols() - 1 - j).clone()
    })
}

/// Flips every channel of a kernel tensor (channels keep their order).
pub fn flip_tensor(t: &Tensor) -> Tensor {
    let mut out = Tensor::zeros(t.channels, t.rows, t.cols);
    for c in 0..t.channels {
        for i in 0..t.rows {
            for j in 0..t.cols {
                out.set(c, i, j, t.get(c, t.rows - 1 - i, t.cols - 1 - j));
            }
        }
    }
    out
}

/// How an input splits into overlapping tiles: stride n_o, tile width n_x,
/// consecutive tiles overlapping by n_h − 1.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct TilingPlan {
    pub n_h: usize,
    pub n_o: usize,
    pub n_x: usize,
    pub out_rows: usize,
    pub out_cols: usize,
    pub tiles_r: usize,
    pub tiles_c: usize,
}

/// Computes the tile grid; output dimensions must be exact multiples of
/// n_o — inputs are never padded implicitly.
pub fn plan_tiling(rows: usize, cols: usize, n_h: usize, n_o: usize) -> Result<TilingPlan> {
    let n_x = n_h + n_o - 1;
    if rows < n_x || cols < n_x {
        return Err(Error::InvalidArgument(format!(
            "input {rows}x{cols} is smaller than one {n_x}x{n_x} tile"
        )));
    }
    let out_rows = rows - n_h + 1;
    let out_cols = cols - n_h + 1;
    if out_rows % n_o != 0 || out_cols % n_o != 0 {
        return Err(Error::InvalidArgument(format!(
            "output {out_rows}x{out_cols} is not divisible by the tile output \
             size {n_o}; pad the input explicitly"
        )));
    }
    Ok(TilingPlan {
        n_h,
        n_o,
        n_x,
        out_rows,
        out_cols,
        tiles_r: out_rows / n_o,
        tiles_c: out_cols / n_o,
    })
}

/// Sliding dot product, ascending k: y_j = Σ_k h_k · x_{j+k}.
pub fn direct_conv_1d(h: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if h.is_empty() || x.len() < h.len() {
        return Err(Error::ShapeMismatch(format!(
            "kernel length {} does not fit input length {}",
            h.len(),
            x.len()
        )));
    }
    let n_o = x.len() - h.len() + 1;
    Ok((0..n_o)
        .map(|j| h.iter().enumerate().map(|(k, hk)| hk * x[j + k]).sum())
        .collect())
}

pub fn direct_conv_1d_exact(h: &[Rational], x: &[Rational]) -> Result<Vec<Rational>> {
    if h.is_empty() || x.len() < h.len() {
        return Err(Error::ShapeMismatch(format!(
            "kernel length {} does not fit input length {}",
            h.len(),
            x.len()
        )));
    }
    let n_o = x.len() - h.len() + 1;
    Ok((0..n_o)
        .map(|j| {
            let mut acc = Rational::zero();
            for (k, hk) in h.iter().enumerate() {
                acc += hk * &x[j + k];
            }
            acc
        })
        .collect())
}

/// 2D sliding dot product with row-major accumulation order.
pub fn direct_conv_2d(h: &Matrix<f64>, x: &Matrix<f64>) -> Result<Matrix<f64>> {
    if h.rows() == 0 || x.rows() < h.rows() || x.cols() < h.cols() {
        return Err(Error::ShapeMismatch(format!(
            "kernel {}x{} does not fit input {}x{}",
            h.rows(),
            h.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let out_r = x.rows() - h.rows() + 1;
    let out_c = x.cols() - h.cols() + 1;
    Ok(Matrix::from_fn(out_r, out_c, |i, j| {
        let mut acc = 0.0;
        for ki in 0..h.rows() {
            for kj in 0..h.cols() {
                acc += h.get(ki, kj) * x.get(i + ki, j + kj);
            }
        }
        acc
    }))
}

pub fn direct_conv_2d_exact(
    h: &Matrix<Rational>,
    x: &Matrix<Rational>,
) -> Result<Matrix<Rational>> {
    if h.rows() == 0 || x.rows() < h.rows() || x.cols() < h.cols() {
        return Err(Error::ShapeMismatch(format!(
            "kernel {}x{} does not fit input {}x{}",
            h.rows(),
            h.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let out_r = x.rows() - h.rows() + 1;
    let out_c = x.cols() - h.cols() + 1;
    Ok(Matrix::from_fn(out_r, out_c, |i, j| {
        let mut acc = Rational::zero();
        for ki in 0..h.rows() {
            for kj in 0..h.cols() {
                acc += h.get(ki, kj) * x.get(i + ki, j + kj);
            }
        }
        acc
    }))
}

/// Lowers an exact matrix to the active mode, one rounding per entry.
fn lower_matrix(ops: &mut FpOps, m: &Matrix<Rational>) -> Matrix<f64> {
    m.map(|r| ops.round(rational_to_f64(r)))
}

fn to_rational_vec(v: &[f64]) -> Result<Vec<Rational>> {
    v.iter().map(|&x| finite_rational(x)).collect()
}

fn to_rational_matrix(m: &Matrix<f64>) -> Result<Matrix<Rational>> {
    let mut out = Matrix::filled(m.rows(), m.cols(), Rational::zero());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, finite_rational(*m.get(i, j))?);
        }
    }
    Ok(out)
}

/// Exact arithmetic can only represent finite values; reject tensors with
/// NaN/±∞ up front so the per-tile conversions below cannot fail.
fn ensure_finite_tensor(t: &Tensor, what: &str) -> Result<()> {
    if t.data().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} tensor contains a non-finite value; exact mode requires finite data"
        )))
    }
}

fn lower_rational_matrix(m: &Matrix<Rational>) -> Matrix<f64> {
    m.map(rational_to_f64)
}

/// Matrix-vector product under the mode's rounding, ascending index.
fn fp_mul_vec(ops: &mut FpOps, m: &Matrix<f64>, v: &[f64]) -> Result<Vec<f64>> {
    if m.cols() != v.len() {
        return Err(Error::ShapeMismatch(format!(
            "matrix {}x{} times vector of length {}",
            m.rows(),
            m.cols(),
            v.len()
        )));
    }
    Ok((0..m.rows())
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..m.cols() {
                let p = ops.mul(*m.get(i, j), v[j]);
                acc = ops.add(acc, p);
            }
            acc
        })
        .collect())
}

/// Matrix product under the mode's rounding, ascending inner index.
fn fp_matmul(ops: &mut FpOps, a: &Matrix<f64>, b: &Matrix<f64>) -> Result<Matrix<f64>> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "matrix product {}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut out = Matrix::filled(a.rows(), b.cols(), 0.0);
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut acc = 0.0;
            for k in 0..a.cols() {
                let p = ops.mul(*a.get(i, k), *b.get(k, j));
                acc = ops.add(acc, p);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// One-tile 1D Winograd convolution under `mode`.
pub fn winograd_conv_1d(
    ts: &TransformSet,
    h: &[f64],
    x: &[f64],
    mode: NumberMode,
) -> Result<Vec<f64>> {
    let mut ops = FpOps::new(mode);
    winograd_conv_1d_with(ts, h, x, &mut ops)
}

/// As [`winograd_conv_1d`] but accumulating overflow counts into `ops`.
pub fn winograd_conv_1d_with(
    ts: &TransformSet,
    h: &[f64],
    x: &[f64],
    ops: &mut FpOps,
) -> Result<Vec<f64>> {
    if h.len() != ts.n_h || x.len() != ts.n_x() {
        return Err(Error::ShapeMismatch(format!(
            "expected kernel {} and input {}, got {} and {}",
            ts.n_h,
            ts.n_x(),
            h.len(),
            x.len()
        )));
    }
    if ops.mode() == NumberMode::Exact {
        let y = ts.apply_1d_exact(&to_rational_vec(h)?, &to_rational_vec(x)?)?;
        return Ok(y.iter().map(rational_to_f64).collect());
    }
    let g = lower_matrix(ops, &ts.kernel_transform);
    let bt = lower_matrix(ops, &ts.input_transform);
    let at = lower_matrix(ops, &ts.output_transform);
    let h: Vec<f64> = h.iter().map(|&v| ops.round(v)).collect();
    let x: Vec<f64> = x.iter().map(|&v| ops.round(v)).collect();
    let gh = fp_mul_vec(ops, &g, &h)?;
    let bx = fp_mul_vec(ops, &bt, &x)?;
    let had: Vec<f64> = gh.iter().zip(&bx).map(|(&a, &b)| ops.mul(a, b)).collect();
    fp_mul_vec(ops, &at, &had)
}

/// One-tile 2D Winograd convolution under `mode`.
pub fn winograd_conv_2d(
    ts: &TransformSet,
    h: &Matrix<f64>,
    x: &Matrix<f64>,
    mode: NumberMode,
) -> Result<Matrix<f64>> {
    let mut ops = FpOps::new(mode);
    winograd_conv_2d_with(ts, h, x, &mut ops)
}

/// As [`winograd_conv_2d`] but accumulating overflow counts into `ops`.
/// Operation order is fixed: kernel transform (rows then columns), input
/// transform (rows then columns), elementwise multiply, output transform.
pub fn winograd_conv_2d_with(
    ts: &TransformSet,
    h: &Matrix<f64>,
    x: &Matrix<f64>,
    ops: &mut FpOps,
) -> Result<Matrix<f64>> {
    if h.rows() != ts.n_h || h.cols() != ts.n_h {
        return Err(Error::ShapeMismatch(format!("kernel must be {0}x{0}", ts.n_h)));
    }
    if x.rows() != ts.n_x() || x.cols() != ts.n_x() {
        return Err(Error::ShapeMismatch(format!(
            "input tile must be {0}x{0}",
            ts.n_x()
        )));
    }
    if ops.mode() == NumberMode::Exact {
        let y = ts.apply_2d_exact(&to_rational_matrix(h)?, &to_rational_matrix(x)?)?;
        return Ok(lower_rational_matrix(&y));
    }
    let g = lower_matrix(ops, &ts.kernel_transform);
    let bt = lower_matrix(ops, &ts.input_transform);
    let at = lower_matrix(ops, &ts.output_transform);
    let h = h.map(|&v| ops.round(v));
    let x = x.map(|&v| ops.round(v));
    let k = {
        let t = fp_matmul(ops, &g, &h)?;
        fp_matmul(ops, &t, &g.transpose())?
    };
    let d = {
        let t = fp_matmul(ops, &bt, &x)?;
        fp_matmul(ops, &t, &bt.transpose())?
    };
    let mut s = Matrix::filled(ts.mu, ts.mu, 0.0);
    for i in 0..ts.mu {
        for j in 0..ts.mu {
            s.set(i, j, ops.mul(*k.get(i, j), *d.get(i, j)));
        }
    }
    let t = fp_matmul(ops, &at, &s)?;
    fp_matmul(ops, &t, &at.transpose())
}

/// Output of a tiled convolution plus its instrumentation: the number of
/// Winograd-domain elementwise multiplications actually executed (μ² per
/// tile per channel) and the number of op-level overflows to non-finite.
#[derive(Clone, Debug)]
pub struct TiledConvOutput {
    pub output: Matrix<f64>,
    pub elementwise_mults: u64,
    pub overflow_count: u64,
}

fn check_tensor_pair(ts_n_h: usize, kernel: &Tensor, input: &Tensor) -> Result<()> {
    if kernel.rows() != ts_n_h || kernel.cols() != ts_n_h {
        return Err(Error::ShapeMismatch(format!(
            "kernel tensor must be {0}x{0} per channel, got {1}x{2}",
            ts_n_h,
            kernel.rows(),
            kernel.cols()
        )));
    }
    if kernel.channels() == 0 || kernel.channels() != input.channels() {
        return Err(Error::ShapeMismatch(format!(
            "kernel has {} channels, input has {}",
            kernel.channels(),
            input.channels()
        )));
    }
    Ok(())
}

/// Tiled multi-channel 2D convolution: one output plane, channels
/// accumulated in the Winograd domain in ascending order, tiles computed
/// concurrently and assembled in row-major tile order.
pub fn tiled_conv_2d(
    ts: &TransformSet,
    kernel: &Tensor,
    input: &Tensor,
    mode: NumberMode,
) -> Result<TiledConvOutput> {
    check_tensor_pair(ts.n_h, kernel, input)?;
    let plan = plan_tiling(input.rows(), input.cols(), ts.n_h, ts.n_o)?;
    if mode == NumberMode::Exact {
        tiled_exact(ts, kernel, input, &plan)
    } else {
        tiled_fp(ts, kernel, input, &plan, mode)
    }
}

fn tile_coords(plan: &TilingPlan) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(plan.tiles_r * plan.tiles_c);
    for ti in 0..plan.tiles_r {
        for tj in 0..plan.tiles_c {
            v.push((ti, tj));
        }
    }
    v
}

fn stitch(
    plan: &TilingPlan,
    tiles: Vec<(Matrix<f64>, u64, u64)>,
) -> TiledConvOutput {
    let mut output = Matrix::filled(plan.out_rows, plan.out_cols, 0.0);
    let mut elementwise_mults = 0u64;
    let mut overflow_count = 0u64;
    for ((ti, tj), (y, mults, overflows)) in tile_coords(plan).into_iter().zip(tiles) {
        for i in 0..plan.n_o {
            for j in 0..plan.n_o {
                output.set(ti * plan.n_o + i, tj * plan.n_o + j, *y.get(i, j));
            }
        }
        elementwise_mults += mults;
        overflow_count += overflows;
    }
    TiledConvOutput {
        output,
        elementwise_mults,
        overflow_count,
    }
}

fn tiled_exact(
    ts: &TransformSet,
    kernel: &Tensor,
    input: &Tensor,
    plan: &TilingPlan,
) -> Result<TiledConvOutput> {
    ensure_finite_tensor(kernel, "kernel")?;
    ensure_finite_tensor(input, "input")?;
    let g = &ts.kernel_transform;
    let bt = &ts.input_transform;
    let at = &ts.output_transform;
    let k_ch: Vec<Matrix<Rational>> = (0..kernel.channels())
        .map(|c| {
            let h = to_rational_matrix(&kernel.channel_matrix(c))?;
            g.mul(&h)?.mul(&g.transpose())
        })
        .collect::<Result<_>>()?;
    let bt_t = bt.transpose();
    let at_t = at.transpose();
    let tiles: Vec<(Matrix<f64>, u64, u64)> = tile_coords(plan)
        .into_par_iter()
        .map(|(ti, tj)| {
            let mut s = Matrix::filled(ts.mu, ts.mu, Rational::zero());
            let mut mults = 0u64;
            for (c, k) in k_ch.iter().enumerate() {
                let xt = Matrix::from_fn(plan.n_x, plan.n_x, |i, j| {
                    f64_to_rational(input.get(c, ti * plan.n_o + i, tj * plan.n_o + j))
                        .expect("prechecked finite")
                });
                let d = bt.mul(&xt)?.mul(&bt_t)?;
                for i in 0..ts.mu {
                    for j in 0..ts.mu {
                        let p = k.get(i, j) * d.get(i, j);
                        s.set(i, j, s.get(i, j) + p);
                        mults += 1;
                    }
                }
            }
            let y = at.mul(&s)?.mul(&at_t)?;
            Ok((lower_rational_matrix(&y), mults, 0u64))
        })
        .collect::<Result<_>>()?;
    Ok(stitch(plan, tiles))
}

fn tiled_fp(
    ts: &TransformSet,
    kernel: &Tensor,
    input: &Tensor,
    plan: &TilingPlan,
    mode: NumberMode,
) -> Result<TiledConvOutput> {
    let mut ops = FpOps::new(mode);
    let g = lower_matrix(&mut ops, &ts.kernel_transform);
    let bt = lower_matrix(&mut ops, &ts.input_transform);
    let at = lower_matrix(&mut ops, &ts.output_transform);
    let bt_t = bt.transpose();
    let at_t = at.transpose();
    // Kernels are rounded and transformed once, ahead of all tiles.
    let k_ch: Vec<Matrix<f64>> = (0..kernel.channels())
        .map(|c| {
            let h = kernel.channel_matrix(c).map(|&v| ops.round(v));
            let t = fp_matmul(&mut ops, &g, &h)?;
            fp_matmul(&mut ops, &t, &g.transpose())
        })
        .collect::<Result<_>>()?;
    let x = input.map(|v| ops.round(v));
    let setup_overflows = ops.overflow_count;
    let tiles: Vec<(Matrix<f64>, u64, u64)> = tile_coords(plan)
        .into_par_iter()
        .map(|(ti, tj)| {
            let mut lops = FpOps::new(mode);
            let mut s = Matrix::filled(ts.mu, ts.mu, 0.0);
            let mut mults = 0u64;
            for (c, k) in k_ch.iter().enumerate() {
                let xt = Matrix::from_fn(plan.n_x, plan.n_x, |i, j| {
                    x.get(c, ti * plan.n_o + i, tj * plan.n_o + j)
                });
                let t = fp_matmul(&mut lops, &bt, &xt)?;
                let d = fp_matmul(&mut lops, &t, &bt_t)?;
                for i in 0..ts.mu {
                    for j in 0..ts.mu {
                        let p = lops.mul(*k.get(i, j), *d.get(i, j));
                        s.set(i, j, lops.add(*s.get(i, j), p));
                        mults += 1;
                    }
                }
            }
            let t = fp_matmul(&mut lops, &at, &s)?;
            let y = fp_matmul(&mut lops, &t, &at_t)?;
            Ok((y, mults, lops.overflow_count))
        })
        .collect::<Result<_>>()?;
    let mut out = stitch(plan, tiles);
    out.overflow_count += setup_overflows;
    Ok(out)
}

/// Direct reference convolution over the same tensors and mode, with the
/// same rounding discipline (ascending channel-major accumulation). In
/// exact mode its output is bit-identical to [`tiled_conv_2d`]'s.
pub fn tiled_direct_2d(
    kernel: &Tensor,
    input: &Tensor,
    mode: NumberMode,
) -> Result<TiledConvOutput> {
    if kernel.rows() != kernel.cols() {
        return Err(Error::ShapeMismatch("kernel channels must be square".into()));
    }
    check_tensor_pair(kernel.rows(), kernel, input)?;
    let n_h = kernel.rows();
    if input.rows() < n_h || input.cols() < n_h {
        return Err(Error::ShapeMismatch(format!(
            "kernel {}x{} does not fit input {}x{}",
            n_h,
            n_h,
            input.rows(),
            input.cols()
        )));
    }
    let out_r = input.rows() - n_h + 1;
    let out_c = input.cols() - n_h + 1;
    let mults = (out_r * out_c * kernel.channels() * n_h * n_h) as u64;
    if mode == NumberMode::Exact {
        ensure_finite_tensor(kernel, "kernel")?;
        ensure_finite_tensor(input, "input")?;
        let exact = |v: f64| f64_to_rational(v).expect("prechecked finite");
        let output = Matrix::from_fn(out_r, out_c, |i, j| {
            let mut acc = Rational::zero();
            for c in 0..kernel.channels() {
                for ki in 0..n_h {
                    for kj in 0..n_h {
                        acc += exact(kernel.get(c, ki, kj)) * exact(input.get(c, i + ki, j + kj));
                    }
                }
            }
            rational_to_f64(&acc)
        });
        return Ok(TiledConvOutput {
            output,
            elementwise_mults: mults,
            overflow_count: 0,
        });
    }
    let mut ops = FpOps::new(mode);
    let kernel = kernel.map(|v| ops.round(v));
    let input = input.map(|v| ops.round(v));
    let mut output = Matrix::filled(out_r, out_c, 0.0);
    for i in 0..out_r {
        for j in 0..out_c {
            let mut acc = 0.0;
            for c in 0..kernel.channels() {
                for ki in 0..n_h {
                    for kj in 0..n_h {
                        let p = ops.mul(kernel.get(c, ki, kj), input.get(c, i + ki, j + kj));
                        acc = ops.add(acc, p);
                    }
                }
            }
            output.set(i, j, acc);
        }
    }
    Ok(TiledConvOutput {
        output,
        elementwise_mults: mults,
        overflow_count: ops.overflow_count,
    })
}

fn rand_rat<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

/// Checks the central exactness invariant: for `trials` seeded pseudo-random
/// rational inputs (numerators in [−9,9], denominators in [1,4], kernel
/// drawn before input), the composed 1D and 2D algorithms must equal direct
/// convolution exactly.
pub fn verify_exact(ts: &TransformSet, trials: usize, seed: u64) -> Result<bool> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "verification requires at least one trial".into(),
        ));
    }
    let n_h = ts.n_h;
    let n_x = ts.n_x();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let h: Vec<Rational> = (0..n_h).map(|_| rand_rat(&mut rng)).collect();
        let x: Vec<Rational> = (0..n_x).map(|_| rand_rat(&mut rng)).collect();
        if ts.apply_1d_exact(&h, &x)? != direct_conv_1d_exact(&h, &x)? {
            return Ok(false);
        }
        let mut hm = Matrix::filled(n_h, n_h, Rational::zero());
        for i in 0..n_h {
            for j in 0..n_h {
                hm.set(i, j, rand_rat(&mut rng));
            }
        }
        let mut xm = Matrix::filled(n_x, n_x, Rational::zero());
        for i in 0..n_x {
            for j in 0..n_x {
                xm.set(i, j, rand_rat(&mut rng));
            }
        }
        if ts.apply_2d_exact(&hm, &xm)? != direct_conv_2d_exact(&hm, &xm)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::toomcook::{toom_cook_transforms, PointSet, RootPoint};
    use crate::winograd::{build_transform_set, one_quadratic_config, toom_cook_config};
    use proptest::prelude::*;
    use rand::Rng;

    fn fm(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn direct_1d_known_values() {
        assert_eq!(direct_conv_1d(&[1.0], &[5.0, 7.0]).unwrap(), vec![5.0, 7.0]);
        assert_eq!(
            direct_conv_1d(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0, 4.0]).unwrap(),
            vec![6.0, 9.0]
        );
        // Hand evaluation: 4−10+18 = 12, 5−12+21 = 14.
        assert_eq!(
            direct_conv_1d(&[1.0, -2.0, 3.0], &[4.0, 5.0, 6.0, 7.0]).unwrap(),
            vec![12.0, 14.0]
        );
        assert!(direct_conv_1d(&[1.0, 2.0], &[3.0]).is_err());
    }

    #[test]
    fn direct_2d_known_values() {
        let ones3 = Matrix::filled(3, 3, 1.0);
        let ones4 = Matrix::filled(4, 4, 1.0);
        let y = direct_conv_2d(&ones3, &ones4).unwrap();
        assert_eq!(y, Matrix::filled(2, 2, 9.0));
        // Impulse at (0,0) sifts the input.
        let mut imp = Matrix::filled(3, 3, 0.0);
        imp.set(0, 0, 1.0);
        let x = fm(&[
            &[1.0, 2.0, 3.0, 4.0],
            &[5.0, 6.0, 7.0, 8.0],
            &[9.0, 10.0, 11.0, 12.0],
            &[13.0, 14.0, 15.0, 16.0],
        ]);
        let y = direct_conv_2d(&imp, &x).unwrap();
        assert_eq!(y, fm(&[&[1.0, 2.0], &[5.0, 6.0]]));
    }

    #[test]
    fn kernel_flip_gives_true_convolution() {
        assert_eq!(flip_kernel_1d(&[1.0, 2.0, 3.0]), vec![3.0, 2.0, 1.0]);
        let h = fm(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(flip_kernel_2d(&h), fm(&[&[4.0, 3.0], &[2.0, 1.0]]));
        // Correlation with the flipped kernel = textbook convolution.
        let y = direct_conv_1d(&flip_kernel_1d(&[1.0, -1.0]), &[2.0, 5.0, 9.0]).unwrap();
        assert_eq!(y, vec![3.0, 4.0]);
    }

    #[test]
    fn winograd_1d_fp32_small_integers_are_exact() {
        // F(2,3) on points {0, 1, −1, ∞}: integer intermediates stay well
        // inside fp32 range, so the result is exact.
        let points = PointSet::new(vec![
            RootPoint::Finite(rat_int(0)),
            RootPoint::Finite(rat_int(1)),
            RootPoint::Finite(rat_int(-1)),
            RootPoint::Infinity,
        ])
        .unwrap();
        let ts = toom_cook_transforms(&points, 3, 2).unwrap();
        let y = winograd_conv_1d(&ts, &[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0, 4.0], NumberMode::Fp32)
            .unwrap();
        assert_eq!(y, vec![6.0, 9.0]);
        let y = winograd_conv_1d(&ts, &[0.0; 3], &[1.0, 2.0, 3.0, 4.0], NumberMode::Fp16Sim)
            .unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
    }

    #[test]
    fn winograd_2d_exact_equals_direct() {
        let ts = build_transform_set(
            &one_quadratic_config(3, 2, crate::winograd::quadratic_candidates()[0].clone())
                .unwrap(),
        )
        .unwrap();
        let h = fm(&[&[0.5, -1.0, 2.0], &[3.0, 0.25, -0.75], &[1.0, 0.0, -2.0]]);
        let x = Matrix::from_fn(4, 4, |i, j| (i as f64 * 0.5) - (j as f64 * 0.25) + 1.0);
        let y = winograd_conv_2d(&ts, &h, &x, NumberMode::Exact).unwrap();
        let want = direct_conv_2d(&h, &x).unwrap();
        assert_eq!(y, want); // dyadic values: both sides are exact in f64
    }

    #[test]
    fn winograd_2d_fp32_integers_agree_with_direct() {
        // Points {0, 1, −1, ∞} give dyadic transform entries, so small
        // integer kernels and inputs stay exact through fp32.
        let points = PointSet::new(vec![
            RootPoint::Finite(rat_int(0)),
            RootPoint::Finite(rat_int(1)),
            RootPoint::Finite(rat_int(-1)),
            RootPoint::Infinity,
        ])
        .unwrap();
        let ts = toom_cook_transforms(&points, 3, 2).unwrap();
        let h = Matrix::from_fn(3, 3, |i, j| ((i * 3 + j) as f64) - 4.0);
        let x = Matrix::from_fn(4, 4, |i, j| (((i * 4 + j) % 7) as f64) - 3.0);
        let y = winograd_conv_2d(&ts, &h, &x, NumberMode::Fp32).unwrap();
        let want = direct_conv_2d(&h, &x).unwrap();
        assert_eq!(y, want);
    }

    #[test]
    fn tiling_plan_shapes_and_errors() {
        let plan = plan_tiling(10, 10, 3, 4).unwrap();
        assert_eq!((plan.tiles_r, plan.tiles_c), (2, 2));
        assert_eq!((plan.out_rows, plan.out_cols), (8, 8));
        assert_eq!(plan.n_x, 6);
        // 9x9 input → 7x7 output, not divisible by 4; no implicit padding.
        let err = plan_tiling(9, 9, 3, 4).unwrap_err();
        assert!(err.to_string().contains("pad the input explicitly"), "{err}");
        assert!(plan_tiling(4, 4, 3, 4).is_err());
    }

    #[test]
    fn tiled_single_tile_matches_single_call() {
        let ts = build_transform_set(&toom_cook_config(3, 4).unwrap()).unwrap();
        let x = Matrix::from_fn(6, 6, |i, j| (i as f64) * 0.25 - (j as f64) * 0.5);
        let h = Matrix::from_fn(3, 3, |i, j| 1.0 - (i as f64) * 0.5 + (j as f64) * 0.25);
        for mode in [NumberMode::Exact, NumberMode::Fp32, NumberMode::Fp64] {
            let tiled = tiled_conv_2d(
                &ts,
                &Tensor::from_channels(vec![h.clone()]).unwrap(),
                &Tensor::from_channels(vec![x.clone()]).unwrap(),
                mode,
            )
            .unwrap();
            let single = winograd_conv_2d(&ts, &h, &x, mode).unwrap();
            assert_eq!(tiled.output, single, "{mode}");
            assert_eq!(tiled.elementwise_mults, (ts.mu * ts.mu) as u64);
        }
    }

    #[test]
    fn tiled_full_image_matches_direct_exactly() {
        let ts = build_transform_set(&toom_cook_config(3, 4).unwrap()).unwrap();
        let x = Matrix::from_fn(10, 10, |i, j| ((i * 10 + j) as f64) * 0.125 - 6.0);
        let h = Matrix::from_fn(3, 3, |i, j| ((i as f64) - (j as f64)) * 0.25);
        let tiled = tiled_conv_2d(
            &ts,
            &Tensor::from_channels(vec![h.clone()]).unwrap(),
            &Tensor::from_channels(vec![x.clone()]).unwrap(),
            NumberMode::Exact,
        )
        .unwrap();
        assert_eq!(tiled.output, direct_conv_2d(&h, &x).unwrap());
        assert_eq!(tiled.elementwise_mults, 4 * (ts.mu * ts.mu) as u64);
    }

    #[test]
    fn tiled_multichannel_matches_channel_summed_direct() {
        let ts = build_transform_set(&toom_cook_config(3, 2).unwrap()).unwrap();
        let mut rng = trial_rng(7, 0);
        let mut rand_mat = |r: usize, c: usize| {
            Matrix::from_fn(r, c, |_, _| rational_to_f64(&rand_rat(&mut rng)))
        };
        let kernels: Vec<Matrix<f64>> = (0..4).map(|_| rand_mat(3, 3)).collect();
        let inputs: Vec<Matrix<f64>> = (0..4).map(|_| rand_mat(8, 8)).collect();
        let tiled = tiled_conv_2d(
            &ts,
            &Tensor::from_channels(kernels.clone()).unwrap(),
            &Tensor::from_channels(inputs.clone()).unwrap(),
            NumberMode::Exact,
        )
        .unwrap();
        let direct = tiled_direct_2d(
            &Tensor::from_channels(kernels).unwrap(),
            &Tensor::from_channels(inputs).unwrap(),
            NumberMode::Exact,
        )
        .unwrap();
        assert_eq!(tiled.output, direct.output);
        assert_eq!(tiled.overflow_count, 0);
    }

    #[test]
    fn tiled_rejects_mismatched_channels() {
        let ts = build_transform_set(&toom_cook_config(3, 2).unwrap()).unwrap();
        let k = Tensor::zeros(2, 3, 3);
        let x = Tensor::zeros(3, 8, 8);
        assert!(tiled_conv_2d(&ts, &k, &x, NumberMode::Exact).is_err());
    }

    #[test]
    fn tiling_transparent_across_output_sizes() {
        // Same 14x14 input, three different tile sizes: exact-mode outputs
        // all equal the direct convolution.
        let x = Matrix::from_fn(14, 14, |i, j| (((i * 14 + j) % 11) as f64) * 0.5 - 2.0);
        let h = Matrix::from_fn(3, 3, |i, j| ((i + 2 * j) as f64) * 0.25 - 1.0);
        let want = direct_conv_2d(&h, &x).unwrap();
        for n_o in [2usize, 4, 6] {
            let ts = build_transform_set(&toom_cook_config(3, n_o).unwrap()).unwrap();
            let got = tiled_conv_2d(
                &ts,
                &Tensor::from_channels(vec![h.clone()]).unwrap(),
                &Tensor::from_channels(vec![x.clone()]).unwrap(),
                NumberMode::Exact,
            )
            .unwrap();
            assert_eq!(got.output, want, "n_o={n_o}");
        }
    }

    #[test]
    fn verify_exact_accepts_and_rejects() {
        let ts = build_transform_set(&toom_cook_config(3, 4).unwrap()).unwrap();
        assert!(verify_exact(&ts, 20, 42).unwrap());
        assert!(matches!(
            verify_exact(&ts, 0, 42),
            Err(Error::InvalidArgument(_))
        ));
        let mut broken = ts.clone();
        let bumped = broken.input_transform.get(0, 0) + rat(1, 1000);
        broken.input_transform.set(0, 0, bumped);
        assert!(!verify_exact(&broken, 20, 42).unwrap());
    }

    #[test]
    fn fp16_overflow_is_counted_in_tiled_conv() {
        let ts = build_transform_set(&toom_cook_config(3, 2).unwrap()).unwrap();
        let k = Tensor::from_channels(vec![Matrix::filled(3, 3, 200.0)]).unwrap();
        let x = Tensor::from_channels(vec![Matrix::filled(4, 4, 200.0)]).unwrap();
        let half = tiled_conv_2d(&ts, &k, &x, NumberMode::Fp16Sim).unwrap();
        assert!(half.overflow_count > 0);
        assert!(half.output.data().iter().any(|v| !v.is_finite()));
        let bf = tiled_conv_2d(&ts, &k, &x, NumberMode::Bf16Sim).unwrap();
        assert_eq!(bf.overflow_count, 0);
        assert!(bf.output.data().iter().all(|v| v.is_finite()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn winograd_exact_is_linear(
            hv in prop::collection::vec(-8i64..=8, 3),
            x1 in prop::collection::vec(-8i64..=8, 6),
            x2 in prop::collection::vec(-8i64..=8, 6),
        ) {
            let ts = build_transform_set(&toom_cook_config(3, 4).unwrap()).unwrap();
            let h: Vec<f64> = hv.iter().map(|&v| v as f64).collect();
            let a: Vec<f64> = x1.iter().map(|&v| v as f64).collect();
            let b: Vec<f64> = x2.iter().map(|&v| v as f64).collect();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
            let ya = winograd_conv_1d(&ts, &h, &a, NumberMode::Exact).unwrap();
            let yb = winograd_conv_1d(&ts, &h, &b, NumberMode::Exact).unwrap();
            let ysum = winograd_conv_1d(&ts, &h, &sum, NumberMode::Exact).unwrap();
            let want: Vec<f64> = ya.iter().zip(&yb).map(|(p, q)| p + q).collect();
            prop_assert_eq!(ysum, want);
        }

        #[test]
        fn tiled_exact_equals_direct_on_random_integers(
            seed in 0u64..1000,
        ) {
            let ts = build_transform_set(&toom_cook_config(3, 2).unwrap()).unwrap();
            let mut rng = trial_rng(seed, 0);
            let h = Matrix::from_fn(3, 3, |_, _| rng.gen_range(-5i64..=5) as f64);
            let x = Matrix::from_fn(8, 8, |_, _| rng.gen_range(-5i64..=5) as f64);
            let tiled = tiled_conv_2d(
                &ts,
                &Tensor::from_channels(vec![h.clone()]).unwrap(),
                &Tensor::from_channels(vec![x.clone()]).unwrap(),
                NumberMode::Exact,
            ).unwrap();
            prop_assert_eq!(tiled.output, direct_conv_2d(&h, &x).unwrap());
        }
    }
}
