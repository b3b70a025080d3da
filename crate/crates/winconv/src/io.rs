//! File formats: transform sets (exact JSON, float64 CSV), tensors (CSV,
//! one channel per file, or the WGT1 binary container), error-report CSV,
//! and the benchmark manifest.
//!
//! The JSON transform document stores every matrix entry as an exact
//! "num/den" string, so a generate → load round trip reproduces the
//! algorithm bit for bit. The CSV export lowers entries to float64 and is
//! for consumption by other tools; loading transforms from CSV therefore
//! loses exactness (and the modulus provenance), which is fine for running
//! convolutions but not for regenerating matrices.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num::traits::Zero;
use serde::{Deserialize, Serialize};

use crate::convolve::Tensor;
use crate::exact::{format_rational, parse_rational, rational_to_f64, Polynomial, Rational};
use crate::matrix::Matrix;
use crate::precision::ErrorReport;
use crate::toomcook::{PointSet, RootPoint};
use crate::winograd::{Modulus, TransformSet};
use crate::{Error, Result};

pub const TRANSFORMS_JSON: &str = "transforms.json";
pub const KERNEL_CSV: &str = "kernel_transform.csv";
pub const INPUT_CSV: &str = "input_transform.csv";
pub const OUTPUT_CSV: &str = "output_transform.csv";

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ModulusDoc {
    Linear {
        root: String,
    },
    Superlinear {
        coeffs: Vec<String>,
        sub_points: Vec<String>,
    },
    Infinity,
}

/// On-disk form of a transform set. G is the kernel transform (μ×n_h),
/// B the input transform (μ×n_x), A the output transform (n_o×μ) — all in
/// as-applied orientation.
#[derive(Serialize, Deserialize)]
struct TransformsDoc {
    n_h: usize,
    n_o: usize,
    mu: usize,
    moduli: Vec<ModulusDoc>,
    #[serde(rename = "G")]
    g: Vec<Vec<String>>,
    #[serde(rename = "B")]
    b: Vec<Vec<String>>,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
}

fn matrix_to_strings(m: &Matrix<Rational>) -> Vec<Vec<String>> {
    m.iter_rows()
        .map(|row| row.iter().map(format_rational).collect())
        .collect()
}

fn matrix_from_strings(rows: &[Vec<String>]) -> Result<Matrix<Rational>> {
    let parsed: Result<Vec<Vec<Rational>>> = rows
        .iter()
        .map(|row| row.iter().map(|s| parse_rational(s)).collect())
        .collect();
    Matrix::from_rows(parsed?)
}

fn modulus_to_doc(m: &Modulus) -> ModulusDoc {
    match m {
        Modulus::Linear { root } => ModulusDoc::Linear {
            root: format_rational(root),
        },
        Modulus::Superlinear { poly, sub_points } => ModulusDoc::Superlinear {
            coeffs: poly.coeffs().iter().map(format_rational).collect(),
            sub_points: sub_points.points().iter().map(ToString::to_string).collect(),
        },
        Modulus::Infinity => ModulusDoc::Infinity,
    }
}

fn modulus_from_doc(doc: &ModulusDoc) -> Result<Modulus> {
    Ok(match doc {
        ModulusDoc::Linear { root } => Modulus::linear(parse_rational(root)?),
        ModulusDoc::Superlinear { coeffs, sub_points } => {
            let coeffs: Result<Vec<Rational>> =
                coeffs.iter().map(|s| parse_rational(s)).collect();
            let points: Result<Vec<RootPoint>> =
                sub_points.iter().map(|s| RootPoint::parse(s)).collect();
            Modulus::superlinear(Polynomial::new(coeffs?), PointSet::new(points?)?)
        }
        ModulusDoc::Infinity => Modulus::Infinity,
    })
}

/// Serializes a transform set to the exact-rational JSON document.
pub fn write_transforms_json(path: &Path, ts: &TransformSet) -> Result<()> {
    let doc = TransformsDoc {
        n_h: ts.n_h,
        n_o: ts.n_o,
        mu: ts.mu,
        moduli: ts.moduli.iter().map(modulus_to_doc).collect(),
        g: matrix_to_strings(&ts.kernel_transform),
        b: matrix_to_strings(&ts.input_transform),
        a: matrix_to_strings(&ts.output_transform),
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Parse(format!("serializing transforms: {e}")))?;
    fs::write(path, text)?;
    Ok(())
}

/// Loads a transform set from the JSON document, checking dimensional
/// consistency (but not exactness: use verify_exact for that).
pub fn read_transforms_json(path: &Path) -> Result<TransformSet> {
    let text = fs::read_to_string(path)?;
    let doc: TransformsDoc = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let moduli: Result<Vec<Modulus>> = doc.moduli.iter().map(modulus_from_doc).collect();
    let ts = TransformSet {
        kernel_transform: matrix_from_strings(&doc.g)?,
        input_transform: matrix_from_strings(&doc.b)?,
        output_transform: matrix_from_strings(&doc.a)?,
        mu: doc.mu,
        n_h: doc.n_h,
        n_o: doc.n_o,
        moduli: moduli?,
    };
    check_transform_shapes(&ts, path)?;
    Ok(ts)
}

fn check_transform_shapes(ts: &TransformSet, path: &Path) -> Result<()> {
    let n_x = ts.n_h + ts.n_o - 1;
    if ts.kernel_transform.rows() != ts.mu
        || ts.kernel_transform.cols() != ts.n_h
        || ts.input_transform.rows() != ts.mu
        || ts.input_transform.cols() != n_x
        || ts.output_transform.rows() != ts.n_o
        || ts.output_transform.cols() != ts.mu
    {
        return Err(Error::Parse(format!(
            "{}: matrix shapes do not match n_h={} n_o={} mu={}",
            path.display(),
            ts.n_h,
            ts.n_o,
            ts.mu
        )));
    }
    Ok(())
}

fn write_f64_csv(path: &Path, m: &Matrix<f64>) -> Result<()> {
    let mut out = String::new();
    for row in m.iter_rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn read_f64_csv(path: &Path) -> Result<Matrix<f64>> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|e| {
                    Error::Parse(format!(
                        "{}:{}: {e} in {cell:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{}: empty matrix", path.display())));
    }
    Matrix::from_rows(rows)
}

/// Writes the float64-lowered CSV export: one file per transform matrix.
pub fn write_transforms_csv(dir: &Path, ts: &TransformSet) -> Result<()> {
    write_f64_csv(
        &dir.join(KERNEL_CSV),
        &ts.kernel_transform.map(rational_to_f64),
    )?;
    write_f64_csv(
        &dir.join(INPUT_CSV),
        &ts.input_transform.map(rational_to_f64),
    )?;
    write_f64_csv(
        &dir.join(OUTPUT_CSV),
        &ts.output_transform.map(rational_to_f64),
    )
}

/// Loads a transform set from a directory: transforms.json when present,
/// otherwise the three CSV files (lossy float64, no modulus provenance).
pub fn read_transforms_dir(dir: &Path) -> Result<TransformSet> {
    let json = dir.join(TRANSFORMS_JSON);
    if json.is_file() {
        return read_transforms_json(&json);
    }
    let g = read_f64_csv(&dir.join(KERNEL_CSV))?;
    let b = read_f64_csv(&dir.join(INPUT_CSV))?;
    let a = read_f64_csv(&dir.join(OUTPUT_CSV))?;
    let to_exact = |m: &Matrix<f64>, file: &str| -> Result<Matrix<Rational>> {
        let mut out = Matrix::filled(m.rows(), m.cols(), Rational::zero());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = *m.get(i, j);
                let r = crate::exact::f64_to_rational(v)
                    .ok_or_else(|| Error::Parse(format!("{file}: non-finite value {v}")))?;
                out.set(i, j, r);
            }
        }
        Ok(out)
    };
    let mu = g.rows();
    let n_h = g.cols();
    let n_o = a.rows();
    let ts = TransformSet {
        kernel_transform: to_exact(&g, KERNEL_CSV)?,
        input_transform: to_exact(&b, INPUT_CSV)?,
        output_transform: to_exact(&a, OUTPUT_CSV)?,
        mu,
        n_h,
        n_o,
        moduli: Vec::new(),
    };
    check_transform_shapes(&ts, dir)?;
    Ok(ts)
}

/// Writes one tensor channel as CSV.
pub fn write_matrix_csv(path: &Path, m: &Matrix<f64>) -> Result<()> {
    write_f64_csv(path, m)
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix<f64>> {
    read_f64_csv(path)
}

/// Reads a tensor from a comma-separated list of per-channel CSV paths, or
/// from a single `.wgt1` binary file.
pub fn read_tensor_arg(arg: &str) -> Result<Tensor> {
    if arg.ends_with(".wgt1") {
        return read_tensor_wgt1(Path::new(arg));
    }
    let paths: Vec<PathBuf> = arg.split(',').map(PathBuf::from).collect();
    let channels: Result<Vec<Matrix<f64>>> =
        paths.iter().map(|p| read_f64_csv(p)).collect();
    Tensor::from_channels(channels?)
}

const WGT1_MAGIC: &[u8; 4] = b"WGT1";

/// Binary tensor container: magic "WGT1", three little-endian u32 dims
/// (channels, rows, cols), then row-major f64 little-endian payload.
pub fn write_tensor_wgt1(path: &Path, t: &Tensor) -> Result<()> {
    let mut buf = Vec::with_capacity(16 + t.data().len() * 8);
    buf.extend_from_slice(WGT1_MAGIC);
    buf.extend_from_slice(&(t.channels() as u32).to_le_bytes());
    buf.extend_from_slice(&(t.rows() as u32).to_le_bytes());
    buf.extend_from_slice(&(t.cols() as u32).to_le_bytes());
    for v in t.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_tensor_wgt1(path: &Path) -> Result<Tensor> {
    let buf = fs::read(path)?;
    if buf.len() < 16 || &buf[0..4] != WGT1_MAGIC {
        return Err(Error::Parse(format!(
            "{}: not a WGT1 tensor file",
            path.display()
        )));
    }
    let dim = |at: usize| u32::from_le_bytes(buf[at..at + 4].try_into().unwrap()) as usize;
    let (channels, rows, cols) = (dim(4), dim(8), dim(12));
    let expected = 16 + channels * rows * cols * 8;
    if buf.len() != expected {
        return Err(Error::Parse(format!(
            "{}: expected {expected} bytes for {channels}x{rows}x{cols}, got {}",
            path.display(),
            buf.len()
        )));
    }
    let data: Vec<f64> = buf[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Tensor::new(channels, rows, cols, data)
}

pub const REPORTS_HEADER: &str =
    "config_id,n_o,n_quadratic,ratio,mode,trials,mean_err,max_err,overflow_count,seed";

/// Error reports as CSV with the pinned column order.
pub fn write_reports_csv(path: &Path, reports: &[ErrorReport]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "{REPORTS_HEADER}")?;
    for r in reports {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{}",
            r.config_id,
            r.n_o,
            r.n_quadratic,
            r.ratio,
            r.mode,
            r.trials,
            r.mean_err,
            r.max_err,
            r.overflow_count,
            r.seed
        )?;
    }
    Ok(())
}

/// Benchmark manifest: a spec echo plus version and wall-clock, enough to
/// rerun the experiment byte for byte.
pub fn write_manifest(path: &Path, spec_echo: serde_json::Value, wall_seconds: f64) -> Result<()> {
    let manifest = serde_json::json!({
        "version": format!("winconv-{}", env!("CARGO_PKG_VERSION")),
        "spec": spec_echo,
        "wall_clock_seconds": wall_seconds,
    });
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Parse(format!("serializing manifest: {e}")))?;
    fs::write(path, text)?;
    Ok(())
}
