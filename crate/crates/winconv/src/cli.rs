//! Command-line front end: `gen`, `check`, `ratio`, `bench`, `conv`.
//!
//! Exit codes are stable for scripting: 0 success, 1 verification or
//! overflow failure, 2 configuration validation/parse failure, 64 usage
//! error. Commands are deterministic given their arguments and files; the
//! only environment input is an optional `SEED` variable overriding the
//! config-file seed (a `--seed` flag still wins over the environment).
//!
//! All numeric inputs are exact rationals ("num/den" strings), never
//! decimals, so root points like −1/4 carry no parsing ambiguity.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bench::{
    run_error_experiment, ExperimentSpec, InputDistribution, DEFAULT_SEED, DEFAULT_TRIALS,
};
use crate::convolve::{flip_tensor, tiled_conv_2d, tiled_direct_2d, verify_exact};
use crate::exact::{parse_rational, Polynomial, Rational};
use crate::io::{
    self, read_tensor_arg, read_transforms_dir, write_matrix_csv, write_reports_csv,
    write_transforms_csv, write_transforms_json,
};
use crate::precision::NumberMode;
use crate::toomcook::PointSet;
use crate::winograd::{
    build_transform_set, format_ratio, multiplication_count, ratio, table1, validate_config,
    AlgorithmConfig, Dims, Modulus,
};
use crate::{Error, Result};

fn default_n_h() -> usize {
    3
}

fn default_sub_point_strings() -> Vec<String> {
    vec!["0".into(), "-1".into(), "inf".into()]
}

/// Algorithm configuration file (TOML or JSON, chosen by extension).
/// Moduli are assembled in a fixed order: linear roots as listed, then
/// quadratics as listed, then the infinity pseudo-point.
#[derive(Clone, Debug, Deserialize)]
pub struct ConfigFile {
    #[serde(default = "default_n_h")]
    pub n_h: usize,
    pub n_o: usize,
    /// Linear root points as "num/den" strings.
    #[serde(default)]
    pub linear: Vec<String>,
    /// Quadratic moduli as constant-first coefficient triples
    /// (["1","0","1"] is a² + 1). Non-monic entries are normalized.
    #[serde(default)]
    pub quadratic: Vec<Vec<String>>,
    #[serde(default)]
    pub infinity: bool,
    /// Sub-solver points shared by every quadratic modulus.
    #[serde(default = "default_sub_point_strings")]
    pub sub_points: Vec<String>,
    pub mode: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn to_algorithm_config(&self) -> Result<AlgorithmConfig> {
        let mut moduli = Vec::new();
        for s in &self.linear {
            moduli.push(Modulus::linear(parse_rational(s)?));
        }
        if !self.quadratic.is_empty() {
            let sub_points = PointSet::parse_all(&self.sub_points)?;
            for triple in &self.quadratic {
                let coeffs: Result<Vec<Rational>> =
                    triple.iter().map(|s| parse_rational(s)).collect();
                let p = Polynomial::new(coeffs?);
                if p.is_zero() {
                    return Err(Error::Parse(
                        "quadratic modulus is the zero polynomial".into(),
                    ));
                }
                let p = if p.is_monic() { p } else { p.make_monic() };
                moduli.push(Modulus::superlinear(p, sub_points.clone()));
            }
        }
        if self.infinity {
            moduli.push(Modulus::Infinity);
        }
        Ok(AlgorithmConfig::new(self.n_h, self.n_o, moduli))
    }

    pub fn parsed_mode(&self) -> Result<Option<NumberMode>> {
        self.mode.as_deref().map(str::parse).transpose()
    }
}

/// Loads a config file, dispatching on extension (.json vs TOML).
pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)?;
    parse_by_extension(path, &text)
}

fn parse_by_extension<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

fn default_dims() -> u8 {
    2
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_mode() -> String {
    "fp32".into()
}

/// Experiment spec file for `bench`: global parameters plus one
/// `[[configs]]` entry per algorithm (id + ConfigFile fields).
#[derive(Debug, Deserialize)]
pub struct ExperimentFile {
    #[serde(default = "default_dims")]
    pub dims: u8,
    #[serde(default = "default_n_h")]
    pub n_h: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: String,
    pub sigma: Option<f64>,
    pub bound: Option<f64>,
    pub configs: Vec<ExperimentConfigEntry>,
}

#[derive(Debug, Deserialize)]
pub struct ExperimentConfigEntry {
    pub id: String,
    #[serde(flatten)]
    pub config: ConfigFile,
}

impl ExperimentFile {
    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let dims = match self.dims {
            1 => Dims::One,
            2 => Dims::Two,
            other => {
                return Err(Error::Parse(format!("dims must be 1 or 2, got {other}")));
            }
        };
        let mode: NumberMode = self.mode.parse()?;
        let mut configs = Vec::with_capacity(self.configs.len());
        for entry in &self.configs {
            configs.push((entry.id.clone(), entry.config.to_algorithm_config()?));
        }
        let distribution = InputDistribution {
            sigma: self.sigma.unwrap_or_else(|| InputDistribution::default().sigma),
            bound: self.bound.unwrap_or_else(|| InputDistribution::default().bound),
        };
        if !(distribution.sigma > 0.0) || !(distribution.bound > 0.0) {
            return Err(Error::Parse("sigma and bound must be positive".into()));
        }
        Ok(ExperimentSpec {
            dims,
            n_h: self.n_h,
            configs,
            trials: self.trials,
            seed: self.seed,
            mode,
            distribution,
        })
    }
}

#[derive(Parser)]
#[command(
    name = "winconv",
    version,
    about = "Generator and verification lab for Winograd-family convolution algorithms"
)]
struct Cli {
    /// Cap the worker thread count (defaults to all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    /// Exact-rational transforms.json (round-trippable).
    Json,
    /// Three float64-lowered CSV files.
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build transform matrices from a config file and write them out.
    Gen {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        format: OutFormat,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Verify a config or saved matrices against the exact oracle.
    Check {
        config: Option<PathBuf>,
        /// Directory written by `gen` (transforms.json or CSVs).
        #[arg(long, value_name = "DIR", conflicts_with = "config")]
        matrices: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print multiplication counts and per-output-point ratios.
    Ratio {
        /// Print the 12-cell ratio table for 3x3 kernels.
        #[arg(long, conflicts_with = "config")]
        table1: bool,
        config: Option<PathBuf>,
    },
    /// Run a seeded error experiment from a spec file.
    Bench {
        spec: PathBuf,
        /// Output directory for reports.csv and manifest.json.
        #[arg(long, default_value = "bench_out")]
        out: PathBuf,
    },
    /// Run a tiled 2D convolution and write the output plane.
    Conv {
        #[arg(long, conflicts_with = "matrices")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        matrices: Option<PathBuf>,
        /// Input tensor: comma-separated per-channel CSVs or one .wgt1 file.
        #[arg(long)]
        input: String,
        /// Kernel tensor, same formats as --input.
        #[arg(long)]
        kernel: String,
        /// exact | fp64 | fp32 | fp16 | bf16 (default from config, else exact).
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value = "output.csv")]
        out: PathBuf,
        /// Run the direct algorithm instead of the Winograd one.
        #[arg(long)]
        direct: bool,
        /// Flip the kernel (signal-processing-style true convolution).
        #[arg(long)]
        flip_kernel: bool,
    },
}

/// Parses argv and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // Ignore the error if a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            report_error(&e);
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Parse(_) | Error::ShapeMismatch(_) => 2,
        Error::InvalidArgument(_) => 64,
        _ => 1,
    }
}

fn report_error(e: &Error) {
    match e {
        Error::Validation(violations) => {
            eprintln!("error: configuration is invalid:");
            for v in violations {
                eprintln!("  - {v}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var("SEED") {
        Ok(s) => s.trim().parse::<u64>().map(Some).map_err(|_| {
            Error::InvalidArgument(format!(
                "SEED environment variable must be a nonnegative integer, got {s:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::InvalidArgument(format!("SEED environment variable: {e}"))),
    }
}

/// Seed precedence: --seed flag, then SEED env, then config file, then 42.
fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = seed_from_env()? {
        return Ok(s);
    }
    Ok(config.unwrap_or(DEFAULT_SEED))
}

fn dispatch(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Gen { config, format, out } => cmd_gen(&config, format, &out),
        Cmd::Check {
            config,
            matrices,
            trials,
            seed,
        } => cmd_check(config.as_deref(), matrices.as_deref(), trials, seed),
        Cmd::Ratio { table1, config } => cmd_ratio(table1, config.as_deref()),
        Cmd::Bench { spec, out } => cmd_bench(&spec, &out),
        Cmd::Conv {
            config,
            matrices,
            input,
            kernel,
            mode,
            out,
            direct,
            flip_kernel,
        } => cmd_conv(
            config.as_deref(),
            matrices.as_deref(),
            &input,
            &kernel,
            mode.as_deref(),
            &out,
            direct,
            flip_kernel,
        ),
    }
}

fn cmd_gen(config: &Path, format: OutFormat, out: &Path) -> Result<i32> {
    let file = load_config_file(config)?;
    let cfg = file.to_algorithm_config()?;
    let ts = build_transform_set(&cfg)?;
    fs::create_dir_all(out)?;
    match format {
        OutFormat::Json => write_transforms_json(&out.join(io::TRANSFORMS_JSON), &ts)?,
        OutFormat::Csv => write_transforms_csv(out, &ts)?,
    }
    println!("mu={} ratio={}", ts.mu, format_ratio(&ratio(&cfg, Dims::Two)));
    Ok(0)
}

fn cmd_check(
    config: Option<&Path>,
    matrices: Option<&Path>,
    trials_flag: Option<usize>,
    seed_flag: Option<u64>,
) -> Result<i32> {
    let (ts, file_trials, file_seed) = match (config, matrices) {
        (Some(path), None) => {
            let file = load_config_file(path)?;
            let cfg = file.to_algorithm_config()?;
            (build_transform_set(&cfg)?, file.trials, file.seed)
        }
        (None, Some(dir)) => (read_transforms_dir(dir)?, None, None),
        _ => {
            return Err(Error::InvalidArgument(
                "provide exactly one of a config file or --matrices".into(),
            ));
        }
    };
    let trials = trials_flag.or(file_trials).unwrap_or(100);
    if trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()));
    }
    let seed = resolve_seed(seed_flag, file_seed)?;
    let ok = verify_exact(&ts, trials, seed)?;
    println!(
        "checked {trials} trials (seed {seed}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(if ok { 0 } else { 1 })
}

fn cmd_ratio(table1_flag: bool, config: Option<&Path>) -> Result<i32> {
    match (table1_flag, config) {
        (true, None) => {
            println!("n_o linear quadratic mu ratio2d");
            for row in table1() {
                println!(
                    "{} {} {} {} {}",
                    row.n_o,
                    row.linear,
                    row.quadratic,
                    row.mu,
                    format_ratio(&row.ratio_2d)
                );
            }
            Ok(0)
        }
        (false, Some(path)) => {
            let cfg = load_config_file(path)?.to_algorithm_config()?;
            let violations = validate_config(&cfg);
            if !violations.is_empty() {
                return Err(Error::Validation(violations));
            }
            println!(
                "mu={} ratio_1d={} ratio_2d={}",
                multiplication_count(&cfg),
                format_ratio(&ratio(&cfg, Dims::One)),
                format_ratio(&ratio(&cfg, Dims::Two))
            );
            Ok(0)
        }
        _ => Err(Error::InvalidArgument(
            "provide exactly one of --table1 or a config file".into(),
        )),
    }
}

fn cmd_bench(spec_path: &Path, out: &Path) -> Result<i32> {
    let text = fs::read_to_string(spec_path)?;
    let file: ExperimentFile = parse_by_extension(spec_path, &text)?;
    let mut spec = file.to_spec()?;
    if let Some(s) = seed_from_env()? {
        spec.seed = s;
    }
    let start = Instant::now();
    let reports = run_error_experiment(&spec)?;
    fs::create_dir_all(out)?;
    write_reports_csv(&out.join("reports.csv"), &reports)?;
    let echo = serde_json::json!({
        "spec_file": spec_path.display().to_string(),
        "spec_text": text,
        "dims": match spec.dims { Dims::One => 1, Dims::Two => 2 },
        "n_h": spec.n_h,
        "trials": spec.trials,
        "seed": spec.seed,
        "mode": spec.mode.to_string(),
        "sigma": spec.distribution.sigma,
        "bound": spec.distribution.bound,
        "config_ids": spec.configs.iter().map(|(id, _)| id.clone()).collect::<Vec<_>>(),
    });
    io::write_manifest(&out.join("manifest.json"), echo, start.elapsed().as_secs_f64())?;
    for r in &reports {
        println!(
            "{} ratio={} mean_err={} max_err={} overflow={}",
            r.config_id, r.ratio, r.mean_err, r.max_err, r.overflow_count
        );
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_conv(
    config: Option<&Path>,
    matrices: Option<&Path>,
    input: &str,
    kernel: &str,
    mode_flag: Option<&str>,
    out: &Path,
    direct: bool,
    flip_kernel: bool,
) -> Result<i32> {
    let (ts, file_mode) = match (config, matrices) {
        (Some(path), None) => {
            let file = load_config_file(path)?;
            let cfg = file.to_algorithm_config()?;
            (build_transform_set(&cfg)?, file.parsed_mode()?)
        }
        (None, Some(dir)) => (read_transforms_dir(dir)?, None),
        _ => {
            return Err(Error::InvalidArgument(
                "provide exactly one of --config or --matrices".into(),
            ));
        }
    };
    let mode = match mode_flag {
        Some(s) => s.parse()?,
        None => file_mode.unwrap_or(NumberMode::Exact),
    };
    let mut kernel_t = read_tensor_arg(kernel)?;
    if flip_kernel {
        kernel_t = flip_tensor(&kernel_t);
    }
    let input_t = read_tensor_arg(input)?;
    let result = if direct {
        tiled_direct_2d(&kernel_t, &input_t, mode)?
    } else {
        tiled_conv_2d(&ts, &kernel_t, &input_t, mode)?
    };
    write_matrix_csv(out, &result.output)?;
    println!("elementwise_mults={}", result.elementwise_mults);
    if result.overflow_count > 0 {
        eprintln!("overflow_count={}", result.overflow_count);
        return Ok(1);
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn config_toml_parses_in_modulus_order() {
        let text = r#"
            n_o = 2
            linear = ["0"]
            quadratic = [["1", "0", "1"]]
            infinity = true
        "#;
        let file: ConfigFile = toml::from_str(text).unwrap();
        assert_eq!(file.n_h, 3);
        let cfg = file.to_algorithm_config().unwrap();
        assert_eq!(cfg.moduli.len(), 3);
        assert!(matches!(cfg.moduli[0], Modulus::Linear { .. }));
        assert!(matches!(cfg.moduli[1], Modulus::Superlinear { .. }));
        assert!(matches!(cfg.moduli[2], Modulus::Infinity));
        assert!(validate_config(&cfg).is_empty());
        assert_eq!(multiplication_count(&cfg), 5);
    }

    #[test]
    fn config_json_with_rational_roots() {
        let text = r#"{
            "n_h": 3,
            "n_o": 4,
            "linear": ["0", "-1", "1", "-1/2", "2"],
            "infinity": true,
            "seed": 7
        }"#;
        let file: ConfigFile = serde_json::from_str(text).unwrap();
        let cfg = file.to_algorithm_config().unwrap();
        assert!(validate_config(&cfg).is_empty());
        assert_eq!(cfg.moduli[3], Modulus::linear(rat(-1, 2)));
        assert_eq!(file.seed, Some(7));
    }

    #[test]
    fn non_monic_quadratic_is_normalized() {
        let text = r#"
            n_o = 2
            linear = ["0"]
            quadratic = [["2", "0", "2"]]
            infinity = true
        "#;
        let file: ConfigFile = toml::from_str(text).unwrap();
        let cfg = file.to_algorithm_config().unwrap();
        let Modulus::Superlinear { poly, .. } = &cfg.moduli[1] else {
            panic!("expected quadratic");
        };
        assert!(poly.is_monic());
        assert!(validate_config(&cfg).is_empty());
    }

    #[test]
    fn experiment_file_defaults_and_validation() {
        let text = r#"
            mode = "fp32"
            [[configs]]
            id = "tc2"
            n_o = 2
            linear = ["0", "-1", "1"]
            infinity = true
        "#;
        let file: ExperimentFile = toml::from_str(text).unwrap();
        assert_eq!(file.trials, DEFAULT_TRIALS);
        assert_eq!(file.seed, DEFAULT_SEED);
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.dims, Dims::Two);
        assert_eq!(spec.configs.len(), 1);
        assert_eq!(spec.distribution.bound, 1.0);
        let bad: ExperimentFile = toml::from_str(
            r#"
            dims = 3
            [[configs]]
            id = "x"
            n_o = 2
        "#,
        )
        .unwrap();
        assert!(bad.to_spec().is_err());
    }

    #[test]
    fn seed_resolution_precedence() {
        // Flag beats everything; config beats the default. (The SEED env
        // path is covered by the binary-level tests to avoid mutating this
        // process's environment.)
        assert_eq!(resolve_seed(Some(9), Some(5)).unwrap(), 9);
        assert_eq!(resolve_seed(None, Some(5)).unwrap(), 5);
        assert_eq!(resolve_seed(None, None).unwrap(), DEFAULT_SEED);
    }
}
