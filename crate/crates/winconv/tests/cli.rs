//! End-to-end tests of the winconv binary: exit codes, stdout contracts,
//! file outputs, and the SEED environment variable.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn winconv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_winconv"))
        .args(args)
        .current_dir(dir)
        .env_remove("SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const F23_QUAD: &str = r#"
n_o = 2
linear = ["0"]
quadratic = [["1", "0", "1"]]
infinity = true
"#;

fn write_config(dir: &Path) -> String {
    let path = dir.join("f23q.toml");
    fs::write(&path, F23_QUAD).unwrap();
    path.to_string_lossy().into_owned()
}

fn write_tensors(dir: &Path, fill: f64) -> (String, String) {
    let kernel = dir.join("kernel.csv");
    let input = dir.join("input.csv");
    let krows: Vec<String> = (0..3)
        .map(|i| (0..3).map(|j| format!("{}", fill + (i * 3 + j) as f64)).collect::<Vec<_>>().join(","))
        .collect();
    let xrows: Vec<String> = (0..4)
        .map(|i| (0..4).map(|j| format!("{}", fill + (i + j) as f64)).collect::<Vec<_>>().join(","))
        .collect();
    fs::write(&kernel, krows.join("\n")).unwrap();
    fs::write(&input, xrows.join("\n")).unwrap();
    (
        kernel.to_string_lossy().into_owned(),
        input.to_string_lossy().into_owned(),
    )
}

#[test]
fn gen_prints_mu_and_ratio_and_writes_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let out = winconv(tmp.path(), &["gen", &cfg, "--out", "gen_out"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "mu=5 ratio=6.25");
    assert!(tmp.path().join("gen_out/transforms.json").is_file());
}

#[test]
fn gen_csv_format_writes_three_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let out = winconv(tmp.path(), &["gen", &cfg, "--format", "csv", "--out", "m"]);
    assert!(out.status.success());
    for f in [
        "kernel_transform.csv",
        "input_transform.csv",
        "output_transform.csv",
    ] {
        assert!(tmp.path().join("m").join(f).is_file(), "{f} missing");
    }
    // And the CSVs load back and verify against the oracle.
    let check = winconv(tmp.path(), &["check", "--matrices", "m", "--trials", "20"]);
    assert!(check.status.success(), "{}", stderr(&check));
    assert!(stdout(&check).contains("PASS"));
}

#[test]
fn invalid_config_exits_2_with_violation_list() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("dup.toml");
    fs::write(
        &path,
        "n_o = 2\nlinear = [\"1\", \"1\", \"0\"]\ninfinity = true\n",
    )
    .unwrap();
    let out = winconv(tmp.path(), &["gen", "dup.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("duplicate root point"), "stderr: {err}");
}

#[test]
fn check_rejects_zero_trials_as_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let out = winconv(tmp.path(), &["check", &cfg, "--trials", "0"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn check_passes_and_reports_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let out = winconv(tmp.path(), &["check", &cfg, "--trials", "10", "--seed", "9"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "checked 10 trials (seed 9): PASS");
}

#[test]
fn tampered_matrices_fail_check_with_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    assert!(winconv(tmp.path(), &["gen", &cfg, "--format", "csv", "--out", "m"])
        .status
        .success());
    let kt = tmp.path().join("m/kernel_transform.csv");
    let text = fs::read_to_string(&kt).unwrap();
    fs::write(&kt, text.replacen("1", "1.5", 1)).unwrap();
    let out = winconv(tmp.path(), &["check", "--matrices", "m", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn conv_from_config_and_saved_matrices_agree_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let (kernel, input) = write_tensors(tmp.path(), 0.25);
    assert!(winconv(tmp.path(), &["gen", &cfg, "--out", "m"]).status.success());

    let a = winconv(
        tmp.path(),
        &["conv", "--config", &cfg, "--kernel", &kernel, "--input", &input, "--out", "a.csv"],
    );
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(stdout(&a).contains("elementwise_mults=25"));
    let b = winconv(
        tmp.path(),
        &["conv", "--matrices", "m", "--kernel", &kernel, "--input", &input, "--out", "b.csv"],
    );
    assert!(b.status.success(), "{}", stderr(&b));
    assert_eq!(
        fs::read(tmp.path().join("a.csv")).unwrap(),
        fs::read(tmp.path().join("b.csv")).unwrap()
    );
}

#[test]
fn conv_direct_agrees_with_winograd_in_exact_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let (kernel, input) = write_tensors(tmp.path(), -1.5);
    let w = winconv(
        tmp.path(),
        &["conv", "--config", &cfg, "--kernel", &kernel, "--input", &input, "--out", "w.csv"],
    );
    let d = winconv(
        tmp.path(),
        &["conv", "--config", &cfg, "--kernel", &kernel, "--input", &input, "--out", "d.csv", "--direct"],
    );
    assert!(w.status.success() && d.status.success());
    assert!(stdout(&d).contains("elementwise_mults=36")); // 2x2 outputs x 9 taps
    assert_eq!(
        fs::read(tmp.path().join("w.csv")).unwrap(),
        fs::read(tmp.path().join("d.csv")).unwrap()
    );
}

#[test]
fn conv_fp16_overflow_reports_on_stderr_and_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let (kernel, input) = write_tensors(tmp.path(), 200.0);
    let out = winconv(
        tmp.path(),
        &["conv", "--config", &cfg, "--kernel", &kernel, "--input", &input, "--mode", "fp16"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("elementwise_mults="));
    assert!(stderr(&out).contains("overflow_count="), "stderr: {}", stderr(&out));

    let ok = winconv(
        tmp.path(),
        &["conv", "--config", &cfg, "--kernel", &kernel, "--input", &input, "--mode", "bf16"],
    );
    assert!(ok.status.success());
    assert!(!stderr(&ok).contains("overflow_count="));
}

#[test]
fn seed_env_is_used_and_flag_overrides_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let from_env = Command::new(env!("CARGO_BIN_EXE_winconv"))
        .args(["check", &cfg, "--trials", "5"])
        .current_dir(tmp.path())
        .env("SEED", "7")
        .output()
        .unwrap();
    assert!(stdout(&from_env).contains("(seed 7)"));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_winconv"))
        .args(["check", &cfg, "--trials", "5", "--seed", "11"])
        .current_dir(tmp.path())
        .env("SEED", "7")
        .output()
        .unwrap();
    assert!(stdout(&flag_wins).contains("(seed 11)"));
    let invalid = Command::new(env!("CARGO_BIN_EXE_winconv"))
        .args(["check", &cfg, "--trials", "5"])
        .current_dir(tmp.path())
        .env("SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(invalid.status.code(), Some(64));
}

#[test]
fn bench_writes_reports_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("exp.toml");
    fs::write(
        &spec,
        r#"
trials = 20
mode = "fp32"

[[configs]]
id = "tc2"
n_o = 2
linear = ["0", "-1", "1"]
infinity = true

[[configs]]
id = "q1"
n_o = 2
linear = ["0"]
quadratic = [["1", "0", "1"]]
infinity = true
"#,
    )
    .unwrap();
    let out = winconv(tmp.path(), &["bench", "exp.toml", "--out", "results"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("tc2") && text.contains("q1"), "{text}");
    let reports = fs::read_to_string(tmp.path().join("results/reports.csv")).unwrap();
    assert!(reports.starts_with(
        "config_id,n_o,n_quadratic,ratio,mode,trials,mean_err,max_err,overflow_count,seed"
    ));
    assert_eq!(reports.trim_end().lines().count(), 3);
    let manifest = fs::read_to_string(tmp.path().join("results/manifest.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(doc["spec"]["seed"], 42);
    assert!(doc["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn usage_errors_exit_64_and_help_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    let bogus = winconv(tmp.path(), &["frobnicate"]);
    assert_eq!(bogus.status.code(), Some(64));
    let help = winconv(tmp.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let both = winconv(tmp.path(), &["ratio"]);
    assert_eq!(both.status.code(), Some(64)); // neither --table1 nor config
}

#[test]
fn gen_all_linear_f23() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("tc.toml");
    fs::write(&path, "n_o = 2\nlinear = [\"0\", \"-1\", \"1\"]\ninfinity = true\n").unwrap();
    let out = winconv(tmp.path(), &["gen", "tc.toml", "--out", "m"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "mu=4 ratio=4");
}

#[test]
fn conv_impulse_kernel_returns_input_crop() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let kernel = tmp.path().join("impulse.csv");
    fs::write(&kernel, "1,0,0\n0,0,0\n0,0,0\n").unwrap();
    let (_, input) = write_tensors(tmp.path(), 0.5);
    let out = winconv(
        tmp.path(),
        &[
            "conv",
            "--config",
            &cfg,
            "--kernel",
            &kernel.to_string_lossy(),
            "--input",
            &input,
            "--out",
            "y.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let y = fs::read_to_string(tmp.path().join("y.csv")).unwrap();
    // Correlation with a (0,0) impulse reproduces the top-left crop of the
    // 4x4 input written by write_tensors: x[i][j] = 0.5 + i + j.
    assert_eq!(y, "0.5,1.5\n1.5,2.5\n");
}

#[test]
fn ratio_reports_config_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let out = winconv(tmp.path(), &["ratio", &cfg]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "mu=5 ratio_1d=2.50 ratio_2d=6.25");
}
