//! Paired fp32 accuracy experiment: a 6x6-output algorithm that spends part
//! of its budget on the quadratic a^2+1 versus the all-linear 4x4-output
//! Toom-Cook algorithm at the same 2.25 multiplication ratio. Both see the
//! same random kernels and inputs trial for trial (paired sampling), so the
//! per-trial error difference isolates the algorithm choice.
//!
//! Run with: cargo run --release --example error_experiment

use winconv::bench::{pareto_table, per_trial_errors, run_error_experiment, ExperimentSpec};
use winconv::exact::{rat, Polynomial};
use winconv::winograd::{build_transform_set, one_quadratic_config, toom_cook_config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let quad = Polynomial::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]);
    let configs = vec![
        ("w6_q1".to_string(), one_quadratic_config(3, 6, quad)?),
        ("tc4".to_string(), toom_cook_config(3, 4)?),
        ("tc2".to_string(), toom_cook_config(3, 2)?),
    ];
    let mut spec = ExperimentSpec::new(configs);
    spec.trials = 1000;

    let reports = run_error_experiment(&spec)?;
    println!(
        "{:<8} {:>6} {:>12} {:>12} {:>9}",
        "config", "ratio", "mean_err", "max_err", "overflow"
    );
    for r in &reports {
        println!(
            "{:<8} {:>6.2} {:>12.3e} {:>12.3e} {:>9}",
            r.config_id, r.ratio, r.mean_err, r.max_err, r.overflow_count
        );
    }

    // Paired comparison of the two ratio-2.25 algorithms: same trial, same
    // kernel, shared input prefix.
    let ts_w = build_transform_set(&spec.configs[0].1)?;
    let ts_tc = build_transform_set(&spec.configs[1].1)?;
    let e_w = per_trial_errors(&spec, &ts_w)?;
    let e_tc = per_trial_errors(&spec, &ts_tc)?;
    let wins = e_w.iter().zip(&e_tc).filter(|(a, b)| a < b).count();
    println!(
        "\npaired trials where w6_q1 beats tc4: {wins}/{} ({:.1}%)",
        spec.trials,
        100.0 * wins as f64 / spec.trials as f64
    );

    println!("\nratio/error frontier:");
    for row in pareto_table(&reports)? {
        println!(
            "  {:<8} ratio={:<5.2} mean_err={:.3e}{}",
            row.config_id,
            row.ratio,
            row.mean_err,
            if row.dominated { "  (dominated)" } else { "" }
        );
    }
    Ok(())
}
