//! End-to-end checks of the `padisno` binary: exit codes, file outputs and
//! reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use padisno_cli::config::{ExperimentConfig, ProblemKind, VariantKind};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_padisno"))
}

fn write_config(dir: &Path, config: &ExperimentConfig) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, config.to_json()).unwrap();
    path
}

fn toy2d_config(output_dir: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemKind::Toy2d,
        variant: VariantKind::CPadisno,
        alpha: 0.0,
        beta: 0.0,
        step_override: None,
        allow_unsafe_step: false,
        max_iters: 50_000,
        tol: 1e-12,
        seed: 1,
        input_image: None,
        output_dir,
    }
}

fn run_ok(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn solve_toy2d_converges_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = toy2d_config(dir.path().join("out"));
    let config_path = write_config(dir.path(), &config);

    let output = binary()
        .args(["solve", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    run_ok(&output);

    let csv = std::fs::read_to_string(config.output_dir.join("trajectory.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    // header: n,x0,x1,fg_value,displacement,delta_n,lyapunov
    let final_fg: f64 = fields[3].parse().unwrap();
    assert!(final_fg <= 1e-20, "final objective {final_fg}");
    assert!(csv.lines().next().unwrap().starts_with("n,x0,x1,fg_value"));
}

#[test]
fn solve_rejects_step_above_bound_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = toy2d_config(dir.path().join("out"));
    config.step_override = Some(0.5); // c-PADISNO bound is 1/7 here
    let config_path = write_config(dir.path(), &config);

    let output = binary()
        .args(["solve", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&output.stderr).contains("allow_unsafe_step"));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, "{ not json").unwrap();
    let output = binary()
        .args(["solve", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    // unknown keys are also a usage error
    std::fs::write(
        &config_path,
        toy2d_config(dir.path().join("out"))
            .to_json()
            .replace("\"seed\"", "\"zeed\""),
    )
    .unwrap();
    let output = binary()
        .args(["solve", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn solve_reaching_iteration_budget_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = toy2d_config(dir.path().join("out"));
    config.max_iters = 3;
    let config_path = write_config(dir.path(), &config);
    let output = binary()
        .args(["solve", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn solve_output_is_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let config = toy2d_config(dir.path().join("out"));
    let config_path = write_config(dir.path(), &config);
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let output = binary()
            .args(["solve", "--config"])
            .arg(&config_path)
            .output()
            .unwrap();
        run_ok(&output);
        bytes.push(std::fs::read(config.output_dir.join("trajectory.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn fig1_writes_the_full_grid_plus_reference_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1");
    let output = binary()
        .args(["fig1", "--output-dir"])
        .arg(&out)
        .output()
        .unwrap();
    run_ok(&output);

    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().collect();
    assert_eq!(rows.len(), 1 + 78 + 1, "header + grid + FISTA reference");
    assert_eq!(
        rows[0],
        "alpha,beta,iters_to_tol,final_error,stayed_in_D,descent_violations"
    );
    // the reference row comes last and also converges on this problem
    let reference: Vec<&str> = rows.last().unwrap().split(',').collect();
    assert_eq!(reference[0], "+1.00");
    assert_eq!(reference[1], "+1.00");
    assert_ne!(reference[2], "-1");
    assert_eq!(reference[4], "true");

    // one CSV per cell, named by its parameters
    let cells = std::fs::read_dir(&out)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("cell_")
        })
        .count();
    assert_eq!(cells, 79);

    // at the same |beta| (hence the same step size), the negative-beta
    // cell converges in fewer iterations than its positive mirror
    let iters = |alpha: &str, beta: &str| -> i64 {
        rows.iter()
            .find(|r| r.starts_with(&format!("{alpha},{beta},")))
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap()
    };
    for (alpha, beta_neg, beta_pos) in [
        ("+0.00", "-0.25", "+0.25"),
        ("-0.50", "-2.00", "+2.00"),
        ("+0.50", "-1.00", "+1.00"),
    ] {
        assert!(
            iters(alpha, beta_neg) < iters(alpha, beta_pos),
            "alpha={alpha}: beta {beta_neg} did not beat {beta_pos}"
        );
    }
}

#[test]
fn restore_writes_isnr_and_images_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        problem: ProblemKind::Restore,
        variant: VariantKind::Padisno,
        alpha: -0.4,
        beta: -2.5,
        step_override: None,
        allow_unsafe_step: false,
        max_iters: 20,
        tol: 0.0,
        seed: 9,
        input_image: None,
        output_dir: dir.path().join("restore"),
    };
    let config_path = write_config(dir.path(), &config);

    let mut outputs = Vec::new();
    for _ in 0..2 {
        let output = binary()
            .args(["restore", "--config"])
            .arg(&config_path)
            .output()
            .unwrap();
        run_ok(&output);
        outputs.push((
            std::fs::read(config.output_dir.join("isnr.csv")).unwrap(),
            std::fs::read(config.output_dir.join("restored.pgm")).unwrap(),
            std::fs::read(config.output_dir.join("observed.pgm")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);

    let isnr = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert_eq!(isnr.lines().count(), 1 + 21, "header + iterations 0..=20");
    assert!(isnr.lines().nth(1).unwrap().starts_with("0,0."));

    // a different seed changes the observation
    let output = binary()
        .args(["restore", "--config"])
        .arg(&config_path)
        .args(["--seed", "10"])
        .output()
        .unwrap();
    run_ok(&output);
    let reseeded = std::fs::read(config.output_dir.join("observed.pgm")).unwrap();
    assert_ne!(reseeded, outputs[0].2);
}

#[test]
fn restore_requires_dimensions_divisible_by_16() {
    let dir = tempfile::tempdir().unwrap();
    // 20x20 PGM: valid file, invalid for 4 dyadic levels
    let pgm_path = dir.path().join("input.pgm");
    let mut payload = b"P5\n20 20\n255\n".to_vec();
    payload.extend(std::iter::repeat(128u8).take(400));
    std::fs::write(&pgm_path, payload).unwrap();

    let config = ExperimentConfig {
        problem: ProblemKind::Restore,
        variant: VariantKind::Padisno,
        alpha: 0.0,
        beta: 0.0,
        step_override: None,
        allow_unsafe_step: false,
        max_iters: 5,
        tol: 0.0,
        seed: 1,
        input_image: Some(pgm_path),
        output_dir: dir.path().join("restore"),
    };
    let config_path = write_config(dir.path(), &config);
    let output = binary()
        .args(["restore", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn rates_classifies_synthetic_csvs() {
    let dir = tempfile::tempdir().unwrap();

    let write_csv = |name: &str, values: &[f64]| -> PathBuf {
        let mut text = String::from("n,fg_value\n");
        for (n, v) in values.iter().enumerate() {
            text.push_str(&format!("{n},{v:e}\n"));
        }
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    };

    // sublinear: fg = n^-2 against target 0
    let values: Vec<f64> = std::iter::once(2.0)
        .chain((1..=200).map(|n| (n as f64).powi(-2)))
        .collect();
    let csv = write_csv("sublinear.csv", &values);
    let output = binary()
        .args(["rates", "--csv"])
        .arg(&csv)
        .args(["--target", "0"])
        .output()
        .unwrap();
    run_ok(&output);
    let report = String::from_utf8(output.stdout).unwrap();
    assert!(report.contains("\"sublinear\""), "{report}");
    assert!(report.contains("0.75"), "{report}");

    // finite termination
    let mut values = vec![3.0, 1.0, 0.1];
    values.extend(std::iter::repeat(0.0).take(20));
    let csv = write_csv("finite.csv", &values);
    let output = binary()
        .args(["rates", "--csv"])
        .arg(&csv)
        .args(["--target", "0"])
        .output()
        .unwrap();
    run_ok(&output);
    assert!(String::from_utf8(output.stdout).unwrap().contains("finite_steps"));

    // values below the target are a data error
    let csv = write_csv("bad.csv", &[1.0, 0.5, 0.2, 0.1]);
    let output = binary()
        .args(["rates", "--csv"])
        .arg(&csv)
        .args(["--target", "0.3"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn rates_on_a_strongly_convex_solve_reports_linear() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        problem: ProblemKind::StronglyConvex,
        variant: VariantKind::CPadisno,
        alpha: 0.0,
        beta: 0.0,
        step_override: None,
        allow_unsafe_step: false,
        max_iters: 500,
        tol: 1e-12,
        seed: 1,
        input_image: None,
        output_dir: dir.path().join("out"),
    };
    let config_path = write_config(dir.path(), &config);
    let output = binary()
        .args(["solve", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    run_ok(&output);

    // the composite's minimum: 0.1 |x*|_1 + 0.5 |x* - c|^2 = 1.04
    let output = binary()
        .args(["rates", "--csv"])
        .arg(config.output_dir.join("trajectory.csv"))
        .args(["--target", "1.04"])
        .output()
        .unwrap();
    run_ok(&output);
    let report = String::from_utf8(output.stdout).unwrap();
    assert!(report.contains("\"linear\""), "{report}");
}
