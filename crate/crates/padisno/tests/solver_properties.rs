//! Trajectory-level properties: descent certificates, subgradient bounds
//! and rate classification on full solver runs.

use padisno::diagnostics::{check_descent, check_h2, fit_rate, summability, RateRegime};
use padisno::problems::{make_strongly_convex_test, make_toy2d};
use padisno::solver::{run, InertialSchedule, SolverConfig, Variant};
use padisno::DenseVector;

fn toy2d_config(alpha: f64, beta: f64) -> SolverConfig {
    let step = 7.0 / 50.0 * (1.0 - alpha.abs()) / (2.0 * beta.abs() + 1.0);
    let mut config = SolverConfig::new(
        Variant::CPadisno,
        step,
        InertialSchedule::ramp(alpha, beta, 3.1),
    );
    config.tol_displacement = 1e-15;
    config
}

#[test]
fn toy2d_certificates_hold_across_inertial_choices() {
    let objective = make_toy2d();
    for &alpha in &[-0.5, 0.0, 0.5] {
        for &beta in &[-1.0, 0.0, 1.0] {
            let config = toy2d_config(alpha, beta);
            let traj = run(&DenseVector::from([0.5, -0.5]), &config, &objective).unwrap();
            assert!(
                traj.final_x().norm() < 1e-12,
                "alpha={alpha} beta={beta} stalled at {:?}",
                traj.final_x().as_slice()
            );

            let cert = check_descent(&traj, &objective).unwrap();
            assert!(
                cert.violations.is_empty(),
                "alpha={alpha} beta={beta} energy violations {:?}",
                cert.violations
            );
            assert!(cert.descent_constant.unwrap() > 0.0);
            assert!(cert.delta_seq[cert.burn_in..].iter().all(|&d| d > 0.0));

            let h2 = check_h2(&traj, &objective, &cert).unwrap();
            assert!(
                h2.max_ratio <= h2.bound_b + 1e-9,
                "alpha={alpha} beta={beta}: ratio {} > b {}",
                h2.max_ratio,
                h2.bound_b
            );

            let (partial_sums, converged) = summability(&traj);
            assert!(converged);
            assert!(partial_sums.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}

#[test]
fn strongly_convex_run_classifies_as_linear() {
    let objective = make_strongly_convex_test(8, 1.0).unwrap();
    let (_, minimum) = objective.known_minimum().unwrap();
    let mut config = SolverConfig::new(
        Variant::CPadisno,
        0.05,
        InertialSchedule::constant(0.0, 0.0),
    );
    config.max_iters = 220;
    config.tol_displacement = 0.0;
    let x0 = DenseVector::zeros(8);
    let traj = run(&x0, &config, &objective).unwrap();

    let errors: Vec<f64> = traj.records[20..=200]
        .iter()
        .map(|r| r.fg_value - minimum)
        .collect();
    assert!(errors.iter().all(|&e| e > 0.0));
    let report = fit_rate(&errors).unwrap();
    assert_eq!(report.regime, RateRegime::Linear);
    assert!(report.fit_residual < 1e-2, "residual {}", report.fit_residual);
}

#[test]
fn inertial_strongly_convex_run_still_linear() {
    let objective = make_strongly_convex_test(8, 1.0).unwrap();
    let (_, minimum) = objective.known_minimum().unwrap();
    let mut config = SolverConfig::new(
        Variant::CPadisno,
        0.05,
        InertialSchedule::ramp(0.3, 0.3, 3.1),
    );
    config.max_iters = 220;
    config.tol_displacement = 0.0;
    let traj = run(&DenseVector::zeros(8), &config, &objective).unwrap();
    let errors: Vec<f64> = traj.records[20..=200]
        .iter()
        .map(|r| r.fg_value - minimum)
        .collect();
    if errors.iter().all(|&e| e > 0.0) {
        let report = fit_rate(&errors).unwrap();
        assert_eq!(report.regime, RateRegime::Linear);
    }
}

#[test]
fn stronger_convexity_tightens_the_fitted_rate() {
    let mut previous_q = 1.0;
    for &mu in &[1.0, 2.0, 4.0] {
        let objective = make_strongly_convex_test(6, mu).unwrap();
        let (_, minimum) = objective.known_minimum().unwrap();
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            0.1,
            InertialSchedule::constant(0.0, 0.0),
        );
        config.max_iters = 200;
        config.tol_displacement = 0.0;
        let traj = run(&DenseVector::zeros(6), &config, &objective).unwrap();
        let errors: Vec<f64> = traj
            .records
            .iter()
            .skip(5)
            .map(|r| r.fg_value - minimum)
            .take_while(|&e| e > 1e-13)
            .collect();
        let report = fit_rate(&errors).unwrap();
        assert_eq!(report.regime, RateRegime::Linear);
        let q = report.fitted_q.unwrap();
        assert!(q < previous_q, "mu={mu}: Q={q} did not decrease");
        previous_q = q;
    }
}
