//! The `fig1` subcommand: the 2-D parameter-grid experiment.
//!
//! Runs c-PADISNO on the bundled 2-D problem from `x_0 = (1/2, -1/2)` for
//! every cell of the alpha x beta grid with ramped schedules
//! `alpha n / (n + 3.1)` and step size `(7/50)(1 - |alpha|)/(2 |beta| + 1)`,
//! plus one FISTA-style reference cell (`alpha = beta = 1`, `s = 1/14`)
//! that sits outside the admissible region and therefore runs with the
//! unsafe-step override.

use std::path::Path;

use padisno::diagnostics::check_descent;
use padisno::problems::{make_toy2d, CompositeObjective};
use padisno::solver::{run, InertialSchedule, SolverConfig, Trajectory, Variant};
use padisno::DenseVector;

use crate::solve::{toy2d_step_size, RAMP_OFFSET};
use crate::{csvio, CliError};

pub const ALPHA_GRID: [f64; 6] = [-0.9, -0.5, 0.0, 0.5, 0.6, 0.9];
pub const BETA_GRID: [f64; 13] = [
    -2.0, -1.5, -1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0,
];
pub const START: [f64; 2] = [0.5, -0.5];
/// Every grid cell is expected to bring `|x_n|` below this within the
/// iteration budget.
pub const TARGET_TOL: f64 = 1e-12;
pub const MAX_ITERS: usize = 50_000;

/// One executed grid cell.
pub struct CellOutcome {
    pub alpha: f64,
    pub beta: f64,
    pub trajectory: Trajectory,
    /// First `n` with `|x_n| < TARGET_TOL`, if reached.
    pub iters_to_tol: Option<usize>,
    /// `|x_last|`.
    pub final_error: f64,
    /// Whether every iterate stayed inside the `[-1, 1]^2` box.
    pub stayed_in_domain: bool,
}

/// All `(alpha, beta)` grid cells in deterministic order.
pub fn grid_cells() -> Vec<(f64, f64)> {
    let mut cells = Vec::with_capacity(ALPHA_GRID.len() * BETA_GRID.len());
    for &alpha in &ALPHA_GRID {
        for &beta in &BETA_GRID {
            cells.push((alpha, beta));
        }
    }
    cells
}

/// Runs one cell with the experiment's schedules and step-size rule.
pub fn run_cell(alpha: f64, beta: f64) -> Result<(CellOutcome, CompositeObjective), CliError> {
    run_cell_with(alpha, beta, toy2d_step_size(alpha, beta), false)
}

/// The FISTA-style reference: `alpha = beta = 1`, `s = 1/14`; inadmissible,
/// so it runs under the unsafe-step override.
pub fn run_fista_reference() -> Result<(CellOutcome, CompositeObjective), CliError> {
    run_cell_with(1.0, 1.0, 1.0 / 14.0, true)
}

fn run_cell_with(
    alpha: f64,
    beta: f64,
    step: f64,
    allow_unsafe_step: bool,
) -> Result<(CellOutcome, CompositeObjective), CliError> {
    let objective = make_toy2d();
    let mut config = SolverConfig::new(
        Variant::CPadisno,
        step,
        InertialSchedule::ramp(alpha, beta, RAMP_OFFSET),
    );
    config.max_iters = MAX_ITERS;
    // stop well below the reporting tolerance so the summary captures the
    // first crossing of TARGET_TOL
    config.tol_displacement = 1e-16;
    config.allow_unsafe_step = allow_unsafe_step;

    let trajectory = run(&DenseVector::from(START), &config, &objective)?;
    let domain = objective
        .smooth()
        .domain_box()
        .expect("toy2d declares its box");
    let iters_to_tol = trajectory
        .records
        .iter()
        .find(|r| r.x.norm() < TARGET_TOL)
        .map(|r| r.n);
    let final_error = trajectory.final_x().norm();
    let stayed_in_domain = trajectory.records.iter().all(|r| domain.contains(&r.x));

    Ok((
        CellOutcome {
            alpha,
            beta,
            trajectory,
            iters_to_tol,
            final_error,
            stayed_in_domain,
        },
        objective,
    ))
}

fn cell_file_name(alpha: f64, beta: f64) -> String {
    format!("cell_a{alpha:+.2}_b{beta:+.2}.csv")
}

/// Runs the full grid plus the reference cell, writing one trajectory CSV
/// per cell and `summary.csv`.
pub fn cmd_fig1(output_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(output_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", output_dir.display())))?;

    let mut summary = String::from(
        "alpha,beta,iters_to_tol,final_error,stayed_in_D,descent_violations\n",
    );
    let mut outcomes = Vec::new();
    for (alpha, beta) in grid_cells() {
        outcomes.push(run_cell(alpha, beta)?);
    }
    outcomes.push(run_fista_reference()?);

    for (cell, objective) in &outcomes {
        let lipschitz = objective.smooth().lipschitz();
        csvio::write_trajectory_csv(
            &output_dir.join(cell_file_name(cell.alpha, cell.beta)),
            &cell.trajectory,
            lipschitz,
        )?;
        let violations = check_descent(&cell.trajectory, objective)
            .map(|cert| cert.violations.len())
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let iters = cell
            .iters_to_tol
            .map_or_else(|| "-1".to_string(), |n| n.to_string());
        summary.push_str(&format!(
            "{:+.2},{:+.2},{},{},{},{}\n",
            cell.alpha,
            cell.beta,
            iters,
            csvio::fmt_float(cell.final_error),
            cell.stayed_in_domain,
            violations
        ));
    }
    std::fs::write(output_dir.join("summary.csv"), summary)?;
    Ok(())
}
