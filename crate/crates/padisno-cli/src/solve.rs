//! The `solve` subcommand: one configured run, one trajectory CSV.

use std::path::PathBuf;

use padisno::problems::{make_strongly_convex_test, make_toy2d, CompositeObjective};
use padisno::solver::{max_step_size, run, InertialSchedule, SolverConfig, Termination, Variant};
use padisno::DenseVector;

use crate::config::{ExperimentConfig, ProblemKind};
use crate::{csvio, CliError};

/// Offset of the ramped inertial schedules `alpha n / (n + OFFSET)`.
pub const RAMP_OFFSET: f64 = 3.1;

pub struct SolveOutcome {
    pub termination: Termination,
    pub final_fg: f64,
    pub csv_path: PathBuf,
}

/// Default toy2d step size, a comfortable margin below the c-PADISNO bound:
/// `(7/50) (1 - |alpha|) / (2 |beta| + 1)`.
pub fn toy2d_step_size(alpha: f64, beta: f64) -> f64 {
    7.0 / 50.0 * (1.0 - alpha.abs()) / (2.0 * beta.abs() + 1.0)
}

pub fn cmd_solve(config: &ExperimentConfig) -> Result<SolveOutcome, CliError> {
    let variant: Variant = config.variant.into();
    let (objective, solver_config, x0) = match config.problem {
        ProblemKind::Toy2d => {
            let objective = make_toy2d();
            let schedule = InertialSchedule::ramp(config.alpha, config.beta, RAMP_OFFSET);
            let step = match config.step_override {
                Some(s) => s,
                None if variant == Variant::CPadisno => {
                    toy2d_step_size(config.alpha, config.beta)
                }
                None => {
                    0.999 * max_step_size(variant, false, config.alpha, config.beta, 14.0)?
                }
            };
            let mut solver_config = SolverConfig::new(variant, step, schedule);
            solver_config.objective_target = Some(0.0);
            (objective, solver_config, DenseVector::from([0.5, -0.5]))
        }
        ProblemKind::StronglyConvex => {
            let objective = make_strongly_convex_test(8, 1.0)?;
            let schedule = InertialSchedule::constant(config.alpha, config.beta);
            let step = config.step_override.unwrap_or(0.5);
            let mut solver_config = SolverConfig::new(variant, step, schedule);
            solver_config.objective_target = objective.known_minimum().map(|(_, v)| v);
            let x0 = DenseVector::zeros(8);
            (objective, solver_config, x0)
        }
        ProblemKind::Restore => {
            return Err(CliError::Usage(
                "the restore problem is driven by the `restore` subcommand".into(),
            ));
        }
    };

    run_and_write(config, objective, solver_config, x0)
}

fn run_and_write(
    config: &ExperimentConfig,
    objective: CompositeObjective,
    mut solver_config: SolverConfig,
    x0: DenseVector,
) -> Result<SolveOutcome, CliError> {
    solver_config.max_iters = config.max_iters;
    solver_config.tol_displacement = config.tol;
    solver_config.allow_unsafe_step = config.allow_unsafe_step;

    let traj = run(&x0, &solver_config, &objective)?;

    std::fs::create_dir_all(&config.output_dir)?;
    let csv_path = config.output_dir.join("trajectory.csv");
    csvio::write_trajectory_csv(&csv_path, &traj, objective.smooth().lipschitz())?;

    Ok(SolveOutcome {
        termination: traj.termination,
        final_fg: traj.records.last().expect("nonempty").fg_value,
        csv_path,
    })
}
