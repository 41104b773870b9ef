//! The `rates` subcommand: fit the convergence regime of a trajectory CSV.

use std::path::Path;

use padisno::diagnostics::{fit_rate, RateRegime, RateReport};
use serde::Serialize;

use crate::{csvio, CliError};

#[derive(Debug, Serialize)]
pub struct RateReportJson {
    pub regime: &'static str,
    pub fitted_q: Option<f64>,
    pub fitted_theta: Option<f64>,
    pub fit_residual: f64,
    /// Iterations dropped from the front to make the errors non-increasing.
    pub trimmed: usize,
}

/// Reads `fg_value` from the CSV, subtracts the target, and classifies the
/// resulting error sequence.
///
/// Two trims happen on the caller side before fitting. Leading burn-in is
/// dropped until the errors are non-increasing. Trailing entries at or
/// below the numerical noise floor (errors indistinguishable from the
/// target in double precision) are cut off, because no decay law is
/// observable there; when fewer than 10 informative entries remain before
/// such a tail, the run is reported as finite termination.
pub fn cmd_rates(csv: &Path, target: f64) -> Result<String, CliError> {
    if !target.is_finite() {
        return Err(CliError::Usage("target value must be finite".into()));
    }
    let rows = csvio::read_trajectory_fg(csv)?;
    // record 0 is the starting point, not an iteration
    let errors: Vec<f64> = rows
        .iter()
        .filter(|(n, _)| *n >= 1)
        .map(|(_, fg)| fg - target)
        .collect();

    let floor = 1e-15f64.max(8.0 * f64::EPSILON * target.abs());
    if errors.iter().any(|&e| e < -floor) {
        return Err(CliError::Usage(
            "data error: objective values fall below the target".into(),
        ));
    }
    let cut = errors.iter().rposition(|&e| e > floor).map_or(0, |i| i + 1);
    let has_floor_tail = cut < errors.len();
    let informative = &errors[..cut];

    // drop everything before the last ascent
    let mut trimmed = 0;
    for i in 0..informative.len().saturating_sub(1) {
        if informative[i + 1] > informative[i] * (1.0 + 1e-12) {
            trimmed = i + 1;
        }
    }
    let tail = &informative[trimmed..];

    let report = if tail.len() < 10 && has_floor_tail {
        RateReport {
            regime: RateRegime::FiniteSteps,
            fitted_q: None,
            fitted_theta: None,
            fit_residual: 0.0,
        }
    } else {
        fit_rate(tail).map_err(|e| CliError::Usage(format!("data error: {e}")))?
    };

    let json = RateReportJson {
        regime: match report.regime {
            RateRegime::FiniteSteps => "finite_steps",
            RateRegime::Linear => "linear",
            RateRegime::Sublinear => "sublinear",
            RateRegime::Inconclusive => "inconclusive",
        },
        fitted_q: report.fitted_q,
        fitted_theta: report.fitted_theta,
        fit_residual: report.fit_residual,
        trimmed,
    };
    serde_json::to_string_pretty(&json).map_err(|e| CliError::Runtime(e.to_string()))
}
