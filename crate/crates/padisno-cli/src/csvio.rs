//! CSV writing and reading for trajectories.
//!
//! All floats are written with 17 significant digits so that every value
//! round-trips exactly; lines end with LF. Identical runs therefore produce
//! byte-identical files.

use std::io::Write;
use std::path::Path;

use padisno::diagnostics::lyapunov_weight;
use padisno::solver::Trajectory;

use crate::CliError;

/// Full-precision decimal rendering (17 significant digits).
pub fn fmt_float(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

/// Writes `n,x0..x{m-1},fg_value,displacement,delta_n,lyapunov`.
pub fn write_trajectory_csv(
    path: &Path,
    traj: &Trajectory,
    lipschitz: f64,
) -> Result<(), CliError> {
    let mut out = Vec::new();
    let dim = traj.records[0].x.dim();
    let mut header = String::from("n");
    for i in 0..dim {
        header.push_str(&format!(",x{i}"));
    }
    header.push_str(",fg_value,displacement,delta_n,lyapunov");
    writeln!(out, "{header}")?;

    let config = &traj.config;
    for record in &traj.records {
        let beta_prev = if record.n == 0 {
            config.schedule.beta(0)
        } else {
            config.schedule.beta(record.n - 1)
        };
        let delta = lyapunov_weight(
            config.variant,
            config.g_concave,
            config.step_size,
            lipschitz,
            config.schedule.beta(record.n),
            beta_prev,
        );
        let lyapunov = record.fg_value + delta * record.displacement * record.displacement;
        let mut line = record.n.to_string();
        for v in record.x.iter() {
            line.push(',');
            line.push_str(&fmt_float(*v));
        }
        line.push(',');
        line.push_str(&fmt_float(record.fg_value));
        line.push(',');
        line.push_str(&fmt_float(record.displacement));
        line.push(',');
        line.push_str(&fmt_float(delta));
        line.push(',');
        line.push_str(&fmt_float(lyapunov));
        writeln!(out, "{line}")?;
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads the `(n, fg_value)` columns back from a trajectory CSV.
pub fn read_trajectory_fg(path: &Path) -> Result<Vec<(usize, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read CSV {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Usage("empty CSV".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let n_idx = columns
        .iter()
        .position(|c| *c == "n")
        .ok_or_else(|| CliError::Usage("CSV has no 'n' column".into()))?;
    let fg_idx = columns
        .iter()
        .position(|c| *c == "fg_value")
        .ok_or_else(|| CliError::Usage("CSV has no 'fg_value' column".into()))?;

    let mut rows = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<&str, CliError> {
            fields.get(idx).copied().ok_or_else(|| {
                CliError::Usage(format!("row {} is missing column {idx}", line_no + 2))
            })
        };
        let n: usize = parse(n_idx)?
            .parse()
            .map_err(|e| CliError::Usage(format!("row {}: bad n: {e}", line_no + 2)))?;
        let fg: f64 = parse(fg_idx)?
            .parse()
            .map_err(|e| CliError::Usage(format!("row {}: bad fg_value: {e}", line_no + 2)))?;
        rows.push((n, fg));
    }
    Ok(rows)
}
