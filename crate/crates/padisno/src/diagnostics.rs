//! Runtime certificates for solver trajectories.
//!
//! A run that respects the step-size gate should exhibit, after a finite
//! burn-in `N`:
//!
//! * monotone decrease of the regularized energy
//!   `E_n = (f+g)(x_n) + delta_n |x_n - x_{n-1}|^2`, with a uniform margin
//!   `A |x_{n+1} - x_n|^2` ([`check_descent`]);
//! * square-summable displacements ([`summability`]);
//! * a relative-error subgradient bound: an explicit element `W_n` of the
//!   subdifferential of the regularization
//!   `H(x, y) = (f+g)(x) + |y - x|^2 / 2` at
//!   `u_n = (x_n, x_n + sqrt(2 delta_n)(x_n - x_{n-1}))` satisfies
//!   `|W_n| <= b (|x_n - x_{n-1}| + |x_{n-1} - x_{n-2}|)` ([`check_h2`]).
//!
//! These are empirical instantiations of the sufficient-decrease and
//! relative-error conditions under which the iterates provably converge to
//! a critical point. [`fit_rate`] classifies an observed error sequence
//! into the matching asymptotic regime: finite termination, linear decay
//! `a Q^n`, or sublinear decay `a n^(-1/(2 theta - 1))`.

use crate::problems::CompositeObjective;
use crate::solver::{Trajectory, Variant};
use crate::{Error, Result};

/// Per-step violation tolerance for the energy monotonicity checks.
pub const DESCENT_TOL: f64 = 1e-10;

/// Weight of the squared displacement in the regularized energy `E_n`.
///
/// The formula depends on the variant and on whether `g` is concave:
/// `1/(4s)` (PADISNO) or `1/(2s)` (c-PADISNO), plus
/// `L/4 (|beta_n| - |beta_{n-1}| - 1)` where the trailing `-1` is dropped
/// in the concave cases.
pub fn lyapunov_weight(
    variant: Variant,
    g_concave: bool,
    step_size: f64,
    lipschitz: f64,
    beta_n: f64,
    beta_prev: f64,
) -> f64 {
    debug_assert!(step_size > 0.0 && lipschitz > 0.0);
    let base = match variant {
        Variant::Padisno => 1.0 / (4.0 * step_size),
        Variant::CPadisno => 1.0 / (2.0 * step_size),
    };
    let descent_term = if g_concave { 0.0 } else { 1.0 };
    base + lipschitz / 4.0 * (beta_n.abs() - beta_prev.abs() - descent_term)
}

/// The monotone-energy certificate extracted from a trajectory.
#[derive(Debug, Clone)]
pub struct DescentCertificate {
    /// `delta_n` per record (`beta_{-1} = beta_0` at the first record).
    pub delta_seq: Vec<f64>,
    /// `E_n = (f+g)(x_n) + delta_n |x_n - x_{n-1}|^2` per record.
    pub lyapunov_seq: Vec<f64>,
    /// First index after which the energy is non-increasing to the end.
    pub burn_in: usize,
    /// Largest `A` with `A |x_{n+1} - x_n|^2 <= E_n - E_{n+1}` for all
    /// `n >= burn_in`; `None` when every post-burn-in step has zero
    /// displacement.
    pub descent_constant: Option<f64>,
    /// `(n, E_{n+1} - E_n)` for every step where the energy increased by
    /// more than [`DESCENT_TOL`]; all such `n` precede `burn_in`.
    pub violations: Vec<(usize, f64)>,
}

/// Computes the energy sequence and locates the burn-in after which it
/// decreases monotonically.
pub fn check_descent(
    traj: &Trajectory,
    objective: &CompositeObjective,
) -> Result<DescentCertificate> {
    if traj.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "descent check needs at least 3 records, got {}",
            traj.len()
        )));
    }
    let config = &traj.config;
    let lipschitz = objective.smooth().lipschitz();
    let schedule = &config.schedule;

    let delta_seq: Vec<f64> = traj
        .records
        .iter()
        .map(|record| {
            let n = record.n;
            let beta_prev = if n == 0 {
                schedule.beta(0)
            } else {
                schedule.beta(n - 1)
            };
            lyapunov_weight(
                config.variant,
                config.g_concave,
                config.step_size,
                lipschitz,
                schedule.beta(n),
                beta_prev,
            )
        })
        .collect();

    let lyapunov_seq: Vec<f64> = traj
        .records
        .iter()
        .zip(&delta_seq)
        .map(|(record, delta)| record.fg_value + delta * record.displacement * record.displacement)
        .collect();

    let mut violations = Vec::new();
    for n in 0..lyapunov_seq.len() - 1 {
        let increase = lyapunov_seq[n + 1] - lyapunov_seq[n];
        if increase > DESCENT_TOL {
            violations.push((n, increase));
        }
    }
    let burn_in = violations.last().map_or(0, |(n, _)| n + 1);

    let mut descent_constant: Option<f64> = None;
    for n in burn_in..lyapunov_seq.len() - 1 {
        let step_sq = traj.records[n + 1].displacement.powi(2);
        if step_sq == 0.0 {
            continue;
        }
        let ratio = (lyapunov_seq[n] - lyapunov_seq[n + 1]) / step_sq;
        descent_constant = Some(descent_constant.map_or(ratio, |a: f64| a.min(ratio)));
    }

    Ok(DescentCertificate {
        delta_seq,
        lyapunov_seq,
        burn_in,
        descent_constant,
        violations,
    })
}

/// The relative-error subgradient report.
#[derive(Debug, Clone)]
pub struct H2Report {
    /// `|W_n|` for each checked index (original indices `burn_in + 2` on).
    pub subgradient_norms: Vec<f64>,
    /// The certified coefficient `b`.
    pub bound_b: f64,
    /// `|W_n| / (D_n + D_{n-1})` with `D_n = |x_n - x_{n-1}|`; steps with a
    /// zero denominator are skipped.
    pub ratios: Vec<f64>,
    /// Largest observed ratio (0 when none could be formed).
    pub max_ratio: f64,
}

/// Verifies the subgradient bound along a trajectory.
///
/// Re-indexes by the certificate's burn-in `N` as the energy argument
/// requires: with `x~_k = x_{k+N}` and `d~_k = sqrt(2 delta_{k+N})`, the
/// explicit subgradient of `H` at `u_k = (x~_k, x~_k + d~_k(x~_k - x~_{k-1}))`
/// is
///
/// ```text
/// W_k = ( (y~_{k-1} - x~_k)/s - grad g(z~_{k-1}) + grad g(x~_k)
///           - d~_k (x~_k - x~_{k-1}),
///         d~_k (x~_k - x~_{k-1}) )
/// ```
///
/// and the coefficient is
/// `b = sqrt(max(4/s^2 + 4L^2 + 4 sup d~^2, 4 sup a^2 / s^2 + 4 L^2 sup b^2))`,
/// where the suprema come from the schedule's declared bounds and the
/// largest observed `d~_k`.
pub fn check_h2(
    traj: &Trajectory,
    objective: &CompositeObjective,
    certificate: &DescentCertificate,
) -> Result<H2Report> {
    let n_start = certificate.burn_in;
    let s = traj.config.step_size;
    let lipschitz = objective.smooth().lipschitz();
    let schedule = &traj.config.schedule;

    let mut delta_tilde_sq_max: f64 = 0.0;
    for (k, &delta) in certificate.delta_seq.iter().enumerate().skip(n_start + 1) {
        if delta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "delta_{k} = {delta} is negative after burn-in; \
                 the energy weight admits no square root"
            )));
        }
        delta_tilde_sq_max = delta_tilde_sq_max.max(2.0 * delta);
    }

    let mut subgradient_norms = Vec::new();
    let mut ratios = Vec::new();
    for n in (n_start + 2)..traj.len() {
        let here = &traj.records[n];
        let before = &traj.records[n - 1];
        let delta_tilde = (2.0 * certificate.delta_seq[n]).sqrt();

        let step_diff = here.x.sub(&before.x);
        let first = before
            .y
            .sub(&here.x)
            .scale(1.0 / s)
            .sub(&objective.smooth().gradient(&before.z))
            .axpy(1.0, &objective.smooth().gradient(&here.x))
            .axpy(-delta_tilde, &step_diff);
        let second = step_diff.scale(delta_tilde);
        let norm = (first.dot(&first) + second.dot(&second)).sqrt();
        subgradient_norms.push(norm);

        let denominator = here.displacement + before.displacement;
        if denominator > 0.0 {
            ratios.push(norm / denominator);
        }
    }

    let alpha_sup = schedule.alpha_sup;
    let beta_sup = schedule.beta_sup;
    let branch_current = 4.0 / (s * s) + 4.0 * lipschitz * lipschitz + 4.0 * delta_tilde_sq_max;
    let branch_previous =
        4.0 * alpha_sup * alpha_sup / (s * s) + 4.0 * lipschitz * lipschitz * beta_sup * beta_sup;
    let bound_b = branch_current.max(branch_previous).sqrt();

    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(H2Report {
        subgradient_norms,
        bound_b,
        ratios,
        max_ratio,
    })
}

/// Running partial sums of squared displacements and whether they have
/// settled: the trailing increments (up to the last ten) all fall below
/// `1e-14`.
pub fn summability(traj: &Trajectory) -> (Vec<f64>, bool) {
    let increments: Vec<f64> = traj
        .records
        .iter()
        .skip(1)
        .map(|r| r.displacement * r.displacement)
        .collect();
    let mut partial_sums = Vec::with_capacity(increments.len());
    let mut acc = 0.0;
    for inc in &increments {
        acc += inc;
        partial_sums.push(acc);
    }
    let window = increments.len().min(10);
    let converged = increments[increments.len() - window..]
        .iter()
        .all(|&inc| inc < 1e-14);
    (partial_sums, converged)
}

/// The asymptotic regime an error sequence is classified into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateRegime {
    /// Errors reach (numerical) zero and stay there.
    FiniteSteps,
    /// `e_n ~ a Q^n` with `Q` in `[0, 1)`.
    Linear,
    /// `e_n ~ a n^(-1/(2 theta - 1))` with `theta` in `(1/2, 1)`.
    Sublinear,
    /// Neither law fits convincingly better than the other.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct RateReport {
    pub regime: RateRegime,
    /// Linear contraction factor; present exactly in the linear regime.
    pub fitted_q: Option<f64>,
    /// Sublinear exponent; present exactly in the sublinear regime.
    pub fitted_theta: Option<f64>,
    /// Root-mean-square residual of the selected fit in log space.
    pub fit_residual: f64,
}

/// Values below this threshold count as an exact zero for the
/// finite-termination regime.
pub const FINITE_STEPS_FLOOR: f64 = 1e-15;

/// Classifies a positive, eventually non-increasing error sequence.
///
/// Entries are taken at consecutive iterations `n = 1, 2, ...` (the caller
/// trims any burn-in). Both `log e` vs `n` and `log e` vs `log n` are fit
/// by least squares; the regime with the smaller residual wins unless the
/// two residuals are within 10% of each other, which is reported as
/// [`RateRegime::Inconclusive`]. Scaling all errors by a positive constant
/// changes neither the regime nor the fitted constants.
pub fn fit_rate(errors: &[f64]) -> Result<RateReport> {
    if errors.len() < 10 {
        return Err(Error::InvalidParameter(format!(
            "rate fitting needs at least 10 errors, got {}",
            errors.len()
        )));
    }
    if errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::InvalidParameter(
            "errors must be finite and nonnegative".into(),
        ));
    }
    if let Some(first_zero) = errors.iter().position(|&e| e < FINITE_STEPS_FLOOR) {
        if errors[first_zero..].iter().all(|&e| e < FINITE_STEPS_FLOOR) {
            return Ok(RateReport {
                regime: RateRegime::FiniteSteps,
                fitted_q: None,
                fitted_theta: None,
                fit_residual: 0.0,
            });
        }
        return Err(Error::InvalidParameter(
            "errors fall below resolution and rise again".into(),
        ));
    }

    let logs: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let linear_x: Vec<f64> = (1..=errors.len()).map(|i| i as f64).collect();
    let sublinear_x: Vec<f64> = (1..=errors.len()).map(|i| (i as f64).ln()).collect();
    let (linear_slope, linear_residual) = least_squares(&linear_x, &logs);
    let (sublinear_slope, sublinear_residual) = least_squares(&sublinear_x, &logs);

    let spread = (linear_residual - sublinear_residual).abs();
    if spread <= 0.1 * linear_residual.max(sublinear_residual) {
        return Ok(RateReport {
            regime: RateRegime::Inconclusive,
            fitted_q: None,
            fitted_theta: None,
            fit_residual: linear_residual.min(sublinear_residual),
        });
    }

    if linear_residual < sublinear_residual {
        let q = linear_slope.exp();
        if !(0.0..1.0).contains(&q) {
            return Ok(inconclusive(linear_residual));
        }
        Ok(RateReport {
            regime: RateRegime::Linear,
            fitted_q: Some(q),
            fitted_theta: None,
            fit_residual: linear_residual,
        })
    } else {
        // slope = -1/(2 theta - 1), valid for theta in (1/2, 1) iff slope < -1
        if sublinear_slope >= -1.0 {
            return Ok(inconclusive(sublinear_residual));
        }
        let theta = 0.5 * (1.0 - 1.0 / sublinear_slope);
        Ok(RateReport {
            regime: RateRegime::Sublinear,
            fitted_q: None,
            fitted_theta: Some(theta),
            fit_residual: sublinear_residual,
        })
    }
}

fn inconclusive(residual: f64) -> RateReport {
    RateReport {
        regime: RateRegime::Inconclusive,
        fitted_q: None,
        fitted_theta: None,
        fit_residual: residual,
    }
}

/// Ordinary least squares of `y` on `x`; returns the slope and the RMS
/// residual.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mean_x) * (xi - mean_x);
        sxy += (xi - mean_x) * (yi - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    (slope, (rss / n).sqrt())
}
