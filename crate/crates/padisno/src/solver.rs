//! The PADISNO / c-PADISNO iteration engine.
//!
//! With the convention `x_{-1} = x_0`, one iteration evaluates
//!
//! ```text
//! y_n = x_n + alpha_n (x_n - x_{n-1})
//! z_n = x_n + beta_n  (x_n - x_{n-1})
//! x_{n+1} in prox_{s f}( y_n - s grad g(z_n) )
//! ```
//!
//! Both variants run the same composition; they differ only in which
//! inertial limits and step sizes are admissible:
//!
//! | variant    | `f`            | limit        | `s` strictly below                  |
//! |------------|----------------|--------------|-------------------------------------|
//! | PADISNO    | bounded below  | `|a| < 1/2`  | `(1 - 2|a|) / (L (2|b| + 1))`       |
//! | c-PADISNO  | convex         | `|a| < 1`    | `2 (1 - |a|) / (L (2|b| + 1))`      |
//!
//! When `g` is concave the bounds relax to `(1 - 2|a|) / (2 L |b|)` and
//! `(1 - |a|) / (L |b|)` respectively, which are `+inf` for `b = 0`: the
//! step size can then be taken arbitrarily large.
//!
//! [`run`] enforces the bound strictly and refuses any `s` at or above it
//! unless [`SolverConfig::allow_unsafe_step`] is set (useful for reference
//! schedules, e.g. the FISTA-style `alpha = beta = 1`, that sit outside the
//! admissible region but are still worth executing for comparison).

use std::fmt;
use std::sync::Arc;

use crate::problems::CompositeObjective;
use crate::{DenseVector, Error, Result};

/// Which admissibility regime the iteration runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Non-convex `f` (bounded below); inertial limit `|alpha| < 1/2`.
    Padisno,
    /// Convex `f`; inertial limit `|alpha| < 1` and twice the step size.
    CPadisno,
}

type ScheduleFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// The inertial coefficient sequences `alpha_n`, `beta_n` together with
/// their limits and suprema.
///
/// The limits drive the step-size bound; the suprema feed the diagnostic
/// subgradient bound, which is why they are supplied explicitly instead of
/// being estimated. Callers guarantee `alpha_n -> alpha_limit`,
/// `beta_n -> beta_limit` and `|alpha_n| <= alpha_sup`,
/// `|beta_n| <= beta_sup` for all `n`.
#[derive(Clone)]
pub struct InertialSchedule {
    alpha_fn: ScheduleFn,
    beta_fn: ScheduleFn,
    pub alpha_limit: f64,
    pub beta_limit: f64,
    pub alpha_sup: f64,
    pub beta_sup: f64,
}

impl InertialSchedule {
    /// Constant coefficients `alpha_n = alpha`, `beta_n = beta`.
    pub fn constant(alpha: f64, beta: f64) -> Self {
        InertialSchedule {
            alpha_fn: Arc::new(move |_| alpha),
            beta_fn: Arc::new(move |_| beta),
            alpha_limit: alpha,
            beta_limit: beta,
            alpha_sup: alpha.abs(),
            beta_sup: beta.abs(),
        }
    }

    /// Ramped coefficients `alpha_n = alpha n / (n + offset)` (and the same
    /// for beta), increasing in magnitude toward their limits.
    pub fn ramp(alpha: f64, beta: f64, offset: f64) -> Self {
        assert!(offset > 0.0, "ramp offset must be positive");
        InertialSchedule {
            alpha_fn: Arc::new(move |n| alpha * n as f64 / (n as f64 + offset)),
            beta_fn: Arc::new(move |n| beta * n as f64 / (n as f64 + offset)),
            alpha_limit: alpha,
            beta_limit: beta,
            alpha_sup: alpha.abs(),
            beta_sup: beta.abs(),
        }
    }

    /// Fully custom sequences; the caller supplies limits and suprema.
    pub fn from_fns(
        alpha_fn: impl Fn(usize) -> f64 + Send + Sync + 'static,
        beta_fn: impl Fn(usize) -> f64 + Send + Sync + 'static,
        alpha_limit: f64,
        beta_limit: f64,
        alpha_sup: f64,
        beta_sup: f64,
    ) -> Self {
        InertialSchedule {
            alpha_fn: Arc::new(alpha_fn),
            beta_fn: Arc::new(beta_fn),
            alpha_limit,
            beta_limit,
            alpha_sup,
            beta_sup,
        }
    }

    pub fn alpha(&self, n: usize) -> f64 {
        (self.alpha_fn)(n)
    }

    pub fn beta(&self, n: usize) -> f64 {
        (self.beta_fn)(n)
    }
}

impl fmt::Debug for InertialSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InertialSchedule")
            .field("alpha_limit", &self.alpha_limit)
            .field("beta_limit", &self.beta_limit)
            .field("alpha_sup", &self.alpha_sup)
            .field("beta_sup", &self.beta_sup)
            .finish_non_exhaustive()
    }
}

/// Strict upper bound on admissible step sizes for the given variant,
/// concavity flag, inertial limits and gradient Lipschitz constant.
///
/// Returns `+inf` only in the concave cases with `beta_limit = 0`.
pub fn max_step_size(
    variant: Variant,
    g_concave: bool,
    alpha_limit: f64,
    beta_limit: f64,
    lipschitz: f64,
) -> Result<f64> {
    if !lipschitz.is_finite() || lipschitz <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        )));
    }
    let a = alpha_limit.abs();
    let b = beta_limit.abs();
    let bound = match (variant, g_concave) {
        (Variant::Padisno, false) => {
            require_alpha(a, 0.5, "PADISNO")?;
            (1.0 - 2.0 * a) / (lipschitz * (2.0 * b + 1.0))
        }
        (Variant::Padisno, true) => {
            require_alpha(a, 0.5, "PADISNO")?;
            if b == 0.0 {
                f64::INFINITY
            } else {
                (1.0 - 2.0 * a) / (2.0 * lipschitz * b)
            }
        }
        (Variant::CPadisno, false) => {
            require_alpha(a, 1.0, "c-PADISNO")?;
            2.0 * (1.0 - a) / (lipschitz * (2.0 * b + 1.0))
        }
        (Variant::CPadisno, true) => {
            require_alpha(a, 1.0, "c-PADISNO")?;
            if b == 0.0 {
                f64::INFINITY
            } else {
                (1.0 - a) / (lipschitz * b)
            }
        }
    };
    Ok(bound)
}

fn require_alpha(a: f64, limit: f64, name: &str) -> Result<()> {
    if !(a < limit) {
        return Err(Error::InvalidParameter(format!(
            "{name} requires |alpha_limit| < {limit}, got {a}"
        )));
    }
    Ok(())
}

/// Everything needed to run the iteration apart from the starting point
/// and the objective.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Caller's assertion that `g` is concave, relaxing the step bound.
    pub g_concave: bool,
    pub step_size: f64,
    pub schedule: InertialSchedule,
    pub max_iters: usize,
    /// Stop once `|x_n - x_{n-1}| < tol_displacement` (0 disables).
    pub tol_displacement: f64,
    /// Stop once `|(f+g)(x_n) - objective_target| < tol_objective`; only
    /// active when a target value is supplied (0 disables).
    pub tol_objective: f64,
    /// Known limit objective value, when available (e.g. experiment
    /// problems with a known minimum).
    pub objective_target: Option<f64>,
    /// Skip the admissibility gate; inadmissible reference schedules only.
    pub allow_unsafe_step: bool,
}

impl SolverConfig {
    pub fn new(variant: Variant, step_size: f64, schedule: InertialSchedule) -> Self {
        SolverConfig {
            variant,
            g_concave: false,
            step_size,
            schedule,
            max_iters: 50_000,
            tol_displacement: 1e-12,
            tol_objective: 0.0,
            objective_target: None,
            allow_unsafe_step: false,
        }
    }

    /// Checks the step-size gate against the given Lipschitz constant.
    pub fn validate(&self, lipschitz: f64) -> Result<()> {
        if !self.step_size.is_finite() || self.step_size <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive and finite, got {}",
                self.step_size
            )));
        }
        if self.tol_displacement < 0.0 || self.tol_objective < 0.0 {
            return Err(Error::InvalidParameter(
                "tolerances must be nonnegative".into(),
            ));
        }
        if self.allow_unsafe_step {
            return Ok(());
        }
        let bound = max_step_size(
            self.variant,
            self.g_concave,
            self.schedule.alpha_limit,
            self.schedule.beta_limit,
            lipschitz,
        )?;
        if self.step_size >= bound {
            return Err(Error::StepSizeRejected {
                step: self.step_size,
                bound,
            });
        }
        Ok(())
    }
}

/// One accepted iterate with its extrapolation points.
///
/// `y` and `z` are the points the next step is evaluated at, i.e. functions
/// of `(x_{n-1}, x_n, n)`; at `n = 0` both equal `x_0` because of the
/// `x_{-1} = x_0` convention, which also makes `displacement` 0 there.
#[derive(Debug, Clone)]
pub struct IterateRecord {
    pub n: usize,
    pub x: DenseVector,
    pub y: DenseVector,
    pub z: DenseVector,
    /// `(f+g)(x_n)`.
    pub fg_value: f64,
    /// `|x_n - x_{n-1}|`.
    pub displacement: f64,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    DisplacementTol,
    ObjectiveTol,
    MaxIters,
}

/// The full record of a run: every iterate plus the configuration used.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<IterateRecord>,
    pub config: SolverConfig,
    pub termination: Termination,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_x(&self) -> &DenseVector {
        &self.records.last().expect("trajectory never empty").x
    }
}

/// One iteration from history `(prev, curr)` at index `n`: returns the
/// extrapolations `(y_n, z_n)` and the next iterate.
pub fn step(
    prev: &DenseVector,
    curr: &DenseVector,
    n: usize,
    config: &SolverConfig,
    objective: &CompositeObjective,
) -> Result<(DenseVector, DenseVector, DenseVector)> {
    let y = curr.extrapolate(prev, config.schedule.alpha(n));
    let z = curr.extrapolate(prev, config.schedule.beta(n));
    let next = forward_backward(&y, &z, config.step_size, objective)?;
    Ok((y, z, next))
}

fn forward_backward(
    y: &DenseVector,
    z: &DenseVector,
    step_size: f64,
    objective: &CompositeObjective,
) -> Result<DenseVector> {
    let grad = objective.smooth().gradient(z);
    if !grad.is_finite() {
        return Err(Error::Numerical(
            "non-finite gradient in forward step".into(),
        ));
    }
    let anchor = y.axpy(-step_size, &grad);
    let next = objective.nonsmooth().prox(&anchor, step_size)?;
    if !next.is_finite() {
        return Err(Error::Numerical("non-finite prox output".into()));
    }
    Ok(next)
}

/// Runs the configured iteration from `x_{-1} = x_0 = x0` and records every
/// iterate. Identical inputs produce bit-identical trajectories.
pub fn run(
    x0: &DenseVector,
    config: &SolverConfig,
    objective: &CompositeObjective,
) -> Result<Trajectory> {
    config.validate(objective.smooth().lipschitz())?;
    if !x0.is_finite() {
        return Err(Error::InvalidParameter(
            "starting point must be finite".into(),
        ));
    }
    if config.variant == Variant::CPadisno && !objective.nonsmooth().is_convex() {
        return Err(Error::InvalidParameter(
            "c-PADISNO requires a convex non-smooth term".into(),
        ));
    }

    let mut records = Vec::new();
    let mut prev = x0.clone();
    let mut curr = x0.clone();
    let mut n = 0usize;
    let termination = loop {
        let y = curr.extrapolate(&prev, config.schedule.alpha(n));
        let z = curr.extrapolate(&prev, config.schedule.beta(n));
        let displacement = curr.distance(&prev);
        let fg_value = objective.evaluate(&curr);
        if fg_value.is_nan() {
            return Err(Error::Numerical(format!(
                "objective is NaN at iteration {n}"
            )));
        }
        records.push(IterateRecord {
            n,
            x: curr.clone(),
            y: y.clone(),
            z: z.clone(),
            fg_value,
            displacement,
        });

        if n >= 1 && displacement < config.tol_displacement {
            break Termination::DisplacementTol;
        }
        if let Some(target) = config.objective_target {
            if (fg_value - target).abs() < config.tol_objective {
                break Termination::ObjectiveTol;
            }
        }
        if n == config.max_iters {
            break Termination::MaxIters;
        }

        let next = forward_backward(&y, &z, config.step_size, objective)?;
        prev = std::mem::replace(&mut curr, next);
        n += 1;
    };

    Ok(Trajectory {
        records,
        config: config.clone(),
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_toy2d, CompositeObjective, IsotropicQuadratic};
    use crate::prox::ZeroFn;
    use approx::assert_relative_eq;

    fn quadratic_objective() -> CompositeObjective {
        // g(x) = x^2 / 2, L_g = 1
        CompositeObjective::new(
            Box::new(ZeroFn),
            Box::new(IsotropicQuadratic::new(1.0, DenseVector::from([0.0]))),
        )
        .unwrap()
    }

    #[test]
    fn step_size_bounds() {
        let b = max_step_size(Variant::Padisno, false, 0.4, 2.5, 2.0).unwrap();
        assert_relative_eq!(b, 1.0 / 60.0, max_relative = 1e-15);

        let b = max_step_size(Variant::CPadisno, false, 0.0, 0.0, 14.0).unwrap();
        assert_eq!(b, 1.0 / 7.0);
        assert!(7.0 / 50.0 < b);

        let b = max_step_size(Variant::Padisno, true, 0.0, 0.0, 5.0).unwrap();
        assert_eq!(b, f64::INFINITY);

        let b = max_step_size(Variant::CPadisno, true, 0.5, 1.0, 2.0).unwrap();
        assert_eq!(b, 0.25);
    }

    #[test]
    fn step_size_bound_rejects_bad_parameters() {
        assert!(max_step_size(Variant::Padisno, false, 0.5, 0.0, 1.0).is_err());
        assert!(max_step_size(Variant::CPadisno, false, 1.0, 0.0, 1.0).is_err());
        assert!(max_step_size(Variant::Padisno, false, 0.1, 0.0, 0.0).is_err());
        assert!(max_step_size(Variant::Padisno, false, 0.1, 0.0, -3.0).is_err());
    }

    #[test]
    fn step_reduces_to_gradient_descent_without_f() {
        let objective = quadratic_objective();
        let config = SolverConfig::new(
            Variant::CPadisno,
            0.5,
            InertialSchedule::constant(0.0, 0.0),
        );
        let one = DenseVector::from([1.0]);
        let (y, z, next) = step(&one, &one, 3, &config, &objective).unwrap();
        assert_eq!(y, one);
        assert_eq!(z, one);
        assert_eq!(next.as_slice(), &[0.5]);
    }

    #[test]
    fn step_applies_both_inertial_terms() {
        let objective = quadratic_objective();
        let config = SolverConfig::new(
            Variant::CPadisno,
            0.5,
            InertialSchedule::constant(0.1, 0.1),
        );
        let prev = DenseVector::from([0.0]);
        let curr = DenseVector::from([1.0]);
        let (y, z, next) = step(&prev, &curr, 1, &config, &objective).unwrap();
        assert_relative_eq!(y[0], 1.1, max_relative = 1e-15);
        assert_relative_eq!(z[0], 1.1, max_relative = 1e-15);
        // x_{n+1} = y - s * grad g(z) = 1.1 - 0.5 * 1.1
        assert_relative_eq!(next[0], 0.55, max_relative = 1e-15);
    }

    #[test]
    fn inertia_vanishes_at_fixed_history() {
        let objective = quadratic_objective();
        let config = SolverConfig::new(
            Variant::CPadisno,
            0.5,
            InertialSchedule::constant(0.9, -0.4),
        );
        let x = DenseVector::from([0.3]);
        let (y, z, _) = step(&x, &x, 5, &config, &objective).unwrap();
        assert_eq!(y, x);
        assert_eq!(z, x);
    }

    #[test]
    fn quadratic_terminates_at_fixed_point_in_one_step() {
        let objective = quadratic_objective();
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            1.0,
            InertialSchedule::constant(0.0, 0.0),
        );
        config.tol_displacement = 1e-12;
        let traj = run(&DenseVector::from([3.0]), &config, &objective).unwrap();
        // x_1 = 3 - 1 * 3 = 0, then x_2 = 0: displacement stop
        assert_eq!(traj.records[1].x.as_slice(), &[0.0]);
        assert_eq!(traj.termination, Termination::DisplacementTol);
        assert_eq!(traj.final_x().as_slice(), &[0.0]);
    }

    #[test]
    fn zero_iteration_budget_gives_single_record() {
        let objective = quadratic_objective();
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            0.5,
            InertialSchedule::constant(0.0, 0.0),
        );
        config.max_iters = 0;
        let traj = run(&DenseVector::from([2.0]), &config, &objective).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.termination, Termination::MaxIters);
        assert_eq!(traj.records[0].displacement, 0.0);
    }

    #[test]
    fn gate_rejects_step_at_or_above_bound() {
        let objective = quadratic_objective(); // L = 1, c-PADISNO bound = 2
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            2.0,
            InertialSchedule::constant(0.0, 0.0),
        );
        let err = run(&DenseVector::from([1.0]), &config, &objective).unwrap_err();
        assert!(matches!(err, Error::StepSizeRejected { .. }));

        config.allow_unsafe_step = true;
        config.max_iters = 3;
        config.tol_displacement = 0.0;
        assert!(run(&DenseVector::from([1.0]), &config, &objective).is_ok());
    }

    #[test]
    fn cpadisno_requires_convex_f() {
        let haar = crate::imaging::HaarTransform::new(16, 16).unwrap();
        let objective = CompositeObjective::new(
            Box::new(crate::prox::WaveletL0::new(1e-5, haar)),
            Box::new(IsotropicQuadratic::new(1.0, DenseVector::zeros(256))),
        )
        .unwrap();
        let config = SolverConfig::new(
            Variant::CPadisno,
            0.5,
            InertialSchedule::constant(0.0, 0.0),
        );
        assert!(run(&DenseVector::zeros(256), &config, &objective).is_err());
    }

    #[test]
    fn toy2d_run_converges_to_origin_inside_box() {
        let objective = make_toy2d();
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            0.14,
            InertialSchedule::constant(0.0, 0.0),
        );
        config.tol_displacement = 1e-14;
        let x0 = DenseVector::from([0.5, -0.5]);
        let traj = run(&x0, &config, &objective).unwrap();
        assert_eq!(traj.termination, Termination::DisplacementTol);
        assert!(traj.final_x().norm() < 1e-12);
        let domain = objective.smooth().domain_box().unwrap();
        for record in &traj.records {
            assert!(domain.contains(&record.x), "left the box at n={}", record.n);
        }
    }

    /// Every accepted iterate must solve its own prox subproblem: verify
    /// prox optimality of `x_{n+1}` at the anchor `y_n - s grad g(z_n)`
    /// against random probes. This checks the iteration wiring end to end
    /// without trusting `step` internals.
    #[test]
    fn toy2d_iterates_satisfy_prox_optimality() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        let objective = make_toy2d();
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            0.14,
            InertialSchedule::constant(0.0, 0.0),
        );
        config.max_iters = 40;
        config.tol_displacement = 0.0;
        let traj = run(&DenseVector::from([0.5, -0.5]), &config, &objective).unwrap();

        let mut rng = StdRng::seed_from_u64(2024);
        let s = config.step_size;
        for pair in traj.records.windows(2) {
            let (here, next) = (&pair[0], &pair[1]);
            let anchor = here
                .y
                .axpy(-s, &objective.smooth().gradient(&here.z));
            let value = |p: &DenseVector| {
                objective.nonsmooth().evaluate(p) + p.distance(&anchor).powi(2) / (2.0 * s)
            };
            let at_next = value(&next.x);
            for _ in 0..30 {
                let probe = DenseVector::from([
                    next.x[0] + rng.gen_range(-0.5..0.5),
                    next.x[1] + rng.gen_range(-0.5..0.5),
                ]);
                assert!(at_next <= value(&probe) + 1e-10);
            }
        }
    }

    #[test]
    fn fista_style_schedule_executes_with_override() {
        let objective = make_toy2d();
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            1.0 / 14.0,
            InertialSchedule::ramp(1.0, 1.0, 3.1),
        );
        config.allow_unsafe_step = true;
        config.tol_displacement = 1e-14;
        let traj = run(&DenseVector::from([0.5, -0.5]), &config, &objective).unwrap();
        assert!(traj.final_x().norm() < 1e-10);

        // without the override the same config is rejected
        config.allow_unsafe_step = false;
        assert!(matches!(
            run(&DenseVector::from([0.5, -0.5]), &config, &objective),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn runs_are_deterministic() {
        let objective = make_toy2d();
        let mut config = SolverConfig::new(
            Variant::CPadisno,
            0.035,
            InertialSchedule::ramp(0.5, -0.5, 3.1),
        );
        config.tol_displacement = 1e-13;
        let x0 = DenseVector::from([0.5, -0.5]);
        let a = run(&x0, &config, &objective).unwrap();
        let b = run(&x0, &config, &objective).unwrap();
        assert_eq!(a.len(), b.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.x, rb.x);
            assert_eq!(ra.fg_value.to_bits(), rb.fg_value.to_bits());
        }
    }

    #[test]
    fn ramp_schedule_limits_and_suprema() {
        let schedule = InertialSchedule::ramp(-0.9, 1.5, 3.1);
        assert_relative_eq!(schedule.alpha(1_000_000), -0.9, max_relative = 1e-5);
        assert_relative_eq!(schedule.beta(1_000_000), 1.5, max_relative = 1e-5);
        assert_eq!(schedule.alpha(0), 0.0);
        for n in 0..10_000 {
            assert!(schedule.alpha(n).abs() <= schedule.alpha_sup);
            assert!(schedule.beta(n).abs() <= schedule.beta_sup);
        }
    }

    #[test]
    fn rejects_nonfinite_start() {
        let objective = quadratic_objective();
        let config = SolverConfig::new(
            Variant::CPadisno,
            0.5,
            InertialSchedule::constant(0.0, 0.0),
        );
        assert!(run(&DenseVector::from([f64::NAN]), &config, &objective).is_err());
    }
}
