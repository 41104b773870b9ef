//! Concrete objectives: smooth parts with gradients and Lipschitz
//! constants, and their pairing with a prox oracle into a
//! [`CompositeObjective`].
//!
//! Three ready-made problems are provided:
//!
//! * [`make_toy2d`] — `f(x, y) = ((x^2 + y^2)^3)^(1/2)` plus
//!   `g(x, y) = (x^2 - y)^2 + x^2`, a coercive non-convex composite with
//!   global minimum 0 at the origin and gradient Lipschitz constant 14 on
//!   the box `[-1, 1]^2`;
//! * [`make_log_misfit`] — the robust image misfit
//!   `g(x) = sum log(1 + (A x - b)_i^2)` for a normalized blur operator `A`;
//! * [`make_strongly_convex_test`] — an l1-plus-quadratic composite with a
//!   closed-form minimizer, used to exercise the linear-rate regime.

use crate::imaging::{BlurOperator, Image};
use crate::prox::{prox_l1, NormCubed, ProxOracle, ScaledL1};
use crate::{DenseVector, Error, Result};

/// A differentiable objective term with a known gradient Lipschitz constant.
///
/// The constant only needs to be valid on [`Self::domain_box`] when one is
/// declared; callers are responsible for keeping iterates inside it.
pub trait SmoothPart: Send + Sync {
    fn evaluate(&self, x: &DenseVector) -> f64;

    fn gradient(&self, x: &DenseVector) -> DenseVector;

    /// Lipschitz constant of the gradient (on the domain box, if any).
    fn lipschitz(&self) -> f64;

    fn domain_box(&self) -> Option<&BoxDomain> {
        None
    }
}

/// An axis-aligned box `[lower_1, upper_1] x ... x [lower_m, upper_m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: DenseVector,
    upper: DenseVector,
}

impl BoxDomain {
    pub fn new(lower: DenseVector, upper: DenseVector) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                actual: upper.dim(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::InvalidParameter("empty box: lower > upper".into()));
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn lower(&self) -> &DenseVector {
        &self.lower
    }

    pub fn upper(&self) -> &DenseVector {
        &self.upper
    }

    pub fn contains(&self, x: &DenseVector) -> bool {
        x.dim() == self.lower.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &v)| self.lower[i] <= v && v <= self.upper[i])
    }
}

/// The pairing of a non-smooth term (through its prox oracle) and a smooth
/// term, i.e. the full objective `f + g`.
pub struct CompositeObjective {
    nonsmooth: Box<dyn ProxOracle>,
    smooth: Box<dyn SmoothPart>,
    known_minimum: Option<(DenseVector, f64)>,
}

impl CompositeObjective {
    /// Pairs the two terms. A non-convex `f` must be bounded from below,
    /// otherwise the prox subproblem may be unbounded.
    pub fn new(nonsmooth: Box<dyn ProxOracle>, smooth: Box<dyn SmoothPart>) -> Result<Self> {
        if !nonsmooth.is_convex() && !nonsmooth.is_bounded_below() {
            return Err(Error::InvalidParameter(
                "a non-convex non-smooth term must be bounded from below".into(),
            ));
        }
        Ok(CompositeObjective {
            nonsmooth,
            smooth,
            known_minimum: None,
        })
    }

    /// Attaches the known minimizer and minimum value, validating that the
    /// objective actually takes that value there.
    pub fn with_known_minimum(mut self, point: DenseVector, value: f64) -> Result<Self> {
        let at_point = self.evaluate(&point);
        if (at_point - value).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "declared minimum {value} but objective evaluates to {at_point}"
            )));
        }
        self.known_minimum = Some((point, value));
        Ok(self)
    }

    pub fn evaluate(&self, x: &DenseVector) -> f64 {
        self.nonsmooth.evaluate(x) + self.smooth.evaluate(x)
    }

    pub fn nonsmooth(&self) -> &dyn ProxOracle {
        self.nonsmooth.as_ref()
    }

    pub fn smooth(&self) -> &dyn SmoothPart {
        self.smooth.as_ref()
    }

    pub fn known_minimum(&self) -> Option<(&DenseVector, f64)> {
        self.known_minimum.as_ref().map(|(p, v)| (p, *v))
    }
}

/// `g(x, y) = (x^2 - y)^2 + x^2` with Lipschitz constant 14 on `[-1, 1]^2`.
#[derive(Debug, Clone)]
pub struct Toy2dSmooth {
    domain: BoxDomain,
}

impl Toy2dSmooth {
    pub fn new() -> Self {
        let domain = BoxDomain::new(
            DenseVector::from([-1.0, -1.0]),
            DenseVector::from([1.0, 1.0]),
        )
        .expect("valid box");
        Toy2dSmooth { domain }
    }
}

impl Default for Toy2dSmooth {
    fn default() -> Self {
        Self::new()
    }
}

impl SmoothPart for Toy2dSmooth {
    fn evaluate(&self, x: &DenseVector) -> f64 {
        assert_eq!(x.dim(), 2);
        let (a, b) = (x[0], x[1]);
        (a * a - b) * (a * a - b) + a * a
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        assert_eq!(x.dim(), 2);
        let (a, b) = (x[0], x[1]);
        DenseVector::from([4.0 * a * a * a - 4.0 * a * b + 2.0 * a, 2.0 * b - 2.0 * a * a])
    }

    fn lipschitz(&self) -> f64 {
        14.0
    }

    fn domain_box(&self) -> Option<&BoxDomain> {
        Some(&self.domain)
    }
}

/// Spectral norm of the Hessian of the 2-D test objective's smooth part:
/// `8x^2 - 4y + 2` where `x^2 >= y`, else `4x^2 + 2`.
pub fn hessian_norm_toy2d(x: f64, y: f64) -> f64 {
    if x * x >= y {
        8.0 * x * x - 4.0 * y + 2.0
    } else {
        4.0 * x * x + 2.0
    }
}

/// Supremum of [`hessian_norm_toy2d`] over an axis-aligned 2-D box.
///
/// Both case expressions increase with `x^2` and never increase with `y`,
/// and the case split is continuous along `x^2 = y`, so the supremum sits
/// at the largest `|x|` and the smallest `y` of the box.
pub fn lipschitz_on_box(domain: &BoxDomain) -> f64 {
    assert_eq!(domain.lower().dim(), 2, "expected a 2-D box");
    let x_abs = domain.lower()[0].abs().max(domain.upper()[0].abs());
    hessian_norm_toy2d(x_abs, domain.lower()[1])
}

/// The non-convex 2-D test problem with known global minimum 0 at the
/// origin.
pub fn make_toy2d() -> CompositeObjective {
    CompositeObjective::new(Box::new(NormCubed), Box::new(Toy2dSmooth::new()))
        .expect("convex f")
        .with_known_minimum(DenseVector::zeros(2), 0.0)
        .expect("exact minimum at the origin")
}

/// Robust data misfit `g(x) = sum_i log(1 + (A x - b)_i^2)`.
///
/// Its gradient is `A^T (2 r / (1 + r^2))` elementwise in the residual
/// `r = A x - b`. The scalar map `t -> log(1 + t^2)` has second derivative
/// bounded by 2, so the gradient Lipschitz constant is `2 |A|^2 <= 2` for
/// the normalized blur operators built here.
pub struct LogMisfit {
    blur: BlurOperator,
    observed: Image,
}

impl LogMisfit {
    fn residual(&self, x: &DenseVector) -> Result<Image> {
        let img = Image::from_vector(self.observed.rows(), self.observed.cols(), x)?;
        let ax = self.blur.apply(&img);
        Image::new(
            self.observed.rows(),
            self.observed.cols(),
            ax.pixels()
                .iter()
                .zip(self.observed.pixels())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl SmoothPart for LogMisfit {
    fn evaluate(&self, x: &DenseVector) -> f64 {
        let r = self.residual(x).expect("dimension mismatch in log misfit");
        r.pixels().iter().map(|&t| (1.0 + t * t).ln()).sum()
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        let r = self.residual(x).expect("dimension mismatch in log misfit");
        let weighted = Image::new(
            r.rows(),
            r.cols(),
            r.pixels()
                .iter()
                .map(|&t| 2.0 * t / (1.0 + t * t))
                .collect(),
        )
        .expect("dimensions preserved");
        self.blur.adjoint(&weighted).to_vector()
    }

    fn lipschitz(&self) -> f64 {
        2.0
    }
}

/// Builds the log misfit for a blur operator and an observed image.
pub fn make_log_misfit(blur: BlurOperator, observed: Image) -> LogMisfit {
    LogMisfit { blur, observed }
}

/// `g(x) = (mu / 2) |x - center|^2`; gradient Lipschitz constant `mu`.
#[derive(Debug, Clone)]
pub struct IsotropicQuadratic {
    pub mu: f64,
    pub center: DenseVector,
}

impl IsotropicQuadratic {
    pub fn new(mu: f64, center: DenseVector) -> Self {
        assert!(mu > 0.0, "curvature must be positive");
        IsotropicQuadratic { mu, center }
    }
}

impl SmoothPart for IsotropicQuadratic {
    fn evaluate(&self, x: &DenseVector) -> f64 {
        0.5 * self.mu * x.distance(&self.center).powi(2)
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        x.sub(&self.center).scale(self.mu)
    }

    fn lipschitz(&self) -> f64 {
        self.mu
    }
}

/// A strongly convex composite `l1_weight * |x|_1 + (mu / 2) |x - c|^2`
/// with its closed-form minimizer attached.
///
/// Optimality `0 in l1_weight d|.|_1(x*) + mu (x* - c)` means the minimizer
/// is the soft threshold of `c` at level `l1_weight / mu`.
pub fn strongly_convex_composite(
    centers: DenseVector,
    mu: f64,
    l1_weight: f64,
) -> Result<CompositeObjective> {
    if mu <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "strong convexity modulus must be positive, got {mu}"
        )));
    }
    if l1_weight < 0.0 {
        return Err(Error::InvalidParameter(
            "l1 weight must be nonnegative".into(),
        ));
    }
    let minimizer = prox_l1(&centers, l1_weight / mu);
    let value = l1_weight * minimizer.iter().map(|v| v.abs()).sum::<f64>()
        + 0.5 * mu * minimizer.distance(&centers).powi(2);
    CompositeObjective::new(
        Box::new(ScaledL1::new(l1_weight)),
        Box::new(IsotropicQuadratic::new(mu, centers)),
    )?
    .with_known_minimum(minimizer, value)
}

/// The default strongly convex rate-test composite: `0.1 |x|_1` plus an
/// isotropic quadratic of curvature `mu` centered away from the threshold.
pub fn make_strongly_convex_test(dim: usize, mu: f64) -> Result<CompositeObjective> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let centers = DenseVector::new((0..dim).map(|i| 1.0 + 0.1 * i as f64).collect());
    strongly_convex_composite(centers, mu, 0.1)
}
