//! Proximal operators and the prox-oracle contract.
//!
//! The solvers access the non-smooth term `f` only through [`ProxOracle`]:
//! a value oracle plus a map `(x, s) -> prox_{s f}(x)` returning one
//! minimizer of `y -> f(y) + |y - x|^2 / (2s)`. For non-convex `f` the
//! argmin set may contain several points; the oracle must select one
//! deterministically. All built-in operators below are total on finite
//! inputs and pure.

use crate::imaging::HaarTransform;
use crate::{DenseVector, Error, Result};

/// Access to a non-smooth objective term through value and prox maps.
///
/// Contract: `prox(x, s)` returns a single minimizer of
/// `f(y) + |y - x|^2 / (2s)`, the same one on every call. A non-convex
/// implementation must be bounded below, otherwise the minimizer may not
/// exist; convex implementations additionally promise a single-valued,
/// nonexpansive prox.
pub trait ProxOracle: Send + Sync {
    /// Extended-real function value `f(x)`.
    fn evaluate(&self, x: &DenseVector) -> f64;

    /// One minimizer of `y -> f(y) + |y - x|^2 / (2 step)`, `step > 0`.
    fn prox(&self, x: &DenseVector, step: f64) -> Result<DenseVector>;

    fn is_convex(&self) -> bool;

    fn is_bounded_below(&self) -> bool;
}

/// Scalar prox of `t -> gamma_lambda * |t|_0` (hard threshold).
///
/// Returns `t` when `|t| > sqrt(2 gamma_lambda)` and `0` when
/// `|t| < sqrt(2 gamma_lambda)`. At the tie `|t| = sqrt(2 gamma_lambda)`
/// both `0` and `t` minimize; this implementation selects `0`, preferring
/// the sparser point.
pub fn prox_l0_scalar(t: f64, gamma_lambda: f64) -> f64 {
    debug_assert!(gamma_lambda >= 0.0);
    if t.abs() > (2.0 * gamma_lambda).sqrt() {
        t
    } else {
        0.0
    }
}

/// Componentwise hard threshold, the prox of `gamma_lambda * |x|_0`.
pub fn prox_l0_vector(x: &DenseVector, gamma_lambda: f64) -> DenseVector {
    x.map(|t| prox_l0_scalar(t, gamma_lambda))
}

/// Componentwise soft threshold, the prox of `gamma_lambda * |x|_1`.
pub fn prox_l1(x: &DenseVector, gamma_lambda: f64) -> DenseVector {
    debug_assert!(gamma_lambda >= 0.0);
    x.map(|t| t.signum() * (t.abs() - gamma_lambda).max(0.0))
}

/// Prox of `lambda * |x|^3` (Euclidean norm cubed).
///
/// The minimizer is radial: the input is scaled by
/// `2 / (1 + sqrt(1 + 12 lambda |x|))`, a factor in `(0, 1]`.
pub fn prox_norm_cubed(x: &DenseVector, lambda: f64) -> DenseVector {
    debug_assert!(lambda >= 0.0);
    let r = x.norm();
    let factor = 2.0 / (1.0 + (1.0 + 12.0 * lambda * r).sqrt());
    x.scale(factor)
}

/// Prox of `gamma_lambda * |W x|_0` for an orthonormal transform `W`:
/// analyze, hard-threshold the coefficients, synthesize back.
pub fn prox_wavelet_l0(
    x: &DenseVector,
    gamma_lambda: f64,
    wavelet: &HaarTransform,
) -> Result<DenseVector> {
    let coeffs = wavelet.analyze_vec(x)?;
    wavelet.synthesize_vec(&prox_l0_vector(&coeffs, gamma_lambda))
}

/// The identically-zero function; its prox is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroFn;

impl ProxOracle for ZeroFn {
    fn evaluate(&self, _x: &DenseVector) -> f64 {
        0.0
    }

    fn prox(&self, x: &DenseVector, _step: f64) -> Result<DenseVector> {
        Ok(x.clone())
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn is_bounded_below(&self) -> bool {
        true
    }
}

/// `f(x) = weight * |x|_1`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledL1 {
    pub weight: f64,
}

impl ScaledL1 {
    pub fn new(weight: f64) -> Self {
        assert!(weight >= 0.0, "l1 weight must be nonnegative");
        ScaledL1 { weight }
    }
}

impl ProxOracle for ScaledL1 {
    fn evaluate(&self, x: &DenseVector) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn prox(&self, x: &DenseVector, step: f64) -> Result<DenseVector> {
        Ok(prox_l1(x, self.weight * step))
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn is_bounded_below(&self) -> bool {
        true
    }
}

/// `f(x) = |x|^3`, the non-smooth convex term of the bundled 2-D problem.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormCubed;

impl ProxOracle for NormCubed {
    fn evaluate(&self, x: &DenseVector) -> f64 {
        x.norm().powi(3)
    }

    fn prox(&self, x: &DenseVector, step: f64) -> Result<DenseVector> {
        Ok(prox_norm_cubed(x, step))
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn is_bounded_below(&self) -> bool {
        true
    }
}

/// `f(x) = weight * |W x|_0` with `W` an orthonormal Haar transform.
///
/// Non-convex; bounded below by 0. The prox threshold ties are broken
/// toward 0 (see [`prox_l0_scalar`]).
#[derive(Debug, Clone)]
pub struct WaveletL0 {
    weight: f64,
    transform: HaarTransform,
}

impl WaveletL0 {
    pub fn new(weight: f64, transform: HaarTransform) -> Self {
        assert!(weight >= 0.0, "l0 weight must be nonnegative");
        WaveletL0 { weight, transform }
    }
}

impl ProxOracle for WaveletL0 {
    fn evaluate(&self, x: &DenseVector) -> f64 {
        match self.transform.analyze_vec(x) {
            Ok(coeffs) => self.weight * coeffs.iter().filter(|c| **c != 0.0).count() as f64,
            Err(_) => f64::INFINITY,
        }
    }

    fn prox(&self, x: &DenseVector, step: f64) -> Result<DenseVector> {
        if x.dim() != self.transform.pixel_count() {
            return Err(Error::DimensionMismatch {
                expected: self.transform.pixel_count(),
                actual: x.dim(),
            });
        }
        prox_wavelet_l0(x, self.weight * step, &self.transform)
    }

    fn is_convex(&self) -> bool {
        false
    }

    fn is_bounded_below(&self) -> bool {
        true
    }
}
