//! Inertial forward-backward splitting for composite minimization.
//!
//! This crate minimizes `f + g` over `R^m`, where `f` is proper, lower
//! semicontinuous and possibly non-convex (accessed through a proximal
//! oracle) and `g` is differentiable with an `L_g`-Lipschitz gradient.
//! Two closely related iterations are provided, differing in the admissible
//! inertial limits and step sizes:
//!
//! * **PADISNO** — `f` possibly non-convex (but bounded below),
//!   inertial limit `|alpha| < 1/2`;
//! * **c-PADISNO** — `f` convex, inertial limit `|alpha| < 1` and roughly
//!   double the step size.
//!
//! Both evaluate the same composition
//!
//! ```text
//! y_n = x_n + alpha_n (x_n - x_{n-1})
//! z_n = x_n + beta_n  (x_n - x_{n-1})
//! x_{n+1} in prox_{s f}( y_n - s grad g(z_n) )
//! ```
//!
//! with two independent extrapolation coefficients `alpha_n` (prox anchor)
//! and `beta_n` (gradient anchor), both of which may be negative.
//!
//! Beyond the iteration engine ([`solver`]), the crate ships the proximal
//! operators used by the bundled problems ([`prox`]), the concrete objectives
//! ([`problems`]), runtime descent certificates and an empirical convergence
//! rate classifier ([`diagnostics`]), and the imaging toolbox used by the
//! restoration experiment: a 4-level orthonormal Haar transform, a periodic
//! Gaussian blur operator, seeded noise, ISNR and binary PGM I/O
//! ([`imaging`]).

pub mod diagnostics;
mod error;
pub mod imaging;
pub mod problems;
pub mod prox;
pub mod solver;
mod vector;

pub use error::{Error, Result};
pub use vector::DenseVector;
