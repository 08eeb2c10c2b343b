//! Entropy-bounded discontinuous Galerkin solver for the one-dimensional
//! multicomponent, chemically reacting, compressible Euler equations with
//! thermally perfect gas thermodynamics.
//!
//! The crate is organized bottom-up:
//!
//! - [`numeric`], [`basis`], [`means`]: scalar-generic numeric kernels
//!   (Gauss-Lobatto/Legendre quadrature, SBP operators, averaging operators).
//! - [`thermo`], [`mechanism`], [`kinetics`]: thermally perfect gas mixtures
//!   from NASA-7 polynomials, mechanism file parsing, and reaction rates.
//! - [`state`]: conservative-state algebra, entropy variables, and the
//!   admissible set.
//! - [`dg1d`], [`limiter`], [`stepper`]: spatial DG discretization,
//!   positivity/entropy limiting, and SSPRK2 transport with Strang splitting.
//! - [`dgode`]: implicit DG-in-time integration of the stiff reaction ODE,
//!   including the entropy-stable variant.
//! - [`driver`]: test cases, diagnostics, and file output behind the
//!   `entrodg` command-line interface.

pub mod basis;
pub mod dg1d;
pub mod dgode;
pub mod driver;
pub mod kinetics;
pub mod limiter;
pub mod means;
pub mod mechanism;
pub mod numeric;
pub mod state;
pub mod stepper;
pub mod thermo;

/// Scalar type used by the physics stack.
///
/// The numeric kernels in [`basis`] and [`means`] are generic over
/// [`numeric::Scalar`]; everything built on top of the gas model is pinned to
/// `f64` through this alias (NASA polynomial data and stiff rate constants do
/// not survive single precision).
pub type Float = f64;

/// Gauss-Lobatto collocation basis instantiated for the physics stack.
pub type Basis = basis::Basis<Float>;
