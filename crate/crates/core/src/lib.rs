//! Solver library for nonlinear Volterra integral equations with a
//! power-type nonlinearity,
//!
//! ```text
//! y(x)^{m+1} = ∫₀ˣ K(x,t) y(t) dt,   m > 0,  x ∈ [0, X],
//! ```
//!
//! equivalently u(x) = ∫₀ˣ K(x,t) u(t)^{1/(m+1)} dt via u = y^{m+1}.
//! The nonlinearity is not Lipschitz at 0, so the equation has the trivial
//! solution y ≡ 0 alongside the positive one; the explicit scheme here is
//! started with a positive overestimate that forces convergence to the
//! nontrivial solution.
//!
//! Modules:
//! - [`model`]: problem definition (exponent, kernel, grid, solution).
//! - [`quad`]: the parity-aware midpoint quadrature, generic weight rules,
//!   and local consistency errors δ(h) / ε(h).
//! - [`solver`]: starting value, optional Richardson extrapolation of it,
//!   and the explicit iteration.
//! - [`analysis`]: exact solutions of the two reference examples, pointwise
//!   errors, log-log convergence-order regression, theoretical order bounds.
//! - [`oracles`]: independent desk-scale checks of the comparison bound,
//!   the iterate lower bound, the discrete recurrence bound (with its
//!   ζ(1−A) constant), and solution bracketing.

// `!(x > 0.0)`-style guards are used throughout so that NaN inputs fall
// into the rejection branch; spelled positively they would slip through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod integrate;
pub mod model;
pub mod oracles;
pub mod quad;
pub mod solver;

pub use analysis::{AsymptoticForm, ConvergenceReport, OrderEstimate};
pub use error::{Result, VolterraError};
pub use model::{Grid, Kernel, ProblemSpec, Solution};
pub use quad::{ConsistencyReport, DeltaSign, WeightRule};
pub use solver::{SolverConfig, StartValue};
