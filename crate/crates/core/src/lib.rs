//! Generalized logistic functions and the nonlinear equations they satisfy.
//!
//! The crate is organised around a handful of building blocks:
//!
//! - [`special_fn`]: Tricomi (Laguerre-exponential) functions, the real
//!   Gamma function and the Laguerre derivative `d/dx x d/dx (+ nu d/dx)`.
//! - [`logistic`]: the catalogue of logistic families, their closed forms,
//!   derivatives, asymptotes and a registry of governing equations that can
//!   be checked by residual evaluation.
//! - [`ode`]: an adaptive Dormand–Prince integrator for real and complex
//!   states, plus the free-electron-laser amplitude equation and its
//!   logistic field map.
//! - [`pde`]: Laguerre diffusion (operational and Crank–Nicolson), the
//!   Hopf–Cole and log-potential nonlinear equations, and Fisher fronts.
//! - [`residual`]: grids, finite-difference stencils and residual reports
//!   shared by everything above.
//!
//! Every closed-form/equation pair is verified the same way: sample the
//! candidate solution on a [`Grid`], substitute it into the equation using
//! analytic or finite-difference derivatives, and summarise the pointwise
//! defect in a [`ResidualReport`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod logistic;
pub mod ode;
pub mod pde;
pub mod quadrature;
pub mod residual;
pub mod special_fn;

pub use error::{Error, Result};
pub use residual::{DerivativeMode, Grid, ResidualReport, Verdict};
pub use special_fn::SeriesPolicy;
