//! Numerics for anomalous diffusion on a fractal time-space fabric.
//!
//! Physical coordinates `(x, t)` are related to "hatted" coordinates
//! `(x̂, t̂) = (sign(x)|x|^β, t^α)` in which the dynamics are those of ordinary
//! diffusion. The crate is organised by layer:
//!
//! - [`fabric`]: the coordinate transforms, sampled fields and the Hausdorff
//!   derivative.
//! - [`analytic`]: stretched-Gaussian densities, moments, relaxation curves,
//!   the Mittag-Leffler function and the comparison curves (Fox asymptotics,
//!   Richardson, Porta fit).
//! - [`solver`]: implicit finite-volume solvers for the hatted heat equation,
//!   the physical transport-diffusion equation and Richardson's equation.
//! - [`stochastic`]: walker ensembles, stretched-Gaussian and Lévy samplers,
//!   MSD exponent fits and the diverging-moment demonstration.
//! - [`quantum`]: fractional energy/momentum relations and the plane-wave
//!   residual in hatted coordinates.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytic;
pub mod error;
pub mod fabric;
pub mod io;
pub mod quadrature;
pub mod quantum;
pub mod solver;
pub mod stochastic;

pub use error::{Error, Result};
pub use fabric::{FractalIndices, SampledField};
