//! Cutoff-regularized fundamental solutions of the Laplacian in R^n, n ≥ 3.
//!
//! The fundamental solution G_n(x) = |x|^{2−n}/((n−2)|S^{n−1}|) is
//! regularized by freezing it to a plateau inside the ball of radius 1/Λ
//! and adding a continuous deformation profile f supported in [0, 1]. The
//! crate constructs such deformations three ways — in closed form from a
//! half-radius double spherical averaging, by Monte Carlo extraction from
//! general multi-index averaging schemes, and as convex series of rescaled
//! closed-form kernels — and verifies the admissibility criterion: the
//! spectral density of the regularized kernel must never go negative.
//!
//! Module map:
//!
//! * [`specfun`] — Γ, Bessel J_ν, the spherical kernel ρ_n and its first
//!   zero, sphere areas, ₂F₁ on [0, 1].
//! * [`numerics`] — Gauss–Legendre and adaptive quadrature, reproducible
//!   random streams, uniform sphere sampling, radial finite differences.
//! * [`kernel`] — G_n, the bare cutoff kernel, deforming functions, series
//!   deformations, deformed kernels.
//! * [`homogenize`] — multi-index spherical averaging: Monte Carlo
//!   evaluation, deforming-function extraction, the exact smeared Laplacian
//!   density, radial Poisson reconstruction.
//! * [`criterion`] — the positivity functional Φ_n, grid scans with
//!   verdicts, series spectral densities and strictness floors.

pub mod criterion;
pub mod error;
pub mod homogenize;
pub mod kernel;
pub mod numerics;
pub mod specfun;

pub use error::{Error, Result};
pub use specfun::Dimension;
