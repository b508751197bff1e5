//! Numerical laboratory for rotation-invariant measures `dμ = w(|x|) dx` on
//! ℝⁿ at arbitrary dimension.
//!
//! The crate computes, in log space so that dimensions in the thousands are
//! routine:
//!
//! * measures and averages of balls `B(z, R)` (the center only matters
//!   through `s = |z|`, so every ball reduces to a one-dimensional radial
//!   integral against a spherical-cap area factor);
//! * the radial profile `φ` of the normalized Lebesgue ball, an
//!   approximation of the identity concentrating at `T = √(s² + R²)` as
//!   `n → ∞`, with positivity/mass/tail certificates;
//! * structural constants of a radial measure: dyadic oscillation `β`,
//!   micro-doubling `K₀` (dilation by `1 + 1/n`), weak doubling `K₁`
//!   (intersecting equal-radius balls), the combined off-center constant
//!   `K`, and Muckenhoupt `A_p`/`A₁` constants — all as certified lower
//!   bounds of the underlying suprema, with reproducible witnesses;
//! * one-dimensional weighted maximal operators (non-centered, one-sided,
//!   Hardy) evaluated exactly on a grid algebra, plus point-mass maximal
//!   functions and weak-norm lower bounds;
//! * a brute-force centered maximal operator on 1-D/2-D grids used as an
//!   oracle for the radial-reduction and decomposition inequalities;
//! * growth experiments across a dimension schedule (convergence of ball
//!   averages to `w(T)`, power-law and exponential growth fits);
//! * a discrete metric-measure engine: exact doubling constants, exact
//!   `L¹` operator norms at a single radius, a covering/selection pipeline
//!   for level sets of the maximal operator, and full inequality
//!   certificates for its output.
//!
//! Everything is deterministic: random suites take explicit seeds, and all
//! parallel reductions are order-independent (max) or ordered (tables).

// Reference constants are written with their full published precision even
// where f64 rounds them; the extra digits document provenance.
#![allow(clippy::excessive_precision)]

pub mod density;
pub mod dimlimit;
pub mod finite;
pub mod geometry;
pub mod grid1d;
pub mod oracle2d;
pub mod logspace;
pub mod quadrature;
pub mod report;
pub mod selection;
pub mod spaceio;
pub mod special;
pub mod weights;

pub use density::RadialDensity;
pub use dimlimit::{GrowthFit, GrowthModel, KernelCertificate, LimitExperiment};
pub use finite::{DiscreteConstants, FiniteMetricMeasureSpace, SingleRadiusNorm, TimeSet};
pub use geometry::BallSpec;
pub use grid1d::{Grid1D, RadialFunction};
pub use oracle2d::GridOracle;
pub use logspace::LogMeasure;
pub use quadrature::QuadratureConfig;
pub use report::ExperimentReport;
pub use selection::{LocalizationCertificate, SelectionState};
pub use weights::{ConstantEstimate, SweepGrid, Witness};

/// Crate-wide error type.
///
/// `Divergent` carries the partial mass accumulated before divergence was
/// detected, so callers that interpret a divergent integral as an honest
/// `+∞` (e.g. Muckenhoupt constants of non-integrable dual weights) can
/// still report where the scan stood.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integral diverges: {context} (partial log-mass {partial_log:.6})")]
    Divergent { partial_log: f64, context: String },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid finite space: {0}")]
    Space(String),

    #[error("certificate failure: {0}")]
    Certificate(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit-code class used by the command-line frontend: configuration and
    /// input problems map to 2, numeric divergence to 3, certificate
    /// failures to 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse { .. } | Error::Space(_) | Error::Io(_) => 2,
            Error::Divergent { .. } | Error::Quadrature(_) => 3,
            Error::Certificate(_) => 4,
        }
    }
}
