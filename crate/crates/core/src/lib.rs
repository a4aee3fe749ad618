//! Generalized Orlicz norms and Bernstein-type concentration bounds for sums
//! of independent zero-mean sub-exponential random variables.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`dist`] — random-variable models with exact expectations, exact tails
//!   where available, and reproducible sampling;
//! * [`orlicz`] — the Orlicz functions ψ₁(u) = eᵘ−1 and ψ₁₁(u) = eᵘ−1−u and a
//!   bisection solver for the threshold-parameterized norm
//!   ‖X‖_{f;ε} = min{x > 0 : E f(|X|/x) ≤ ε};
//! * [`special`] — the real branches of the Lambert W function and the
//!   closed-form constants built on them;
//! * [`bounds`] — MGF bounds and the piecewise / min-form / comparison tail
//!   bounds driven by the aggregates B² = ε Σᵢ ‖Xᵢ‖² and M = maxᵢ ‖Xᵢ‖;
//! * [`verify`] — asymptotic limit checks and bound-domination campaigns
//!   against exact and Monte Carlo reference tails.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dist;
pub mod orlicz;
pub mod special;
pub mod verify;

pub use bounds::{BoundCurve, BoundFamily, CurvePoint, NormFamily, SumProfile};
pub use dist::{Distribution, Expectation, ExpectationRequest};
pub use orlicz::{orlicz_norm, orlicz_norm_value, NormQuery, NormResult, OrliczFunction};
pub use special::LambertBranch;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integrand produced NaN inside an expectation.
    #[error("integrand evaluated to NaN at x = {0}")]
    NanIntegrand(f64),

    /// A distribution failed validation (probabilities, ordering, positivity).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A compact distribution spec could not be parsed.
    #[error("cannot parse distribution spec `{0}`")]
    ParseDistribution(String),

    /// Empty or all-zero norm list; the sum aggregates are undefined.
    #[error("degenerate sum profile: {0}")]
    DegenerateProfile(String),

    /// A profile was built with the wrong Orlicz family or threshold for the
    /// requested bound.
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),

    /// The Gaussian branch of the piecewise bound does not apply at this x.
    #[error("knee condition violated: x = {x} exceeds 2B²/M = {knee}")]
    KneeViolated { x: f64, knee: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
