//! Spectral theory of bounded symmetric anti-linear operators at finite
//! matrix scale.
//!
//! A symmetric anti-linear operator is represented as `B x = A · conj(x)`
//! with a complex symmetric matrix `A` and a distinguished cyclic vector.
//! The crate extracts its spectral data `(ν, ψ)`, rebuilds the functional
//! model operator from spectral data, and reduces either one to a complex
//! Jacobi matrix through anti-orthogonal polynomials or anti-linear Lanczos.
//! The [`delta`] module carries the closed-form data of the Jacobi matrix
//! with a complex point interaction at the origin.
//!
//! Batch drivers in [`sweep`] run data-parallel over many operators or
//! couplings; with the `parallel` feature disabled they fall back to
//! sequential iteration.

pub mod anti_orthogonal;
pub mod banded;
pub mod delta;
pub mod error;
pub mod io;
pub mod model;
pub mod operator;
pub mod par;
pub mod poly;
pub mod quadrature;
pub mod samples;
pub mod spectral;
pub mod sweep;

pub use anti_orthogonal::{gram_schmidt, recurrence_generate, AntiOrthogonalBasis};
pub use error::{Error, Result};
pub use model::{build_model, verify_model, ModelReport, ModelSpace};
pub use operator::{AntiLinearOperator, JacobiParameters, LanczosResult, ModulusSpectrum};
pub use poly::ComplexPolynomial;
pub use spectral::{NodeClass, SpectralData};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default tolerances shared by the pipeline.
pub mod tol {
    /// S₁/S₂ threshold on `1 - |ψ|`.
    pub const PHASE: f64 = 1e-9;
    /// Relative gap separating eigenvalue clusters of `|B|`.
    pub const CLUSTER: f64 = 1e-8;
    /// Spectral clusters lighter than this are invisible from the cyclic vector.
    pub const WEIGHT: f64 = 1e-14;
    /// Lanczos breakdown, relative to the operator norm.
    pub const BREAKDOWN: f64 = 1e-11;
    /// Gram-Schmidt degeneracy, relative to the squared largest node.
    pub const DEGENERACY: f64 = 1e-12;
    /// Relative singular-value threshold for Krylov rank.
    pub const RANK: f64 = 1e-9;
}
