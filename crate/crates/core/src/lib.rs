//! Group-transported Mercer kernels and orthonormal polynomial bases.
//!
//! A base kernel `K_e(x, y) = Σ λ_k P_k(x) P_k(y)` over an orthonormal
//! polynomial system in `L²(μ)` is moved around by a one-parameter group acting
//! on the real line. The unitary transport `(U_g f)(x) = J_g(x)^{1/2} f(g⁻¹·x)`
//! carries the eigenfunctions along while leaving the eigenvalues fixed, so
//! series estimators, kernel smoothers and their error rates all transport
//! with it. This crate implements the pieces and the numerical checks.

pub mod eigen;
pub mod estimators;
pub mod experiments;
pub mod error;
pub mod group;
pub mod kernel;
pub mod measure;
pub mod orthopoly;
pub mod quadrature;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
