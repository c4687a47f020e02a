//! Exact Bernstein–Durrmeyer operators on the standard simplex.
//!
//! Everything here works over arbitrary-precision rationals. Polynomials are
//! kept in a canonical cartesian form (the barycentric coordinate
//! `x_0 = 1 - x_1 - ... - x_d` eliminated), so that two kernel
//! representations are equal exactly when their sparse term maps are equal.
//!
//! Module map:
//!
//! - [`combinat`]: multi-indices, factorials, binomials, multinomials.
//! - [`simplex`]: Dirichlet-type integrals over the simplex.
//! - [`poly`]: sparse cartesian polynomials and the Bernstein basis.
//! - [`durrmeyer`]: the operator `M_n`, compositions and the
//!   composition coefficients.
//! - [`kernels`]: definitional and closed-form kernels of compositions.
//! - [`verify`]: the identity suite and its JSON report.

pub mod combinat;
pub mod durrmeyer;
pub mod error;
pub mod kernels;
pub mod poly;
pub mod rational;
pub mod simplex;
pub mod verify;

pub use combinat::MultiIndex;
pub use durrmeyer::OperatorSpec;
pub use error::{BdkError, Result};
pub use kernels::{DiagonalKernelForm, KernelPolynomial};
pub use poly::{BarycentricPoint, CartesianPolynomial};
pub use rational::Rational;
pub use simplex::SimplexDim;
pub use verify::{SuiteConfig, VerificationReport};
