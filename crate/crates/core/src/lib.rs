//! Exact and numeric verification of twisted-derivation geometry: algebras
//! with `(sigma, tau)`-derivations, their modules, connections, curvature and
//! torsion, with presets for the quantum plane, the quantum 3-sphere and
//! matrix algebras.
//!
//! The engine is generic over the scalar field (see [`scalar::Field`]); the
//! aliases below fix the fields used by the presets.

pub mod algebra;
pub mod connection;
pub mod error;
pub mod expr;
pub mod matrix;
pub mod matrix_geometry;
pub mod module;
pub mod presets;
pub mod report;
pub mod scalar;
pub mod sphere;

pub use algebra::{Algebra, Element, PresentedSigma, SigmaTau};
pub use connection::{Connection, LieStructure};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use module::{HermitianForm, SigmaModule};
pub use report::{CheckReport, Status};
pub use scalar::{ComplexFloat, Field, GaussianRational, RatFunc, Rational};

/// Polynomial algebras over `Q(i)(s)`, `q = s^2`.
pub type QAlgebra = PresentedSigma<RatFunc>;
/// Elements of [`QAlgebra`].
pub type QElement = Element<RatFunc>;
/// Matrix algebras with exact Gaussian-rational entries.
pub type ExactMatrixAlgebra = presets::MatrixSigma<GaussianRational>;
/// Matrix algebras with double-precision complex entries.
pub type FloatMatrixAlgebra = presets::MatrixSigma<ComplexFloat>;
pub type ExactMatrix = Matrix<GaussianRational>;
pub type FloatMatrix = Matrix<ComplexFloat>;
