//! Arithmetic in Weil (local) algebras, prolongation of functions, vector
//! fields and differential forms from `R^n` to the manifold of near points,
//! and the induced A-Poisson / A-symplectic brackets.
//!
//! The library works over quotients of `R[T1..Ts]` by monomial ideals, so
//! every algebra has an exact monomial basis and an exact multiplication
//! table. Smooth functions are represented as expression trees; evaluating
//! an expression at a point of `A^n` whose coordinates carry nilpotent
//! parts realizes Taylor-mode forward differentiation (on dual numbers this
//! is classic forward AD).

pub mod algebra;
pub mod expr;
pub mod lift;
pub mod poisson;
pub mod report;
pub mod sample;
pub mod symplectic;

mod error;

pub use error::Error;

pub use algebra::{AlgebraSpec, LinearForm, WeilAlgebra, WeilElement};
pub use expr::{Expr, NearPoint};
pub use lift::{FormA, LiftedFunction, VectorFieldA, VectorFieldBase};
pub use poisson::PoissonStructure;
pub use symplectic::SymplecticStructure;

/// Tolerance for invertibility / augmentation-zero tests.
pub const TOL_INVERT: f64 = 1e-12;
/// Tolerance for local linear-solver residuals.
pub const TOL_SOLVE: f64 = 1e-9;
/// Default tolerance for sampled identity checks.
pub const TOL_CHECK: f64 = 1e-8;
