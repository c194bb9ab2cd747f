//! Symmetric gauges, unitary ideals of complex matrices, noncommutative
//! Khintchine averages and splits, little-Grothendieck certificates, and Schur
//! multiplier norms.
//!
//! Every numeric routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common choices.

pub mod error;
pub mod exponent;
pub mod gauge;
pub mod grothendieck;
pub mod ideal;
pub mod io;
pub mod khintchine;
pub mod numeric;
pub mod random;
pub mod scalar;
pub mod schur;
pub mod seed;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use ideal::OperatorTuple;
pub use scalar::Real;

/// Dense complex matrix.
pub type CMatrix<T> = nalgebra::DMatrix<nalgebra::Complex<T>>;
pub type CMatrix64 = CMatrix<f64>;
pub type CMatrix32 = CMatrix<f32>;
