//! Dense multilinear algebra, tensor-form matrix calculus and the
//! matrix/tensor normal distributions, with Monte-Carlo and
//! finite-difference oracles that cross-check every closed form.
//!
//! The numeric core is generic over the scalar type: the structural and
//! product operations need only ring arithmetic ([`Scalar`]), so they run
//! over `f32`, `f64`, complex numbers or exact rationals; calculus and
//! distributions need [`Real`]. The aliases below pin the common `f64` case.

pub mod calculus;
pub mod covariance;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix_normal;
pub mod products;
pub mod rng;
pub mod scalar;
pub mod shape;
pub mod tensor;
pub mod tensor_normal;
pub mod verify;

pub use error::{Error, Result};
pub use products::PairSpec;
pub use scalar::{Real, Scalar};
pub use shape::Shape;
pub use tensor::DenseTensor;

pub type Tensor = DenseTensor<f64>;
pub type Tensor32 = DenseTensor<f32>;
