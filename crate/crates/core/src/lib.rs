//! Genuinely entangled subspaces: constructions, exact entanglement values,
//! seesaw optimization and semidefinite-programming bounds.

pub mod error;
pub mod exact;
pub mod noise;
pub mod scalar;
pub mod sdp;
pub mod subspaces;
pub mod tensor;
pub mod variational;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub type Exact = num_rational::BigRational;

pub type Subspace64 = tensor::Subspace<f64>;
pub type SubspaceF32 = tensor::Subspace<f32>;
pub type HermitianOp64 = tensor::HermitianOp<f64>;
pub type PureState64 = tensor::PureState<f64>;
pub type ExactOp = tensor::HermitianOp<Exact>;
