//! Statevector simulation of a quantum-gate maximum-likelihood decoder for
//! Polar codes.
//!
//! The pipeline mirrors the decoder's three circuit stages:
//!
//! 1. **Initialization**: one `Ry(θ_i)` per qubit loads the per-bit channel
//!    probabilities ([`channel`], [`qgated::compute_angles`]).
//! 2. **Reverse traversal**: a CNOT network undoes the encoder's XOR butterfly
//!    ([`circuit::build_reverse_traversal`]).
//! 3. **Frozen bit satisfaction**: amplitude amplification with an exact final
//!    rotation drives all probability mass onto states whose frozen bits are
//!    zero ([`circuit::build_fbs_block`], [`qgated::plan_rotation`]).
//!
//! [`mlref`] provides the brute-force maximum-likelihood reference used to
//! check the decoder, and [`harness`] runs seeded Monte-Carlo BER/BLER sweeps.
//!
//! The numeric core is generic over the scalar type through [`Real`]; the
//! aliases below fix it to `f64` (the default used by the harness) or `f32`.

pub mod channel;
pub mod circuit;
mod error;
pub mod harness;
pub mod mlref;
pub mod polar;
pub mod qgated;
pub mod qsim;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type StateVector64 = qsim::StateVector<f64>;
pub type StateVector32 = qsim::StateVector<f32>;
pub type Gate64 = qsim::Gate<f64>;
pub type Gate32 = qsim::Gate<f32>;
pub type Circuit64 = circuit::Circuit<f64>;
pub type Circuit32 = circuit::Circuit<f32>;
pub type SoftVector64 = channel::SoftVector<f64>;
pub type SoftVector32 = channel::SoftVector<f32>;
pub type ProbVector64 = channel::ProbVector<f64>;
pub type ProbVector32 = channel::ProbVector<f32>;
pub type DecodeResult64 = qgated::DecodeResult<f64>;
pub type MlDecision64 = mlref::MlDecision<f64>;
