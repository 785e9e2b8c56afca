//! Taylor-series reformulation of Poincaré-ball hyperbolic network
//! operations.
//!
//! The crate replaces the hyperbolic trigonometric functions inside
//! gyrovector operations with truncated polynomial series of tunable
//! term count `n`, turning each operation into a Euclidean one scaled
//! by polynomial weights. It ships:
//!
//! - [`series`]: the tanh/artanh/arcosh kernels, Bernoulli-number
//!   coefficients, and the relative-error estimator η;
//! - [`gyro`]: Möbius addition, series-scaled maps/distances, and exact
//!   closed-form oracles for validation;
//! - [`autodiff`]: a minimal tape-based reverse-mode gradient engine;
//! - [`layers`]: series-scaled neural layers (activation, linear, GRU
//!   cell, graph convolution, attention) with fused variants;
//! - [`graph`] and [`train`]: synthetic/citation graph datasets,
//!   optimizers, losses, metrics, and desk-scale training loops;
//! - [`bench`]: a latency microbenchmark harness for the kernels.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`];
//! `f64` is the reference precision and the aliases below pin it.

pub mod autodiff;
pub mod bench;
pub mod error;
pub mod graph;
pub mod gyro;
pub mod layers;
pub mod report;
pub mod scalar;
pub mod series;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Real;

/// Reference-precision tensor.
pub type Tensor64 = tensor::Tensor<f64>;
/// Reference-precision series configuration.
pub type PtseConfig64 = series::PtseConfig<f64>;
/// Single-precision tensor, for the optional 32-bit mode.
pub type Tensor32 = tensor::Tensor<f32>;
