//! Geometry and information-theoretic tooling for MIMO channels whose
//! receiver combines antenna outputs with an analog network and then
//! quantizes them with one-bit threshold comparators.
//!
//! Every threshold quantizer cuts the transmit space with an affine
//! hyperplane, so the noiseless receiver output identifies a cell of a
//! hyperplane arrangement. The crate is organised around that picture:
//!
//! - [`geometry`]: arrangements, general-position checks, cell enumeration
//!   and max-margin cell centers.
//! - [`counting`]: closed-form region counts (general, central, parallel
//!   classes).
//! - [`packing`]: unit-sphere packings inside a ball that are separable by
//!   an arrangement, with a grid/clique oracle for small planar instances.
//! - [`configs`]: receiver configurations (antenna selection, sign
//!   quantization, SVD grid, general position) and the arrangement they
//!   induce in transmit space.
//! - [`bounds`]: closed-form capacity bounds, waterfilling and the
//!   packing-based upper bound.
//! - [`simulate`]: random channels, quantized channel laws, mutual
//!   information and achievable-rate sweeps.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is on
//! (default); every entry point also has a sequential path selected by
//! [`Exec`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod configs;
pub mod counting;
mod error;
mod exec;
pub mod geometry;
mod lp;
pub mod packing;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use exec::Exec;
