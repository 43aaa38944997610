//! Wavelet analysis on the Heisenberg group.
//!
//! Group algebra, sampled fields with left-invariant calculus and group
//! convolution, the sub-Laplacian heat kernel, the Mexican-hat wavelet
//! `φ = L h(·,1)`, and the continuous wavelet transform with its Calderón
//! reproducing kernel.

pub mod calculus;
pub mod calderon;
pub mod conv;
pub mod error;
pub mod field;
pub mod grid;
pub mod group;
pub mod heat;
pub mod interp;
pub mod io;
pub mod kernel;
pub mod verify;
pub mod wavelet;

pub use calculus::{apply_vector_field, sub_laplacian, VectorFieldDirection};
pub use conv::{convolve, convolve_direct};
pub use error::{Error, Result};
pub use field::{Normalization, SampledField};
pub use grid::{Axis, GridSpec};
pub use group::{dilate_point, homogeneous_norm, inverse, multiply, GroupPoint, Scale};
pub use heat::HeatKernelEvaluator;
pub use interp::Interpolation;
