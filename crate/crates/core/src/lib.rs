//! Fejér means, weighted `L¹` spaces and convolution operators on the unit
//! circle, computed on finite grids.
//!
//! ```
//! use std::sync::Arc;
//! use fejer_lab::circle::{CircleGrid, KernelSpec};
//! use fejer_lab::operator::duality_gap;
//! use fejer_lab::weighted::make_weight;
//!
//! let w = make_weight(4).unwrap();
//! let grid = Arc::new(CircleGrid::builder(4).points_per_interval(4).resolve_fejer(16).build().unwrap());
//! let gap = duality_gap(&KernelSpec::fejer(16), &w, &grid).unwrap();
//! assert!(gap.relative() < 1e-12);
//! ```
//!
//! The modules build on each other:
//!
//! * [`circle`]: grids, step and sampled functions, Fourier coefficients, kernels;
//! * [`weighted`]: the spiked weight and the norms of `L¹(w)` and `L^∞(w⁻¹)`;
//! * [`operator`]: operator norms of convolution operators;
//! * [`blowup`]: lower bounds for Fejér operator norms;
//! * [`maximal`]: the Hardy–Littlewood maximal function;
//! * [`hardy`]: analytic coefficient windows and disk extensions;
//! * [`approx`]: polynomial approximation, Fejér error curves and the divergence witness.

pub mod approx;
pub mod blowup;
pub mod circle;
pub mod error;
pub mod hardy;
pub mod maximal;
pub mod operator;
pub mod weighted;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/weight.md")]
    mod weight {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/blowup.md")]
    mod blowup {}
    #[doc = include_str!("../../../book/src/maximal.md")]
    mod maximal {}
    #[doc = include_str!("../../../book/src/hardy.md")]
    mod hardy {}
    #[doc = include_str!("../../../book/src/approximation.md")]
    mod approximation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
