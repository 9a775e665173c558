//! Grids, function representations, Fourier coefficients, kernels and
//! convolution on the unit circle.

mod convolve;
mod fourier;
mod function;
mod grid;
mod kernel;

pub use convolve::convolve_direct;
pub use fourier::{fejer_mean, poisson_extend, FourierCoefficients};
pub use function::{fourier_coeff, CircleFunction, PiecewiseConstant, SampledFunction, Scalar};
pub use grid::{make_grid, wrap_angle, CircleGrid, GridBuilder, TWO_PI};
pub use kernel::{fejer_antiderivative, fejer_kernel_eval, fejer_kernel_series, poisson_kernel, KernelSpec};
