use num_complex::Complex64;
use rayon::prelude::*;

use super::function::SampledFunction;
use super::kernel::KernelSpec;

/// `(f*K)(θ_i) ≈ Σ_j K(θ_i − θ_j) f_j q_j`, the composite midpoint rule for
/// `(1/2π) ∫ f(e^{i(θ−φ)}) K(e^{iφ}) dφ` on the grid of `f`.
pub fn convolve_direct(f: &SampledFunction, kernel: &KernelSpec) -> SampledFunction {
    let grid = f.grid();
    let q = grid.quad_weights();
    let fs = f.samples();
    let samples: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..grid.len() {
                acc += fs[j] * (kernel.sample(grid, i, j) * q[j]);
            }
            acc
        })
        .collect();
    SampledFunction::new(grid.clone(), samples).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::fourier::{fejer_mean, FourierCoefficients};
    use crate::circle::function::{CircleFunction, PiecewiseConstant};
    use crate::circle::grid::CircleGrid;
    use std::sync::Arc;

    #[test]
    fn constants_are_fixed_points_to_second_order() {
        let err = |ppi: usize, n: usize| {
            let grid = Arc::new(CircleGrid::builder(3).points_per_interval(ppi).resolve_fejer(12).build().unwrap());
            let f = SampledFunction::from_real_fn(&grid, |_| 2.5);
            let g = convolve_direct(&f, &KernelSpec::fejer(n));
            g.samples().iter().map(|z| (z - 2.5).norm()).fold(0.0, f64::max)
        };
        assert!(err(8, 0) < 1e-13);
        for n in [3usize, 12] {
            let (coarse, fine) = (err(8, n), err(16, n));
            assert!(coarse < 5e-3, "n={n}: {coarse:e}");
            assert!(coarse / fine > 3.0, "n={n}: {coarse:e} -> {fine:e}");
        }
    }

    #[test]
    fn first_harmonic_is_halved_by_f1() {
        let grid = Arc::new(CircleGrid::builder(2).points_per_interval(32).max_cell(0.01).build().unwrap());
        let f = SampledFunction::from_fn(&grid, Complex64::cis);
        let g = convolve_direct(&f, &KernelSpec::fejer(1));
        for (z, &x) in g.samples().iter().zip(grid.nodes()) {
            assert!((z - 0.5 * Complex64::cis(x)).norm() < 1e-4);
        }
    }

    #[test]
    fn step_function_matches_spectral_path() {
        // Oracle: exact coefficients of the step, Fejér-weighted and synthesized.
        let n = 64;
        let step = PiecewiseConstant::indicator(-0.4, 1.1).unwrap();
        let grid = Arc::new(
            CircleGrid::builder(2).points_per_interval(16).breakpoints([-0.4, 1.1]).resolve_fejer(4 * n).build().unwrap(),
        );
        let f = step.sample_on(&grid).unwrap();
        let direct = convolve_direct(&f, &KernelSpec::fejer(n));
        let coeffs = FourierCoefficients::of(&step, n).unwrap();
        let spectral = fejer_mean(&coeffs, n).unwrap().synthesize(&grid);
        let err = direct
            .samples()
            .iter()
            .zip(spectral.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 2e-3, "max deviation {err}");
    }
}
