//! Discretized convolution operators and their exact norms on the two
//! weighted spaces.
//!
//! With nodes `θ_i`, quadrature weights `q_i` and weight values `w_i`, the
//! operator acts as `(Af)_i = Σ_j K(θ_i − θ_j) f_j q_j`. Its norms are the
//! classical weighted column and row sums:
//!
//! * on `L¹(w)`: `max_j (1/w_j) Σ_i |K_ij| w_i q_i`, attained by the scaled
//!   node indicator `e_j / (w_j q_j)`;
//! * on `L^∞(w⁻¹)`: `max_i (1/w_i) Σ_j |K_ij| w_j q_j`, attained by
//!   `f_j = w_j sign(K_ij)`.
//!
//! For an even kernel on a mirror-symmetric grid the matrix is symmetric and
//! the two numbers coincide.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngExt};
use rayon::prelude::*;

use crate::circle::{CircleGrid, KernelSpec, PiecewiseConstant, SampledFunction};
use crate::error::{Error, Result};
use crate::weighted::{SpaceTag, Weight};

/// Grids up to this many nodes get a materialized matrix.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    grid: Arc<CircleGrid>,
    kernel: KernelSpec,
    dense: Option<Vec<f64>>,
}

/// Builds the operator for `kernel` on `grid`, materializing the matrix for
/// small grids and streaming entries otherwise.
pub fn assemble_operator(kernel: &KernelSpec, grid: &Arc<CircleGrid>) -> Result<OperatorMatrix> {
    if grid.len() <= DENSE_LIMIT {
        OperatorMatrix::dense(kernel, grid)
    } else {
        OperatorMatrix::streamed(kernel, grid)
    }
}

impl OperatorMatrix {
    pub fn dense(kernel: &KernelSpec, grid: &Arc<CircleGrid>) -> Result<Self> {
        let n = grid.len();
        let entries: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|ij| kernel.sample(grid, ij / n, ij % n))
            .collect();
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            let (i, j) = (bad / n, bad % n);
            return Err(Error::NonFiniteKernel { angle: grid.nodes()[i] - grid.nodes()[j] });
        }
        Ok(Self { grid: Arc::clone(grid), kernel: kernel.clone(), dense: Some(entries) })
    }

    /// Entries are recomputed on demand; memory stays O(N).
    pub fn streamed(kernel: &KernelSpec, grid: &Arc<CircleGrid>) -> Result<Self> {
        if !kernel.has_finite_samples() {
            return Err(Error::NonFiniteKernel { angle: f64::NAN });
        }
        Ok(Self { grid: Arc::clone(grid), kernel: kernel.clone(), dense: None })
    }

    pub fn grid(&self) -> &Arc<CircleGrid> {
        &self.grid
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(e) => e[i * self.len() + j],
            None => self.kernel.sample(&self.grid, i, j),
        }
    }

    /// `(Af)_i = Σ_j entries[i,j] f_j q_j`.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if !(Arc::ptr_eq(f.grid(), &self.grid) || **f.grid() == *self.grid) {
            return Err(Error::GridMismatch);
        }
        let q = self.grid.quad_weights();
        let fs = f.samples();
        let n = self.len();
        let out: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += fs[j] * (self.entry(i, j) * q[j]);
                }
                acc
            })
            .collect();
        SampledFunction::new(Arc::clone(&self.grid), out)
    }

    /// `(1/w_j) Σ_i |K_ij| w_i q_i` for every column j.
    pub fn weighted_column_sums(&self, w: &[f64]) -> Vec<f64> {
        let q = self.grid.quad_weights();
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|j| {
                let s: f64 = (0..n).map(|i| self.entry(i, j).abs() * w[i] * q[i]).sum();
                s / w[j]
            })
            .collect()
    }

    /// `(1/w_i) Σ_j |K_ij| w_j q_j` for every row i.
    pub fn weighted_row_sums(&self, w: &[f64]) -> Vec<f64> {
        let q = self.grid.quad_weights();
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let s: f64 = (0..n).map(|j| self.entry(i, j).abs() * w[j] * q[j]).sum();
                s / w[i]
            })
            .collect()
    }
}

/// Exact discrete operator norm and an input attaining it.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub value: f64,
    /// Column (L¹) or row (L^∞) index where the maximum sits.
    pub index: usize,
    /// Unit-norm input with `‖A f‖ = value`.
    pub extremal: SampledFunction,
}

fn argmax(values: &[f64]) -> (usize, f64) {
    // First index wins ties.
    values.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
}

pub fn operator_norm(a: &OperatorMatrix, w: &Weight, tag: SpaceTag) -> NormReport {
    let grid = a.grid();
    let wn = w.at_nodes(grid);
    let q = grid.quad_weights();
    match tag {
        SpaceTag::WeightedL1 => {
            let (j, value) = argmax(&a.weighted_column_sums(&wn));
            let mut extremal = SampledFunction::zeros(grid);
            extremal.samples_mut()[j] = Complex64::new(1.0 / (wn[j] * q[j]), 0.0);
            NormReport { value, index: j, extremal }
        }
        SpaceTag::WeightedLinf => {
            let (i, value) = argmax(&a.weighted_row_sums(&wn));
            let samples = (0..grid.len())
                .map(|j| {
                    let s = if a.entry(i, j) < 0.0 { -1.0 } else { 1.0 };
                    Complex64::new(s * wn[j], 0.0)
                })
                .collect();
            let extremal = SampledFunction::new(Arc::clone(grid), samples).expect("one sample per node");
            NormReport { value, index: i, extremal }
        }
    }
}

/// Both operator norms of an even nonnegative kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityGap {
    pub norm_l1w: f64,
    pub norm_linfw: f64,
}

impl DualityGap {
    pub fn gap(&self) -> f64 {
        (self.norm_l1w - self.norm_linfw).abs()
    }

    pub fn relative(&self) -> f64 {
        self.gap() / self.norm_l1w.max(self.norm_linfw)
    }
}

/// Computes `‖C_K‖` on `L¹(w)` (column route) and on `L^∞(w⁻¹)` (row route)
/// independently.
pub fn duality_gap(kernel: &KernelSpec, w: &Weight, grid: &Arc<CircleGrid>) -> Result<DualityGap> {
    if !kernel.is_nonnegative() {
        return Err(Error::KernelHypothesis("kernel takes negative values".into()));
    }
    if !kernel.is_even() {
        return Err(Error::KernelHypothesis("kernel is not even".into()));
    }
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let a = assemble_operator(kernel, grid)?;
    Ok(DualityGap {
        norm_l1w: operator_norm(&a, w, SpaceTag::WeightedL1).value,
        norm_linfw: operator_norm(&a, w, SpaceTag::WeightedLinf).value,
    })
}

/// A random even, nonnegative step kernel with `pieces` pieces on [0, π].
pub fn random_even_kernel<R: Rng + ?Sized>(rng: &mut R, pieces: usize) -> PiecewiseConstant<f64> {
    use std::f64::consts::PI;
    let pieces = pieces.max(1);
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.random_range(0.0..PI)).collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let values: Vec<f64> = (0..cuts.len() + 1).map(|_| rng.random_range(0.0..4.0)).collect();
    let mut breaks: Vec<f64> = cuts.iter().flat_map(|&c| [c, -c]).collect();
    breaks.retain(|&b| b != 0.0);
    let piece_of = |t: f64| cuts.partition_point(|&c| c < t.abs());
    PiecewiseConstant::from_breaks(&breaks, |t| values[piece_of(t)]).expect("finite values")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{convolve_direct, make_grid};
    use crate::weighted::{make_weight, norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_kernel_averages() {
        let grid = Arc::new(make_grid(3, 4).unwrap());
        let a = assemble_operator(&KernelSpec::fejer(0), &grid).unwrap();
        assert!(a.is_dense());
        assert!((0..grid.len()).all(|j| a.entry(3, j) == 1.0));
        let f = SampledFunction::from_real_fn(&grid, |t| t.sin() + 2.0);
        let mean: Complex64 = f.samples().iter().zip(grid.quad_weights()).map(|(z, q)| z * q).sum();
        let g = a.apply(&f).unwrap();
        assert!(g.samples().iter().all(|z| (z - mean).norm() < 1e-14));
    }

    #[test]
    fn fejer_rows_have_unit_mass_and_matrix_is_symmetric() {
        let n = 20;
        let grid = Arc::new(CircleGrid::builder(4).points_per_interval(8).resolve_fejer(n).build().unwrap());
        let a = assemble_operator(&KernelSpec::fejer(n), &grid).unwrap();
        let q = grid.quad_weights();
        for i in (0..grid.len()).step_by(7) {
            let mass: f64 = (0..grid.len()).map(|j| a.entry(i, j) * q[j]).sum();
            assert!((mass - 1.0).abs() < 1e-3, "row {i}: {mass}");
        }
        for i in 0..grid.len() {
            for j in 0..i {
                assert_eq!(a.entry(i, j), a.entry(j, i));
            }
        }
    }

    #[test]
    fn action_reproduces_direct_convolution() {
        let grid = Arc::new(make_grid(3, 6).unwrap());
        let kernel = KernelSpec::fejer(5);
        let f = SampledFunction::from_fn(&grid, |t| Complex64::new(t.cos(), (3.0 * t).sin()));
        let dense = assemble_operator(&kernel, &grid).unwrap().apply(&f).unwrap();
        let streamed = OperatorMatrix::streamed(&kernel, &grid).unwrap().apply(&f).unwrap();
        let direct = convolve_direct(&f, &kernel);
        assert_eq!(dense, direct);
        assert_eq!(streamed, direct);
    }

    #[test]
    fn constant_kernel_norm_is_weight_norm() {
        // Every column sum is ‖w‖ (discrete), maximized where w_j = 1.
        let w = make_weight(3).unwrap();
        let grid = Arc::new(make_grid(3, 4).unwrap());
        let a = assemble_operator(&KernelSpec::fejer(0), &grid).unwrap();
        let r = operator_norm(&a, &w, SpaceTag::WeightedL1);
        assert!((r.value - w.l1_norm()).abs() < 1e-13);
        let g = duality_gap(&KernelSpec::fejer(0), &w, &grid).unwrap();
        assert_eq!(g.gap(), 0.0);
    }

    #[test]
    fn unweighted_fejer_norm_is_one() {
        let grid = Arc::new(CircleGrid::builder(2).points_per_interval(8).resolve_fejer(16).build().unwrap());
        for n in [1usize, 4, 16] {
            let a = assemble_operator(&KernelSpec::fejer(n), &grid).unwrap();
            for tag in [SpaceTag::WeightedL1, SpaceTag::WeightedLinf] {
                let r = operator_norm(&a, &Weight::unit(), tag);
                assert!((r.value - 1.0).abs() < 1e-3, "n={n} {tag:?}: {}", r.value);
            }
        }
    }

    #[test]
    fn extremal_inputs_attain_the_norm() {
        let w = make_weight(4).unwrap();
        let grid = Arc::new(CircleGrid::builder(4).points_per_interval(6).resolve_fejer(9).build().unwrap());
        let a = assemble_operator(&KernelSpec::fejer(9), &grid).unwrap();
        for tag in [SpaceTag::WeightedL1, SpaceTag::WeightedLinf] {
            let r = operator_norm(&a, &w, tag);
            let f = &r.extremal;
            assert!((norm(f, &w, tag) - 1.0).abs() < 1e-12);
            let af = a.apply(f).unwrap();
            assert!((norm(&af, &w, tag) - r.value).abs() <= 1e-12 * r.value, "{tag:?}");
        }
    }

    #[test]
    fn norm_dominates_random_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = make_weight(3).unwrap();
        let grid = Arc::new(CircleGrid::builder(3).points_per_interval(6).resolve_fejer(7).build().unwrap());
        let a = assemble_operator(&KernelSpec::fejer(7), &grid).unwrap();
        for tag in [SpaceTag::WeightedL1, SpaceTag::WeightedLinf] {
            let bound = operator_norm(&a, &w, tag).value;
            for _ in 0..1000 {
                let samples = (0..grid.len())
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let f = SampledFunction::new(Arc::clone(&grid), samples).unwrap();
                let ratio = norm(&a.apply(&f).unwrap(), &w, tag) / norm(&f, &w, tag);
                assert!(ratio <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn duality_rejects_hypothesis_violations() {
        let w = make_weight(2).unwrap();
        let grid = Arc::new(make_grid(2, 4).unwrap());
        let odd = PiecewiseConstant::indicator(0.0, 1.0).unwrap();
        assert!(matches!(duality_gap(&KernelSpec::Piecewise(odd), &w, &grid), Err(Error::KernelHypothesis(_))));
        let neg = PiecewiseConstant::constant(-1.0);
        assert!(matches!(duality_gap(&KernelSpec::Piecewise(neg), &w, &grid), Err(Error::KernelHypothesis(_))));
    }

    #[test]
    fn random_kernels_are_even_and_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for pieces in 1..8 {
            let k = random_even_kernel(&mut rng, pieces);
            assert!(k.is_even());
            assert!(k.values().iter().all(|&v| v >= 0.0));
        }
    }
}
