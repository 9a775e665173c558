//! Function representations on the circle.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{wrap_angle, CircleGrid, TWO_PI};
use crate::error::{Error, Result};

/// Values a piecewise-constant function can take.
pub trait Scalar: Copy + Debug + PartialEq + Send + Sync + 'static {
    fn modulus(self) -> f64;
    fn to_complex(self) -> Complex64;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

/// Anything with Fourier coefficients that can be sampled on a grid.
pub trait CircleFunction {
    /// `f̂(k) = (1/2π) ∫ f(e^{iθ}) e^{−ikθ} dθ`.
    fn fourier_coeff(&self, k: i64) -> Result<Complex64>;

    /// Largest |k| the representation resolves.
    fn fourier_window(&self) -> usize;

    fn sample_on(&self, grid: &Arc<CircleGrid>) -> Result<SampledFunction>;
}

/// `f̂(k)` of a piecewise-constant or sampled function.
pub fn fourier_coeff<F: CircleFunction + ?Sized>(f: &F, k: i64) -> Result<Complex64> {
    f.fourier_coeff(k)
}

/// A step function on the circle.
///
/// `edges` runs from −π to π; `values[j]` holds on `(edges[j], edges[j+1])`.
/// At an interior edge the neighbour with the larger modulus wins, so closed
/// intervals carrying the larger value (spikes of the weight, bumps) are
/// reproduced exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant<V: Scalar = f64> {
    edges: Vec<f64>,
    values: Vec<V>,
}

impl<V: Scalar> PiecewiseConstant<V> {
    pub fn new(edges: Vec<f64>, values: Vec<V>) -> Result<Self> {
        if edges.len() < 2 || values.len() + 1 != edges.len() {
            return Err(Error::invalid("edges", "need one more edge than values"));
        }
        if edges[0] != -PI || *edges.last().unwrap() != PI {
            return Err(Error::invalid("edges", "must start at -π and end at π"));
        }
        if !edges.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("edges", "must be strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite_value()) {
            return Err(Error::invalid("values", format!("non-finite value {v:?}")));
        }
        Ok(Self { edges, values })
    }

    /// Builds a step function with the given interior breaks; the value on
    /// each piece is `value_at(midpoint)`.
    pub fn from_breaks(breaks: &[f64], value_at: impl Fn(f64) -> V) -> Result<Self> {
        let mut edges = vec![-PI];
        let mut inner: Vec<f64> = breaks
            .iter()
            .map(|&b| wrap_angle(b))
            .filter(|&b| b > -PI && b < PI)
            .collect();
        inner.sort_by(|a, b| a.total_cmp(b));
        inner.dedup();
        edges.extend(inner);
        edges.push(PI);
        let values = edges.windows(2).map(|w| value_at(0.5 * (w[0] + w[1]))).collect();
        Self::new(edges, values)
    }

    pub fn constant(c: V) -> Self {
        Self { edges: vec![-PI, PI], values: vec![c] }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    /// Interior breakpoints.
    pub fn breaks(&self) -> &[f64] {
        &self.edges[1..self.edges.len() - 1]
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, V)> + '_ {
        self.edges.windows(2).zip(&self.values).map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn value(&self, theta: f64) -> V {
        let t = wrap_angle(theta);
        let n = self.values.len();
        let larger = |a: V, b: V| if b.modulus() > a.modulus() { b } else { a };
        if t == PI {
            return larger(self.values[n - 1], self.values[0]);
        }
        let idx = self.edges.partition_point(|&e| e < t);
        if self.edges[idx] == t {
            // idx is interior here: t > -π and t < π
            return larger(self.values[idx - 1], self.values[idx]);
        }
        self.values[idx - 1]
    }

    pub fn map<W: Scalar>(&self, f: impl Fn(V) -> W) -> PiecewiseConstant<W> {
        PiecewiseConstant { edges: self.edges.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Common refinement of two step functions, combining values piecewise.
    pub fn zip_with<U: Scalar, W: Scalar>(
        &self,
        other: &PiecewiseConstant<U>,
        f: impl Fn(V, U) -> W,
    ) -> PiecewiseConstant<W> {
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let mut values = Vec::with_capacity(edges.capacity());
        let (mut i, mut j) = (0, 0);
        edges.push(-PI);
        while i < self.values.len() && j < other.values.len() {
            let end = self.edges[i + 1].min(other.edges[j + 1]);
            values.push(f(self.values[i], other.values[j]));
            edges.push(end);
            if self.edges[i + 1] == end {
                i += 1;
            }
            if other.edges[j + 1] == end {
                j += 1;
            }
        }
        PiecewiseConstant { edges, values }
    }

    /// `(1/2π) ∫ f dθ`, exact.
    pub fn mean(&self) -> Complex64 {
        self.pieces().map(|(a, b, v)| v.to_complex() * ((b - a) / TWO_PI)).sum()
    }

    pub fn is_even(&self) -> bool {
        let n = self.values.len();
        (0..=n).all(|i| self.edges[i] == -self.edges[n - i]) && (0..n).all(|i| self.values[i] == self.values[n - 1 - i])
    }

    pub fn to_complex(&self) -> PiecewiseConstant<Complex64> {
        self.map(Scalar::to_complex)
    }
}

impl PiecewiseConstant<f64> {
    /// Indicator of the closed arc from `a` to `b` (counter-clockwise, −π ≤ a < b ≤ π).
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(a >= -PI && a < b && b <= PI) {
            return Err(Error::invalid("arc", format!("need -π <= a < b <= π, got [{a}, {b}]")));
        }
        Self::from_breaks(&[a, b], |t| if t > a && t < b { 1.0 } else { 0.0 })
    }
}

impl<V: Scalar> CircleFunction for PiecewiseConstant<V> {
    fn fourier_coeff(&self, k: i64) -> Result<Complex64> {
        if k == 0 {
            return Ok(self.mean());
        }
        let kf = k as f64;
        let denom = Complex64::new(0.0, -TWO_PI * kf);
        Ok(self
            .pieces()
            .map(|(a, b, v)| v.to_complex() * (Complex64::cis(-kf * b) - Complex64::cis(-kf * a)) / denom)
            .sum())
    }

    fn fourier_window(&self) -> usize {
        usize::MAX
    }

    fn sample_on(&self, grid: &Arc<CircleGrid>) -> Result<SampledFunction> {
        Ok(SampledFunction {
            grid: Arc::clone(grid),
            samples: grid.nodes().iter().map(|&x| self.value(x).to_complex()).collect(),
        })
    }
}

/// Complex samples at the nodes of a grid. Each sample stands for its cell
/// in every quadrature (composite midpoint rule).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<CircleGrid>,
    samples: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<CircleGrid>, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::invalid(
                "samples",
                format!("expected {} samples, got {}", grid.len(), samples.len()),
            ));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: &Arc<CircleGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid: Arc::clone(grid), samples }
    }

    pub fn from_real_fn(grid: &Arc<CircleGrid>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: &Arc<CircleGrid>) -> Self {
        Self { grid: Arc::clone(grid), samples: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &Arc<CircleGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest |k| allowed by [`CircleFunction::fourier_coeff`]: a quarter of the node count.
    pub fn nyquist_window(&self) -> usize {
        self.samples.len() / 4
    }

    pub fn same_grid(&self, other: &SampledFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { grid: Arc::clone(&self.grid), samples: self.samples.iter().map(|&z| f(z)).collect() }
    }

    /// `self + scale · other` on a shared grid.
    pub fn add_scaled(&self, scale: Complex64, other: &SampledFunction) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + scale * b).collect();
        Ok(Self { grid: Arc::clone(&self.grid), samples })
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|z| z.im == 0.0)
    }

    /// Quadrature of `(1/2π) ∫ |f| dθ`.
    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().zip(self.grid.quad_weights()).map(|(z, q)| z.norm() * q).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.samples.iter().zip(self.grid.quad_weights()).map(|(z, q)| z.norm_sqr() * q).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl CircleFunction for SampledFunction {
    fn fourier_coeff(&self, k: i64) -> Result<Complex64> {
        let window = self.nyquist_window();
        if k.unsigned_abs() as usize > window {
            return Err(Error::OutsideWindow { k, window });
        }
        let kf = k as f64;
        Ok(self
            .samples
            .iter()
            .zip(self.grid.nodes())
            .zip(self.grid.quad_weights())
            .map(|((z, &x), &q)| z * Complex64::cis(-kf * x) * q)
            .sum())
    }

    fn fourier_window(&self) -> usize {
        self.nyquist_window()
    }

    fn sample_on(&self, grid: &Arc<CircleGrid>) -> Result<SampledFunction> {
        if Arc::ptr_eq(&self.grid, grid) || *self.grid == **grid {
            Ok(self.clone())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::grid::make_grid;

    #[test]
    fn closed_spike_wins_at_shared_endpoints() {
        let f = PiecewiseConstant::from_breaks(&[0.5, 1.0], |t| if t > 0.5 && t < 1.0 { 3.0 } else { 1.0 }).unwrap();
        assert_eq!(f.value(0.5), 3.0);
        assert_eq!(f.value(1.0), 3.0);
        assert_eq!(f.value(0.75), 3.0);
        assert_eq!(f.value(1.2), 1.0);
        assert_eq!(f.value(0.75 + TWO_PI), 3.0);
    }

    #[test]
    fn arc_indicator_coefficients() {
        let a = 1.3;
        let f = PiecewiseConstant::indicator(0.0, a).unwrap();
        let c0 = f.fourier_coeff(0).unwrap();
        assert!((c0.re - a / TWO_PI).abs() < 1e-15 && c0.im == 0.0);
        for k in [-5i64, -1, 1, 2, 7] {
            let kf = k as f64;
            let expect = (Complex64::new(1.0, 0.0) - Complex64::cis(-kf * a)) / Complex64::new(0.0, TWO_PI * kf);
            assert!((f.fourier_coeff(k).unwrap() - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn quadrature_converges_to_closed_form() {
        let a = PI / 3.0;
        let f = PiecewiseConstant::indicator(0.0, a).unwrap();
        let err = |ppi: usize, k: i64| {
            let grid = Arc::new(CircleGrid::builder(3).points_per_interval(ppi).breakpoint(a).build().unwrap());
            let s = f.sample_on(&grid).unwrap();
            (f.fourier_coeff(k).unwrap() - s.fourier_coeff(k).unwrap()).norm()
        };
        for k in 1..=8i64 {
            let (coarse, fine) = (err(16, k), err(32, k));
            assert!(coarse <= 5e-3 * f.fourier_coeff(k).unwrap().norm().max(2e-2), "k={k}: {coarse:e}");
            assert!(coarse / fine > 3.5, "k={k}: {coarse:e} -> {fine:e}");
        }
    }

    #[test]
    fn monomial_coefficients_are_orthonormal() {
        let grid = Arc::new(make_grid(4, 16).unwrap());
        let f = SampledFunction::from_fn(&grid, |t| Complex64::cis(3.0 * t));
        // midpoint quadrature on nonuniform cells; accuracy ~h^2
        for k in -4..=4i64 {
            let c = f.fourier_coeff(k).unwrap();
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert!((c - expect).norm() < 5e-3, "k={k}: {c}");
        }
        assert!(matches!(f.fourier_coeff(10_000), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn zip_refines_both() {
        let f = PiecewiseConstant::indicator(-1.0, 1.0).unwrap();
        let g = PiecewiseConstant::indicator(0.0, 2.0).unwrap();
        let h = f.zip_with(&g, |a, b| a * b);
        assert_eq!(h.value(0.5), 1.0);
        assert_eq!(h.value(-0.5), 0.0);
        assert_eq!(h.value(1.5), 0.0);
        assert!((h.mean().re - 1.0 / TWO_PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed() {
        assert!(PiecewiseConstant::new(vec![-PI, 0.0], vec![1.0]).is_err());
        assert!(PiecewiseConstant::new(vec![-PI, 0.0, PI], vec![1.0]).is_err());
        assert!(PiecewiseConstant::new(vec![-PI, PI], vec![f64::NAN]).is_err());
        assert!(PiecewiseConstant::indicator(1.0, 0.5).is_err());
    }
}
