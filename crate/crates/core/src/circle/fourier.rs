//! Finite windows of Fourier coefficients and the spectral side of Fejér
//! summation.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::function::{CircleFunction, SampledFunction};
use super::grid::{CircleGrid, TWO_PI};
use crate::error::{Error, Result};

/// Coefficients `f̂(k)` for `|k| ≤ window`; everything outside the window is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    window: usize,
    coeffs: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn new(window: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * window + 1 {
            return Err(Error::invalid(
                "coeffs",
                format!("window {window} needs {} coefficients, got {}", 2 * window + 1, coeffs.len()),
            ));
        }
        Ok(Self { window, coeffs })
    }

    pub fn zeros(window: usize) -> Self {
        Self { window, coeffs: vec![Complex64::new(0.0, 0.0); 2 * window + 1] }
    }

    pub fn from_fn(window: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let w = window as i64;
        Self { window, coeffs: (-w..=w).map(f).collect() }
    }

    /// `e^{ikθ}` (the function `t^k` on the unit circle).
    pub fn monomial(k: i64) -> Self {
        Self::from_fn(k.unsigned_abs() as usize, |j| if j == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    /// The analytic polynomial `Σ a_n t^n`, n = 0..len−1.
    pub fn analytic(taylor: &[Complex64]) -> Self {
        let window = taylor.len().saturating_sub(1);
        let mut c = Self::zeros(window);
        for (n, &a) in taylor.iter().enumerate() {
            c.coeffs[window + n] = a;
        }
        c
    }

    /// Coefficients of any circle function up to `window`.
    pub fn of<F: CircleFunction + ?Sized>(f: &F, window: usize) -> Result<Self> {
        if window > f.fourier_window() {
            return Err(Error::OutsideWindow { k: window as i64, window: f.fourier_window() });
        }
        let w = window as i64;
        let coeffs = (-w..=w).map(|k| f.fourier_coeff(k)).collect::<Result<Vec<_>>>()?;
        Ok(Self { window, coeffs })
    }

    /// Coefficients of a smooth periodic function from `samples` equispaced
    /// values (periodic trapezoid rule). Exact for trigonometric polynomials
    /// of degree below `samples − window`.
    pub fn from_periodic_samples(window: usize, samples: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if samples <= 2 * window {
            return Err(Error::invalid("samples", format!("need more than {} samples", 2 * window)));
        }
        let h = TWO_PI / samples as f64;
        let values: Vec<Complex64> = (0..samples).map(|j| f(j as f64 * h)).collect();
        let w = window as i64;
        let coeffs = (-w..=w)
            .map(|k| {
                let s: Complex64 =
                    values.iter().enumerate().map(|(j, &v)| v * Complex64::cis(-(k as f64) * j as f64 * h)).sum();
                s / samples as f64
            })
            .collect();
        Ok(Self { window, coeffs })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.window {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(k + self.window as i64) as usize]
    }

    pub fn set(&mut self, k: i64, value: Complex64) -> Result<()> {
        if k.unsigned_abs() as usize > self.window {
            return Err(Error::OutsideWindow { k, window: self.window });
        }
        self.coeffs[(k + self.window as i64) as usize] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let w = self.window as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - w, c))
    }

    /// Whether `f̂(−k) = conj(f̂(k))` for every k in the window.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        (1..=self.window as i64).all(|k| (self.get(-k) - self.get(k).conj()).norm() <= tol)
            && self.get(0).im.abs() <= tol
    }

    /// `Σ_k |f̂(k)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn truncate(&self, window: usize) -> Self {
        let w = window.min(self.window) as i64;
        Self::from_fn(w as usize, |k| self.get(k))
    }

    /// `Σ_k f̂(k) e^{ikθ}`.
    pub fn evaluate(&self, theta: f64) -> Complex64 {
        let w = self.window as i64;
        (-w..=w).map(|k| self.get(k) * Complex64::cis(k as f64 * theta)).sum()
    }

    /// Evaluates the trigonometric polynomial at every node of `grid`.
    pub fn synthesize(&self, grid: &Arc<CircleGrid>) -> SampledFunction {
        let w = self.window as i64;
        let samples: Vec<Complex64> = grid
            .nodes()
            .par_iter()
            .map(|&x| {
                // Powers of e^{iθ}, reseeded every 32 steps to keep the error flat.
                let mut acc = self.get(0);
                let step = Complex64::cis(x);
                let mut p = step;
                for k in 1..=w {
                    if k % 32 == 0 {
                        p = Complex64::cis(k as f64 * x);
                    }
                    acc += self.get(k) * p + self.get(-k) * p.conj();
                    p *= step;
                }
                acc
            })
            .collect();
        SampledFunction::new(Arc::clone(grid), samples).expect("one sample per node")
    }

    /// Coefficients of the pointwise product: the discrete convolution of
    /// the two windows, window `K_f + K_g`.
    pub fn product(&self, other: &Self) -> Self {
        let window = self.window + other.window;
        let mut out = Self::zeros(window);
        for (j, a) in self.iter() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (k, b) in other.iter() {
                out.coeffs[(j + k + window as i64) as usize] += a * b;
            }
        }
        out
    }
}

/// Fejér (Cesàro) mean of order `n`: `f̂(k)(1 − |k|/(n+1))` for `|k| ≤ n`.
pub fn fejer_mean(f: &FourierCoefficients, n: usize) -> Result<FourierCoefficients> {
    if f.window() < n {
        return Err(Error::invalid("n", format!("Fejér order {n} exceeds coefficient window {}", f.window())));
    }
    let scale = 1.0 / (n as f64 + 1.0);
    Ok(FourierCoefficients::from_fn(n, |k| f.get(k) * (1.0 - k.unsigned_abs() as f64 * scale)))
}

/// Harmonic extension to the disk at `r e^{iθ}`: `Σ_k f̂(k) r^{|k|} e^{ikθ}`.
pub fn poisson_extend(f: &FourierCoefficients, r: f64, theta: f64) -> Result<Complex64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::invalid("r", format!("need 0 <= r < 1, got {r}")));
    }
    let w = f.window() as i64;
    let mut acc = f.get(0);
    let mut rk = 1.0;
    for k in 1..=w {
        rk *= r;
        let e = Complex64::cis(k as f64 * theta);
        acc += rk * (f.get(k) * e + f.get(-k) * e.conj());
    }
    Ok(acc)
}
