//! Hardy-class coefficient checks: vanishing negative coefficients, Taylor
//! coefficients of the disk extension, and products of analytic functions.

use num_complex::Complex64;

use crate::circle::{poisson_extend, FourierCoefficients};
use crate::error::{Error, Result};

/// Outcome of a negative-frequency scan.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub tol: f64,
    /// `(k, |f̂(k)|)` for every `k < 0` above `tol`.
    pub violations: Vec<(i64, f64)>,
    pub max_negative: f64,
}

impl HardyReport {
    pub fn is_hardy(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|f̂(k)| ≤ tol` for every negative `k` in the window.
pub fn is_hardy(f: &FourierCoefficients, tol: f64) -> Result<HardyReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    let negatives = f.iter().filter(|&(k, _)| k < 0).map(|(k, c)| (k, c.norm()));
    let mut violations = Vec::new();
    let mut max_negative = 0.0f64;
    for (k, m) in negatives {
        max_negative = max_negative.max(m);
        if m > tol {
            violations.push((k, m));
        }
    }
    Ok(HardyReport { tol, violations, max_negative })
}

fn require_hardy(f: &FourierCoefficients, tol: f64) -> Result<()> {
    match is_hardy(f, tol)?.violations.first() {
        Some(&(index, modulus)) => Err(Error::NotHardy { index, modulus }),
        None => Ok(()),
    }
}

/// Tolerance used to accept inputs as analytic.
pub const HARDY_INPUT_TOL: f64 = 1e-12;

/// The harmonic extension `F(re^{iθ})` of a Hardy-class source, with the
/// Taylor coefficients `a_n` read off from its samples on the circle of
/// radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskExtension {
    source: FourierCoefficients,
    radius: f64,
    taylor: Vec<Complex64>,
    /// Coefficients of `θ ↦ F(re^{iθ})` including negative indices.
    ring: FourierCoefficients,
}

impl DiskExtension {
    pub fn new(source: &FourierCoefficients, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::invalid("r", format!("need 0 < r < 1, got {radius}")));
        }
        require_hardy(source, HARDY_INPUT_TOL)?;
        let window = source.window();
        // Periodic trapezoid on 2K+2+ samples is exact for the degree-K extension.
        let samples = 4 * window + 8;
        let ring = FourierCoefficients::from_periodic_samples(window, samples, |t| {
            poisson_extend(source, radius, t).expect("radius checked above")
        })?;
        let taylor = (0..=window as i64).map(|n| ring.get(n) / radius.powi(n as i32)).collect();
        Ok(Self { source: source.clone(), radius, taylor, ring })
    }

    pub fn source(&self) -> &FourierCoefficients {
        &self.source
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `a_n` for `n = 0..=K`.
    pub fn taylor(&self) -> &[Complex64] {
        &self.taylor
    }

    /// Fourier coefficients of the extension on the circle of radius `r`.
    pub fn ring_coefficients(&self) -> &FourierCoefficients {
        &self.ring
    }

    /// `F(z) = Σ a_n z^n` for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.taylor.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }
}

/// `max_k |ĝ_r(k) − f̂(k) r^k|` over the whole window, where `g_r` is the
/// extension restricted to the circle of radius `r`. Negative `k` compare
/// against zero.
pub fn taylor_fourier_check(f: &FourierCoefficients, r: f64) -> Result<f64> {
    let ext = DiskExtension::new(f, r)?;
    let ring = ext.ring_coefficients();
    Ok(ring
        .iter()
        .map(|(k, c)| {
            let expect = if k < 0 { Complex64::new(0.0, 0.0) } else { f.get(k) * r.powi(k as i32) };
            (c - expect).norm()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    /// Largest `|\widehat{fg}(k)|` over `k < 0`.
    pub max_negative: f64,
    /// `|\widehat{fg}(0) − f̂(0) ĝ(0)|`.
    pub mean_mismatch: f64,
    pub tol: f64,
}

impl ProductReport {
    pub fn holds(&self) -> bool {
        self.max_negative <= self.tol && self.mean_mismatch <= self.tol
    }
}

/// Coefficients of `fg` must vanish at negative indices and have mean
/// `f̂(0) ĝ(0)`.
pub fn product_hardy_check(f: &FourierCoefficients, g: &FourierCoefficients, tol: f64) -> Result<ProductReport> {
    require_hardy(f, tol)?;
    require_hardy(g, tol)?;
    let fg = f.product(g);
    let max_negative = is_hardy(&fg, tol)?.max_negative;
    let mean_mismatch = (fg.get(0) - f.get(0) * g.get(0)).norm();
    Ok(ProductReport { max_negative, mean_mismatch, tol })
}
