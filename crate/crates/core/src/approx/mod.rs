//! Polynomial approximation in `L¹(w)` and Fejér-mean error curves.
//!
//! [`best_poly_l1w`] fits analytic polynomials by iteratively reweighted
//! least squares; [`density_curve`] runs it over a list of degrees and
//! compares each fit with the Fejér mean of the same order, which is always
//! a feasible competitor. [`gliding_hump_witness`] goes the other way and
//! builds a function whose Fejér means stay far away along a subsequence.

mod irls;
mod witness;

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{fejer_mean, CircleFunction, CircleGrid, FourierCoefficients, SampledFunction};
use crate::error::{Error, Result};
use crate::hardy::is_hardy;
use crate::weighted::{norm, SpaceTag, Weight};

pub use irls::{best_poly_l1w, best_poly_l1w_from, IrlsConfig, IrlsStatus, PolyFit};
pub use witness::{gliding_hump_witness, WitnessConfig, WitnessReport, WitnessStage};

/// `q(t) = Σ_k α_k t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<Complex64>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("coeffs", "a polynomial needs at least one coefficient"));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); degree + 1] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Same polynomial written with `degree + 1` coefficients (truncating
    /// if `degree` is smaller).
    pub fn resized(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// `q(e^{iθ})`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let t = Complex64::cis(theta);
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * t + a)
    }

    pub fn to_fourier(&self) -> FourierCoefficients {
        FourierCoefficients::analytic(&self.coeffs)
    }

    pub fn sample_on(&self, grid: &Arc<CircleGrid>) -> SampledFunction {
        self.to_fourier().synthesize(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FejerErrorRow {
    pub n: usize,
    pub error: f64,
}

/// `‖f*F_n − f‖` for each `n`, in `L¹(w)` or (with `w = None`) in
/// unweighted `L¹`. The Fejér means are built from the coefficients of `f`
/// and evaluated on `grid`, where the norm is taken by the midpoint rule.
pub fn fejer_error_curve<F: CircleFunction + ?Sized>(
    f: &F,
    grid: &Arc<CircleGrid>,
    w: Option<&Weight>,
    n_list: &[usize],
) -> Result<Vec<FejerErrorRow>> {
    let samples = f.sample_on(grid)?;
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let coeffs = FourierCoefficients::of(f, n_max)?;
    n_list
        .par_iter()
        .map(|&n| {
            let mean = fejer_mean(&coeffs, n)?.synthesize(grid);
            let diff = samples.add_scaled(Complex64::new(-1.0, 0.0), &mean)?;
            let error = match w {
                Some(w) => norm(&diff, w, SpaceTag::WeightedL1),
                None => diff.l1_norm(),
            };
            Ok(FejerErrorRow { n, error })
        })
        .collect()
}

/// Degree, best fit error, and the error of the Fejér mean of that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub degree: usize,
    pub error: f64,
    pub fejer_error: f64,
    pub iterations: usize,
    pub status: IrlsStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub rows: Vec<DensityRow>,
    /// Largest negative-index coefficient of `f` (relative to the largest
    /// nonnegative one) seen by the analyticity check.
    pub negative_mass: f64,
}

impl DensityCurve {
    pub fn is_nonincreasing(&self) -> bool {
        self.rows.windows(2).all(|p| p[1].error <= p[0].error)
    }

    /// `error(last) ≤ factor · error(first) + floor`.
    pub fn shrinks_by(&self, factor: f64, floor: f64) -> bool {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.error <= factor * a.error + floor,
            _ => false,
        }
    }

    pub fn beats_fejer(&self) -> bool {
        self.rows.iter().all(|r| r.error <= r.fejer_error)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        for r in &self.rows {
            wtr.serialize(r)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Relative size of negative coefficients accepted as analytic in
/// [`density_curve`]. Boundary samples of functions with integrable
/// singularities pick up quadrature noise at negative indices.
pub const DENSITY_HARDY_TOL: f64 = 1e-2;

/// Best `L¹(w)` fits for increasing degrees. Each degree is warm-started
/// from the previous fit and from the Fejér mean of that order, so errors
/// are nonincreasing and never worse than the Fejér mean's.
pub fn density_curve(f: &SampledFunction, w: &Weight, degrees: &[usize], cfg: &IrlsConfig) -> Result<DensityCurve> {
    cfg.validate()?;
    let grid = f.grid();
    grid.refines(w.profile().breaks())?;
    let n_max = degrees.iter().copied().max().unwrap_or(0);
    let coeffs = FourierCoefficients::of(f, n_max.max(1))?;
    let scale = (0..=n_max.max(1) as i64).map(|k| coeffs.get(k).norm()).fold(0.0, f64::max);
    let report = is_hardy(&coeffs, DENSITY_HARDY_TOL * scale.max(f64::MIN_POSITIVE))?;
    if let Some(&(index, modulus)) = report.violations.first() {
        return Err(Error::NotHardy { index, modulus });
    }
    let fejer = fejer_error_curve(f, grid, Some(w), degrees)?;

    let mut rows = Vec::with_capacity(degrees.len());
    let mut previous: Option<(PolyCoeffs, f64)> = None;
    for (&degree, fe) in degrees.iter().zip(&fejer) {
        let mean = fejer_mean(&coeffs, degree)?;
        let candidate = PolyCoeffs::new((0..=degree as i64).map(|k| mean.get(k)).collect())?;
        let mut starts = vec![candidate];
        starts.extend(previous.as_ref().map(|(p, _)| p.resized(degree)));
        let fit = best_poly_l1w_from(f, w, degree, cfg, &starts)?;
        // A lower-degree fit is feasible here too; keep it if round-off made
        // the new one look worse.
        let (poly, error) = match previous {
            Some((p, e)) if e <= fit.error && p.degree() <= degree => (p, e),
            _ => (fit.poly, fit.error),
        };
        rows.push(DensityRow {
            degree,
            error,
            fejer_error: fe.error,
            iterations: fit.iterations,
            status: fit.status,
        });
        previous = Some((poly, error));
    }
    Ok(DensityCurve { rows, negative_mass: report.max_negative / scale.max(f64::MIN_POSITIVE) })
}

/// Writes `(n, error)` rows with header `n,error`.
pub fn write_error_curve_csv<W: Write>(rows: &[FejerErrorRow], out: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Exact Taylor coefficients of `(1 − z)^{−1/4}`.
pub fn quarter_root_pole_taylor(terms: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(terms);
    let mut c = 1.0;
    for n in 0..terms {
        if n > 0 {
            c *= (n as f64 - 0.75) / n as f64;
        }
        a.push(c);
    }
    a
}

/// Boundary values of `(1 − z)^{−1/4}` at `z = e^{iθ}`, `θ ≠ 0`.
pub fn quarter_root_pole(theta: f64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - Complex64::cis(theta)).powf(-0.25)
}
