//! Weighted `L¹` polynomial fitting by iteratively reweighted least squares.
//!
//! The objective `Σ_i |f_i − q(θ_i)| w_i q_i` is replaced by its Huber
//! smoothing at scale `ε`. Each step solves the weighted least-squares
//! problem whose quadratic majorizes the smoothed objective at the current
//! residual, so the smoothed objective cannot increase.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::PolyCoeffs;
use crate::circle::SampledFunction;
use crate::error::{Error, Result};
use crate::weighted::Weight;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsConfig {
    pub max_iters: usize,
    /// Residual floor `ε` in the reweighting.
    pub smoothing: f64,
    /// Stop once the smoothed objective drops by less than this fraction.
    pub tol: f64,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        Self { max_iters: 200, smoothing: 1e-8, tol: 1e-10 }
    }
}

impl IrlsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be positive"));
        }
        if !(self.smoothing > 0.0) {
            return Err(Error::invalid("smoothing", "must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IrlsStatus {
    Converged,
    /// A step failed to decrease the smoothed objective (round-off); the
    /// best iterate so far is returned.
    Stalled,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub poly: PolyCoeffs,
    /// True weighted `L¹` error of `poly`.
    pub error: f64,
    pub status: IrlsStatus,
    pub iterations: usize,
    /// Smoothed objective after each accepted iterate, starting point first.
    pub smoothed: Vec<f64>,
}

pub fn best_poly_l1w(f: &SampledFunction, w: &Weight, degree: usize, cfg: &IrlsConfig) -> Result<PolyFit> {
    best_poly_l1w_from(f, w, degree, cfg, &[])
}

/// Like [`best_poly_l1w`], also considering `starts` as initial points. The
/// returned error never exceeds the error of any start.
pub fn best_poly_l1w_from(
    f: &SampledFunction,
    w: &Weight,
    degree: usize,
    cfg: &IrlsConfig,
    starts: &[PolyCoeffs],
) -> Result<PolyFit> {
    cfg.validate()?;
    let grid = f.grid();
    grid.refines(w.profile().breaks())?;
    let omega: Vec<f64> = w.at_nodes(grid).iter().zip(grid.quad_weights()).map(|(a, b)| a * b).collect();
    let v = design(grid.nodes(), degree);
    let target = DVector::from_column_slice(f.samples());
    let eps = cfg.smoothing;

    let residual = |alpha: &DVector<Complex64>| &target - &v * alpha;
    let true_obj = |r: &DVector<Complex64>| r.iter().zip(&omega).map(|(z, o)| z.norm() * o).sum::<f64>();
    let smooth_obj = |r: &DVector<Complex64>| r.iter().zip(&omega).map(|(z, o)| huber(z.norm(), eps) * o).sum::<f64>();

    let mut candidates = vec![weighted_lstsq(&v, &target, &omega)];
    candidates.extend(starts.iter().map(|p| DVector::from_column_slice(p.resized(degree).coeffs())));

    let mut best: Option<(f64, DVector<Complex64>)> = None;
    let mut keep = |alpha: &DVector<Complex64>, e: f64| {
        if best.as_ref().map_or(true, |(b, _)| e < *b) {
            best = Some((e, alpha.clone()));
        }
    };

    let mut r = residual(&candidates[0]);
    let mut s = smooth_obj(&r);
    keep(&candidates[0], true_obj(&r));
    for c in &candidates[1..] {
        let rc = residual(c);
        keep(c, true_obj(&rc));
        let sc = smooth_obj(&rc);
        if sc < s {
            (r, s) = (rc, sc);
        }
    }

    let mut smoothed = vec![s];
    let mut status = IrlsStatus::MaxIterations;
    let mut iterations = 0;
    for it in 1..=cfg.max_iters {
        iterations = it;
        let u: Vec<f64> = r.iter().zip(&omega).map(|(z, o)| o / z.norm().max(eps)).collect();
        let next = weighted_lstsq(&v, &target, &u);
        let rn = residual(&next);
        let sn = smooth_obj(&rn);
        if !(sn <= s) {
            // An increase at round-off level means the minimum was reached.
            status = if sn - s <= 1e-12 * s { IrlsStatus::Converged } else { IrlsStatus::Stalled };
            break;
        }
        keep(&next, true_obj(&rn));
        smoothed.push(sn);
        let drop = s - sn;
        (r, s) = (rn, sn);
        if drop <= cfg.tol * s {
            status = IrlsStatus::Converged;
            break;
        }
    }

    let (error, coeffs) = best.expect("at least one candidate");
    Ok(PolyFit { poly: PolyCoeffs::new(coeffs.iter().copied().collect())?, error, status, iterations, smoothed })
}

/// `|r|` for `|r| ≥ ε`, `r²/(2ε) + ε/2` below.
fn huber(r: f64, eps: f64) -> f64 {
    if r >= eps {
        r
    } else {
        0.5 * (r * r / eps + eps)
    }
}

fn design(nodes: &[f64], degree: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(nodes.len(), degree + 1, |i, k| Complex64::cis(k as f64 * nodes[i]))
}

/// `argmin_α Σ_i u_i |b_i − (Vα)_i|²` by Householder QR, with an SVD
/// fallback for rank-deficient systems.
fn weighted_lstsq(v: &DMatrix<Complex64>, b: &DVector<Complex64>, u: &[f64]) -> DVector<Complex64> {
    let mut a = v.clone();
    let mut rhs = b.clone();
    for (i, &ui) in u.iter().enumerate() {
        let s = Complex64::new(ui.sqrt(), 0.0);
        a.row_mut(i).scale_mut(ui.sqrt());
        rhs[i] *= s;
    }
    let qr = a.clone().qr();
    let y = qr.q().adjoint() * &rhs;
    match qr.r().solve_upper_triangular(&y) {
        Some(x) if x.iter().all(|z| z.is_finite()) => x,
        _ => a.svd(true, true).solve(&rhs, 1e-14).expect("SVD was computed with both factors"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{CircleGrid, FourierCoefficients};
    use crate::weighted::{make_weight, norm, SpaceTag};
    use std::sync::Arc;

    fn setup() -> (Arc<CircleGrid>, Weight) {
        let grid = Arc::new(CircleGrid::builder(4).points_per_interval(6).resolve_fejer(16).build().unwrap());
        (grid, make_weight(4).unwrap())
    }

    #[test]
    fn recovers_exact_polynomials() {
        let (grid, w) = setup();
        let a = [Complex64::new(0.5, -1.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.3), Complex64::new(-1.0, 1.0)];
        let f = FourierCoefficients::analytic(&a).synthesize(&grid);
        let fit = best_poly_l1w(&f, &w, 5, &IrlsConfig::default()).unwrap();
        assert!(fit.error <= 1e-8, "{}", fit.error);
        for (k, c) in fit.poly.coeffs().iter().enumerate() {
            let expect = a.get(k).copied().unwrap_or_default();
            assert!((c - expect).norm() < 1e-6);
        }
    }

    #[test]
    fn smoothed_objective_is_nonincreasing() {
        let (grid, w) = setup();
        let f = SampledFunction::from_fn(&grid, |t| Complex64::new(t.abs().sqrt(), (2.0 * t).sin().signum()));
        let fit = best_poly_l1w(&f, &w, 6, &IrlsConfig::default()).unwrap();
        assert!(fit.smoothed.windows(2).all(|p| p[1] <= p[0]));
        assert!(fit.smoothed.len() > 2);
    }

    #[test]
    fn reported_error_is_the_true_objective() {
        let (grid, w) = setup();
        let f = SampledFunction::from_fn(&grid, |t| Complex64::new(t * t, 0.0));
        let fit = best_poly_l1w(&f, &w, 3, &IrlsConfig::default()).unwrap();
        let q = fit.poly.sample_on(&grid);
        let diff = f.add_scaled(Complex64::new(-1.0, 0.0), &q).unwrap();
        assert!((norm(&diff, &w, SpaceTag::WeightedL1) - fit.error).abs() < 1e-12);
    }

    #[test]
    fn never_worse_than_a_supplied_start() {
        let (grid, w) = setup();
        let f = SampledFunction::from_fn(&grid, |t| Complex64::new(t.cos().powi(3), t.sin()));
        let start = PolyCoeffs::new(vec![Complex64::new(0.1, 0.0), Complex64::new(0.4, 0.2)]).unwrap();
        let cfg = IrlsConfig { max_iters: 1, ..IrlsConfig::default() };
        let fit = best_poly_l1w_from(&f, &w, 2, &cfg, &[start.clone()]).unwrap();
        let q = start.resized(2).sample_on(&grid);
        let start_err = norm(&f.add_scaled(Complex64::new(-1.0, 0.0), &q).unwrap(), &w, SpaceTag::WeightedL1);
        assert!(fit.error <= start_err);
    }

    #[test]
    fn l1_fit_ignores_a_sparse_outlier() {
        // Least squares would be pulled toward the spike; the L¹ fit is not.
        let (grid, w) = setup();
        let mid = grid.len() / 3;
        let mut f = SampledFunction::from_real_fn(&grid, |_| 1.0);
        f.samples_mut()[mid] = Complex64::new(1e3, 0.0);
        let fit = best_poly_l1w(&f, &w, 0, &IrlsConfig::default()).unwrap();
        assert!((fit.poly.coeffs()[0] - 1.0).norm() < 1e-6);
    }

    #[test]
    fn config_validation() {
        let (grid, w) = setup();
        let f = SampledFunction::zeros(&grid);
        for cfg in [
            IrlsConfig { max_iters: 0, ..Default::default() },
            IrlsConfig { smoothing: 0.0, ..Default::default() },
            IrlsConfig { tol: -1.0, ..Default::default() },
        ] {
            assert!(best_poly_l1w(&f, &w, 1, &cfg).is_err());
        }
    }
}
