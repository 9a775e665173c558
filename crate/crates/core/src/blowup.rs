//! Growth of `‖C_{F_n}‖` on `L^∞(w⁻¹)` and `L¹(w)`.
//!
//! Fix a spike index `m` and the window `a = π/(2m)²`. Once `n` is large
//! enough that `∫_{−a}^{0} F_n ≥ 1/3`, and `δ_n` is small enough that
//! `∫_{−a}^{−δ_n} F_n ≥ 1/4`, convolving the bump `v_m` with `F_n` yields at
//! least `√m/(8π)` on `[π/(2m) − δ_n, π/(2m)]`, where the weight is 1. Since
//! `‖v_m‖_{L^∞(w⁻¹)} = 1`, the operator norm is at least `√m/(8π)` too.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{fejer_antiderivative, fejer_kernel_eval, CircleGrid, KernelSpec, PiecewiseConstant};
use crate::error::{Error, Result};
use crate::operator::{operator_norm, OperatorMatrix};
use crate::weighted::{norm, spike, SpaceTag, Weight};

/// Threshold on `∫_{−a}^{0} F_n` that fixes `n(m)`.
pub const HALF_MASS_THRESHOLD: f64 = 1.0 / 3.0;
/// Threshold on `∫_{−a}^{−δ} F_n` that fixes `δ_n`.
pub const TAIL_MASS_THRESHOLD: f64 = 1.0 / 4.0;
/// `δ_n` is picked from `a·j/2^10`, j = 1..2^10.
const DELTA_LATTICE: usize = 1024;
/// Largest allowed disagreement between the series and quadrature routes.
const CERTIFICATE_TOL: f64 = 1e-10;
pub const DEFAULT_N_MAX: usize = 1 << 20;

/// The one-sided spike `v_m = √m · 1_{[π/(2m), π/(2m−1)]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    m: usize,
    profile: PiecewiseConstant<f64>,
}

impl Bump {
    pub fn new(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::invalid("m", "spike index starts at 1"));
        }
        let (a, b) = spike(m);
        let height = (m as f64).sqrt();
        let profile = PiecewiseConstant::from_breaks(&[a, b], |t| if t > a && t < b { height } else { 0.0 })?;
        Ok(Self { m, profile })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn profile(&self) -> &PiecewiseConstant<f64> {
        &self.profile
    }

    pub fn support(&self) -> (f64, f64) {
        spike(self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationParams {
    pub m: usize,
    pub n_of_m: usize,
    pub delta_n: f64,
    /// `π/(2m)²`.
    pub window: f64,
    /// `∫_{−window}^{0} F_n`.
    pub half_mass: f64,
    /// `∫_{−window}^{−δ_n} F_n`.
    pub tail_mass: f64,
}

/// `∫_lo^hi F_n` by the closed-form antiderivative.
fn fejer_mass(n: usize, lo: f64, hi: f64) -> f64 {
    fejer_antiderivative(n, hi) - fejer_antiderivative(n, lo)
}

/// `∫_lo^hi F_n` by composite 20-point Gauss–Legendre on the closed-form kernel,
/// with panels no wider than a quarter period of `F_n`.
pub fn fejer_mass_quadrature(n: usize, lo: f64, hi: f64) -> f64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(20).unwrap());
    let width = PI / (2.0 * (n as f64 + 1.0));
    let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let a = lo + p as f64 * h;
            gl.integrate(a, a + h, |t| fejer_kernel_eval(n, t))
        })
        .sum()
}

fn certified(n: usize, lo: f64, hi: f64, threshold: f64) -> Option<f64> {
    let series = fejer_mass(n, lo, hi);
    if series < threshold {
        return None;
    }
    let quad = fejer_mass_quadrature(n, lo, hi);
    (quad >= threshold && (quad - series).abs() <= CERTIFICATE_TOL * series.abs().max(1.0)).then_some(series)
}

/// Smallest `n ≥ 1` meeting the 1/3 condition, and the largest lattice `δ_n`
/// meeting the 1/4 condition for that `n`.
pub fn localization_params(m: usize, n_max: usize) -> Result<LocalizationParams> {
    if m < 1 {
        return Err(Error::invalid("m", "spike index starts at 1"));
    }
    let window = PI / ((2 * m) * (2 * m)) as f64;
    let (n_of_m, half_mass) = (1..=n_max)
        .find_map(|n| certified(n, -window, 0.0, HALF_MASS_THRESHOLD).map(|mass| (n, mass)))
        .ok_or(Error::NoQualifyingN { m, n_max })?;

    // The tail mass decreases in δ; scan the lattice from the top.
    let (delta_n, tail_mass) = (1..DELTA_LATTICE)
        .rev()
        .map(|j| window * j as f64 / DELTA_LATTICE as f64)
        .find_map(|delta| certified(n_of_m, -window, -delta, TAIL_MASS_THRESHOLD).map(|mass| (delta, mass)))
        .ok_or(Error::NoQualifyingN { m, n_max })?;

    Ok(LocalizationParams { m, n_of_m, delta_n, window, half_mass, tail_mass })
}

/// Whether the 1/3 condition holds at `n` for spike `m`.
pub fn half_mass_condition(m: usize, n: usize) -> bool {
    let window = PI / ((2 * m) * (2 * m)) as f64;
    fejer_mass(n, -window, 0.0) >= HALF_MASS_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupRow {
    pub m: usize,
    pub n_m: usize,
    pub delta_n: f64,
    /// `√m/(8π)`.
    pub bound: f64,
    /// `min (C_{F_n} v_m)(ϑ)` over nodes in `[π/(2m) − δ_n, π/(2m)]`.
    pub pointwise_min: f64,
    pub norm_linfw: f64,
    pub norm_l1w: f64,
    /// `‖F_n‖_∞ ‖w‖_{L¹} ‖w⁻¹‖_∞` in the normalized measure.
    #[serde(skip)]
    pub upper_bound: f64,
}

impl BlowupRow {
    pub fn pointwise_ok(&self) -> bool {
        self.pointwise_min >= self.bound
    }

    pub fn norm_ok(&self) -> bool {
        self.norm_linfw >= self.bound
    }

    pub fn upper_ok(&self) -> bool {
        self.norm_l1w <= self.upper_bound
    }

    pub fn holds(&self) -> bool {
        self.pointwise_ok() && self.norm_ok() && self.upper_ok()
    }
}

/// Grid for a blow-up run: weight order `order`, `ppi` cells per interval,
/// refined to resolve `F_{n(m)}` for the largest `m` requested, with an extra
/// breakpoint at the left end of every localization window.
pub fn blowup_grid(m_list: &[usize], order: usize, ppi: usize) -> Result<CircleGrid> {
    let m_max = m_list.iter().copied().max().unwrap_or(1);
    let n = localization_params(m_max, DEFAULT_N_MAX)?.n_of_m;
    let window_ends = m_list.iter().map(|&m| spike(m.max(1)).0 - PI / ((2 * m) * (2 * m)).max(1) as f64);
    CircleGrid::builder(order).points_per_interval(ppi).resolve_fejer(n).breakpoints(window_ends).build()
}

pub fn fejer_blowup(m_list: &[usize], w: &Weight, grid: &Arc<CircleGrid>) -> Result<Vec<BlowupRow>> {
    fejer_blowup_with_limit(m_list, w, grid, DEFAULT_N_MAX)
}

pub fn fejer_blowup_with_limit(
    m_list: &[usize],
    w: &Weight,
    grid: &Arc<CircleGrid>,
    n_max: usize,
) -> Result<Vec<BlowupRow>> {
    let m_max = m_list.iter().copied().max().unwrap_or(0);
    if w.order() < m_max {
        return Err(Error::invalid("w", format!("weight order {} below largest m {m_max}", w.order())));
    }
    grid.refines(w.profile().breaks())?;
    let wn = w.at_nodes(grid);
    let q = grid.quad_weights();
    let nodes = grid.nodes();

    m_list
        .iter()
        .map(|&m| {
            let params = localization_params(m, n_max)?;
            let n = params.n_of_m;
            let left = spike(m).0;
            let h = grid.max_cell_in(left - params.window, left + params.window);
            if params.window < 4.0 * h {
                return Err(Error::GridTooCoarse(format!(
                    "m = {m}: window π/(2m)² = {:.3e} spans fewer than 4 cells of length {h:.3e}",
                    params.window
                )));
            }
            let probe = grid.nodes_in(left - params.delta_n, left);
            if probe.is_empty() {
                return Err(Error::GridTooCoarse(format!("m = {m}: no node in [π/(2m) − δ_n, π/(2m)]")));
            }

            let bump = Bump::new(m)?;
            let (a, b) = bump.support();
            let support = grid.nodes_in(a, b);
            let height = (m as f64).sqrt();
            let pointwise_min = probe
                .into_par_iter()
                .map(|i| support.clone().map(|j| fejer_kernel_eval(n, nodes[i] - nodes[j]) * height * q[j]).sum::<f64>())
                .reduce(|| f64::INFINITY, f64::min);

            let op = OperatorMatrix::streamed(&KernelSpec::fejer(n), grid)?;
            let norm_linfw = operator_norm(&op, w, SpaceTag::WeightedLinf).value;
            let norm_l1w = operator_norm(&op, w, SpaceTag::WeightedL1).value;
            debug_assert!(wn.iter().all(|&x| x >= 1.0));
            let w_inv_sup = 1.0;
            let upper_bound = (n as f64 + 1.0) * norm(&PiecewiseConstant::constant(1.0), w, SpaceTag::WeightedL1) * w_inv_sup;

            Ok(BlowupRow {
                m,
                n_m: n,
                delta_n: params.delta_n,
                bound: height / (8.0 * PI),
                pointwise_min,
                norm_linfw,
                norm_l1w,
                upper_bound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{make_grid, CircleFunction};
    use crate::weighted::make_weight;

    #[test]
    fn bump_has_unit_dual_norm() {
        let w = make_weight(9).unwrap();
        for m in 1..=9 {
            let v = Bump::new(m).unwrap();
            assert_eq!(norm(v.profile(), &w, SpaceTag::WeightedLinf), 1.0);
        }
        assert!(Bump::new(0).is_err());
    }

    #[test]
    fn m1_uses_first_order_kernel() {
        let p = localization_params(1, 100).unwrap();
        assert_eq!(p.n_of_m, 1);
        // F_1 = 1 + cos θ
        let expect = PI / 4.0 + (PI / 4.0).sin();
        assert!((p.half_mass - expect).abs() < 1e-14);
        assert!(p.tail_mass >= 0.25);
        assert!(p.delta_n > 0.0 && p.delta_n < p.window);
    }

    #[test]
    fn condition_persists_for_larger_n() {
        for m in [1usize, 2, 4, 7] {
            let p = localization_params(m, 100_000).unwrap();
            for n in (p.n_of_m..p.n_of_m + 200).chain([4 * p.n_of_m, 10 * p.n_of_m, 50 * p.n_of_m]) {
                assert!(half_mass_condition(m, n), "m={m} n={n}");
            }
            if p.n_of_m > 1 {
                assert!(!half_mass_condition(m, p.n_of_m - 1));
            }
        }
    }

    #[test]
    fn m4_certified_by_finer_quadrature() {
        let p = localization_params(4, 10_000).unwrap();
        assert!(p.n_of_m >= 1);
        // Oracle at ten times the panel count.
        let n = p.n_of_m;
        let gl = GaussLegendre::new(NonZeroUsize::new(20).unwrap());
        let panels = 10 * (((p.window) / (PI / (2.0 * (n as f64 + 1.0)))).ceil() as usize).max(1);
        let h = p.window / panels as f64;
        let fine: f64 = (0..panels).map(|k| gl.integrate(-p.window + k as f64 * h, -p.window + (k + 1) as f64 * h, |t| fejer_kernel_eval(n, t))).sum();
        assert!((fine - p.half_mass).abs() < 1e-8);
        assert!(fine >= HALF_MASS_THRESHOLD);
    }

    #[test]
    fn no_qualifying_n_is_reported() {
        assert_eq!(localization_params(30, 5), Err(Error::NoQualifyingN { m: 30, n_max: 5 }));
    }

    #[test]
    fn bound_for_m16() {
        let b = (16f64).sqrt() / (8.0 * PI);
        assert!((b - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((b - 0.15915).abs() < 1e-5);
    }

    #[test]
    fn small_blowup_table() {
        let w = make_weight(4).unwrap();
        let grid = Arc::new(blowup_grid(&[1, 2, 4], 4, 8).unwrap());
        let rows = fejer_blowup(&[1, 2, 4], &w, &grid).unwrap();
        for r in &rows {
            assert!(r.holds(), "{r:?}");
            assert!((r.norm_l1w - r.norm_linfw).abs() <= 1e-10 * r.norm_l1w);
        }
        assert!(rows.windows(2).all(|p| p[1].norm_linfw >= p[0].norm_linfw));
        assert!(rows[2].norm_linfw > rows[0].norm_linfw);
    }

    #[test]
    fn pointwise_values_match_operator_action() {
        let w = make_weight(3).unwrap();
        let grid = Arc::new(blowup_grid(&[3], 3, 8).unwrap());
        let p = localization_params(3, 1000).unwrap();
        let v = Bump::new(3).unwrap().profile().sample_on(&grid).unwrap();
        let cv = OperatorMatrix::streamed(&KernelSpec::fejer(p.n_of_m), &grid).unwrap().apply(&v).unwrap();
        let left = spike(3).0;
        let min = grid.nodes_in(left - p.delta_n, left).map(|i| cv.samples()[i].re).fold(f64::INFINITY, f64::min);
        let rows = fejer_blowup(&[3], &w, &grid).unwrap();
        assert!((rows[0].pointwise_min - min).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let w = make_weight(2).unwrap();
        let grid = Arc::new(make_grid(2, 2).unwrap());
        assert!(fejer_blowup(&[3], &w, &grid).is_err());
        let coarse = Arc::new(make_grid(8, 2).unwrap());
        let w8 = make_weight(8).unwrap();
        assert!(matches!(fejer_blowup(&[8], &w8, &coarse), Err(Error::GridTooCoarse(_))));
        let unaligned = Arc::new(make_grid(1, 7).unwrap());
        assert!(matches!(fejer_blowup(&[2], &w, &unaligned), Err(Error::MissingBreakpoint { .. })));
    }
}
