//! Summability kernels: Fejér, Poisson and user-supplied step kernels.

use std::sync::Arc;

use super::function::{PiecewiseConstant, SampledFunction};
use super::grid::{wrap_angle, CircleGrid};
use crate::error::{Error, Result};

/// `F_n(θ) = (1/(n+1)) (sin((n+1)θ/2) / sin(θ/2))²`, with `F_n(0) = n + 1`.
pub fn fejer_kernel_eval(n: usize, theta: f64) -> f64 {
    let x = wrap_angle(theta);
    let s = (0.5 * x).sin();
    let np1 = n as f64 + 1.0;
    if s == 0.0 {
        return np1;
    }
    let t = (0.5 * np1 * x).sin() / s;
    t * t / np1
}

/// Coefficient form `1 + 2 Σ_{k=1}^n (1 − k/(n+1)) cos kθ`.
pub fn fejer_kernel_series(n: usize, theta: f64) -> f64 {
    let np1 = n as f64 + 1.0;
    1.0 + 2.0 * (1..=n).map(|k| (1.0 - k as f64 / np1) * (k as f64 * theta).cos()).sum::<f64>()
}

/// `∫_0^θ F_n(φ) dφ = θ + 2 Σ_{k=1}^n (1 − k/(n+1)) sin(kθ)/k` (odd in θ).
pub fn fejer_antiderivative(n: usize, theta: f64) -> f64 {
    let np1 = n as f64 + 1.0;
    // sin(kθ) by the Chebyshev recurrence sin((k+1)θ) = 2cosθ sin(kθ) − sin((k−1)θ).
    let two_cos = 2.0 * theta.cos();
    let (mut prev, mut cur) = (0.0, theta.sin());
    let mut acc = 0.0;
    for k in 1..=n {
        if k % 64 == 0 {
            prev = ((k - 1) as f64 * theta).sin();
            cur = (k as f64 * theta).sin();
        }
        acc += (1.0 - k as f64 / np1) * cur / k as f64;
        let next = two_cos * cur - prev;
        prev = cur;
        cur = next;
    }
    theta + 2.0 * acc
}

/// `P(r, θ) = (1 − r²) / (1 − 2r cos θ + r²)`.
pub fn poisson_kernel(r: f64, theta: f64) -> f64 {
    (1.0 - r * r) / (1.0 - 2.0 * r * theta.cos() + r * r)
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Fejer { n: usize },
    Poisson { r: f64 },
    /// Real step kernel.
    Piecewise(PiecewiseConstant<f64>),
    /// Real samples, read as constant on each cell of their grid.
    Sampled(SampledFunction),
}

impl KernelSpec {
    pub fn fejer(n: usize) -> Self {
        KernelSpec::Fejer { n }
    }

    pub fn poisson(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::invalid("r", format!("Poisson kernel needs 0 <= r < 1, got {r}")));
        }
        Ok(KernelSpec::Poisson { r })
    }

    pub fn sampled(f: SampledFunction) -> Result<Self> {
        if !f.is_real() {
            return Err(Error::invalid("kernel", "sampled kernels must be real"));
        }
        Ok(KernelSpec::Sampled(f))
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            KernelSpec::Fejer { n } => fejer_kernel_eval(*n, theta),
            KernelSpec::Poisson { r } => poisson_kernel(*r, theta),
            KernelSpec::Piecewise(p) => p.value(theta),
            KernelSpec::Sampled(s) => s.samples()[s.grid().cell_containing(theta)].re,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            KernelSpec::Fejer { .. } | KernelSpec::Poisson { .. } => true,
            KernelSpec::Piecewise(p) => p.values().iter().all(|&v| v >= 0.0),
            KernelSpec::Sampled(s) => s.samples().iter().all(|z| z.re >= 0.0),
        }
    }

    /// `K(θ) = K(−θ)`, checked exactly on the representation.
    pub fn is_even(&self) -> bool {
        match self {
            KernelSpec::Fejer { .. } | KernelSpec::Poisson { .. } => true,
            KernelSpec::Piecewise(p) => p.is_even(),
            KernelSpec::Sampled(s) => {
                let g = s.grid();
                g.is_symmetric() && (0..g.len()).all(|i| s.samples()[i] == s.samples()[g.mirror_index(i)])
            }
        }
    }

    pub fn has_finite_samples(&self) -> bool {
        match self {
            KernelSpec::Fejer { .. } => true,
            KernelSpec::Poisson { r } => (0.0..1.0).contains(r),
            KernelSpec::Piecewise(p) => p.values().iter().all(|v| v.is_finite()),
            KernelSpec::Sampled(s) => s.samples().iter().all(|z| z.is_finite()),
        }
    }

    /// `ess sup |K|` where it is known in closed form.
    pub fn sup_norm(&self) -> f64 {
        match self {
            KernelSpec::Fejer { n } => *n as f64 + 1.0,
            KernelSpec::Poisson { r } => (1.0 + r) / (1.0 - r),
            KernelSpec::Piecewise(p) => p.values().iter().fold(0.0, |m, v| m.max(v.abs())),
            KernelSpec::Sampled(s) => s.sup_norm(),
        }
    }

    /// Kernel sample for the node pair `(i, j)`: `K(θ_i − θ_j)`.
    #[inline]
    pub fn sample(&self, grid: &Arc<CircleGrid>, i: usize, j: usize) -> f64 {
        let x = grid.nodes();
        self.eval(x[i] - x[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_examples() {
        assert_eq!(fejer_kernel_eval(1, 0.0), 2.0);
        assert!(fejer_kernel_eval(1, PI).abs() < 1e-30);
        assert!(fejer_kernel_eval(2, 2.0 * PI / 3.0).abs() < 1e-30);
        assert_eq!(fejer_kernel_eval(0, 1.234), 1.0);
    }

    #[test]
    fn closed_form_matches_coefficient_sum() {
        for n in [0usize, 1, 2, 5, 17, 64, 200] {
            for i in 0..=400 {
                let theta = -PI + 2.0 * PI * i as f64 / 400.0;
                let a = fejer_kernel_eval(n, theta);
                let b = fejer_kernel_series(n, theta);
                assert!((a - b).abs() <= 1e-12 * (n as f64 + 1.0), "n={n} θ={theta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn exactly_even_and_nonnegative() {
        for n in [1usize, 3, 40] {
            for i in 1..200 {
                let t = 0.0157 * i as f64;
                let v = fejer_kernel_eval(n, t);
                assert!(v >= 0.0);
                assert_eq!(v, fejer_kernel_eval(n, -t));
            }
        }
    }

    #[test]
    fn localization_bound() {
        // F_n(θ) <= π² / ((n+1) ε²) for |θ| >= ε.
        for n in [4usize, 16, 64, 256] {
            for eps in [0.1, 0.5, 1.0] {
                let bound = PI * PI / ((n as f64 + 1.0) * eps * eps);
                for i in 0..=200 {
                    let t = eps + (PI - eps) * i as f64 / 200.0;
                    assert!(fejer_kernel_eval(n, t) <= bound);
                }
            }
        }
    }

    #[test]
    fn antiderivative_matches_first_order_closed_form() {
        // F_1 = 1 + cos θ.
        for t in [0.1, 0.5, PI / 4.0, 2.0] {
            assert!((fejer_antiderivative(1, t) - (t + t.sin())).abs() < 1e-14);
        }
        assert!((fejer_antiderivative(30, PI) - PI).abs() < 1e-12);
        assert!((fejer_antiderivative(30, -0.3) + fejer_antiderivative(30, 0.3)).abs() < 1e-14);
    }

    #[test]
    fn kernel_spec_validation() {
        assert!(KernelSpec::poisson(1.0).is_err());
        assert!(KernelSpec::poisson(-0.1).is_err());
        let p = KernelSpec::poisson(0.5).unwrap();
        assert!((p.eval(0.0) - 3.0).abs() < 1e-15);
        assert!(p.is_even() && p.is_nonnegative());
    }
}
