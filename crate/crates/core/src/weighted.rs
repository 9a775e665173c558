//! The spiked weight `w`, the spaces `L¹(w)` and `L^∞(w⁻¹)`, and their pairing.
//!
//! `w` equals `√m` on the closed spikes `π/(2m) ≤ |θ| ≤ π/(2m−1)` and 1 on
//! the gaps between them. Only the first `M` spikes are represented; the
//! region `|θ| < π/(2M)` carries the value 1.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::{CircleGrid, PiecewiseConstant, SampledFunction, Scalar, TWO_PI};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    order: usize,
    profile: PiecewiseConstant<f64>,
}

/// Which of the two associate norms to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SpaceTag {
    /// `‖f‖ = ‖f w‖_{L¹}`.
    WeightedL1,
    /// `‖f‖ = ‖f w⁻¹‖_{L^∞}`.
    WeightedLinf,
}

impl SpaceTag {
    /// The associate space of this one.
    pub fn dual(self) -> Self {
        match self {
            SpaceTag::WeightedL1 => SpaceTag::WeightedLinf,
            SpaceTag::WeightedLinf => SpaceTag::WeightedL1,
        }
    }
}

/// Spike `m` of the weight as the closed interval `[π/(2m), π/(2m−1)]`.
pub fn spike(m: usize) -> (f64, f64) {
    (PI / (2 * m) as f64, PI / (2 * m - 1) as f64)
}

/// The weight truncated after `order` spike pairs.
pub fn make_weight(order: usize) -> Result<Weight> {
    if order < 1 {
        return Err(Error::invalid("M", "weight order must be at least 1"));
    }
    let breaks: Vec<f64> = (1..=2 * order).flat_map(|k| [PI / k as f64, -PI / k as f64]).collect();
    let profile = PiecewiseConstant::from_breaks(&breaks, |t| spike_value(order, t))?;
    Ok(Weight { order, profile })
}

fn spike_value(order: usize, theta: f64) -> f64 {
    let a = theta.abs();
    (1..=order)
        .find(|&m| {
            let (lo, hi) = spike(m);
            a >= lo && a <= hi
        })
        .map_or(1.0, |m| (m as f64).sqrt())
}

impl Weight {
    /// `w ≡ 1`; turns the weighted norms into plain `L¹` and `L^∞`.
    pub fn unit() -> Self {
        Weight { order: 0, profile: PiecewiseConstant::constant(1.0) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn profile(&self) -> &PiecewiseConstant<f64> {
        &self.profile
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.profile.value(theta)
    }

    pub fn at_nodes(&self, grid: &CircleGrid) -> Vec<f64> {
        grid.nodes().iter().map(|&x| self.value(x)).collect()
    }

    /// `‖w‖_{L¹}` of the truncated weight, by exact piecewise integration.
    pub fn l1_norm(&self) -> f64 {
        self.profile.mean().re
    }

    /// `ess sup w`.
    pub fn sup(&self) -> f64 {
        (self.order.max(1) as f64).sqrt()
    }

    /// Writes `start,end,value` rows.
    pub fn write_profile_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        #[derive(Serialize)]
        struct Row {
            start: f64,
            end: f64,
            value: f64,
        }
        let mut w = csv::Writer::from_writer(out);
        for (start, end, value) in self.profile.pieces() {
            w.serialize(Row { start, end, value })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Partial sum of the two series for `‖w‖_{L¹}` with a rigorous bound on
/// the remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesBracket {
    pub partial: f64,
    pub tail_bound: f64,
}

impl SeriesBracket {
    pub fn lower(&self) -> f64 {
        self.partial
    }

    pub fn upper(&self) -> f64 {
        self.partial + self.tail_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower() && x <= self.upper()
    }
}

/// `Σ_{m≤M} (1/(2m) − 1/(2m+1)) + Σ_{m≤M} √m (1/(2m−1) − 1/(2m))` and a
/// remainder bound.
///
/// Remainders: the first series telescopes against `(1/2)(1/m − 1/(m+1))`,
/// giving `1/(2(M+1))`; in the second, `√m/(2m(2m−1)) ≤ m^{−3/2}/(2(2 − 1/(M+1)))`
/// for `m > M`, and `Σ_{m>M} m^{−3/2} ≤ 2 M^{−1/2}`.
pub fn weight_l1_norm_series(terms: usize) -> SeriesBracket {
    let terms = terms.max(1);
    // Small terms first.
    let partial: f64 = (1..=terms)
        .rev()
        .map(|m| {
            let mf = m as f64;
            let gap = 1.0 / (2.0 * mf) - 1.0 / (2.0 * mf + 1.0);
            let spike = mf.sqrt() * (1.0 / (2.0 * mf - 1.0) - 1.0 / (2.0 * mf));
            gap + spike
        })
        .sum();
    let mf = terms as f64;
    let tail_bound = 1.0 / (2.0 * (mf + 1.0)) + 2.0 / mf.sqrt() / (2.0 * (2.0 - 1.0 / (mf + 1.0)));
    SeriesBracket { partial, tail_bound }
}

/// Functions that have the two weighted norms.
pub trait WeightedNorm {
    fn weighted_norm(&self, w: &Weight, tag: SpaceTag) -> f64;
}

/// Weighted norm of `f`. Step functions are integrated exactly; sampled
/// functions use the composite midpoint rule of their grid.
pub fn norm<F: WeightedNorm + ?Sized>(f: &F, w: &Weight, tag: SpaceTag) -> f64 {
    f.weighted_norm(w, tag)
}

impl<V: Scalar> WeightedNorm for PiecewiseConstant<V> {
    fn weighted_norm(&self, w: &Weight, tag: SpaceTag) -> f64 {
        let prod = self.zip_with(w.profile(), |f, wv| match tag {
            SpaceTag::WeightedL1 => f.modulus() * wv,
            SpaceTag::WeightedLinf => f.modulus() / wv,
        });
        match tag {
            SpaceTag::WeightedL1 => prod.pieces().map(|(a, b, v)| v * (b - a) / TWO_PI).sum(),
            SpaceTag::WeightedLinf => prod.values().iter().fold(0.0, |m, &v| m.max(v)),
        }
    }
}

impl WeightedNorm for SampledFunction {
    fn weighted_norm(&self, w: &Weight, tag: SpaceTag) -> f64 {
        let grid = self.grid();
        let iter = self.samples().iter().zip(grid.nodes()).zip(grid.quad_weights());
        match tag {
            SpaceTag::WeightedL1 => iter.map(|((z, &x), &q)| z.norm() * w.value(x) * q).sum(),
            SpaceTag::WeightedLinf => iter.map(|((z, &x), _)| z.norm() / w.value(x)).fold(0.0, f64::max),
        }
    }
}

/// Functions that can be integrated against each other.
pub trait Pairing {
    /// `(1/2π) ∫ f g dθ`.
    fn pair(&self, other: &Self) -> Result<Complex64>;
}

impl<V: Scalar> Pairing for PiecewiseConstant<V> {
    fn pair(&self, other: &Self) -> Result<Complex64> {
        let prod = self.zip_with(other, |a, b| a.to_complex() * b.to_complex());
        Ok(prod.mean())
    }
}

impl Pairing for SampledFunction {
    fn pair(&self, other: &Self) -> Result<Complex64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .samples()
            .iter()
            .zip(other.samples())
            .zip(self.grid().quad_weights())
            .map(|((a, b), &q)| a * b * q)
            .sum())
    }
}

/// The pairing `∫ f g dm` together with its Hölder bound
/// `‖f‖_{L¹(w)} ‖g‖_{L^∞(w⁻¹)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderPairing {
    pub value: Complex64,
    pub bound: f64,
}

impl HolderPairing {
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.value.norm() <= self.bound * (1.0 + rel_slack) + f64::MIN_POSITIVE
    }
}

pub fn holder_pairing<F: WeightedNorm + Pairing>(f: &F, g: &F, w: &Weight) -> Result<HolderPairing> {
    Ok(HolderPairing {
        value: f.pair(g)?,
        bound: norm(f, w, SpaceTag::WeightedL1) * norm(g, w, SpaceTag::WeightedLinf),
    })
}
