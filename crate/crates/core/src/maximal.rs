//! Hardy–Littlewood maximal function on the circle by exhaustive arc search.
//!
//! Arcs run between cell edges of the grid and may wrap through ±π. A node
//! belongs to an arc when its cell does. For each starting cell the averages
//! over arcs of 1..N−1 cells are formed incrementally, and a suffix maximum
//! over arc length gives, for every covered offset, the best arc from that
//! start. The whole search is O(N²).

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{CircleFunction, CircleGrid, SampledFunction};
use crate::error::Result;
use crate::weighted::make_weight;

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalProfile {
    grid: Arc<CircleGrid>,
    values: Vec<f64>,
}

impl MaximalProfile {
    pub fn grid(&self) -> &Arc<CircleGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Columns `theta,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["theta", "value"])?;
        for (x, v) in self.grid.nodes().iter().zip(&self.values) {
            wtr.write_record([x.to_string(), v.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// `(Mf)(θ_i)`: the largest average of `|f|` over arcs of whole cells that
/// contain cell `i`, excluding the full circle.
pub fn maximal_function(f: &SampledFunction) -> MaximalProfile {
    let grid = Arc::clone(f.grid());
    let n = grid.len();
    let q = grid.quad_weights();
    let mass: Vec<f64> = f.samples().iter().zip(q).map(|(z, &qi)| z.norm() * qi).collect();

    // best[p][d]: best average over arcs starting at cell p that cover p + d.
    let per_start: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|p| {
            let longest = (n - 1).max(1);
            let mut avg = Vec::with_capacity(longest);
            let (mut m, mut len) = (0.0, 0.0);
            for l in 0..longest {
                let c = (p + l) % n;
                m += mass[c];
                len += q[c];
                avg.push(m / len);
            }
            for d in (0..longest.saturating_sub(1)).rev() {
                avg[d] = avg[d].max(avg[d + 1]);
            }
            avg
        })
        .collect();

    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter_map(|p| per_start[p].get((i + n - p) % n).copied())
                .fold(0.0, f64::max)
        })
        .collect();
    MaximalProfile { grid, values }
}

/// Maximal function of any circle function sampled on `grid`.
pub fn maximal_of<F: CircleFunction + ?Sized>(f: &F, grid: &Arc<CircleGrid>) -> Result<MaximalProfile> {
    Ok(maximal_function(&f.sample_on(grid)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalRatioRow {
    #[serde(rename = "M")]
    pub order: usize,
    /// `sup_i (M w)(θ_i) / w(θ_i)`.
    pub ratio: f64,
    /// Node where the supremum is attained.
    pub theta: f64,
}

/// `sup (M w_M)/w_M` for each truncation order, on grids with `ppi` cells per
/// breakpoint interval.
pub fn weight_maximal_ratio(orders: &[usize], ppi: usize) -> Result<Vec<MaximalRatioRow>> {
    orders
        .iter()
        .map(|&order| {
            let w = make_weight(order)?;
            let grid = Arc::new(CircleGrid::builder(order).points_per_interval(ppi).build()?);
            grid.refines(w.profile().breaks())?;
            let wn = w.at_nodes(&grid);
            let profile = maximal_function(&SampledFunction::from_real_fn(&grid, |t| w.value(t)));
            let (i, ratio) = profile
                .values()
                .iter()
                .zip(&wn)
                .map(|(mv, wv)| mv / wv)
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, r)| if r > best.1 { (i, r) } else { best });
            Ok(MaximalRatioRow { order, ratio, theta: grid.nodes()[i] })
        })
        .collect()
}

/// Columns `M,ratio,theta`.
pub fn write_ratio_csv<W: Write>(rows: &[MaximalRatioRow], out: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{make_grid, PiecewiseConstant};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    /// Enumerates every proper arc and every node it covers.
    fn brute_force(f: &SampledFunction) -> Vec<f64> {
        let grid = f.grid();
        let n = grid.len();
        let q = grid.quad_weights();
        let mut best = vec![0.0f64; n];
        for p in 0..n {
            for len in 1..n {
                let cells: Vec<usize> = (0..len).map(|l| (p + l) % n).collect();
                let avg = cells.iter().map(|&c| f.samples()[c].norm() * q[c]).sum::<f64>()
                    / cells.iter().map(|&c| q[c]).sum::<f64>();
                for &c in &cells {
                    best[c] = best[c].max(avg);
                }
            }
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let grid = Arc::new(make_grid(2, 3).unwrap());
        let f = SampledFunction::from_fn(&grid, |t| Complex64::new((3.0 * t).sin(), t * t - 1.0));
        let fast = maximal_function(&f);
        for (a, b) in fast.values().iter().zip(brute_force(&f)) {
            assert!((a - b).abs() <= 1e-14 * b.max(1.0));
        }
    }

    #[test]
    fn constant_is_fixed() {
        let grid = Arc::new(make_grid(3, 4).unwrap());
        let p = maximal_of(&PiecewiseConstant::constant(Complex64::new(0.0, -2.5)), &grid).unwrap();
        assert!(p.values().iter().all(|&v| (v - 2.5).abs() < 1e-13));
    }

    #[test]
    fn indicator_is_one_on_its_arc_and_matches_double_resolution() {
        // Arc of normalized measure 1/4.
        let (a, b) = (PI / 4.0, 3.0 * PI / 4.0);
        let ind = PiecewiseConstant::indicator(a, b).unwrap();
        let coarse = Arc::new(CircleGrid::builder(1).points_per_interval(4).breakpoints([a, b]).build().unwrap());
        let fine = Arc::new(CircleGrid::builder(1).points_per_interval(8).breakpoints([a, b]).build().unwrap());
        let pc = maximal_of(&ind, &coarse).unwrap();
        for (i, &x) in coarse.nodes().iter().enumerate() {
            if x > a && x < b {
                assert!((pc.values()[i] - 1.0).abs() < 1e-14);
            }
        }
        // Just outside the right end, the best arc is the indicator arc plus
        // the node's own cell.
        let i = coarse.nodes_in(b, PI).start;
        let h = coarse.cell_length(i);
        let expect = (b - a) / (b - a + h);
        assert!((pc.values()[i] - expect).abs() < 1e-13);
        let fine_sf = ind.sample_on(&fine).unwrap();
        let fast = maximal_function(&fine_sf);
        for (u, v) in fast.values().iter().zip(brute_force(&fine_sf)) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn dominates_modulus_and_scales() {
        let grid = Arc::new(make_grid(2, 4).unwrap());
        let f = SampledFunction::from_fn(&grid, |t| Complex64::new(t.cos(), 0.3 * t));
        let mf = maximal_function(&f);
        let m2 = maximal_function(&f.map(|z| z * Complex64::new(0.0, -3.0)));
        for i in 0..grid.len() {
            assert!(mf.values()[i] >= f.samples()[i].norm() - 1e-15);
            assert!(mf.values()[i] <= f.sup_norm() + 1e-15);
            assert!((m2.values()[i] - 3.0 * mf.values()[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn ratio_exceeds_one_next_to_a_spike() {
        let rows = weight_maximal_ratio(&[1, 4], 4).unwrap();
        assert!(rows[0].ratio >= 1.0);
        assert!(rows[1].ratio > 1.0);
    }

    #[test]
    fn ratio_csv_header() {
        let rows = weight_maximal_ratio(&[2], 2).unwrap();
        let mut buf = Vec::new();
        write_ratio_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("M,ratio,theta\n"));
    }
}
