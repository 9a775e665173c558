//! Composite, breakpoint-aligned grids on the circle.
//!
//! The circle is parametrized by θ ∈ (−π, π]. A grid is built from a set of
//! breakpoints (always 0 and ±π/k for k = 1..2M+1, plus optional extras),
//! each breakpoint interval is split into equal cells, and every cell
//! carries its midpoint as a node and its length over 2π as a quadrature
//! weight. Grids are mirror symmetric bit for bit: node `i` is exactly the
//! negation of node `len − 1 − i`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Cells per Fejér period used by [`GridBuilder::resolve_fejer`], divided by
/// the points-per-interval setting.
const FEJER_RESOLUTION: f64 = 4.0;

/// Reduce an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let mut t = theta - TWO_PI * (theta / TWO_PI).round();
    if t <= -PI {
        t += TWO_PI;
    } else if t > PI {
        t -= TWO_PI;
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    order: usize,
    points_per_interval: usize,
    breakpoints: Vec<f64>,
    edges: Vec<f64>,
    nodes: Vec<f64>,
    quad: Vec<f64>,
}

/// Builds a grid for weight truncation order `order` with `points_per_interval`
/// cells per breakpoint interval.
pub fn make_grid(order: usize, points_per_interval: usize) -> Result<CircleGrid> {
    CircleGrid::builder(order).points_per_interval(points_per_interval).build()
}

#[derive(Debug, Clone)]
pub struct GridBuilder {
    order: usize,
    points_per_interval: usize,
    max_cell: Option<f64>,
    fejer_order: Option<usize>,
    extra: Vec<f64>,
}

impl GridBuilder {
    pub fn points_per_interval(mut self, ppi: usize) -> Self {
        self.points_per_interval = ppi;
        self
    }

    /// Upper bound on every cell length (radians).
    pub fn max_cell(mut self, h: f64) -> Self {
        self.max_cell = Some(h);
        self
    }

    /// Refine so that Fejér kernels up to order `n` are resolved: no cell is
    /// longer than `4 / (ppi · (n + 1))`.
    pub fn resolve_fejer(mut self, n: usize) -> Self {
        self.fejer_order = Some(self.fejer_order.map_or(n, |m| m.max(n)));
        self
    }

    /// Adds a breakpoint at `theta` and at its mirror image.
    pub fn breakpoint(mut self, theta: f64) -> Self {
        self.extra.push(theta);
        self
    }

    pub fn breakpoints(mut self, thetas: impl IntoIterator<Item = f64>) -> Self {
        self.extra.extend(thetas);
        self
    }

    pub fn build(self) -> Result<CircleGrid> {
        if self.order < 1 {
            return Err(Error::invalid("M", "weight truncation order must be at least 1"));
        }
        if self.points_per_interval < 2 {
            return Err(Error::invalid(
                "points_per_interval",
                format!("need at least 2, got {}", self.points_per_interval),
            ));
        }
        let mut cap = f64::INFINITY;
        if let Some(h) = self.max_cell {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::invalid("max_cell", format!("must be positive, got {h}")));
            }
            cap = h;
        }
        if let Some(n) = self.fejer_order {
            cap = cap.min(FEJER_RESOLUTION / (self.points_per_interval as f64 * (n as f64 + 1.0)));
        }

        // Breakpoints on the closed half circle [0, π].
        let mut half: Vec<f64> = vec![0.0];
        half.extend((1..=2 * self.order + 1).map(|k| PI / k as f64));
        for &t in &self.extra {
            if !t.is_finite() {
                return Err(Error::invalid("breakpoint", "non-finite angle"));
            }
            let a = wrap_angle(t).abs();
            if a > 0.0 && a < PI {
                half.push(a);
            }
        }
        half.sort_by(|a, b| a.total_cmp(b));
        half.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);

        let mut half_edges = vec![0.0];
        for pair in half.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let len = b - a;
            let cells = self.points_per_interval.max((len / cap).ceil() as usize);
            for i in 1..cells {
                half_edges.push(a + len * (i as f64 / cells as f64));
            }
            half_edges.push(b);
        }

        let mut edges: Vec<f64> = half_edges[1..].iter().rev().map(|e| -e).collect();
        edges.extend_from_slice(&half_edges);

        let half_cells = half_edges.len() - 1;
        let mut nodes = vec![0.0; 2 * half_cells];
        let mut quad = vec![0.0; 2 * half_cells];
        for c in 0..half_cells {
            let (a, b) = (half_edges[c], half_edges[c + 1]);
            let mid = 0.5 * (a + b);
            let q = (b - a) / TWO_PI;
            nodes[half_cells + c] = mid;
            nodes[half_cells - 1 - c] = -mid;
            quad[half_cells + c] = q;
            quad[half_cells - 1 - c] = q;
        }

        let mut breakpoints: Vec<f64> = half[1..half.len() - 1].iter().rev().map(|b| -b).collect();
        breakpoints.extend_from_slice(&half);

        Ok(CircleGrid {
            order: self.order,
            points_per_interval: self.points_per_interval,
            breakpoints,
            edges,
            nodes,
            quad,
        })
    }
}

impl CircleGrid {
    pub fn builder(order: usize) -> GridBuilder {
        GridBuilder { order, points_per_interval: 8, max_cell: None, fejer_order: None, extra: Vec::new() }
    }

    /// Weight truncation order M the grid was built for.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points_per_interval(&self) -> usize {
        self.points_per_interval
    }

    /// Breakpoints in (−π, π], increasing. −π is represented by π.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Cell edges from −π to π inclusive.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell lengths divided by 2π; they sum to one.
    pub fn quad_weights(&self) -> &[f64] {
        &self.quad
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn cell_length(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    pub fn min_cell(&self) -> f64 {
        (0..self.len()).map(|i| self.cell_length(i)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_cell(&self) -> f64 {
        (0..self.len()).map(|i| self.cell_length(i)).fold(0.0, f64::max)
    }

    /// Longest cell overlapping the open arc (a, b) (no wrap-around).
    pub fn max_cell_in(&self, a: f64, b: f64) -> f64 {
        (0..self.len())
            .filter(|&i| self.edges[i + 1] > a && self.edges[i] < b)
            .map(|i| self.cell_length(i))
            .fold(0.0, f64::max)
    }

    /// Index of the cell containing `theta` (cells are half open, (a, b]).
    pub fn cell_containing(&self, theta: f64) -> usize {
        let t = wrap_angle(theta);
        let idx = self.edges.partition_point(|&e| e < t);
        idx.saturating_sub(1).min(self.len() - 1)
    }

    pub fn mirror_index(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    /// True when node and weight arrays are exactly mirror symmetric.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.nodes[i] == -self.nodes[n - 1 - i] && self.quad[i] == self.quad[n - 1 - i])
    }

    /// True if `angle` coincides with a cell edge (to 1e-13 absolute).
    pub fn has_edge(&self, angle: f64) -> bool {
        let t = wrap_angle(angle);
        let idx = self.edges.partition_point(|&e| e < t);
        let near = |i: usize| self.edges.get(i).is_some_and(|&e| (e - t).abs() <= 1e-13);
        near(idx) || (idx > 0 && near(idx - 1)) || ((t - PI).abs() <= 1e-13)
    }

    /// Checks that every interior edge in `edges` is also a cell edge here.
    pub fn refines(&self, edges: &[f64]) -> Result<()> {
        for &e in edges {
            if !self.has_edge(e) {
                return Err(Error::MissingBreakpoint { angle: e });
            }
        }
        Ok(())
    }

    /// Node indices whose angle lies in the closed interval [a, b].
    pub fn nodes_in(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let lo = self.nodes.partition_point(|&x| x < a);
        let hi = self.nodes.partition_point(|&x| x <= b);
        lo..hi.max(lo)
    }
}
