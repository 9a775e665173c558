//! Gliding-hump search for a function whose Fejér means do not converge in
//! `L¹(w)` along a chosen subsequence.
//!
//! Stage `k` adds `c_k g_k`, where `g_k` is the unit-norm input attaining
//! `‖C_{F_{n_k}}‖` on `L¹(w)` and `c_k = decay^k`. The order `n_k` is the
//! first one on the dyadic ladder above `n_{k−1}` for which the running
//! function already has Fejér error at least `ρ · target`. If a later stage
//! pulls an earlier error below the target, the whole construction is rerun
//! with `ρ` doubled.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::fejer_error_curve;
use crate::circle::{convolve_direct, CircleGrid, KernelSpec, SampledFunction};
use crate::error::{Error, Result};
use crate::operator::{operator_norm, OperatorMatrix};
use crate::weighted::{norm, SpaceTag, Weight};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    pub stages: usize,
    pub target: f64,
    /// `c_k = decay^k`.
    pub decay: f64,
    /// Largest Fejér order tried; defaults to the grid's Nyquist window.
    pub n_max: Option<usize>,
    pub max_retries: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self { stages: 3, target: 1.0, decay: 0.5, n_max: None, max_retries: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessStage {
    pub stage: usize,
    pub n: usize,
    /// Node carrying the stage's extremal input.
    pub theta: f64,
    pub coefficient: f64,
    pub operator_norm: f64,
    /// `‖f*F_n − f‖_{L¹(w)}` for the final `f`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub stages: Vec<WitnessStage>,
    pub f: SampledFunction,
    pub target: f64,
    /// Requirement factor `ρ` of the successful run.
    pub requirement: f64,
    pub attempts: usize,
    /// Largest relative difference between the stage errors and the same
    /// errors computed spectrally.
    pub coherence: f64,
}

impl WitnessReport {
    pub fn orders(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.n).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.error).collect()
    }

    pub fn meets_target(&self) -> bool {
        self.stages.iter().all(|s| s.error >= self.target)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        for s in &self.stages {
            wtr.serialize(s)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "stages: {}\ntarget: {}\nrequirement factor: {}\nattempts: {}\ncoherence: {:.3e}\n",
            self.stages.len(),
            self.target,
            self.requirement,
            self.attempts,
            self.coherence
        );
        for st in &self.stages {
            s.push_str(&format!(
                "stage {}: n = {}, theta = {:.6}, c = {}, norm = {:.6}, error = {:.6}\n",
                st.stage, st.n, st.theta, st.coefficient, st.operator_norm, st.error
            ));
        }
        s
    }
}

struct Rung {
    n: usize,
    norm: f64,
    node: usize,
}

fn fejer_error(f: &SampledFunction, n: usize, w: &Weight) -> Result<f64> {
    let mean = convolve_direct(f, &KernelSpec::fejer(n));
    Ok(norm(&mean.add_scaled(Complex64::new(-1.0, 0.0), f)?, w, SpaceTag::WeightedL1))
}

pub fn gliding_hump_witness(w: &Weight, grid: &Arc<CircleGrid>, cfg: &WitnessConfig) -> Result<WitnessReport> {
    if cfg.stages == 0 {
        return Err(Error::invalid("stages", "need at least one stage"));
    }
    if !(cfg.target > 0.0) || !(cfg.decay > 0.0 && cfg.decay < 1.0) {
        return Err(Error::invalid("target", "need target > 0 and 0 < decay < 1"));
    }
    grid.refines(w.profile().breaks())?;
    let nyquist = grid.len() / 4;
    let n_max = cfg.n_max.unwrap_or(nyquist).min(nyquist);
    let wn = w.at_nodes(grid);
    let q = grid.quad_weights();

    let mut ladder: Vec<Rung> = Vec::new();
    let rung = |pos: usize, ladder: &mut Vec<Rung>| -> Result<Option<(usize, f64, usize)>> {
        while ladder.len() <= pos {
            let n = 1usize << ladder.len();
            if n > n_max {
                return Ok(None);
            }
            let op = OperatorMatrix::streamed(&KernelSpec::fejer(n), grid)?;
            let r = operator_norm(&op, w, SpaceTag::WeightedL1);
            ladder.push(Rung { n, norm: r.value, node: r.index });
        }
        let r = &ladder[pos];
        Ok(Some((r.n, r.norm, r.node)))
    };

    let mut rho = 1.0;
    for attempt in 1..=cfg.max_retries + 1 {
        let mut f = SampledFunction::zeros(grid);
        let mut chosen: Vec<(usize, usize, f64, f64)> = Vec::new();
        let mut pos = 0;
        for k in 1..=cfg.stages {
            let c = cfg.decay.powi(k as i32);
            let mut best_error = 0.0f64;
            let mut found = None;
            while let Some((n, op_norm, node)) = rung(pos, &mut ladder)? {
                pos += 1;
                let mut trial = f.clone();
                trial.samples_mut()[node] += Complex64::new(c / (wn[node] * q[node]), 0.0);
                let err = fejer_error(&trial, n, w)?;
                best_error = best_error.max(err);
                if err >= rho * cfg.target {
                    found = Some((trial, n, node, op_norm));
                    break;
                }
            }
            match found {
                Some((trial, n, node, op_norm)) => {
                    f = trial;
                    chosen.push((n, node, c, op_norm));
                }
                None => return Err(Error::StageFailure { stage: k, best_error }),
            }
        }

        let stages: Vec<WitnessStage> = chosen
            .iter()
            .enumerate()
            .map(|(i, &(n, node, coefficient, operator_norm))| {
                Ok(WitnessStage {
                    stage: i + 1,
                    n,
                    theta: grid.nodes()[node],
                    coefficient,
                    operator_norm,
                    error: fejer_error(&f, n, w)?,
                })
            })
            .collect::<Result<_>>()?;

        if let Some(bad) = stages.iter().find(|s| s.error < cfg.target) {
            if attempt > cfg.max_retries {
                return Err(Error::StageFailure { stage: bad.stage, best_error: bad.error });
            }
            rho *= 2.0;
            continue;
        }

        let orders: Vec<usize> = stages.iter().map(|s| s.n).collect();
        let spectral = fejer_error_curve(&f, grid, Some(w), &orders)?;
        let coherence = stages
            .iter()
            .zip(&spectral)
            .map(|(s, r)| (s.error - r.error).abs() / r.error.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        return Ok(WitnessReport { stages, f, target: cfg.target, requirement: rho, attempts: attempt, coherence });
    }
    unreachable!("the final attempt either returns or fails")
}
