//! Alternating projections between the rank-r matrices and the pure
//! matrices: `Y ← π₁(X)`, `X ← π₂(Y)`.
//!
//! The residual of an iteration is `‖Re(Y)‖_F`, the real mass the following
//! `π₂` removes; it vanishes exactly when `Y` satisfies both constraints.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QuatMatrix;
use crate::projections::{pi1, pi2};

pub const DEFAULT_MAX_ITERS: usize = 5000;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;

/// Number of trailing residual ratios averaged into `tail_ratio`.
const TAIL_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AltProjConfig {
    pub rank: usize,
    pub max_iters: usize,
    pub residual_tol: f64,
    /// Keep per-iteration objective and timing in the report.
    pub trace: bool,
}

impl AltProjConfig {
    pub fn new(rank: usize) -> Self {
        AltProjConfig {
            rank,
            max_iters: DEFAULT_MAX_ITERS,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            trace: false,
        }
    }

    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        let max = m.min(n);
        if self.rank == 0 || self.rank > max {
            return Err(Error::RankOutOfRange { rank: self.rank, max });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.residual_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("residual_tol {} is negative", self.residual_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Drsm,
    Altproj,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Drsm => "drsm",
            Phase::Altproj => "altproj",
        }
    }
}

/// One row of a solver trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub phase: Phase,
    pub step: usize,
    pub residual: f64,
    pub objective: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AltProjReport {
    #[serde(skip)]
    pub solution: QuatMatrix,
    pub rank: usize,
    pub iterations: usize,
    /// `‖solution − A‖_F`.
    pub objective: f64,
    pub converged: bool,
    /// `‖Re(Y_k)‖_F` for every AltProj iteration.
    pub residual_trace: Vec<f64>,
    pub tail_ratio: Option<f64>,
    pub elapsed: f64,
    /// Length of the warm-start phase, 0 for a cold start.
    pub drsm_steps: usize,
    /// Full trace (both phases) when tracing is enabled.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
}

impl AltProjReport {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_trace.last().copied()
    }
}

/// Geometric mean of the last `TAIL_WINDOW` successive residual ratios.
pub fn tail_ratio(residuals: &[f64]) -> Option<f64> {
    if residuals.len() < 2 {
        return None;
    }
    let window = &residuals[residuals.len().saturating_sub(TAIL_WINDOW + 1)..];
    let (first, last) = (window[0], window[window.len() - 1]);
    if first <= 0.0 {
        return None;
    }
    Some((last / first).powf(1.0 / (window.len() - 1) as f64))
}

/// Runs the alternation from `start`. Stops as soon as a residual falls
/// below `residual_tol` or after `max_iters` iterations. The last iterate is
/// returned either way.
pub fn alt_proj(a: &QuatMatrix, start: &QuatMatrix, cfg: &AltProjConfig) -> Result<AltProjReport> {
    if a.shape() != start.shape() {
        return Err(Error::DimensionMismatch {
            op: "alt_proj start",
            left: a.shape(),
            right: start.shape(),
        });
    }
    let (m, n) = a.shape();
    cfg.validate(m, n)?;
    let clock = Instant::now();

    let mut x = start.clone();
    let mut residuals = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;

    for k in 1..=cfg.max_iters {
        let y = pi1(&x, cfg.rank)?;
        let residual = y.real_part_norm();
        x = pi2(&y);
        let objective = x.distance(a);
        residuals.push(residual);
        if cfg.trace {
            trace.push(TracePoint {
                phase: Phase::Altproj,
                step: k,
                residual,
                objective,
                seconds: clock.elapsed().as_secs_f64(),
            });
        }
        if residual < cfg.residual_tol {
            converged = true;
            break;
        }
    }

    Ok(AltProjReport {
        objective: x.distance(a),
        solution: x,
        rank: cfg.rank,
        iterations: residuals.len(),
        converged,
        tail_ratio: tail_ratio(&residuals),
        residual_trace: residuals,
        elapsed: clock.elapsed().as_secs_f64(),
        drsm_steps: 0,
        trace,
    })
}
