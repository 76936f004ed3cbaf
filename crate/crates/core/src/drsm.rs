//! Douglas–Rachford splitting on the penalized problem
//!
//! ```text
//! f(X) = ½‖X − A‖² + (τ/2)‖Re X‖²,   g(X) = ½‖X − A‖² + δ{rank X ≤ r}
//! ```
//!
//! used to produce a starting point for the alternating projections. One
//! step is
//!
//! ```text
//! Y ← prox_{αf}(X)
//! Z ← prox_{αg}(2Y − X) = π₁(α/(1+α)·A + 2/(1+α)·Y − 1/(1+α)·X)
//! X ← X + Z − Y
//! ```
//!
//! with `τ` doubling for the first `tau_double_until` steps and then frozen,
//! and `α_k = max(decay·α_{k−1}, floor/(1+τ_k))`.

use std::time::Instant;

use serde::Serialize;

use crate::altproj::{alt_proj, AltProjConfig, AltProjReport, Phase, TracePoint};
use crate::error::{Error, Result};
use crate::matrix::QuatMatrix;
use crate::projections::pi1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrsmConfig {
    pub rank: usize,
    pub steps: usize,
    pub tau0: f64,
    pub tau_double_until: usize,
    /// `α₀ = alpha0_numerator / (1 + τ₀)`.
    pub alpha0_numerator: f64,
    pub alpha_decay: f64,
    /// Stepsize floor `alpha_floor_numerator / (1 + τ_k)`.
    pub alpha_floor_numerator: f64,
}

impl DrsmConfig {
    pub fn new(rank: usize) -> Self {
        DrsmConfig {
            rank,
            steps: 500,
            tau0: 1.0,
            tau_double_until: 1000,
            alpha0_numerator: 150.0,
            alpha_decay: 0.7,
            alpha_floor_numerator: 0.99,
        }
    }

    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        let max = m.min(n);
        if self.rank == 0 || self.rank > max {
            return Err(Error::RankOutOfRange { rank: self.rank, max });
        }
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha_decay > 0.0 && self.alpha_decay < 1.0) {
            return bad(format!("alpha_decay {} must lie in (0, 1)", self.alpha_decay));
        }
        if !(self.alpha_floor_numerator > 0.0 && self.alpha_floor_numerator < 1.0) {
            return bad(format!("alpha_floor_numerator {} must lie in (0, 1)", self.alpha_floor_numerator));
        }
        if !(self.alpha0_numerator > 0.0 && self.alpha0_numerator.is_finite()) {
            return bad(format!("alpha0_numerator {} must be positive", self.alpha0_numerator));
        }
        if !(self.tau0 >= 0.0) {
            return bad(format!("tau0 {} must be nonnegative", self.tau0));
        }
        let tau_max = self.tau0 * 2f64.powi(self.tau_double_until.min(i32::MAX as usize) as i32);
        let floor_min = self.alpha_floor_numerator / (1.0 + tau_max);
        if !tau_max.is_finite() || !floor_min.is_normal() {
            return bad(format!(
                "tau0·2^{} is not representable in double precision",
                self.tau_double_until
            ));
        }
        Ok(())
    }
}

/// The `(τ_k, α_k)` sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub k: usize,
    pub tau: f64,
    pub alpha: f64,
    double_until: usize,
    decay: f64,
    floor_numerator: f64,
}

impl Schedule {
    pub fn new(cfg: &DrsmConfig) -> Self {
        Schedule {
            k: 0,
            tau: cfg.tau0,
            alpha: cfg.alpha0_numerator / (1.0 + cfg.tau0),
            double_until: cfg.tau_double_until,
            decay: cfg.alpha_decay,
            floor_numerator: cfg.alpha_floor_numerator,
        }
    }

    /// Moves from `k` to `k + 1`.
    pub fn advance(&mut self) {
        self.k += 1;
        if self.k <= self.double_until {
            self.tau *= 2.0;
        }
        self.alpha = (self.decay * self.alpha).max(self.floor_numerator / (1.0 + self.tau));
    }
}

#[derive(Debug, Clone)]
pub struct DrsmState {
    pub x: QuatMatrix,
    pub y: QuatMatrix,
    pub z: QuatMatrix,
    pub k: usize,
    pub tau: f64,
    pub alpha: f64,
}

/// Componentwise minimizer of `αf(Z) + ½‖Z − Y‖²`:
/// real part `(α·A₀ + Y₀)/(1+α+ατ)`, imaginary parts `(α·A_c + Y_c)/(1+α)`.
pub fn prox_f(y: &QuatMatrix, a: &QuatMatrix, alpha: f64, tau: f64) -> Result<QuatMatrix> {
    if y.shape() != a.shape() {
        return Err(Error::DimensionMismatch {
            op: "prox_f",
            left: y.shape(),
            right: a.shape(),
        });
    }
    let real_den = 1.0 + alpha + alpha * tau;
    let imag_den = 1.0 + alpha;
    let parts = std::array::from_fn(|c| {
        let den = if c == 0 { real_den } else { imag_den };
        let (wa, wy) = (alpha / den, 1.0 / den);
        let mut out = y.part(c) * wy;
        out.scaled_add(wa, a.part(c));
        out
    });
    Ok(QuatMatrix::from_parts_unchecked(parts))
}

/// `π₁(α/(1+α)·A + 1/(1+α)·W)`.
pub fn prox_g(w: &QuatMatrix, a: &QuatMatrix, alpha: f64, r: usize) -> Result<QuatMatrix> {
    let blend = QuatMatrix::linear_combination(&[(alpha / (1.0 + alpha), a), (1.0 / (1.0 + alpha), w)]);
    pi1(&blend, r)
}

fn check_input(a: &QuatMatrix, cfg: &DrsmConfig) -> Result<()> {
    let (m, n) = a.shape();
    cfg.validate(m, n)
}

/// `cfg.steps` iterations from `X⁰ = A`. Non-pure `A` is accepted; the
/// penalty then pulls the real part toward `A₀` rather than zero.
pub fn drsm_run(a: &QuatMatrix, cfg: &DrsmConfig) -> Result<DrsmState> {
    drsm_traced(a, cfg, None)
}

fn drsm_traced(a: &QuatMatrix, cfg: &DrsmConfig, mut trace: Option<&mut Vec<TracePoint>>) -> Result<DrsmState> {
    check_input(a, cfg)?;
    let clock = Instant::now();
    let mut sched = Schedule::new(cfg);
    let mut state = DrsmState {
        x: a.clone(),
        y: a.clone(),
        z: a.clone(),
        k: 0,
        tau: sched.tau,
        alpha: sched.alpha,
    };
    for _ in 0..cfg.steps {
        sched.advance();
        let (alpha, tau) = (sched.alpha, sched.tau);
        let y = prox_f(&state.x, a, alpha, tau)?;
        let blend = QuatMatrix::linear_combination(&[
            (alpha / (1.0 + alpha), a),
            (2.0 / (1.0 + alpha), &y),
            (-1.0 / (1.0 + alpha), &state.x),
        ]);
        let z = pi1(&blend, cfg.rank)?;
        let x = QuatMatrix::linear_combination(&[(1.0, &state.x), (1.0, &z), (-1.0, &y)]);
        state = DrsmState {
            x,
            y,
            z,
            k: sched.k,
            tau,
            alpha,
        };
        if let Some(t) = trace.as_deref_mut() {
            t.push(TracePoint {
                phase: Phase::Drsm,
                step: state.k,
                residual: state.y.real_part_norm(),
                objective: state.y.distance(a),
                seconds: clock.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(state)
}

/// DRSM warm start followed by alternating projections from `Y^k`.
///
/// The DRSM phase is always traced into `report.trace` (with its residual
/// `‖Re(Y^k)‖_F`); AltProj rows follow when `ap_cfg.trace` is set. Step
/// counters restart in each phase and `seconds` is measured from the start
/// of the whole solve.
pub fn hybrid_solve(a: &QuatMatrix, drsm_cfg: &DrsmConfig, ap_cfg: &AltProjConfig) -> Result<AltProjReport> {
    let (m, n) = a.shape();
    ap_cfg.validate(m, n)?;
    let clock = Instant::now();
    let mut drsm_trace = Vec::with_capacity(drsm_cfg.steps);
    let state = drsm_traced(a, drsm_cfg, Some(&mut drsm_trace))?;
    let warm = clock.elapsed().as_secs_f64();
    let mut report = alt_proj(a, &state.y, ap_cfg)?;
    for t in &mut report.trace {
        t.seconds += warm;
    }
    drsm_trace.append(&mut report.trace);
    report.trace = drsm_trace;
    report.drsm_steps = drsm_cfg.steps;
    report.elapsed += warm;
    Ok(report)
}
