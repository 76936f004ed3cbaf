//! The truncate-then-drop-real-part baseline and the rank bound for pure
//! parts.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QuatMatrix;
use crate::projections::{pi1, pi2};
use crate::qsvd::{numerical_rank, DEFAULT_RANK_TOL};

/// How the baseline picks its truncation rank for a target rank `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// Truncate at `r` itself; the pure result can have rank up to `4r`.
    #[serde(rename = "a")]
    TargetRank,
    /// Truncate at `⌊r/4⌋`, so the pure result has rank at most `r`.
    #[serde(rename = "b")]
    QuarterRank,
}

impl Convention {
    pub fn truncation_rank(self, target: usize) -> Result<usize> {
        let t = match self {
            Convention::TargetRank => target,
            Convention::QuarterRank => target / 4,
        };
        if t == 0 {
            return Err(Error::InvalidConfig(format!(
                "target rank {target} gives truncation rank 0 under convention {self}"
            )));
        }
        Ok(t)
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::TargetRank => "a",
            Convention::QuarterRank => "b",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Convention::TargetRank),
            "b" => Ok(Convention::QuarterRank),
            other => Err(Error::InvalidConfig(format!("unknown convention {other:?} (expected a or b)"))),
        }
    }
}

/// `π₂(π₁(A, r_trunc))`.
pub fn qsvd_tr(a: &QuatMatrix, r_trunc: usize) -> Result<QuatMatrix> {
    Ok(pi2(&pi1(a, r_trunc)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct QsvdTrReport {
    #[serde(skip)]
    pub solution: QuatMatrix,
    pub convention: Convention,
    pub target_rank: usize,
    pub truncation_rank: usize,
    pub objective: f64,
    /// Rank of the returned pure matrix; may exceed the truncation rank.
    pub numerical_rank: usize,
    pub elapsed: f64,
}

pub fn qsvd_tr_report(a: &QuatMatrix, target_rank: usize, convention: Convention) -> Result<QsvdTrReport> {
    let clock = Instant::now();
    let truncation_rank = convention.truncation_rank(target_rank)?;
    let solution = qsvd_tr(a, truncation_rank)?;
    let elapsed = clock.elapsed().as_secs_f64();
    Ok(QsvdTrReport {
        objective: solution.distance(a),
        numerical_rank: numerical_rank(&solution, DEFAULT_RANK_TOL)?,
        solution,
        convention,
        target_rank,
        truncation_rank,
        elapsed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankBounds {
    /// `rank(A)`.
    pub r: usize,
    /// `rank(pure_part(A))`.
    pub r_pure: usize,
    /// `r ≤ r_pure ≤ 4r`.
    pub ok: bool,
    /// Whether `rank(A) ≤ min(m, n)/4`, the regime where the bound is a
    /// theorem. Outside it the check is still reported.
    pub hypothesis_holds: bool,
}

pub fn rank_bounds_check(a: &QuatMatrix) -> Result<RankBounds> {
    let r = numerical_rank(a, DEFAULT_RANK_TOL)?;
    let r_pure = numerical_rank(&a.pure_part(), DEFAULT_RANK_TOL)?;
    let (m, n) = a.shape();
    Ok(RankBounds {
        r,
        r_pure,
        ok: r <= r_pure && r_pure <= 4 * r,
        hypothesis_holds: 4 * r <= m.min(n),
    })
}
