//! Checks shared by the property suites and the acceptance run. Each returns
//! a measured error (or a pass flag) so callers can pick their own driver.
#![allow(dead_code)]

use nalgebra::DMatrix;
use pqa::baselines::rank_bounds_check;
use pqa::drsm::{DrsmConfig, Schedule};
use pqa::generate::{random_product, random_quaternion_matrix};
use pqa::projections::pi2;
use pqa::qsvd::qsvd;
use pqa::realrep::to_real_rep;
use pqa::QuatMatrix;

fn max_abs(a: &ndarray::Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `max|φ(AB) − φ(A)φ(B)| / (max|φ(A)|·max|φ(B)|)` for random 4×4 factors.
pub fn homomorphism_error(seed: u64) -> f64 {
    let a = random_quaternion_matrix(4, 4, seed);
    let b = random_quaternion_matrix(4, 4, seed ^ 0x9e37_79b9);
    let (pa, pb) = (to_real_rep(&a).into_data(), to_real_rep(&b).into_data());
    let lhs = to_real_rep(&a.matmul(&b).unwrap()).into_data();
    max_abs(&(&lhs - &pa.dot(&pb))) / (max_abs(&pa) * max_abs(&pb))
}

fn gram_defect(q: &QuatMatrix) -> f64 {
    let g = q.conj_transpose().matmul(q).unwrap();
    g.max_abs_diff(&QuatMatrix::identity(q.ncols()))
}

/// Relative reconstruction error and the worse of the two unitarity defects.
pub fn qsvd_errors(m: usize, n: usize, seed: u64) -> (f64, f64) {
    let a = random_quaternion_matrix(m, n, seed);
    let f = qsvd(&a).unwrap();
    let recon = f.reconstruct().distance(&a) / a.frobenius_norm();
    (recon, gram_defect(&f.u).max(gram_defect(&f.v)))
}

/// Largest relative gap between each σᵢ and its four copies among the real
/// representation's singular values.
pub fn multiplicity_four_error(m: usize, n: usize, seed: u64) -> f64 {
    let a = random_quaternion_matrix(m, n, seed);
    let s = qsvd(&a).unwrap().sigma;
    let rep = to_real_rep(&a).into_data();
    let (rows, cols) = rep.dim();
    let mut real: Vec<f64> = DMatrix::from_fn(rows, cols, |i, j| rep[[i, j]])
        .singular_values()
        .iter()
        .copied()
        .collect();
    real.sort_by(|x, y| y.total_cmp(x));
    assert_eq!(real.len(), 4 * s.len());
    let mut worst = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        for &c in &real[4 * i..4 * i + 4] {
            worst = worst.max((c - x).abs() / s[0]);
        }
    }
    worst
}

/// `|‖A − A_r‖² − Σ_{i>r} σᵢ²| / ‖A‖²`.
pub fn tail_identity_error(m: usize, n: usize, r: usize, seed: u64) -> f64 {
    let a = random_quaternion_matrix(m, n, seed);
    let f = qsvd(&a).unwrap();
    let tail: f64 = f.sigma[r..].iter().map(|s| s * s).sum();
    (f.truncate(r).unwrap().distance(&a).powi(2) - tail).abs() / a.frobenius_norm_sqr()
}

/// `r ≤ rank(pure part) ≤ 4r` for a product of rank `r` with `4r ≤ min(m, n)`.
pub fn sandwich_holds(m: usize, n: usize, r: usize, seed: u64) -> bool {
    assert!(4 * r <= m.min(n));
    let b = rank_bounds_check(&random_product(m, n, r, seed)).unwrap();
    b.r == r && b.ok
}

/// Nonexpansive (`‖π₂X − π₂Y‖ ≤ ‖X − Y‖`) and idempotent, both exactly.
pub fn pi2_exact(m: usize, n: usize, seed: u64) -> bool {
    let x = random_quaternion_matrix(m, n, seed);
    let y = random_quaternion_matrix(m, n, seed + 1);
    let (px, py) = (pi2(&x), pi2(&y));
    px.distance(&py) <= x.distance(&y) && pi2(&px) == px
}

/// Steps the default schedule to `horizon` and returns the first index where
/// the floor binds together with the worst `|α_k(1+τ_k) − 0.99|` from there on.
pub fn schedule_law(horizon: usize) -> (Option<usize>, f64) {
    let cfg = DrsmConfig::new(1);
    let mut s = Schedule::new(&cfg);
    let mut crossover = None;
    let mut worst = 0.0f64;
    while s.k < horizon {
        let decayed = cfg.alpha_decay * s.alpha;
        s.advance();
        if crossover.is_none() && s.alpha > decayed {
            crossover = Some(s.k);
        }
        if crossover.is_some() {
            worst = worst.max((s.alpha * (1.0 + s.tau) - cfg.alpha_floor_numerator).abs());
        }
    }
    (crossover, worst)
}
