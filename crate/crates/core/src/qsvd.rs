//! Quaternion SVD by one-sided Jacobi rotations.
//!
//! Column pairs of the working matrix are orthogonalized in quaternion
//! arithmetic. For a pair with Gram entries `α = ‖a_p‖²`, `β = ‖a_q‖²` and
//! `γ = a_p* a_q`, column `q` is first right-multiplied by the unit phase
//! `conj(γ)/|γ|`, which makes the off-diagonal entry real and equal to `|γ|`.
//! A real plane rotation then zeroes it. Both steps are right
//! multiplications by unitary 2×2 quaternion matrices, so accumulating them
//! yields `V` with `A·V = U·Σ`.
//!
//! A pair is rotated only if `|γ| > √m·ε·√(αβ)`. A sweep with no rotation
//! ends the iteration, at which point the off-diagonal Gram mass is below
//! `√m·ε·‖A‖²_F`.

use ndarray::Array2;

use crate::bidiag::{bidiag_factors, leading_basis};
use crate::columns::{conj_dot, rotate_pair, ColumnSet};
use crate::error::{Error, Result};
use crate::matrix::QuatMatrix;
use crate::quaternion::Quaternion;

pub const DEFAULT_MAX_SWEEPS: usize = 60;

/// Thin factorization `A = U·diag(σ)·V*`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct QsvdFactors {
    pub u: QuatMatrix,
    pub sigma: Vec<f64>,
    pub v: QuatMatrix,
}

impl QsvdFactors {
    pub fn rank_capacity(&self) -> usize {
        self.sigma.len()
    }

    /// `Σ_{i≤r} σᵢ uᵢ vᵢ*`.
    pub fn truncate(&self, r: usize) -> Result<QuatMatrix> {
        let k = self.sigma.len();
        if r == 0 || r > k {
            return Err(Error::RankOutOfRange { rank: r, max: k });
        }
        let (m, n) = (self.u.nrows(), self.v.nrows());
        let mut us = QuatMatrix::zeros(m, r);
        for j in 0..r {
            for i in 0..m {
                us.set(i, j, self.u.get(i, j).scale(self.sigma[j]));
            }
        }
        let mut vr = QuatMatrix::zeros(n, r);
        for j in 0..r {
            for i in 0..n {
                vr.set(i, j, self.v.get(i, j));
            }
        }
        us.matmul(&vr.conj_transpose())
    }

    /// Reassembles `U·diag(σ)·V*`.
    pub fn reconstruct(&self) -> QuatMatrix {
        self.truncate(self.sigma.len()).expect("full rank is in range")
    }
}

pub fn qsvd(a: &QuatMatrix) -> Result<QsvdFactors> {
    qsvd_with_sweeps(a, DEFAULT_MAX_SWEEPS)
}

pub fn qsvd_with_sweeps(a: &QuatMatrix, max_sweeps: usize) -> Result<QsvdFactors> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("{m}x{n}")));
    }
    if m >= n {
        let mut work = ColumnSet::from_matrix(a);
        let mut v = ColumnSet::identity(n);
        jacobi_sweeps(&mut work, Some(&mut v), max_sweeps)?;
        Ok(finish(work, v))
    } else {
        // A* = U' Σ V'*  ⇒  A = V' Σ U'*
        let mut work = ColumnSet::from_matrix(&a.conj_transpose());
        let mut v = ColumnSet::identity(m);
        jacobi_sweeps(&mut work, Some(&mut v), max_sweeps)?;
        let f = finish(work, v);
        Ok(QsvdFactors {
            u: f.v,
            sigma: f.sigma,
            v: f.u,
        })
    }
}

/// Same factorization through Householder bidiagonalization and a real
/// bidiagonal SVD. Much faster than the Jacobi route for larger inputs, with
/// absolute rather than relative accuracy in the small singular values.
pub fn qsvd_householder(a: &QuatMatrix) -> Result<QsvdFactors> {
    let (mut u, sigma, mut v) = bidiag_factors(a)?;
    for j in 0..sigma.len() {
        if leading_component_negative(&u.column(j)) {
            for i in 0..u.nrows() {
                u.set(i, j, -u.get(i, j));
            }
            for i in 0..v.nrows() {
                v.set(i, j, -v.get(i, j));
            }
        }
    }
    Ok(QsvdFactors { u, sigma, v })
}

/// Singular values only, in descending order.
pub fn singular_values(a: &QuatMatrix) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let mut work = if m >= n {
        ColumnSet::from_matrix(a)
    } else {
        ColumnSet::from_matrix(&a.conj_transpose())
    };
    jacobi_sweeps(&mut work, None, DEFAULT_MAX_SWEEPS)?;
    let mut s: Vec<f64> = (0..work.ncols).map(|j| work.norm_sqr(j).sqrt()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Number of singular values above `rel_tol·σ₁`; 0 for the zero matrix.
pub fn numerical_rank(a: &QuatMatrix, rel_tol: f64) -> Result<usize> {
    let s = singular_values(a)?;
    Ok(rank_from_singular_values(&s, rel_tol))
}

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub fn rank_from_singular_values(s: &[f64], rel_tol: f64) -> usize {
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

/// Best rank-`r` approximation `U_r U_r* A`, with the leading singular
/// subspace taken from the Householder route (no `V` is formed). Agrees
/// with `qsvd(a)?.truncate(r)` to rounding.
pub fn best_rank_approx(a: &QuatMatrix, r: usize) -> Result<QuatMatrix> {
    let (m, n) = a.shape();
    let k = m.min(n);
    if r == 0 || r > k {
        return Err(Error::RankOutOfRange { rank: r, max: k });
    }
    let (basis, tall) = leading_basis(a, r)?;
    let basis_h = basis.conj_transpose();
    if tall {
        basis.matmul(&basis_h.matmul(a)?)
    } else {
        a.matmul(&basis)?.matmul(&basis_h)
    }
}

fn jacobi_sweeps(work: &mut ColumnSet, mut v: Option<&mut ColumnSet>, max_sweeps: usize) -> Result<()> {
    let m = work.nrows;
    let k = work.ncols;
    let total = work.total_norm_sqr();
    if !total.is_finite() {
        return Err(Error::NonFinite("qsvd input"));
    }
    if k < 2 || total == 0.0 {
        return Ok(());
    }
    let tol = (m as f64).sqrt() * f64::EPSILON;
    let mut norms: Vec<f64> = (0..k).map(|j| work.norm_sqr(j)).collect();
    let mut off_mass = f64::INFINITY;
    for _sweep in 0..max_sweeps {
        let mut rotated = false;
        off_mass = 0.0;
        for p in 0..k - 1 {
            for q in p + 1..k {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = conj_dot(work.planes(p, 0), work.planes(q, 0));
                let g = gamma.modulus();
                off_mass += g * g;
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj().scale(1.0 / g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (cp, cq) = work.pair_mut(p, q);
                rotate_pair(cp, cq, m, phase, c, s);
                if let Some(v) = v.as_deref_mut() {
                    let n = v.nrows;
                    let (vp, vq) = v.pair_mut(p, q);
                    rotate_pair(vp, vq, n, phase, c, s);
                }
                let new_p = alpha - t * g;
                let new_q = beta + t * g;
                // guard against cancellation in the updated norms
                norms[p] = if new_p > 1e-3 * alpha { new_p } else { work.norm_sqr(p) };
                norms[q] = if new_q > 1e-3 * beta { new_q } else { work.norm_sqr(q) };
            }
        }
        if !rotated {
            return Ok(());
        }
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = work.norm_sqr(j);
        }
    }
    Err(Error::NoConvergence {
        sweeps: max_sweeps,
        off_mass: off_mass.sqrt() / total,
    })
}

fn descending_order(work: &ColumnSet) -> Vec<usize> {
    let norms: Vec<f64> = (0..work.ncols).map(|j| work.norm_sqr(j)).collect();
    let mut order: Vec<usize> = (0..work.ncols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    order
}

/// Normalizes columns into `U`, sorts by descending σ, completes any zero
/// columns to an orthonormal set, and applies the sign convention.
fn finish(work: ColumnSet, v: ColumnSet) -> QsvdFactors {
    let m = work.nrows;
    let n = v.nrows;
    let k = work.ncols;
    let order = descending_order(&work);
    let sigma: Vec<f64> = order.iter().map(|&j| work.norm_sqr(j).sqrt()).collect();
    let top = sigma.first().copied().unwrap_or(0.0);

    let mut u_cols: Vec<Vec<Quaternion>> = Vec::with_capacity(k);
    let mut v_cols: Vec<Vec<Quaternion>> = Vec::with_capacity(k);
    let mut pending = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        let s = sigma[slot];
        v_cols.push((0..n).map(|i| v.get(j, i)).collect());
        if s > 0.0 && s > 1e-150 * top {
            u_cols.push((0..m).map(|i| work.get(j, i).scale(1.0 / s)).collect());
        } else {
            u_cols.push(vec![Quaternion::ZERO; m]);
            pending.push(slot);
        }
    }
    for slot in pending {
        u_cols[slot] = complement_vector(&u_cols, slot, m);
    }

    for (u, v) in u_cols.iter_mut().zip(v_cols.iter_mut()) {
        if leading_component_negative(u) {
            u.iter_mut().for_each(|x| *x = -*x);
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }

    QsvdFactors {
        u: from_columns(&u_cols, m),
        sigma,
        v: from_columns(&v_cols, n),
    }
}

/// First entry above 1e-12 in magnitude, scanned component-major then by
/// row, is negative.
fn leading_component_negative(u: &[Quaternion]) -> bool {
    for c in 0..4 {
        for q in u {
            let x = q.components()[c];
            if x.abs() > 1e-12 {
                return x < 0.0;
            }
        }
    }
    false
}

/// Unit vector orthogonal to every column of `cols` except `skip`, built by
/// Gram–Schmidt from the standard basis.
fn complement_vector(cols: &[Vec<Quaternion>], skip: usize, m: usize) -> Vec<Quaternion> {
    for e in 0..m {
        let mut x = vec![Quaternion::ZERO; m];
        x[e] = Quaternion::ONE;
        for _pass in 0..2 {
            for (idx, c) in cols.iter().enumerate() {
                if idx == skip {
                    continue;
                }
                // x ← x − c·(c* x)
                let coef = c.iter().zip(&x).fold(Quaternion::ZERO, |acc, (a, b)| acc + a.conj() * *b);
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi = *xi - *ci * coef;
                }
            }
        }
        let norm = x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            return x.into_iter().map(|q| q.scale(1.0 / norm)).collect();
        }
    }
    unreachable!("a unit vector orthogonal to fewer than m columns always exists")
}

fn from_columns(cols: &[Vec<Quaternion>], rows: usize) -> QuatMatrix {
    let mut parts: [Array2<f64>; 4] = std::array::from_fn(|_| Array2::zeros((rows, cols.len())));
    for (j, col) in cols.iter().enumerate() {
        for (i, q) in col.iter().enumerate() {
            for (c, x) in q.components().into_iter().enumerate() {
                parts[c][[i, j]] = x;
            }
        }
    }
    QuatMatrix::from_parts_unchecked(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_quaternion_matrix, random_unitary};
    use ndarray::array;

    fn gram_defect(u: &QuatMatrix) -> f64 {
        let g = u.conj_transpose().matmul(u).unwrap();
        g.distance(&QuatMatrix::identity(u.ncols()))
    }

    fn diag_real(d: &[f64]) -> QuatMatrix {
        let n = d.len();
        QuatMatrix::from_fn(n, n, |i, j| if i == j { Quaternion::from_real(d[i]) } else { Quaternion::ZERO })
    }

    #[test]
    fn diagonal_input() {
        let z = Array2::zeros((2, 2));
        let a = QuatMatrix::from_parts(array![[3.0, 0.0], [0.0, 1.0]], z.clone(), z.clone(), z).unwrap();
        let f = qsvd(&a).unwrap();
        assert_eq!(f.sigma, vec![3.0, 1.0]);
        assert!(f.u.distance(&QuatMatrix::identity(2)) < 1e-15);
        assert!(f.v.distance(&QuatMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn factor_invariants_various_shapes() {
        for (idx, &(m, n)) in [(1, 1), (1, 4), (4, 1), (5, 5), (7, 3), (3, 7), (30, 20), (20, 30)].iter().enumerate() {
            let a = random_quaternion_matrix(m, n, 40 + idx as u64);
            let f = qsvd(&a).unwrap();
            let k = m.min(n);
            assert_eq!(f.sigma.len(), k);
            assert_eq!(f.u.shape(), (m, k));
            assert_eq!(f.v.shape(), (n, k));
            assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
            assert!(gram_defect(&f.u) < 1e-8, "U for {m}x{n}");
            assert!(gram_defect(&f.v) < 1e-8, "V for {m}x{n}");
            let err = f.reconstruct().distance(&a);
            assert!(err <= 1e-8 * a.frobenius_norm().max(1.0), "{m}x{n}: {err}");
        }
    }

    #[test]
    fn rank_deficient_input_gets_complete_u() {
        let left = random_unitary(5, 1);
        let right = random_unitary(5, 2);
        let a = left.matmul(&diag_real(&[1.0, 1.0, 0.0, 0.0, 0.0])).unwrap().matmul(&right.conj_transpose()).unwrap();
        let f = qsvd(&a).unwrap();
        assert_eq!(f.sigma.iter().filter(|&&s| s > 1e-10).count(), 2);
        assert!(gram_defect(&f.u) < 1e-8);
        assert!(gram_defect(&f.v) < 1e-8);
        assert!(f.reconstruct().distance(&a) < 1e-12);

        let zero = QuatMatrix::zeros(3, 2);
        let f = qsvd(&zero).unwrap();
        assert_eq!(f.sigma, vec![0.0, 0.0]);
        assert!(gram_defect(&f.u) < 1e-12);
        assert_eq!(numerical_rank(&zero, DEFAULT_RANK_TOL).unwrap(), 0);
    }

    #[test]
    fn deterministic_and_sign_convention() {
        let a = random_quaternion_matrix(6, 4, 77);
        let f = qsvd(&a).unwrap();
        let g = qsvd(&a).unwrap();
        assert_eq!(f.u, g.u);
        assert_eq!(f.v, g.v);
        assert_eq!(f.sigma, g.sigma);
        for j in 0..4 {
            assert!(!leading_component_negative(&f.u.column(j)));
        }
    }

    #[test]
    fn truncation_tail_identity() {
        let a = random_quaternion_matrix(9, 7, 5);
        let f = qsvd(&a).unwrap();
        for r in 1..=7 {
            let t = f.truncate(r).unwrap();
            let tail: f64 = f.sigma[r..].iter().map(|s| s * s).sum();
            let err2 = t.distance(&a).powi(2);
            assert!((err2 - tail).abs() <= 1e-8 * tail.max(1e-300) + 1e-20, "r={r}");
            let fast = best_rank_approx(&a, r).unwrap();
            assert!(fast.distance(&t) <= 1e-10 * a.frobenius_norm());
        }
        assert!(matches!(f.truncate(0), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(f.truncate(8), Err(Error::RankOutOfRange { .. })));
        assert!(f.truncate(7).unwrap().distance(&a) < 1e-8);
    }

    #[test]
    fn wide_fast_truncation_matches() {
        let a = random_quaternion_matrix(4, 9, 15);
        let f = qsvd(&a).unwrap();
        for r in 1..=4 {
            let t = f.truncate(r).unwrap();
            assert!(best_rank_approx(&a, r).unwrap().distance(&t) <= 1e-10 * a.frobenius_norm());
        }
    }

    #[test]
    fn sweep_budget_exhaustion_is_reported() {
        let a = random_quaternion_matrix(12, 12, 3);
        assert!(matches!(qsvd_with_sweeps(&a, 1), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn householder_route_matches_jacobi() {
        for &(m, n) in &[(9, 6), (6, 9), (8, 8)] {
            let a = random_quaternion_matrix(m, n, (m * n) as u64);
            let f = qsvd(&a).unwrap();
            let h = qsvd_householder(&a).unwrap();
            for (x, y) in f.sigma.iter().zip(&h.sigma) {
                assert!((x - y).abs() <= 1e-12 * f.sigma[0]);
            }
            assert!(gram_defect(&h.u) < 1e-12);
            assert!(gram_defect(&h.v) < 1e-12);
            assert!(h.reconstruct().distance(&a) < 1e-12 * a.frobenius_norm());
            // vectors are only unique up to a unit phase; truncations are unique
            for r in 1..m.min(n) {
                assert!(f.truncate(r).unwrap().distance(&h.truncate(r).unwrap()) < 1e-10 * a.frobenius_norm());
            }
        }
    }

    #[test]
    fn singular_values_agree_with_factors() {
        let a = random_quaternion_matrix(8, 11, 19);
        let f = qsvd(&a).unwrap();
        let s = singular_values(&a).unwrap();
        for (x, y) in f.sigma.iter().zip(&s) {
            assert!((x - y).abs() <= 1e-12 * f.sigma[0]);
        }
    }
}
