//! Quaternion SVD by Householder bidiagonalization.
//!
//! For `m ≥ n` the matrix is reduced to a real upper bidiagonal `B` with
//! `A = Q_L·B·Q_R*`. Each step uses a quaternion Householder reflector
//! `H = I − τ·w·w*` followed by a unit phase that makes the new diagonal or
//! superdiagonal entry real and non-negative. The real SVD of `B` then gives
//! `A = (Q_L·U_B)·Σ·(Q_R·V_B)*`.
//!
//! This costs a small fraction of a Jacobi run and is what the iterative
//! solvers use for their rank projection. It is backward stable in the
//! usual absolute sense; the Jacobi routine remains the reference for
//! small singular values.

use faer::Mat;

use crate::columns::{axpy_right, conj_dot, ColumnSet};
use crate::error::{Error, Result};
use crate::matrix::QuatMatrix;
use crate::quaternion::Quaternion;

/// `H = I − τ·w·w*` acting on coordinates `start..`, followed (on the
/// reduction side) by a unit phase at coordinate `start`.
struct Reflector {
    start: usize,
    w: ColumnSet,
    tau: f64,
    phase: Quaternion,
}

impl Reflector {
    /// Reflector mapping `x` to `−ph·‖x‖·e₁` where `ph = x₁/|x₁|`. Returns the
    /// reflector and `‖x‖`.
    fn annihilating(x: ColumnSet, start: usize) -> (Self, f64) {
        let mu = x.total_norm_sqr().sqrt();
        if mu == 0.0 {
            let r = Reflector {
                start,
                w: x,
                tau: 0.0,
                phase: Quaternion::ONE,
            };
            return (r, 0.0);
        }
        let x1 = x.get(0, 0);
        let a1 = x1.modulus();
        let ph = if a1 > 0.0 { x1.scale(1.0 / a1) } else { Quaternion::ONE };
        let mut w = x;
        w.set(0, 0, x1 + ph.scale(mu));
        // reflected vector is y·e₁ with y = −ph·μ; the phase conj(y)/|y| makes it μ
        let r = Reflector {
            start,
            w,
            tau: 1.0 / (mu * (mu + a1)),
            phase: -ph.conj(),
        };
        (r, mu)
    }

    /// `Y ← H·Y` on rows `start..` of every column.
    fn apply(&self, y: &mut ColumnSet) {
        if self.tau == 0.0 {
            return;
        }
        for j in 0..y.ncols {
            let s = conj_dot(self.w.planes(0, 0), y.planes(j, self.start));
            axpy_right(y.planes_mut(j, self.start), self.w.planes(0, 0), s.scale(-self.tau));
        }
    }
}

struct Bidiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
    left: Vec<Reflector>,
    right: Vec<Reflector>,
}

/// Reduces a tall (`m ≥ n`) matrix. The working copy is consumed.
fn bidiagonalize(mut w: ColumnSet) -> Bidiagonal {
    let (m, n) = (w.nrows, w.ncols);
    debug_assert!(m >= n);
    let mut d = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n {
        let mut x = ColumnSet::zeros(m - k, 1);
        for (dst, src) in x.planes_mut(0, 0).into_iter().zip(w.planes(k, k)) {
            dst.copy_from_slice(src);
        }
        let (h, mu) = Reflector::annihilating(x, k);
        if h.tau != 0.0 {
            for j in k + 1..n {
                let s = conj_dot(h.w.planes(0, 0), w.planes(j, k));
                axpy_right(w.planes_mut(j, k), h.w.planes(0, 0), s.scale(-h.tau));
            }
            for j in k + 1..n {
                let v = w.get(j, k);
                w.set(j, k, h.phase * v);
            }
        }
        d.push(mu);
        left.push(h);

        if k + 1 == n {
            break;
        }
        // row k, columns k+1.., conjugated into a column vector
        let len = n - k - 1;
        let mut c = ColumnSet::zeros(len, 1);
        for t in 0..len {
            c.set(0, t, w.get(k + 1 + t, k).conj());
        }
        let (g, nu) = Reflector::annihilating(c, k + 1);
        if g.tau != 0.0 {
            // rows k+1.. of W ← W·H, then column k+1 ← column k+1 · conj(phase)
            let rows = m - k - 1;
            let mut t = ColumnSet::zeros(rows, 1);
            for jj in 0..len {
                axpy_right(t.planes_mut(0, 0), w.planes(k + 1 + jj, k + 1), g.w.get(0, jj));
            }
            for jj in 0..len {
                let coef = g.w.get(0, jj).conj().scale(-g.tau);
                axpy_right(w.planes_mut(k + 1 + jj, k + 1), t.planes(0, 0), coef);
            }
            let ph = g.phase.conj();
            for i in k + 1..m {
                let v = w.get(k + 1, i);
                w.set(k + 1, i, v * ph);
            }
        }
        e.push(nu);
        right.push(g);
    }
    Bidiagonal { d, e, left, right }
}

impl Bidiagonal {
    /// `Y ← Q_L·Y` for `Y` with `m` rows.
    fn apply_left(&self, y: &mut ColumnSet) {
        for h in self.left.iter().rev() {
            let ph = h.phase.conj();
            for j in 0..y.ncols {
                let v = y.get(j, h.start);
                y.set(j, h.start, ph * v);
            }
            h.apply(y);
        }
    }

    /// `Z ← Q_R·Z` for `Z` with `n` rows.
    fn apply_right(&self, z: &mut ColumnSet) {
        for g in self.right.iter().rev() {
            let ph = g.phase.conj();
            for j in 0..z.ncols {
                let v = z.get(j, g.start);
                z.set(j, g.start, ph * v);
            }
            g.apply(z);
        }
    }

    /// Singular values (descending) and the corresponding left and right
    /// singular vectors of `B`.
    fn real_svd(&self) -> Result<(Vec<f64>, Mat<f64>, Mat<f64>)> {
        let n = self.d.len();
        let b = Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.d[i]
            } else if j == i + 1 {
                self.e[i]
            } else {
                0.0
            }
        });
        let svd = b.svd().map_err(|_| Error::NoConvergence {
            sweeps: 0,
            off_mass: f64::NAN,
        })?;
        let s = svd.S().column_vector();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
        let sigma = order.iter().map(|&i| s[i]).collect();
        let (u, v) = (svd.U(), svd.V());
        let u = Mat::from_fn(n, n, |i, j| u[(i, order[j])]);
        let v = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
        Ok((sigma, u, v))
    }
}

/// Embeds the first `cols` columns of a real `n×n` matrix into the top of an
/// `rows×cols` quaternion column set.
fn embed(real: &Mat<f64>, rows: usize, cols: usize) -> ColumnSet {
    let mut out = ColumnSet::zeros(rows, cols);
    for j in 0..cols {
        let [p0, _, _, _] = out.planes_mut(j, 0);
        for (i, x) in p0.iter_mut().take(real.nrows()).enumerate() {
            *x = real[(i, j)];
        }
    }
    out
}

fn tall_columns(a: &QuatMatrix) -> Result<(ColumnSet, bool)> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("{m}x{n}")));
    }
    let tall = m >= n;
    let w = if tall {
        ColumnSet::from_matrix(a)
    } else {
        ColumnSet::from_matrix(&a.conj_transpose())
    };
    if !w.total_norm_sqr().is_finite() {
        return Err(Error::NonFinite("qsvd input"));
    }
    Ok((w, tall))
}

/// Thin factors `(U, σ, V)`, σ descending, no sign normalization.
pub(crate) fn bidiag_factors(a: &QuatMatrix) -> Result<(QuatMatrix, Vec<f64>, QuatMatrix)> {
    let (w, tall) = tall_columns(a)?;
    let (m, n) = (w.nrows, w.ncols);
    let bd = bidiagonalize(w);
    let (sigma, ub, vb) = bd.real_svd()?;
    let mut u = embed(&ub, m, n);
    bd.apply_left(&mut u);
    let mut v = embed(&vb, n, n);
    bd.apply_right(&mut v);
    let (u, v) = (u.to_matrix(), v.to_matrix());
    Ok(if tall { (u, sigma, v) } else { (v, sigma, u) })
}

/// Leading `r` left singular vectors of the tall orientation, plus the
/// orientation flag.
pub(crate) fn leading_basis(a: &QuatMatrix, r: usize) -> Result<(QuatMatrix, bool)> {
    let (w, tall) = tall_columns(a)?;
    let (m, n) = (w.nrows, w.ncols);
    let bd = bidiagonalize(w);
    let (_, ub, _) = bd.real_svd()?;
    let mut u = embed(&ub, m, r.min(n));
    bd.apply_left(&mut u);
    Ok((u.to_matrix(), tall))
}
