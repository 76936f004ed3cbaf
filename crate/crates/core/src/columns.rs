//! Column-major planar storage and the inner kernels shared by the
//! factorizations. Column `j` occupies `data[4·rows·j .. 4·rows·(j+1)]` as
//! four contiguous planes (r, i, j, k), so every kernel below runs over
//! unit-stride slices.

use ndarray::Array2;

use crate::matrix::QuatMatrix;
use crate::quaternion::Quaternion;

pub(crate) type Planes<'a> = [&'a [f64]; 4];
pub(crate) type PlanesMut<'a> = [&'a mut [f64]; 4];

#[derive(Debug, Clone)]
pub(crate) struct ColumnSet {
    pub(crate) nrows: usize,
    pub(crate) ncols: usize,
    data: Vec<f64>,
}

impl ColumnSet {
    pub(crate) fn zeros(nrows: usize, ncols: usize) -> Self {
        ColumnSet {
            nrows,
            ncols,
            data: vec![0.0; 4 * nrows * ncols],
        }
    }

    pub(crate) fn from_matrix(a: &QuatMatrix) -> Self {
        let (m, n) = a.shape();
        let mut out = ColumnSet::zeros(m, n);
        for (c, part) in a.parts().iter().enumerate() {
            for ((i, j), &v) in part.indexed_iter() {
                out.data[4 * m * j + c * m + i] = v;
            }
        }
        out
    }

    pub(crate) fn identity(n: usize) -> Self {
        let mut out = ColumnSet::zeros(n, n);
        for j in 0..n {
            out.data[4 * n * j + j] = 1.0;
        }
        out
    }

    pub(crate) fn to_matrix(&self) -> QuatMatrix {
        let m = self.nrows;
        let parts: [Array2<f64>; 4] =
            std::array::from_fn(|c| Array2::from_shape_fn((m, self.ncols), |(i, j)| self.data[4 * m * j + c * m + i]));
        QuatMatrix::from_parts_unchecked(parts)
    }

    pub(crate) fn col(&self, j: usize) -> &[f64] {
        let len = 4 * self.nrows;
        &self.data[len * j..len * (j + 1)]
    }

    /// Rows `from..` of column `j`, split into planes.
    pub(crate) fn planes(&self, j: usize, from: usize) -> Planes<'_> {
        split_planes(self.col(j), self.nrows, from)
    }

    pub(crate) fn planes_mut(&mut self, j: usize, from: usize) -> PlanesMut<'_> {
        let m = self.nrows;
        let len = 4 * m;
        split_planes_mut(&mut self.data[len * j..len * (j + 1)], m, from)
    }

    pub(crate) fn pair_mut(&mut self, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(p < q);
        let len = 4 * self.nrows;
        let (head, tail) = self.data.split_at_mut(len * q);
        (&mut head[len * p..len * (p + 1)], &mut tail[..len])
    }

    pub(crate) fn get(&self, j: usize, i: usize) -> Quaternion {
        let c = self.col(j);
        let m = self.nrows;
        Quaternion::raw(c[i], c[m + i], c[2 * m + i], c[3 * m + i])
    }

    pub(crate) fn set(&mut self, j: usize, i: usize, q: Quaternion) {
        let m = self.nrows;
        let base = 4 * m * j + i;
        for (c, v) in q.components().into_iter().enumerate() {
            self.data[base + c * m] = v;
        }
    }

    pub(crate) fn norm_sqr(&self, j: usize) -> f64 {
        self.col(j).iter().map(|v| v * v).sum()
    }

    pub(crate) fn total_norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

pub(crate) fn split_planes(col: &[f64], m: usize, from: usize) -> Planes<'_> {
    std::array::from_fn(|c| &col[c * m + from..(c + 1) * m])
}

pub(crate) fn split_planes_mut(col: &mut [f64], m: usize, from: usize) -> PlanesMut<'_> {
    let (p0, rest) = col.split_at_mut(m);
    let (p1, rest) = rest.split_at_mut(m);
    let (p2, p3) = rest.split_at_mut(m);
    [&mut p0[from..], &mut p1[from..], &mut p2[from..], &mut p3[from..]]
}

/// `Σᵢ conj(pᵢ)·qᵢ`.
pub(crate) fn conj_dot(p: Planes<'_>, q: Planes<'_>) -> Quaternion {
    let [p0, p1, p2, p3] = p;
    let [q0, q1, q2, q3] = q;
    let m = p0.len();
    let mut acc = [[0.0f64; 4]; 4];
    let chunks = m / 4;
    for c in 0..chunks {
        for l in 0..4 {
            let t = 4 * c + l;
            let (a0, a1, a2, a3) = (p0[t], p1[t], p2[t], p3[t]);
            let (b0, b1, b2, b3) = (q0[t], q1[t], q2[t], q3[t]);
            acc[0][l] += a0 * b0 + a1 * b1 + a2 * b2 + a3 * b3;
            acc[1][l] += a0 * b1 - a1 * b0 - a2 * b3 + a3 * b2;
            acc[2][l] += a0 * b2 + a1 * b3 - a2 * b0 - a3 * b1;
            acc[3][l] += a0 * b3 - a1 * b2 + a2 * b1 - a3 * b0;
        }
    }
    let mut out = [0.0f64; 4];
    for (o, a) in out.iter_mut().zip(&acc) {
        *o = (a[0] + a[1]) + (a[2] + a[3]);
    }
    for t in 4 * chunks..m {
        let (a0, a1, a2, a3) = (p0[t], p1[t], p2[t], p3[t]);
        let (b0, b1, b2, b3) = (q0[t], q1[t], q2[t], q3[t]);
        out[0] += a0 * b0 + a1 * b1 + a2 * b2 + a3 * b3;
        out[1] += a0 * b1 - a1 * b0 - a2 * b3 + a3 * b2;
        out[2] += a0 * b2 + a1 * b3 - a2 * b0 - a3 * b1;
        out[3] += a0 * b3 - a1 * b2 + a2 * b1 - a3 * b0;
    }
    Quaternion::raw(out[0], out[1], out[2], out[3])
}

/// `yᵢ ← yᵢ + xᵢ·f`.
pub(crate) fn axpy_right(y: PlanesMut<'_>, x: Planes<'_>, f: Quaternion) {
    let [y0, y1, y2, y3] = y;
    let [x0, x1, x2, x3] = x;
    let (f0, f1, f2, f3) = (f.r, f.i, f.j, f.k);
    let m = y0.len();
    for t in 0..m {
        let (a0, a1, a2, a3) = (x0[t], x1[t], x2[t], x3[t]);
        y0[t] += a0 * f0 - a1 * f1 - a2 * f2 - a3 * f3;
        y1[t] += a0 * f1 + a1 * f0 + a2 * f3 - a3 * f2;
        y2[t] += a0 * f2 - a1 * f3 + a2 * f0 + a3 * f1;
        y3[t] += a0 * f3 + a1 * f2 - a2 * f1 + a3 * f0;
    }
}

/// `q ← q·f` followed by the plane rotation
/// `(p, q) ← (c·p − s·q, s·p + c·q)`.
pub(crate) fn rotate_pair(p: &mut [f64], q: &mut [f64], m: usize, f: Quaternion, c: f64, s: f64) {
    let [p0, p1, p2, p3] = split_planes_mut(p, m, 0);
    let [q0, q1, q2, q3] = split_planes_mut(q, m, 0);
    let (f0, f1, f2, f3) = (f.r, f.i, f.j, f.k);
    for t in 0..m {
        let (x0, x1, x2, x3) = (q0[t], q1[t], q2[t], q3[t]);
        let y0 = x0 * f0 - x1 * f1 - x2 * f2 - x3 * f3;
        let y1 = x0 * f1 + x1 * f0 + x2 * f3 - x3 * f2;
        let y2 = x0 * f2 - x1 * f3 + x2 * f0 + x3 * f1;
        let y3 = x0 * f3 + x1 * f2 - x2 * f1 + x3 * f0;
        let (a0, a1, a2, a3) = (p0[t], p1[t], p2[t], p3[t]);
        p0[t] = c * a0 - s * y0;
        p1[t] = c * a1 - s * y1;
        p2[t] = c * a2 - s * y2;
        p3[t] = c * a3 - s * y3;
        q0[t] = s * a0 + c * y0;
        q1[t] = s * a1 + c * y1;
        q2[t] = s * a2 + c * y2;
        q3[t] = s * a3 + c * y3;
    }
}
