//! Dense quaternion matrices stored as four real component planes.

use std::ops::{Add, Mul, Sub};

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// `A = A₀ + A₁i + A₂j + A₃k`, each component an m×n row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatMatrix {
    parts: [Array2<f64>; 4],
}

/// Which pair of imaginary components [`QuatMatrix::partial_conj`] negates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialConj {
    IJ,
    IK,
    JK,
}

impl QuatMatrix {
    pub fn zeros(m: usize, n: usize) -> Self {
        QuatMatrix {
            parts: std::array::from_fn(|_| Array2::zeros((m, n))),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        out.parts[0] = Array2::eye(n);
        out
    }

    /// Builds a matrix from its four components. All four must share a shape
    /// and contain only finite values.
    pub fn from_parts(a0: Array2<f64>, a1: Array2<f64>, a2: Array2<f64>, a3: Array2<f64>) -> Result<Self> {
        let dim = a0.dim();
        for p in [&a1, &a2, &a3] {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    op: "from_parts",
                    left: dim,
                    right: p.dim(),
                });
            }
        }
        let parts = [a0, a1, a2, a3];
        if parts.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite("quaternion matrix"));
        }
        Ok(QuatMatrix { parts })
    }

    /// Pure matrix `A₁i + A₂j + A₃k`.
    pub fn from_imag(a1: Array2<f64>, a2: Array2<f64>, a3: Array2<f64>) -> Result<Self> {
        let a0 = Array2::zeros(a1.dim());
        Self::from_parts(a0, a1, a2, a3)
    }

    pub(crate) fn from_parts_unchecked(parts: [Array2<f64>; 4]) -> Self {
        debug_assert!(parts.iter().all(|p| p.dim() == parts[0].dim()));
        QuatMatrix { parts }
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.parts[0].nrows()
    }

    pub fn ncols(&self) -> usize {
        self.parts[0].ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.parts[0].dim()
    }

    pub fn part(&self, c: usize) -> &Array2<f64> {
        &self.parts[c]
    }

    pub fn parts(&self) -> &[Array2<f64>; 4] {
        &self.parts
    }

    pub fn into_parts(self) -> [Array2<f64>; 4] {
        self.parts
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        let p = &self.parts;
        Quaternion::raw(p[0][[i, j]], p[1][[i, j]], p[2][[i, j]], p[3][[i, j]])
    }

    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        for (c, v) in q.components().into_iter().enumerate() {
            self.parts[c][[i, j]] = v;
        }
    }

    pub fn column(&self, j: usize) -> Vec<Quaternion> {
        (0..self.nrows()).map(|i| self.get(i, j)).collect()
    }

    pub fn is_pure(&self) -> bool {
        self.parts[0].iter().all(|&v| v == 0.0)
    }

    /// `Re(A) = A₀`.
    pub fn real_part(&self) -> Array2<f64> {
        self.parts[0].clone()
    }

    /// `A₁i + A₂j + A₃k`.
    pub fn pure_part(&self) -> QuatMatrix {
        let mut out = self.clone();
        out.parts[0].fill(0.0);
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.parts.iter().map(|p| p.iter().map(|v| v * v).sum::<f64>()).sum()
    }

    pub fn real_part_norm(&self) -> f64 {
        self.parts[0].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &QuatMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance: shape mismatch");
        let mut acc = 0.0;
        for (a, b) in self.parts.iter().zip(&other.parts) {
            acc += Zip::from(a).and(b).fold(0.0, |s, x, y| s + (x - y) * (x - y));
        }
        acc.sqrt()
    }

    /// `(A*)ᵢⱼ = conj(Aⱼᵢ)`.
    pub fn conj_transpose(&self) -> QuatMatrix {
        let [a0, a1, a2, a3] = &self.parts;
        QuatMatrix {
            parts: [
                a0.t().to_owned(),
                a1.t().mapv(|v| -v),
                a2.t().mapv(|v| -v),
                a3.t().mapv(|v| -v),
            ],
        }
    }

    pub fn partial_conj(&self, which: PartialConj) -> QuatMatrix {
        let negate = match which {
            PartialConj::IJ => [1, 2],
            PartialConj::IK => [1, 3],
            PartialConj::JK => [2, 3],
        };
        let mut out = self.clone();
        for c in negate {
            out.parts[c].mapv_inplace(|v| -v);
        }
        out
    }

    pub fn scale(&self, s: f64) -> QuatMatrix {
        QuatMatrix {
            parts: self.parts.clone().map(|p| p * s),
        }
    }

    /// `Σ cᵢ Mᵢ` over matrices of a common shape.
    pub fn linear_combination(terms: &[(f64, &QuatMatrix)]) -> QuatMatrix {
        let (first_c, first) = terms.first().expect("linear_combination needs a term");
        let mut out = first.scale(*first_c);
        for (c, m) in &terms[1..] {
            assert_eq!(m.shape(), out.shape(), "linear_combination: shape mismatch");
            for (o, p) in out.parts.iter_mut().zip(&m.parts) {
                o.scaled_add(*c, p);
            }
        }
        out
    }

    /// Quaternion matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &QuatMatrix) -> Result<QuatMatrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let (m, n) = (self.nrows(), rhs.ncols());
        let a = &self.parts;
        let b = &rhs.parts;
        let mut c: [Array2<f64>; 4] = std::array::from_fn(|_| Array2::zeros((m, n)));
        // (sign, left component, right component) for each output component
        const TERMS: [[(f64, usize, usize); 4]; 4] = [
            [(1.0, 0, 0), (-1.0, 1, 1), (-1.0, 2, 2), (-1.0, 3, 3)],
            [(1.0, 0, 1), (1.0, 1, 0), (1.0, 2, 3), (-1.0, 3, 2)],
            [(1.0, 0, 2), (-1.0, 1, 3), (1.0, 2, 0), (1.0, 3, 1)],
            [(1.0, 0, 3), (1.0, 1, 2), (-1.0, 2, 1), (1.0, 3, 0)],
        ];
        for (out, terms) in c.iter_mut().zip(TERMS.iter()) {
            for &(sign, l, r) in terms {
                general_mat_mul(sign, &a[l], &b[r], 1.0, out);
            }
        }
        Ok(QuatMatrix { parts: c })
    }

    pub fn max_abs_diff(&self, other: &QuatMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff: shape mismatch");
        self.parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| Zip::from(a).and(b).fold(0.0f64, |s, x, y| s.max((x - y).abs())))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&QuatMatrixJson::from(self)).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        let doc: QuatMatrixJson = serde_json::from_str(s)?;
        QuatMatrix::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl Add for &QuatMatrix {
    type Output = QuatMatrix;
    fn add(self, rhs: &QuatMatrix) -> QuatMatrix {
        QuatMatrix::linear_combination(&[(1.0, self), (1.0, rhs)])
    }
}

impl Sub for &QuatMatrix {
    type Output = QuatMatrix;
    fn sub(self, rhs: &QuatMatrix) -> QuatMatrix {
        QuatMatrix::linear_combination(&[(1.0, self), (-1.0, rhs)])
    }
}

impl Mul<f64> for &QuatMatrix {
    type Output = QuatMatrix;
    fn mul(self, rhs: f64) -> QuatMatrix {
        self.scale(rhs)
    }
}

/// On-disk JSON layout: `{"m":..,"n":..,"a0":[[..]],"a1":..,"a2":..,"a3":..}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct QuatMatrixJson {
    pub m: usize,
    pub n: usize,
    pub a0: Vec<Vec<f64>>,
    pub a1: Vec<Vec<f64>>,
    pub a2: Vec<Vec<f64>>,
    pub a3: Vec<Vec<f64>>,
}

impl From<&QuatMatrix> for QuatMatrixJson {
    fn from(a: &QuatMatrix) -> Self {
        let rows = |p: &Array2<f64>| p.rows().into_iter().map(|r| r.to_vec()).collect();
        QuatMatrixJson {
            m: a.nrows(),
            n: a.ncols(),
            a0: rows(&a.parts[0]),
            a1: rows(&a.parts[1]),
            a2: rows(&a.parts[2]),
            a3: rows(&a.parts[3]),
        }
    }
}

impl TryFrom<QuatMatrixJson> for QuatMatrix {
    type Error = Error;

    fn try_from(doc: QuatMatrixJson) -> Result<Self> {
        let (m, n) = (doc.m, doc.n);
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape(format!("{m}x{n}")));
        }
        let plane = |name: &str, rows: Vec<Vec<f64>>| -> Result<Array2<f64>> {
            if rows.len() != m || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidShape(format!("component {name} is not {m}x{n}")));
            }
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            Ok(Array2::from_shape_vec((m, n), flat).expect("shape checked"))
        };
        QuatMatrix::from_parts(
            plane("a0", doc.a0)?,
            plane("a1", doc.a1)?,
            plane("a2", doc.a2)?,
            plane("a3", doc.a3)?,
        )
    }
}
