//! The structured 4m×4n real representation of a quaternion matrix.
//!
//! Block layout (each block m×n):
//!
//! ```text
//! ⎡ A₀  −A₁  −A₂  −A₃ ⎤
//! ⎢ A₁   A₀  −A₃   A₂ ⎥
//! ⎢ A₂   A₃   A₀  −A₁ ⎥
//! ⎣ A₃  −A₂   A₁   A₀ ⎦
//! ```
//!
//! This is the left-multiplication matrix of a quaternion acting on
//! `(r, i, j, k)` coordinates, so the map is a ring homomorphism:
//! products, sums and conjugate transposes are preserved.

use ndarray::{s, Array2};

use crate::error::{Error, Result};
use crate::matrix::QuatMatrix;

/// `(sign, component)` of block `(row, col)`.
const LAYOUT: [[(f64, usize); 4]; 4] = [
    [(1.0, 0), (-1.0, 1), (-1.0, 2), (-1.0, 3)],
    [(1.0, 1), (1.0, 0), (-1.0, 3), (1.0, 2)],
    [(1.0, 2), (1.0, 3), (1.0, 0), (-1.0, 1)],
    [(1.0, 3), (-1.0, 2), (1.0, 1), (1.0, 0)],
];

#[derive(Debug, Clone, PartialEq)]
pub struct RealRep {
    data: Array2<f64>,
    m: usize,
    n: usize,
}

impl RealRep {
    /// Wraps a 4m×4n real matrix. The block structure is only checked by
    /// [`from_real_rep`].
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows % 4 != 0 || cols % 4 != 0 || rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!(
                "real representation must be 4m x 4n, got {rows}x{cols}"
            )));
        }
        Ok(RealRep {
            data,
            m: rows / 4,
            n: cols / 4,
        })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    /// Quaternion dimensions `(m, n)`.
    pub fn quat_shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }
}

pub fn to_real_rep(a: &QuatMatrix) -> RealRep {
    let (m, n) = a.shape();
    let mut data = Array2::zeros((4 * m, 4 * n));
    for (br, row) in LAYOUT.iter().enumerate() {
        for (bc, &(sign, comp)) in row.iter().enumerate() {
            let mut block = data.slice_mut(s![br * m..(br + 1) * m, bc * n..(bc + 1) * n]);
            block.assign(a.part(comp));
            if sign < 0.0 {
                block.mapv_inplace(|v| -v);
            }
        }
    }
    RealRep { data, m, n }
}

/// Inverse of [`to_real_rep`]. Each component appears in four blocks; the
/// four signed copies are averaged, which is the orthogonal projection onto
/// the structured subspace. Fails if the copies disagree by more than
/// `1e-12` relative to the largest entry.
pub fn from_real_rep(x: &RealRep) -> Result<QuatMatrix> {
    let (m, n) = (x.m, x.n);
    let mut parts: [Array2<f64>; 4] = std::array::from_fn(|_| Array2::zeros((m, n)));
    for (br, row) in LAYOUT.iter().enumerate() {
        for (bc, &(sign, comp)) in row.iter().enumerate() {
            let block = x.data.slice(s![br * m..(br + 1) * m, bc * n..(bc + 1) * n]);
            parts[comp].scaled_add(0.25 * sign, &block);
        }
    }
    let scale = x.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut deviation = 0.0f64;
    for (br, row) in LAYOUT.iter().enumerate() {
        for (bc, &(sign, comp)) in row.iter().enumerate() {
            let block = x.data.slice(s![br * m..(br + 1) * m, bc * n..(bc + 1) * n]);
            for (b, p) in block.iter().zip(parts[comp].iter()) {
                deviation = deviation.max((sign * b - p).abs());
            }
        }
    }
    if deviation > 1e-12 * scale {
        return Err(Error::StructureViolation { deviation });
    }
    if parts.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFinite("real representation"));
    }
    Ok(QuatMatrix::from_parts_unchecked(parts))
}
