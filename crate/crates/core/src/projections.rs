//! The two projections used by the alternating scheme.

use crate::error::Result;
use crate::matrix::QuatMatrix;
use crate::qsvd::best_rank_approx;

/// Projection onto matrices of rank at most `r` (QSVD truncation). When
/// σ_r = σ_{r+1} any of the tied minimizers may be returned.
pub fn pi1(x: &QuatMatrix, r: usize) -> Result<QuatMatrix> {
    best_rank_approx(x, r)
}

/// Projection onto pure matrices: drops the real component.
pub fn pi2(x: &QuatMatrix) -> QuatMatrix {
    x.pure_part()
}
