//! Seeded random instances.
//!
//! The stream is `ChaCha8Rng::seed_from_u64(seed)`; uniforms are
//! `rng.random::<f64>()` (53-bit, in [0, 1)), and standard normals come from
//! the Box–Muller transform, consumed in pairs:
//!
//! ```text
//! u₁ = 1 − U₁ ∈ (0, 1],  u₂ = U₂
//! z₀ = √(−2 ln u₁)·cos(2π u₂),  z₁ = √(−2 ln u₁)·sin(2π u₂)
//! ```
//!
//! Matrices are filled component by component (A₀ … A₃), each row-major.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::matrix::QuatMatrix;
use crate::projections::{pi1, pi2};
use crate::quaternion::Quaternion;

pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn normal_matrix(&mut self, m: usize, n: usize) -> Array2<f64> {
        Array2::from_shape_simple_fn((m, n), || self.next_normal())
    }
}

/// All four components i.i.d. standard normal.
pub fn random_quaternion_matrix(m: usize, n: usize, seed: u64) -> QuatMatrix {
    let mut s = NormalStream::new(seed);
    let parts = std::array::from_fn(|_| s.normal_matrix(m, n));
    QuatMatrix::from_parts_unchecked(parts)
}

/// Zero real part, imaginary components i.i.d. standard normal.
pub fn gen_random_pure(m: usize, n: usize, seed: u64) -> QuatMatrix {
    let mut s = NormalStream::new(seed);
    let a1 = s.normal_matrix(m, n);
    let a2 = s.normal_matrix(m, n);
    let a3 = s.normal_matrix(m, n);
    QuatMatrix::from_parts_unchecked([Array2::zeros((m, n)), a1, a2, a3])
}

/// `pure_part(π₁(G, r))` for a standard-normal quaternion `G`. The result
/// is exactly pure with rank at most `4r` (typically equal).
pub fn gen_random_pure_lowrank(m: usize, n: usize, r: usize, seed: u64) -> Result<QuatMatrix> {
    let g = random_quaternion_matrix(m, n, seed);
    Ok(pi2(&pi1(&g, r)?))
}

/// `left (m×r) · right (r×n)` with standard-normal factors.
pub fn random_product(m: usize, n: usize, r: usize, seed: u64) -> QuatMatrix {
    let left = random_quaternion_matrix(m, r, seed);
    let right = random_quaternion_matrix(r, n, seed.wrapping_add(0x9E37_79B9_7F4A_7C15));
    left.matmul(&right).expect("inner dimensions agree")
}

/// Fixed 5×5 pure test instance, entries given to two decimals.
pub fn synthetic_5x5() -> QuatMatrix {
    let a1 = [
        [0.37, -0.79, 0.04, -0.73, -0.06],
        [-1.42, -0.10, 1.01, 1.59, -1.59],
        [-0.34, 0.38, 1.30, -0.66, 1.08],
        [-1.98, 0.83, 0.22, -0.77, 0.70],
        [-0.38, -0.14, 0.86, 0.54, 1.65],
    ];
    let a2 = [
        [0.29, -0.38, -0.13, -1.77, 0.20],
        [0.70, -0.69, 0.83, -0.16, -0.52],
        [-1.15, 1.00, -1.97, 0.63, 1.57],
        [1.86, -1.14, 0.12, -1.27, 0.77],
        [2.37, 0.15, 0.26, -0.30, -0.59],
    ];
    let a3 = [
        [0.33, 0.74, -1.40, -0.77, 0.86],
        [1.13, -1.32, 0.36, -0.02, 0.50],
        [0.25, -0.68, 0.36, -0.71, 0.77],
        [0.56, -0.35, 0.92, 0.87, -0.58],
        [0.64, -1.59, 0.37, -1.51, 0.19],
    ];
    QuatMatrix::from_fn(5, 5, |i, j| Quaternion::new(0.0, a1[i][j], a2[i][j], a3[i][j]))
}

/// Random n×n unitary quaternion matrix from Gram–Schmidt on a
/// standard-normal matrix.
pub fn random_unitary(n: usize, seed: u64) -> QuatMatrix {
    let g = random_quaternion_matrix(n, n, seed);
    let mut cols: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut x = g.column(j);
        for _pass in 0..2 {
            for c in &cols {
                let coef = c.iter().zip(&x).fold(Quaternion::ZERO, |acc, (a, b)| acc + a.conj() * *b);
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi = *xi - *ci * coef;
                }
            }
        }
        let norm = x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        cols.push(x.into_iter().map(|q| q.scale(1.0 / norm)).collect());
    }
    QuatMatrix::from_fn(n, n, |i, j| cols[j][i])
}
