//! Quaternion scalars with Hamilton multiplication.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// `q = r + i·i + j·j + k·k` with `i² = j² = k² = ijk = −1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub(crate) r: f64,
    pub(crate) i: f64,
    pub(crate) j: f64,
    pub(crate) k: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::raw(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::raw(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::raw(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::raw(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::raw(0.0, 0.0, 0.0, 1.0);

    pub(crate) const fn raw(r: f64, i: f64, j: f64, k: f64) -> Self {
        Quaternion { r, i, j, k }
    }

    /// Panics if any component is NaN or infinite.
    pub fn new(r: f64, i: f64, j: f64, k: f64) -> Self {
        Self::try_new(r, i, j, k).expect("quaternion components must be finite")
    }

    pub fn try_new(r: f64, i: f64, j: f64, k: f64) -> Result<Self> {
        if [r, i, j, k].iter().all(|c| c.is_finite()) {
            Ok(Quaternion { r, i, j, k })
        } else {
            Err(Error::NonFinite("quaternion"))
        }
    }

    pub fn from_real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn i(&self) -> f64 {
        self.i
    }
    pub fn j(&self) -> f64 {
        self.j
    }
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn components(&self) -> [f64; 4] {
        [self.r, self.i, self.j, self.k]
    }

    pub fn conj(&self) -> Self {
        Quaternion::raw(self.r, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.r * self.r + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn modulus(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_pure(&self) -> bool {
        self.r == 0.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::raw(self.r * s, self.i * s, self.j * s, self.k * s)
    }

    /// `q / |q|`, or `None` for the zero quaternion.
    pub fn unit(&self) -> Option<Self> {
        let m = self.modulus();
        (m > 0.0).then(|| self.scale(1.0 / m))
    }
}

/// Hamilton product `p · q`.
pub fn hamilton_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::raw(
        p.r * q.r - p.i * q.i - p.j * q.j - p.k * q.k,
        p.r * q.i + p.i * q.r + p.j * q.k - p.k * q.j,
        p.r * q.j - p.i * q.k + p.j * q.r + p.k * q.i,
        p.r * q.k + p.i * q.j - p.j * q.i + p.k * q.r,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        hamilton_mul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::raw(self.r + rhs.r, self.i + rhs.i, self.j + rhs.j, self.k + rhs.k)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::raw(self.r - rhs.r, self.i - rhs.i, self.j - rhs.j, self.k - rhs.k)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::raw(-self.r, -self.i, -self.j, -self.k)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.r, self.i, self.j, self.k)
    }
}
