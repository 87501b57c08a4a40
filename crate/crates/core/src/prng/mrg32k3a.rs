use crate::error::{Error, Result};

pub const M1: i64 = 4_294_967_087;
pub const M2: i64 = 4_294_944_443;
const A12: i64 = 1_403_580;
const A13N: i64 = 810_728;
const A21: i64 = 527_612;
const A23N: i64 = 1_370_589;
pub const NORM: f64 = 2.328_306_549_295_727_688e-10;

/// Combined multiple recursive generator MRG32k3a.
///
/// Histories are stored oldest first: `x1 = [x_{n-3}, x_{n-2}, x_{n-1}]`.
/// The recurrence runs in exact 64-bit integer arithmetic; every product
/// is below 2^53 so the output matches the floating-point reference
/// bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mrg32k3a {
    x1: [i64; 3],
    x2: [i64; 3],
}

impl Mrg32k3a {
    pub fn new(x1: [u32; 3], x2: [u32; 3]) -> Result<Self> {
        if x1.iter().any(|&v| i64::from(v) >= M1) || x2.iter().any(|&v| i64::from(v) >= M2) {
            return Err(Error::InvalidState("mrg32k3a component not below its modulus".into()));
        }
        if x1.iter().all(|&v| v == 0) || x2.iter().all(|&v| v == 0) {
            return Err(Error::InvalidState("mrg32k3a component triple is all zero".into()));
        }
        Ok(Self { x1: x1.map(i64::from), x2: x2.map(i64::from) })
    }

    pub fn x1(&self) -> [u32; 3] {
        self.x1.map(|v| v as u32)
    }

    pub fn x2(&self) -> [u32; 3] {
        self.x2.map(|v| v as u32)
    }

    /// Advances both components and returns the combined integer in `[0, m1)`.
    #[inline]
    pub fn next_combined(&mut self) -> u32 {
        let p1 = (A12 * self.x1[1] - A13N * self.x1[0]).rem_euclid(M1);
        self.x1 = [self.x1[1], self.x1[2], p1];
        let p2 = (A21 * self.x2[2] - A23N * self.x2[0]).rem_euclid(M2);
        self.x2 = [self.x2[1], self.x2[2], p2];
        (p1 - p2).rem_euclid(M1) as u32
    }

    /// Output in (0, 1); a combined value of zero maps to `m1 * norm`.
    #[inline]
    pub fn next_u01(&mut self) -> f64 {
        let z = self.next_combined();
        if z == 0 {
            M1 as f64 * NORM
        } else {
            f64::from(z) * NORM
        }
    }
}
