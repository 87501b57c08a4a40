//! Simple +-1 random walks driven by successive bits.

use super::pvalue::{check_classes, chisq_gof, ln_choose};
use super::{Statistic, MIN_EXPECTED};
use crate::bitstream::{BitReader, WordSource};
use crate::error::{Error, Result};

pub const MAX_EXACT_LEN: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomWalkParams {
    pub len: usize,
    pub reps: usize,
}

impl RandomWalkParams {
    pub fn validate(&self) -> Result<()> {
        if self.len == 0 || self.len % 2 == 1 {
            return Err(Error::Config(format!("random_walk: L={} must be even and positive", self.len)));
        }
        if self.len > MAX_EXACT_LEN || self.reps == 0 {
            return Err(Error::Config(format!(
                "random_walk: L={} (max {MAX_EXACT_LEN}) reps={}",
                self.len, self.reps
            )));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        ((self.len * self.reps) as u64).div_ceil(32)
    }
}

/// Returns to the origin and the maximum position (at least 0) of the walk
/// whose steps are `+1` for a one bit and `-1` for a zero bit.
pub fn walk_statistics(bits: impl IntoIterator<Item = u32>) -> (usize, usize) {
    let (mut pos, mut returns, mut max) = (0i64, 0usize, 0i64);
    for b in bits {
        pos += if b == 1 { 1 } else { -1 };
        if pos == 0 {
            returns += 1;
        }
        max = max.max(pos);
    }
    (returns, max as usize)
}

/// `C(m, k) / 2^m`, exact for small `m`.
fn half_binomial(m: u64, k: u64) -> f64 {
    if k > m {
        return 0.0;
    }
    if m <= 62 {
        let mut c: u128 = 1;
        for i in 0..k.min(m - k) {
            c = c * u128::from(m - i) / u128::from(i + 1);
        }
        c as f64 * 2f64.powi(-(m as i32))
    } else {
        (ln_choose(m, k) - m as f64 * std::f64::consts::LN_2).exp()
    }
}

/// P(R = r) for r in 0..=L/2: `2^-(L-r) C(L-r, L/2)`.
pub fn returns_distribution(len: usize) -> Vec<f64> {
    let half = len as u64 / 2;
    (0..=half).map(|r| half_binomial(len as u64 - r, half)).collect()
}

/// P(M = m) for m in 0..=L, from the reflection principle
/// `P(M >= m) = P(S_L = m) + 2 P(S_L > m)` for m >= 1.
pub fn max_distribution(len: usize) -> Vec<f64> {
    let l = len as u64;
    // P(S_L = s) for s = 2h - L.
    let pmf_end = |s: i64| -> f64 {
        if s.abs() > len as i64 || (s + len as i64) % 2 != 0 {
            return 0.0;
        }
        half_binomial(l, ((s + len as i64) / 2) as u64)
    };
    let mut upper = vec![0.0; len + 2]; // upper[s] = P(S_L > s)
    for s in (0..=len).rev() {
        upper[s] = upper[s + 1] + pmf_end(s as i64 + 1);
    }
    let at_least = |m: usize| -> f64 {
        if m == 0 {
            1.0
        } else if m > len {
            0.0
        } else {
            pmf_end(m as i64) + 2.0 * upper[m]
        }
    };
    (0..=len).map(|m| at_least(m) - at_least(m + 1)).collect()
}

#[derive(Debug)]
pub struct RandomWalk {
    params: RandomWalkParams,
    returns: Vec<f64>,
    max: Vec<f64>,
}

impl RandomWalk {
    pub fn new(params: RandomWalkParams) -> Result<Self> {
        params.validate()?;
        let returns = returns_distribution(params.len);
        let max = max_distribution(params.len);
        check_classes("random_walk", &returns, params.reps as f64, MIN_EXPECTED)?;
        check_classes("random_walk", &max, params.reps as f64, MIN_EXPECTED)?;
        Ok(Self { params, returns, max })
    }

    pub fn returns_null(&self) -> &[f64] {
        &self.returns
    }

    pub fn max_null(&self) -> &[f64] {
        &self.max
    }

    pub fn run<S: WordSource + ?Sized>(&self, src: &mut S) -> Result<Vec<Statistic>> {
        let p = &self.params;
        let mut r_counts = vec![0u64; self.returns.len()];
        let mut m_counts = vec![0u64; self.max.len()];
        let mut reader = BitReader::new(src);
        for _ in 0..p.reps {
            let (r, m) = walk_statistics((0..p.len).map(|_| reader.bit()));
            r_counts[r] += 1;
            m_counts[m] += 1;
        }
        Ok(vec![
            Statistic::new("R", chisq_gof(&r_counts, &self.returns, MIN_EXPECTED)?.p),
            Statistic::new("M", chisq_gof(&m_counts, &self.max, MIN_EXPECTED)?.p),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_never_return() {
        assert_eq!(walk_statistics(std::iter::repeat(1).take(16)), (0, 16));
        assert_eq!(walk_statistics([1, 0, 0, 1]), (2, 1));
    }

    #[test]
    fn distributions_sum_to_one() {
        for len in [2, 4, 10, 64, 1024] {
            let r: f64 = returns_distribution(len).iter().sum();
            let m: f64 = max_distribution(len).iter().sum();
            assert!((r - 1.0).abs() < 1e-10, "{len} {r}");
            assert!((m - 1.0).abs() < 1e-10, "{len} {m}");
        }
    }

    #[test]
    fn odd_length_rejected() {
        assert!(RandomWalkParams { len: 5, reps: 1 }.validate().is_err());
        assert!(RandomWalkParams { len: 2048, reps: 1 }.validate().is_err());
    }
}
