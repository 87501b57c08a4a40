//! Knuth's gap test on unit values.

use super::pvalue::chisq_gof;
use super::{Statistic, MIN_EXPECTED};
use crate::bitstream::WordSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapParams {
    pub lo: f64,
    pub hi: f64,
    /// Unit values scanned.
    pub n: usize,
}

impl GapParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.lo && self.lo < self.hi && self.hi <= 1.0) || self.n == 0 {
            return Err(Error::Config(format!("gap: band [{}, {}) n={}", self.lo, self.hi, self.n)));
        }
        let p = self.hi - self.lo;
        let hits = self.n as f64 * p;
        if p >= 1.0 {
            return Err(Error::Config("gap: a band covering [0, 1) has no gaps to test".into()));
        }
        if hits * p < 2.0 * MIN_EXPECTED || hits * (1.0 - p) < 2.0 * MIN_EXPECTED {
            return Err(Error::Config(format!("gap: n={} too small for band width {p}", self.n)));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        self.n as u64
    }

    /// Gaps of this length or longer share the last class.
    pub fn tail_start(&self) -> usize {
        let q = 1.0 - (self.hi - self.lo);
        if q <= 0.0 {
            return 1;
        }
        ((1e-4f64).ln() / q.ln()).ceil().clamp(1.0, 10_000.0) as usize
    }
}

/// Lengths of the runs of misses before each hit; a trailing run without a
/// hit is dropped.
pub fn gaps(values: impl IntoIterator<Item = f64>, lo: f64, hi: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut run = 0;
    for u in values {
        if (lo..hi).contains(&u) {
            out.push(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    out
}

/// Geometric gap probabilities for hit probability `p`, classes 0..tail
/// with the last class holding every gap >= tail.
pub fn gap_probabilities(p: f64, tail: usize) -> Vec<f64> {
    let q = 1.0 - p;
    let mut probs: Vec<f64> = (0..tail).map(|g| p * q.powi(g as i32)).collect();
    probs.push(q.powi(tail as i32));
    probs
}

pub fn run<S: WordSource + ?Sized>(src: &mut S, p: &GapParams) -> Result<Vec<Statistic>> {
    p.validate()?;
    let tail = p.tail_start();
    let mut counts = vec![0u64; tail + 1];
    for g in gaps((0..p.n).map(|_| src.next_unit()), p.lo, p.hi) {
        counts[g.min(tail)] += 1;
    }
    let probs = gap_probabilities(p.hi - p.lo, tail);
    Ok(vec![Statistic::new("chi2", chisq_gof(&counts, &probs, MIN_EXPECTED)?.p)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counts() {
        assert_eq!(gaps([0.6, 0.2, 0.7, 0.3], 0.0, 0.5), vec![1, 1]);
        assert_eq!(gaps([0.1, 0.2, 0.3], 0.0, 0.5), vec![0, 0, 0]);
        assert!(gaps([0.9, 0.8], 0.0, 0.5).is_empty());
    }

    #[test]
    fn probabilities_sum_to_one() {
        let probs = gap_probabilities(0.125, GapParams { lo: 0.0, hi: 0.125, n: 1 }.tail_start());
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounds() {
        assert!(GapParams { lo: 0.5, hi: 0.5, n: 10 }.validate().is_err());
        assert!(GapParams { lo: -0.1, hi: 0.5, n: 10 }.validate().is_err());
        assert!(GapParams { lo: 0.0, hi: 1.0, n: 10 }.validate().is_err());
        assert!(GapParams { lo: 0.0, hi: 0.5, n: 10 }.validate().is_err());
        assert!(GapParams { lo: 0.25, hi: 0.75, n: 1000 }.validate().is_ok());
    }
}
