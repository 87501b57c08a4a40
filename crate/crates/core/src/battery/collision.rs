//! Dense collision counting: balls thrown into urns chosen by word slices.

use super::pvalue::{check_classes, chisq_gof};
use super::{slice_bits, Statistic, MIN_EXPECTED};
use crate::bitstream::WordSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionParams {
    pub n: usize,
    /// Urns `k = 2^log2_urns`.
    pub log2_urns: u32,
    pub drop_bits: u32,
    pub reps: usize,
}

impl CollisionParams {
    pub fn urns(&self) -> usize {
        1 << self.log2_urns
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 || self.n == 0 {
            return Err(Error::Config(format!("collision: n={} reps={}", self.n, self.reps)));
        }
        if self.log2_urns == 0 || self.log2_urns + self.drop_bits > 32 {
            return Err(Error::Config(format!(
                "collision: {} urn bits after dropping {} do not fit a word",
                self.log2_urns, self.drop_bits
            )));
        }
        if self.n > self.urns() {
            return Err(Error::Config(format!("collision: n={} exceeds k={}", self.n, self.urns())));
        }
        let density = (self.n as f64).powi(2) / (2.0 * self.urns() as f64);
        if !(1.0..=64.0).contains(&density) {
            return Err(Error::Config(format!("collision: n^2/(2k)={density} outside [1, 64]")));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        (self.n * self.reps) as u64
    }
}

/// Collisions `C = n - occupied` for the given urn indices.
pub fn collisions(urns: &[u32], scratch: &mut Vec<u32>) -> usize {
    scratch.clear();
    scratch.extend_from_slice(urns);
    scratch.sort_unstable();
    scratch.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Exact distribution of C for `n` balls in `k` urns, by the occupancy
/// recurrence: each ball lands in an occupied urn with probability j/k.
pub fn exact_distribution(n: usize, k: usize) -> Vec<f64> {
    let kf = k as f64;
    let mut occ = vec![0.0; n + 1];
    occ[0] = 1.0;
    for balls in 0..n {
        for j in (0..=balls + 1).rev() {
            let stay = occ[j] * j as f64 / kf;
            let arrive = if j > 0 { occ[j - 1] * (kf - (j - 1) as f64) / kf } else { 0.0 };
            occ[j] = stay + arrive;
        }
    }
    // C = n - j
    (0..n).map(|c| occ[n - c]).collect()
}

#[derive(Debug)]
pub struct Collision {
    params: CollisionParams,
    probs: Vec<f64>,
}

impl Collision {
    pub fn new(params: CollisionParams) -> Result<Self> {
        params.validate()?;
        let probs = exact_distribution(params.n, params.urns());
        check_classes("collision", &probs, params.reps as f64, MIN_EXPECTED)?;
        Ok(Self { params, probs })
    }

    pub fn null_distribution(&self) -> &[f64] {
        &self.probs
    }

    pub fn run<S: WordSource + ?Sized>(&self, src: &mut S) -> Result<Vec<Statistic>> {
        let p = &self.params;
        let mut counts = vec![0u64; self.probs.len()];
        let mut urns = vec![0u32; p.n];
        let mut scratch = Vec::with_capacity(p.n);
        for _ in 0..p.reps {
            for u in urns.iter_mut() {
                *u = slice_bits(src.next_word32(), p.drop_bits, p.log2_urns);
            }
            counts[collisions(&urns, &mut scratch)] += 1;
        }
        let chi = chisq_gof(&counts, &self.probs, MIN_EXPECTED)?;
        Ok(vec![Statistic::new("chi2", chi.p)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counts() {
        let mut s = Vec::new();
        assert_eq!(collisions(&[7], &mut s), 0);
        assert_eq!(collisions(&[0, 1, 0], &mut s), 1);
        assert_eq!(collisions(&[2, 2, 2, 2], &mut s), 3);
    }

    #[test]
    fn one_ball_never_collides() {
        assert_eq!(exact_distribution(1, 16), vec![1.0]);
    }

    #[test]
    fn bounds() {
        let ok = CollisionParams { n: 1 << 12, log2_urns: 18, drop_bits: 0, reps: 1 };
        assert!(ok.validate().is_ok());
        assert!(CollisionParams { n: 10, ..ok }.validate().is_err());
        assert!(CollisionParams { drop_bits: 20, ..ok }.validate().is_err());
        assert!(CollisionParams { n: 3, log2_urns: 1, drop_bits: 0, reps: 1 }.validate().is_err());
    }

    #[test]
    fn large_distribution_sums_to_one() {
        let d = exact_distribution(4096, 1 << 18);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let mean: f64 = d.iter().enumerate().map(|(c, p)| c as f64 * p).sum();
        assert!((mean - 31.9).abs() < 0.5, "{mean}");
    }
}
