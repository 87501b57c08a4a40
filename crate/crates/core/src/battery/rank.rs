//! Ranks of random square bit matrices.

use super::gf2::{gf2_rank, rank_class_probabilities, BitMatrix};
use super::pvalue::chisq_gof;
use super::Statistic;
use crate::bitstream::{BitReader, WordSource};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixRankParams {
    pub side: usize,
    pub reps: usize,
}

impl MatrixRankParams {
    pub fn validate(&self) -> Result<()> {
        if self.side == 0 || self.reps == 0 {
            return Err(Error::Config(format!("matrix_rank: L={} reps={}", self.side, self.reps)));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        ((self.side * self.side * self.reps) as u64).div_ceil(32)
    }
}

/// Class of a rank: 0 for <= L-2, 1 for L-1, 2 for full rank.
pub fn rank_class(side: usize, rank: usize) -> usize {
    (rank + 2).saturating_sub(side).min(2)
}

pub fn run<S: WordSource + ?Sized>(src: &mut S, p: &MatrixRankParams) -> Result<Vec<Statistic>> {
    p.validate()?;
    let probs = rank_class_probabilities(p.side);
    let mut counts = [0u64; 3];
    let mut reader = BitReader::new(src);
    for _ in 0..p.reps {
        let mut m = BitMatrix::zeros(p.side, p.side);
        for r in 0..p.side {
            let mut c = 0;
            while c < p.side {
                let take = (p.side - c).min(32) as u32;
                let bits = reader.bits(take);
                for k in 0..take {
                    if bits >> (take - 1 - k) & 1 == 1 {
                        m.set(r, c + k as usize, true);
                    }
                }
                c += take as usize;
            }
        }
        counts[rank_class(p.side, gf2_rank(&m))] += 1;
    }
    Ok(vec![Statistic::new("chi2", chisq_gof(&counts, &probs, 0.0)?.p)])
}
