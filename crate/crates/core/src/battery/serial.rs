//! Frequencies of non-overlapping t-bit blocks.

use super::pvalue::{chisq_gof, ChiSquare};
use super::Statistic;
use crate::bitstream::{BitReader, WordSource};
use crate::error::{Error, Result};

pub const MAX_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SerialParams {
    pub bits: u32,
    pub blocks: u64,
}

impl SerialParams {
    pub fn validate(&self) -> Result<()> {
        if self.bits == 0 || self.bits > MAX_BITS {
            return Err(Error::Config(format!("serial_frequency: bits={} outside 1..={MAX_BITS}", self.bits)));
        }
        if self.blocks < 5 << self.bits {
            return Err(Error::Config(format!(
                "serial_frequency: blocks={} below 5 * 2^{}",
                self.blocks, self.bits
            )));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        (u64::from(self.bits) * self.blocks).div_ceil(32)
    }
}

pub fn block_counts<S: WordSource + ?Sized>(src: &mut S, p: &SerialParams) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << p.bits];
    let mut reader = BitReader::new(src);
    for _ in 0..p.blocks {
        counts[reader.bits(p.bits) as usize] += 1;
    }
    counts
}

pub fn statistic(counts: &[u64]) -> Result<ChiSquare> {
    let probs = vec![1.0 / counts.len() as f64; counts.len()];
    chisq_gof(counts, &probs, 0.0)
}

pub fn run<S: WordSource + ?Sized>(src: &mut S, p: &SerialParams) -> Result<Vec<Statistic>> {
    let chi = statistic(&block_counts(src, p))?;
    Ok(vec![Statistic::new("chi2", chi.p)])
}
