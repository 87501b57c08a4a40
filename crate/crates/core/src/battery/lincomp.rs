//! Linear complexity of one bit per word, in blocks.

use super::linear::{berlekamp_massey, category, category_probabilities, standardized};
use super::pvalue::chisq_gof;
use super::{Statistic, MIN_EXPECTED};
use crate::bitstream::WordSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearComplexityParams {
    pub block_len: usize,
    pub blocks: usize,
    /// Bit taken from each word, 0 = most significant.
    pub bit: u32,
}

impl LinearComplexityParams {
    pub fn validate(&self) -> Result<()> {
        if !(500..=5000).contains(&self.block_len) || self.blocks < 200 || self.bit > 31 {
            return Err(Error::Config(format!(
                "linear_complexity: M={} N={} bit={} (need M in 500..=5000, N >= 200, bit <= 31)",
                self.block_len, self.blocks, self.bit
            )));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        (self.block_len * self.blocks) as u64
    }
}

pub fn run<S: WordSource + ?Sized>(src: &mut S, p: &LinearComplexityParams) -> Result<Vec<Statistic>> {
    p.validate()?;
    let probs = category_probabilities(p.block_len);
    let mut counts = [0u64; 7];
    let mut block = vec![0u8; p.block_len];
    let shift = 31 - p.bit;
    for _ in 0..p.blocks {
        for b in block.iter_mut() {
            *b = (src.next_word32() >> shift & 1) as u8;
        }
        let l = berlekamp_massey(&block);
        counts[category(standardized(p.block_len, l))] += 1;
    }
    Ok(vec![Statistic::new("chi2", chisq_gof(&counts, &probs, MIN_EXPECTED)?.p)])
}
