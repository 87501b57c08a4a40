//! Birthday spacings: repeated gaps between sorted random cells.

use super::pvalue::{check_classes, chisq_gof, ln_gamma, poisson_pmf, poisson_tail, PValue};
use super::{slice_bits, Statistic, MIN_EXPECTED};
use crate::bitstream::WordSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BirthdayParams {
    pub n: usize,
    /// Cells `k = 2^log2_cells`.
    pub log2_cells: u32,
    /// Most significant bits skipped before the cell slice.
    pub drop_bits: u32,
    pub reps: usize,
}

/// Number of sorted configurations below which the exact null is used.
const EXACT_LIMIT: f64 = 2e6;

impl BirthdayParams {
    pub fn cells(&self) -> f64 {
        2f64.powi(self.log2_cells as i32)
    }

    pub fn lambda(&self) -> f64 {
        (self.n as f64).powi(3) / (4.0 * self.cells())
    }

    fn multisets(&self) -> f64 {
        let (n, k) = (self.n as f64, self.cells());
        (ln_gamma(n + k) - ln_gamma(n + 1.0) - ln_gamma(k)).exp()
    }

    pub fn uses_exact_null(&self) -> bool {
        self.multisets() <= EXACT_LIMIT
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.reps == 0 {
            return Err(Error::Config(format!("birthday_spacings: n={} reps={}", self.n, self.reps)));
        }
        if self.log2_cells == 0 || self.log2_cells + self.drop_bits > 32 {
            return Err(Error::Config(format!(
                "birthday_spacings: {} cell bits after dropping {} do not fit a word",
                self.log2_cells, self.drop_bits
            )));
        }
        let lambda = self.lambda();
        if !self.uses_exact_null() && !(1.0..=16.0).contains(&lambda) {
            return Err(Error::Config(format!("birthday_spacings: lambda={lambda} outside [1, 16]")));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        (self.n * self.reps) as u64
    }
}

/// Number of repeated values among the spacings of `cells` (sorted in place).
pub fn duplicated_spacings(cells: &mut [u32]) -> usize {
    cells.sort_unstable();
    let mut spacings: Vec<u32> = cells.windows(2).map(|w| w[1] - w[0]).collect();
    spacings.sort_unstable();
    spacings.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Exact distribution of the duplicated-spacings count for `n` points in
/// `k` cells, by walking sorted configurations with multinomial weights.
pub fn exact_distribution(n: usize, k: u32) -> Vec<f64> {
    let mut configs = Vec::new();
    enumerate_sorted(&mut Vec::with_capacity(n), n, k, &mut configs);
    // Weight of a sorted configuration: n! / prod(multiplicity!) / k^n.
    let ln_total = n as f64 * f64::from(k).ln();
    let ln_nfact = ln_gamma(n as f64 + 1.0);
    let mut probs = vec![0.0; n.max(1)];
    for (mut cfg, ln_mult) in configs {
        let y = duplicated_spacings(&mut cfg);
        probs[y] += (ln_nfact - ln_mult - ln_total).exp();
    }
    probs
}

fn enumerate_sorted(points: &mut Vec<u32>, n: usize, k: u32, out: &mut Vec<(Vec<u32>, f64)>) {
    if points.len() == n {
        let mut ln_mult = 0.0;
        let mut run = 1usize;
        for i in 1..=n {
            if i < n && points[i] == points[i - 1] {
                run += 1;
            } else {
                ln_mult += ln_gamma(run as f64 + 1.0);
                run = 1;
            }
        }
        out.push((points.clone(), ln_mult));
        return;
    }
    let start = points.last().copied().unwrap_or(0);
    for c in start..k {
        points.push(c);
        enumerate_sorted(points, n, k, out);
        points.pop();
    }
}

#[derive(Debug)]
pub struct Birthday {
    params: BirthdayParams,
    probs: Vec<f64>,
}

impl Birthday {
    pub fn new(params: BirthdayParams) -> Result<Self> {
        params.validate()?;
        let probs = if params.uses_exact_null() {
            exact_distribution(params.n, 1 << params.log2_cells)
        } else {
            let lambda = params.lambda();
            let top = (lambda + 12.0 * lambda.sqrt() + 12.0) as u64;
            let mut probs: Vec<f64> = (0..top).map(|y| poisson_pmf(lambda, y)).collect();
            probs.push(poisson_tail(lambda, top)?.get());
            probs
        };
        if params.reps > 1 {
            check_classes("birthday_spacings", &probs, params.reps as f64, MIN_EXPECTED)?;
        }
        Ok(Self { params, probs })
    }

    pub fn null_distribution(&self) -> &[f64] {
        &self.probs
    }

    pub fn run<S: WordSource + ?Sized>(&self, src: &mut S) -> Result<Vec<Statistic>> {
        let p = &self.params;
        let mut counts = vec![0u64; self.probs.len()];
        let mut cells = vec![0u32; p.n];
        let mut total = 0u64;
        for _ in 0..p.reps {
            for c in cells.iter_mut() {
                *c = slice_bits(src.next_word32(), p.drop_bits, p.log2_cells);
            }
            let y = duplicated_spacings(&mut cells);
            total += y as u64;
            let last = counts.len() - 1;
            counts[y.min(last)] += 1;
        }
        let pv = if p.reps == 1 {
            if p.uses_exact_null() {
                PValue::clamped(self.probs[total as usize..].iter().sum())
            } else {
                poisson_tail(p.lambda(), total)?
            }
        } else {
            chisq_gof(&counts, &self.probs, MIN_EXPECTED)?.p
        };
        Ok(vec![Statistic::new(if p.reps == 1 { "tail" } else { "chi2" }, pv)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_count() {
        assert_eq!(duplicated_spacings(&mut [5, 5, 9]), 0);
        assert_eq!(duplicated_spacings(&mut [1, 3, 5]), 1);
        assert_eq!(duplicated_spacings(&mut [0, 2, 4, 6, 7]), 2);
    }

    #[test]
    fn lambda_arithmetic() {
        let p = BirthdayParams { n: 1 << 10, log2_cells: 26, drop_bits: 0, reps: 1 };
        assert_eq!(p.lambda(), 4.0);
        assert!(p.validate().is_ok());
        let bad = BirthdayParams { n: 1 << 12, log2_cells: 26, drop_bits: 0, reps: 1 };
        assert!(bad.validate().is_err());
        let wide = BirthdayParams { n: 1 << 10, log2_cells: 26, drop_bits: 7, reps: 1 };
        assert!(wide.validate().is_err());
    }

    #[test]
    fn exact_distribution_sums_to_one() {
        let d = exact_distribution(4, 6);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
