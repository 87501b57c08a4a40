//! Upper-tail probabilities for the battery's test statistics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PValue(f64);

impl PValue {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::Argument(format!("p-value {p} outside [0, 1]")))
        }
    }

    /// Clamps rounding spill (e.g. 1 + 1e-17) into [0, 1].
    pub(crate) fn clamped(p: f64) -> Self {
        debug_assert!(!p.is_nan());
        Self(p.clamp(0.0, 1.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Distance to the nearer end of [0, 1].
    pub fn two_sided(self) -> f64 {
        self.0.min(1.0 - self.0)
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let a = LANCZOS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_continued_fraction(a, x)
    }
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_continued_fraction(a, x)
    }
}

/// P(X >= stat) for X chi-square with `df` degrees of freedom.
pub fn chisq_pvalue(stat: f64, df: u64) -> Result<PValue> {
    if !(stat >= 0.0) || df < 1 {
        return Err(Error::Argument(format!("chisq_pvalue(stat={stat}, df={df})")));
    }
    Ok(PValue::clamped(gamma_q(df as f64 / 2.0, stat / 2.0)))
}

/// Probability mass of Poisson(lambda) at k.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (-lambda + k as f64 * lambda.ln() - ln_gamma(k as f64 + 1.0)).exp()
}

/// P(X >= c) for X ~ Poisson(lambda), summed directly over whichever side
/// of the distribution is smaller.
pub fn poisson_tail(lambda: f64, c: u64) -> Result<PValue> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Argument(format!("poisson_tail(lambda={lambda})")));
    }
    if c == 0 {
        return Ok(PValue::clamped(1.0));
    }
    if lambda == 0.0 {
        return Ok(PValue::clamped(0.0));
    }
    let p = if (c as f64) <= lambda {
        let head: f64 = (0..c).map(|k| poisson_pmf(lambda, k)).sum();
        1.0 - head
    } else {
        let mut term = poisson_pmf(lambda, c);
        let mut sum = 0.0;
        let mut k = c;
        while term > sum * 1e-17 && term > 0.0 {
            sum += term;
            k += 1;
            term *= lambda / k as f64;
        }
        sum
    };
    Ok(PValue::clamped(p))
}

/// Two-sided Kolmogorov-Smirnov statistic of `sample` against Uniform(0, 1).
/// Sorts `sample` in place.
pub fn ks_statistic_uniform(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample.iter().enumerate().fold(0.0f64, |d, (i, &u)| {
        let plus = (i + 1) as f64 / n - u;
        let minus = u - i as f64 / n;
        d.max(plus).max(minus)
    })
}

/// Largest sample size handled by the exact matrix method.
const KS_EXACT_MAX_N: u64 = 2000;

/// P(D_n >= d) for the two-sided Kolmogorov-Smirnov statistic.
///
/// Exact (Marsaglia-Tsang-Wang matrix method) for moderate n away from the
/// far tail; the far tail and large n use the limiting Kolmogorov series.
pub fn ks_pvalue(n: u64, d: f64) -> Result<PValue> {
    if n < 1 || !(0.0..=1.0).contains(&d) {
        return Err(Error::Argument(format!("ks_pvalue(n={n}, d={d})")));
    }
    if d <= 0.0 {
        return Ok(PValue::clamped(1.0));
    }
    let nf = n as f64;
    let s = d * d * nf;
    if s > 7.24 || (s > 3.76 && n > 99) {
        let p = 2.0 * (-(2.000071 + 0.331 / nf.sqrt() + 1.409 / nf) * s).exp();
        return Ok(PValue::clamped(p));
    }
    if n > KS_EXACT_MAX_N {
        return Ok(PValue::clamped(kolmogorov_q(nf.sqrt() * d)));
    }
    Ok(PValue::clamped(1.0 - ks_cdf_exact(n, d)))
}

/// Limiting distribution tail: Q(x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
fn kolmogorov_q(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    2.0 * sum
}

struct ScaledMatrix {
    m: usize,
    v: Vec<f64>,
    exp10: i32,
}

impl ScaledMatrix {
    fn mul(&self, other: &ScaledMatrix) -> ScaledMatrix {
        let m = self.m;
        let mut v = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                let a = self.v[i * m + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.v[k * m..(k + 1) * m];
                for (out, &b) in v[i * m..(i + 1) * m].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        let mut r = ScaledMatrix { m, v, exp10: self.exp10 + other.exp10 };
        if r.v[(m / 2) * m + m / 2] > 1e140 {
            r.v.iter_mut().for_each(|x| *x *= 1e-140);
            r.exp10 += 140;
        }
        r
    }

    fn pow(&self, n: u64) -> ScaledMatrix {
        if n == 1 {
            return ScaledMatrix { m: self.m, v: self.v.clone(), exp10: self.exp10 };
        }
        let half = self.pow(n / 2);
        let sq = half.mul(&half);
        if n % 2 == 0 {
            sq
        } else {
            self.mul(&sq)
        }
    }
}

/// P(D_n < d), Marsaglia, Tsang & Wang (2003).
fn ks_cdf_exact(n: u64, d: f64) -> f64 {
    let nf = n as f64;
    let k = (nf * d) as usize + 1;
    let m = 2 * k - 1;
    let h = k as f64 - nf * d;
    let mut hm = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i + 1 >= j {
                hm[i * m + j] = 1.0;
            }
        }
    }
    for i in 0..m {
        hm[i * m] -= h.powi(i as i32 + 1);
        hm[(m - 1) * m + i] -= h.powi((m - i) as i32);
    }
    if 2.0 * h - 1.0 > 0.0 {
        hm[(m - 1) * m] += (2.0 * h - 1.0).powi(m as i32);
    }
    for i in 0..m {
        for j in 0..m {
            if i + 1 > j {
                for g in 1..=(i + 1 - j) {
                    hm[i * m + j] /= g as f64;
                }
            }
        }
    }
    let q = ScaledMatrix { m, v: hm, exp10: 0 }.pow(n);
    let mut s = q.v[(k - 1) * m + k - 1];
    let mut e = q.exp10;
    for i in 1..=n {
        s = s * i as f64 / nf;
        if s < 1e-140 {
            s *= 1e140;
            e -= 140;
        }
    }
    s * 10f64.powi(e)
}

/// Outcome of a chi-square goodness-of-fit comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: u64,
    pub p: PValue,
}

/// Number of classes `chisq_gof` would keep for `n` observations.
pub fn merged_classes(probs: &[f64], n: f64, min_expected: f64) -> usize {
    let mut groups = 0;
    let mut exp = 0.0;
    for &p in probs {
        exp += p * n;
        if exp >= min_expected {
            groups += 1;
            exp = 0.0;
        }
    }
    groups.max(1)
}

/// Rejects sample sizes too small for a chi-square comparison.
pub fn check_classes(test: &str, probs: &[f64], n: f64, min_expected: f64) -> Result<()> {
    if merged_classes(probs, n, min_expected) < 2 {
        return Err(Error::Config(format!(
            "{test}: {n} observations leave fewer than two classes with {min_expected} expected"
        )));
    }
    Ok(())
}

/// Chi-square of observed `counts` against class `probs` (which should sum
/// to 1). Adjacent classes are merged left to right until each merged class
/// expects at least `min_expected` observations; an under-filled remainder
/// joins the last merged class.
pub fn chisq_gof(counts: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquare> {
    if counts.len() != probs.len() || counts.is_empty() {
        return Err(Error::Argument("chisq_gof: counts and probabilities differ in length".into()));
    }
    let total: u64 = counts.iter().sum();
    let n = total as f64;
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        obs += c as f64;
        exp += p * n;
        if exp >= min_expected {
            groups.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => groups.push((obs, exp)),
        }
    }
    if groups.len() < 2 {
        return Err(Error::Config(format!(
            "chisq_gof: only {} class(es) reach {min_expected} expected observations",
            groups.len()
        )));
    }
    let statistic: f64 = groups
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e) * (o - e) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let df = groups.len() as u64 - 1;
    let p = if statistic.is_finite() { chisq_pvalue(statistic, df)? } else { PValue::clamped(0.0) };
    Ok(ChiSquare { statistic, df, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chisq_zero_is_one() {
        for df in 1..20 {
            assert_eq!(chisq_pvalue(0.0, df).unwrap().get(), 1.0);
        }
    }

    #[test]
    fn chisq_domain() {
        assert!(chisq_pvalue(-1.0, 3).is_err());
        assert!(chisq_pvalue(1.0, 0).is_err());
        assert!(chisq_pvalue(f64::NAN, 1).is_err());
    }

    #[test]
    fn poisson_small_cases() {
        let want = 1.0 - (-1f64).exp() * 2.5;
        assert!((poisson_tail(1.0, 3).unwrap().get() - want).abs() < 1e-14);
        assert!((want - 0.080_301).abs() < 1e-6);
        assert_eq!(poisson_tail(4.0, 0).unwrap().get(), 1.0);
        assert!(poisson_tail(-1.0, 1).is_err());
    }

    #[test]
    fn ks_trivial() {
        assert_eq!(ks_pvalue(10, 0.0).unwrap().get(), 1.0);
        assert!(ks_pvalue(0, 0.1).is_err());
        assert!(ks_pvalue(10, 1.5).is_err());
        // n = 1: P(D_1 >= d) = 2 (1 - d) for d in [1/2, 1].
        assert!((ks_pvalue(1, 0.75).unwrap().get() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_examples() {
        let mut one = [0.5];
        assert_eq!(ks_statistic_uniform(&mut one), 0.5);
        let mut zeros = [0.0; 8];
        assert_eq!(ks_statistic_uniform(&mut zeros), 1.0);
    }

    #[test]
    fn gof_merges_sparse_classes() {
        let r = chisq_gof(&[10, 10, 1, 0], &[0.45, 0.45, 0.05, 0.05], 5.0).unwrap();
        assert_eq!(r.df, 1);
        let r = chisq_gof(&[25, 25, 25, 25], &[0.25; 4], 5.0).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p.get(), 1.0);
        assert!(chisq_gof(&[1, 1], &[0.5, 0.5], 5.0).is_err());
    }

    #[test]
    fn two_sided_distance() {
        assert_eq!(PValue::new(0.9995).unwrap().two_sided(), 1.0 - 0.9995);
        assert!(PValue::new(1.5).is_err());
    }
}
