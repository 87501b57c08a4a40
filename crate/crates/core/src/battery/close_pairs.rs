//! Minimum pairwise distance between random points on the unit torus.

use std::f64::consts::PI;

use super::pvalue::{ks_pvalue, ks_statistic_uniform};
use super::Statistic;
use crate::bitstream::WordSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosePairsParams {
    pub n: usize,
    pub dim: usize,
    pub reps: usize,
}

impl ClosePairsParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.reps == 0 || !(2..=4).contains(&self.dim) {
            return Err(Error::Config(format!(
                "close_pairs: n={} dim={} reps={} (need n >= 2, dim in 2..=4)",
                self.n, self.dim, self.reps
            )));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        (self.n * self.dim * self.reps) as u64
    }
}

/// Volume of the `dim`-ball of radius `r`.
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    match dim {
        2 => PI * r * r,
        3 => 4.0 / 3.0 * PI * r.powi(3),
        4 => PI * PI / 2.0 * r.powi(4),
        _ => unreachable!("dimension checked at construction"),
    }
}

/// Euclidean distance on the unit torus.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs();
            let d = d.min(1.0 - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Smallest torus distance among `points` (flattened, `dim` per point).
pub fn min_distance(points: &[f64], dim: usize) -> f64 {
    let n = points.len() / dim;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = &points[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            let b = &points[j * dim..(j + 1) * dim];
            let mut d2 = 0.0;
            for (x, y) in a.iter().zip(b) {
                let d = (x - y).abs();
                let d = d.min(1.0 - d);
                d2 += d * d;
            }
            if d2 < best {
                best = d2;
            }
        }
    }
    best.sqrt()
}

/// `1 - exp(-pairs * V(D))`, approximately uniform under the null.
pub fn uniformized(n: usize, dim: usize, d: f64) -> f64 {
    let pairs = (n * (n - 1)) as f64 / 2.0;
    -(-pairs * ball_volume(dim, d)).exp_m1()
}

pub fn run<S: WordSource + ?Sized>(src: &mut S, p: &ClosePairsParams) -> Result<Vec<Statistic>> {
    p.validate()?;
    let mut points = vec![0.0; p.n * p.dim];
    let mut u = Vec::with_capacity(p.reps);
    for _ in 0..p.reps {
        for x in points.iter_mut() {
            *x = src.next_unit();
        }
        u.push(uniformized(p.n, p.dim, min_distance(&points, p.dim)));
    }
    let d = ks_statistic_uniform(&mut u);
    Ok(vec![Statistic::new("ks", ks_pvalue(p.reps as u64, d)?)])
}
