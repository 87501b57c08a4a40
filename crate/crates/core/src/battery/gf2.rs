//! Dense bit matrices over GF(2).

/// Row-major bit matrix; column `c` of a row lives in word `c / 64`,
/// bit `c % 64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        let mask = 1u64 << (c % 64);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }
}

/// Rank over GF(2) by Gaussian elimination on row words.
pub fn gf2_rank(matrix: &BitMatrix) -> usize {
    let mut m = matrix.clone();
    let stride = m.stride;
    let mut rank = 0;
    for c in 0..m.cols {
        if rank == m.rows {
            break;
        }
        let (w, mask) = (c / 64, 1u64 << (c % 64));
        let Some(pivot) = (rank..m.rows).find(|&r| m.data[r * stride + w] & mask != 0) else {
            continue;
        };
        if pivot != rank {
            for k in 0..stride {
                m.data.swap(pivot * stride + k, rank * stride + k);
            }
        }
        let pivot_row: Vec<u64> = m.row(rank).to_vec();
        for r in rank + 1..m.rows {
            if m.data[r * stride + w] & mask != 0 {
                for (x, p) in m.data[r * stride..(r + 1) * stride].iter_mut().zip(&pivot_row) {
                    *x ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Probability that a uniformly random `rows x cols` GF(2) matrix has rank `r`.
pub fn rank_probability(rows: usize, cols: usize, r: usize) -> f64 {
    if r > rows.min(cols) {
        return 0.0;
    }
    let (m, n) = (rows as f64, cols as f64);
    let rf = r as f64;
    let mut log2p = rf * (m + n - rf) - m * n;
    for i in 0..r {
        let i = i as f64;
        log2p += (1.0 - 2f64.powf(i - m)).log2() + (1.0 - 2f64.powf(i - n)).log2()
            - (1.0 - 2f64.powf(i - rf)).log2();
    }
    2f64.powf(log2p)
}

/// Class probabilities for a square matrix: rank <= side-2, side-1, side.
pub fn rank_class_probabilities(side: usize) -> [f64; 3] {
    let full = rank_probability(side, side, side);
    let minus1 = if side >= 1 { rank_probability(side, side, side - 1) } else { 0.0 };
    [1.0 - full - minus1, minus1, full]
}
