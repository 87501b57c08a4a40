//! Linear complexity of bit sequences.

/// Length of the shortest LFSR that generates `bits` (each 0 or 1).
pub fn berlekamp_massey(bits: &[u8]) -> usize {
    let n = bits.len();
    let mut c = vec![0u8; n + 1];
    let mut b = vec![0u8; n + 1];
    c[0] = 1;
    b[0] = 1;
    let mut len = 0usize;
    let mut last = 0usize; // position of the last length change, plus one
    let mut t = vec![0u8; n + 1];
    for i in 0..n {
        let mut d = bits[i];
        for j in 1..=len {
            d ^= c[j] & bits[i - j];
        }
        if d == 0 {
            continue;
        }
        let shift = i + 1 - last;
        t.copy_from_slice(&c);
        for j in 0..=n - shift {
            c[j + shift] ^= b[j];
        }
        if 2 * len <= i {
            len = i + 1 - len;
            last = i + 1;
            b.copy_from_slice(&t);
        }
    }
    len
}

/// Number of binary sequences of length `m` with linear complexity `l`,
/// as a power of two exponent (`None` when there are none).
pub fn complexity_count_log2(m: usize, l: usize) -> Option<i64> {
    match l {
        0 => Some(0),
        l if l > m => None,
        l => Some(((2 * m - 2 * l) as i64).min(2 * l as i64 - 1)),
    }
}

/// Mean linear complexity of a random sequence of length `m`.
pub fn complexity_mean(m: usize) -> f64 {
    let mf = m as f64;
    let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
    mf / 2.0 + (9.0 + sign) / 36.0 - (mf / 3.0 + 2.0 / 9.0) / 2f64.powf(mf)
}

/// The standardized deviation `(-1)^m (l - mean) + 2/9`.
pub fn standardized(m: usize, l: usize) -> f64 {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * (l as f64 - complexity_mean(m)) + 2.0 / 9.0
}

/// Category 0..7 of a standardized value, cut at -2.5, -1.5, ..., 2.5.
pub fn category(t: f64) -> usize {
    const CUTS: [f64; 6] = [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5];
    CUTS.iter().position(|&c| t <= c).unwrap_or(6)
}

/// Exact probabilities of the seven categories for blocks of `m` bits.
pub fn category_probabilities(m: usize) -> [f64; 7] {
    let mut p = [0.0; 7];
    for l in 0..=m {
        if let Some(e) = complexity_count_log2(m, l) {
            p[category(standardized(m, l))] += 2f64.powf((e - m as i64) as f64);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_sequences() {
        assert_eq!(berlekamp_massey(&[0, 0, 0, 0]), 0);
        assert_eq!(berlekamp_massey(&[1, 1, 1, 1]), 1);
        let mut single = vec![0u8; 7];
        single.push(1);
        assert_eq!(berlekamp_massey(&single), 8);
        let s: Vec<u8> = "1101011110001".bytes().map(|b| b - b'0').collect();
        assert_eq!(berlekamp_massey(&s), 4);
    }

    #[test]
    fn category_probabilities_near_limit() {
        let p = category_probabilities(500);
        let limit = [0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833];
        for (a, b) in p.iter().zip(limit) {
            assert!((a - b).abs() < 1e-6, "{p:?}");
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
