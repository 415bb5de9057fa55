use crate::special::clamp_p;

/// Rank over GF(2) of a matrix given as row bitmasks.
pub fn gf2_rank(rows: &mut [u64], cols: usize) -> usize {
    let mut rank = 0;
    for col in (0..cols).rev() {
        let bit = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= p;
            }
        }
        rank += 1;
    }
    rank
}

/// Probabilities that a random `m x q` binary matrix has rank `m`, `m - 1`,
/// or less.
pub fn rank_probabilities(m: usize, q: usize) -> [f64; 3] {
    let p_rank = |r: usize| {
        let exponent = (r * (q + m - r)) as f64 - (m * q) as f64;
        (0..r).fold(2f64.powf(exponent), |acc, i| {
            let i = i as f64;
            acc * (1.0 - 2f64.powf(i - q as f64)) * (1.0 - 2f64.powf(i - m as f64)) / (1.0 - 2f64.powf(i - r as f64))
        })
    };
    let full = p_rank(m);
    let minus_one = p_rank(m - 1);
    [full, minus_one, 1.0 - full - minus_one]
}

/// Matrices of full rank, rank m - 1, and lower.
fn rank_counts(bits: &[u8], m: usize, q: usize) -> [u64; 3] {
    let size = m * q;
    let mut f = [0u64; 3];
    let mut rows = vec![0u64; m];
    for mat in bits.chunks_exact(size) {
        for (row, chunk) in rows.iter_mut().zip(mat.chunks_exact(q)) {
            *row = chunk.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        }
        let r = gf2_rank(&mut rows, q);
        f[if r == m { 0 } else if r + 1 == m { 1 } else { 2 }] += 1;
    }
    f
}

fn rank_p_value(f: [u64; 3], probs: [f64; 3]) -> f64 {
    let n = f.iter().sum::<u64>() as f64;
    let chi2: f64 = f
        .iter()
        .zip(probs)
        .map(|(&obs, p)| (obs as f64 - p * n).powi(2) / (p * n))
        .sum();
    clamp_p((-chi2 / 2.0).exp())
}

/// 32 x 32 matrices filled row by row; leftover bits are dropped.
pub fn binary_matrix_rank(bits: &[u8]) -> f64 {
    rank_p_value(rank_counts(bits, 32, 32), rank_probabilities(32, 32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nist::ascii;

    #[test]
    fn ranks() {
        let mut id: Vec<u64> = (0..32).map(|i| 1u64 << i).collect();
        assert_eq!(gf2_rank(&mut id, 32), 32);
        let mut zero = vec![0u64; 32];
        assert_eq!(gf2_rank(&mut zero, 32), 0);
        // third row is the xor of the first two
        let mut dep = vec![0b101, 0b011, 0b110];
        assert_eq!(gf2_rank(&mut dep, 3), 2);
    }

    #[test]
    fn probabilities_32() {
        let [a, b, c] = rank_probabilities(32, 32);
        assert!((a - 0.2888).abs() < 1e-4);
        assert!((b - 0.5776).abs() < 1e-4);
        assert!((c - 0.1336).abs() < 1e-4);
    }

    #[test]
    fn small_matrix_example() {
        // 3 x 3 worked example: one full-rank and one rank-2 matrix
        let f = rank_counts(&ascii("01011001001010101101"), 3, 3);
        assert_eq!(f, [1, 1, 0]);
        // by hand: (7/8)(3/4)(1/2) and (1/2)(49/48)(9/8)
        let [a, b, _] = rank_probabilities(3, 3);
        assert!((a - 21.0 / 64.0).abs() < 1e-15);
        assert!((b - 441.0 / 768.0).abs() < 1e-15);
        let p = rank_p_value(f, [a, b, 1.0 - a - b]);
        assert!(p > 0.0 && p <= 1.0);
    }
}
