use crate::special::{clamp_p, erfc, igamc, phi};

fn ones(bits: &[u8]) -> usize {
    bits.iter().filter(|&&b| b == 1).count()
}

/// Monobit test.
pub fn frequency(bits: &[u8]) -> f64 {
    let n = bits.len() as f64;
    let ones = ones(bits);
    let s = ones.abs_diff(bits.len() - ones) as f64;
    clamp_p(erfc(s / n.sqrt() / std::f64::consts::SQRT_2))
}

/// Frequency within blocks of `m` bits; the remainder is dropped.
pub fn block_frequency(bits: &[u8], m: usize) -> f64 {
    let blocks = bits.len() / m;
    let chi2: f64 = bits
        .chunks_exact(m)
        .map(|b| {
            let pi = ones(b) as f64 / m as f64;
            (pi - 0.5).powi(2)
        })
        .sum::<f64>()
        * 4.0
        * m as f64;
    clamp_p(igamc(blocks as f64 / 2.0, chi2 / 2.0))
}

pub fn runs(bits: &[u8]) -> f64 {
    let n = bits.len() as f64;
    let ones = ones(bits);
    let zeros = bits.len() - ones;
    // frequency prerequisite |pi - 1/2| < 2/sqrt(n)
    if ones.abs_diff(zeros) as f64 / (2.0 * n) >= 2.0 / n.sqrt() {
        return 0.0;
    }
    let v = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let q = (ones as f64 * zeros as f64) / (n * n);
    let num = (v as f64 - 2.0 * n * q).abs();
    let den = 2.0 * (2.0 * n).sqrt() * q;
    clamp_p(erfc(num / den))
}

/// Longest run of ones within blocks; block size from the input length.
pub fn longest_run(bits: &[u8]) -> f64 {
    let n = bits.len();
    let (m, lo, pi): (usize, usize, &[f64]) = if n < 6272 {
        (8, 1, &[0.214_843_75, 0.367_187_5, 0.230_468_75, 0.187_5])
    } else if n < 750_000 {
        (128, 4, &[0.117_403_578_8, 0.242_955_959, 0.249_363_483, 0.175_177_06, 0.102_701_071, 0.112_398_847])
    } else {
        (10_000, 10, &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727])
    };
    let k = pi.len() - 1;
    let mut v = vec![0u64; pi.len()];
    for block in bits.chunks_exact(m) {
        let (mut run, mut longest) = (0usize, 0usize);
        for &b in block {
            run = if b == 1 { run + 1 } else { 0 };
            longest = longest.max(run);
        }
        v[longest.clamp(lo, lo + k) - lo] += 1;
    }
    let blocks = (n / m) as f64;
    let chi2: f64 = v
        .iter()
        .zip(pi)
        .map(|(&obs, &p)| (obs as f64 - blocks * p).powi(2) / (blocks * p))
        .sum();
    clamp_p(igamc(k as f64 / 2.0, chi2 / 2.0))
}

/// `(forward, backward)` p-values.
pub fn cumulative_sums(bits: &[u8]) -> (f64, f64) {
    let z_of = |iter: &mut dyn Iterator<Item = &u8>| {
        let mut s = 0i64;
        let mut z = 0i64;
        for &b in iter {
            s += if b == 1 { 1 } else { -1 };
            z = z.max(s.abs());
        }
        z
    };
    let n = bits.len() as i64;
    let fwd = z_of(&mut bits.iter());
    let bwd = z_of(&mut bits.iter().rev());
    (cusum_p(n, fwd), cusum_p(n, bwd))
}

fn cusum_p(n: i64, z: i64) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let zf = z as f64;
    let mut sum1 = 0.0;
    // integer division truncates toward zero, as in the reference code
    let mut k = (-n / z + 1) / 4;
    while k <= (n / z - 1) / 4 {
        sum1 += phi(((4 * k + 1) as f64) * zf / sqrt_n) - phi(((4 * k - 1) as f64) * zf / sqrt_n);
        k += 1;
    }
    let mut sum2 = 0.0;
    let mut k = (-n / z - 3) / 4;
    while k <= (n / z - 1) / 4 {
        sum2 += phi(((4 * k + 3) as f64) * zf / sqrt_n) - phi(((4 * k + 1) as f64) * zf / sqrt_n);
        k += 1;
    }
    clamp_p(1.0 - sum1 + sum2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nist::ascii;

    const PI_100: &str = "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000";

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn frequency_examples() {
        close(frequency(&ascii("1011010101")), 0.527_089, 1e-6);
        close(frequency(&ascii(PI_100)), 0.109_599, 1e-6);
        assert!(frequency(&[0u8; 100]) < 1e-15);
    }

    #[test]
    fn block_frequency_examples() {
        close(block_frequency(&ascii("0110011010"), 3), 0.801_252, 1e-6);
        close(block_frequency(&ascii(PI_100), 10), 0.706_438, 1e-6);
    }

    #[test]
    fn runs_examples() {
        close(runs(&ascii("1001101011")), 0.147_232, 1e-6);
        close(runs(&ascii(PI_100)), 0.500_798, 1e-6);
        assert_eq!(runs(&[1u8; 50]), 0.0);
    }

    #[test]
    fn longest_run_example() {
        let e = ascii(
            "11001100000101010110110001001100111000000000001001\
             00110101010001000100111101011010000000110101111100\
             1100111001101101100010110010",
        );
        assert_eq!(e.len(), 128);
        close(longest_run(&e), 0.180_609, 1e-4);
    }

    #[test]
    fn cusum_examples() {
        close(cumulative_sums(&ascii("1011010111")).0, 0.411_658_8, 1e-6);
        let (f, b) = cumulative_sums(&ascii(PI_100));
        close(f, 0.219_194, 1e-6);
        close(b, 0.114_866, 1e-6);
    }
}
