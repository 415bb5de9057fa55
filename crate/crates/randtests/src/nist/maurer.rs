use crate::special::{clamp_p, erfc};

const EXPECTED: [f64; 16] = [
    0.732_649_5, 1.537_438_3, 2.401_606_8, 3.311_224_7, 4.253_426_6, 5.217_705_2, 6.196_250_7, 7.183_665_6,
    8.176_424_8, 9.172_324_3, 10.170_032, 11.168_765, 12.168_070, 13.167_693, 14.167_488, 15.167_379,
];
const VARIANCE: [f64; 16] = [
    0.690, 1.338, 1.901, 2.358, 2.705, 2.954, 3.125, 3.238, 3.311, 3.356, 3.384, 3.401, 3.410, 3.416, 3.419, 3.421,
];
const MIN_LENGTH: [usize; 11] = [
    387_840,
    904_960,
    2_068_480,
    4_654_080,
    10_342_400,
    22_753_280,
    49_643_520,
    107_560_960,
    231_669_760,
    496_435_200,
    1_059_061_760,
];

/// Recommended block length L for `n` bits, if `n` is long enough.
pub fn maurer_block_length(n: usize) -> Option<usize> {
    MIN_LENGTH.iter().rposition(|&min| n >= min).map(|i| i + 6)
}

/// NIST recommended length for `L >= 6`; smaller L scale as `1010 * 2^L * L`.
pub(crate) fn recommended_min_length(l: usize) -> usize {
    if l >= 6 {
        MIN_LENGTH[l - 6]
    } else {
        1010 * (1 << l) * l
    }
}

/// Average log2 distance `f_n` and test-block count K.
pub fn maurer_statistic(bits: &[u8], l: usize, q: usize) -> (f64, usize) {
    let blocks: Vec<usize> = bits
        .chunks_exact(l)
        .map(|b| b.iter().fold(0usize, |acc, &x| (acc << 1) | x as usize))
        .collect();
    let k = blocks.len() - q;
    let mut last = vec![0usize; 1 << l];
    for (i, &b) in blocks[..q].iter().enumerate() {
        last[b] = i + 1;
    }
    let mut sum = 0.0;
    for (i, &b) in blocks[q..].iter().enumerate() {
        let pos = q + i + 1;
        sum += ((pos - last[b]) as f64).log2();
        last[b] = pos;
    }
    (sum / k as f64, k)
}

pub fn maurer(bits: &[u8], l: usize, q: usize) -> f64 {
    let (fn_, k) = maurer_statistic(bits, l, q);
    let lf = l as f64;
    let kf = k as f64;
    let c = 0.7 - 0.8 / lf + (4.0 + 32.0 / lf) * kf.powf(-3.0 / lf) / 15.0;
    let sigma = c * (VARIANCE[l - 1] / kf).sqrt();
    clamp_p(erfc((fn_ - EXPECTED[l - 1]).abs() / (std::f64::consts::SQRT_2 * sigma)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nist::ascii;

    #[test]
    fn worked_example_statistic() {
        let (fn_, k) = maurer_statistic(&ascii("01011010011101010111"), 2, 4);
        assert_eq!(k, 6);
        assert!((fn_ - 1.194_987_5).abs() < 1e-7, "{fn_}");
    }

    #[test]
    fn block_length_table() {
        assert_eq!(maurer_block_length(387_839), None);
        assert_eq!(maurer_block_length(387_840), Some(6));
        assert_eq!(maurer_block_length(800_000), Some(6));
        assert_eq!(maurer_block_length(1_000_000), Some(7));
    }
}
