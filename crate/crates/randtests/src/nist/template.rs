use crate::special::{clamp_p, igamc};

/// All aperiodic templates of length `m` in increasing binary order.
pub fn aperiodic_templates(m: usize) -> Vec<Vec<u8>> {
    (0u32..1 << m)
        .map(|v| (0..m).rev().map(|i| ((v >> i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|t| (1..m).all(|k| t[k..] != t[..m - k]))
        .collect()
}

/// Non-overlapping template matching over `blocks` equal blocks.
pub fn non_overlapping_template(bits: &[u8], template: &[u8], blocks: usize) -> f64 {
    let m = template.len();
    let block_len = bits.len() / blocks;
    let mu = (block_len - m + 1) as f64 / (1u64 << m) as f64;
    let two_m = (1u64 << m) as f64;
    let var = block_len as f64 * (1.0 / two_m - (2 * m - 1) as f64 / (two_m * two_m));
    let chi2: f64 = bits
        .chunks_exact(block_len)
        .take(blocks)
        .map(|block| {
            let mut w = 0u64;
            let mut j = 0;
            while j + m <= block.len() {
                if &block[j..j + m] == template {
                    w += 1;
                    j += m;
                } else {
                    j += 1;
                }
            }
            (w as f64 - mu).powi(2) / var
        })
        .sum();
    clamp_p(igamc(blocks as f64 / 2.0, chi2 / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nist::ascii;

    #[test]
    fn template_counts() {
        let counts: Vec<usize> = (2..=10).map(|m| aperiodic_templates(m).len()).collect();
        assert_eq!(counts, vec![2, 4, 6, 12, 20, 40, 74, 148, 284]);
        let t9 = aperiodic_templates(9);
        assert_eq!(t9[0], ascii("000000001"));
        assert_eq!(t9[1], ascii("000000011"));
    }

    #[test]
    fn reference_example() {
        let p = non_overlapping_template(&ascii("10100100101110010110"), &ascii("001"), 2);
        assert!((p - 0.344_154).abs() < 1e-6, "{p}");
    }
}
