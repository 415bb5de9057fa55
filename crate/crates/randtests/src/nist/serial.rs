use crate::special::{clamp_p, igamc};

/// Counts of every k-bit pattern over the n cyclic windows of `bits`.
fn cyclic_counts(bits: &[u8], k: usize) -> Vec<u64> {
    let n = bits.len();
    if k == 0 {
        return vec![n as u64];
    }
    let mask = (1usize << k) - 1;
    let mut counts = vec![0u64; 1 << k];
    let mut v = 0usize;
    for i in 0..n + k - 1 {
        v = ((v << 1) | bits[i % n] as usize) & mask;
        if i + 1 >= k {
            counts[v] += 1;
        }
    }
    counts
}

/// Sorted so that sums do not depend on pattern labels (bit complement
/// permutes the counts).
fn sorted_counts(bits: &[u8], k: usize) -> Vec<u64> {
    let mut c = cyclic_counts(bits, k);
    c.sort_unstable();
    c
}

fn psi_sq(bits: &[u8], k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let n = bits.len() as f64;
    let sum: f64 = sorted_counts(bits, k).iter().map(|&c| (c as f64).powi(2)).sum();
    (1u64 << k) as f64 / n * sum - n
}

/// `(p1, p2)` for block length `m >= 2`.
pub fn serial(bits: &[u8], m: usize) -> (f64, f64) {
    let (p0, p1, p2) = (psi_sq(bits, m), psi_sq(bits, m - 1), psi_sq(bits, m.saturating_sub(2)));
    let d1 = p0 - p1;
    let d2 = p0 - 2.0 * p1 + p2;
    (
        clamp_p(igamc(2f64.powi(m as i32 - 2), d1 / 2.0)),
        clamp_p(igamc(2f64.powi(m as i32 - 3), d2 / 2.0)),
    )
}

fn phi(bits: &[u8], k: usize) -> f64 {
    let n = bits.len() as f64;
    sorted_counts(bits, k)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum()
}

pub fn approximate_entropy(bits: &[u8], m: usize) -> f64 {
    let n = bits.len() as f64;
    let apen = phi(bits, m) - phi(bits, m + 1);
    let chi2 = 2.0 * n * (std::f64::consts::LN_2 - apen);
    clamp_p(igamc(2f64.powi(m as i32 - 1), chi2 / 2.0))
}
