use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use qrng_core::BitSequence;
use qrng_randtests::nist::{run_test_bits, TestId, TestParams};
use qrng_randtests::{borel_normality, borel_statistic};

fn random_bits(seed: u64, n: usize) -> Vec<u8> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n + 64);
    while out.len() < n {
        let w = rng.next_u64();
        out.extend((0..64).map(|i| ((w >> i) & 1) as u8));
    }
    out.truncate(n);
    out
}

fn biased_bits(rng: &mut ChaCha20Rng, n: usize, p_one: f64) -> Vec<u8> {
    (0..n).map(|_| rng.random_bool(p_one) as u8).collect()
}

fn calibration_length(test: TestId) -> usize {
    match test {
        TestId::Rank => 38_912,
        TestId::Maurer => 387_840,
        _ => 20_000,
    }
}

#[test]
fn false_rejection_rate_within_envelope() {
    let params = TestParams::default();
    let results: Vec<(TestId, Vec<usize>)> = TestId::ALL
        .par_iter()
        .map(|&test| {
            let n = calibration_length(test);
            let mut fails = vec![0usize; test.components().len()];
            for i in 0..200u64 {
                let bits = random_bits(1_000 * (test as u64 + 1) + i, n);
                let r = run_test_bits(&bits, test, &params).unwrap();
                for (f, p) in fails.iter_mut().zip(&r.p_values) {
                    *f += (*p < 0.01) as usize;
                }
            }
            (test, fails)
        })
        .collect();
    for (test, fails) in results {
        for (label, f) in test.components().iter().zip(fails) {
            let fraction = f as f64 / 200.0;
            assert!(fraction <= 0.05, "{label}: {f}/200 below alpha");
        }
    }
}

#[test]
fn p_values_in_unit_interval() {
    let params = TestParams::default();
    TestId::ALL.par_iter().for_each(|&test| {
        let min = params.resolve(test, 0).unwrap().min_length(test).max(
            // length-derived parameters need a few blocks to be admissible
            match test {
                TestId::BlockFrequency => 20,
                TestId::Serial | TestId::ApproximateEntropy => 64,
                _ => 0,
            },
        );
        let span = if min > 10_000 { 5_000 } else { 4_000 };
        let mut rng = ChaCha20Rng::seed_from_u64(77 + test as u64);
        for i in 0..1000 {
            let n = min + rng.random_range(0..span);
            let bias = match i % 10 {
                0 => 0.0,
                1 => 1.0,
                2 => 0.1,
                3 => 0.9,
                _ => 0.5,
            };
            let bits = biased_bits(&mut rng, n, bias);
            let r = run_test_bits(&bits, test, &params).unwrap();
            for p in r.p_values {
                assert!((0.0..=1.0).contains(&p), "{test} n = {n}: p = {p}");
            }
        }
    });
}

#[test]
fn complement_invariance() {
    let params = TestParams::default();
    for seed in 0..20 {
        let bits = random_bits(seed, 5_000 + 37 * seed as usize);
        let inv: Vec<u8> = bits.iter().map(|b| 1 - b).collect();
        for test in [TestId::Frequency, TestId::Runs, TestId::Serial, TestId::ApproximateEntropy] {
            let a = run_test_bits(&bits, test, &params).unwrap().p_values;
            let b = run_test_bits(&inv, test, &params).unwrap().p_values;
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x, y, "{test}");
            }
        }
        let seq = BitSequence::new(bits, "s").unwrap();
        let comp = seq.complement();
        for m in 1..=4 {
            assert_eq!(borel_statistic(&seq, m).unwrap(), borel_statistic(&comp, m).unwrap());
        }
    }
}

#[test]
fn borel_holds_for_reference_stream_at_one_million() {
    let seq = BitSequence::new(random_bits(2024, 1_000_000), "ref").unwrap();
    let report = borel_normality(&seq).unwrap();
    assert_eq!(report.m_max, 4);
    for (m, d) in &report.per_m {
        assert!(*d < report.bound, "m = {m}: {d} >= {}", report.bound);
    }
    assert!(report.pass);
    // the statistic shrinks with length
    let short = BitSequence::new(random_bits(2024, 10_000), "ref").unwrap();
    assert!(borel_statistic(&seq, 1).unwrap() < borel_statistic(&short, 1).unwrap() + 1e-3);
}
