use num_complex::Complex64;
use rand::Rng;

use super::config::{SamplingMode, SourceConfig};
use super::sampling::block_rng;
use super::{PhotonError, Result};
use crate::quantum::{pauli_expectations, DensityMatrix, Pauli, PauliExpectations};

/// The nine local measurement bases `(a, b)` with `a, b` in `{X, Y, Z}`.
pub const TOMOGRAPHY_BASES: [(Pauli, Pauli); 9] = [
    (Pauli::X, Pauli::X),
    (Pauli::X, Pauli::Y),
    (Pauli::X, Pauli::Z),
    (Pauli::Y, Pauli::X),
    (Pauli::Y, Pauli::Y),
    (Pauli::Y, Pauli::Z),
    (Pauli::Z, Pauli::X),
    (Pauli::Z, Pauli::Y),
    (Pauli::Z, Pauli::Z),
];

// CHSH acquisition uses streams 0..4; keep tomography streams disjoint.
const STREAM_OFFSET: u64 = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyRun {
    pub expectations: PauliExpectations,
    /// Total coincidences recorded in each basis, in `TOMOGRAPHY_BASES` order.
    pub basis_events: [u64; 9],
}

/// `+1` and `-1` eigenvectors of a Pauli operator in the `(H, V)` basis.
fn eigenbasis(p: Pauli) -> [[Complex64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    match p {
        Pauli::Z | Pauli::I => [[r(1.0), r(0.0)], [r(0.0), r(1.0)]],
        Pauli::X => [[r(s), r(s)], [r(s), r(-s)]],
        Pauli::Y => [[r(s), Complex64::new(0.0, s)], [r(s), Complex64::new(0.0, -s)]],
    }
}

fn outcome_probability(rho: &DensityMatrix, u: [Complex64; 2], v: [Complex64; 2]) -> f64 {
    let w = [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]];
    let m = rho.elements();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += w[i].conj() * m[(i, j)] * w[j];
        }
    }
    acc.re.clamp(0.0, 1.0)
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    use rand_distr::{Distribution, Poisson};
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
    }
}

/// Simulated Pauli tomography.
///
/// The event budget is split evenly over the nine product bases. Each
/// basis yields four Poisson counts `N(s, t)` for outcomes `s, t = +/-1`,
/// with accidentals added at the configured rate over the time the budget
/// takes at the detected-pair rate. Correlations come from
/// `sum s t N(s,t) / N`; single-side expectations are pooled over the three
/// bases of the other side. In [`SamplingMode::Expected`] the exact
/// expectations of the state are returned.
pub fn run_tomography_acquisition(
    config: &SourceConfig,
    rho: &DensityMatrix,
    n_events_target: u64,
) -> Result<TomographyRun> {
    config.validate()?;
    if n_events_target < 100 {
        return Err(PhotonError::TooFewEvents(n_events_target));
    }
    if config.mode == SamplingMode::Expected {
        let per_basis = n_events_target / 9;
        return Ok(TomographyRun {
            expectations: pauli_expectations(rho),
            basis_events: [per_basis; 9],
        });
    }
    let rate = config.detected_pair_rate();
    if !(rate > 0.0) {
        return Err(PhotonError::InvalidConfig(
            "tomography needs a nonzero detected pair rate".into(),
        ));
    }
    let budget = n_events_target as f64 / 9.0;
    let accidental_mean = config.accidental_rate * budget / rate;

    let mut expectations = PauliExpectations([[0.0; 4]; 4]);
    expectations.set(Pauli::I, Pauli::I, 1.0);
    let mut basis_events = [0u64; 9];
    // Pooled single-side sums: (signed numerator, total) indexed by Pauli.
    let mut side_a = [(0i128, 0u128); 4];
    let mut side_b = [(0i128, 0u128); 4];

    for (k, &(pa, pb)) in TOMOGRAPHY_BASES.iter().enumerate() {
        let mut rng = block_rng(config.seed, STREAM_OFFSET + k as u64);
        let ea = eigenbasis(pa);
        let eb = eigenbasis(pb);
        let mut counts = [[0u64; 2]; 2];
        for (i, u) in ea.iter().enumerate() {
            for (j, v) in eb.iter().enumerate() {
                let mean = budget * outcome_probability(rho, *u, *v) + accidental_mean;
                counts[i][j] = poisson(mean, &mut rng);
            }
        }
        let [[pp, pm], [mp, mm]] = counts.map(|row| row.map(|c| c as i128));
        let total = (pp + pm + mp + mm) as u128;
        basis_events[k] = total as u64;
        let corr = pp - pm - mp + mm;
        let marg_a = pp + pm - mp - mm;
        let marg_b = pp - pm + mp - mm;
        if total > 0 {
            expectations.set(pa, pb, corr as f64 / total as f64);
        }
        side_a[pa.index()].0 += marg_a;
        side_a[pa.index()].1 += total;
        side_b[pb.index()].0 += marg_b;
        side_b[pb.index()].1 += total;
    }
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let (num, tot) = side_a[p.index()];
        if tot > 0 {
            expectations.set(p, Pauli::I, num as f64 / tot as f64);
        }
        let (num, tot) = side_b[p.index()];
        if tot > 0 {
            expectations.set(Pauli::I, p, num as f64 / tot as f64);
        }
    }
    Ok(TomographyRun { expectations, basis_events })
}
