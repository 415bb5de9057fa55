use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{SamplingMode, SourceConfig};
use super::{PhotonError, Result};
use crate::quantum::{joint_probs, ChshSettings, DensityMatrix, MeasurementSetting};

/// Coincidence counts of one counting interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoincidenceSample {
    pub setting_index: u8,
    pub n_ab: u64,
    pub n_apb: u64,
    pub n_abp: u64,
    pub n_apbp: u64,
}

impl CoincidenceSample {
    pub fn new(setting_index: u8, n_ab: u64, n_apb: u64, n_abp: u64, n_apbp: u64) -> Self {
        Self { setting_index, n_ab, n_apb, n_abp, n_apbp }
    }

    /// Counts in channel order `AB, A'B, AB', A'B'`.
    pub fn counts(&self) -> [u64; 4] {
        [self.n_ab, self.n_apb, self.n_abp, self.n_apbp]
    }

    pub fn total(&self) -> u64 {
        self.counts().iter().sum()
    }
}

/// Mean counts per interval in channel order `AB, A'B, AB', A'B'`.
pub fn channel_means(config: &SourceConfig, rho: &DensityMatrix, setting: MeasurementSetting) -> [f64; 4] {
    let p = joint_probs(rho, setting);
    let pairs = config.detected_pair_rate() * config.tau;
    let acc = config.accidental_rate * config.tau;
    // A = transmitted (+) on Alice's side, B = transmitted on Bob's.
    [p.p_pp, p.p_mp, p.p_pm, p.p_mm].map(|q| pairs * q + acc)
}

fn draw<R: Rng + ?Sized>(mean: f64, mode: SamplingMode, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    match mode {
        SamplingMode::Expected => mean.round() as u64,
        SamplingMode::Poisson => {
            let dist = Poisson::new(mean).expect("finite positive Poisson mean");
            dist.sample(rng) as u64
        }
    }
}

fn draw_sample<R: Rng + ?Sized>(means: &[f64; 4], mode: SamplingMode, setting_index: u8, rng: &mut R) -> CoincidenceSample {
    let [ab, apb, abp, apbp] = means.map(|m| draw(m, mode, rng));
    CoincidenceSample::new(setting_index, ab, apb, abp, apbp)
}

/// Draws the four counts of one interval.
pub fn sample_interval<R: Rng + ?Sized>(
    config: &SourceConfig,
    rho: &DensityMatrix,
    setting: MeasurementSetting,
    setting_index: u8,
    rng: &mut R,
) -> Result<CoincidenceSample> {
    config.validate()?;
    if setting_index > 3 {
        return Err(PhotonError::BadSettingIndex { index: setting_index, position: 0 });
    }
    let means = channel_means(config, rho, setting);
    Ok(draw_sample(&means, config.mode, setting_index, rng))
}

/// Independent RNG stream for one acquisition block.
pub(crate) fn block_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples grouped in setting blocks, together with the source that made them.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionRecord {
    config: SourceConfig,
    settings: ChshSettings,
    samples: Vec<CoincidenceSample>,
}

impl AcquisitionRecord {
    /// Checks that setting indices are valid and never decrease.
    pub fn from_samples(config: SourceConfig, settings: ChshSettings, samples: Vec<CoincidenceSample>) -> Result<Self> {
        config.validate()?;
        let mut last = 0u8;
        for (position, s) in samples.iter().enumerate() {
            if s.setting_index > 3 {
                return Err(PhotonError::BadSettingIndex { index: s.setting_index, position });
            }
            if s.setting_index < last {
                return Err(PhotonError::BlockOrder(position));
            }
            last = s.setting_index;
        }
        Ok(Self { config, settings, samples })
    }

    pub fn config(&self) -> &SourceConfig {
        &self.config
    }

    pub fn settings(&self) -> &ChshSettings {
        &self.settings
    }

    pub fn samples(&self) -> &[CoincidenceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples belonging to one setting.
    pub fn block(&self, setting_index: u8) -> &[CoincidenceSample] {
        let start = self.samples.partition_point(|s| s.setting_index < setting_index);
        let end = self.samples.partition_point(|s| s.setting_index <= setting_index);
        &self.samples[start..end]
    }

    pub fn total_events(&self) -> u64 {
        self.samples.iter().map(CoincidenceSample::total).sum()
    }

    /// Simulated wall time, `n_samples * (tau + lag)`, in seconds.
    pub fn elapsed_seconds(&self) -> f64 {
        self.samples.len() as f64 * self.config.cycle_time()
    }
}

/// Runs the block-sequential CHSH schedule: `samples_per_setting` intervals
/// at each of the four settings in turn.
///
/// Block `k` draws from its own stream derived from `(seed, k)`, so the
/// blocks are generated in parallel without affecting the result.
pub fn run_chsh_acquisition(
    config: &SourceConfig,
    rho: &DensityMatrix,
    settings: &ChshSettings,
    samples_per_setting: usize,
) -> Result<AcquisitionRecord> {
    config.validate()?;
    if samples_per_setting == 0 {
        return Err(PhotonError::NoSamples);
    }
    let blocks: Vec<Vec<CoincidenceSample>> = (0..4u8)
        .into_par_iter()
        .map(|k| {
            let means = channel_means(config, rho, settings.get(k as usize));
            let mut rng = block_rng(config.seed, k as u64);
            (0..samples_per_setting)
                .map(|_| draw_sample(&means, config.mode, k, &mut rng))
                .collect()
        })
        .collect();
    let samples = blocks.into_iter().flatten().collect();
    AcquisitionRecord::from_samples(config.clone(), *settings, samples)
}
