use super::{BitError, BitSequence, Provenance, Result};
use crate::photon::{AcquisitionRecord, SamplingMode};

/// Least significant bit of a count: odd -> 1, even -> 0.
pub fn parity_bit(count: u64) -> u8 {
    (count & 1) as u8
}

fn provenance(record: &AcquisitionRecord) -> Provenance {
    Provenance {
        seed: Some(record.config().seed),
        mode: match record.config().mode {
            SamplingMode::Poisson => "poisson".into(),
            SamplingMode::Expected => "expected".into(),
        },
    }
}

/// One bit per sample: parity of `N(AB)`, in acquisition order.
pub fn build_x1(record: &AcquisitionRecord) -> Result<BitSequence> {
    if record.is_empty() {
        return Err(BitError::Empty);
    }
    let bits = record.samples().iter().map(|s| parity_bit(s.n_ab)).collect();
    Ok(BitSequence::new(bits, "x1")?.with_source(provenance(record)))
}

/// Four bits per sample: parities of `N(AB), N(A'B), N(AB'), N(A'B')`.
pub fn build_x2(record: &AcquisitionRecord) -> Result<BitSequence> {
    if record.is_empty() {
        return Err(BitError::Empty);
    }
    let bits = record
        .samples()
        .iter()
        .flat_map(|s| s.counts().map(parity_bit))
        .collect();
    Ok(BitSequence::new(bits, "x2")?.with_source(provenance(record)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::{CoincidenceSample, SourceConfig};
    use crate::quantum::ChshSettings;

    fn record(samples: Vec<CoincidenceSample>) -> AcquisitionRecord {
        AcquisitionRecord::from_samples(SourceConfig::default(), ChshSettings::default(), samples).unwrap()
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity_bit(0), 0);
        assert_eq!(parity_bit(17), 1);
        assert_eq!(parity_bit(374), 0);
    }

    #[test]
    fn x1_takes_ab_parity() {
        let rec = record((3..7).map(|n| CoincidenceSample::new(0, n, 0, 0, 0)).collect());
        assert_eq!(build_x1(&rec).unwrap().bits(), &[1, 0, 1, 0]);
        let zeros = record(vec![CoincidenceSample::new(0, 0, 0, 0, 0); 5]);
        assert!(build_x1(&zeros).unwrap().bits().iter().all(|&b| b == 0));
    }

    #[test]
    fn x2_channel_order() {
        let rec = record(vec![CoincidenceSample::new(0, 3, 4, 5, 6)]);
        let x2 = build_x2(&rec).unwrap();
        assert_eq!(x2.bits(), &[1, 0, 1, 0]);
        assert_eq!(x2.label(), "x2");
        assert_eq!(x2.source().seed, Some(SourceConfig::default().seed));
    }

    #[test]
    fn empty_record_rejected() {
        let rec = record(vec![]);
        assert!(matches!(build_x1(&rec), Err(BitError::Empty)));
        assert!(matches!(build_x2(&rec), Err(BitError::Empty)));
    }
}
