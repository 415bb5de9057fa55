//! Counts CSV and source metadata files.
//!
//! One CSV row per sample:
//! `setting_index,theta_a_deg,theta_b_deg,n_ab,n_apb,n_abp,n_apbp`.
//! The source configuration is stored next to it as `<stem>.meta.json`.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::config::SourceConfig;
use super::sampling::{AcquisitionRecord, CoincidenceSample};
use super::{PhotonError, Result};
use crate::quantum::{ChshSettings, MeasurementSetting};

pub const CSV_HEADER: [&str; 7] = [
    "setting_index",
    "theta_a_deg",
    "theta_b_deg",
    "n_ab",
    "n_apb",
    "n_abp",
    "n_apbp",
];

#[derive(Debug, Deserialize)]
struct Row {
    setting_index: u8,
    theta_a_deg: f64,
    theta_b_deg: f64,
    n_ab: u64,
    n_apb: u64,
    n_abp: u64,
    n_apbp: u64,
}

fn csv_error(e: csv::Error) -> PhotonError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    PhotonError::Malformed { line, message: e.to_string() }
}

pub fn write_counts_csv<W: Write>(record: &AcquisitionRecord, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for s in record.samples() {
        let setting = record.settings().get(s.setting_index as usize);
        // Display gives the shortest round-trip form ("0", "22.5").
        w.write_record([
            s.setting_index.to_string(),
            setting.theta_a().to_string(),
            setting.theta_b().to_string(),
            s.n_ab.to_string(),
            s.n_apb.to_string(),
            s.n_abp.to_string(),
            s.n_apbp.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a counts CSV into a record under the given source configuration.
///
/// Settings absent from the file keep their default angles.
pub fn read_counts_csv<R: Read>(reader: R, config: SourceConfig) -> Result<AcquisitionRecord> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(PhotonError::Malformed {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut settings = *ChshSettings::default().settings();
    let mut seen = [false; 4];
    let mut samples = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row.map_err(csv_error)?;
        let line = samples.len() as u64 + 2;
        let k = row.setting_index as usize;
        if k > 3 {
            return Err(PhotonError::Malformed {
                line,
                message: format!("setting_index {} is not in 0..=3", row.setting_index),
            });
        }
        let setting = MeasurementSetting::new(row.theta_a_deg, row.theta_b_deg)
            .map_err(|e| PhotonError::Malformed { line, message: e.to_string() })?;
        if !seen[k] {
            settings[k] = setting;
            seen[k] = true;
        } else if settings[k] != setting {
            return Err(PhotonError::Malformed {
                line,
                message: format!("angles differ from earlier rows of setting {k}"),
            });
        }
        samples.push(CoincidenceSample::new(row.setting_index, row.n_ab, row.n_apb, row.n_abp, row.n_apbp));
    }
    AcquisitionRecord::from_samples(config, ChshSettings::from_settings(settings), samples).map_err(|e| match e {
        PhotonError::BlockOrder(i) => PhotonError::Malformed {
            line: i as u64 + 2,
            message: "samples are not in setting-block order".into(),
        },
        other => other,
    })
}

pub fn write_meta_json<W: Write>(config: &SourceConfig, mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, config)?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn read_meta_json<R: Read>(reader: R) -> Result<SourceConfig> {
    let config: SourceConfig = serde_json::from_reader(reader)?;
    config.validate()?;
    Ok(config)
}

/// `run.csv` -> `run.meta.json`.
pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}
