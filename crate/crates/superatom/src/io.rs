//! Dataset, scan and report persistence.
//!
//! Formats (see README for the column reference):
//! - dataset CSV: `trial_index,branch,total,repeat_index,timestamp_ns`, one
//!   row per click; trials without clicks emit a single row with empty click
//!   columns. Timestamps are integer nanoseconds.
//! - points CSV: `x,y[,sigma]`, an optional non-numeric header row.
//! - scan CSV: `t_ns,population`.
//! - profile CSV: `bin_start_ns,count`; histogram CSV: `n_photons,count`.
//! - reports: pretty-printed JSON.

use serde::Serialize;
use std::path::Path;

use crate::burst::{Branch, BurstRecord, Click, Dataset, TemporalProfile};
use crate::error::{Error, Result};
use crate::fit::DataPoint;

pub fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path.to_path_buf(), e))
}

/// Serialize a value as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path.to_path_buf(), e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Serialize, serde::Deserialize)]
struct DatasetRow {
    trial_index: u64,
    branch: String,
    total: u32,
    repeat_index: Option<u32>,
    timestamp_ns: Option<u64>,
}

/// Render a dataset to CSV bytes (deterministic for a given dataset).
pub fn dataset_csv_bytes(ds: &Dataset) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for (trial, record) in ds.records.iter().enumerate() {
        if record.clicks.is_empty() {
            writer.serialize(DatasetRow {
                trial_index: trial as u64,
                branch: record.branch.label().to_string(),
                total: record.total,
                repeat_index: None,
                timestamp_ns: None,
            })?;
        }
        for click in &record.clicks {
            writer.serialize(DatasetRow {
                trial_index: trial as u64,
                branch: record.branch.label().to_string(),
                total: record.total,
                repeat_index: Some(click.repeat_index),
                timestamp_ns: Some(click.timestamp_ns),
            })?;
        }
    }
    writer.into_inner().map_err(|e| Error::Malformed {
        line: 0,
        message: format!("CSV buffer error: {e}"),
    })
}

pub fn write_dataset_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let bytes = dataset_csv_bytes(ds)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path.to_path_buf(), e))
}

/// Read the records of a dataset CSV written by [`write_dataset_csv`].
pub fn read_dataset_records_csv(path: &Path) -> Result<Vec<BurstRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut records: Vec<(u64, BurstRecord)> = Vec::new();
    for (i, row) in reader.deserialize::<DatasetRow>().enumerate() {
        let line = i + 2; // header is line 1
        let row = row.map_err(|e| Error::Malformed {
            line,
            message: e.to_string(),
        })?;
        let branch = Branch::parse(&row.branch).map_err(|_| Error::Malformed {
            line,
            message: format!("unknown branch `{}`", row.branch),
        })?;
        let entry = match records.last_mut() {
            Some((trial, record)) if *trial == row.trial_index => record,
            _ => {
                records.push((
                    row.trial_index,
                    BurstRecord {
                        clicks: Vec::new(),
                        total: row.total,
                        branch,
                    },
                ));
                &mut records.last_mut().expect("just pushed").1
            }
        };
        match (row.repeat_index, row.timestamp_ns) {
            (Some(repeat_index), Some(timestamp_ns)) => entry.clicks.push(Click {
                repeat_index,
                timestamp_ns,
            }),
            (None, None) => {}
            _ => {
                return Err(Error::Malformed {
                    line,
                    message: "click columns must both be present or both empty".into(),
                })
            }
        }
    }
    for (trial, record) in &records {
        if record.total as usize != record.clicks.len() {
            return Err(Error::Malformed {
                line: 0,
                message: format!(
                    "trial {trial}: total {} does not match {} click rows",
                    record.total,
                    record.clicks.len()
                ),
            });
        }
    }
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

/// Read `(x, y[, sigma])` points; a leading non-numeric row is treated as a
/// header. Malformed rows are reported with their line numbers.
pub fn read_points_csv(path: &Path) -> Result<Vec<DataPoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
    let mut points = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Malformed {
                line: line_no,
                message: format!(
                    "expected 2 or 3 comma-separated fields, got {}",
                    fields.len()
                ),
            });
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Err(_) if i == 0 => continue, // header row
            Err(_) => {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!("non-numeric field in `{line}`"),
                })
            }
            Ok(values) => {
                let sigma = values.get(2).copied();
                let point =
                    DataPoint::new(values[0], values[1], sigma).map_err(|e| Error::Malformed {
                        line: line_no,
                        message: e.to_string(),
                    })?;
                points.push(point);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Empty("points file contains no data rows"));
    }
    Ok(points)
}

pub fn write_scan_csv(path: &Path, scan: &[(f64, f64)]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["t_ns", "population"])?;
    for (t, population) in scan {
        writer.write_record([t.to_string(), population.to_string()])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Malformed {
        line: 0,
        message: format!("CSV buffer error: {e}"),
    })?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path.to_path_buf(), e))
}

pub fn write_profile_csv(path: &Path, profile: &TemporalProfile) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["bin_start_ns", "count"])?;
    for (i, count) in profile.counts.iter().enumerate() {
        let start = i as f64 * profile.bin_size_ns;
        writer.write_record([start.to_string(), count.to_string()])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Malformed {
        line: 0,
        message: format!("CSV buffer error: {e}"),
    })?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path.to_path_buf(), e))
}

pub fn write_histogram_csv(path: &Path, hist: &[u64]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["n_photons", "count"])?;
    for (n, count) in hist.iter().enumerate() {
        writer.write_record([n.to_string(), count.to_string()])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Malformed {
        line: 0,
        message: format!("CSV buffer error: {e}"),
    })?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path.to_path_buf(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burst::{simulate_dataset, BurstParams};
    use crate::qubit::{MeasurementBasis, QubitState};

    #[test]
    fn dataset_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        let ds = simulate_dataset(
            &QubitState::r2(),
            MeasurementBasis::Z,
            500,
            &BurstParams::default(),
            42,
        )
        .unwrap();
        write_dataset_csv(&ds, &path).unwrap();
        let records = read_dataset_records_csv(&path).unwrap();
        assert_eq!(records, ds.records);
    }

    #[test]
    fn points_csv_header_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("points.csv");
        std::fs::write(&path, "od,efficiency\n0.5,0.1\n1.9,0.24,0.01\n").unwrap();
        let points = read_points_csv(&path).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[1].sigma, Some(0.01));

        std::fs::write(&path, "od,eff\n0.5,oops\n").unwrap();
        match read_points_csv(&path).unwrap_err() {
            Error::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("expected malformed error, got {other:?}"),
        }

        std::fs::write(&path, "").unwrap();
        assert!(matches!(
            read_points_csv(&path).unwrap_err(),
            Error::Empty(_)
        ));
    }
}
