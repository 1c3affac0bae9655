//! Reading and writing recordings as header-bearing CSV: one row per
//! sample, a time column in seconds, channel columns mapped by name.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use scg_core::{ChannelId, Recording, Waveform};

use crate::config::ChannelMap;
use crate::error::{CliError, Result};

/// Channels the analysis cannot run without.
const REQUIRED: [ChannelId; 2] = [ChannelId::ScgZ, ChannelId::Flow];

/// Relative jitter tolerated in the time column (1 ppm).
const UNIFORMITY_TOLERANCE: f64 = 1e-6;

/// Read one recording. The sampling rate is inferred from the time column,
/// which must be uniform to within 1 ppm. Errors name the offending column
/// and 1-based data row.
pub fn read_recording(path: &Path, mapping: &ChannelMap) -> Result<Recording> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    let find = |name: &str| columns.iter().position(|c| c == name);

    let time_idx = find(&mapping.time_column).ok_or_else(|| {
        CliError::Data(format!(
            "{}: missing required time column '{}'",
            path.display(),
            mapping.time_column
        ))
    })?;

    let mut channel_cols: Vec<(ChannelId, usize)> = Vec::new();
    for (&id, column) in &mapping.columns {
        match find(column) {
            Some(idx) => channel_cols.push((id, idx)),
            None => {
                let required = REQUIRED.contains(&id) || mapping.explicit.contains(&id);
                if required {
                    return Err(CliError::Data(format!(
                        "{}: missing required column '{column}' (channel {id})",
                        path.display()
                    )));
                }
            }
        }
    }

    let mut times: Vec<f64> = Vec::new();
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); channel_cols.len()];
    for (row_idx, line) in lines.enumerate() {
        let row = row_idx + 1; // 1-based data row
        let line = line.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let mut get = |idx: usize, name: &str| -> Result<f64> {
            let raw = fields.get(idx).map(|f| f.trim()).ok_or_else(|| {
                CliError::Data(format!(
                    "{}: missing value in column '{name}', row {row}",
                    path.display()
                ))
            })?;
            let value: f64 = raw.parse().map_err(|_| {
                CliError::Data(format!(
                    "{}: unparseable value '{raw}' in column '{name}', row {row}",
                    path.display()
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Data(format!(
                    "{}: non-finite value in column '{name}', row {row}",
                    path.display()
                )));
            }
            Ok(value)
        };
        times.push(get(time_idx, &mapping.time_column)?);
        for (slot, (id, idx)) in channel_cols.iter().enumerate() {
            let column = &mapping.columns[id];
            data[slot].push(get(*idx, column)?);
        }
    }

    if times.len() < 2 {
        return Err(CliError::Data(format!(
            "{}: needs at least 2 data rows, got {}",
            path.display(),
            times.len()
        )));
    }
    let n = times.len();
    let dt_ref = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt_ref > 0.0) {
        return Err(CliError::Data(format!(
            "{}: time column is not increasing",
            path.display()
        )));
    }
    for i in 1..n {
        let dt = times[i] - times[i - 1];
        if ((dt - dt_ref) / dt_ref).abs() > UNIFORMITY_TOLERANCE {
            return Err(CliError::Data(format!(
                "{}: non-uniform time base in column '{}', row {} \
                 (step {dt} vs mean {dt_ref})",
                path.display(),
                mapping.time_column,
                i + 1
            )));
        }
    }
    let rate = snap_rate(1.0 / dt_ref);

    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut recording = Recording::new(label);
    for (slot, (id, _)) in channel_cols.iter().enumerate() {
        let w = Waveform::with_start_time(std::mem::take(&mut data[slot]), rate, times[0])
            .map_err(|e| CliError::Data(format!("{}: channel {id}: {e}", path.display())))?;
        recording
            .insert_channel(*id, w)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(recording)
}

/// Rates written as text come back with a few ulps of error; snap to the
/// integer when the deviation is far below the uniformity tolerance.
fn snap_rate(rate: f64) -> f64 {
    let rounded = rate.round();
    if rounded > 0.0 && ((rate - rounded) / rate).abs() <= 1e-9 {
        rounded
    } else {
        rate
    }
}

/// Write a recording in the ingestion format. Floats are printed in
/// shortest round-trip form, so reading the file back reproduces the exact
/// sample values.
pub fn write_recording(recording: &Recording, path: &Path) -> Result<()> {
    let channels: Vec<(ChannelId, &Waveform)> = recording.channels().collect();
    let (first_id, first) = channels
        .first()
        .ok_or_else(|| CliError::Data("recording has no channels".to_string()))?;
    let n = first.len();
    for (id, w) in &channels {
        if w.len() != n {
            return Err(CliError::Data(format!(
                "channel {id} has {} samples but {first_id} has {n}",
                w.len()
            )));
        }
    }

    let file = File::create(path)?;
    let mut out = BufWriter::new(file);
    write!(out, "time")?;
    for (id, _) in &channels {
        write!(out, ",{id}")?;
    }
    writeln!(out)?;
    for k in 0..n {
        write!(out, "{}", first.time_at(k))?;
        for (_, w) in &channels {
            write!(out, ",{}", w.samples()[k])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
