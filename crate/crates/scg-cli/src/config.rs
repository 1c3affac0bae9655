//! Run configuration: channel-column mapping, pipeline constants, and the
//! synthetic-batch specification.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::Serialize;

use scg_core::synth::SynthConfig;
use scg_core::{ChannelId, DetectorConfig, GateConfig};

use crate::error::{CliError, Result};

pub const DEFAULT_TARGET_RATE_HZ: f64 = 320.0;
pub const DEFAULT_LOWPASS_CUTOFF_HZ: f64 = 100.0;

/// Maps channel ids to CSV column names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelMap {
    pub time_column: String,
    pub columns: BTreeMap<ChannelId, String>,
    /// Channels the user mapped explicitly; a missing column for one of
    /// these is an error even when the channel is optional.
    pub explicit: BTreeSet<ChannelId>,
}

impl Default for ChannelMap {
    fn default() -> Self {
        Self {
            time_column: "time".to_string(),
            columns: ChannelId::ALL
                .iter()
                .map(|id| (*id, id.as_str().to_string()))
                .collect(),
            explicit: BTreeSet::new(),
        }
    }
}

impl ChannelMap {
    /// Parse `--map` entries of the form `channel=column` (or `time=column`).
    pub fn parse(entries: &[String]) -> Result<Self> {
        let mut map = ChannelMap::default();
        for entry in entries {
            let (key, column) = entry.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "--map entry '{entry}' is not of the form channel=column"
                ))
            })?;
            let column = column.trim();
            if column.is_empty() {
                return Err(CliError::Usage(format!(
                    "--map entry '{entry}' has an empty column name"
                )));
            }
            if key == "time" {
                map.time_column = column.to_string();
                continue;
            }
            let id: ChannelId = key
                .parse()
                .map_err(|e: scg_core::Error| CliError::Usage(e.to_string()))?;
            map.columns.insert(id, column.to_string());
            map.explicit.insert(id);
        }
        Ok(map)
    }
}

/// Synthetic batch: how many recordings and the per-recording generator
/// config. Recording `i` uses `cfg.seed + i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthBatch {
    pub count: usize,
    pub cfg: SynthConfig,
}

/// Parse a `--synth` spec string: comma-separated `key=value` pairs.
///
/// Keys: `count`, `duration`, `sample_rate`, `resp_rate`, `ie` (as `1:3`),
/// `base_hr`, `rsa`, `snr` (dB, `inf` allowed), `flow_amp`, `hf_amp`.
/// Unlisted keys keep their defaults.
pub fn parse_synth_spec(spec: &str, base_seed: u64) -> Result<SynthBatch> {
    let mut cfg = SynthConfig {
        seed: base_seed,
        ..SynthConfig::default()
    };
    let mut count = 1usize;
    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--synth entry '{part}' is not of the form key=value"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = || -> Result<f64> {
            value.parse::<f64>().map_err(|_| {
                CliError::Usage(format!("--synth {key}: '{value}' is not a number"))
            })
        };
        match key {
            "count" => {
                count = value.parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("--synth count: '{value}' is not a count"))
                })?;
                if count == 0 {
                    return Err(CliError::Usage("--synth count must be at least 1".into()));
                }
            }
            "duration" => cfg.duration_s = parse_f64()?,
            "sample_rate" => cfg.sample_rate = parse_f64()?,
            "resp_rate" => cfg.resp_rate_bpm = parse_f64()?,
            "ie" => {
                let (i, e) = value.split_once(':').ok_or_else(|| {
                    CliError::Usage(format!("--synth ie: '{value}' is not of the form I:E"))
                })?;
                let i = i.trim().parse::<f64>();
                let e = e.trim().parse::<f64>();
                match (i, e) {
                    (Ok(i), Ok(e)) => cfg.ie_ratio = (i, e),
                    _ => {
                        return Err(CliError::Usage(format!(
                            "--synth ie: '{value}' is not of the form I:E"
                        )))
                    }
                }
            }
            "base_hr" => cfg.base_hr_bpm = parse_f64()?,
            "rsa" => cfg.rsa_ratio = parse_f64()?,
            "snr" => {
                cfg.snr_db = if value.eq_ignore_ascii_case("inf") {
                    f64::INFINITY
                } else {
                    parse_f64()?
                }
            }
            "flow_amp" => cfg.flow_amplitude = parse_f64()?,
            "hf_amp" => cfg.hf_band_amp = parse_f64()?,
            other => {
                return Err(CliError::Usage(format!(
                    "--synth: unknown key '{other}'"
                )))
            }
        }
    }
    cfg.validate()
        .map_err(|e| CliError::Usage(format!("--synth: {e}")))?;
    Ok(SynthBatch { count, cfg })
}

/// Everything one run needs. Defaults mirror the reference acquisition
/// chain: 320 Hz working rate, 100 Hz low-pass, 50 bpm heart rate floor.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub mapping: ChannelMap,
    pub target_rate_hz: f64,
    pub lowpass_cutoff_hz: f64,
    pub gate: GateConfig,
    pub detector: DetectorConfig,
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub synth: Option<SynthBatch>,
    pub seed: u64,
    /// Also write each (typically synthetic) recording in the ingestion
    /// CSV format.
    pub dump_recordings: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.synth.is_none() && self.inputs.is_empty() {
            return Err(CliError::Usage(
                "no inputs: pass --input <file>... or --synth <spec>".to_string(),
            ));
        }
        if self.synth.is_some() && !self.inputs.is_empty() {
            return Err(CliError::Usage(
                "--input and --synth are mutually exclusive".to_string(),
            ));
        }
        if !(self.target_rate_hz > 0.0) {
            return Err(CliError::Usage("--target-rate must be positive".into()));
        }
        if !(self.lowpass_cutoff_hz > 0.0)
            || self.lowpass_cutoff_hz >= self.target_rate_hz / 2.0
        {
            return Err(CliError::Usage(format!(
                "--cutoff must lie in (0, {}) Hz for a {} Hz working rate",
                self.target_rate_hz / 2.0,
                self.target_rate_hz
            )));
        }
        self.gate
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        self.detector
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }
}
