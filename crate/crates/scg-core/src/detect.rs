//! Heartbeat fiducial detection for SCG and ECG channels.
//!
//! Both detectors threshold a smoothed signal-energy envelope at a multiple
//! of its median, so detection is invariant to amplitude scaling. The SCG
//! fiducial is the envelope peak of each supra-threshold region; the ECG
//! envelope is built from the squared derivative (R-peaks are the sharpest
//! deflection) and the fiducial is refined to the largest absolute sample
//! in the region, the R apex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::LungPhase;
use crate::signal::Waveform;

/// Which channel an event was detected on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventSource {
    Scg,
    Ecg,
}

/// One detected heartbeat fiducial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeatEvent {
    /// Seconds from record start.
    pub time: f64,
    pub source: EventSource,
    /// Signal value at the fiducial sample.
    pub amplitude: f64,
    /// Lung-volume phase, assigned later by classification. `None` until then.
    pub phase: Option<LungPhase>,
}

/// Detector tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Minimum spacing between events (s). 0.3 s caps HR at 200 bpm.
    pub refractory_s: f64,
    /// Moving-average width for the energy envelope (s).
    pub envelope_smooth_s: f64,
    /// Threshold as a multiple of the envelope median.
    pub threshold_factor: f64,
    /// Zero-phase filtering corrupts record edges; exclude this much (s)
    /// at each end from detection.
    pub edge_exclude_s: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            refractory_s: 0.3,
            envelope_smooth_s: 0.05,
            threshold_factor: 2.0,
            edge_exclude_s: 0.5,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.refractory_s > 0.0
            && self.envelope_smooth_s > 0.0
            && self.threshold_factor > 0.0
            && self.edge_exclude_s > 0.0;
        if !all_positive {
            return Err(Error::InvalidArgument(
                "detector config fields must all be positive".to_string(),
            ));
        }
        if self.refractory_s >= 2.0 {
            return Err(Error::InvalidArgument(format!(
                "refractory period {} s is implausibly long (must be < 2 s)",
                self.refractory_s
            )));
        }
        Ok(())
    }
}

enum Fiducial {
    /// Peak of the smoothed energy envelope (SCG).
    EnvelopePeak,
    /// Largest absolute signal sample in the region (ECG R apex).
    AbsSignalPeak,
}

/// Detect heartbeat events in a filtered SCG waveform.
///
/// One event per supra-threshold region of the smoothed signal-energy
/// envelope, at the envelope peak. Events are sorted, at least one
/// refractory period apart, and never inside the edge-excluded margins.
pub fn detect_scg_events(scg: &Waveform, cfg: &DetectorConfig) -> Result<Vec<BeatEvent>> {
    cfg.validate()?;
    check_length(scg, cfg)?;
    let squared: Vec<f64> = scg.samples().iter().map(|v| v * v).collect();
    let env = moving_average(&squared, half_window(scg.rate(), cfg.envelope_smooth_s));
    detect_from_envelope(scg, &env, cfg, EventSource::Scg, Fiducial::EnvelopePeak)
}

/// Detect R-peaks in an ECG waveform.
///
/// Same mechanism as [`detect_scg_events`], but the envelope is the
/// smoothed squared derivative and the fiducial snaps to the R apex.
pub fn detect_ecg_rpeaks(ecg: &Waveform, cfg: &DetectorConfig) -> Result<Vec<BeatEvent>> {
    cfg.validate()?;
    check_length(ecg, cfg)?;
    let deriv = central_derivative(ecg.samples(), ecg.rate());
    let squared: Vec<f64> = deriv.iter().map(|v| v * v).collect();
    let env = moving_average(&squared, half_window(ecg.rate(), cfg.envelope_smooth_s));
    detect_from_envelope(ecg, &env, cfg, EventSource::Ecg, Fiducial::AbsSignalPeak)
}

fn check_length(w: &Waveform, cfg: &DetectorConfig) -> Result<()> {
    if w.duration() <= 2.0 * cfg.edge_exclude_s {
        return Err(Error::InvalidArgument(format!(
            "record of {:.3} s is too short for detection with {:.3} s edge exclusion",
            w.duration(),
            cfg.edge_exclude_s
        )));
    }
    Ok(())
}

fn half_window(rate: f64, smooth_s: f64) -> usize {
    ((smooth_s * rate / 2.0).round() as usize).max(1)
}

fn central_derivative(x: &[f64], rate: f64) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut d = Vec::with_capacity(n);
    d.push((x[1] - x[0]) * rate);
    for i in 1..n - 1 {
        d.push((x[i + 1] - x[i - 1]) * 0.5 * rate);
    }
    d.push((x[n - 1] - x[n - 2]) * rate);
    d
}

/// Centered moving average with a shrinking window at the edges.
fn moving_average(x: &[f64], half: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in x {
        acc += v;
        prefix.push(acc);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64
        })
        .collect()
}

fn median(x: &[f64]) -> f64 {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite envelope"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn detect_from_envelope(
    w: &Waveform,
    env: &[f64],
    cfg: &DetectorConfig,
    source: EventSource,
    fiducial: Fiducial,
) -> Result<Vec<BeatEvent>> {
    let n = w.len();
    let edge = (cfg.edge_exclude_s * w.rate()).ceil() as usize;
    let lo = edge;
    let hi = n - edge;
    let threshold = cfg.threshold_factor * median(&env[lo..hi]);
    // A region must also peak well above the threshold; this rejects the
    // shallow noise bumps that an envelope median inevitably lets through.
    let peak_floor = 2.0 * threshold;

    let samples = w.samples();
    let mut events: Vec<BeatEvent> = Vec::new();
    let mut i = lo;
    while i < hi {
        if env[i] <= threshold {
            i += 1;
            continue;
        }
        let start = i;
        while i < hi && env[i] > threshold {
            i += 1;
        }
        let region = start..i;

        let env_peak_idx = argmax_by(region.clone(), |k| env[k]);
        if env[env_peak_idx] < peak_floor {
            continue;
        }
        let fid_idx = match fiducial {
            Fiducial::EnvelopePeak => env_peak_idx,
            Fiducial::AbsSignalPeak => argmax_by(region, |k| samples[k].abs()),
        };
        let time = w.time_at(fid_idx);
        if let Some(last) = events.last() {
            if time - last.time < cfg.refractory_s {
                continue;
            }
        }
        events.push(BeatEvent {
            time,
            source,
            amplitude: samples[fid_idx],
            phase: None,
        });
    }
    Ok(events)
}

fn argmax_by(range: std::ops::Range<usize>, value: impl Fn(usize) -> f64) -> usize {
    let mut best = range.start;
    let mut best_v = value(best);
    for k in range {
        let v = value(k);
        if v > best_v {
            best = k;
            best_v = v;
        }
    }
    best
}
