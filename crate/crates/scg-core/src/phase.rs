//! Lung-volume phase grouping and gated heart rate estimation.
//!
//! Events are split by the sign of the detrended lung volume at the event
//! time: positive is the high lung-volume (HLV) group, negative the low
//! lung-volume (LLV) group. Instantaneous heart rate comes from each pair
//! of consecutive same-group events as 60 / dt bpm; pairs below the HR
//! floor are the cross-cycle artifacts and are discarded with an audit
//! record instead of silently vanishing.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::detect::BeatEvent;
use crate::error::{Error, Result};
use crate::signal::LungVolume;

/// Low or high lung-volume phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LungPhase {
    Llv,
    Hlv,
}

impl fmt::Display for LungPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LungPhase::Llv => "llv",
            LungPhase::Hlv => "hlv",
        })
    }
}

/// Gating parameters for pairwise heart rate estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    /// Minimum heart rate retained, in bpm. Pairs below it are discarded.
    pub hr_min_bpm: f64,
    /// Half-width of the dead band around LV = 0; events inside it are
    /// assigned to neither phase. 0 keeps the strict sign test.
    pub lv_zero_epsilon: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            hr_min_bpm: 50.0,
            lv_zero_epsilon: 0.0,
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hr_min_bpm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "hr_min_bpm must be positive, got {}",
                self.hr_min_bpm
            )));
        }
        if self.lv_zero_epsilon < 0.0 {
            return Err(Error::InvalidArgument(
                "lv_zero_epsilon must be non-negative".to_string(),
            ));
        }
        Ok(())
    }
}

/// One retained instantaneous heart rate sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrSample {
    /// Midpoint of the two events, seconds.
    pub pair_time: f64,
    pub hr_bpm: f64,
}

/// Why a pair was discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscardReason {
    /// Below the minimum heart rate: a cross-cycle pair, not a cardiac cycle.
    BelowGate,
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscardReason::BelowGate => "below-gate",
        })
    }
}

/// Audit record for a discarded pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscardedSample {
    pub pair_time: f64,
    pub hr_bpm: f64,
    pub reason: DiscardReason,
}

/// Retained heart rate samples for one phase group, plus the discard audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseHrSeries {
    pub phase: LungPhase,
    pub samples: Vec<HrSample>,
    pub discarded: Vec<DiscardedSample>,
}

impl PhaseHrSeries {
    pub fn empty(phase: LungPhase) -> Self {
        Self {
            phase,
            samples: Vec::new(),
            discarded: Vec::new(),
        }
    }
}

/// Mean / SD / count for one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub mean_bpm: Option<f64>,
    /// Sample standard deviation (n - 1 divisor). 0 when only one sample,
    /// flagged via `sd_degenerate`.
    pub sd_bpm: Option<f64>,
    pub count: usize,
    pub sd_degenerate: bool,
}

/// Per-recording summary: both phases, the combined rate, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub llv: PhaseStats,
    pub hlv: PhaseStats,
    pub combined_bpm: Option<f64>,
    pub ratio_hlv_llv: Option<f64>,
}

/// Result of splitting events by lung-volume sign.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedEvents {
    pub llv: Vec<BeatEvent>,
    pub hlv: Vec<BeatEvent>,
    /// Events inside the LV dead band, assigned to neither phase.
    pub dropped_at_zero: Vec<BeatEvent>,
}

/// Split events into LLV / HLV groups by the lung volume sampled (nearest
/// sample) at each event time.
///
/// Strictly positive LV puts an event in the HLV group, strictly negative
/// in the LLV group; values inside the `lv_zero_epsilon` band go to
/// neither group and are returned for audit. Relative order is preserved
/// in every group. Errors if any event lies outside the LV time span.
pub fn classify_events(
    events: &[BeatEvent],
    lv: &LungVolume,
    cfg: &GateConfig,
) -> Result<ClassifiedEvents> {
    cfg.validate()?;
    debug_assert!(events.windows(2).all(|p| p[0].time < p[1].time));
    let mut out = ClassifiedEvents {
        llv: Vec::new(),
        hlv: Vec::new(),
        dropped_at_zero: Vec::new(),
    };
    for ev in events {
        let v = lv.value_at_nearest(ev.time)?;
        if v > cfg.lv_zero_epsilon {
            out.hlv.push(BeatEvent {
                phase: Some(LungPhase::Hlv),
                ..*ev
            });
        } else if v < -cfg.lv_zero_epsilon {
            out.llv.push(BeatEvent {
                phase: Some(LungPhase::Llv),
                ..*ev
            });
        } else {
            out.dropped_at_zero.push(*ev);
        }
    }
    Ok(out)
}

/// Instantaneous heart rate from consecutive events of one phase group:
/// 60 / (t[j+1] - t[j]) bpm per pair. Pairs below `hr_min_bpm` are moved to
/// the discard audit; empty and single-event groups produce an empty series.
pub fn pairwise_hr(group: &[BeatEvent], phase: LungPhase, cfg: &GateConfig) -> PhaseHrSeries {
    debug_assert!(group.windows(2).all(|p| p[0].time < p[1].time));
    let mut series = PhaseHrSeries::empty(phase);
    for pair in group.windows(2) {
        let dt = pair[1].time - pair[0].time;
        let hr_bpm = 60.0 / dt;
        let pair_time = 0.5 * (pair[0].time + pair[1].time);
        if hr_bpm < cfg.hr_min_bpm {
            series.discarded.push(DiscardedSample {
                pair_time,
                hr_bpm,
                reason: DiscardReason::BelowGate,
            });
        } else {
            series.samples.push(HrSample { pair_time, hr_bpm });
        }
    }
    series
}

/// Combined heart rate: the mean of all retained samples from both phases,
/// (sum of LLV rates + sum of HLV rates) / (m + n).
pub fn combined_hr(llv: &PhaseHrSeries, hlv: &PhaseHrSeries) -> Result<f64> {
    let m = llv.samples.len();
    let n = hlv.samples.len();
    if m + n == 0 {
        return Err(Error::NoData(
            "no retained heart rate samples in either phase".to_string(),
        ));
    }
    let sum_llv: f64 = llv.samples.iter().map(|s| s.hr_bpm).sum();
    let sum_hlv: f64 = hlv.samples.iter().map(|s| s.hr_bpm).sum();
    Ok((sum_llv + sum_hlv) / (m + n) as f64)
}

/// Mean, sample SD (n - 1), and count of the retained samples.
pub fn phase_stats(series: &PhaseHrSeries) -> PhaseStats {
    let n = series.samples.len();
    if n == 0 {
        return PhaseStats {
            mean_bpm: None,
            sd_bpm: None,
            count: 0,
            sd_degenerate: false,
        };
    }
    let mean = series.samples.iter().map(|s| s.hr_bpm).sum::<f64>() / n as f64;
    if n == 1 {
        return PhaseStats {
            mean_bpm: Some(mean),
            sd_bpm: Some(0.0),
            count: 1,
            sd_degenerate: true,
        };
    }
    let ss: f64 = series
        .samples
        .iter()
        .map(|s| (s.hr_bpm - mean).powi(2))
        .sum();
    PhaseStats {
        mean_bpm: Some(mean),
        sd_bpm: Some((ss / (n - 1) as f64).sqrt()),
        count: n,
        sd_degenerate: false,
    }
}

/// Ratio of the HLV mean rate to the LLV mean rate.
pub fn hlv_llv_ratio(summary: &PhaseSummary) -> Result<f64> {
    match (summary.hlv.mean_bpm, summary.llv.mean_bpm) {
        (Some(hlv), Some(llv)) if llv > 0.0 => Ok(hlv / llv),
        (Some(_), Some(_)) => Err(Error::NoData(
            "LLV mean rate is not positive; ratio undefined".to_string(),
        )),
        _ => Err(Error::NoData(
            "both phase means are required for the HLV/LLV ratio".to_string(),
        )),
    }
}

/// Build the per-recording summary from the two phase series.
pub fn summarize(llv: &PhaseHrSeries, hlv: &PhaseHrSeries) -> PhaseSummary {
    let llv_stats = phase_stats(llv);
    let hlv_stats = phase_stats(hlv);
    let mut summary = PhaseSummary {
        llv: llv_stats,
        hlv: hlv_stats,
        combined_bpm: combined_hr(llv, hlv).ok(),
        ratio_hlv_llv: None,
    };
    summary.ratio_hlv_llv = hlv_llv_ratio(&summary).ok();
    summary
}
