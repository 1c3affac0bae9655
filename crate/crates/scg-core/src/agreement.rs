//! ECG-derived reference heart rate and Bland-Altman agreement statistics.

use serde::{Deserialize, Serialize};

use crate::detect::BeatEvent;
use crate::error::{Error, Result};
use crate::phase::{classify_events, combined_hr, pairwise_hr, GateConfig, LungPhase};
use crate::signal::LungVolume;

/// Limits-of-agreement multiplier for the 95% interval.
pub const LOA_MULTIPLIER: f64 = 1.96;

/// One paired estimate: the two methods' values for the same recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementPair {
    pub label: String,
    pub hr_a_bpm: f64,
    pub hr_b_bpm: f64,
}

/// Bland-Altman summary: bias (mean of a - b), sample SD of the
/// differences, and limits of agreement at bias +/- multiplier * SD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub pairs: Vec<AgreementPair>,
    pub bias_bpm: f64,
    pub sd_bpm: f64,
    pub loa_low_bpm: f64,
    pub loa_high_bpm: f64,
}

/// Combined heart rate from ECG events, through the identical classify ->
/// pairwise -> combine pipeline used for SCG events, so a comparison of the
/// two isolates the sensing modality.
pub fn ecg_combined_hr(
    ecg_events: &[BeatEvent],
    lv: &LungVolume,
    cfg: &GateConfig,
) -> Result<f64> {
    let classified = classify_events(ecg_events, lv, cfg)?;
    let llv = pairwise_hr(&classified.llv, LungPhase::Llv, cfg);
    let hlv = pairwise_hr(&classified.hlv, LungPhase::Hlv, cfg);
    combined_hr(&llv, &hlv)
}

/// Ungated mean rate over every consecutive event pair, regardless of
/// phase. A sensitivity reference for comparing against the gated pipeline.
pub fn ecg_all_pairs_hr(ecg_events: &[BeatEvent]) -> Result<f64> {
    if ecg_events.len() < 2 {
        return Err(Error::NoData(
            "at least two events are required for an interval".to_string(),
        ));
    }
    let rates: Vec<f64> = ecg_events
        .windows(2)
        .map(|p| 60.0 / (p[1].time - p[0].time))
        .collect();
    Ok(rates.iter().sum::<f64>() / rates.len() as f64)
}

/// Bland-Altman analysis with the standard 1.96 multiplier.
pub fn bland_altman(pairs: &[AgreementPair]) -> Result<AgreementReport> {
    bland_altman_with_multiplier(pairs, LOA_MULTIPLIER)
}

/// Bland-Altman analysis with an explicit limits multiplier, for
/// sensitivity checks.
pub fn bland_altman_with_multiplier(
    pairs: &[AgreementPair],
    multiplier: f64,
) -> Result<AgreementReport> {
    if pairs.len() < 2 {
        return Err(Error::NoData(format!(
            "Bland-Altman analysis requires at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let diffs: Vec<f64> = pairs.iter().map(|p| p.hr_a_bpm - p.hr_b_bpm).collect();
    let n = diffs.len() as f64;
    let bias = diffs.iter().sum::<f64>() / n;
    let ss: f64 = diffs.iter().map(|d| (d - bias).powi(2)).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    Ok(AgreementReport {
        pairs: pairs.to_vec(),
        bias_bpm: bias,
        sd_bpm: sd,
        loa_low_bpm: bias - multiplier * sd,
        loa_high_bpm: bias + multiplier * sd,
    })
}
