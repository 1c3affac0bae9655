//! Batch orchestration: normalize each recording to the working rate,
//! filter, reconstruct lung volume, detect and classify beats, estimate
//! gated rates, and collect the cross-recording agreement statistics.

use serde::Serialize;

use scg_core::agreement::{bland_altman, ecg_all_pairs_hr, ecg_combined_hr, AgreementPair,
    AgreementReport};
use scg_core::synth::SynthRecording;
use scg_core::{
    classify_events, detect_ecg_rpeaks, detect_scg_events, detrend_lv, integrate_flow, lowpass,
    pairwise_hr, resample, summarize, ChannelId, DetectorConfig, GateConfig, LungPhase,
    PhaseHrSeries, PhaseSummary, Recording, Waveform,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::ingest::read_recording;
use crate::report;

/// The per-recording knobs of the pipeline, shared by CLI runs and tests.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalysisParams {
    pub target_rate_hz: f64,
    pub lowpass_cutoff_hz: f64,
    pub gate: GateConfig,
    pub detector: DetectorConfig,
}

impl From<&RunConfig> for AnalysisParams {
    fn from(cfg: &RunConfig) -> Self {
        Self {
            target_rate_hz: cfg.target_rate_hz,
            lowpass_cutoff_hz: cfg.lowpass_cutoff_hz,
            gate: cfg.gate,
            detector: cfg.detector,
        }
    }
}

/// Event and sample counts for the audit trail.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditCounts {
    pub scg_events: usize,
    pub ecg_events: Option<usize>,
    pub dropped_at_zero: usize,
    pub llv_retained: usize,
    pub llv_discarded: usize,
    pub hlv_retained: usize,
    pub hlv_discarded: usize,
}

/// Everything computed for one recording.
#[derive(Debug, Clone, Serialize)]
pub struct RecordingAnalysis {
    pub summary: PhaseSummary,
    pub ecg_combined_bpm: Option<f64>,
    /// Ungated all-pairs ECG rate, for sensitivity comparison.
    pub ecg_all_pairs_bpm: Option<f64>,
    pub audit: AuditCounts,
    /// Retained/discarded samples per phase; emitted to the per-recording
    /// CSV rather than the structured report.
    #[serde(skip)]
    pub llv_series: PhaseHrSeries,
    #[serde(skip)]
    pub hlv_series: PhaseHrSeries,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordingOutcome {
    pub label: String,
    pub status: OutcomeStatus,
    pub error: Option<String>,
    pub analysis: Option<RecordingAnalysis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Ok,
    Failed,
}

/// One run's full output: per-recording rows plus the agreement block.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub config: RunConfig,
    pub recordings: Vec<RecordingOutcome>,
    pub agreement: Option<AgreementReport>,
    pub notes: Vec<String>,
}

/// Bring a channel to the working rate. Inputs sampled faster are
/// decimated; slower inputs are rejected (upsampling is out of scope).
fn normalize_rate(w: &Waveform, target: f64, id: ChannelId) -> Result<Waveform> {
    if w.rate() < target {
        return Err(CliError::Data(format!(
            "channel {id} is sampled at {} Hz, below the {target} Hz working rate",
            w.rate()
        )));
    }
    Ok(resample(w, target)?)
}

/// Run the full single-recording analysis.
pub fn analyze_recording(rec: &Recording, params: &AnalysisParams) -> Result<RecordingAnalysis> {
    let scg = rec.channel(ChannelId::ScgZ).ok_or_else(|| {
        CliError::Data("recording has no scg_z channel".to_string())
    })?;
    let flow = rec.channel(ChannelId::Flow).ok_or_else(|| {
        CliError::Data("recording has no flow channel".to_string())
    })?;

    let scg = normalize_rate(scg, params.target_rate_hz, ChannelId::ScgZ)?;
    let flow = normalize_rate(flow, params.target_rate_hz, ChannelId::Flow)?;
    let ecg = rec
        .channel(ChannelId::Ecg)
        .map(|w| normalize_rate(w, params.target_rate_hz, ChannelId::Ecg))
        .transpose()?;

    let scg = lowpass(&scg, params.lowpass_cutoff_hz)?;
    let flow = lowpass(&flow, params.lowpass_cutoff_hz)?;
    let ecg = ecg
        .map(|w| lowpass(&w, params.lowpass_cutoff_hz))
        .transpose()?;

    let lv = detrend_lv(&integrate_flow(&flow))?;

    let scg_events = detect_scg_events(&scg, &params.detector)?;
    let classified = classify_events(&scg_events, &lv, &params.gate)?;
    let llv_series = pairwise_hr(&classified.llv, LungPhase::Llv, &params.gate);
    let hlv_series = pairwise_hr(&classified.hlv, LungPhase::Hlv, &params.gate);
    let summary = summarize(&llv_series, &hlv_series);

    let (ecg_events, ecg_combined_bpm, ecg_all_pairs_bpm) = match &ecg {
        Some(w) => {
            let events = detect_ecg_rpeaks(w, &params.detector)?;
            let combined = ecg_combined_hr(&events, &lv, &params.gate).ok();
            let all_pairs = ecg_all_pairs_hr(&events).ok();
            (Some(events.len()), combined, all_pairs)
        }
        None => (None, None, None),
    };

    let audit = AuditCounts {
        scg_events: scg_events.len(),
        ecg_events,
        dropped_at_zero: classified.dropped_at_zero.len(),
        llv_retained: llv_series.samples.len(),
        llv_discarded: llv_series.discarded.len(),
        hlv_retained: hlv_series.samples.len(),
        hlv_discarded: hlv_series.discarded.len(),
    };
    Ok(RecordingAnalysis {
        summary,
        ecg_combined_bpm,
        ecg_all_pairs_bpm,
        audit,
        llv_series,
        hlv_series,
    })
}

fn gather_recordings(cfg: &RunConfig) -> Result<Vec<(String, Result<Recording>)>> {
    if let Some(batch) = &cfg.synth {
        let mut out = Vec::with_capacity(batch.count);
        for i in 0..batch.count {
            let label = format!("synth_{i:03}");
            let mut synth_cfg = batch.cfg;
            synth_cfg.seed = batch.cfg.seed.wrapping_add(i as u64);
            let rec = SynthRecording::generate(&synth_cfg, label.clone())
                .map(|s| s.recording)
                .map_err(CliError::from);
            out.push((label, rec));
        }
        Ok(out)
    } else {
        Ok(cfg
            .inputs
            .iter()
            .map(|path| {
                let rec = read_recording(path, &cfg.mapping);
                let label = rec
                    .as_ref()
                    .map(|r| r.subject_meta.clone())
                    .unwrap_or_else(|_| {
                        path.file_stem()
                            .map(|s| s.to_string_lossy().into_owned())
                            .unwrap_or_else(|| path.display().to_string())
                    });
                (label, rec)
            })
            .collect())
    }
}

/// Run the whole batch and write every report artifact into the output
/// directory. One bad recording is reported as failed without aborting
/// the rest; a batch where nothing succeeded is an error.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let params = AnalysisParams::from(cfg);
    std::fs::create_dir_all(&cfg.out_dir)?;

    let mut outcomes = Vec::new();
    let mut agreement_pairs: Vec<AgreementPair> = Vec::new();
    let mut notes = vec![
        "per-phase SD is the sample standard deviation (n - 1); cells with \
         fewer than 2 samples are flagged"
            .to_string(),
    ];

    for (label, rec) in gather_recordings(cfg)? {
        let analyzed = rec.and_then(|rec| {
            if cfg.dump_recordings {
                let path = cfg
                    .out_dir
                    .join(format!("{}_recording.csv", report::sanitize_label(&label)));
                crate::ingest::write_recording(&rec, &path)?;
            }
            analyze_recording(&rec, &params)
        });
        match analyzed {
            Ok(analysis) => {
                if let (Some(ecg), Some(scg)) =
                    (analysis.ecg_combined_bpm, analysis.summary.combined_bpm)
                {
                    agreement_pairs.push(AgreementPair {
                        label: label.clone(),
                        hr_a_bpm: ecg,
                        hr_b_bpm: scg,
                    });
                }
                outcomes.push(RecordingOutcome {
                    label,
                    status: OutcomeStatus::Ok,
                    error: None,
                    analysis: Some(analysis),
                });
            }
            Err(e) => outcomes.push(RecordingOutcome {
                label,
                status: OutcomeStatus::Failed,
                error: Some(e.to_string()),
                analysis: None,
            }),
        }
    }

    if !outcomes.iter().any(|o| o.status == OutcomeStatus::Ok) {
        let first = outcomes
            .iter()
            .filter_map(|o| o.error.as_deref())
            .next()
            .unwrap_or("no recordings");
        return Err(CliError::Data(format!(
            "every recording failed; first error: {first}"
        )));
    }

    let agreement = if agreement_pairs.len() >= 2 {
        Some(bland_altman(&agreement_pairs)?)
    } else {
        notes.push(format!(
            "agreement block skipped: {} recording(s) with both ECG and SCG \
             estimates (need 2)",
            agreement_pairs.len()
        ));
        None
    };

    let report = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        recordings: outcomes,
        agreement,
        notes,
    };
    report::write_artifacts(&report, &cfg.out_dir)?;
    Ok(report)
}
