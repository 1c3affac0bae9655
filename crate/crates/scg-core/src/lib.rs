//! Heart rate estimation from seismocardiography (SCG) during low and high
//! lung-volume phases.
//!
//! The pipeline reconstructs lung volume from respiratory flow, detects
//! heartbeat fiducials in the SCG (and ECG) channels, splits them by the
//! sign of the lung volume, estimates a gated instantaneous heart rate from
//! consecutive same-phase events, and compares SCG- and ECG-derived
//! estimates with Bland-Altman statistics. A deterministic synthetic
//! generator provides recordings with known beat times for verification.

pub mod agreement;
pub mod detect;
pub mod error;
pub mod phase;
pub mod signal;
pub mod synth;

pub use agreement::{bland_altman, ecg_combined_hr, AgreementPair, AgreementReport};
pub use detect::{detect_ecg_rpeaks, detect_scg_events, BeatEvent, DetectorConfig, EventSource};
pub use error::{Error, Result};
pub use phase::{
    classify_events, combined_hr, hlv_llv_ratio, pairwise_hr, phase_stats, summarize,
    ClassifiedEvents, GateConfig, LungPhase, PhaseHrSeries, PhaseStats, PhaseSummary,
};
pub use signal::{
    detrend_lv, integrate_flow, lowpass, resample, ChannelId, LungVolume, Recording, Waveform,
};
pub use synth::{gen_beat_times, gen_ecg, gen_flow, gen_scg, GroundTruth, SynthConfig};
