//! Deterministic synthetic cardiorespiratory recordings with known ground
//! truth, for verifying the analysis pipeline end to end.
//!
//! The breathing model is a positive half-sine over the inspiratory
//! fraction of each cycle and a negative half-sine over the expiratory
//! fraction, amplitude-balanced so each sampled cycle integrates to zero.
//! Beats come from an integrate-and-fire process whose rate switches
//! between two values with the sign of the lung volume; their ratio is the
//! configured RSA ratio and their duty-weighted mean is the base rate.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::detect::{BeatEvent, EventSource};
use crate::error::{Error, Result};
use crate::phase::{combined_hr, pairwise_hr, phase_stats, GateConfig, LungPhase};
use crate::signal::{detrend_lv, integrate_flow, ChannelId, LungVolume, Recording, Waveform};

/// SCG wavelet: Gaussian-windowed 20 Hz cosine, ~0.1 s of support.
const SCG_WAVELET_HALF_S: f64 = 0.05;
const SCG_WAVELET_SIGMA_S: f64 = 0.02;
const SCG_CARRIER_HZ: f64 = 20.0;

/// ECG R-spike: triangle of ~20 ms total width.
const ECG_SPIKE_HALF_S: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub duration_s: f64,
    pub sample_rate: f64,
    /// Breaths per minute.
    pub resp_rate_bpm: f64,
    /// Inspiratory : expiratory duration parts.
    pub ie_ratio: (f64, f64),
    pub base_hr_bpm: f64,
    /// Target ratio of the HLV rate to the LLV rate.
    pub rsa_ratio: f64,
    /// Additive white noise level relative to the clean signal RMS, in dB.
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Peak inspiratory flow (uncalibrated units).
    pub flow_amplitude: f64,
    /// Amplitude of an optional 125-155 Hz interference band added to the
    /// SCG channel, mimicking respiratory sound noise above the low-pass
    /// cutoff. 0 disables it.
    pub hf_band_amp: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            duration_s: 60.0,
            sample_rate: 320.0,
            resp_rate_bpm: 12.0,
            ie_ratio: (1.0, 3.0),
            base_hr_bpm: 70.0,
            rsa_ratio: 1.09,
            snr_db: 20.0,
            flow_amplitude: 1.0,
            hf_band_amp: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.duration_s > 0.0
            && self.sample_rate > 0.0
            && self.resp_rate_bpm > 0.0
            && self.ie_ratio.0 > 0.0
            && self.ie_ratio.1 > 0.0
            && self.base_hr_bpm > 0.0
            && self.rsa_ratio > 0.0
            && self.flow_amplitude > 0.0
            && self.hf_band_amp >= 0.0
            && !self.snr_db.is_nan();
        if !ok {
            return Err(Error::InvalidArgument(
                "synthetic config fields out of range".to_string(),
            ));
        }
        Ok(())
    }

    fn breath_period_s(&self) -> f64 {
        60.0 / self.resp_rate_bpm
    }

    fn inspiration_s(&self) -> f64 {
        let (i, e) = self.ie_ratio;
        self.breath_period_s() * i / (i + e)
    }

    fn sample_count(&self) -> usize {
        ((self.duration_s * self.sample_rate).round() as usize).max(1)
    }
}

/// Generator truth: beat times, their lung-volume phases, the two target
/// rates, and per-phase / combined rates recomputed from the beat times
/// through the standard 50 bpm gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub beat_times: Vec<f64>,
    pub beat_phases: Vec<LungPhase>,
    pub true_hr_llv_bpm: Option<f64>,
    pub true_hr_hlv_bpm: Option<f64>,
    pub true_combined_bpm: Option<f64>,
    /// Instantaneous rate used while LV < 0.
    pub rate_llv_bpm: f64,
    /// Instantaneous rate used while LV > 0.
    pub rate_hlv_bpm: f64,
}

/// Periodic respiratory flow per the configured rate and I:E ratio.
///
/// Expiratory amplitude is balanced so the sampled trapezoidal integral of
/// one cycle is zero; inspiration is positive.
pub fn gen_flow(cfg: &SynthConfig) -> Result<Waveform> {
    cfg.validate()?;
    let rate = cfg.sample_rate;
    let period = cfg.breath_period_s();
    let ti = cfg.inspiration_s();
    let te = period - ti;
    let amp = cfg.flow_amplitude;

    let raw = |phase: f64| -> f64 {
        if phase < ti {
            amp * (std::f64::consts::PI * phase / ti).sin()
        } else {
            -amp * (std::f64::consts::PI * (phase - ti) / te).sin()
        }
    };

    // Balance the sampled cycle: trapezoid contributions of the positive
    // and negative halves on one canonical cycle of the output grid.
    let spc = ((period * rate).round() as usize).max(2);
    let dt = 1.0 / rate;
    let mut pos_area = 0.0;
    let mut neg_area = 0.0;
    let mut attribute = |t: f64, weight: f64| {
        let phase = t - period * (t / period).floor();
        let v = raw(phase) * weight * dt;
        if phase < ti {
            pos_area += v;
        } else {
            neg_area += v;
        }
    };
    attribute(0.0, 0.5);
    for k in 1..spc {
        attribute(k as f64 * dt, 1.0);
    }
    attribute(spc as f64 * dt, 0.5);
    let gamma = if neg_area < 0.0 {
        -pos_area / neg_area
    } else {
        ti / te // degenerate grid; continuous-time balance
    };

    let n = cfg.sample_count();
    let samples: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let phase = t - period * (t / period).floor();
            let v = raw(phase);
            if phase < ti {
                v
            } else {
                gamma * v
            }
        })
        .collect();
    Waveform::new(samples, rate)
}

/// Beat times from an integrate-and-fire process over the lung volume.
///
/// `lv` must be the detrended integral of `gen_flow(cfg)`. The firing rate
/// is `rate_llv` while LV <= 0 and `rate_hlv` while LV > 0, with
/// `rate_hlv / rate_llv = rsa_ratio` and their duty-weighted mean equal to
/// `base_hr_bpm`. Each beat is labeled with the LV sign at its time.
pub fn gen_beat_times(cfg: &SynthConfig, lv: &LungVolume) -> GroundTruth {
    debug_assert!(cfg.validate().is_ok());
    let w = lv.waveform();
    let samples = w.samples();
    let n = samples.len();
    let dt = 1.0 / w.rate();

    let duty_hlv = samples.iter().filter(|&&v| v > 0.0).count() as f64 / n as f64;
    let rate_llv = cfg.base_hr_bpm / ((1.0 - duty_hlv) + cfg.rsa_ratio * duty_hlv);
    let rate_hlv = cfg.rsa_ratio * rate_llv;

    let mut beat_times = Vec::new();
    let mut beat_phases = Vec::new();
    let mut acc = 0.0;
    for i in 0..n.saturating_sub(1) {
        let bpm = if samples[i] > 0.0 { rate_hlv } else { rate_llv };
        let dphi = bpm / 60.0 * dt;
        if acc + dphi >= 1.0 {
            let frac = (1.0 - acc) / dphi;
            let t = w.time_at(i) + frac * dt;
            beat_times.push(t);
            let v = lv.value_at_nearest(t).expect("beat inside LV span");
            beat_phases.push(if v > 0.0 { LungPhase::Hlv } else { LungPhase::Llv });
            acc = acc + dphi - 1.0;
        } else {
            acc += dphi;
        }
    }

    let (llv_mean, hlv_mean, combined) = recompute_truth_rates(&beat_times, &beat_phases);
    GroundTruth {
        beat_times,
        beat_phases,
        true_hr_llv_bpm: llv_mean,
        true_hr_hlv_bpm: hlv_mean,
        true_combined_bpm: combined,
        rate_llv_bpm: rate_llv,
        rate_hlv_bpm: rate_hlv,
    }
}

fn recompute_truth_rates(
    times: &[f64],
    phases: &[LungPhase],
) -> (Option<f64>, Option<f64>, Option<f64>) {
    let gate = GateConfig::default();
    let group = |phase: LungPhase| -> Vec<BeatEvent> {
        times
            .iter()
            .zip(phases)
            .filter(|(_, p)| **p == phase)
            .map(|(&time, &p)| BeatEvent {
                time,
                source: EventSource::Scg,
                amplitude: 1.0,
                phase: Some(p),
            })
            .collect()
    };
    let llv = pairwise_hr(&group(LungPhase::Llv), LungPhase::Llv, &gate);
    let hlv = pairwise_hr(&group(LungPhase::Hlv), LungPhase::Hlv, &gate);
    (
        phase_stats(&llv).mean_bpm,
        phase_stats(&hlv).mean_bpm,
        combined_hr(&llv, &hlv).ok(),
    )
}

/// SCG-like waveform: one damped 20 Hz wavelet per beat plus white noise at
/// the configured SNR. Deterministic for a given config.
pub fn gen_scg(truth: &GroundTruth, cfg: &SynthConfig) -> Waveform {
    let mut samples = wavelet_train(truth, cfg, |dt| {
        (-(dt / SCG_WAVELET_SIGMA_S).powi(2)).exp()
            * (2.0 * std::f64::consts::PI * SCG_CARRIER_HZ * dt).cos()
    });
    if cfg.hf_band_amp > 0.0 {
        let rate = cfg.sample_rate;
        for (k, s) in samples.iter_mut().enumerate() {
            let t = k as f64 / rate;
            let two_pi = 2.0 * std::f64::consts::PI;
            *s += cfg.hf_band_amp / 3.0
                * ((two_pi * 125.0 * t).sin()
                    + (two_pi * 140.0 * t).sin()
                    + (two_pi * 155.0 * t).sin());
        }
    }
    add_noise(&mut samples, cfg, 1);
    Waveform::new(samples, cfg.sample_rate).expect("synthetic waveform is valid")
}

/// ECG-like waveform: one narrow triangular R-spike per beat plus noise.
pub fn gen_ecg(truth: &GroundTruth, cfg: &SynthConfig) -> Waveform {
    let mut samples = wavelet_train(truth, cfg, |dt| {
        let adt = dt.abs();
        if adt <= ECG_SPIKE_HALF_S {
            1.0 - adt / ECG_SPIKE_HALF_S
        } else {
            0.0
        }
    });
    add_noise(&mut samples, cfg, 2);
    Waveform::new(samples, cfg.sample_rate).expect("synthetic waveform is valid")
}

fn wavelet_train(
    truth: &GroundTruth,
    cfg: &SynthConfig,
    shape: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let rate = cfg.sample_rate;
    let n = cfg.sample_count();
    let mut samples = vec![0.0; n];
    for &tb in &truth.beat_times {
        let lo = (((tb - SCG_WAVELET_HALF_S) * rate).ceil().max(0.0)) as usize;
        let hi = ((((tb + SCG_WAVELET_HALF_S) * rate).floor().max(0.0)) as usize).min(n - 1);
        for (k, s) in samples.iter_mut().enumerate().take(hi + 1).skip(lo) {
            *s += shape(k as f64 / rate - tb);
        }
    }
    samples
}

/// Add white Gaussian noise scaled to `snr_db` below the clean signal RMS.
/// A silent signal stays silent (the SNR is relative). The stream id keeps
/// the SCG and ECG channels statistically independent under one seed.
fn add_noise(samples: &mut [f64], cfg: &SynthConfig, stream: u64) {
    if !cfg.snr_db.is_finite() {
        return;
    }
    let rms = (samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64).sqrt();
    if rms == 0.0 {
        return;
    }
    let sigma = rms * 10f64.powf(-cfg.snr_db / 20.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    for s in samples.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *s += sigma * z;
    }
}

/// A full synthetic recording bundled with its ground truth.
#[derive(Debug, Clone)]
pub struct SynthRecording {
    pub recording: Recording,
    pub lung_volume: LungVolume,
    pub truth: GroundTruth,
}

impl SynthRecording {
    /// Generate flow, lung volume, beats, and both sensor channels.
    pub fn generate(cfg: &SynthConfig, label: impl Into<String>) -> Result<Self> {
        let flow = gen_flow(cfg)?;
        let lung_volume = detrend_lv(&integrate_flow(&flow))?;
        let truth = gen_beat_times(cfg, &lung_volume);
        let scg = gen_scg(&truth, cfg);
        let ecg = gen_ecg(&truth, cfg);
        let mut recording = Recording::new(label);
        recording.insert_channel(ChannelId::ScgZ, scg)?;
        recording.insert_channel(ChannelId::Ecg, ecg)?;
        recording.insert_channel(ChannelId::Flow, flow)?;
        Ok(Self {
            recording,
            lung_volume,
            truth,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{detect_ecg_rpeaks, detect_scg_events, DetectorConfig};

    fn lv_of(cfg: &SynthConfig) -> LungVolume {
        detrend_lv(&integrate_flow(&gen_flow(cfg).unwrap())).unwrap()
    }

    #[test]
    fn flow_has_configured_breath_timing() {
        // 12 breaths/min: 5 s cycles; I:E 1:3: inspiration is 1.25 s.
        let cfg = SynthConfig::default();
        let flow = gen_flow(&cfg).unwrap();
        let s = flow.samples();
        // Positive throughout (0, 1.25) s, non-positive at the boundary.
        for k in 1..400 {
            assert!(s[k] > 0.0, "sample {k} not inspiratory: {}", s[k]);
        }
        assert!(s[400] <= 0.0);
        for k in 401..1600 {
            assert!(s[k] < 0.0, "sample {k} not expiratory: {}", s[k]);
        }
        // Periodic with the 5 s breath cycle.
        for k in 0..1600 {
            assert!((s[k] - s[k + 1600]).abs() < 1e-9);
        }
    }

    #[test]
    fn flow_cycles_integrate_to_zero() {
        let cfg = SynthConfig::default();
        let lv = integrate_flow(&gen_flow(&cfg).unwrap());
        let v = lv.waveform().samples();
        for c in 0..11 {
            let a = v[c * 1600];
            let b = v[(c + 1) * 1600];
            assert!((b - a).abs() < 1e-6, "cycle {c} imbalance {}", b - a);
        }
    }

    #[test]
    fn detrended_lv_crosses_zero_twice_per_breath() {
        let cfg = SynthConfig::default();
        let lv = lv_of(&cfg);
        let s = lv.waveform().samples();
        let mut crossings = 0;
        for pair in s.windows(2) {
            if (pair[0] > 0.0) != (pair[1] > 0.0) {
                crossings += 1;
            }
        }
        let expected = (2.0 * cfg.resp_rate_bpm * cfg.duration_s / 60.0) as i64;
        assert!(
            (crossings - expected).abs() <= 1,
            "crossings {crossings} vs expected {expected}"
        );
    }

    #[test]
    fn unit_rsa_gives_uniform_intervals() {
        let cfg = SynthConfig {
            rsa_ratio: 1.0,
            snr_db: f64::INFINITY,
            ..SynthConfig::default()
        };
        let truth = gen_beat_times(&cfg, &lv_of(&cfg));
        let expected = 60.0 / cfg.base_hr_bpm;
        let tol = 1.0 / cfg.sample_rate;
        for pair in truth.beat_times.windows(2) {
            let dt = pair[1] - pair[0];
            assert!((dt - expected).abs() <= tol, "interval {dt}");
        }
    }

    #[test]
    fn within_segment_rate_ratio_matches_config() {
        let cfg = SynthConfig {
            duration_s: 120.0,
            snr_db: f64::INFINITY,
            ..SynthConfig::default()
        };
        let truth = gen_beat_times(&cfg, &lv_of(&cfg));
        // Mean instantaneous rate per phase over pairs of physically
        // consecutive beats that share a phase (no boundary in between).
        let mut sums = [0.0, 0.0];
        let mut counts = [0usize, 0usize];
        for i in 0..truth.beat_times.len() - 1 {
            if truth.beat_phases[i] == truth.beat_phases[i + 1] {
                let idx = match truth.beat_phases[i] {
                    LungPhase::Llv => 0,
                    LungPhase::Hlv => 1,
                };
                sums[idx] += 60.0 / (truth.beat_times[i + 1] - truth.beat_times[i]);
                counts[idx] += 1;
            }
        }
        let ratio = (sums[1] / counts[1] as f64) / (sums[0] / counts[0] as f64);
        assert!(
            (ratio - cfg.rsa_ratio).abs() <= 0.005,
            "recomputed ratio {ratio}"
        );
    }

    #[test]
    fn beat_count_tracks_base_rate() {
        let cfg = SynthConfig::default(); // 70 bpm, 60 s
        let truth = gen_beat_times(&cfg, &lv_of(&cfg));
        let n = truth.beat_times.len();
        assert!((68..=72).contains(&n), "beat count {n}");
    }

    #[test]
    fn duty_weighted_mean_rate_equals_base() {
        let cfg = SynthConfig::default();
        let lv = lv_of(&cfg);
        let truth = gen_beat_times(&cfg, &lv);
        let s = lv.waveform().samples();
        let duty = s.iter().filter(|&&v| v > 0.0).count() as f64 / s.len() as f64;
        let mean = truth.rate_llv_bpm * (1.0 - duty) + truth.rate_hlv_bpm * duty;
        assert!((mean - cfg.base_hr_bpm).abs() < 0.1, "duty-weighted {mean}");
        assert!((truth.rate_hlv_bpm / truth.rate_llv_bpm - cfg.rsa_ratio).abs() < 1e-12);
    }

    #[test]
    fn truth_rates_recompute_from_beat_times() {
        let cfg = SynthConfig::default();
        let truth = gen_beat_times(&cfg, &lv_of(&cfg));
        // Independent recomputation: literal grouped pairwise rates with
        // the 50 bpm floor.
        let mut recomputed = [Vec::new(), Vec::new()];
        for phase in [LungPhase::Llv, LungPhase::Hlv] {
            let times: Vec<f64> = truth
                .beat_times
                .iter()
                .zip(&truth.beat_phases)
                .filter(|(_, p)| **p == phase)
                .map(|(&t, _)| t)
                .collect();
            let idx = if phase == LungPhase::Llv { 0 } else { 1 };
            for pair in times.windows(2) {
                let hr = 60.0 / (pair[1] - pair[0]);
                if hr >= 50.0 {
                    recomputed[idx].push(hr);
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!((truth.true_hr_llv_bpm.unwrap() - mean(&recomputed[0])).abs() < 1e-12);
        assert!((truth.true_hr_hlv_bpm.unwrap() - mean(&recomputed[1])).abs() < 1e-12);
        let all: Vec<f64> = recomputed.concat();
        assert!((truth.true_combined_bpm.unwrap() - mean(&all)).abs() < 1e-12);
    }

    #[test]
    fn detector_recovers_beats_at_high_snr() {
        let cfg = SynthConfig {
            duration_s: 30.0,
            snr_db: 100.0,
            ..SynthConfig::default()
        };
        let lv = lv_of(&cfg);
        let truth = gen_beat_times(&cfg, &lv);
        let scg = gen_scg(&truth, &cfg);
        let events = detect_scg_events(&scg, &DetectorConfig::default()).unwrap();
        let in_window: Vec<f64> = truth
            .beat_times
            .iter()
            .copied()
            .filter(|&t| t > 0.55 && t < cfg.duration_s - 0.55)
            .collect();
        for t in &in_window {
            assert!(
                events.iter().any(|e| (e.time - t).abs() <= 0.02),
                "beat at {t} missed"
            );
        }
    }

    #[test]
    fn ecg_detector_recovers_beats_at_high_snr() {
        let cfg = SynthConfig {
            duration_s: 30.0,
            snr_db: 100.0,
            ..SynthConfig::default()
        };
        let lv = lv_of(&cfg);
        let truth = gen_beat_times(&cfg, &lv);
        let ecg = gen_ecg(&truth, &cfg);
        let events = detect_ecg_rpeaks(&ecg, &DetectorConfig::default()).unwrap();
        let in_window: Vec<f64> = truth
            .beat_times
            .iter()
            .copied()
            .filter(|&t| t > 0.55 && t < cfg.duration_s - 0.55)
            .collect();
        for t in &in_window {
            assert!(
                events.iter().any(|e| (e.time - t).abs() <= 0.01),
                "R-peak at {t} missed"
            );
        }
    }

    #[test]
    fn no_beats_means_silent_channels() {
        let cfg = SynthConfig::default();
        let truth = GroundTruth {
            beat_times: vec![],
            beat_phases: vec![],
            true_hr_llv_bpm: None,
            true_hr_hlv_bpm: None,
            true_combined_bpm: None,
            rate_llv_bpm: 0.0,
            rate_hlv_bpm: 0.0,
        };
        let scg = gen_scg(&truth, &cfg);
        assert!(detect_scg_events(&scg, &DetectorConfig::default())
            .unwrap()
            .is_empty());
        let ecg = gen_ecg(&truth, &cfg);
        assert!(detect_ecg_rpeaks(&ecg, &DetectorConfig::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn identical_configs_are_bit_identical() {
        let cfg = SynthConfig {
            duration_s: 20.0,
            ..SynthConfig::default()
        };
        let a = SynthRecording::generate(&cfg, "a").unwrap();
        let b = SynthRecording::generate(&cfg, "b").unwrap();
        assert_eq!(a.recording.channel(ChannelId::ScgZ), b.recording.channel(ChannelId::ScgZ));
        assert_eq!(a.recording.channel(ChannelId::Ecg), b.recording.channel(ChannelId::Ecg));
        assert_eq!(a.recording.channel(ChannelId::Flow), b.recording.channel(ChannelId::Flow));
        assert_eq!(a.truth, b.truth);

        let other = SynthRecording::generate(
            &SynthConfig {
                seed: 1,
                ..cfg
            },
            "c",
        )
        .unwrap();
        assert_ne!(
            a.recording.channel(ChannelId::ScgZ),
            other.recording.channel(ChannelId::ScgZ)
        );
    }

    #[test]
    fn rejects_invalid_config() {
        let bad = SynthConfig {
            duration_s: -1.0,
            ..SynthConfig::default()
        };
        assert!(gen_flow(&bad).is_err());
        let bad = SynthConfig {
            ie_ratio: (0.0, 3.0),
            ..SynthConfig::default()
        };
        assert!(gen_flow(&bad).is_err());
        let bad = SynthConfig {
            rsa_ratio: 0.0,
            ..SynthConfig::default()
        };
        assert!(gen_flow(&bad).is_err());
    }
}
