//! Waveform representation, resampling, zero-phase low-pass filtering, and
//! lung volume reconstruction from respiratory flow.
//!
//! The filter is a 4th-order Butterworth applied forward-backward so beat
//! timing is never shifted. Resampling low-passes at 0.45 x the target
//! Nyquist before linear interpolation at the output sample times.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled scalar time series.
///
/// Construction rejects empty sample vectors, non-positive rates, and
/// non-finite samples, so every downstream operation can assume a valid
/// signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    rate: f64,
    start_time: f64,
}

impl Waveform {
    /// New waveform starting at t = 0.
    pub fn new(samples: Vec<f64>, rate: f64) -> Result<Self> {
        Self::with_start_time(samples, rate, 0.0)
    }

    pub fn with_start_time(samples: Vec<f64>, rate: f64, start_time: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive and finite, got {rate}"
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidArgument(
                "start time must be finite".to_string(),
            ));
        }
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "waveform must contain at least one sample".to_string(),
            ));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            rate,
            start_time,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Sampling rate in Hz.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Time of the first sample in seconds.
    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    /// Record duration in seconds (sample count over rate).
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    /// Time of the sample at `idx`.
    pub fn time_at(&self, idx: usize) -> f64 {
        self.start_time + idx as f64 / self.rate
    }

    /// Time of the last sample.
    pub fn end_time(&self) -> f64 {
        self.time_at(self.samples.len() - 1)
    }
}

/// Channel identifiers of a multi-channel recording.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum ChannelId {
    ScgX,
    ScgY,
    ScgZ,
    Ecg,
    Flow,
}

impl ChannelId {
    pub const ALL: [ChannelId; 5] = [
        ChannelId::ScgX,
        ChannelId::ScgY,
        ChannelId::ScgZ,
        ChannelId::Ecg,
        ChannelId::Flow,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelId::ScgX => "scg_x",
            ChannelId::ScgY => "scg_y",
            ChannelId::ScgZ => "scg_z",
            ChannelId::Ecg => "ecg",
            ChannelId::Flow => "flow",
        }
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scg_x" => Ok(ChannelId::ScgX),
            "scg_y" => Ok(ChannelId::ScgY),
            "scg_z" => Ok(ChannelId::ScgZ),
            "ecg" => Ok(ChannelId::Ecg),
            "flow" => Ok(ChannelId::Flow),
            other => Err(Error::InvalidArgument(format!(
                "unknown channel id '{other}' (expected one of scg_x, scg_y, scg_z, ecg, flow)"
            ))),
        }
    }
}

/// Named channel set sharing one time base.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    channels: BTreeMap<ChannelId, Waveform>,
    pub subject_meta: String,
}

impl Recording {
    pub fn new(subject_meta: impl Into<String>) -> Self {
        Self {
            channels: BTreeMap::new(),
            subject_meta: subject_meta.into(),
        }
    }

    /// Insert a channel. All channels must share rate and start time.
    pub fn insert_channel(&mut self, id: ChannelId, w: Waveform) -> Result<()> {
        if let Some((_, existing)) = self.channels.iter().next() {
            if existing.rate() != w.rate() || existing.start_time() != w.start_time() {
                return Err(Error::InvalidArgument(format!(
                    "channel {id} does not share the recording time base \
                     (rate {} vs {}, start {} vs {})",
                    w.rate(),
                    existing.rate(),
                    w.start_time(),
                    existing.start_time()
                )));
            }
        }
        self.channels.insert(id, w);
        Ok(())
    }

    pub fn channel(&self, id: ChannelId) -> Option<&Waveform> {
        self.channels.get(&id)
    }

    pub fn channels(&self) -> impl Iterator<Item = (ChannelId, &Waveform)> {
        self.channels.iter().map(|(id, w)| (*id, w))
    }

    /// Shared sampling rate, if any channel is present.
    pub fn rate(&self) -> Option<f64> {
        self.channels.values().next().map(|w| w.rate())
    }
}

/// Relative lung volume: the running integral of respiratory flow.
///
/// Values are in volt-seconds (uncalibrated). The sign test used for phase
/// grouping is only meaningful after [`detrend_lv`].
#[derive(Debug, Clone, PartialEq)]
pub struct LungVolume {
    wave: Waveform,
}

impl LungVolume {
    /// Wrap an already-integrated (or synthetic) volume track.
    pub fn from_waveform(wave: Waveform) -> Self {
        Self { wave }
    }

    pub fn waveform(&self) -> &Waveform {
        &self.wave
    }

    /// Lung volume at the sample nearest to `t`.
    ///
    /// Errors if `t` falls outside the sampled span.
    pub fn value_at_nearest(&self, t: f64) -> Result<f64> {
        let w = &self.wave;
        let eps = 1e-9 * w.end_time().abs().max(1.0);
        if t < w.start_time() - eps || t > w.end_time() + eps {
            return Err(Error::InvalidArgument(format!(
                "time {t} s is outside the lung volume span [{}, {}]",
                w.start_time(),
                w.end_time()
            )));
        }
        let idx = ((t - w.start_time()) * w.rate()).round();
        let idx = (idx.max(0.0) as usize).min(w.len() - 1);
        Ok(w.samples()[idx])
    }
}

// ---------------------------------------------------------------------------
// Butterworth design and zero-phase application
// ---------------------------------------------------------------------------

/// One second-order section, denominator normalized to a0 = 1.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    /// Transposed direct-form II state matching a steady unit DC input.
    /// Starting from this state (scaled by the first sample) a constant
    /// input produces a constant output from sample zero.
    fn dc_state(&self) -> (f64, f64) {
        let k = (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2);
        let s2 = self.b2 - self.a2 * k;
        let s1 = self.b1 + self.b2 - (self.a1 + self.a2) * k;
        (s1, s2)
    }

    fn run_in_place(&self, x: &mut [f64]) {
        let (zi1, zi2) = self.dc_state();
        let mut s1 = zi1 * x[0];
        let mut s2 = zi2 * x[0];
        for v in x.iter_mut() {
            let xin = *v;
            let y = self.b0 * xin + s1;
            s1 = self.b1 * xin - self.a1 * y + s2;
            s2 = self.b2 * xin - self.a2 * y;
            *v = y;
        }
    }
}

/// Butterworth low-pass as cascaded biquads (bilinear transform with
/// prewarped cutoff). `order` must be even and positive.
fn butterworth_lowpass(order: usize, cutoff_hz: f64, rate_hz: f64) -> Vec<Biquad> {
    debug_assert!(order > 0 && order % 2 == 0);
    debug_assert!(cutoff_hz > 0.0 && cutoff_hz < rate_hz / 2.0);
    let warped = (std::f64::consts::PI * cutoff_hz / rate_hz).tan();
    let n = order as f64;
    (0..order / 2)
        .map(|k| {
            // Upper-half-plane analog prototype pole, scaled by the warped cutoff.
            let theta = std::f64::consts::PI * (2 * k + order + 1) as f64 / (2.0 * n);
            let s_re = warped * theta.cos();
            let s_im = warped * theta.sin();
            // Bilinear map z = (1 + s) / (1 - s).
            let den = (1.0 - s_re) * (1.0 - s_re) + s_im * s_im;
            let z_re = (1.0 - s_re * s_re - s_im * s_im) / den;
            let z_im = 2.0 * s_im / den;
            let a1 = -2.0 * z_re;
            let a2 = z_re * z_re + z_im * z_im;
            // Two zeros at z = -1; gain normalized for unit DC response.
            let g = (1.0 + a1 + a2) / 4.0;
            Biquad {
                b0: g,
                b1: 2.0 * g,
                b2: g,
                a1,
                a2,
            }
        })
        .collect()
}

/// Forward-backward filtering with odd edge extension and DC-matched initial
/// states. Output has the same length as the input and zero phase shift.
fn filtfilt(sections: &[Biquad], x: &[f64], padlen: usize) -> Vec<f64> {
    let n = x.len();
    let padlen = padlen.min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * padlen);
    for i in (1..=padlen).rev() {
        ext.push(2.0 * x[0] - x[i]);
    }
    ext.extend_from_slice(x);
    for i in (n - 1 - padlen..n - 1).rev() {
        ext.push(2.0 * x[n - 1] - x[i]);
    }
    for s in sections {
        s.run_in_place(&mut ext);
    }
    ext.reverse();
    for s in sections {
        s.run_in_place(&mut ext);
    }
    ext.reverse();
    ext[padlen..padlen + n].to_vec()
}

/// Edge padding long enough for the slowest pole to settle.
fn pad_len_for(cutoff_hz: f64, rate_hz: f64) -> usize {
    ((3.0 * rate_hz / cutoff_hz).ceil() as usize).max(24)
}

const FILTER_ORDER: usize = 4;

/// Anti-alias cutoff as a fraction of the target Nyquist frequency.
const ANTI_ALIAS_FRACTION: f64 = 0.45;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Resample `w` down to `target_rate`.
///
/// Anti-alias filtering (zero-phase Butterworth at 0.45 x the target
/// Nyquist) is applied before linear interpolation at the output sample
/// times, so content above the new Nyquist is suppressed. Duration is
/// preserved to within one output sample period. Upsampling is rejected.
pub fn resample(w: &Waveform, target_rate: f64) -> Result<Waveform> {
    if !target_rate.is_finite() || target_rate <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "target rate must be positive, got {target_rate}"
        )));
    }
    if target_rate > w.rate() {
        return Err(Error::InvalidArgument(format!(
            "cannot upsample from {} Hz to {} Hz",
            w.rate(),
            target_rate
        )));
    }
    if target_rate == w.rate() {
        return Ok(w.clone());
    }
    if w.len() == 1 {
        return Waveform::with_start_time(w.samples().to_vec(), target_rate, w.start_time());
    }

    let aa_cutoff = ANTI_ALIAS_FRACTION * (target_rate / 2.0);
    let sections = butterworth_lowpass(FILTER_ORDER, aa_cutoff, w.rate());
    let filtered = filtfilt(&sections, w.samples(), pad_len_for(aa_cutoff, w.rate()));

    let n_out = ((w.len() as f64) * target_rate / w.rate()).round().max(1.0) as usize;
    let ratio = w.rate() / target_rate;
    let last = w.len() - 1;
    let mut out = Vec::with_capacity(n_out);
    for k in 0..n_out {
        let pos = (k as f64 * ratio).min(last as f64);
        let i0 = (pos.floor() as usize).min(last - 1);
        let frac = pos - i0 as f64;
        out.push(filtered[i0] + frac * (filtered[i0 + 1] - filtered[i0]));
    }
    Waveform::with_start_time(out, target_rate, w.start_time())
}

/// Zero-phase low-pass at `cutoff_hz` (4th-order Butterworth run forward
/// and backward). DC gain is 1 and beat timing is not shifted.
pub fn lowpass(w: &Waveform, cutoff_hz: f64) -> Result<Waveform> {
    let nyquist = w.rate() / 2.0;
    if !cutoff_hz.is_finite() || cutoff_hz <= 0.0 || cutoff_hz >= nyquist {
        return Err(Error::InvalidArgument(format!(
            "cutoff must lie in (0, {nyquist}) Hz, got {cutoff_hz}"
        )));
    }
    let sections = butterworth_lowpass(FILTER_ORDER, cutoff_hz, w.rate());
    let filtered = filtfilt(&sections, w.samples(), pad_len_for(cutoff_hz, w.rate()));
    Waveform::with_start_time(filtered, w.rate(), w.start_time())
}

/// Lung volume as the cumulative trapezoidal integral of respiratory flow.
///
/// LV starts at 0; positive flow (inspiration) increases it.
pub fn integrate_flow(flow: &Waveform) -> LungVolume {
    let dt = 1.0 / flow.rate();
    let samples = flow.samples();
    let mut lv = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    lv.push(0.0);
    for i in 1..samples.len() {
        acc += 0.5 * (samples[i - 1] + samples[i]) * dt;
        lv.push(acc);
    }
    LungVolume {
        wave: Waveform::with_start_time(lv, flow.rate(), flow.start_time())
            .expect("integral of a valid waveform is valid"),
    }
}

/// Remove the best-fit linear trend and the mean from a lung volume signal,
/// so its sign splits the record into low and high lung-volume phases.
pub fn detrend_lv(lv: &LungVolume) -> Result<LungVolume> {
    let w = lv.waveform();
    let n = w.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "detrending requires at least 2 samples".to_string(),
        ));
    }
    let samples = w.samples();
    let nf = n as f64;
    let mid = (nf - 1.0) / 2.0;
    let mean = samples.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, &y) in samples.iter().enumerate() {
        let x = i as f64 - mid;
        sxy += x * (y - mean);
        sxx += x * x;
    }
    let slope = sxy / sxx;
    let mut out: Vec<f64> = samples
        .iter()
        .enumerate()
        .map(|(i, &y)| y - mean - slope * (i as f64 - mid))
        .collect();
    // Pin the residual mean against accumulated rounding.
    let residual_mean = out.iter().sum::<f64>() / nf;
    for v in out.iter_mut() {
        *v -= residual_mean;
    }
    Ok(LungVolume {
        wave: Waveform::with_start_time(out, w.rate(), w.start_time())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, rate: f64, duration: f64) -> Waveform {
        let n = (rate * duration).round() as usize;
        let samples = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / rate).sin())
            .collect();
        Waveform::new(samples, rate).unwrap()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn waveform_rejects_bad_inputs() {
        assert!(Waveform::new(vec![], 100.0).is_err());
        assert!(Waveform::new(vec![1.0], 0.0).is_err());
        assert!(Waveform::new(vec![1.0], -5.0).is_err());
        assert!(Waveform::new(vec![1.0, f64::NAN], 100.0).is_err());
        assert!(Waveform::new(vec![1.0, f64::INFINITY], 100.0).is_err());
        let w = Waveform::new(vec![1.0, 2.0], 100.0).unwrap();
        assert_eq!(w.duration(), 0.02);
    }

    #[test]
    fn recording_requires_shared_time_base() {
        let mut rec = Recording::new("s1");
        rec.insert_channel(ChannelId::ScgZ, Waveform::new(vec![0.0; 10], 320.0).unwrap())
            .unwrap();
        let err = rec.insert_channel(ChannelId::Flow, Waveform::new(vec![0.0; 10], 100.0).unwrap());
        assert!(err.is_err());
        rec.insert_channel(ChannelId::Flow, Waveform::new(vec![0.0; 10], 320.0).unwrap())
            .unwrap();
        assert_eq!(rec.rate(), Some(320.0));
    }

    #[test]
    fn resample_preserves_dc() {
        let w = Waveform::new(vec![1.0; 10_000], 10_000.0).unwrap();
        let out = resample(&w, 320.0).unwrap();
        assert_eq!(out.len(), 320);
        assert_eq!(out.rate(), 320.0);
        for &v in out.samples() {
            assert!((v - 1.0).abs() < 1e-6, "DC sample drifted to {v}");
        }
    }

    #[test]
    fn resample_matches_analytic_sine() {
        // 10 Hz unit sine, 2 s at 10 kHz, down to 320 Hz. Oracle: the
        // analytic sine evaluated at the output sample times.
        let w = sine(10.0, 10_000.0, 2.0);
        let out = resample(&w, 320.0).unwrap();
        let trim = (0.1 * out.rate()) as usize;
        let mut max_err = 0.0f64;
        for i in trim..out.len() - trim {
            let t = i as f64 / out.rate();
            let expected = (2.0 * std::f64::consts::PI * 10.0 * t).sin();
            max_err = max_err.max((out.samples()[i] - expected).abs());
        }
        assert!(max_err < 1e-3, "max error {max_err}");
    }

    #[test]
    fn resample_identity_at_same_rate() {
        let w = sine(5.0, 320.0, 1.0);
        let out = resample(&w, 320.0).unwrap();
        assert_eq!(out, w);
    }

    #[test]
    fn resample_rejects_upsampling_and_bad_rates() {
        let w = sine(5.0, 320.0, 1.0);
        assert!(resample(&w, 640.0).is_err());
        assert!(resample(&w, 0.0).is_err());
        assert!(resample(&w, -1.0).is_err());
    }

    #[test]
    fn lowpass_keeps_dc() {
        let w = Waveform::new(vec![0.7; 640], 320.0).unwrap();
        let out = lowpass(&w, 100.0).unwrap();
        let trim = 32;
        for &v in &out.samples()[trim..out.len() - trim] {
            assert!((v - 0.7).abs() < 1e-6, "DC drifted to {v}");
        }
    }

    #[test]
    fn lowpass_passband_gain_near_unity() {
        // Gain measured from the implemented filter's output amplitude.
        let w = sine(10.0, 320.0, 4.0);
        let out = lowpass(&w, 100.0).unwrap();
        let trim = 160;
        let gain = rms(&out.samples()[trim..out.len() - trim])
            / rms(&w.samples()[trim..w.len() - trim]);
        assert!((0.99..=1.01).contains(&gain), "passband gain {gain}");
    }

    #[test]
    fn lowpass_stopband_attenuation() {
        let w = sine(150.0, 320.0, 4.0);
        let out = lowpass(&w, 100.0).unwrap();
        let trim = 160;
        let gain = rms(&out.samples()[trim..out.len() - trim])
            / rms(&w.samples()[trim..w.len() - trim]);
        let db = -20.0 * gain.log10();
        assert!(db >= 20.0, "stopband attenuation only {db:.1} dB");
    }

    #[test]
    fn lowpass_rejects_cutoff_at_or_above_nyquist() {
        let w = sine(5.0, 320.0, 1.0);
        assert!(lowpass(&w, 160.0).is_err());
        assert!(lowpass(&w, 200.0).is_err());
        assert!(lowpass(&w, 0.0).is_err());
    }

    #[test]
    fn integrate_zero_flow_is_zero() {
        let flow = Waveform::new(vec![0.0; 100], 320.0).unwrap();
        let lv = integrate_flow(&flow);
        assert!(lv.waveform().samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn integrate_constant_flow_is_ramp() {
        let rate = 320.0;
        let flow = Waveform::new(vec![1.0; 321], rate).unwrap();
        let lv = integrate_flow(&flow);
        let step = 1.0 / rate;
        for (i, &v) in lv.waveform().samples().iter().enumerate() {
            let expected = i as f64 * step;
            assert!((v - expected).abs() <= step, "ramp off at {i}: {v}");
        }
        let last = *lv.waveform().samples().last().unwrap();
        assert!((last - 1.0).abs() <= step);
    }

    #[test]
    fn integrate_matches_analytic_antiderivative() {
        // flow = sin(2 pi 0.2 t); oracle: (1 - cos(2 pi 0.2 t)) / (2 pi 0.2).
        let omega = 2.0 * std::f64::consts::PI * 0.2;
        let rate = 320.0;
        let n = (10.0 * rate) as usize;
        let flow = Waveform::new(
            (0..n).map(|i| (omega * i as f64 / rate).sin()).collect(),
            rate,
        )
        .unwrap();
        let lv = integrate_flow(&flow);
        let mut max_err = 0.0f64;
        for (i, &v) in lv.waveform().samples().iter().enumerate() {
            let t = i as f64 / rate;
            let expected = (1.0 - (omega * t).cos()) / omega;
            max_err = max_err.max((v - expected).abs());
        }
        assert!(max_err < 1e-3, "max integration error {max_err}");
    }

    #[test]
    fn detrend_removes_pure_ramp() {
        let rate = 320.0;
        let flow = Waveform::new(vec![0.5; 640], rate).unwrap();
        let lv = integrate_flow(&flow); // ramp
        let out = detrend_lv(&lv).unwrap();
        for &v in out.waveform().samples() {
            assert!(v.abs() < 1e-9, "ramp residue {v}");
        }
    }

    /// Sinusoid with no linear trend: even-symmetric about the window
    /// center, so its least-squares slope vanishes.
    fn symmetric_cosine(freq: f64, rate: f64, half: usize) -> Vec<f64> {
        let n = 2 * half + 1;
        (0..n)
            .map(|i| {
                let dt = (i as f64 - half as f64) / rate;
                (2.0 * std::f64::consts::PI * freq * dt).cos()
            })
            .collect()
    }

    #[test]
    fn detrend_leaves_zero_mean_sine_unchanged() {
        let rate = 320.0;
        let mut raw = symmetric_cosine(1.0, rate, 1600);
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        for v in raw.iter_mut() {
            *v -= mean;
        }
        let lv = LungVolume {
            wave: Waveform::new(raw.clone(), rate).unwrap(),
        };
        let out = detrend_lv(&lv).unwrap();
        for (a, b) in out.waveform().samples().iter().zip(&raw) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn detrend_recovers_drifting_sine() {
        // Clean sinusoid plus 0.05 t + 0.3 drift; oracle is the clean sinusoid.
        let rate = 320.0;
        let clean = symmetric_cosine(0.5, rate, 1600);
        let n = clean.len();
        let drifted: Vec<f64> = clean
            .iter()
            .enumerate()
            .map(|(i, &v)| v + 0.05 * (i as f64 / rate) + 0.3)
            .collect();
        let lv = LungVolume {
            wave: Waveform::new(drifted, rate).unwrap(),
        };
        let out = detrend_lv(&lv).unwrap();
        let recovered = out.waveform().samples();
        let mean_a = recovered.iter().sum::<f64>() / n as f64;
        let mean_b = clean.iter().sum::<f64>() / n as f64;
        let mut num = 0.0;
        let mut da = 0.0;
        let mut db = 0.0;
        for (a, b) in recovered.iter().zip(&clean) {
            num += (a - mean_a) * (b - mean_b);
            da += (a - mean_a).powi(2);
            db += (b - mean_b).powi(2);
        }
        let corr = num / (da.sqrt() * db.sqrt());
        assert!(corr >= 0.999, "correlation {corr}");
    }

    #[test]
    fn detrend_rejects_short_input() {
        let lv = LungVolume {
            wave: Waveform::new(vec![1.0], 320.0).unwrap(),
        };
        assert!(detrend_lv(&lv).is_err());
    }

    #[test]
    fn detrend_output_has_zero_mean() {
        let rate = 320.0;
        let raw: Vec<f64> = (0..1000)
            .map(|i| (i as f64 * 0.01).sin() + 0.002 * i as f64 + 5.0)
            .collect();
        let lv = LungVolume {
            wave: Waveform::new(raw, rate).unwrap(),
        };
        let out = detrend_lv(&lv).unwrap();
        let mean =
            out.waveform().samples().iter().sum::<f64>() / out.waveform().len() as f64;
        assert!(mean.abs() < 1e-9, "mean {mean}");
    }

    #[test]
    fn lung_volume_nearest_sample_lookup() {
        let lv = LungVolume {
            wave: Waveform::new(vec![1.0, 2.0, 3.0, 4.0], 2.0).unwrap(),
        };
        assert_eq!(lv.value_at_nearest(0.0).unwrap(), 1.0);
        assert_eq!(lv.value_at_nearest(0.6).unwrap(), 2.0);
        assert_eq!(lv.value_at_nearest(1.5).unwrap(), 4.0);
        assert!(lv.value_at_nearest(2.0).is_err());
        assert!(lv.value_at_nearest(-0.3).is_err());
    }
}
