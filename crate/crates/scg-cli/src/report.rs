//! Report rendering: a human-readable table text, a JSON document, the
//! per-recording heart rate sample CSVs, and the agreement CSV.
//!
//! Nothing here embeds timestamps or other run-varying state, so two runs
//! over identical inputs produce byte-identical artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use scg_core::PhaseStats;

use crate::config::{DEFAULT_LOWPASS_CUTOFF_HZ, DEFAULT_TARGET_RATE_HZ};
use crate::error::Result;
use crate::pipeline::{OutcomeStatus, RunReport};

pub fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Write report.txt, report.json, per-recording sample CSVs, and the
/// agreement CSV into `out_dir`.
pub fn write_artifacts(report: &RunReport, out_dir: &Path) -> Result<()> {
    fs::write(out_dir.join("report.txt"), render_text(report))?;
    let mut json = serde_json::to_string_pretty(report)
        .map_err(|e| crate::error::CliError::Internal(e.to_string()))?;
    json.push('\n');
    fs::write(out_dir.join("report.json"), json)?;

    for outcome in &report.recordings {
        let Some(analysis) = &outcome.analysis else {
            continue;
        };
        let mut csv = String::from("phase,pair_time_s,hr_bpm,status,reason\n");
        for series in [&analysis.llv_series, &analysis.hlv_series] {
            for s in &series.samples {
                let _ = writeln!(
                    csv,
                    "{},{},{},retained,",
                    series.phase, s.pair_time, s.hr_bpm
                );
            }
            for d in &series.discarded {
                let _ = writeln!(
                    csv,
                    "{},{},{},discarded,{}",
                    series.phase, d.pair_time, d.hr_bpm, d.reason
                );
            }
        }
        let name = format!("{}_hr_samples.csv", sanitize_label(&outcome.label));
        fs::write(out_dir.join(name), csv)?;
    }

    if let Some(agreement) = &report.agreement {
        let mut csv = String::from(
            "label,hr_ecg_bpm,hr_scg_bpm,mean_bpm,diff_bpm,bias_bpm,loa_low_bpm,loa_high_bpm\n",
        );
        for p in &agreement.pairs {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                sanitize_label(&p.label),
                p.hr_a_bpm,
                p.hr_b_bpm,
                0.5 * (p.hr_a_bpm + p.hr_b_bpm),
                p.hr_a_bpm - p.hr_b_bpm,
                agreement.bias_bpm,
                agreement.loa_low_bpm,
                agreement.loa_high_bpm
            );
        }
        fs::write(out_dir.join("agreement.csv"), csv)?;
    }
    Ok(())
}

fn fmt_stats(stats: &PhaseStats) -> String {
    match (stats.mean_bpm, stats.sd_bpm) {
        (Some(mean), Some(sd)) => {
            let flag = if stats.sd_degenerate { "*" } else { "" };
            format!("{mean:6.2} +/- {sd:5.2}{flag} ({})", stats.count)
        }
        _ => "-".to_string(),
    }
}

fn fmt_opt(value: Option<f64>, precision: usize) -> String {
    value
        .map(|v| format!("{v:.precision$}"))
        .unwrap_or_else(|| "-".to_string())
}

fn default_marker(actual: f64, default: f64) -> &'static str {
    if actual == default {
        " (default)"
    } else {
        ""
    }
}

pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    let cfg = &report.config;
    let _ = writeln!(
        out,
        "SCG lung-volume phase heart rate report (v{})",
        report.version
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "config");
    let _ = writeln!(
        out,
        "  target_rate_hz:    {}{}",
        cfg.target_rate_hz,
        default_marker(cfg.target_rate_hz, DEFAULT_TARGET_RATE_HZ)
    );
    let _ = writeln!(
        out,
        "  lowpass_cutoff_hz: {}{}",
        cfg.lowpass_cutoff_hz,
        default_marker(cfg.lowpass_cutoff_hz, DEFAULT_LOWPASS_CUTOFF_HZ)
    );
    let _ = writeln!(
        out,
        "  hr_min_bpm:        {}{}",
        cfg.gate.hr_min_bpm,
        default_marker(cfg.gate.hr_min_bpm, 50.0)
    );
    let _ = writeln!(
        out,
        "  lv_zero_epsilon:   {}{}",
        cfg.gate.lv_zero_epsilon,
        default_marker(cfg.gate.lv_zero_epsilon, 0.0)
    );
    let d = &cfg.detector;
    let _ = writeln!(
        out,
        "  detector:          refractory {} s, smooth {} s, threshold {} x median, edge {} s",
        d.refractory_s, d.envelope_smooth_s, d.threshold_factor, d.edge_exclude_s
    );
    let _ = writeln!(out, "  seed:              {}", cfg.seed);
    match &cfg.synth {
        Some(batch) => {
            let c = &batch.cfg;
            let _ = writeln!(
                out,
                "  synth:             count={} duration={} s rate={} Hz resp={}/min \
                 ie={}:{} base_hr={} rsa={} snr={} dB",
                batch.count,
                c.duration_s,
                c.sample_rate,
                c.resp_rate_bpm,
                c.ie_ratio.0,
                c.ie_ratio.1,
                c.base_hr_bpm,
                c.rsa_ratio,
                c.snr_db
            );
        }
        None => {
            let inputs: Vec<String> = cfg
                .inputs
                .iter()
                .map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string()))
                .collect();
            let _ = writeln!(out, "  inputs:            {}", inputs.join(", "));
        }
    }

    let label_width = report
        .recordings
        .iter()
        .map(|r| r.label.len())
        .max()
        .unwrap_or(5)
        .max(5);

    let _ = writeln!(out);
    let _ = writeln!(out, "per-phase heart rate (bpm, mean +/- SD (n))");
    let _ = writeln!(
        out,
        "  {:<label_width$}  {:<22}  {:<22}",
        "label", "LLV", "HLV"
    );
    for rec in &report.recordings {
        match (&rec.status, &rec.analysis) {
            (OutcomeStatus::Ok, Some(a)) => {
                let _ = writeln!(
                    out,
                    "  {:<label_width$}  {:<22}  {:<22}",
                    rec.label,
                    fmt_stats(&a.summary.llv),
                    fmt_stats(&a.summary.hlv)
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "  {:<label_width$}  FAILED: {}",
                    rec.label,
                    rec.error.as_deref().unwrap_or("unknown error")
                );
            }
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "combined heart rate (bpm)");
    let _ = writeln!(out, "  {:<label_width$}  combined", "label");
    for rec in &report.recordings {
        if let Some(a) = &rec.analysis {
            let _ = writeln!(
                out,
                "  {:<label_width$}  {}",
                rec.label,
                fmt_opt(a.summary.combined_bpm, 2)
            );
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "HLV/LLV ratio");
    let _ = writeln!(out, "  {:<label_width$}  ratio", "label");
    for rec in &report.recordings {
        if let Some(a) = &rec.analysis {
            let _ = writeln!(
                out,
                "  {:<label_width$}  {}",
                rec.label,
                fmt_opt(a.summary.ratio_hlv_llv, 4)
            );
        }
    }

    let _ = writeln!(out);
    match &report.agreement {
        Some(agr) => {
            let _ = writeln!(out, "agreement (ECG vs SCG combined heart rate, bpm)");
            let _ = writeln!(
                out,
                "  {:<label_width$}  {:>8}  {:>8}  {:>8}",
                "label", "ECG", "SCG", "diff"
            );
            for p in &agr.pairs {
                let _ = writeln!(
                    out,
                    "  {:<label_width$}  {:>8.2}  {:>8.2}  {:>+8.3}",
                    p.label,
                    p.hr_a_bpm,
                    p.hr_b_bpm,
                    p.hr_a_bpm - p.hr_b_bpm
                );
            }
            let _ = writeln!(
                out,
                "  bias {:+.3}  sd {:.3}  limits [{:+.3}, {:+.3}]  (bias +/- 1.96 SD)",
                agr.bias_bpm, agr.sd_bpm, agr.loa_low_bpm, agr.loa_high_bpm
            );
        }
        None => {
            let _ = writeln!(out, "agreement: not computed");
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "audit");
    let _ = writeln!(
        out,
        "  {:<label_width$}  {:>7}  {:>7}  {:>8}  {:>15}  {:>15}",
        "label", "scg_ev", "ecg_ev", "at_zero", "llv kept/gated", "hlv kept/gated"
    );
    for rec in &report.recordings {
        if let Some(a) = &rec.analysis {
            let _ = writeln!(
                out,
                "  {:<label_width$}  {:>7}  {:>7}  {:>8}  {:>15}  {:>15}",
                rec.label,
                a.audit.scg_events,
                a.audit
                    .ecg_events
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "-".to_string()),
                a.audit.dropped_at_zero,
                format!("{}/{}", a.audit.llv_retained, a.audit.llv_discarded),
                format!("{}/{}", a.audit.hlv_retained, a.audit.hlv_discarded),
            );
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "notes");
    for note in &report.notes {
        let _ = writeln!(out, "  - {note}");
    }
    out
}
