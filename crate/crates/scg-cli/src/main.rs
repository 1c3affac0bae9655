use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use scg_cli::config::{
    parse_synth_spec, ChannelMap, RunConfig, DEFAULT_LOWPASS_CUTOFF_HZ, DEFAULT_TARGET_RATE_HZ,
};
use scg_cli::error::CliError;
use scg_cli::pipeline::{run_pipeline, OutcomeStatus};
use scg_core::{DetectorConfig, GateConfig};

/// Heart rate from seismocardiography, split by lung-volume phase.
///
/// Ingests CSV recordings (or generates synthetic ones), estimates the
/// heart rate during low and high lung volume, and reports per-recording
/// summaries plus ECG agreement statistics.
#[derive(Debug, Parser)]
#[command(name = "scg", version)]
struct Args {
    /// Input recording CSVs (header row, time column in seconds).
    #[arg(long = "input", value_name = "PATH")]
    input: Vec<PathBuf>,

    /// Channel-to-column mapping entries, e.g. --map scg_z=az --map flow=pneumo.
    /// Keys: time, scg_x, scg_y, scg_z, ecg, flow.
    #[arg(long = "map", value_name = "CHANNEL=COLUMN")]
    map: Vec<String>,

    /// Working sample rate in Hz; faster inputs are decimated to this.
    #[arg(long = "target-rate", value_name = "HZ", default_value_t = DEFAULT_TARGET_RATE_HZ)]
    target_rate: f64,

    /// Low-pass cutoff in Hz applied before detection.
    #[arg(long = "cutoff", value_name = "HZ", default_value_t = DEFAULT_LOWPASS_CUTOFF_HZ)]
    cutoff: f64,

    /// Minimum retained heart rate in bpm; slower pairs are discarded.
    #[arg(long = "hr-min", value_name = "BPM", default_value_t = 50.0)]
    hr_min: f64,

    /// Output directory for reports and CSVs.
    #[arg(long = "out", value_name = "DIR", default_value = "scg-out")]
    out: PathBuf,

    /// Generate synthetic recordings instead of ingesting files.
    /// Comma-separated key=value spec, e.g.
    /// "count=10,duration=120,base_hr=70,rsa=1.09,snr=20".
    #[arg(long = "synth", value_name = "SPEC")]
    synth: Option<String>,

    /// Base seed for synthetic generation (recording i uses seed + i).
    #[arg(long = "seed", value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Also write each recording in the ingestion CSV format.
    #[arg(long = "dump-recordings", default_value_t = false)]
    dump_recordings: bool,
}

fn build_config(args: Args) -> Result<RunConfig, CliError> {
    let mapping = ChannelMap::parse(&args.map)?;
    let synth = args
        .synth
        .as_deref()
        .map(|spec| parse_synth_spec(spec, args.seed))
        .transpose()?;
    Ok(RunConfig {
        inputs: args.input,
        mapping,
        target_rate_hz: args.target_rate,
        lowpass_cutoff_hz: args.cutoff,
        gate: GateConfig {
            hr_min_bpm: args.hr_min,
            ..GateConfig::default()
        },
        detector: DetectorConfig::default(),
        out_dir: args.out,
        synth,
        seed: args.seed,
        dump_recordings: args.dump_recordings,
    })
}

fn run() -> Result<(), CliError> {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let cfg = build_config(args)?;
    let report = run_pipeline(&cfg)?;

    let ok = report
        .recordings
        .iter()
        .filter(|r| r.status == OutcomeStatus::Ok)
        .count();
    let failed = report.recordings.len() - ok;
    println!(
        "analyzed {ok} recording(s){}; report written to {}",
        if failed > 0 {
            format!(", {failed} failed")
        } else {
            String::new()
        },
        cfg.out_dir.join("report.txt").display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
