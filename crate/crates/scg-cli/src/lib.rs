//! Library side of the `scg` tool: CSV ingestion, pipeline orchestration,
//! and report emission. The binary is a thin argument-parsing shell over
//! [`pipeline::run_pipeline`].

pub mod config;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod report;

pub use config::{parse_synth_spec, ChannelMap, RunConfig, SynthBatch};
pub use error::CliError;
pub use ingest::{read_recording, write_recording};
pub use pipeline::{analyze_recording, run_pipeline, AnalysisParams, RunReport};
