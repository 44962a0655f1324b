//! In-ear pulse-oximetry cognitive-workload pipeline.

pub mod cli;
pub mod dsp;
pub mod features;
pub mod ingest;
pub mod learner;
pub mod metrics;
pub mod pipeline;
pub mod record;
pub mod synth;
pub mod vitals;
