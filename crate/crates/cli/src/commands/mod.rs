pub mod attn;
pub mod compare;
pub mod corpus;
pub mod filter;

use std::path::Path;

use prosodyne::dsp::{wav::read_wav, DspError};
use prosodyne::metrics::{EvalError, MetricError};
use prosodyne::AudioBuffer;

use crate::CliError;

pub(crate) fn load_wav(path: &Path) -> Result<AudioBuffer, CliError> {
    read_wav(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Configuration and sample-rate problems are the caller's fault; everything
/// else is a computation failure.
pub(crate) fn classify(e: EvalError) -> CliError {
    match e.error {
        MetricError::SampleRateMismatch { .. } | MetricError::Dsp(DspError::Config(_)) => CliError::input(e),
        _ => CliError::compute(e),
    }
}

pub(crate) fn check_eval_config(config: &prosodyne::metrics::EvalConfig, sample_rate: u32) -> Result<(), CliError> {
    config
        .validate(sample_rate)
        .map_err(|e| CliError::Input(format!("invalid analysis config at {sample_rate} Hz: {e}")))
}
