use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use prosodyne::metrics::evaluate_pair;

use super::{check_eval_config, classify, load_wav};
use crate::config::{EvalFlags, Format, RunConfig};
use crate::output;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Reference WAV.
    pub reference: PathBuf,
    /// Synthesized WAV.
    pub predicted: PathBuf,
    /// Reference transcript.
    #[arg(long, value_name = "TEXT", default_value = "")]
    pub ref_text: String,
    /// ASR transcript of the prediction; WER is reported only when given.
    #[arg(long, value_name = "TEXT")]
    pub hyp_text: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub eval: EvalFlags,
}

pub fn run(args: &CompareArgs, mut config: RunConfig) -> Result<(), CliError> {
    args.eval.apply(&mut config.eval);
    let reference = load_wav(&args.reference)?;
    let predicted = load_wav(&args.predicted)?;
    check_eval_config(&config.eval, reference.sample_rate())?;

    let id = args.predicted.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let report = evaluate_pair(&id, &reference, &predicted, &args.ref_text, args.hyp_text.as_deref(), &config.eval)
        .map_err(classify)?;
    log::info!("compared {} against {}", args.predicted.display(), args.reference.display());

    let echo = serde_json::json!({ "eval": config.eval });
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(output::create(path)?),
        None => Box::new(output::stdout()),
    };
    match config.format {
        Format::Json => output::write_json(out, &serde_json::json!({ "config": echo, "report": report })),
        format => output::write_reports(out, format, std::slice::from_ref(&report), &echo),
    }
}
