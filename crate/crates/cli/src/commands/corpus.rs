use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use prosodyne::metrics::{aggregate_reports, evaluate_pair, EvalConfig};
use prosodyne::MetricReport;

use super::{check_eval_config, classify, load_wav};
use crate::config::{EvalFlags, RunConfig};
use crate::output;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct EvalCorpusArgs {
    /// JSONL manifest, one utterance per line.
    pub manifest: PathBuf,
    /// Directory holding `<id>.wav` predictions.
    #[arg(long, value_name = "DIR")]
    pub pred_dir: PathBuf,
    /// Directory holding `<id>.wav` references (defaults to the manifest's directory).
    #[arg(long, value_name = "DIR")]
    pub ref_dir: Option<PathBuf>,
    /// Output directory for reports, summary and failures.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub eval: EvalFlags,
}

/// One manifest line. Other fields (for example filter metadata) are ignored.
#[derive(Debug, Clone, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    #[serde(default)]
    pub transcript: String,
    /// ASR transcript of the prediction.
    #[serde(default)]
    pub hypothesis: Option<String>,
    /// Reference WAV, relative to the manifest's directory.
    #[serde(default)]
    pub reference: Option<PathBuf>,
    #[serde(default)]
    pub lse_c: Option<f64>,
    #[serde(default)]
    pub lse_d: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub line: usize,
    pub id: String,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn new(line: usize, id: String, error: &CliError) -> Self {
        Self { line, id, kind: error.kind(), message: error.message().to_string() }
    }
}

struct Job {
    line: usize,
    entry: CorpusEntry,
    reference: PathBuf,
    predicted: PathBuf,
}

pub fn run(args: &EvalCorpusArgs, mut config: RunConfig) -> Result<(), CliError> {
    args.eval.apply(&mut config.eval);
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Input(format!("cannot read manifest {}: {e}", args.manifest.display())))?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let ref_dir = args.ref_dir.as_deref().unwrap_or(base);

    let mut jobs = Vec::new();
    let mut failures = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CorpusEntry>(line) {
            Ok(entry) => {
                let reference = match &entry.reference {
                    Some(p) => base.join(p),
                    None => ref_dir.join(format!("{}.wav", entry.id)),
                };
                let predicted = args.pred_dir.join(format!("{}.wav", entry.id));
                jobs.push(Job { line: index + 1, entry, reference, predicted });
            }
            Err(e) => failures.push(Failure::new(index + 1, format!("line:{}", index + 1), &CliError::input(e))),
        }
    }
    if jobs.is_empty() && failures.is_empty() {
        return Err(CliError::Input(format!("manifest {} has no utterances", args.manifest.display())));
    }
    validate_sample_rates(&jobs, &config.eval)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Compute(format!("cannot start worker pool: {e}")))?;
    log::info!("evaluating {} utterances on {} workers", jobs.len(), config.workers);
    let results: Vec<Result<MetricReport, CliError>> =
        pool.install(|| jobs.par_iter().map(|job| evaluate_job(job, &config.eval)).collect());

    let mut reports = Vec::with_capacity(results.len());
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(report) => reports.push(report),
            Err(e) => {
                log::warn!("{}: {}", job.entry.id, e);
                failures.push(Failure::new(job.line, job.entry.id.clone(), &e));
            }
        }
    }
    failures.sort_by_key(|f| f.line);

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", args.out.display())))?;
    let echo = json!({ "eval": config.eval });
    let reports_path = args.out.join(format!("reports.{}", output::report_extension(config.format)));
    output::write_reports(output::create(&reports_path)?, config.format, &reports, &echo)?;
    output::write_jsonl(output::create(&args.out.join("failures.jsonl"))?, &failures)?;

    let mut summary = match aggregate_reports(&reports) {
        Ok(s) => serde_json::to_value(s).map_err(CliError::compute)?,
        Err(_) => json!({ "utterances": 0 }),
    };
    if let Value::Object(map) = &mut summary {
        map.insert("failed".into(), json!(failures.len()));
        map.insert("config".into(), echo);
    }
    output::write_json(output::create(&args.out.join("summary.json"))?, &summary)?;
    output::write_json(output::stdout(), &summary)?;

    if reports.is_empty() {
        return Err(CliError::Compute(format!("all {} utterances failed", failures.len())));
    }
    Ok(())
}

/// Rejects analysis settings that cannot work at any sample rate found in the
/// corpus before evaluating anything. Unreadable headers are left for the
/// per-utterance pass to report.
fn validate_sample_rates(jobs: &[Job], eval: &EvalConfig) -> Result<(), CliError> {
    let rates: BTreeSet<u32> =
        jobs.iter().filter_map(|j| hound::WavReader::open(&j.reference).ok().map(|r| r.spec().sample_rate)).collect();
    rates.into_iter().try_for_each(|sr| check_eval_config(eval, sr))
}

fn evaluate_job(job: &Job, eval: &EvalConfig) -> Result<MetricReport, CliError> {
    let reference = load_wav(&job.reference)?;
    let predicted = load_wav(&job.predicted)?;
    let mut report = evaluate_pair(
        &job.entry.id,
        &reference,
        &predicted,
        &job.entry.transcript,
        job.entry.hypothesis.as_deref(),
        eval,
    )
    .map_err(classify)?;
    report.lse_c = job.entry.lse_c;
    report.lse_d = job.entry.lse_d;
    Ok(report)
}
