use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use prosodyne::pipeline::filter_manifest;

use crate::config::{resolve_profile, RunConfig};
use crate::output;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// JSONL manifest of utterance metadata.
    pub manifest: PathBuf,
    /// Output directory for accepted.jsonl, decisions.jsonl and summary.json.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

pub fn run(args: &FilterArgs, config: RunConfig) -> Result<(), CliError> {
    let profile = resolve_profile(&config.filter.profile)?;
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Input(format!("cannot read manifest {}: {e}", args.manifest.display())))?;
    let outcome = filter_manifest(text.lines(), &profile);
    log::info!("{} of {} records accepted", outcome.summary.accepted, outcome.summary.total);

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", args.out.display())))?;
    output::write_jsonl(output::create(&args.out.join("accepted.jsonl"))?, &outcome.accepted)?;
    output::write_jsonl(output::create(&args.out.join("decisions.jsonl"))?, &outcome.decisions)?;

    let mut summary = serde_json::to_value(&outcome.summary).map_err(CliError::compute)?;
    if let Value::Object(map) = &mut summary {
        map.insert("config".into(), json!({ "profile": config.filter.profile, "thresholds": profile }));
    }
    output::write_json(output::create(&args.out.join("summary.json"))?, &summary)?;
    output::write_json(output::stdout(), &summary)
}
