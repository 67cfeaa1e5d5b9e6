//! Report serialization.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use prosodyne::MetricReport;

use crate::config::Format;
use crate::CliError;

pub const REPORT_COLUMNS: [&str; 12] = [
    "id",
    "mcd",
    "ffe",
    "gpe",
    "vde",
    "wer",
    "word_edits",
    "reference_words",
    "lse_c",
    "lse_d",
    "pitch_frames",
    "mfcc_frames",
];

fn cell<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn report_row(r: &MetricReport) -> [String; 12] {
    [
        r.id.clone(),
        r.mcd.to_string(),
        r.ffe.to_string(),
        cell(r.gpe),
        r.vde.to_string(),
        cell(r.wer),
        cell(r.word_edits),
        cell(r.reference_words),
        cell(r.lse_c),
        cell(r.lse_d),
        r.pitch_frames.to_string(),
        r.mfcc_frames.to_string(),
    ]
}

/// Writes reports as CSV; undefined metrics become empty cells.
pub fn write_reports_csv<W: Write>(out: W, reports: &[MetricReport]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(REPORT_COLUMNS).map_err(CliError::input)?;
    for r in reports {
        writer.write_record(report_row(r)).map_err(CliError::input)?;
    }
    writer.flush().map_err(CliError::input)
}

pub fn write_jsonl<W: Write, T: Serialize>(mut out: W, items: &[T]) -> Result<(), CliError> {
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(CliError::compute)?;
        out.write_all(b"\n").map_err(CliError::input)?;
    }
    out.flush().map_err(CliError::input)
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(CliError::compute)?;
    out.write_all(b"\n").map_err(CliError::input)?;
    out.flush().map_err(CliError::input)
}

/// Reports in the requested format. `config` is echoed only by the JSON
/// format, which wraps the reports in a document.
pub fn write_reports<W: Write>(
    out: W,
    format: Format,
    reports: &[MetricReport],
    config: &Value,
) -> Result<(), CliError> {
    match format {
        Format::Jsonl => write_jsonl(out, reports),
        Format::Csv => write_reports_csv(out, reports),
        Format::Json => write_json(out, &serde_json::json!({ "config": config, "reports": reports })),
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))
}

pub fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

pub fn report_extension(format: Format) -> &'static str {
    match format {
        Format::Json => "json",
        Format::Jsonl => "jsonl",
        Format::Csv => "csv",
    }
}
