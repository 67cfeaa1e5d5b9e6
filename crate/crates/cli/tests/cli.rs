mod common;

use std::path::Path;
use std::process::Output;

use prosodyne::dsp::wav::write_wav;
use prosodyne::dsp::{yin_pitch, YinConfig};
use prosodyne::AudioBuffer;
use serde_json::Value;

use common::*;

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn assert_json_error(out: &Output, code: i32) -> Value {
    assert_eq!(out.status.code(), Some(code), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<_> = stderr.lines().collect();
    assert_eq!(lines.len(), 1, "{stderr}");
    let v: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(v["error"]["exit_code"], code);
    v
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, audio: &AudioBuffer) -> std::path::PathBuf {
    let path = dir.join(name);
    write_wav(&path, audio).unwrap();
    path
}

#[test]
fn compare_with_itself_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.wav", &voice(150.0, 180.0, 1.0, 16_000, 6));
    let out = run_bin(&["--format", "json", "compare", p(&x), p(&x), "--ref-text", "a b", "--hyp-text", "A, b!"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let r = &v["report"];
    assert_eq!(r["mcd"], 0.0);
    assert_eq!(r["ffe"], 0.0);
    assert_eq!(r["vde"], 0.0);
    assert_eq!(r["gpe"], 0.0);
    assert_eq!(r["wer"], 0.0);
    assert_eq!(v["config"]["eval"]["mcd"]["k"], 13);
}

#[test]
fn compare_against_silence_gives_reference_voiced_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let audio = syllables(160.0, 3.0, 1.0, 16_000);
    let x = write(dir.path(), "x.wav", &audio);
    let s = write(dir.path(), "s.wav", &AudioBuffer::silence(16_000, 16_000).unwrap());
    let out = run_bin(&["compare", p(&x), p(&s)]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reread = prosodyne::dsp::wav::read_wav(&x).unwrap();
    let voiced = yin_pitch(&reread, &YinConfig::default()).unwrap().voiced_fraction();
    assert!(voiced > 0.2 && voiced < 1.0);
    assert!((v["vde"].as_f64().unwrap() - voiced).abs() < 1e-12);
    assert!(v["gpe"].is_null());
    assert!(v.get("wer").is_none());
}

#[test]
fn compare_csv_leaves_undefined_cells_empty() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.wav", &voice(150.0, 150.0, 0.5, 16_000, 4));
    let s = write(dir.path(), "s.wav", &AudioBuffer::silence(8_000, 16_000).unwrap());
    let out = run_bin(&["--format", "csv", "compare", p(&x), p(&s)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "", "gpe");
    assert_eq!(row[5], "", "wer");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.wav", &voice(150.0, 150.0, 0.5, 16_000, 4));
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "format = \"json\"\n[eval.yin]\nf_max = 400.0\nthreshold = 0.2\n").unwrap();
    let out = run_bin(&["--config", p(&config), "compare", p(&x), p(&x), "--yin-threshold", "0.15"]);
    assert!(out.status.success());
    let yin = &stdout_json(&out)["config"]["eval"]["yin"];
    assert_eq!(yin["f_max"], 400.0);
    assert_eq!(yin["threshold"], 0.15);
    assert_eq!(yin["f_min"], 60.0);
}

#[test]
fn unreadable_wav_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.wav");
    std::fs::write(&bad, b"not a wav").unwrap();
    let out = run_bin(&["compare", p(&bad), p(&bad)]);
    let v = assert_json_error(&out, 2);
    assert_eq!(v["error"]["kind"], "input");
}

#[test]
fn invalid_override_is_rejected_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.wav", &voice(150.0, 150.0, 0.5, 16_000, 4));
    let out = run_bin(&["compare", p(&x), p(&x), "--f-max", "9000"]);
    assert_json_error(&out, 2);
    let out = run_bin(&["compare", p(&x), p(&x), "--mcd-k", "20"]);
    assert_json_error(&out, 2);
}

#[test]
fn usage_errors_are_json() {
    assert_json_error(&run_bin(&["frobnicate"]), 2);
    assert_json_error(&run_bin(&["compare"]), 2);
    assert!(run_bin(&["--help"]).status.success());
}

fn small_corpus(dir: &Path, n: usize) -> std::path::PathBuf {
    let mut manifest = String::new();
    for i in 0..n {
        let audio = voice(120.0 + 30.0 * i as f64, 140.0, 0.8, 16_000, 5);
        write(dir, &format!("u{i}.wav"), &audio);
        manifest.push_str(&format!(
            "{{\"id\":\"u{i}\",\"transcript\":\"one two three\",\"hypothesis\":\"one two three\"}}\n"
        ));
    }
    let path = dir.join("manifest.jsonl");
    std::fs::write(&path, manifest).unwrap();
    path
}

#[test]
fn corpus_of_identical_predictions_has_zero_means() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path(), 3);
    let out_dir = dir.path().join("out");
    let out = run_bin(&["eval-corpus", p(&manifest), "--pred-dir", p(dir.path()), "--out", p(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["utterances"], 3);
    assert_eq!(summary["failed"], 0);
    for metric in ["mcd", "ffe", "gpe", "vde", "wer", "wer_corpus"] {
        assert_eq!(summary[metric]["mean"], 0.0, "{metric}");
        assert_eq!(summary[metric]["count"], 3, "{metric}");
    }
    assert!(summary["config"].get("workers").is_none());
    assert_eq!(stdout_json(&out), summary);
}

#[test]
fn corrupt_wav_is_logged_and_the_run_continues() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path(), 3);
    let preds = dir.path().join("preds");
    std::fs::create_dir(&preds).unwrap();
    for i in 0..3 {
        std::fs::copy(dir.path().join(format!("u{i}.wav")), preds.join(format!("u{i}.wav"))).unwrap();
    }
    std::fs::write(preds.join("u1.wav"), b"RIFF garbage").unwrap();
    let out_dir = dir.path().join("out");
    let out = run_bin(&["eval-corpus", p(&manifest), "--pred-dir", p(&preds), "--out", p(&out_dir)]);
    assert!(out.status.success());
    let reports = std::fs::read_to_string(out_dir.join("reports.jsonl")).unwrap();
    assert_eq!(reports.lines().count(), 2);
    let failures = std::fs::read_to_string(out_dir.join("failures.jsonl")).unwrap();
    let failure: Value = serde_json::from_str(failures.trim()).unwrap();
    assert_eq!(failure["id"], "u1");
    assert_eq!(failure["line"], 2);
}

#[test]
fn corpus_fails_only_when_every_utterance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path(), 2);
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let out = run_bin(&["eval-corpus", p(&manifest), "--pred-dir", p(&empty), "--out", p(&dir.path().join("o"))]);
    assert_json_error(&out, 3);
    let failures = std::fs::read_to_string(dir.path().join("o/failures.jsonl")).unwrap();
    assert_eq!(failures.lines().count(), 2);
}

#[test]
fn corpus_csv_and_passthrough_fields() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(dir.path());
    let out_dir = dir.path().join("out");
    let out = run_bin(&[
        "--format",
        "csv",
        "--workers",
        "3",
        "eval-corpus",
        p(&manifest),
        "--ref-dir",
        p(&dir.path().join("refs")),
        "--pred-dir",
        p(&dir.path().join("preds")),
        "--out",
        p(&out_dir),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(out_dir.join("reports.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("id,mcd,ffe,gpe,vde,wer"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "utt00_sine110");
    assert_eq!(first[8], "6");
    let sixth: Vec<&str> = text.lines().nth(6).unwrap().split(',').collect();
    assert_eq!(sixth[0], "utt05_voice_mid");
    assert_eq!(sixth[5], "", "no hypothesis means no wer");
}

fn manifest_line(id: &str, duration: f64, yaw: f64) -> String {
    serde_json::json!({
        "id": id, "duration": duration, "transcript": "one two three four",
        "language_confidence_en": 0.9, "max_abs_yaw": yaw, "max_abs_pitch": 2.0,
        "min_eye_distance": 90.0, "blur_score": 0.1, "av_sync_confidence": 0.8,
        "lip_motion_score": 0.7, "camera": "front"
    })
    .to_string()
}

fn write_manifest(dir: &Path) -> std::path::PathBuf {
    let lines = [
        manifest_line("a", 2.0, 3.0),
        manifest_line("b", 0.5, 3.0),
        manifest_line("c", 3.0, 20.0),
        "{broken".to_string(),
        manifest_line("d", 4.0, 1.0),
    ];
    let path = dir.join("manifest.jsonl");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    path
}

#[test]
fn filter_writes_accepted_decisions_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(dir.path());
    let out_dir = dir.path().join("out");
    let out = run_bin(&["filter", p(&manifest), "--out", p(&out_dir)]);
    assert!(out.status.success());
    let summary = stdout_json(&out);
    assert_eq!(summary["total"], 5);
    assert_eq!(summary["accepted"], 2);
    assert_eq!(summary["per_rule_failures"]["duration"], 1);
    assert_eq!(summary["per_rule_failures"]["face_angle"], 1);
    assert_eq!(summary["per_rule_failures"]["malformed"], 1);
    assert_eq!(summary["config"]["profile"], "lsvsr");
    let accepted = std::fs::read_to_string(out_dir.join("accepted.jsonl")).unwrap();
    let first: Value = serde_json::from_str(accepted.lines().next().unwrap()).unwrap();
    assert_eq!(first["camera"], "front");
    let decisions = std::fs::read_to_string(out_dir.join("decisions.jsonl")).unwrap();
    assert_eq!(decisions.lines().count(), 5);

    let out = run_bin(&["--profile", "voxceleb2", "filter", p(&manifest), "--out", p(&out_dir)]);
    assert_eq!(stdout_json(&out)["accepted"], 3);
}

#[test]
fn grid_profile_accepts_all_well_formed_records() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(dir.path());
    let out_dir = dir.path().join("out");
    let out = run_bin(&["--profile", "grid", "filter", p(&manifest), "--out", p(&out_dir)]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["accepted"], 4);
    let accepted = std::fs::read_to_string(out_dir.join("accepted.jsonl")).unwrap();
    let ids: Vec<String> = accepted
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids, ["a", "b", "c", "d"]);
}

#[test]
fn unknown_profile_exits_2_listing_names() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(dir.path());
    let out = run_bin(&["--profile", "lrs3", "filter", p(&manifest), "--out", p(&dir.path().join("o"))]);
    let v = assert_json_error(&out, 2);
    let msg = v["error"]["message"].as_str().unwrap();
    assert!(msg.contains("lsvsr") && msg.contains("voxceleb2") && msg.contains("grid"));
}

#[test]
fn attn_check_full_dims_shape_only() {
    let out = run_bin(&["attn-check", "--dims", "full", "--shape-only"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["shape"]["context_dim"], 128);
    assert_eq!(v["shape"]["fused_dim"], 2048);
    assert!(v.get("gradient").is_none());
}

#[test]
fn attn_check_small_run_passes() {
    let out = run_bin(&["--seed", "5", "attn-check", "--instances", "3", "--trials", "5", "--steps", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert!(v["gradient"]["max_rel_error"].as_f64().unwrap() < 1e-4);
    assert_eq!(v["monotonicity"]["mean_violations"], 0);
    assert_eq!(v["passed"], true);
}
