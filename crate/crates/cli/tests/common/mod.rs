//! Synthetic audio and corpus fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prosodyne::dsp::wav::write_wav;
use prosodyne::AudioBuffer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prosodyne"))
}

pub fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn samples(secs: f64, sr: u32) -> usize {
    (secs * sr as f64).round() as usize
}

pub fn sine(freq: f64, secs: f64, sr: u32, amp: f64) -> AudioBuffer {
    let data = (0..samples(secs, sr)).map(|n| amp * (TAU * freq * n as f64 / sr as f64).sin()).collect();
    AudioBuffer::new(data, sr).unwrap()
}

/// Sum of `harmonics` partials with 1/k amplitudes and a linear f0 glide.
pub fn voice(f0_start: f64, f0_end: f64, secs: f64, sr: u32, harmonics: usize) -> AudioBuffer {
    let n = samples(secs, sr);
    let mut phase = 0.0;
    let mut data = Vec::with_capacity(n);
    for i in 0..n {
        let f0 = f0_start + (f0_end - f0_start) * i as f64 / n as f64;
        phase += TAU * f0 / sr as f64;
        let s: f64 = (1..=harmonics).map(|k| (k as f64 * phase).sin() / k as f64).sum();
        data.push(0.3 * s);
    }
    AudioBuffer::new(data, sr).unwrap()
}

pub fn noise(secs: f64, sr: u32, amp: f64, seed: u64) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..samples(secs, sr)).map(|_| rng.gen_range(-amp..amp)).collect();
    AudioBuffer::new(data, sr).unwrap()
}

pub fn chirp(f_start: f64, f_end: f64, secs: f64, sr: u32) -> AudioBuffer {
    voice(f_start, f_end, secs, sr, 1)
}

/// Harmonic tone under a raised-cosine envelope, like a run of syllables.
pub fn syllables(freq: f64, rate: f64, secs: f64, sr: u32) -> AudioBuffer {
    let base = voice(freq, freq, secs, sr, 4);
    let data = base
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| s * (0.5 - 0.5 * (TAU * rate * i as f64 / sr as f64).cos()))
        .collect();
    AudioBuffer::new(data, sr).unwrap()
}

pub fn mix(a: &AudioBuffer, b: &AudioBuffer) -> AudioBuffer {
    let data = a.samples().iter().zip(b.samples()).map(|(x, y)| x + y).collect();
    AudioBuffer::new(data, a.sample_rate()).unwrap()
}

pub fn gain(a: &AudioBuffer, g: f64) -> AudioBuffer {
    AudioBuffer::new(a.samples().iter().map(|x| x * g).collect(), a.sample_rate()).unwrap()
}

/// Plays `a` back `factor` times faster by linear interpolation, raising
/// every frequency by `factor` and shortening the clip.
pub fn speed_up(a: &AudioBuffer, factor: f64) -> AudioBuffer {
    let x = a.samples();
    let len = ((x.len() - 1) as f64 / factor).floor() as usize + 1;
    let data = (0..len)
        .map(|n| {
            let pos = n as f64 * factor;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if i + 1 < x.len() {
                x[i] * (1.0 - frac) + x[i + 1] * frac
            } else {
                x[i]
            }
        })
        .collect();
    AudioBuffer::new(data, a.sample_rate()).unwrap()
}

/// Twenty clips covering tones, glides, harmonic voices, noise, silence,
/// envelopes and three sample rates.
pub fn varied_fixtures() -> Vec<(String, AudioBuffer)> {
    vec![
        ("sine110".to_string(), sine(110.0, 1.0, 16_000, 0.5)),
        ("sine220".into(), sine(220.0, 0.8, 16_000, 0.3)),
        ("sine440".into(), sine(440.0, 1.2, 16_000, 0.7)),
        ("sine1k".into(), sine(1000.0, 0.5, 16_000, 0.4)),
        ("voice_low".into(), voice(90.0, 120.0, 1.0, 16_000, 8)),
        ("voice_mid".into(), voice(150.0, 210.0, 1.5, 16_000, 6)),
        ("voice_high".into(), voice(260.0, 230.0, 0.9, 16_000, 5)),
        ("chirp_up".into(), chirp(80.0, 480.0, 1.0, 16_000)),
        ("chirp_down".into(), chirp(450.0, 100.0, 0.7, 16_000)),
        ("noise".into(), noise(1.0, 16_000, 0.3, 7)),
        ("quiet_noise".into(), noise(0.6, 16_000, 0.01, 8)),
        ("silence".into(), AudioBuffer::silence(12_000, 16_000).unwrap()),
        ("syllables".into(), syllables(140.0, 4.0, 1.2, 16_000)),
        ("noisy_voice".into(), mix(&voice(180.0, 180.0, 1.0, 16_000, 6), &noise(1.0, 16_000, 0.05, 9))),
        ("short".into(), voice(200.0, 200.0, 0.3, 16_000, 4)),
        ("sr22k_voice".into(), voice(120.0, 160.0, 1.0, 22_050, 8)),
        ("sr22k_noise".into(), noise(0.8, 22_050, 0.2, 10)),
        ("sr24k_sine".into(), sine(330.0, 1.0, 24_000, 0.5)),
        ("sr24k_syllables".into(), syllables(220.0, 3.0, 1.0, 24_000)),
        ("loud_voice".into(), voice(100.0, 100.0, 1.0, 16_000, 3)),
    ]
}

/// Writes a 20-utterance corpus: references in `refs/`, predictions in
/// `preds/`, and `manifest.jsonl`. Returns the manifest path.
pub fn write_corpus(root: &Path) -> PathBuf {
    let refs = root.join("refs");
    let preds = root.join("preds");
    std::fs::create_dir_all(&refs).unwrap();
    std::fs::create_dir_all(&preds).unwrap();
    let words = ["the", "cat", "sat", "on", "a", "mat", "by", "door"];
    let mut manifest = String::new();
    for (i, (name, audio)) in varied_fixtures().into_iter().enumerate() {
        let id = format!("utt{i:02}_{name}");
        let pred = match i % 5 {
            0 => audio.clone(),
            1 => gain(&audio, 0.5),
            2 => speed_up(&audio, 1.1),
            3 => mix(&audio, &noise(audio.duration_secs(), audio.sample_rate(), 0.02, i as u64)),
            _ => AudioBuffer::silence(audio.len() / 2, audio.sample_rate()).unwrap(),
        };
        write_wav(refs.join(format!("{id}.wav")), &audio).unwrap();
        write_wav(preds.join(format!("{id}.wav")), &pred).unwrap();
        let transcript: Vec<&str> = (0..3 + i % 4).map(|k| words[(i + k) % words.len()]).collect();
        let mut hypothesis = transcript.clone();
        if i % 3 == 1 {
            hypothesis[0] = "bat";
        }
        if i % 4 == 2 {
            hypothesis.pop();
        }
        let mut entry = serde_json::json!({ "id": id, "transcript": transcript.join(" ") });
        if i % 6 != 5 {
            entry["hypothesis"] = hypothesis.join(" ").into();
        }
        if i % 2 == 0 {
            entry["lse_c"] = (6.0 + i as f64 / 10.0).into();
            entry["lse_d"] = (8.0 - i as f64 / 10.0).into();
        }
        manifest.push_str(&entry.to_string());
        manifest.push('\n');
    }
    let path = root.join("manifest.jsonl");
    std::fs::write(&path, manifest).unwrap();
    path
}
