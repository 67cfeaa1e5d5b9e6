//! Mono 16-bit PCM WAV input and output.

use std::io::{Read, Seek};
use std::path::Path;

use thiserror::Error;

use super::AudioBuffer;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("cannot read WAV: {0}")]
    Format(#[from] hound::Error),
    #[error("expected mono audio, found {0} channels")]
    Channels(u16),
    #[error("expected 16-bit integer PCM, found {bits}-bit {format}")]
    Encoding { format: &'static str, bits: u16 },
    #[error("WAV contains no samples")]
    Empty,
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, WavError> {
    decode(hound::WavReader::open(path)?)
}

pub fn read_wav_from<R: Read>(reader: R) -> Result<AudioBuffer, WavError> {
    decode(hound::WavReader::new(reader)?)
}

fn decode<R: Read>(reader: hound::WavReader<R>) -> Result<AudioBuffer, WavError> {
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(WavError::Channels(spec.channels));
    }
    match spec.sample_format {
        hound::SampleFormat::Int if spec.bits_per_sample == 16 => {}
        hound::SampleFormat::Int => return Err(WavError::Encoding { format: "integer", bits: spec.bits_per_sample }),
        hound::SampleFormat::Float => return Err(WavError::Encoding { format: "float", bits: spec.bits_per_sample }),
    }
    let samples = reader.into_samples::<i16>().map(|s| s.map(|v| v as f64 / 32768.0)).collect::<Result<Vec<_>, _>>()?;
    if samples.is_empty() {
        return Err(WavError::Empty);
    }
    AudioBuffer::new(samples, spec.sample_rate).map_err(|_| WavError::Empty)
}

/// Writes `audio` as mono 16-bit PCM, clipping to `[-1, 1]`.
pub fn write_wav(path: impl AsRef<Path>, audio: &AudioBuffer) -> Result<(), WavError> {
    let file = std::fs::File::create(path).map_err(hound::Error::IoError)?;
    write_wav_to(std::io::BufWriter::new(file), audio)
}

pub fn write_wav_to<W: std::io::Write + Seek>(writer: W, audio: &AudioBuffer) -> Result<(), WavError> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::new(writer, spec)?;
    for &s in audio.samples() {
        w.write_sample((s * 32768.0).round().clamp(-32768.0, 32767.0) as i16)?;
    }
    w.finalize()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn encode(spec: hound::WavSpec, write: impl FnOnce(&mut hound::WavWriter<&mut Cursor<Vec<u8>>>)) -> Vec<u8> {
        let mut cursor = Cursor::new(Vec::new());
        {
            let mut w = hound::WavWriter::new(&mut cursor, spec).unwrap();
            write(&mut w);
            w.finalize().unwrap();
        }
        cursor.into_inner()
    }

    #[test]
    fn roundtrip_is_quantized_to_16_bits() {
        let audio = AudioBuffer::new(vec![0.0, 0.5, -0.5, 0.999], 16_000).unwrap();
        let mut cursor = Cursor::new(Vec::new());
        write_wav_to(&mut cursor, &audio).unwrap();
        let back = read_wav_from(Cursor::new(cursor.into_inner())).unwrap();
        assert_eq!(back.sample_rate(), 16_000);
        for (a, b) in audio.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() < 1.0 / 32768.0 + 1e-12);
        }
    }

    #[test]
    fn stereo_is_rejected() {
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 16_000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let bytes = encode(spec, |w| {
            w.write_sample(0i16).unwrap();
            w.write_sample(0i16).unwrap();
        });
        assert!(matches!(read_wav_from(Cursor::new(bytes)), Err(WavError::Channels(2))));
    }

    #[test]
    fn float_is_rejected() {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 16_000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let bytes = encode(spec, |w| w.write_sample(0.25f32).unwrap());
        assert!(matches!(read_wav_from(Cursor::new(bytes)), Err(WavError::Encoding { bits: 32, .. })));
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(matches!(read_wav_from(Cursor::new(b"not a wav file".to_vec())), Err(WavError::Format(_))));
    }
}
