//! Minimal RIFF/WAVE reader and writer for 16-bit mono PCM.

use super::AudioTrack;
use crate::{Error, Result};

const PCM: u16 = 1;

fn truncated(what: &str) -> Error {
    Error::Parse {
        line: 0,
        message: format!("truncated WAV: {what}"),
    }
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Decodes a 16-bit mono PCM WAV file. Each sample is `raw / 32768`.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioTrack> {
    if bytes.len() < 12 {
        return Err(truncated("missing RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::UnsupportedFormat("not a RIFF/WAVE container".into()));
    }

    let mut pos = 12;
    let mut format: Option<(u32, u16)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if len < 16 || body + 16 > bytes.len() {
                    return Err(truncated("fmt chunk"));
                }
                let tag = u16_at(bytes, body);
                let channels = u16_at(bytes, body + 2);
                let rate = u32_at(bytes, body + 4);
                let bits = u16_at(bytes, body + 14);
                if tag != PCM {
                    return Err(Error::UnsupportedFormat(format!(
                        "format tag {tag:#06x} (only PCM is supported)"
                    )));
                }
                if bits != 16 {
                    return Err(Error::UnsupportedFormat(format!("{bits}-bit samples")));
                }
                if channels != 1 {
                    return Err(Error::UnsupportedFormat(format!("{channels} channels")));
                }
                format = Some((rate, channels));
            }
            b"data" => {
                let (rate, _) = format.ok_or_else(|| {
                    Error::UnsupportedFormat("data chunk before fmt chunk".into())
                })?;
                if body + len > bytes.len() {
                    return Err(truncated("data chunk shorter than declared"));
                }
                if !len.is_multiple_of(2) {
                    return Err(truncated("odd byte count in 16-bit data chunk"));
                }
                let samples = bytes[body..body + len]
                    .chunks_exact(2)
                    .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32 / 32768.0)
                    .collect();
                return AudioTrack::new(rate, samples);
            }
            _ => {}
        }
        // Chunks are word aligned.
        pos = body + len + (len & 1);
    }
    Err(truncated("no data chunk"))
}

/// Encodes a track as 16-bit mono PCM. Samples are rounded to the nearest
/// `i16` step and saturated.
pub fn encode_wav(track: &AudioTrack) -> Vec<u8> {
    let data_len = track.samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&track.sample_rate.to_le_bytes());
    out.extend_from_slice(&(track.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &track.samples {
        let v = (s as f64 * 32768.0)
            .round()
            .clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}
