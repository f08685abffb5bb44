//! Speech figures over fixed analysis windows: word density from an
//! energy-based voicing detector, speaking speed from a word timeline, and
//! intonation from the mean short-time RMS of each voiced utterance. The
//! three figures vote on a binary speech score per window.

use serde::{Deserialize, Serialize};

use crate::observation::{AudioTrack, WordTimeline};
use crate::{Error, Result};

/// Mean RMS strictly above this marks an utterance as a question.
pub const QUESTION_RMS: f64 = 0.01;

/// Inclusive in-band ranges for the three speech figures.
pub const DENSITY_BAND_PCT: (f64, f64) = (35.0, 55.0);
pub const SPEED_BAND_WPM: (f64, f64) = (150.0, 250.0);
pub const QUESTION_BAND_PCT: (f64, f64) = (40.0, 60.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VoicingConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub silence_rms: f64,
    pub min_gap_ms: f64,
    pub min_voiced_ms: f64,
}

impl Default for VoicingConfig {
    fn default() -> Self {
        VoicingConfig {
            frame_ms: 25.0,
            hop_ms: 10.0,
            silence_rms: 0.005,
            min_gap_ms: 200.0,
            min_voiced_ms: 100.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AudioConfig {
    #[serde(flatten)]
    pub voicing: VoicingConfig,
    pub window_ms: u64,
    /// A trailing partial window shorter than this reuses the previous
    /// window's verdict.
    pub min_final_window_ms: u64,
}

impl Default for AudioConfig {
    fn default() -> Self {
        AudioConfig {
            voicing: VoicingConfig::default(),
            window_ms: 180_000,
            min_final_window_ms: 30_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoicedInterval {
    pub start_ms: f64,
    pub end_ms: f64,
}

impl VoicedInterval {
    pub fn len_ms(&self) -> f64 {
        self.end_ms - self.start_ms
    }

    fn clip(&self, start_ms: f64, end_ms: f64) -> Option<VoicedInterval> {
        let s = self.start_ms.max(start_ms);
        let e = self.end_ms.min(end_ms);
        (e > s).then_some(VoicedInterval {
            start_ms: s,
            end_ms: e,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tone {
    Question,
    Statement,
}

/// One short-time analysis frame: `[start, end)` in samples.
#[derive(Clone, Copy, Debug, PartialEq)]
struct RmsFrame {
    start: usize,
    end: usize,
    rms: f64,
}

fn samples_for(ms: f64, rate: u32) -> usize {
    ((ms * rate as f64 / 1000.0).round() as usize).max(1)
}

fn rms(samples: &[f32]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let sum: f64 = samples.iter().map(|&s| (s as f64) * (s as f64)).sum();
    (sum / samples.len() as f64).sqrt()
}

/// Short-time RMS over `samples[from..to]`. Frames start every hop and the
/// last frames are truncated at `to`.
fn frame_rms(track: &AudioTrack, from: usize, to: usize, cfg: &VoicingConfig) -> Vec<RmsFrame> {
    let len = samples_for(cfg.frame_ms, track.sample_rate);
    let hop = samples_for(cfg.hop_ms, track.sample_rate);
    (from..to)
        .step_by(hop)
        .map(|start| {
            let end = (start + len).min(to);
            RmsFrame {
                start,
                end,
                rms: rms(&track.samples[start..end]),
            }
        })
        .collect()
}

/// Segments the track into voiced intervals by short-time energy.
///
/// A run of voiced frames spans from the center of its first frame to the
/// center of its last, except that runs touching either end of the track
/// extend to that end. Gaps shorter than `min_gap_ms` are bridged, then
/// intervals shorter than `min_voiced_ms` are dropped.
pub fn detect_voiced_intervals(track: &AudioTrack, cfg: &VoicingConfig) -> Vec<VoicedInterval> {
    let frames = frame_rms(track, 0, track.samples.len(), cfg);
    let to_ms = |sample: f64| sample * 1000.0 / track.sample_rate as f64;
    let total_ms = track.duration_ms();
    let center = |f: &RmsFrame| to_ms((f.start + f.end) as f64 / 2.0);

    let mut raw: Vec<VoicedInterval> = Vec::new();
    let mut i = 0;
    while i < frames.len() {
        if frames[i].rms < cfg.silence_rms {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < frames.len() && frames[i + 1].rms >= cfg.silence_rms {
            i += 1;
        }
        let last = i;
        i += 1;

        let mut start = if first == 0 {
            0.0
        } else {
            center(&frames[first])
        };
        let mut end = if last + 1 == frames.len() {
            total_ms
        } else {
            center(&frames[last])
        };
        if end - start < cfg.hop_ms {
            let mid = (start + end) / 2.0;
            start = (mid - cfg.hop_ms / 2.0).max(0.0);
            end = (mid + cfg.hop_ms / 2.0).min(total_ms);
        }
        raw.push(VoicedInterval {
            start_ms: start,
            end_ms: end,
        });
    }

    let mut merged: Vec<VoicedInterval> = Vec::with_capacity(raw.len());
    for iv in raw {
        match merged.last_mut() {
            Some(prev) if iv.start_ms - prev.end_ms < cfg.min_gap_ms => {
                prev.end_ms = prev.end_ms.max(iv.end_ms)
            }
            _ => merged.push(iv),
        }
    }
    merged.retain(|iv| iv.len_ms() >= cfg.min_voiced_ms);
    merged
}

/// Percentage of the window `[start, end)` covered by voiced intervals.
pub fn word_density(intervals: &[VoicedInterval], window_start_ms: f64, window_end_ms: f64) -> f64 {
    let span = window_end_ms - window_start_ms;
    if span <= 0.0 {
        return 0.0;
    }
    let voiced: f64 = intervals
        .iter()
        .filter_map(|iv| iv.clip(window_start_ms, window_end_ms))
        .map(|iv| iv.len_ms())
        .sum();
    (100.0 * voiced / span).clamp(0.0, 100.0)
}

/// Words per minute with onset in `[start, end)`; `None` without a timeline.
pub fn speaking_speed(
    words: Option<&WordTimeline>,
    window_start_ms: f64,
    window_end_ms: f64,
) -> Option<f64> {
    let words = words?;
    let minutes = (window_end_ms - window_start_ms) / 60_000.0;
    if minutes <= 0.0 {
        return None;
    }
    Some(words.count_in(window_start_ms, window_end_ms) as f64 / minutes)
}

/// Classifies one utterance by the mean of its per-frame RMS values.
pub fn classify_utterance_tone(
    track: &AudioTrack,
    interval: &VoicedInterval,
    cfg: &VoicingConfig,
) -> Result<Tone> {
    let total = track.duration_ms();
    // Allow half a sample of slack for intervals computed in milliseconds.
    let slack = 500.0 / track.sample_rate as f64;
    if !(interval.start_ms >= 0.0
        && interval.end_ms > interval.start_ms
        && interval.end_ms <= total + slack)
    {
        return Err(Error::Range(format!(
            "interval [{}, {}) ms outside track of {total} ms",
            interval.start_ms, interval.end_ms
        )));
    }
    let from = track.sample_at(interval.start_ms);
    let to = track.sample_at(interval.end_ms).max(from);
    let frames = frame_rms(track, from, to, cfg);
    let mean = if frames.is_empty() {
        0.0
    } else {
        frames.iter().map(|f| f.rms).sum::<f64>() / frames.len() as f64
    };
    Ok(if mean > QUESTION_RMS {
        Tone::Question
    } else {
        Tone::Statement
    })
}

/// Share of questions among classified utterances.
pub fn intonation_percent(tones: &[Tone]) -> Option<f64> {
    if tones.is_empty() {
        return None;
    }
    let questions = tones.iter().filter(|&&t| t == Tone::Question).count();
    Some(100.0 * questions as f64 / tones.len() as f64)
}

fn in_band(value: Option<f64>, (lo, hi): (f64, f64)) -> bool {
    value.is_some_and(|v| (lo..=hi).contains(&v))
}

/// The three in-band flags and their majority.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeechVote {
    pub density_ok: bool,
    pub speed_ok: bool,
    pub tone_ok: bool,
}

impl SpeechVote {
    pub fn score(&self) -> u8 {
        let votes = [self.density_ok, self.speed_ok, self.tone_ok]
            .iter()
            .filter(|&&ok| ok)
            .count();
        u8::from(votes >= 2)
    }
}

/// Votes on the three figures of one window. Undefined figures vote low.
pub fn speech_window_score(
    density_pct: Option<f64>,
    speed_wpm: Option<f64>,
    question_pct: Option<f64>,
) -> SpeechVote {
    SpeechVote {
        density_ok: in_band(density_pct, DENSITY_BAND_PCT),
        speed_ok: in_band(speed_wpm, SPEED_BAND_WPM),
        tone_ok: in_band(question_pct, QUESTION_BAND_PCT),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeechWindowMetrics {
    pub window_start_ms: u64,
    pub window_end_ms: u64,
    pub word_density_pct: Option<f64>,
    pub speaking_speed_wpm: Option<f64>,
    pub question_pct: Option<f64>,
    pub density_ok: bool,
    pub speed_ok: bool,
    pub tone_ok: bool,
    pub speech_score: u8,
    /// Set on a short trailing window that copied its predecessor's figures.
    pub inherited: bool,
}

impl SpeechWindowMetrics {
    fn new(
        window_start_ms: u64,
        window_end_ms: u64,
        density: Option<f64>,
        speed: Option<f64>,
        question: Option<f64>,
    ) -> Self {
        let vote = speech_window_score(density, speed, question);
        SpeechWindowMetrics {
            window_start_ms,
            window_end_ms,
            word_density_pct: density,
            speaking_speed_wpm: speed,
            question_pct: question,
            density_ok: vote.density_ok,
            speed_ok: vote.speed_ok,
            tone_ok: vote.tone_ok,
            speech_score: vote.score(),
            inherited: false,
        }
    }
}

/// Scores every analysis window tiling `[0, duration_ms)`.
pub fn score_audio(
    track: Option<&AudioTrack>,
    words: Option<&WordTimeline>,
    duration_ms: u64,
    cfg: &AudioConfig,
) -> Vec<SpeechWindowMetrics> {
    let window = cfg.window_ms.max(1);
    let intervals = track
        .filter(|t| !t.is_empty())
        .map(|t| detect_voiced_intervals(t, &cfg.voicing));

    let mut out: Vec<SpeechWindowMetrics> = Vec::new();
    for start in (0..duration_ms).step_by(window as usize) {
        let end = (start + window).min(duration_ms);
        if end - start < window && end - start < cfg.min_final_window_ms {
            if let Some(prev) = out.last() {
                let mut copy = prev.clone();
                copy.window_start_ms = start;
                copy.window_end_ms = end;
                copy.inherited = true;
                out.push(copy);
                continue;
            }
        }
        let (ws, we) = (start as f64, end as f64);
        let speed = speaking_speed(words, ws, we);
        let metrics = match (track, &intervals) {
            (Some(track), Some(intervals)) => {
                let density = word_density(intervals, ws, we);
                let track_end = track.duration_ms();
                let tones: Vec<Tone> = intervals
                    .iter()
                    .filter_map(|iv| iv.clip(ws, we.min(track_end)))
                    .filter_map(|iv| classify_utterance_tone(track, &iv, &cfg.voicing).ok())
                    .collect();
                SpeechWindowMetrics::new(
                    start,
                    end,
                    Some(density),
                    speed,
                    intonation_percent(&tones),
                )
            }
            _ => SpeechWindowMetrics::new(start, end, None, speed, None),
        };
        out.push(metrics);
    }
    out
}
