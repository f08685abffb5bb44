//! Seeded synthetic lecture sessions with known intended sub-scores.
//!
//! Every modality of every frame (and every speech window) is drawn positive
//! with the profile's probability, then rendered into detector-style
//! observations, a sine-burst audio track and a word timeline that the
//! engine scores back to exactly the intended values.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::AudioConfig;
use crate::fusion::{FrameScore, ModalityScores};
use crate::observation::{
    frame_period_ms, ActivityLabel, AudioTrack, ExpressionLabel, FaceGeometry, FrameObservation,
    HandObservation, LectureSession, Point, Rect, WordEvent, WordTimeline,
};
use crate::{Error, Result};

pub const SAMPLE_RATE: u32 = 16_000;
const TONE_HZ: f64 = 440.0;
const LOUD: f64 = 0.3;
const QUIET: f64 = 0.008;
const CYCLE_MS: u64 = 2000;
const BURST_OFFSET_MS: u64 = 50;
/// Positive windows: 45% voiced, alternating question/statement, 200 wpm.
const GOOD_BURST_MS: u64 = 900;
const GOOD_WORD_GAP_MS: u64 = 300;
/// Negative windows: 20% voiced, all questions, 100 wpm.
const POOR_BURST_MS: u64 = 400;
const POOR_WORD_GAP_MS: u64 = 600;

const GOOD_EXPRESSIONS: [ExpressionLabel; 3] = [
    ExpressionLabel::Happy,
    ExpressionLabel::Neutral,
    ExpressionLabel::Surprise,
];
const POOR_EXPRESSIONS: [ExpressionLabel; 4] = [
    ExpressionLabel::Anger,
    ExpressionLabel::Disgust,
    ExpressionLabel::Fear,
    ExpressionLabel::Sad,
];
const GOOD_ACTIVITIES: [ActivityLabel; 3] = [
    ActivityLabel::Attending,
    ActivityLabel::Writing,
    ActivityLabel::HandRaising,
];
const POOR_ACTIVITIES: [ActivityLabel; 4] = [
    ActivityLabel::Absent,
    ActivityLabel::TelephoneCall,
    ActivityLabel::Texting,
    ActivityLabel::LookingElsewhere,
];
/// Nose offsets in half-extent units.
const GOOD_NOSE: [(f64, f64); 5] = [(0.0, 0.0), (0.5, 0.0), (-0.5, 0.0), (0.0, 0.5), (0.0, -0.5)];
const POOR_NOSE: [(f64, f64); 4] = [(0.9, 0.0), (-0.9, 0.0), (0.0, 0.9), (0.0, -0.9)];
const FACE_BOX: Rect = Rect::new(0.4, 0.1, 0.2, 0.3);
const WORDS: [&str; 8] = [
    "the", "lecture", "covers", "this", "idea", "and", "its", "proof",
];

/// Per-modality probabilities that replace `quality` when set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModalityOverrides {
    pub expression: Option<f64>,
    pub activity: Option<f64>,
    pub pose: Option<f64>,
    pub hand: Option<f64>,
    pub speech: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthProfile {
    pub quality: f64,
    pub duration_ms: u64,
    pub fps: f64,
    pub seed: u64,
    #[serde(default)]
    pub overrides: ModalityOverrides,
}

impl Default for SynthProfile {
    fn default() -> Self {
        SynthProfile {
            quality: 0.5,
            duration_ms: 600_000,
            fps: 30.0,
            seed: 0,
            overrides: ModalityOverrides::default(),
        }
    }
}

impl SynthProfile {
    pub fn validate(&self) -> Result<()> {
        let o = &self.overrides;
        for (name, p) in [
            ("quality", Some(self.quality)),
            ("expression", o.expression),
            ("activity", o.activity),
            ("pose", o.pose),
            ("hand", o.hand),
            ("speech", o.speech),
        ] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Range(format!(
                        "{name} probability {p} outside [0, 1]"
                    )));
                }
            }
        }
        if !(self.fps > 0.0 && self.fps <= 1000.0) {
            return Err(Error::Range(format!("fps {} outside (0, 1000]", self.fps)));
        }
        if self.duration_ms == 0 {
            return Err(Error::Range("duration_ms must be positive".into()));
        }
        Ok(())
    }

    fn p(&self, over: Option<f64>) -> f64 {
        over.unwrap_or(self.quality)
    }
}

/// Intended polarity of one speech window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowIntent {
    pub start_ms: u64,
    pub end_ms: u64,
    pub positive: bool,
}

/// What the generator meant each frame and window to score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub profile: SynthProfile,
    pub frames: Vec<FrameScore>,
    pub speech_windows: Vec<WindowIntent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSession {
    pub frames: Vec<FrameObservation>,
    pub words: WordTimeline,
    pub audio: AudioTrack,
    pub fps: f64,
    pub truth: SynthTruth,
}

impl SynthSession {
    pub fn session(&self) -> Result<LectureSession> {
        Ok(LectureSession::new(self.frames.clone(), self.fps)?
            .with_audio(self.audio.clone())
            .with_words(self.words.clone()))
    }
}

/// Splits `[0, duration)` into speech windows, with a short final window
/// copying its predecessor's intent.
fn window_intents(
    rng: &mut ChaCha8Rng,
    duration_ms: u64,
    p: f64,
    audio: &AudioConfig,
) -> Vec<WindowIntent> {
    let window = audio.window_ms.max(1);
    let mut out: Vec<WindowIntent> = Vec::new();
    for start in (0..duration_ms).step_by(window as usize) {
        let end = (start + window).min(duration_ms);
        let short = end - start < window && end - start < audio.min_final_window_ms;
        let positive = match out.last() {
            Some(prev) if short => prev.positive,
            _ => rng.random_bool(p),
        };
        out.push(WindowIntent {
            start_ms: start,
            end_ms: end,
            positive,
        });
    }
    out
}

fn render_audio(windows: &[WindowIntent], duration_ms: u64) -> Result<AudioTrack> {
    let per_ms = SAMPLE_RATE as u64 / 1000;
    let mut samples = vec![0f32; (duration_ms * per_ms) as usize];
    for w in windows {
        let burst = if w.positive {
            GOOD_BURST_MS
        } else {
            POOR_BURST_MS
        };
        for (k, cycle) in (w.start_ms..w.end_ms)
            .step_by(CYCLE_MS as usize)
            .enumerate()
        {
            let amp = if !w.positive || k % 2 == 0 {
                LOUD
            } else {
                QUIET
            };
            let from = cycle + BURST_OFFSET_MS;
            let to = (from + burst).min(w.end_ms);
            for n in (from * per_ms)..(to * per_ms) {
                let t = n as f64 / SAMPLE_RATE as f64;
                samples[n as usize] = (amp * (TAU * TONE_HZ * t).sin()) as f32;
            }
        }
    }
    AudioTrack::new(SAMPLE_RATE, samples)
}

fn render_words(windows: &[WindowIntent]) -> Result<WordTimeline> {
    let mut events = Vec::new();
    for w in windows {
        let gap = if w.positive {
            GOOD_WORD_GAP_MS
        } else {
            POOR_WORD_GAP_MS
        };
        for t_ms in (w.start_ms + BURST_OFFSET_MS..w.end_ms).step_by(gap as usize) {
            events.push(WordEvent {
                t_ms,
                word: WORDS[events.len() % WORDS.len()].to_string(),
            });
        }
    }
    WordTimeline::new(events)
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, options: &[T]) -> T {
    options[rng.random_range(0..options.len())]
}

fn hand_at(x: f64) -> HandObservation {
    let y = 0.6;
    HandObservation {
        landmarks: vec![
            Point::new(x - 0.02, y),
            Point::new(x + 0.02, y),
            Point::new(x, y - 0.03),
            Point::new(x, y + 0.03),
        ],
    }
}

/// Generates a session. Identical profiles give identical sessions.
pub fn synthesize(profile: &SynthProfile, audio_cfg: &AudioConfig) -> Result<SynthSession> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let o = &profile.overrides;

    let period = 1000.0 / profile.fps;
    let frame_count = (0u64..)
        .take_while(|&i| ((i as f64) * period).round() < profile.duration_ms as f64)
        .count() as u64;
    let last_t = ((frame_count - 1) as f64 * period).round() as u64;
    let duration_ms = last_t + frame_period_ms(profile.fps);

    let windows = window_intents(&mut rng, duration_ms, profile.p(o.speech), audio_cfg);

    let mut frames = Vec::with_capacity(frame_count as usize);
    let mut truth = Vec::with_capacity(frame_count as usize);
    let mut hand_x_toggle = false;
    for i in 0..frame_count {
        let t_ms = ((i as f64) * period).round() as u64;
        let expression = rng.random_bool(profile.p(o.expression));
        let activity = rng.random_bool(profile.p(o.activity));
        let pose = rng.random_bool(profile.p(o.pose));
        let hand = rng.random_bool(profile.p(o.hand));

        let expression_label = if expression {
            pick(&mut rng, &GOOD_EXPRESSIONS)
        } else {
            pick(&mut rng, &POOR_EXPRESSIONS)
        };
        let activity_label = if activity {
            pick(&mut rng, &GOOD_ACTIVITIES)
        } else {
            pick(&mut rng, &POOR_ACTIVITIES)
        };
        let c = FACE_BOX.center();
        let (hx, hy) = (FACE_BOX.w / 2.0, FACE_BOX.h / 2.0);
        let face = if pose {
            let (dx, dy) = pick(&mut rng, &GOOD_NOSE);
            FaceGeometry {
                bbox: FACE_BOX,
                nose: Point::new(c.x + dx * hx, c.y + dy * hy),
                eyes_detected: true,
            }
        } else if rng.random_bool(0.2) {
            FaceGeometry {
                bbox: FACE_BOX,
                nose: c,
                eyes_detected: false,
            }
        } else {
            let (dx, dy) = pick(&mut rng, &POOR_NOSE);
            FaceGeometry {
                bbox: FACE_BOX,
                nose: Point::new(c.x + dx * hx, c.y + dy * hy),
                eyes_detected: true,
            }
        };
        let hands = if hand {
            hand_x_toggle = !hand_x_toggle;
            vec![hand_at(if hand_x_toggle { 0.3 } else { 0.7 })]
        } else {
            Vec::new()
        };

        let speech = windows
            .iter()
            .find(|w| (w.start_ms..w.end_ms).contains(&t_ms))
            .is_some_and(|w| w.positive);
        frames.push(FrameObservation {
            frame_idx: i,
            t_ms,
            expression: expression_label,
            activity: activity_label,
            face: Some(face),
            hands,
        });
        truth.push(FrameScore::new(
            i,
            t_ms,
            ModalityScores::new(
                expression as u8,
                activity as u8,
                pose as u8,
                hand as u8,
                speech as u8,
            ),
        ));
    }

    Ok(SynthSession {
        frames,
        words: render_words(&windows)?,
        audio: render_audio(&windows, duration_ms)?,
        fps: profile.fps,
        truth: SynthTruth {
            profile: *profile,
            frames: truth,
            speech_windows: windows,
        },
    })
}
