//! Domain types for detector observations, audio, word timelines and
//! annotations, plus the parsers that turn the external file formats into
//! validated in-memory values.
//!
//! All geometry is in normalized image coordinates: `x` and `y` lie in
//! `[0, 1]`, the origin is the top-left corner and `y` grows downward.

mod annotations;
mod frames;
mod wav;
mod words;

use serde::{Deserialize, Serialize};

pub use annotations::{
    parse_annotations, AnnotationField, AnnotationSet, AudioAnnotation, FrameAnnotation, Likert,
};
pub use frames::{parse_frame_line, parse_frame_stream, write_frame_stream};
pub use wav::{encode_wav, parse_wav};
pub use words::{parse_words, write_words};

/// Facial expression reported by the upstream expression classifier.
///
/// `None` means no face was detected in the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpressionLabel {
    Anger,
    Disgust,
    Fear,
    Happy,
    Neutral,
    Sad,
    Surprise,
    None,
}

impl ExpressionLabel {
    pub const ALL: [ExpressionLabel; 8] = [
        ExpressionLabel::Anger,
        ExpressionLabel::Disgust,
        ExpressionLabel::Fear,
        ExpressionLabel::Happy,
        ExpressionLabel::Neutral,
        ExpressionLabel::Sad,
        ExpressionLabel::Surprise,
        ExpressionLabel::None,
    ];
}

/// Lecturer activity reported by the upstream activity classifier.
///
/// `None` means the activity detector produced no output for the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityLabel {
    Absent,
    Attending,
    HandRaising,
    Writing,
    TelephoneCall,
    Texting,
    LookingElsewhere,
    None,
}

impl ActivityLabel {
    pub const ALL: [ActivityLabel; 8] = [
        ActivityLabel::Absent,
        ActivityLabel::Attending,
        ActivityLabel::HandRaising,
        ActivityLabel::Writing,
        ActivityLabel::TelephoneCall,
        ActivityLabel::Texting,
        ActivityLabel::LookingElsewhere,
        ActivityLabel::None,
    ];
}

/// A point in normalized image coordinates. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn in_unit_square(&self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Axis-aligned rectangle, top-left corner plus extent. Serialized as
/// `[x, y, w, h]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }
}

impl From<[f64; 4]> for Rect {
    fn from([x, y, w, h]: [f64; 4]) -> Self {
        Rect { x, y, w, h }
    }
}

impl From<Rect> for [f64; 4] {
    fn from(r: Rect) -> Self {
        [r.x, r.y, r.w, r.h]
    }
}

/// Face detector output for one frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceGeometry {
    pub bbox: Rect,
    /// Nose tip. Not required to lie inside `bbox`.
    pub nose: Point,
    pub eyes_detected: bool,
}

impl FaceGeometry {
    pub fn validate(&self) -> Result<(), String> {
        let b = &self.bbox;
        if !(b.w > 0.0 && b.h > 0.0) {
            return Err(format!(
                "face bbox must have positive extent, got w={} h={}",
                b.w, b.h
            ));
        }
        let corner = Point::new(b.x + b.w, b.y + b.h);
        if !Point::new(b.x, b.y).in_unit_square() || !corner.in_unit_square() {
            return Err("face bbox leaves the unit square".into());
        }
        if !self.nose.in_unit_square() {
            return Err("nose lies outside the unit square".into());
        }
        Ok(())
    }
}

/// Landmarks of one detected hand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandObservation {
    pub landmarks: Vec<Point>,
}

impl HandObservation {
    pub fn validate(&self) -> Result<(), String> {
        if self.landmarks.is_empty() {
            return Err("hand has no landmarks".into());
        }
        if let Some(p) = self.landmarks.iter().find(|p| !p.in_unit_square()) {
            return Err(format!(
                "hand landmark ({}, {}) outside the unit square",
                p.x, p.y
            ));
        }
        Ok(())
    }

    /// Center of gravity of the landmarks.
    pub fn centroid(&self) -> Point {
        crate::visual::centroid(&self.landmarks)
    }
}

/// Everything the upstream detectors reported for one video frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameObservation {
    pub frame_idx: u64,
    pub t_ms: u64,
    pub expression: ExpressionLabel,
    pub activity: ActivityLabel,
    #[serde(default)]
    pub face: Option<FaceGeometry>,
    #[serde(default)]
    pub hands: Vec<HandObservation>,
}

impl FrameObservation {
    /// Geometry checks that apply to a single record in isolation.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(face) = &self.face {
            face.validate()?;
        }
        for hand in &self.hands {
            hand.validate()?;
        }
        Ok(())
    }
}

/// Mono audio, samples normalized to `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioTrack {
    pub sample_rate: u32,
    pub samples: Vec<f32>,
}

impl AudioTrack {
    pub const MIN_SAMPLE_RATE: u32 = 8000;

    pub fn new(sample_rate: u32, samples: Vec<f32>) -> crate::Result<Self> {
        if sample_rate < Self::MIN_SAMPLE_RATE {
            return Err(crate::Error::UnsupportedFormat(format!(
                "sample rate {sample_rate} Hz is below {} Hz",
                Self::MIN_SAMPLE_RATE
            )));
        }
        if let Some(s) = samples.iter().find(|s| !(-1.0..=1.0).contains(*s)) {
            return Err(crate::Error::Range(format!("sample {s} outside [-1, 1]")));
        }
        Ok(AudioTrack {
            sample_rate,
            samples,
        })
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate as f64
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample index for a time offset, clamped to the track length.
    pub fn sample_at(&self, t_ms: f64) -> usize {
        let idx = (t_ms * self.sample_rate as f64 / 1000.0).round();
        (idx.max(0.0) as usize).min(self.samples.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordEvent {
    pub t_ms: u64,
    pub word: String,
}

/// Recognized words with their onset times, as produced by an external
/// speech recognizer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordTimeline {
    pub events: Vec<WordEvent>,
}

impl WordTimeline {
    pub fn new(events: Vec<WordEvent>) -> crate::Result<Self> {
        for (i, pair) in events.windows(2).enumerate() {
            if pair[1].t_ms < pair[0].t_ms {
                return Err(crate::Error::Ordering(format!(
                    "word {} at {} ms precedes previous word at {} ms",
                    i + 2,
                    pair[1].t_ms,
                    pair[0].t_ms
                )));
            }
        }
        Ok(WordTimeline { events })
    }

    /// Number of words with onset in `[start_ms, end_ms)`.
    pub fn count_in(&self, start_ms: f64, end_ms: f64) -> usize {
        let lo = self.events.partition_point(|e| (e.t_ms as f64) < start_ms);
        let hi = self.events.partition_point(|e| (e.t_ms as f64) < end_ms);
        hi - lo
    }

    pub fn last_ms(&self) -> Option<u64> {
        self.events.last().map(|e| e.t_ms)
    }
}

/// A validated lecture recording: the frame stream plus optional audio and
/// word sidecars.
#[derive(Clone, Debug, PartialEq)]
pub struct LectureSession {
    pub frames: Vec<FrameObservation>,
    pub audio: Option<AudioTrack>,
    pub words: Option<WordTimeline>,
    pub fps: f64,
    pub duration_ms: u64,
}

impl LectureSession {
    /// Builds a session from already ordered frames. The duration covers the
    /// last frame's display period.
    pub fn new(frames: Vec<FrameObservation>, fps: f64) -> crate::Result<Self> {
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(crate::Error::Range(format!(
                "fps must be positive, got {fps}"
            )));
        }
        for (i, pair) in frames.windows(2).enumerate() {
            check_order(&pair[0], &pair[1], i + 2)?;
        }
        let duration_ms = frames
            .last()
            .map(|f| f.t_ms + frame_period_ms(fps))
            .unwrap_or(0);
        Ok(LectureSession {
            frames,
            audio: None,
            words: None,
            fps,
            duration_ms,
        })
    }

    /// Attaches audio; the session is extended to cover the whole track.
    pub fn with_audio(mut self, audio: AudioTrack) -> Self {
        self.duration_ms = self.duration_ms.max(audio.duration_ms().ceil() as u64);
        self.audio = Some(audio);
        self
    }

    pub fn with_words(mut self, words: WordTimeline) -> Self {
        self.words = Some(words);
        self
    }
}

pub(crate) fn frame_period_ms(fps: f64) -> u64 {
    ((1000.0 / fps).round() as u64).max(1)
}

/// Checks that `next` strictly follows `prev` in both index and time.
pub(crate) fn check_order(
    prev: &FrameObservation,
    next: &FrameObservation,
    line: usize,
) -> crate::Result<()> {
    if next.frame_idx <= prev.frame_idx || next.t_ms <= prev.t_ms {
        return Err(crate::Error::Ordering(format!(
            "line {line}: frame {} at {} ms does not follow frame {} at {} ms",
            next.frame_idx, next.t_ms, prev.frame_idx, prev.t_ms
        )));
    }
    Ok(())
}
