//! Per-frame visual sub-scores: expression, activity, facial pose and hand
//! movement. Each is binary; a modality the detectors could not observe
//! scores 0.

mod hands;
mod pose;

use serde::{Deserialize, Serialize};

pub use hands::{
    hand_kinematics, hand_motion_score, HandTrackState, HandTracker, Kinematics, Motion,
    MotionSample,
};
pub use pose::{pose_classify, pose_score, PoseLabel, PoseThresholds};

use crate::observation::{ActivityLabel, ExpressionLabel, Point};

pub fn expression_score(label: ExpressionLabel) -> u8 {
    use ExpressionLabel::*;
    match label {
        Happy | Surprise | Neutral => 1,
        Anger | Disgust | Fear | Sad | None => 0,
    }
}

pub fn activity_score(label: ActivityLabel) -> u8 {
    use ActivityLabel::*;
    match label {
        Attending | Writing | HandRaising => 1,
        Absent | TelephoneCall | Texting | LookingElsewhere | None => 0,
    }
}

/// Arithmetic mean of the points. Panics on an empty slice.
pub fn centroid(points: &[Point]) -> Point {
    assert!(!points.is_empty(), "centroid of no points");
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VisualConfig {
    #[serde(flatten)]
    pub pose: PoseThresholds,
    /// Mean speed, in normalized units per frame, at or above which hands
    /// count as moving.
    pub hand_moving_speed: f64,
    pub hand_window_ms: u64,
}

impl Default for VisualConfig {
    fn default() -> Self {
        VisualConfig {
            pose: PoseThresholds::default(),
            hand_moving_speed: 0.002,
            hand_window_ms: 1000,
        }
    }
}

impl VisualConfig {
    /// Length of the hand-motion window in frames at the given rate.
    pub fn hand_window_frames(&self, fps: f64) -> u64 {
        ((self.hand_window_ms as f64 * fps / 1000.0).round() as u64).max(1)
    }
}
