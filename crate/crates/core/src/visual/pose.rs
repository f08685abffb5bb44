use serde::{Deserialize, Serialize};

use crate::observation::FaceGeometry;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseLabel {
    Forward,
    Left,
    Right,
    Up,
    Down,
    FarLeft,
    FarRight,
    FarUp,
    FarDown,
    Backwards,
}

impl PoseLabel {
    pub const ALL: [PoseLabel; 10] = [
        PoseLabel::Forward,
        PoseLabel::Left,
        PoseLabel::Right,
        PoseLabel::Up,
        PoseLabel::Down,
        PoseLabel::FarLeft,
        PoseLabel::FarRight,
        PoseLabel::FarUp,
        PoseLabel::FarDown,
        PoseLabel::Backwards,
    ];
}

/// Nose-offset bands as fractions of the bounding box half-extent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoseThresholds {
    #[serde(rename = "pose_mild")]
    pub mild: f64,
    #[serde(rename = "pose_extreme")]
    pub extreme: f64,
}

impl Default for PoseThresholds {
    fn default() -> Self {
        PoseThresholds {
            mild: 0.35,
            extreme: 0.75,
        }
    }
}

impl PoseThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.mild > 0.0 && self.mild < self.extreme) {
            return Err(Error::Range(format!(
                "pose thresholds need 0 < mild < extreme, got {} and {}",
                self.mild, self.extreme
            )));
        }
        Ok(())
    }
}

/// Head direction from the nose tip's offset against the face box center.
///
/// Without detected eyes the lecturer is taken to face away. Otherwise the
/// offset is normalized by the box half-extent; small offsets are forward,
/// and the dominant axis (horizontal on ties) picks the direction, with the
/// `Far*` variant at or beyond the extreme band.
pub fn pose_classify(face: &FaceGeometry, th: &PoseThresholds) -> Result<PoseLabel> {
    let b = &face.bbox;
    if b.w <= 0.0 || b.h <= 0.0 {
        return Err(Error::Geometry(format!("bbox extent {}x{}", b.w, b.h)));
    }
    if !face.eyes_detected {
        return Ok(PoseLabel::Backwards);
    }
    let c = b.center();
    let dx = (face.nose.x - c.x) / (b.w / 2.0);
    let dy = (face.nose.y - c.y) / (b.h / 2.0);
    Ok(classify_offset(dx, dy, th))
}

pub(crate) fn classify_offset(dx: f64, dy: f64, th: &PoseThresholds) -> PoseLabel {
    use PoseLabel::*;
    if dx.abs().max(dy.abs()) < th.mild {
        return Forward;
    }
    let far_if = |v: f64| v.abs() >= th.extreme;
    if dx.abs() >= dy.abs() {
        match (dx > 0.0, far_if(dx)) {
            (true, false) => Right,
            (true, true) => FarRight,
            (false, false) => Left,
            (false, true) => FarLeft,
        }
    } else {
        match (dy > 0.0, far_if(dy)) {
            (true, false) => Down,
            (true, true) => FarDown,
            (false, false) => Up,
            (false, true) => FarUp,
        }
    }
}

/// 1 when the lecturer keeps eye contact with the audience. Frames with no
/// face pass `None`.
pub fn pose_score(label: Option<PoseLabel>) -> u8 {
    use PoseLabel::*;
    match label {
        Some(Forward | Left | Right | Up | Down) => 1,
        _ => 0,
    }
}
