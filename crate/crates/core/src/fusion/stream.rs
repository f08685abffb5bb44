use std::fmt;

use serde::{Deserialize, Serialize};

use super::{EngineConfig, FrameScore, FrameScorer};
use crate::observation::FrameObservation;
use crate::{Error, Result};

/// When to raise a low-quality alert: `sustain_frames` consecutive frames
/// with total at or below `threshold`, once per episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlertPolicy {
    pub threshold: u8,
    pub sustain_frames: u32,
}

impl AlertPolicy {
    pub fn from_config(cfg: &EngineConfig, fps: f64) -> Self {
        let frames = (cfg.alert.alert_sustain_ms as f64 * fps / 1000.0).round();
        AlertPolicy {
            threshold: cfg.alert.alert_threshold,
            sustain_frames: (frames as u32).max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlertEvent {
    pub t_ms: u64,
    pub frame_idx: u64,
    pub total: u8,
    pub threshold: u8,
    pub sustained_frames: u32,
}

impl fmt::Display for AlertEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ALERT t_ms={} frame={} total={}",
            self.t_ms, self.frame_idx, self.total
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamOutput {
    pub score: FrameScore,
    pub alert: Option<AlertEvent>,
}

/// Real-time scorer: one observation in, one frame score (and possibly an
/// alert) out. Batch scoring runs through the same type.
#[derive(Clone, Debug)]
pub struct StreamScorer {
    frames: FrameScorer,
    policy: AlertPolicy,
    low_run: u32,
    fired: bool,
    last: Option<(u64, u64)>,
}

impl StreamScorer {
    pub fn new(cfg: EngineConfig, fps: f64) -> Self {
        Self::with_policy(cfg, fps, AlertPolicy::from_config(&cfg, fps))
    }

    pub fn with_policy(cfg: EngineConfig, fps: f64, policy: AlertPolicy) -> Self {
        StreamScorer {
            frames: FrameScorer::new(cfg.visual, fps),
            policy,
            low_run: 0,
            fired: false,
            last: None,
        }
    }

    pub fn policy(&self) -> AlertPolicy {
        self.policy
    }

    /// Scores the next observation. `speech` is the score of the speech
    /// window currently in effect. Out-of-order observations are rejected
    /// without touching the state.
    pub fn step(&mut self, obs: &FrameObservation, speech: u8) -> Result<StreamOutput> {
        if let Some((idx, t)) = self.last {
            if obs.frame_idx <= idx || obs.t_ms <= t {
                return Err(Error::Ordering(format!(
                    "frame {} at {} ms arrived after frame {idx} at {t} ms",
                    obs.frame_idx, obs.t_ms
                )));
            }
        }
        let parts = self.frames.score(obs, speech)?;
        self.last = Some((obs.frame_idx, obs.t_ms));
        let score = FrameScore::new(obs.frame_idx, obs.t_ms, parts);
        Ok(StreamOutput {
            score,
            alert: self.track_alert(&score),
        })
    }

    fn track_alert(&mut self, score: &FrameScore) -> Option<AlertEvent> {
        if score.total > self.policy.threshold {
            self.low_run = 0;
            self.fired = false;
            return None;
        }
        self.low_run += 1;
        if self.fired || self.low_run < self.policy.sustain_frames {
            return None;
        }
        self.fired = true;
        Some(AlertEvent {
            t_ms: score.t_ms,
            frame_idx: score.frame_idx,
            total: score.total,
            threshold: self.policy.threshold,
            sustained_frames: self.low_run,
        })
    }
}
