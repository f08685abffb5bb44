//! Fuses the five binary modality scores into a 0–5 score per frame, a
//! lecture average, per-window modality rates and low-quality alerts.

mod report;
mod stream;

use serde::{Deserialize, Serialize};

pub use report::{parse_report_csv, parse_report_json, render_report, ReportFormat};
pub use stream::{AlertEvent, AlertPolicy, StreamOutput, StreamScorer};

use crate::audio::{score_audio, AudioConfig, SpeechWindowMetrics};
use crate::observation::{FrameObservation, LectureSession};
use crate::visual::{
    activity_score, expression_score, pose_classify, pose_score, HandTracker, VisualConfig,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModalityScores {
    pub expression: u8,
    pub activity: u8,
    pub pose: u8,
    pub hand: u8,
    pub speech: u8,
}

impl ModalityScores {
    pub fn new(expression: u8, activity: u8, pose: u8, hand: u8, speech: u8) -> Self {
        ModalityScores {
            expression,
            activity,
            pose,
            hand,
            speech,
        }
    }

    pub fn as_array(&self) -> [u8; 5] {
        [
            self.expression,
            self.activity,
            self.pose,
            self.hand,
            self.speech,
        ]
    }
}

/// Sum of the five sub-scores.
pub fn frame_score(parts: &ModalityScores) -> u8 {
    parts.as_array().iter().sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameScore {
    pub frame_idx: u64,
    pub t_ms: u64,
    pub parts: ModalityScores,
    pub total: u8,
}

impl FrameScore {
    pub fn new(frame_idx: u64, t_ms: u64, parts: ModalityScores) -> Self {
        FrameScore {
            frame_idx,
            t_ms,
            parts,
            total: frame_score(&parts),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlertConfig {
    /// Frames scoring at or below this are low quality.
    pub alert_threshold: u8,
    pub alert_sustain_ms: u64,
}

impl Default for AlertConfig {
    fn default() -> Self {
        AlertConfig {
            alert_threshold: 2,
            alert_sustain_ms: 2000,
        }
    }
}

/// Every tunable of the scoring engine. Serializes to a flat key set that
/// doubles as the config file format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    #[serde(flatten)]
    pub visual: VisualConfig,
    #[serde(flatten)]
    pub audio: AudioConfig,
    #[serde(flatten)]
    pub alert: AlertConfig,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.visual.pose.validate()?;
        let v = &self.audio.voicing;
        if !(v.frame_ms > 0.0 && v.hop_ms > 0.0) {
            return Err(Error::Range("frame_ms and hop_ms must be positive".into()));
        }
        if !(v.silence_rms >= 0.0 && v.min_gap_ms >= 0.0 && v.min_voiced_ms >= 0.0) {
            return Err(Error::Range(
                "voicing thresholds must be non-negative".into(),
            ));
        }
        if self.audio.window_ms == 0 {
            return Err(Error::Range("window_ms must be positive".into()));
        }
        let speed = self.visual.hand_moving_speed;
        if speed.is_nan() || speed < 0.0 {
            return Err(Error::Range(
                "hand_moving_speed must be non-negative".into(),
            ));
        }
        if self.alert.alert_threshold > 5 {
            return Err(Error::Range("alert_threshold must be within 0..=5".into()));
        }
        Ok(())
    }
}

/// Stateful per-frame scorer for the four visual modalities. Hand tracking
/// makes it sequential: frames must be fed in order.
#[derive(Clone, Debug)]
pub struct FrameScorer {
    cfg: VisualConfig,
    hands: HandTracker,
}

impl FrameScorer {
    pub fn new(cfg: VisualConfig, fps: f64) -> Self {
        FrameScorer {
            cfg,
            hands: HandTracker::new(cfg.hand_window_frames(fps), cfg.hand_moving_speed),
        }
    }

    /// Scores the visual modalities of one frame and attaches `speech`.
    ///
    /// Expression and activity come straight from the detector labels. Pose
    /// needs a face and hand motion needs hands in the frame; either missing
    /// scores 0.
    pub fn score(&mut self, obs: &FrameObservation, speech: u8) -> Result<ModalityScores> {
        let hand = self.hands.observe(obs.frame_idx, &obs.hands)?;
        let pose = match &obs.face {
            Some(face) => pose_score(Some(pose_classify(face, &self.cfg.pose)?)),
            None => 0,
        };
        Ok(ModalityScores {
            expression: expression_score(obs.expression),
            activity: activity_score(obs.activity),
            pose,
            hand,
            speech: speech.min(1),
        })
    }
}

/// Speech score of the window containing `t_ms`, or 0 past the last window.
pub fn speech_at(windows: &[SpeechWindowMetrics], t_ms: u64, window_ms: u64) -> u8 {
    windows
        .get((t_ms / window_ms.max(1)) as usize)
        .map_or(0, |w| w.speech_score)
}

/// Fraction of frames with a positive sub-score, per speech window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRates {
    pub window_start_ms: u64,
    pub window_end_ms: u64,
    pub frames: usize,
    pub expression: Option<f64>,
    pub activity: Option<f64>,
    pub pose: Option<f64>,
    pub hand: Option<f64>,
    pub speech: Option<f64>,
    pub mean_total: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModalityRates {
    pub window_ms: u64,
    pub windows: Vec<WindowRates>,
}

/// Effective configuration echoed into every report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub fps: f64,
    #[serde(flatten)]
    pub engine: EngineConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub config: ReportConfig,
    pub frame_count: usize,
    pub average_score: f64,
    pub frames: Vec<FrameScore>,
    pub speech_windows: Vec<SpeechWindowMetrics>,
    pub modality_rates: ModalityRates,
    #[serde(default)]
    pub alerts: Vec<AlertEvent>,
}

/// Mean frame total.
pub fn average_score(frames: &[FrameScore]) -> f64 {
    if frames.is_empty() {
        return 0.0;
    }
    let sum: u64 = frames.iter().map(|f| f.total as u64).sum();
    sum as f64 / frames.len() as f64
}

fn modality_rates(
    frames: &[FrameScore],
    windows: &[SpeechWindowMetrics],
    window_ms: u64,
) -> ModalityRates {
    let mut buckets: Vec<Vec<&FrameScore>> = vec![Vec::new(); windows.len()];
    for f in frames {
        if let Some(b) = buckets.get_mut((f.t_ms / window_ms) as usize) {
            b.push(f);
        }
    }
    let rate = |b: &[&FrameScore], pick: fn(&ModalityScores) -> u8| -> Option<f64> {
        (!b.is_empty())
            .then(|| b.iter().map(|f| pick(&f.parts) as f64).sum::<f64>() / b.len() as f64)
    };
    let rows = windows
        .iter()
        .zip(&buckets)
        .map(|(w, b)| WindowRates {
            window_start_ms: w.window_start_ms,
            window_end_ms: w.window_end_ms,
            frames: b.len(),
            expression: rate(b, |p| p.expression),
            activity: rate(b, |p| p.activity),
            pose: rate(b, |p| p.pose),
            hand: rate(b, |p| p.hand),
            speech: rate(b, |p| p.speech),
            mean_total: (!b.is_empty())
                .then(|| b.iter().map(|f| f.total as f64).sum::<f64>() / b.len() as f64),
        })
        .collect();
    ModalityRates {
        window_ms,
        windows: rows,
    }
}

/// Scores a whole recorded session.
///
/// Speech windows are scored first; every frame then takes the speech score
/// of the window containing its timestamp alongside its four visual
/// sub-scores.
pub fn score_session(session: &LectureSession, cfg: &EngineConfig) -> Result<SessionReport> {
    if session.frames.is_empty() {
        return Err(Error::EmptySession);
    }
    cfg.validate()?;
    let windows = score_audio(
        session.audio.as_ref(),
        session.words.as_ref(),
        session.duration_ms,
        &cfg.audio,
    );

    let mut scorer = StreamScorer::new(*cfg, session.fps);
    let mut frames = Vec::with_capacity(session.frames.len());
    let mut alerts = Vec::new();
    for obs in &session.frames {
        let speech = speech_at(&windows, obs.t_ms, cfg.audio.window_ms);
        let out = scorer.step(obs, speech)?;
        frames.push(out.score);
        alerts.extend(out.alert);
    }

    Ok(SessionReport {
        config: ReportConfig {
            fps: session.fps,
            engine: *cfg,
        },
        frame_count: frames.len(),
        average_score: average_score(&frames),
        modality_rates: modality_rates(&frames, &windows, cfg.audio.window_ms),
        frames,
        speech_windows: windows,
        alerts,
    })
}
