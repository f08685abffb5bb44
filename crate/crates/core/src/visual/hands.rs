//! Hand kinematics from landmark centroids.
//!
//! Speed is centroid displacement divided by frames elapsed, in normalized
//! units per frame. Direction is measured with `y` flipped so that 90° points
//! up on screen.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::observation::{HandObservation, Point};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub speed: f64,
    /// Degrees in `(-180, 180]`; undefined on a first observation.
    pub direction_deg: Option<f64>,
}

/// Motion between two observations of the same hand.
pub fn hand_kinematics(
    prev: Point,
    prev_frame_idx: u64,
    cur: Point,
    frame_idx: u64,
) -> Result<Kinematics> {
    if frame_idx <= prev_frame_idx {
        return Err(Error::Ordering(format!(
            "hand observed at frame {frame_idx} after frame {prev_frame_idx}"
        )));
    }
    let elapsed = (frame_idx - prev_frame_idx) as f64;
    let (dx, dy) = (cur.x - prev.x, cur.y - prev.y);
    let mut direction = (-dy).atan2(dx).to_degrees();
    if direction <= -180.0 {
        direction += 360.0;
    }
    Ok(Kinematics {
        speed: dx.hypot(dy) / elapsed,
        direction_deg: Some(direction),
    })
}

/// Tracking state for a single hand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HandTrackState {
    pub prev_centroid: Option<Point>,
    pub prev_frame_idx: Option<u64>,
    pub speed_history: VecDeque<(u64, f64)>,
}

impl HandTrackState {
    /// Feeds the next centroid. The first observation yields speed 0 and no
    /// direction.
    pub fn update(&mut self, centroid: Point, frame_idx: u64) -> Result<Kinematics> {
        let k = match (self.prev_centroid, self.prev_frame_idx) {
            (Some(prev), Some(prev_idx)) => hand_kinematics(prev, prev_idx, centroid, frame_idx)?,
            _ => Kinematics {
                speed: 0.0,
                direction_deg: None,
            },
        };
        self.prev_centroid = Some(centroid);
        self.prev_frame_idx = Some(frame_idx);
        self.speed_history.push_back((frame_idx, k.speed));
        Ok(k)
    }
}

/// What the hand tracker saw in one frame that had hands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    /// Fastest matched hand, in units per frame.
    Measured(f64),
    /// Every hand in the frame had just come into view.
    Entered,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionSample {
    pub frame_idx: u64,
    pub motion: Motion,
}

/// Moving (1) or stationary (0) verdict for the window
/// `(frame_idx - window_frames, frame_idx]`.
///
/// Measured speeds are averaged and compared against `moving_speed`. A window
/// that holds only hand entries, with no measurable displacement yet, counts
/// as moving: the hand just travelled into view. A window without hand
/// samples is stationary.
pub fn hand_motion_score(
    history: &[MotionSample],
    frame_idx: u64,
    window_frames: u64,
    moving_speed: f64,
) -> u8 {
    let lo = frame_idx as i128 - window_frames as i128;
    let in_window = history
        .iter()
        .filter(|s| s.frame_idx <= frame_idx && s.frame_idx as i128 > lo);
    let mut sum = 0.0;
    let mut measured = 0usize;
    let mut entered = false;
    for s in in_window {
        match s.motion {
            Motion::Measured(v) => {
                sum += v;
                measured += 1;
            }
            Motion::Entered => entered = true,
        }
    }
    if measured > 0 {
        u8::from(sum / measured as f64 >= moving_speed)
    } else {
        u8::from(entered)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Track {
    centroid: Point,
    last_frame: u64,
}

/// Multi-hand tracker used by the frame scorer.
///
/// Current hands are matched to previous centroids greedily by distance.
/// Tracks unseen for longer than the motion window expire, so a hand that
/// returns after a long absence re-enters.
#[derive(Clone, Debug)]
pub struct HandTracker {
    window_frames: u64,
    moving_speed: f64,
    tracks: Vec<Track>,
    last_frame: Option<u64>,
    history: VecDeque<MotionSample>,
}

impl HandTracker {
    pub fn new(window_frames: u64, moving_speed: f64) -> Self {
        HandTracker {
            window_frames: window_frames.max(1),
            moving_speed,
            tracks: Vec::new(),
            last_frame: None,
            history: VecDeque::new(),
        }
    }

    /// Processes one frame and returns its hand sub-score. A frame without
    /// hands scores 0.
    pub fn observe(&mut self, frame_idx: u64, hands: &[HandObservation]) -> Result<u8> {
        if let Some(last) = self.last_frame {
            if frame_idx <= last {
                return Err(Error::Ordering(format!(
                    "frame {frame_idx} does not follow frame {last}"
                )));
            }
        }
        self.last_frame = Some(frame_idx);

        let horizon = frame_idx.saturating_sub(self.window_frames);
        self.tracks.retain(|t| t.last_frame >= horizon);
        while self
            .history
            .front()
            .is_some_and(|s| s.frame_idx + self.window_frames <= frame_idx)
        {
            self.history.pop_front();
        }

        if hands.is_empty() {
            return Ok(0);
        }

        let centroids: Vec<Point> = hands.iter().map(HandObservation::centroid).collect();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, c) in centroids.iter().enumerate() {
            for (j, t) in self.tracks.iter().enumerate() {
                pairs.push((c.distance(&t.centroid), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut hand_track: Vec<Option<usize>> = vec![None; centroids.len()];
        let mut track_used = vec![false; self.tracks.len()];
        for (_, i, j) in pairs {
            if hand_track[i].is_none() && !track_used[j] {
                hand_track[i] = Some(j);
                track_used[j] = true;
            }
        }

        let mut fastest: Option<f64> = None;
        for (i, c) in centroids.iter().enumerate() {
            match hand_track[i] {
                Some(j) => {
                    let t = &mut self.tracks[j];
                    let k = hand_kinematics(t.centroid, t.last_frame, *c, frame_idx)?;
                    fastest = Some(fastest.map_or(k.speed, |f: f64| f.max(k.speed)));
                    t.centroid = *c;
                    t.last_frame = frame_idx;
                }
                None => self.tracks.push(Track {
                    centroid: *c,
                    last_frame: frame_idx,
                }),
            }
        }

        self.history.push_back(MotionSample {
            frame_idx,
            motion: fastest.map_or(Motion::Entered, Motion::Measured),
        });
        let history = self.history.make_contiguous();
        Ok(hand_motion_score(
            history,
            frame_idx,
            self.window_frames,
            self.moving_speed,
        ))
    }
}
