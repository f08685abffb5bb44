//! Multimodal lecture-quality scoring.
//!
//! Per-frame detector outputs (expression and activity labels, face geometry,
//! hand landmarks) and an optional audio track with word timings are reduced
//! to five binary sub-scores. Their sum is the frame's quality score on a
//! 0–5 scale.
//!
//! ```
//! use lectometer::fusion::{score_session, EngineConfig};
//! use lectometer::observation::parse_frame_stream;
//!
//! let jsonl = r#"{"frame_idx":0,"t_ms":0,"expression":"happy","activity":"writing"}"#;
//! let session = parse_frame_stream(jsonl, 30.0)?;
//! let report = score_session(&session, &EngineConfig::default())?;
//! assert_eq!(report.frames[0].total, 2);
//! # Ok::<(), lectometer::Error>(())
//! ```
//!
//! The [`eval`] module measures a report against multi-annotator Likert
//! ratings, and [`synth`] produces seeded sessions with known scores.

pub mod audio;
mod error;
pub mod eval;
pub mod fusion;
pub mod observation;
pub mod synth;
pub mod visual;

pub use error::{Error, Result};
