use serde_json::error::Category;

use super::{check_order, FrameObservation, LectureSession};
use crate::{Error, Result};

/// Decodes and validates a single `frames.jsonl` record. `line` is the
/// 1-based line number used in error messages.
pub fn parse_frame_line(text: &str, line: usize) -> Result<FrameObservation> {
    let frame: FrameObservation = serde_json::from_str(text).map_err(|e| match e.classify() {
        // Well-formed JSON whose content does not fit the schema.
        Category::Data => Error::validation(Some(line), e.to_string()),
        _ => Error::Parse {
            line,
            message: e.to_string(),
        },
    })?;
    frame
        .validate()
        .map_err(|msg| Error::validation(Some(line), msg))?;
    Ok(frame)
}

/// Parses a whole line-delimited frame stream. Blank lines are skipped.
pub fn parse_frame_stream(text: &str, fps: f64) -> Result<LectureSession> {
    let mut frames: Vec<FrameObservation> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let frame = parse_frame_line(raw, line)?;
        if let Some(prev) = frames.last() {
            check_order(prev, &frame, line)?;
        }
        frames.push(frame);
    }
    LectureSession::new(frames, fps)
}

/// Serializes frames back to the line-delimited format, one record per line.
pub fn write_frame_stream(frames: &[FrameObservation]) -> String {
    let mut out = String::new();
    for frame in frames {
        // FrameObservation contains no maps with non-string keys.
        out.push_str(&serde_json::to_string(frame).expect("frame serializes"));
        out.push('\n');
    }
    out
}
