use super::{WordEvent, WordTimeline};
use crate::{Error, Result};

/// Parses `words.jsonl`: one `{"t_ms":int,"word":str}` object per line.
pub fn parse_words(text: &str) -> Result<WordTimeline> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let event: WordEvent = serde_json::from_str(raw).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        events.push(event);
    }
    WordTimeline::new(events)
}

pub fn write_words(timeline: &WordTimeline) -> String {
    let mut out = String::new();
    for e in &timeline.events {
        out.push_str(&serde_json::to_string(e).expect("word event serializes"));
        out.push('\n');
    }
    out
}
