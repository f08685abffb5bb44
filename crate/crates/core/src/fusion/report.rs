use std::fmt::Write as _;
use std::str::FromStr;

use super::{FrameScore, ModalityScores, SessionReport};
use crate::{Error, Result};

const CSV_HEADER: &str = "frame_idx,t_ms,expression,activity,pose,hand,speech,total";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Serializes a report. Output is byte-identical for identical reports.
pub fn render_report(report: &SessionReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = String::with_capacity(32 * (report.frames.len() + 1));
            s.push_str(CSV_HEADER);
            s.push('\n');
            for f in &report.frames {
                let p = &f.parts;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    f.frame_idx,
                    f.t_ms,
                    p.expression,
                    p.activity,
                    p.pose,
                    p.hand,
                    p.speech,
                    f.total
                );
            }
            s
        }
    }
}

pub fn parse_report_json(text: &str) -> Result<SessionReport> {
    Ok(serde_json::from_str(text)?)
}

/// Reads the per-frame rows of `report.csv`.
pub fn parse_report_csv(text: &str) -> Result<Vec<FrameScore>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Parse {
            line: i + 1,
            message: what.to_string(),
        };
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 8 {
            return Err(bad("expected 8 columns"));
        }
        let int = |c: &str| {
            c.parse::<u64>()
                .map_err(|_| bad(&format!("`{c}` is not an integer")))
        };
        let bit = |c: &str| match c {
            "0" => Ok(0u8),
            "1" => Ok(1u8),
            _ => Err(bad(&format!("sub-score `{c}` is not 0 or 1"))),
        };
        let parts = ModalityScores::new(
            bit(cols[2])?,
            bit(cols[3])?,
            bit(cols[4])?,
            bit(cols[5])?,
            bit(cols[6])?,
        );
        let score = FrameScore::new(int(cols[0])?, int(cols[1])?, parts);
        if score.total as u64 != int(cols[7])? {
            return Err(bad("total does not equal the sum of the parts"));
        }
        out.push(score);
    }
    Ok(out)
}
