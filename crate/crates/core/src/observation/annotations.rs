use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const HEADER: [&str; 9] = [
    "annotator_id",
    "item_id",
    "item_type",
    "expression",
    "activity",
    "hand",
    "head",
    "overall",
    "speech",
];

/// A rating on the four-level Likert scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Likert(u8);

impl Likert {
    pub fn new(value: u8) -> Result<Self> {
        if (1..=4).contains(&value) {
            Ok(Likert(value))
        } else {
            Err(Error::Range(format!("Likert rating {value} not in 1..=4")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Likert {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Likert::new(value)
    }
}

impl From<Likert> for u8 {
    fn from(l: Likert) -> u8 {
        l.0
    }
}

impl fmt::Display for Likert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One rated column of the annotation table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationField {
    Expression,
    Activity,
    Hand,
    Head,
    Overall,
    Speech,
}

impl AnnotationField {
    pub const ALL: [AnnotationField; 6] = [
        AnnotationField::Expression,
        AnnotationField::Activity,
        AnnotationField::Hand,
        AnnotationField::Head,
        AnnotationField::Overall,
        AnnotationField::Speech,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnnotationField::Expression => "expression",
            AnnotationField::Activity => "activity",
            AnnotationField::Hand => "hand",
            AnnotationField::Head => "head",
            AnnotationField::Overall => "overall",
            AnnotationField::Speech => "speech",
        }
    }

    /// Whether the field is rated on audio items rather than frame items.
    pub fn is_audio(self) -> bool {
        self == AnnotationField::Speech
    }
}

impl fmt::Display for AnnotationField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameAnnotation {
    pub annotator_id: String,
    pub item_id: String,
    pub expression: Likert,
    pub activity: Likert,
    pub hand: Likert,
    pub head: Likert,
    pub overall: Likert,
}

impl FrameAnnotation {
    pub fn rating(&self, field: AnnotationField) -> Option<Likert> {
        match field {
            AnnotationField::Expression => Some(self.expression),
            AnnotationField::Activity => Some(self.activity),
            AnnotationField::Hand => Some(self.hand),
            AnnotationField::Head => Some(self.head),
            AnnotationField::Overall => Some(self.overall),
            AnnotationField::Speech => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudioAnnotation {
    pub annotator_id: String,
    pub item_id: String,
    pub speech: Likert,
}

/// Multi-annotator Likert ratings for frame items and audio items.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotationSet {
    pub frame_items: Vec<FrameAnnotation>,
    pub audio_items: Vec<AudioAnnotation>,
}

impl AnnotationSet {
    /// Builds a set, rejecting duplicate `(annotator, item)` pairs per table.
    pub fn new(
        frame_items: Vec<FrameAnnotation>,
        audio_items: Vec<AudioAnnotation>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &frame_items {
            if !seen.insert((&a.annotator_id, &a.item_id)) {
                return Err(Error::Duplicate(format!(
                    "annotator {} rated frame item {} twice",
                    a.annotator_id, a.item_id
                )));
            }
        }
        seen.clear();
        for a in &audio_items {
            if !seen.insert((&a.annotator_id, &a.item_id)) {
                return Err(Error::Duplicate(format!(
                    "annotator {} rated audio item {} twice",
                    a.annotator_id, a.item_id
                )));
            }
        }
        Ok(AnnotationSet {
            frame_items,
            audio_items,
        })
    }

    /// Ratings for one field, grouped as item → annotator → rating.
    pub fn ratings(&self, field: AnnotationField) -> BTreeMap<String, BTreeMap<String, Likert>> {
        let mut out: BTreeMap<String, BTreeMap<String, Likert>> = BTreeMap::new();
        if field.is_audio() {
            for a in &self.audio_items {
                out.entry(a.item_id.clone())
                    .or_default()
                    .insert(a.annotator_id.clone(), a.speech);
            }
        } else {
            for a in &self.frame_items {
                let r = a.rating(field).expect("frame field");
                out.entry(a.item_id.clone())
                    .or_default()
                    .insert(a.annotator_id.clone(), r);
            }
        }
        out
    }

    pub fn annotators(&self) -> BTreeSet<String> {
        self.frame_items
            .iter()
            .map(|a| a.annotator_id.clone())
            .chain(self.audio_items.iter().map(|a| a.annotator_id.clone()))
            .collect()
    }
}

fn rating(record: &csv::StringRecord, col: usize, line: usize) -> Result<Option<Likert>> {
    let raw = record.get(col).unwrap_or("").trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let value: i64 = raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{}: `{raw}` is not an integer", HEADER[col]),
    })?;
    if !(1..=4).contains(&value) {
        return Err(Error::Range(format!(
            "line {line}: {} rating {value} not in 1..=4",
            HEADER[col]
        )));
    }
    Ok(Some(Likert(value as u8)))
}

fn required(value: Option<Likert>, col: usize, line: usize) -> Result<Likert> {
    value.ok_or_else(|| Error::validation(Some(line), format!("missing {} rating", HEADER[col])))
}

/// Parses `annotations.csv`.
pub fn parse_annotations(text: &str) -> Result<AnnotationSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", HEADER.join(",")),
        });
    }

    let mut frames = Vec::new();
    let mut audio = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let annotator_id = record[0].to_string();
        let item_id = record[1].to_string();
        if annotator_id.is_empty() || item_id.is_empty() {
            return Err(Error::validation(
                Some(line),
                "empty annotator_id or item_id",
            ));
        }
        match &record[2] {
            "frame" => {
                let r: Vec<Option<Likert>> = (3..=7)
                    .map(|c| rating(&record, c, line))
                    .collect::<Result<_>>()?;
                frames.push(FrameAnnotation {
                    annotator_id,
                    item_id,
                    expression: required(r[0], 3, line)?,
                    activity: required(r[1], 4, line)?,
                    hand: required(r[2], 5, line)?,
                    head: required(r[3], 6, line)?,
                    overall: required(r[4], 7, line)?,
                });
            }
            "audio" => {
                let speech = required(rating(&record, 8, line)?, 8, line)?;
                audio.push(AudioAnnotation {
                    annotator_id,
                    item_id,
                    speech,
                });
            }
            other => {
                return Err(Error::validation(
                    Some(line),
                    format!("item_type `{other}` is neither frame nor audio"),
                ))
            }
        }
    }
    AnnotationSet::new(frames, audio)
}
