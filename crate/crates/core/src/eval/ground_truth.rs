use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{binarize_likert, prevailing_mode, Quality};
use crate::observation::{AnnotationField, AnnotationSet, Likert};
use crate::{Error, Result};

/// Consensus labels for one frame item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameTruth {
    pub expression: Quality,
    pub activity: Quality,
    pub hand: Quality,
    pub head: Quality,
    /// Raw consensus level on the 1–4 scale.
    pub overall: Likert,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub frames: BTreeMap<String, FrameTruth>,
    pub audio: BTreeMap<String, Quality>,
}

impl GroundTruth {
    pub fn frame(&self, item: &str) -> Result<&FrameTruth> {
        self.frames
            .get(item)
            .ok_or_else(|| Error::Coverage(format!("frame item {item} has no ratings")))
    }

    /// Consensus value of `field` for `item`: 0/1 for the binary fields and
    /// the raw level for `overall`.
    pub fn value(&self, field: AnnotationField, item: &str) -> Result<f64> {
        if field.is_audio() {
            return self
                .audio
                .get(item)
                .map(|q| q.as_f64())
                .ok_or_else(|| Error::Coverage(format!("audio item {item} has no ratings")));
        }
        let t = self.frame(item)?;
        Ok(match field {
            AnnotationField::Expression => t.expression.as_f64(),
            AnnotationField::Activity => t.activity.as_f64(),
            AnnotationField::Hand => t.hand.as_f64(),
            AnnotationField::Head => t.head.as_f64(),
            AnnotationField::Overall => t.overall.get() as f64,
            AnnotationField::Speech => unreachable!(),
        })
    }

    pub fn items(&self, field: AnnotationField) -> Vec<String> {
        if field.is_audio() {
            self.audio.keys().cloned().collect()
        } else {
            self.frames.keys().cloned().collect()
        }
    }
}

fn binary_mode(ratings: &BTreeMap<String, Likert>) -> Result<Quality> {
    let labels: Vec<Quality> = ratings
        .values()
        .map(|r| binarize_likert(r.get()))
        .collect::<Result<_>>()?;
    prevailing_mode(&labels)
}

/// Per item and field: binarize every annotator's rating and take the
/// prevailing mode. The overall level is the mode of the raw ratings.
pub fn build_ground_truth(ann: &AnnotationSet) -> Result<GroundTruth> {
    let tables: BTreeMap<AnnotationField, BTreeMap<String, BTreeMap<String, Likert>>> =
        AnnotationField::ALL
            .iter()
            .map(|&f| (f, ann.ratings(f)))
            .collect();

    let mut frames = BTreeMap::new();
    for (item, overall) in &tables[&AnnotationField::Overall] {
        let field = |f: AnnotationField| -> Result<Quality> {
            let ratings = tables[&f]
                .get(item)
                .ok_or_else(|| Error::Coverage(format!("frame item {item} has no {f} ratings")))?;
            binary_mode(ratings)
        };
        let levels: Vec<Likert> = overall.values().copied().collect();
        frames.insert(
            item.clone(),
            FrameTruth {
                expression: field(AnnotationField::Expression)?,
                activity: field(AnnotationField::Activity)?,
                hand: field(AnnotationField::Hand)?,
                head: field(AnnotationField::Head)?,
                overall: prevailing_mode(&levels)
                    .map_err(|_| Error::Coverage(format!("frame item {item} has no ratings")))?,
            },
        );
    }

    let mut audio = BTreeMap::new();
    for (item, ratings) in &tables[&AnnotationField::Speech] {
        audio.insert(item.clone(), binary_mode(ratings)?);
    }
    Ok(GroundTruth { frames, audio })
}
