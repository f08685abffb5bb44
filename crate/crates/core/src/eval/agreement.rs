use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{binarize_likert, mae, prevailing_mode};
use crate::observation::{AnnotationField, AnnotationSet, Likert};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorError {
    pub annotator_id: String,
    pub mae: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LooAgreement {
    pub field: AnnotationField,
    pub per_annotator: Vec<AnnotatorError>,
    pub mean: f64,
}

/// The value an annotator's rating contributes on `field`'s comparison scale.
fn scale(field: AnnotationField, r: Likert) -> Result<u8> {
    if field == AnnotationField::Overall {
        Ok(r.get())
    } else {
        Ok(binarize_likert(r.get())? as u8)
    }
}

/// Leave-one-out agreement: each annotator in turn is scored against the
/// prevailing mode of the remaining annotators.
pub fn loo_agreement(ann: &AnnotationSet, field: AnnotationField) -> Result<LooAgreement> {
    let table = ann.ratings(field);
    let annotators: Vec<String> = table
        .values()
        .flat_map(|r| r.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if annotators.len() < 2 {
        return Err(Error::Coverage(format!(
            "leave-one-out on {field} needs at least 2 annotators, found {}",
            annotators.len()
        )));
    }

    // item -> per-annotator value, in annotator order
    let mut grid: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
    for (item, ratings) in &table {
        let mut row = Vec::with_capacity(annotators.len());
        for a in &annotators {
            let r = ratings.get(a).ok_or_else(|| {
                Error::Coverage(format!(
                    "annotator {a} has no {field} rating for item {item}"
                ))
            })?;
            row.push(scale(field, *r)?);
        }
        grid.insert(item, row);
    }

    let mut per_annotator = Vec::with_capacity(annotators.len());
    for (k, a) in annotators.iter().enumerate() {
        let mut own = Vec::with_capacity(grid.len());
        let mut consensus = Vec::with_capacity(grid.len());
        for row in grid.values() {
            let others: Vec<u8> = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &v)| v)
                .collect();
            own.push(row[k] as f64);
            consensus.push(prevailing_mode(&others)? as f64);
        }
        per_annotator.push(AnnotatorError {
            annotator_id: a.clone(),
            mae: mae(&own, &consensus)?,
        });
    }
    let mean = per_annotator.iter().map(|e| e.mae).sum::<f64>() / per_annotator.len() as f64;
    Ok(LooAgreement {
        field,
        per_annotator,
        mean,
    })
}
