use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{binarize_likert, chi_square_independence, holm_bonferroni, GroundTruth};
use crate::fusion::FrameScore;
use crate::observation::{AnnotationField, AnnotationSet};
use crate::{Error, Result};

/// Machine output keyed by annotation item id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MachinePredictions {
    pub frames: BTreeMap<String, FrameScore>,
    /// Speech sub-score per audio item.
    pub audio: BTreeMap<String, u8>,
}

impl MachinePredictions {
    /// Machine value of `field` on the comparison scale: 0/1 for binary
    /// fields, 1–4 for `overall`.
    pub fn value(&self, field: AnnotationField, item: &str) -> Result<f64> {
        if field.is_audio() {
            return self.audio.get(item).map(|&b| b as f64).ok_or_else(|| {
                Error::Coverage(format!("no machine output for audio item {item}"))
            });
        }
        let f = self
            .frames
            .get(item)
            .ok_or_else(|| Error::Coverage(format!("no machine output for frame item {item}")))?;
        let p = &f.parts;
        Ok(match field {
            AnnotationField::Expression => p.expression as f64,
            AnnotationField::Activity => p.activity as f64,
            AnnotationField::Hand => p.hand as f64,
            AnnotationField::Head => p.pose as f64,
            AnnotationField::Overall => map_machine_overall(f.total) as f64,
            AnnotationField::Speech => unreachable!(),
        })
    }
}

/// Maps the 0–5 frame total onto the 1–4 annotation scale.
pub fn map_machine_overall(total: u8) -> u8 {
    match total {
        0 => 1,
        1 | 2 => 2,
        3 | 4 => 3,
        _ => 4,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub modality: AnnotationField,
    pub human_mae_mean: f64,
    pub human_mae_sd: f64,
    pub machine_mae_mean: f64,
    pub machine_mae_sd: f64,
    pub chi2_stat: f64,
    pub dof: usize,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub significant: bool,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn human_value(field: AnnotationField, rating: u8) -> Result<f64> {
    if field == AnnotationField::Overall {
        Ok(rating as f64)
    } else {
        Ok(binarize_likert(rating)?.as_f64())
    }
}

/// Tests independence of group (human, machine) and error value.
fn error_independence(human: &[f64], machine: &[f64]) -> Result<(f64, usize, f64)> {
    // Errors are differences of small integers, so keying on the rounded
    // value is exact.
    let key = |e: f64| e.round() as i64;
    let values: BTreeSet<i64> = human.iter().chain(machine).map(|&e| key(e)).collect();
    if values.len() < 2 {
        return Ok((0.0, 0, 1.0));
    }
    let row = |errs: &[f64]| -> Vec<u64> {
        values
            .iter()
            .map(|v| errs.iter().filter(|&&e| key(e) == *v).count() as u64)
            .collect()
    };
    let r = chi_square_independence(&[row(human), row(machine)])?;
    Ok((r.stat, r.dof, r.p))
}

/// Compares human and machine absolute errors against the consensus for
/// every field that has ground-truth items, with Holm-Bonferroni
/// correction across the resulting tests.
pub fn compare_human_machine(
    machine: &MachinePredictions,
    ann: &AnnotationSet,
    gt: &GroundTruth,
    alpha: f64,
) -> Result<Vec<ComparisonRow>> {
    let mut partial = Vec::new();
    for field in AnnotationField::ALL {
        let items = gt.items(field);
        if items.is_empty() {
            continue;
        }
        let ratings = ann.ratings(field);
        let mut human = Vec::new();
        let mut mach = Vec::with_capacity(items.len());
        for item in &items {
            let truth = gt.value(field, item)?;
            mach.push((machine.value(field, item)? - truth).abs());
            let rs = ratings
                .get(item)
                .ok_or_else(|| Error::Coverage(format!("item {item} has no {field} ratings")))?;
            for r in rs.values() {
                human.push((human_value(field, r.get())? - truth).abs());
            }
        }
        let (hm, hs) = mean_sd(&human);
        let (mm, ms) = mean_sd(&mach);
        let (stat, dof, p) = error_independence(&human, &mach)?;
        partial.push(ComparisonRow {
            modality: field,
            human_mae_mean: hm,
            human_mae_sd: hs,
            machine_mae_mean: mm,
            machine_mae_sd: ms,
            chi2_stat: stat,
            dof,
            p_raw: p,
            p_adjusted: p,
            significant: false,
        });
    }
    let raw: Vec<f64> = partial.iter().map(|r| r.p_raw).collect();
    let holm = holm_bonferroni(&raw, alpha)?;
    for (row, (adj, rej)) in partial
        .iter_mut()
        .zip(holm.adjusted.into_iter().zip(holm.reject))
    {
        row.p_adjusted = adj;
        row.significant = rej;
    }
    Ok(partial)
}
