//! Evaluation against multi-annotator ground truth: Likert binarization,
//! prevailing-mode consensus, confusion matrices and the metric suite,
//! leave-one-out annotator agreement, and a chi-square comparison of human
//! and machine errors with Holm-Bonferroni correction.

mod agreement;
mod compare;
mod evaluation;
mod ground_truth;
mod metrics;
pub mod stats;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use agreement::{loo_agreement, AnnotatorError, LooAgreement};
pub use compare::{compare_human_machine, map_machine_overall, ComparisonRow, MachinePredictions};
pub use evaluation::{
    evaluate, parse_alignment, render_evaluation_text, Alignment, Evaluation, FieldEvaluation,
};
pub use ground_truth::{build_ground_truth, FrameTruth, GroundTruth};
pub use metrics::{confusion, mae, metric_suite, ConfusionMatrix, MetricSuite};
pub use stats::{chi_square_independence, holm_bonferroni, ChiSquare, HolmResult};

use crate::{Error, Result};

/// Binarized lecture quality. `Low` orders before `High`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quality {
    Low,
    High,
}

impl Quality {
    pub fn from_score(bit: u8) -> Self {
        if bit > 0 {
            Quality::High
        } else {
            Quality::Low
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Quality::Low => 0.0,
            Quality::High => 1.0,
        }
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quality::Low => "Low",
            Quality::High => "High",
        })
    }
}

/// Ratings 1 and 2 are low quality, 3 and 4 high.
pub fn binarize_likert(rating: u8) -> Result<Quality> {
    match rating {
        1 | 2 => Ok(Quality::Low),
        3 | 4 => Ok(Quality::High),
        other => Err(Error::Range(format!("Likert rating {other} not in 1..=4"))),
    }
}

/// Most frequent value; ties go to the smallest (lowest-quality) value.
pub fn prevailing_mode<T: Ord + Clone>(values: &[T]) -> Result<T> {
    let mut counts: BTreeMap<&T, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    // Ascending key order plus a strict comparison keeps the smallest on ties.
    let mut best: Option<(&T, usize)> = None;
    for (v, n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((v, n));
        }
    }
    best.map(|(v, _)| v.clone())
        .ok_or_else(|| Error::EmptyInput("prevailing mode of no values".into()))
}
