use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    build_ground_truth, compare_human_machine, confusion, loo_agreement, mae, metric_suite,
    ComparisonRow, ConfusionMatrix, LooAgreement, MachinePredictions, MetricSuite, Quality,
};
use crate::fusion::FrameScore;
use crate::observation::{AnnotationField, AnnotationSet};
use crate::{Error, Result};

/// Item id → frame index of the machine report.
pub type Alignment = BTreeMap<String, u64>;

/// Parses `items.csv` with header `item_id,frame_idx`.
pub fn parse_alignment(text: &str) -> Result<Alignment> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(["item_id", "frame_idx"]) {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `item_id,frame_idx`".into(),
        });
    }
    let mut out = Alignment::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let idx = record[1].parse::<u64>().map_err(|_| Error::Parse {
            line,
            message: format!("frame_idx `{}` is not an integer", &record[1]),
        })?;
        if out.insert(record[0].to_string(), idx).is_some() {
            return Err(Error::Duplicate(format!(
                "line {line}: item {}",
                &record[0]
            )));
        }
    }
    Ok(out)
}

impl MachinePredictions {
    /// Looks up the machine frame for every annotated item. Without an
    /// alignment the item id itself is read as a frame index. Audio items
    /// take the speech sub-score of their frame.
    pub fn align(
        frames: &[FrameScore],
        ann: &AnnotationSet,
        alignment: Option<&Alignment>,
    ) -> Result<Self> {
        let by_idx: BTreeMap<u64, &FrameScore> = frames.iter().map(|f| (f.frame_idx, f)).collect();
        let lookup = |item: &str| -> Option<FrameScore> {
            let idx = match alignment {
                Some(a) => *a.get(item)?,
                None => item.parse().ok()?,
            };
            by_idx.get(&idx).map(|f| **f)
        };

        let mut out = MachinePredictions::default();
        let mut unmatched = Vec::new();
        for item in ann.ratings(AnnotationField::Overall).into_keys() {
            match lookup(&item) {
                Some(f) => {
                    out.frames.insert(item, f);
                }
                None => unmatched.push(item),
            }
        }
        for item in ann.ratings(AnnotationField::Speech).into_keys() {
            match lookup(&item) {
                Some(f) => {
                    out.audio.insert(item, f.parts.speech);
                }
                None => unmatched.push(item),
            }
        }
        if !unmatched.is_empty() {
            return Err(Error::Coverage(format!(
                "annotated items without a machine frame: {}",
                unmatched.join(", ")
            )));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldEvaluation {
    pub field: AnnotationField,
    pub items: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricSuite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub alpha: f64,
    pub fields: Vec<FieldEvaluation>,
    /// MAE of the mapped machine total against the consensus overall level.
    pub overall_mae: Option<f64>,
    pub loo: Vec<LooAgreement>,
    pub comparison: Vec<ComparisonRow>,
}

const BINARY_CLASSES: [Quality; 2] = [Quality::High, Quality::Low];
const LEVELS: [u8; 4] = [1, 2, 3, 4];

/// Runs the full protocol for a machine report against an annotation set.
pub fn evaluate(
    frames: &[FrameScore],
    ann: &AnnotationSet,
    alignment: Option<&Alignment>,
    alpha: f64,
) -> Result<Evaluation> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Range(format!("alpha {alpha} outside [0, 1]")));
    }
    let gt = build_ground_truth(ann)?;
    let machine = MachinePredictions::align(frames, ann, alignment)?;

    let mut fields = Vec::new();
    let mut overall_mae = None;
    for field in AnnotationField::ALL {
        let items = gt.items(field);
        if items.is_empty() {
            continue;
        }
        let pred: Vec<f64> = items
            .iter()
            .map(|i| machine.value(field, i))
            .collect::<Result<_>>()?;
        let truth: Vec<f64> = items
            .iter()
            .map(|i| gt.value(field, i))
            .collect::<Result<_>>()?;
        let confusion = if field == AnnotationField::Overall {
            overall_mae = Some(mae(&pred, &truth)?);
            let level = |v: &f64| *v as u8;
            confusion(
                &pred.iter().map(level).collect::<Vec<_>>(),
                &truth.iter().map(level).collect::<Vec<_>>(),
                &LEVELS,
            )?
        } else {
            let q = |v: &f64| Quality::from_score(*v as u8);
            confusion(
                &pred.iter().map(q).collect::<Vec<_>>(),
                &truth.iter().map(q).collect::<Vec<_>>(),
                &BINARY_CLASSES,
            )?
        };
        let metrics = metric_suite(&confusion)?;
        fields.push(FieldEvaluation {
            field,
            items: items.len(),
            confusion,
            metrics,
        });
    }

    let mut loo = Vec::new();
    for field in AnnotationField::ALL {
        match loo_agreement(ann, field) {
            Ok(a) => loo.push(a),
            // Too few annotators, or incomplete coverage for this field.
            Err(Error::Coverage(_)) => {}
            Err(e) => return Err(e),
        }
    }

    let comparison = compare_human_machine(&machine, ann, &gt, alpha)?;
    Ok(Evaluation {
        alpha,
        fields,
        overall_mae,
        loo,
        comparison,
    })
}

/// Plain-text summary of an evaluation.
pub fn render_evaluation_text(e: &Evaluation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Accuracy metrics (machine vs consensus)");
    let _ = writeln!(
        s,
        "{:<11} {:>5} {:>8} {:>8} {:>9} {:>8} {:>7} {:>7} {:>6}",
        "field", "items", "accuracy", "recall", "precision", "f1", "mcc", "kappa", "error"
    );
    for f in &e.fields {
        let m = &f.metrics;
        let _ = writeln!(
            s,
            "{:<11} {:>5} {:>8.3} {:>8.3} {:>9.3} {:>8.3} {:>7.3} {:>7.3} {:>6.3}",
            f.field.name(),
            f.items,
            m.accuracy,
            m.recall_weighted,
            m.precision_weighted,
            m.f1_weighted,
            m.mcc,
            m.kappa,
            m.error
        );
    }
    if let Some(v) = e.overall_mae {
        let _ = writeln!(s, "\nOverall score MAE: {v:.3}");
    }
    if !e.loo.is_empty() {
        let _ = writeln!(s, "\nLeave-one-out annotator agreement (mean MAE)");
        for l in &e.loo {
            let _ = writeln!(s, "{:<11} {:.3}", l.field.name(), l.mean);
        }
    }
    let _ = writeln!(s, "\nHuman vs machine (alpha = {})", e.alpha);
    let _ = writeln!(
        s,
        "{:<11} {:>15} {:>15} {:>9} {:>3} {:>8} {:>8}",
        "field", "human mae (sd)", "machine mae (sd)", "chi2", "dof", "p", "p_adj"
    );
    for r in &e.comparison {
        let _ = writeln!(
            s,
            "{:<11} {:>6.2} ({:>6.3}) {:>6.2} ({:>6.3}) {:>9.3} {:>3} {:>8.3} {:>7.3}{}",
            r.modality.name(),
            r.human_mae_mean,
            r.human_mae_sd,
            r.machine_mae_mean,
            r.machine_mae_sd,
            r.chi2_stat,
            r.dof,
            r.p_raw,
            r.p_adjusted,
            if r.significant { "*" } else { " " }
        );
    }
    s
}
