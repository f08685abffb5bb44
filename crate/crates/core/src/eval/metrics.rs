use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Counts with rows = actual class and columns = predicted class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(labels: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = labels.len();
        if counts.len() != n || counts.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "confusion matrix must be {n}x{n} to match its labels"
            )));
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn is_diagonal(&self) -> bool {
        self.counts
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &c)| i == j || c == 0))
    }
}

/// Tallies predictions against the truth over the listed classes.
pub fn confusion<L: PartialEq + Display>(
    pred: &[L],
    truth: &[L],
    classes: &[L],
) -> Result<ConfusionMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} truth labels",
            pred.len(),
            truth.len()
        )));
    }
    let index = |l: &L| {
        classes
            .iter()
            .position(|c| c == l)
            .ok_or_else(|| Error::Range(format!("label {l} is not one of the classes")))
    };
    let n = classes.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (p, t) in pred.iter().zip(truth) {
        counts[index(t)?][index(p)?] += 1;
    }
    ConfusionMatrix::from_counts(classes.iter().map(|c| c.to_string()).collect(), counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSuite {
    pub accuracy: f64,
    pub recall_weighted: f64,
    pub precision_weighted: f64,
    pub f1_weighted: f64,
    pub mcc: f64,
    pub kappa: f64,
    pub error: f64,
}

/// Accuracy, support-weighted precision/recall/F1, multiclass Matthews
/// correlation and Cohen's kappa.
///
/// Classes absent from both margins are ignored. A class that is never
/// predicted has precision 0. A perfect (diagonal) matrix has kappa and MCC
/// of 1; otherwise a vanishing denominator yields 0.
pub fn metric_suite(m: &ConfusionMatrix) -> Result<MetricSuite> {
    let total = m.total();
    if total == 0 {
        return Err(Error::Degenerate("confusion matrix has no counts".into()));
    }
    let n = m.counts.len();
    let row: Vec<f64> = m
        .counts
        .iter()
        .map(|r| r.iter().sum::<u64>() as f64)
        .collect();
    let col: Vec<f64> = (0..n)
        .map(|j| m.counts.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let live: Vec<usize> = (0..n).filter(|&k| row[k] > 0.0 || col[k] > 0.0).collect();

    let s = total as f64;
    let trace: f64 = live.iter().map(|&k| m.counts[k][k] as f64).sum();
    let accuracy = trace / s;

    let (mut precision, mut recall, mut f1) = (0.0, 0.0, 0.0);
    for &k in &live {
        let tp = m.counts[k][k] as f64;
        let p = if col[k] > 0.0 { tp / col[k] } else { 0.0 };
        let r = if row[k] > 0.0 { tp / row[k] } else { 0.0 };
        let f = if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        };
        let w = row[k] / s;
        precision += w * p;
        recall += w * r;
        f1 += w * f;
    }

    let perfect = m.is_diagonal();
    let expected: f64 = live.iter().map(|&k| row[k] * col[k]).sum::<f64>() / (s * s);
    let kappa = if perfect {
        1.0
    } else if 1.0 - expected == 0.0 {
        0.0
    } else {
        (accuracy - expected) / (1.0 - expected)
    };

    let sum_pt: f64 = live.iter().map(|&k| row[k] * col[k]).sum();
    let sum_p2: f64 = live.iter().map(|&k| col[k] * col[k]).sum();
    let sum_t2: f64 = live.iter().map(|&k| row[k] * row[k]).sum();
    let denom = ((s * s - sum_p2) * (s * s - sum_t2)).sqrt();
    let mcc = if perfect {
        1.0
    } else if denom == 0.0 {
        0.0
    } else {
        ((trace * s - sum_pt) / denom).clamp(-1.0, 1.0)
    };

    Ok(MetricSuite {
        accuracy,
        recall_weighted: recall,
        precision_weighted: precision,
        f1_weighted: f1,
        mcc,
        kappa,
        error: 1.0 - accuracy,
    })
}

/// Mean absolute difference between paired values.
pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::Shape(format!(
            "mae needs equal non-empty lengths, got {} and {}",
            pred.len(),
            truth.len()
        )));
    }
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum();
    Ok(sum / pred.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn matrix(counts: Vec<Vec<u64>>) -> ConfusionMatrix {
        let labels = (0..counts.len()).map(|i| i.to_string()).collect();
        ConfusionMatrix::from_counts(labels, counts).unwrap()
    }

    /// Brute-force reference: expand the matrix into label pairs and compute
    /// every metric from the pair list by counting.
    fn reference(m: &ConfusionMatrix) -> (f64, f64, f64, f64, f64, f64) {
        let n = m.counts.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                pairs.extend(std::iter::repeat_n((i, j), m.counts[i][j] as usize));
            }
        }
        let s = pairs.len() as f64;
        let count =
            |f: &dyn Fn(&(usize, usize)) -> bool| pairs.iter().filter(|p| f(p)).count() as f64;
        let acc = count(&|&(t, p)| t == p) / s;
        let (mut prec, mut rec, mut f1, mut pe) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            let tp = count(&|&(t, p)| t == k && p == k);
            let actual = count(&|&(t, _)| t == k);
            let predicted = count(&|&(_, p)| p == k);
            if actual == 0.0 && predicted == 0.0 {
                continue;
            }
            let pk = if predicted > 0.0 { tp / predicted } else { 0.0 };
            let rk = if actual > 0.0 { tp / actual } else { 0.0 };
            let fk = if pk + rk > 0.0 {
                2.0 * pk * rk / (pk + rk)
            } else {
                0.0
            };
            prec += actual / s * pk;
            rec += actual / s * rk;
            f1 += actual / s * fk;
            pe += actual / s * predicted / s;
        }
        let kappa = (acc - pe) / (1.0 - pe);
        // MCC via the covariance form over one-hot indicator vectors.
        let (mut cov_tp, mut cov_tt, mut cov_pp) = (0.0, 0.0, 0.0);
        for k in 0..n {
            let mt = count(&|&(t, _)| t == k) / s;
            let mp = count(&|&(_, p)| p == k) / s;
            for &(t, p) in &pairs {
                let (xt, xp) = ((t == k) as u8 as f64 - mt, (p == k) as u8 as f64 - mp);
                cov_tp += xt * xp;
                cov_tt += xt * xt;
                cov_pp += xp * xp;
            }
        }
        let mcc = cov_tp / (cov_tt * cov_pp).sqrt();
        (acc, prec, rec, f1, kappa, mcc)
    }

    #[test]
    fn reconstructed_expression_matrix() {
        let m = matrix(vec![vec![64, 4], vec![13, 19]]);
        let s = metric_suite(&m).unwrap();
        assert_abs_diff_eq!(s.accuracy, 0.830, epsilon = 1e-3);
        assert_abs_diff_eq!(s.precision_weighted, 0.829, epsilon = 1e-3);
        assert_abs_diff_eq!(s.f1_weighted, 0.821, epsilon = 1e-3);
        assert_abs_diff_eq!(s.mcc, 0.593, epsilon = 1e-3);
        assert_abs_diff_eq!(s.kappa, 0.578, epsilon = 1e-3);
        assert_abs_diff_eq!(s.error, 0.170, epsilon = 1e-3);
        let r = reference(&m);
        assert_abs_diff_eq!(s.precision_weighted, r.1, epsilon = 1e-12);
        assert_abs_diff_eq!(s.mcc, r.5, epsilon = 1e-12);
    }

    #[test]
    fn identity_and_chance() {
        let s = metric_suite(&matrix(vec![vec![50, 0], vec![0, 50]])).unwrap();
        assert_eq!((s.accuracy, s.kappa, s.mcc, s.error), (1.0, 1.0, 1.0, 0.0));
        let s = metric_suite(&matrix(vec![vec![25, 25], vec![25, 25]])).unwrap();
        assert_eq!((s.accuracy, s.kappa, s.mcc), (0.5, 0.0, 0.0));
    }

    #[test]
    fn empty_matrix_is_degenerate() {
        assert!(matches!(
            metric_suite(&matrix(vec![vec![0, 0], vec![0, 0]])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn unused_class_is_dropped() {
        let a = metric_suite(&matrix(vec![vec![10, 2, 0], vec![3, 5, 0], vec![0, 0, 0]])).unwrap();
        let b = metric_suite(&matrix(vec![vec![10, 2], vec![3, 5]])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn confusion_examples() {
        let truth = ["a", "b", "a", "b"];
        let m = confusion(&truth, &truth, &["a", "b"]).unwrap();
        assert_eq!(m.counts, vec![vec![2, 0], vec![0, 2]]);
        let m = confusion(&["hi"; 10], &["lo"; 10], &["lo", "hi"]).unwrap();
        assert_eq!(m.counts, vec![vec![0, 10], vec![0, 0]]);
        assert!(matches!(
            confusion(&["a"], &["a", "b"], &["a", "b"]),
            Err(Error::Shape(_))
        ));
        assert!(confusion(&["z"], &["a"], &["a", "b"]).is_err());
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mae(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 1.5);
        assert!(matches!(mae(&[1.0], &[]), Err(Error::Shape(_))));
    }

    fn any_matrix() -> impl Strategy<Value = ConfusionMatrix> {
        (2usize..5).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec(0u64..40, n), n)
                .prop_filter("needs counts", |c| c.iter().flatten().sum::<u64>() > 0)
                .prop_map(matrix)
        })
    }

    proptest! {
        #[test]
        fn suite_matches_brute_force(m in any_matrix()) {
            let s = metric_suite(&m).unwrap();
            let (acc, prec, rec, f1, kappa, mcc) = reference(&m);
            prop_assert_eq!(s.error, 1.0 - s.accuracy);
            prop_assert!((s.accuracy - acc).abs() < 1e-12);
            prop_assert!((s.recall_weighted - s.accuracy).abs() < 1e-12);
            prop_assert!((s.recall_weighted - rec).abs() < 1e-12);
            prop_assert!((s.precision_weighted - prec).abs() < 1e-12);
            prop_assert!((s.f1_weighted - f1).abs() < 1e-12);
            if !m.is_diagonal() && kappa.is_finite() {
                prop_assert!((s.kappa - kappa).abs() < 1e-9);
            }
            if !m.is_diagonal() && mcc.is_finite() {
                prop_assert!((s.mcc - mcc).abs() < 1e-9);
            }
            if !m.is_diagonal() {
                prop_assert!(s.kappa < 1.0 && s.mcc < 1.0);
            }
            prop_assert!((-1.0..=1.0).contains(&s.mcc));
            prop_assert!(s.kappa <= 1.0);
        }

        #[test]
        fn kappa_and_mcc_are_relabeling_invariant(m in any_matrix(), rot in 0usize..4) {
            let n = m.counts.len();
            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let mut counts = vec![vec![0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    counts[perm[i]][perm[j]] = m.counts[i][j];
                }
            }
            let a = metric_suite(&m).unwrap();
            let b = metric_suite(&matrix(counts)).unwrap();
            prop_assert!((a.kappa - b.kappa).abs() < 1e-12);
            prop_assert!((a.mcc - b.mcc).abs() < 1e-12);
        }

        #[test]
        fn perfect_iff_diagonal(diag in prop::collection::vec(0u64..30, 2..5)) {
            prop_assume!(diag.iter().sum::<u64>() > 0);
            let n = diag.len();
            let counts = (0..n).map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
            let s = metric_suite(&matrix(counts)).unwrap();
            prop_assert_eq!((s.kappa, s.mcc), (1.0, 1.0));
        }

        #[test]
        fn mae_properties(a in prop::collection::vec(-10.0f64..10.0, 1..20), shift in 0.0f64..5.0) {
            let b: Vec<f64> = a.iter().map(|x| x + shift).collect();
            prop_assert_eq!(mae(&a, &a).unwrap(), 0.0);
            prop_assert_eq!(mae(&a, &b).unwrap(), mae(&b, &a).unwrap());
            prop_assert!(mae(&a, &b).unwrap() >= 0.0);
        }
    }
}
