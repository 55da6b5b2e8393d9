use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::SeverityError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub threshold: f64,
    pub confusion: Confusion,
    pub accuracy: f64,
    pub severe: ClassMetrics,
    pub non_severe: ClassMetrics,
    pub macro_avg: ClassMetrics,
    pub auc: f64,
    pub roc: Vec<RocPoint>,
}

impl EvalReport {
    pub fn from_confusion(confusion: Confusion, threshold: f64, auc: f64, roc: Vec<RocPoint>) -> Self {
        let Confusion { tp, fp, tn, fn_ } = confusion;
        let sp = ratio(tp, tp + fp);
        let sr = ratio(tp, tp + fn_);
        let np = ratio(tn, tn + fn_);
        let nr = ratio(tn, tn + fp);
        let severe = ClassMetrics {
            precision: sp,
            recall: sr,
            f1: f1(sp, sr),
            support: tp + fn_,
        };
        let non_severe = ClassMetrics {
            precision: np,
            recall: nr,
            f1: f1(np, nr),
            support: tn + fp,
        };
        let macro_avg = ClassMetrics {
            precision: (sp + np) / 2.0,
            recall: (sr + nr) / 2.0,
            f1: (severe.f1 + non_severe.f1) / 2.0,
            support: confusion.total(),
        };
        Self {
            threshold,
            confusion,
            accuracy: confusion.accuracy(),
            severe,
            non_severe,
            macro_avg,
            auc,
            roc,
        }
    }

    /// Classification report laid out like a scikit-learn summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "LOGISTIC REGRESSION CLASSIFICATION REPORT (threshold {})", self.threshold);
        let _ = writeln!(out, "{:<12}{:>10}{:>10}{:>10}{:>10}", "Class", "Precision", "Recall", "F1-score", "Support");
        let row = |out: &mut String, name: &str, m: &ClassMetrics| {
            let _ = writeln!(
                out,
                "{:<12}{:>10.2}{:>10.2}{:>10.2}{:>10}",
                name, m.precision, m.recall, m.f1, m.support
            );
        };
        row(&mut out, "Non-Severe", &self.non_severe);
        row(&mut out, "Severe", &self.severe);
        let _ = writeln!(out, "{:<12}{:>10}{:>10}{:>10.3}{:>10}", "Accuracy", "-", "-", self.accuracy, self.confusion.total());
        row(&mut out, "Macro-avg", &self.macro_avg);
        let _ = writeln!(out, "AUC-ROC     {:.3}", self.auc);
        let c = &self.confusion;
        let _ = writeln!(out, "Confusion   TP={} FP={} TN={} FN={}", c.tp, c.fp, c.tn, c.fn_);
        out
    }

    pub fn roc_csv(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for p in &self.roc {
            let _ = writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr);
        }
        out
    }
}

fn class_counts(labels: &[bool]) -> (usize, usize) {
    let pos = labels.iter().filter(|&&l| l).count();
    (pos, labels.len() - pos)
}

/// AUC as the Mann–Whitney rank statistic, ties receiving average ranks.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64, SeverityError> {
    if scores.len() != labels.len() {
        return Err(SeverityError::DimensionMismatch {
            expected: scores.len(),
            got: labels.len(),
        });
    }
    let (n_pos, n_neg) = class_counts(labels);
    if n_pos == 0 || n_neg == 0 {
        return Err(SeverityError::SingleClass("AUC needs both classes"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let avg_rank = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            if labels[k] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    let (np, nn) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn))
}

/// ROC points from sweeping the threshold over every distinct score, from
/// (0, 0) to (1, 1).
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<RocPoint>, SeverityError> {
    let (n_pos, n_neg) = class_counts(labels);
    if n_pos == 0 || n_neg == 0 {
        return Err(SeverityError::SingleClass("ROC needs both classes"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: s,
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
        });
    }
    Ok(points)
}

/// Scores at or above `threshold` are predicted severe.
pub fn evaluate(scores: &[f64], labels: &[bool], threshold: f64) -> Result<EvalReport, SeverityError> {
    if scores.is_empty() {
        return Err(SeverityError::EmptyInput("empty test set"));
    }
    let auc = roc_auc(scores, labels)?;
    let roc = roc_curve(scores, labels)?;
    let predicted: Vec<bool> = scores.iter().map(|&s| s >= threshold).collect();
    Ok(EvalReport::from_confusion(
        Confusion::from_predictions(&predicted, labels),
        threshold,
        auc,
        roc,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn direct_counts() {
        let c = Confusion { tp: 2, fp: 1, fn_: 1, tn: 6 };
        let r = EvalReport::from_confusion(c, 0.5, 0.5, vec![]);
        assert_relative_eq!(r.accuracy, 0.8);
        assert_relative_eq!(r.severe.precision, 2.0 / 3.0);
        assert_relative_eq!(r.severe.recall, 2.0 / 3.0);
        assert_eq!(r.severe.support, 3);
        assert_eq!(r.non_severe.support, 7);
    }

    #[test]
    fn perfect_and_tied_auc() {
        assert_eq!(roc_auc(&[0.9, 0.1], &[true, false]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.3; 6], &[true, false, true, false, false, true]).unwrap(), 0.5);
        assert!(roc_auc(&[0.1, 0.2], &[true, true]).is_err());
    }

    #[test]
    fn six_pairs_match_enumeration() {
        let scores = [0.8, 0.4, 0.4, 0.6, 0.1, 0.6];
        let labels = [true, false, true, false, false, true];
        // positives {0.8, 0.4, 0.6}, negatives {0.4, 0.6, 0.1}:
        // 0.8 beats all 3; 0.4 ties 0.4, beats 0.1 -> 1.5; 0.6 beats 0.4 and 0.1, ties 0.6 -> 2.5
        assert_relative_eq!(roc_auc(&scores, &labels).unwrap(), 7.0 / 9.0, max_relative = 1e-15);
    }

    #[test]
    fn roc_endpoints() {
        let roc = roc_curve(&[0.9, 0.2, 0.5, 0.5], &[true, false, false, true]).unwrap();
        assert_eq!((roc[0].fpr, roc[0].tpr), (0.0, 0.0));
        let last = roc.last().unwrap();
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        assert_eq!(roc.len(), 4);
    }

    #[test]
    fn identity_holds() {
        let r = evaluate(&[0.9, 0.6, 0.4, 0.2, 0.7], &[true, false, true, false, false], 0.5).unwrap();
        let c = r.confusion;
        assert_eq!(c.total(), 5);
        assert_eq!(r.accuracy, (c.tp + c.tn) as f64 / 5.0);
    }
}
