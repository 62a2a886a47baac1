use serde::{Deserialize, Serialize};

use super::ScoreRecord;
use crate::error::{Error, Result};
use crate::scoring::Label;

/// Confusion counts and derived detection metrics, with `Fake` as the
/// positive class. A metric whose denominator is zero is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl EvalSummary {
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        let accuracy = ratio(tp + tn, tp + fp + tn + fn_);
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            _ => None,
        };
        EvalSummary {
            tp,
            fp,
            tn,
            fn_,
            accuracy,
            precision,
            recall,
            f1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Confusion matrix of verdicts against ground truth.
pub fn detection_metrics(records: &[ScoreRecord]) -> Result<EvalSummary> {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for r in records {
        let truth = r.truth.ok_or_else(|| Error::UnlabeledRecord(r.path.clone()))?;
        match (truth, r.verdict) {
            (Label::Fake, Label::Fake) => tp += 1,
            (Label::Real, Label::Fake) => fp += 1,
            (Label::Real, Label::Real) => tn += 1,
            (Label::Fake, Label::Real) => fn_ += 1,
        }
    }
    Ok(EvalSummary::from_counts(tp, fp, tn, fn_))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let s = EvalSummary::from_counts(10, 0, 10, 0);
        assert_eq!(s.accuracy, Some(1.0));
        assert_eq!(s.precision, Some(1.0));
        assert_eq!(s.recall, Some(1.0));
        assert_eq!(s.f1, Some(1.0));
    }

    #[test]
    fn all_predicted_real() {
        let s = EvalSummary::from_counts(0, 0, 50, 50);
        assert_eq!(s.accuracy, Some(0.5));
        assert_eq!(s.recall, Some(0.0));
        assert_eq!(s.precision, None);
        assert_eq!(s.f1, None);
    }

    #[test]
    fn sdm_shaped_confusion() {
        // 500 fakes with 355 caught, 500 reals with 95 false alarms
        let s = EvalSummary::from_counts(355, 95, 405, 145);
        assert!((s.accuracy.unwrap() - 0.76).abs() < 1e-12);
        assert!((s.recall.unwrap() - 0.71).abs() < 1e-12);
        assert!((s.precision.unwrap() - 355.0 / 450.0).abs() < 1e-12);
    }

    #[test]
    fn empty_is_undefined() {
        let s = EvalSummary::from_counts(0, 0, 0, 0);
        assert_eq!(s.accuracy, None);
        assert_eq!(s.total(), 0);
    }

    #[test]
    fn json_uses_fn_key_and_null() {
        let s = EvalSummary::from_counts(0, 0, 3, 0);
        let j = serde_json::to_value(s).unwrap();
        assert_eq!(j["fn"], 0);
        assert!(j["precision"].is_null());
    }
}
