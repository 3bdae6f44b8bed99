use serde::{Deserialize, Serialize};

use super::EvalError;

/// Two-class confusion tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl ConfusionCounts {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        Self { tp, fn_, fp, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    /// Tallies a binary outcome list; `true` is the positive class.
    pub fn from_binary(truth: &[bool], predicted: &[bool]) -> Result<Self, EvalError> {
        if truth.len() != predicted.len() {
            return Err(EvalError::LengthMismatch(truth.len(), predicted.len()));
        }
        let mut c = Self::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t, p) {
                (true, true) => c.tp += 1,
                (true, false) => c.fn_ += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    /// TP/(TP+FN); `None` when there are no positives.
    pub fn tpr_checked(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// FP/(FP+TN); `None` when there are no negatives.
    pub fn fpr_checked(&self) -> Option<f64> {
        ratio(self.fp, self.fp + self.tn)
    }

    /// TN/(TN+FP); `None` when there are no negatives.
    pub fn tnr_checked(&self) -> Option<f64> {
        ratio(self.tn, self.tn + self.fp)
    }

    /// FN/(FN+TP); `None` when there are no positives.
    pub fn fnr_checked(&self) -> Option<f64> {
        ratio(self.fn_, self.fn_ + self.tp)
    }

    /// (TP+TN)/total; `None` for an empty table.
    pub fn accuracy_checked(&self) -> Option<f64> {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn tpr(&self) -> f64 {
        self.tpr_checked().unwrap_or(0.0)
    }

    pub fn fpr(&self) -> f64 {
        self.fpr_checked().unwrap_or(0.0)
    }

    pub fn tnr(&self) -> f64 {
        self.tnr_checked().unwrap_or(0.0)
    }

    pub fn fnr(&self) -> f64 {
        self.fnr_checked().unwrap_or(0.0)
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy_checked().unwrap_or(0.0)
    }

    /// All five rates, with degenerate ones reported as 0 and named in `degenerate`.
    pub fn rates(&self) -> Rates {
        let mut degenerate = Vec::new();
        let mut take = |name: &str, v: Option<f64>| {
            v.unwrap_or_else(|| {
                degenerate.push(name.to_string());
                0.0
            })
        };
        let tpr = take("tpr", self.tpr_checked());
        let fpr = take("fpr", self.fpr_checked());
        let tnr = take("tnr", self.tnr_checked());
        let fnr = take("fnr", self.fnr_checked());
        let accuracy = take("accuracy", self.accuracy_checked());
        Rates {
            tpr,
            fpr,
            tnr,
            fnr,
            accuracy,
            degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tpr: f64,
    pub fpr: f64,
    pub tnr: f64,
    pub fnr: f64,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub degenerate: Vec<String>,
}

/// The five metric names in report order.
pub const METRIC_NAMES: [&str; 5] = ["tpr", "fpr", "tnr", "fnr", "accuracy"];

impl Rates {
    pub fn get(&self, metric: &str) -> Option<f64> {
        match metric {
            "tpr" => Some(self.tpr),
            "fpr" => Some(self.fpr),
            "tnr" => Some(self.tnr),
            "fnr" => Some(self.fnr),
            "accuracy" => Some(self.accuracy),
            _ => None,
        }
    }

    fn from_values(v: [f64; 5]) -> Self {
        Rates {
            tpr: v[0],
            fpr: v[1],
            tnr: v[2],
            fnr: v[3],
            accuracy: v[4],
            degenerate: Vec::new(),
        }
    }

    fn values(&self) -> [f64; 5] {
        [self.tpr, self.fpr, self.tnr, self.fnr, self.accuracy]
    }
}

/// One-vs-rest counts for `target` over a multiclass outcome list.
pub fn confusion_per_class(
    truth: &[usize],
    predicted: &[usize],
    target: usize,
) -> Result<ConfusionCounts, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch(truth.len(), predicted.len()));
    }
    if truth.is_empty() {
        return Err(EvalError::Empty);
    }
    let t: Vec<bool> = truth.iter().map(|&c| c == target).collect();
    let p: Vec<bool> = predicted.iter().map(|&c| c == target).collect();
    ConfusionCounts::from_binary(&t, &p)
}

/// Pooled two-class counts: every class other than `negative` is positive.
pub fn pooled_confusion(
    truth: &[usize],
    predicted: &[usize],
    negative: usize,
) -> Result<ConfusionCounts, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch(truth.len(), predicted.len()));
    }
    let t: Vec<bool> = truth.iter().map(|&c| c != negative).collect();
    let p: Vec<bool> = predicted.iter().map(|&c| c != negative).collect();
    ConfusionCounts::from_binary(&t, &p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    /// Rows of this class in the truth list.
    pub support: u64,
    pub confusion: ConfusionCounts,
    pub rates: Rates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledMetrics {
    pub negative_class: String,
    pub confusion: ConfusionCounts,
    pub rates: Rates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub samples: u64,
    pub per_class: Vec<ClassMetrics>,
    /// Unweighted mean over classes present in the truth list.
    pub macro_avg: Rates,
    /// Support-weighted mean over the same classes.
    pub weighted_avg: Rates,
    pub averaged_over: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pooled: Option<PooledMetrics>,
}

/// Per-class one-vs-rest metrics with macro and weighted averages.
///
/// When `negative_class` is given, an attack-vs-normal style pooled table is
/// added with that class as the negative side.
pub fn macro_report(
    truth: &[usize],
    predicted: &[usize],
    class_names: &[String],
    negative_class: Option<usize>,
) -> Result<MetricsReport, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch(truth.len(), predicted.len()));
    }
    if truth.is_empty() {
        return Err(EvalError::Empty);
    }
    if let Some(&bad) = truth
        .iter()
        .chain(predicted)
        .find(|&&c| c >= class_names.len())
    {
        return Err(EvalError::UnknownClass(bad));
    }
    let per_class: Vec<ClassMetrics> = class_names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let confusion = confusion_per_class(truth, predicted, k)?;
            Ok(ClassMetrics {
                class: name.clone(),
                support: confusion.tp + confusion.fn_,
                confusion,
                rates: confusion.rates(),
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let present: Vec<&ClassMetrics> = per_class.iter().filter(|c| c.support > 0).collect();
    let total_support: u64 = present.iter().map(|c| c.support).sum();
    let mut macro_sum = [0.0; 5];
    let mut weighted_sum = [0.0; 5];
    for c in &present {
        let w = c.support as f64 / total_support as f64;
        for (i, v) in c.rates.values().into_iter().enumerate() {
            macro_sum[i] += v;
            weighted_sum[i] += w * v;
        }
    }
    let n_present = present.len() as f64;
    let pooled = negative_class
        .map(|neg| {
            let confusion = pooled_confusion(truth, predicted, neg)?;
            Ok::<_, EvalError>(PooledMetrics {
                negative_class: class_names[neg].clone(),
                confusion,
                rates: confusion.rates(),
            })
        })
        .transpose()?;
    Ok(MetricsReport {
        samples: truth.len() as u64,
        averaged_over: present.iter().map(|c| c.class.clone()).collect(),
        macro_avg: Rates::from_values(macro_sum.map(|s| s / n_present)),
        weighted_avg: Rates::from_values(weighted_sum),
        per_class,
        pooled,
    })
}

impl MetricsReport {
    /// Confusion tables as CSV: `class,tp,fn,fp,tn`.
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("class,tp,fn,fp,tn\n");
        for c in &self.per_class {
            let k = c.confusion;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.class, k.tp, k.fn_, k.fp, k.tn
            ));
        }
        if let Some(p) = &self.pooled {
            let k = p.confusion;
            out.push_str(&format!(
                "pooled_vs_{},{},{},{},{}\n",
                p.negative_class, k.tp, k.fn_, k.fp, k.tn
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_counted_confusion() {
        // A = 0, B = 1
        let c = confusion_per_class(&[0, 0, 1], &[0, 1, 1], 0).unwrap();
        assert_eq!(c, ConfusionCounts::new(1, 1, 0, 1));
        let absent = confusion_per_class(&[0, 1, 1], &[1, 0, 1], 4).unwrap();
        assert_eq!(absent, ConfusionCounts::new(0, 0, 0, 3));
        assert!(confusion_per_class(&[0], &[0, 1], 0).is_err());
    }

    #[test]
    fn perfect_predictions() {
        let truth = vec![0, 1, 2, 2, 1, 0, 3];
        for k in 0..4 {
            let c = confusion_per_class(&truth, &truth, k).unwrap();
            assert_eq!((c.fn_, c.fp), (0, 0));
        }
    }

    #[test]
    fn rate_arithmetic() {
        assert_relative_eq!(ConfusionCounts::new(90, 10, 0, 0).tpr(), 0.9);
        let c = ConfusionCounts::new(0, 0, 2, 98);
        assert_relative_eq!(c.fpr(), 0.02);
        assert_relative_eq!(c.tnr(), 0.98);
        assert_eq!(ConfusionCounts::new(50, 0, 0, 50).accuracy(), 1.0);
        let r = ConfusionCounts::new(0, 0, 3, 4).rates();
        assert_eq!(r.degenerate, vec!["tpr".to_string(), "fnr".to_string()]);
        assert_eq!(r.tpr, 0.0);
    }

    #[test]
    fn macro_average_of_two() {
        // class 0: 5/5 recalled, class 1: 4/5 recalled
        let truth = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let pred = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 0];
        let names = vec!["a".to_string(), "b".to_string()];
        let r = macro_report(&truth, &pred, &names, None).unwrap();
        assert_relative_eq!(r.macro_avg.tpr, 0.9);
        assert!(r.pooled.is_none());
    }

    #[test]
    fn single_class_truth() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let r = macro_report(&[2, 2, 2], &[2, 0, 2], &names, Some(0)).unwrap();
        assert_eq!(r.averaged_over, vec!["c".to_string()]);
        assert_eq!(r.macro_avg.tpr, r.per_class[2].rates.tpr);
        assert_eq!(r.macro_avg.accuracy, r.per_class[2].rates.accuracy);
        let pooled = r.pooled.unwrap();
        assert_eq!(pooled.confusion, ConfusionCounts::new(2, 1, 0, 0));
    }

    #[test]
    fn csv_has_pooled_row() {
        let names: Vec<String> = ["n", "x"].iter().map(|s| s.to_string()).collect();
        let r = macro_report(&[0, 1], &[0, 0], &names, Some(0)).unwrap();
        let csv = r.confusion_csv();
        assert!(csv.contains("\nn,1,0,1,0\n"));
        assert!(csv.ends_with("pooled_vs_n,0,1,0,1\n"));
    }
}
