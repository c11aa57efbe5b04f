//! Classification metrics and decision-surface export.
//!
//! Label 1 is the positive class.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitSpec, Theta};
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        Self { tp, fn_, fp, tn }
    }

    pub fn record(&mut self, predicted: u8, actual: u8) {
        match (predicted, actual) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fn_ += 1,
            (1, 0) => self.fp += 1,
            _ => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Rates derived from a confusion matrix; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub tpr: Option<f64>,
    pub tnr: Option<f64>,
    pub accuracy: Option<f64>,
    /// Mean of TPR and TNR.
    pub balanced_accuracy: Option<f64>,
}

pub fn rates(cm: &ConfusionMatrix) -> Rates {
    let tpr = ratio(cm.tp, cm.tp + cm.fn_);
    let tnr = ratio(cm.tn, cm.tn + cm.fp);
    Rates {
        tpr,
        tnr,
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        balanced_accuracy: tpr.zip(tnr).map(|(a, b)| 0.5 * (a + b)),
    }
}

/// Counts predictions against labels.
pub fn evaluate(spec: &CircuitSpec, theta: &Theta, ds: &Dataset) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    for p in ds.points() {
        cm.record(spec.classify(theta, &p.x)?, p.y);
    }
    Ok(cm)
}

/// Confusion matrix and rates together, as emitted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(flatten)]
    pub confusion: ConfusionMatrix,
    #[serde(flatten)]
    pub rates: Rates,
    pub threshold: f64,
}

impl Metrics {
    pub fn new(confusion: ConfusionMatrix, threshold: f64) -> Self {
        Self { confusion, rates: rates(&confusion), threshold }
    }
}

/// Threshold maximizing balanced accuracy of `p > b` over `ds`.
///
/// Candidates are midpoints between consecutive distinct probabilities
/// plus the ends of `[0, 1]`; ties keep the candidate closest to 0.5.
pub fn fit_threshold(spec: &CircuitSpec, theta: &Theta, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut scored: Vec<(f64, u8)> = ds
        .points()
        .iter()
        .map(|p| Ok((spec.forward(theta, &p.x)?, p.y)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut candidates = vec![0.0, 1.0];
    candidates.extend(scored.windows(2).filter(|w| w[0].0 < w[1].0).map(|w| 0.5 * (w[0].0 + w[1].0)));

    let score = |b: f64| {
        let mut cm = ConfusionMatrix::default();
        for &(p, y) in &scored {
            cm.record(u8::from(p > b), y);
        }
        let r = rates(&cm);
        r.balanced_accuracy.or(r.accuracy).unwrap_or(0.0)
    };
    let mut best = (0.5_f64, f64::NEG_INFINITY);
    for b in candidates {
        let s = score(b);
        if s > best.1 || (s == best.1 && (b - 0.5).abs() < (best.0 - 0.5).abs()) {
            best = (b, s);
        }
    }
    Ok(best.0)
}

/// Forward probabilities on a `resolution × resolution` grid over
/// `[0, 1]²`, row-major with rows indexed by `x₂` and columns by `x₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionGrid {
    pub resolution: usize,
    pub threshold: f64,
    pub values: Vec<f64>,
}

impl DecisionGrid {
    pub fn coordinate(&self, index: usize) -> f64 {
        index as f64 / (self.resolution - 1) as f64
    }

    /// Writes `x1,x2,p,label` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["x1", "x2", "p", "label"])?;
        for row in 0..self.resolution {
            for col in 0..self.resolution {
                let p = self.values[row * self.resolution + col];
                writer.write_record([
                    self.coordinate(col).to_string(),
                    self.coordinate(row).to_string(),
                    p.to_string(),
                    u8::from(p > self.threshold).to_string(),
                ])?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

pub fn decision_grid(spec: &CircuitSpec, theta: &Theta, resolution: usize) -> Result<DecisionGrid> {
    if resolution < 2 {
        return Err(Error::InvalidConfig(format!("grid resolution must be at least 2, got {resolution}")));
    }
    if spec.feature_dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: spec.feature_dim() });
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut values = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            values.push(spec.forward(theta, &[col as f64 * step, row as f64 * step])?);
        }
    }
    Ok(DecisionGrid { resolution, threshold: spec.threshold(), values })
}
