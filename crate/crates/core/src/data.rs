//! Labeled datasets: circle-boundary generation, CSV persistence, splitting.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_dim: usize,
    points: Vec<LabeledPoint>,
}

impl Dataset {
    pub fn new(feature_dim: usize, points: Vec<LabeledPoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if p.x.len() != feature_dim {
                return Err(Error::DimensionMismatch { expected: feature_dim, found: p.x.len() });
            }
            if p.y > 1 {
                return Err(Error::InvalidConfig(format!("point {i} has label {}", p.y)));
            }
            if p.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("point {i} has a non-finite feature")));
            }
        }
        Ok(Self { feature_dim, points })
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points labeled 1.
    pub fn positives(&self) -> usize {
        self.points.iter().filter(|p| p.y == 1).count()
    }
}

/// Circular class boundary in the unit square; inside is class 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Default for Circle {
    fn default() -> Self {
        Self { center: [0.2, 0.6], radius: 0.32 }
    }
}

impl Circle {
    /// 0 strictly inside, 1 on or outside the boundary.
    pub fn label(&self, x: &[f64]) -> u8 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        u8::from(dx * dx + dy * dy >= self.radius * self.radius)
    }
}

/// `n` points uniform on `[0, 1]²`, labeled by `circle`.
pub fn gen_circle(n: usize, circle: Circle, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if circle.radius.is_nan() || circle.radius <= 0.0 {
        return Err(Error::InvalidConfig(format!("radius must be positive, got {}", circle.radius)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x = vec![rng.random::<f64>(), rng.random::<f64>()];
            let y = circle.label(&x);
            LabeledPoint { x, y }
        })
        .collect();
    Dataset::new(2, points)
}

/// Writes `x1,…,xD,y` rows. Values use the shortest decimal form that
/// parses back to the same `f64`.
pub fn write_csv<W: Write>(ds: &Dataset, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=ds.feature_dim).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    writer.write_record(&header)?;
    for p in &ds.points {
        let mut row: Vec<String> = p.x.iter().map(f64::to_string).collect();
        row.push(p.y.to_string());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyDataset);
    }
    if header.len() < 2 || &header[header.len() - 1] != "y" {
        return Err(Error::MalformedRow { line: 1, message: "header must be x1,...,xD,y".into() });
    }
    let feature_dim = header.len() - 1;
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::MalformedRow { line, message };
        let mut x = Vec::with_capacity(feature_dim);
        for field in record.iter().take(feature_dim) {
            let v: f64 = field.trim().parse().map_err(|_| bad(format!("invalid number {field:?}")))?;
            if !v.is_finite() {
                return Err(bad(format!("non-finite feature {field:?}")));
            }
            x.push(v);
        }
        let y = match record[feature_dim].trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(bad(format!("label {other:?} is not 0 or 1"))),
        };
        points.push(LabeledPoint { x, y });
    }
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::new(feature_dim, points)
}

pub fn save_csv(ds: &Dataset, path: &Path) -> Result<()> {
    write_csv(ds, File::create(path)?)
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    read_csv(File::open(path)?)
}

/// Shuffles with `seed` and returns the first `n_train` points and the rest.
pub fn split(ds: &Dataset, n_train: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if n_train > ds.len() {
        return Err(Error::InvalidConfig(format!(
            "cannot take {n_train} training points from {}",
            ds.len()
        )));
    }
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |idx: &[usize]| idx.iter().map(|&i| ds.points[i].clone()).collect::<Vec<_>>();
    Ok((
        Dataset { feature_dim: ds.feature_dim, points: pick(&order[..n_train]) },
        Dataset { feature_dim: ds.feature_dim, points: pick(&order[n_train..]) },
    ))
}
