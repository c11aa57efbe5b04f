#![allow(dead_code)]

use std::path::PathBuf;

use boson_reupload::fock::ModeUnitary;
use boson_reupload::{CircuitSpec, TrainConfig};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Random 2×2 unitary `e^{iα}[[a, −b̄e^{iφ}], [b, āe^{iφ}]]` with `(a, b)`
/// uniform on the unit sphere.
pub fn random_mode_unitary<R: Rng>(rng: &mut R) -> ModeUnitary {
    let mut g = || rng.sample::<f64, _>(StandardNormal);
    let (ar, ai, br, bi) = (g(), g(), g(), g());
    let norm = (ar * ar + ai * ai + br * br + bi * bi).sqrt();
    let a = Complex64::new(ar, ai) / norm;
    let b = Complex64::new(br, bi) / norm;
    let alpha = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let phi = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    ModeUnitary::new([
        [alpha * a, -alpha * b.conj() * phi],
        [alpha * b, alpha * a.conj() * phi],
    ])
    .expect("constructed unitary")
}

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Circuit and training settings from the checked-in `paper.json`.
pub fn paper_config() -> (CircuitSpec, TrainConfig) {
    let text = std::fs::read_to_string(repo_root().join("paper.json")).expect("paper.json readable");
    let doc: serde_json::Value = serde_json::from_str(&text).expect("paper.json is JSON");
    let spec = serde_json::from_value(doc["circuit"].clone()).expect("circuit section");
    let config = serde_json::from_value(doc["train"].clone()).expect("train section");
    (spec, config)
}

pub fn random_theta<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-7.0..7.0)).collect()
}

pub fn random_x<R: Rng>(rng: &mut R) -> Vec<f64> {
    vec![rng.random::<f64>(), rng.random::<f64>()]
}
