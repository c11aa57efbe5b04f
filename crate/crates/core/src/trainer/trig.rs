//! Trigonometric polynomials in one physical phase.
//!
//! A detection probability depends on a single phase `φ` through a
//! degree-N trigonometric polynomial when N photons pass the shifter, so
//! `2N+1` probabilities at equally spaced phases fix it exactly.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Slack allowed on `[0, 1]` for probabilities fed to recovery.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// `p(φ) = A₀ + Σₖ A_{2k−1} cos kφ + A_{2k} sin kφ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    coeffs: Vec<f64>,
}

impl TrigPoly {
    /// Coefficients ordered `A₀, A₁, …, A_{2N}`; the length must be odd.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::ProbeCount { expected: coeffs.len() + 1, found: coeffs.len() });
        }
        Ok(Self { coeffs })
    }

    pub fn constant(value: f64) -> Self {
        Self { coeffs: vec![value] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let (s1, c1) = phi.sin_cos();
        let (mut sk, mut ck) = (0.0, 1.0);
        let mut value = self.coeffs[0];
        for k in 1..=self.degree() {
            (ck, sk) = (ck * c1 - sk * s1, sk * c1 + ck * s1);
            value += self.coeffs[2 * k - 1] * ck + self.coeffs[2 * k] * sk;
        }
        value
    }

    /// `(p, p', p'')` at `phi`.
    pub fn eval_with_derivatives(&self, phi: f64) -> (f64, f64, f64) {
        let (s1, c1) = phi.sin_cos();
        let (mut sk, mut ck) = (0.0, 1.0);
        let mut value = self.coeffs[0];
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for k in 1..=self.degree() {
            // angle addition: (cos kφ, sin kφ) from (k-1)φ
            let next_c = ck * c1 - sk * s1;
            let next_s = sk * c1 + ck * s1;
            ck = next_c;
            sk = next_s;
            let a = self.coeffs[2 * k - 1];
            let b = self.coeffs[2 * k];
            let kf = k as f64;
            value += a * ck + b * sk;
            d1 += kf * (b * ck - a * sk);
            d2 -= kf * kf * (a * ck + b * sk);
        }
        (value, d1, d2)
    }
}

/// `0, +δ, −δ, +2δ, −2δ, …, ±Nδ` with `δ = 2π/(2N+1)`.
pub fn probe_phases(photons: usize) -> Vec<f64> {
    let step = 2.0 * PI / (2 * photons + 1) as f64;
    let mut phases = Vec::with_capacity(2 * photons + 1);
    phases.push(0.0);
    for k in 1..=photons {
        let phi = k as f64 * step;
        phases.push(phi);
        phases.push(-phi);
    }
    phases
}

/// Real inverse-DFT matrix mapping probe probabilities (in
/// [`probe_phases`] order) to coefficients `A₀ … A_{2N}`; rows index
/// coefficients, columns index probes.
pub fn recovery_matrix(photons: usize) -> Vec<Vec<f64>> {
    let phases = probe_phases(photons);
    let count = phases.len() as f64;
    let mut rows = vec![vec![1.0 / count; phases.len()]];
    for k in 1..=photons {
        let kf = k as f64;
        rows.push(phases.iter().map(|p| 2.0 / count * (kf * p).cos()).collect());
        rows.push(phases.iter().map(|p| 2.0 / count * (kf * p).sin()).collect());
    }
    rows
}

/// Recovers the degree-N polynomial from its values at `probe_phases(N)`,
/// N inferred from `2N+1 = r.len()`.
pub fn recover_trig_poly(probs: &[f64]) -> Result<TrigPoly> {
    if probs.len().is_multiple_of(2) {
        return Err(Error::ProbeCount { expected: probs.len() + 1, found: probs.len() });
    }
    for (index, &value) in probs.iter().enumerate() {
        if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
            return Err(Error::ProbabilityOutOfRange { index, value });
        }
    }
    let matrix = recovery_matrix(probs.len() / 2);
    let coeffs = matrix
        .iter()
        .map(|row| row.iter().zip(probs).map(|(m, r)| m * r).sum())
        .collect();
    Ok(TrigPoly { coeffs })
}
