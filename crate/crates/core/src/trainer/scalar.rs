//! One-parameter subproblems of the sequential optimizer.
//!
//! With every other parameter frozen, the phase of the element that
//! parameter `j` feeds is affine in `θ[j]` at each training point,
//! `φᵢ = θ[j]·mᵢ + cᵢ`, and the detection probability is a trigonometric
//! polynomial in `φᵢ`. The cost restricted to `θ[j]` is therefore an
//! explicit function that can be searched globally.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trig::{probe_phases, recover_trig_poly, TrigPoly};
use super::TrainConfig;
use crate::circuit::{sample_probability, CircuitSpec, ElementKind, ParamRole, Theta};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::fock::{self, photons_in_a, FockVector};

/// How the per-point trigonometric polynomials are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    /// Closed-form coefficients from the amplitudes around the element.
    #[default]
    Analytic,
    /// Exact probabilities at the `2N+1` probe phases, then inverse DFT.
    Probed,
    /// Binomial estimates with `shots` detections per probe.
    Sampled { shots: u64 },
}

impl ProbeMode {
    pub fn is_exact(&self) -> bool {
        !matches!(self, ProbeMode::Sampled { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTerm {
    pub poly: TrigPoly,
    pub multiplier: f64,
    pub offset: f64,
    pub label: f64,
}

/// The cost as an explicit function of one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProblem {
    pub param: usize,
    pub element: usize,
    pub is_bias: bool,
    /// Incumbent value of the parameter.
    pub current: f64,
    pub terms: Vec<ScalarTerm>,
}

/// Coefficients of `|⟨post| PS(φ) |pre⟩|²` for a phase shifter on mode `a`.
///
/// With `dₙ = conj(post) · pre` on the component holding `n` photons in
/// mode `a`, the amplitude is `Σ dₙ e^{inφ}`; expanding its modulus squared
/// gives `A₀ = Σ|dₙ|²` and, for `δ ≥ 1` and `S_δ = Σ dₙ₊δ conj(dₙ)`,
/// `A_{2δ−1} = 2 Re S_δ`, `A_{2δ} = −2 Im S_δ`.
pub fn phase_poly(pre: &FockVector, post: &FockVector) -> Result<TrigPoly> {
    let photons = pre.photon_number();
    if post.photon_number() != photons {
        return Err(Error::DimensionMismatch { expected: photons + 1, found: post.photon_number() + 1 });
    }
    let mut d = vec![Complex64::new(0.0, 0.0); photons + 1];
    for (k, (a, b)) in pre.amplitudes().iter().zip(post.amplitudes()).enumerate() {
        d[photons_in_a(photons, k)] = b.conj() * a;
    }
    let mut coeffs = Vec::with_capacity(2 * photons + 1);
    coeffs.push(d.iter().map(|z| z.norm_sqr()).sum());
    for delta in 1..=photons {
        let s: Complex64 = (0..=photons - delta).map(|n| d[n + delta] * d[n].conj()).sum();
        coeffs.push(2.0 * s.re);
        coeffs.push(-2.0 * s.im);
    }
    TrigPoly::new(coeffs)
}

/// Two-photon coefficients `A₀ … A₄` written out in the amplitudes
/// `pre = α₁|20⟩ + β₁|11⟩ + γ₁|02⟩`, `post = α₂|20⟩ + β₂|11⟩ + γ₂|02⟩`.
pub fn two_photon_coefficients(pre: &FockVector, post: &FockVector) -> Result<[f64; 5]> {
    if pre.photon_number() != 2 || post.photon_number() != 2 {
        return Err(Error::DimensionMismatch { expected: 3, found: pre.photon_number().max(post.photon_number()) + 1 });
    }
    let [a1, b1, g1] = [pre.amplitudes()[0], pre.amplitudes()[1], pre.amplitudes()[2]];
    let [a2, b2, g2] = [post.amplitudes()[0], post.amplitudes()[1], post.amplitudes()[2]];
    let ab = a1.conj() * a2 * b1 * b2.conj();
    let bg = b1.conj() * b2 * g1 * g2.conj();
    let ag = a1.conj() * a2 * g1 * g2.conj();
    Ok([
        a1.norm_sqr() * a2.norm_sqr() + b1.norm_sqr() * b2.norm_sqr() + g1.norm_sqr() * g2.norm_sqr(),
        2.0 * ab.re + 2.0 * bg.re,
        2.0 * ab.im + 2.0 * bg.im,
        2.0 * ag.re,
        2.0 * ag.im,
    ])
}

/// The single element and role through which `param` enters the circuit.
pub fn sole_role(spec: &CircuitSpec, param: usize) -> Result<ParamRole> {
    if param >= spec.param_count() {
        return Err(Error::IndexOutOfRange { index: param, len: spec.param_count() });
    }
    match spec.param_roles(param) {
        [role] => Ok(*role),
        roles => Err(Error::UnsupportedSharing { param, count: roles.len() }),
    }
}

/// Per-point polynomial of the element's physical phase.
fn point_poly<R: Rng + ?Sized>(
    spec: &CircuitSpec,
    theta: &Theta,
    x: &[f64],
    element: usize,
    mode: ProbeMode,
    rng: &mut R,
) -> Result<TrigPoly> {
    match mode {
        ProbeMode::Analytic => {
            let (mut pre, mut post) = spec.boundary_amplitudes(theta, x, element)?;
            if spec.elements()[element].kind == ElementKind::Mzi {
                let bs = spec.beamsplitter();
                pre = fock::apply(bs, &pre)?;
                post = fock::apply(&bs.adjoint(), &post)?;
            }
            phase_poly(&pre, &post)
        }
        ProbeMode::Probed => {
            let r = probe_phases(spec.photon_number())
                .into_iter()
                .map(|phi| spec.forward_with_override(theta, x, element, phi))
                .collect::<Result<Vec<_>>>()?;
            recover_trig_poly(&r)
        }
        ProbeMode::Sampled { shots } => {
            let r = probe_phases(spec.photon_number())
                .into_iter()
                .map(|phi| sample_probability(spec.forward_with_override(theta, x, element, phi)?, shots, rng))
                .collect::<Result<Vec<_>>>()?;
            recover_trig_poly(&r)
        }
    }
}

/// Builds the cost of `param` as an explicit function over `data`.
pub fn build_scalar_problem<R: Rng + ?Sized>(
    spec: &CircuitSpec,
    theta: &Theta,
    data: &Dataset,
    param: usize,
    mode: ProbeMode,
    rng: &mut R,
) -> Result<ScalarProblem> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let role = sole_role(spec, param)?;
    let (element, feature) = match role {
        ParamRole::Bias { element } => (element, None),
        ParamRole::Weight { element, feature } => (element, Some(feature)),
    };
    let current = theta.get(param);
    let terms = data
        .points()
        .iter()
        .map(|point| {
            let phase = spec.resolve_phases(theta, &point.x)?[element];
            let multiplier = feature.map_or(1.0, |f| point.x[f]);
            Ok(ScalarTerm {
                poly: point_poly(spec, theta, &point.x, element, mode, rng)?,
                multiplier,
                offset: phase - current * multiplier,
                label: f64::from(point.y),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarProblem { param, element, is_bias: feature.is_none(), current, terms })
}

/// `C(s) = (1/n) Σ (polyᵢ(s·mᵢ + cᵢ) − yᵢ)²`.
pub fn scalar_cost(s: f64, problem: &ScalarProblem) -> f64 {
    let total: f64 = problem
        .terms
        .iter()
        .map(|t| {
            let r = t.poly.eval(s * t.multiplier + t.offset) - t.label;
            r * r
        })
        .sum();
    total / problem.terms.len().max(1) as f64
}

fn cost_with_derivatives(s: f64, problem: &ScalarProblem) -> (f64, f64, f64) {
    let n = problem.terms.len().max(1) as f64;
    let (mut c, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for t in &problem.terms {
        let (p, dp, ddp) = t.poly.eval_with_derivatives(s * t.multiplier + t.offset);
        let r = p - t.label;
        let m = t.multiplier;
        c += r * r;
        d1 += 2.0 * r * dp * m;
        d2 += 2.0 * (dp * dp + r * ddp) * m * m;
    }
    (c / n, d1 / n, d2 / n)
}

/// Dense grid search plus Newton polishing. Biases are searched over
/// `[0, 2π)`; weights over `current ± weight_search_halfwidth`. The
/// incumbent is kept unless a strictly lower cost is found.
pub fn minimize_scalar(problem: &ScalarProblem, config: &TrainConfig) -> (f64, f64) {
    let grid = config.grid_size.max(2);
    let (lo, hi, step) = if problem.is_bias {
        (0.0, TAU, TAU / grid as f64)
    } else {
        let w = config.weight_search_halfwidth;
        (problem.current - w, problem.current + w, 2.0 * w / (grid - 1) as f64)
    };

    let mut best_s = lo;
    let mut best_c = f64::INFINITY;
    for g in 0..grid {
        let s = lo + step * g as f64;
        let c = scalar_cost(s, problem);
        if c < best_c {
            best_s = s;
            best_c = c;
        }
    }

    for _ in 0..config.refine_iters {
        let (_, d1, d2) = cost_with_derivatives(best_s, problem);
        if d2.is_nan() || d2 <= 0.0 {
            break;
        }
        let mut s = best_s - d1 / d2;
        if !problem.is_bias {
            s = s.clamp(lo, hi);
        }
        let c = scalar_cost(s, problem);
        if c.is_nan() || c >= best_c {
            break;
        }
        best_s = s;
        best_c = c;
    }
    if problem.is_bias {
        best_s = best_s.rem_euclid(TAU);
    }

    let incumbent = scalar_cost(problem.current, problem);
    if best_c < incumbent {
        (best_s, best_c)
    } else {
        (problem.current, incumbent)
    }
}
