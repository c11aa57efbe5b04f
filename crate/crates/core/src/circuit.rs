//! Layered circuits with affine data re-uploading.
//!
//! Every element carries one physical phase computed from the trainable
//! vector `θ` and the feature vector `x` as
//! `φ = θ[bias] + Σ θ[param]·x[feature]`. Phase shifters act on mode `a`;
//! an MZI is beamsplitter, phase shifter, beamsplitter.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockUnitary, FockVector, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Mzi,
    PhaseShifter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightTerm {
    pub param: usize,
    pub feature: usize,
}

/// Affine encoding of parameters and features into one physical phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub bias: usize,
    #[serde(default)]
    pub weights: Vec<WeightTerm>,
}

impl EncodingSpec {
    pub fn bias_only(bias: usize) -> Self {
        Self { bias, weights: Vec::new() }
    }

    pub fn with_weight(mut self, param: usize, feature: usize) -> Self {
        self.weights.push(WeightTerm { param, feature });
        self
    }

    fn phase(&self, theta: &[f64], x: &[f64]) -> f64 {
        theta[self.bias] + self.weights.iter().map(|w| theta[w.param] * x[w.feature]).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub kind: ElementKind,
    #[serde(flatten)]
    pub encoding: EncodingSpec,
}

impl ElementSpec {
    pub fn new(kind: ElementKind, encoding: EncodingSpec) -> Self {
        Self { kind, encoding }
    }
}

/// Input state: a named Fock state or explicit `[re, im]` amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputState {
    /// `[n_a, n_b]`
    Fock([usize; 2]),
    Amplitudes(Vec<[f64; 2]>),
}

impl InputState {
    fn to_vector(&self) -> Result<FockVector> {
        match self {
            InputState::Fock([a, b]) => Ok(FockVector::fock(*a, *b)),
            InputState::Amplitudes(pairs) => FockVector::from_amplitudes(
                pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
            ),
        }
    }
}

/// How one parameter enters the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Bias { element: usize },
    Weight { element: usize, feature: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CircuitDoc {
    photon_number: usize,
    elements: Vec<ElementSpec>,
    #[serde(default = "default_input")]
    input_state: InputState,
    /// `[n_a, n_b]` of the detected Fock state.
    #[serde(default = "default_outcome")]
    outcome: [usize; 2],
    #[serde(default = "default_threshold")]
    threshold: f64,
    param_count: usize,
    feature_dim: usize,
}

fn default_input() -> InputState {
    InputState::Fock([1, 1])
}

fn default_outcome() -> [usize; 2] {
    [1, 1]
}

fn default_threshold() -> f64 {
    0.5
}

/// A validated circuit description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "CircuitDoc", into = "CircuitDoc")]
pub struct CircuitSpec {
    doc: CircuitDoc,
    input: FockVector,
    outcome_index: usize,
    roles: Vec<Vec<ParamRole>>,
    beamsplitter: FockUnitary,
}

impl PartialEq for CircuitSpec {
    fn eq(&self, other: &Self) -> bool {
        self.doc.photon_number == other.doc.photon_number
            && self.doc.elements == other.doc.elements
            && self.doc.input_state == other.doc.input_state
            && self.doc.outcome == other.doc.outcome
            && self.doc.threshold.to_bits() == other.doc.threshold.to_bits()
            && self.doc.param_count == other.doc.param_count
            && self.doc.feature_dim == other.doc.feature_dim
    }
}

impl From<CircuitSpec> for CircuitDoc {
    fn from(spec: CircuitSpec) -> Self {
        spec.doc
    }
}

impl TryFrom<CircuitDoc> for CircuitSpec {
    type Error = Error;

    fn try_from(doc: CircuitDoc) -> Result<Self> {
        let n = doc.photon_number;
        let input = doc.input_state.to_vector()?;
        if input.photon_number() != n {
            return Err(Error::InvalidCircuit(format!(
                "input state has {} photons, circuit has {n}",
                input.photon_number()
            )));
        }
        let [out_a, out_b] = doc.outcome;
        if out_a + out_b != n {
            return Err(Error::InvalidCircuit(format!(
                "outcome |{out_a},{out_b}⟩ does not hold {n} photons"
            )));
        }
        if !(0.0..=1.0).contains(&doc.threshold) {
            return Err(Error::InvalidCircuit(format!("threshold {} outside [0, 1]", doc.threshold)));
        }

        let mut roles = vec![Vec::new(); doc.param_count];
        let mut claim = |param: usize, role: ParamRole| -> Result<()> {
            roles
                .get_mut(param)
                .ok_or_else(|| {
                    Error::InvalidCircuit(format!(
                        "parameter index {param} >= param_count {}",
                        doc.param_count
                    ))
                })
                .map(|r| r.push(role))
        };
        for (e, element) in doc.elements.iter().enumerate() {
            claim(element.encoding.bias, ParamRole::Bias { element: e })?;
            for w in &element.encoding.weights {
                if w.feature >= doc.feature_dim {
                    return Err(Error::InvalidCircuit(format!(
                        "feature index {} >= feature_dim {}",
                        w.feature, doc.feature_dim
                    )));
                }
                claim(w.param, ParamRole::Weight { element: e, feature: w.feature })?;
            }
        }
        if let Some(unused) = roles.iter().position(Vec::is_empty) {
            return Err(Error::InvalidCircuit(format!("parameter {unused} is never used")));
        }

        Ok(Self {
            input,
            outcome_index: out_b,
            roles,
            beamsplitter: fock::beamsplitter(n),
            doc,
        })
    }
}

impl CircuitSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        photon_number: usize,
        elements: Vec<ElementSpec>,
        input_state: InputState,
        outcome: [usize; 2],
        threshold: f64,
        param_count: usize,
        feature_dim: usize,
    ) -> Result<Self> {
        CircuitDoc {
            photon_number,
            elements,
            input_state,
            outcome,
            threshold,
            param_count,
            feature_dim,
        }
        .try_into()
    }

    /// Three layers on `|1,1⟩`, detecting `|1,1⟩`, threshold 0.5:
    /// `MZI(θ₀ + θ₁x₂)`, `PS(θ₂ + θ₃x₁)`, `MZI(θ₄ + θ₅x₂)`.
    pub fn three_layer() -> Self {
        let elements = vec![
            ElementSpec::new(ElementKind::Mzi, EncodingSpec::bias_only(0).with_weight(1, 1)),
            ElementSpec::new(ElementKind::PhaseShifter, EncodingSpec::bias_only(2).with_weight(3, 0)),
            ElementSpec::new(ElementKind::Mzi, EncodingSpec::bias_only(4).with_weight(5, 1)),
        ];
        Self::new(2, elements, InputState::Fock([1, 1]), [1, 1], 0.5, 6, 2)
            .expect("reference circuit is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        let mut doc = self.doc.clone();
        doc.threshold = threshold;
        doc.try_into()
    }

    pub fn photon_number(&self) -> usize {
        self.doc.photon_number
    }

    pub fn elements(&self) -> &[ElementSpec] {
        &self.doc.elements
    }

    pub fn param_count(&self) -> usize {
        self.doc.param_count
    }

    pub fn feature_dim(&self) -> usize {
        self.doc.feature_dim
    }

    pub fn threshold(&self) -> f64 {
        self.doc.threshold
    }

    pub fn input_state(&self) -> &FockVector {
        &self.input
    }

    pub fn outcome_index(&self) -> usize {
        self.outcome_index
    }

    /// Every place parameter `param` enters a phase.
    pub fn param_roles(&self, param: usize) -> &[ParamRole] {
        &self.roles[param]
    }

    fn check_inputs(&self, theta: &Theta, x: &[f64]) -> Result<()> {
        if theta.len() != self.doc.param_count {
            return Err(Error::DimensionMismatch { expected: self.doc.param_count, found: theta.len() });
        }
        if x.len() != self.doc.feature_dim {
            return Err(Error::DimensionMismatch { expected: self.doc.feature_dim, found: x.len() });
        }
        Ok(())
    }

    fn check_element(&self, element: usize) -> Result<()> {
        if element >= self.doc.elements.len() {
            return Err(Error::IndexOutOfRange { index: element, len: self.doc.elements.len() });
        }
        Ok(())
    }

    /// Physical phase of every element for parameters `theta` and features `x`.
    pub fn resolve_phases(&self, theta: &Theta, x: &[f64]) -> Result<Vec<f64>> {
        self.check_inputs(theta, x)?;
        Ok(self.doc.elements.iter().map(|el| el.encoding.phase(theta.values(), x)).collect())
    }

    /// The element's Fock-space unitary at a given physical phase.
    pub fn element_unitary(&self, element: usize, phase: f64) -> Result<FockUnitary> {
        self.check_element(element)?;
        let n = self.doc.photon_number;
        Ok(match self.doc.elements[element].kind {
            ElementKind::PhaseShifter => fock::phase_shifter(phase, Mode::A, n),
            ElementKind::Mzi => {
                let mid = fock::phase_shifter(phase, Mode::A, n);
                self.beamsplitter.compose(&mid)?.compose(&self.beamsplitter)?
            }
        })
    }

    fn propagate(&self, state: FockVector, elements: std::ops::Range<usize>, phases: &[f64]) -> Result<FockVector> {
        elements.into_iter().try_fold(state, |v, e| fock::apply(&self.element_unitary(e, phases[e])?, &v))
    }

    /// Output state for explicit per-element phases.
    pub fn output_state(&self, phases: &[f64]) -> Result<FockVector> {
        let count = self.doc.elements.len();
        if phases.len() != count {
            return Err(Error::DimensionMismatch { expected: count, found: phases.len() });
        }
        self.propagate(self.input.clone(), 0..count, phases)
    }

    /// Detection probability for explicit per-element phases.
    pub fn probability_at(&self, phases: &[f64]) -> Result<f64> {
        fock::outcome_probability(&self.output_state(phases)?, self.outcome_index)
    }

    /// Exact probability of detecting the outcome state.
    pub fn forward(&self, theta: &Theta, x: &[f64]) -> Result<f64> {
        self.probability_at(&self.resolve_phases(theta, x)?)
    }

    /// [`forward`](Self::forward) with one element's phase replaced by `phase`.
    pub fn forward_with_override(&self, theta: &Theta, x: &[f64], element: usize, phase: f64) -> Result<f64> {
        self.check_element(element)?;
        let mut phases = self.resolve_phases(theta, x)?;
        phases[element] = phase;
        self.probability_at(&phases)
    }

    /// Finite-shot estimate `k/shots` with `k ~ Binomial(shots, p)`.
    pub fn forward_sampled(&self, theta: &Theta, x: &[f64], shots: u64, seed: u64) -> Result<f64> {
        let p = self.forward(theta, x)?;
        sample_probability(p, shots, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Label 1 when the probability exceeds the threshold; a tie gives 0.
    pub fn classify(&self, theta: &Theta, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.forward(theta, x)? > self.doc.threshold))
    }

    /// `(U_before|ψ₀⟩, U_after†|m⟩)` around `element`, at the phases
    /// resolved from `theta` and `x`.
    pub fn boundary_amplitudes(&self, theta: &Theta, x: &[f64], element: usize) -> Result<(FockVector, FockVector)> {
        self.check_element(element)?;
        let phases = self.resolve_phases(theta, x)?;
        let before = self.propagate(self.input.clone(), 0..element, &phases)?;
        let mut after = FockVector::basis(self.doc.photon_number, self.outcome_index)?;
        for e in (element + 1..self.doc.elements.len()).rev() {
            after = fock::apply(&self.element_unitary(e, phases[e])?.adjoint(), &after)?;
        }
        Ok((before, after))
    }

    /// The lifted beamsplitter used inside MZI elements.
    pub fn beamsplitter(&self) -> &FockUnitary {
        &self.beamsplitter
    }
}

/// Draws `k ~ Binomial(shots, p)` and returns `k/shots`.
pub fn sample_probability<R: Rng + ?Sized>(p: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let dist = Binomial::new(shots, p.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidConfig(format!("binomial sampling: {e}")))?;
    Ok(dist.sample(rng) as f64 / shots as f64)
}

/// Trainable parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    values: Vec<f64>,
}

impl Theta {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("theta[{i}] is not finite")));
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len] }
    }

    /// Biases uniform on `[0, 2π)`, weights uniform on `[−π, π]`.
    pub fn random_init(spec: &CircuitSpec, seed: u64) -> Self {
        use std::f64::consts::PI;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..spec.param_count())
            .map(|j| {
                let is_bias = spec.param_roles(j).iter().any(|r| matches!(r, ParamRole::Bias { .. }));
                if is_bias {
                    rng.random_range(0.0..2.0 * PI)
                } else {
                    rng.random_range(-PI..=PI)
                }
            })
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn set(&mut self, index: usize, value: f64) {
        self.values[index] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn theta(values: &[f64]) -> Theta {
        Theta::new(values.to_vec()).unwrap()
    }

    #[test]
    fn three_layer_encoding() {
        let spec = CircuitSpec::three_layer();
        let t = theta(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let x = [0.7, 0.9];
        let phases = spec.resolve_phases(&t, &x).unwrap();
        let expected = [0.1 + 0.2 * 0.9, 0.3 + 0.4 * 0.7, 0.5 + 0.6 * 0.9];
        assert_eq!(phases, expected);
        assert_eq!(spec.resolve_phases(&Theta::zeros(6), &x).unwrap(), vec![0.0; 3]);
        assert_eq!(spec.resolve_phases(&theta(&[1.0, 0.0, 2.0, 0.0, 3.0, 0.0]), &x).unwrap(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn dimension_errors() {
        let spec = CircuitSpec::three_layer();
        assert!(matches!(spec.forward(&Theta::zeros(5), &[0.0, 0.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(spec.forward(&Theta::zeros(6), &[0.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            spec.boundary_amplitudes(&Theta::zeros(6), &[0.0, 0.0], 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_circuit_passes_input_through() {
        let spec = CircuitSpec::new(2, vec![], InputState::Fock([1, 1]), [1, 1], 0.5, 0, 0).unwrap();
        assert_eq!(spec.forward(&Theta::zeros(0), &[]).unwrap(), 1.0);
    }

    #[test]
    fn validation() {
        let ps = |bias| ElementSpec::new(ElementKind::PhaseShifter, EncodingSpec::bias_only(bias));
        assert!(CircuitSpec::new(2, vec![ps(0)], InputState::Fock([1, 1]), [1, 1], 0.5, 2, 0).is_err());
        assert!(CircuitSpec::new(2, vec![ps(3)], InputState::Fock([1, 1]), [1, 1], 0.5, 1, 0).is_err());
        assert!(CircuitSpec::new(2, vec![ps(0)], InputState::Fock([1, 1]), [1, 1], 1.5, 1, 0).is_err());
        assert!(CircuitSpec::new(2, vec![ps(0)], InputState::Fock([1, 0]), [1, 1], 0.5, 1, 0).is_err());
        assert!(CircuitSpec::new(2, vec![ps(0)], InputState::Fock([1, 1]), [2, 1], 0.5, 1, 0).is_err());
        let weighted = ElementSpec::new(ElementKind::Mzi, EncodingSpec::bias_only(0).with_weight(1, 2));
        assert!(CircuitSpec::new(2, vec![weighted], InputState::Fock([1, 1]), [1, 1], 0.5, 2, 2).is_err());
        let unnormalized = InputState::Amplitudes(vec![[1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]);
        assert!(CircuitSpec::new(2, vec![ps(0)], unnormalized, [1, 1], 0.5, 1, 0).is_err());
    }

    #[test]
    fn classify_threshold_rule() {
        // one-photon MZI: |1,0⟩ → |1,0⟩ with probability sin²(φ/2)
        let mzi = ElementSpec::new(ElementKind::Mzi, EncodingSpec::bias_only(0));
        let spec = CircuitSpec::new(1, vec![mzi], InputState::Fock([1, 0]), [1, 0], 0.5, 1, 0).unwrap();
        let p_half = theta(&[PI / 2.0]);
        assert!((spec.forward(&p_half, &[]).unwrap() - 0.5).abs() < 1e-15);
        // p lands within an ulp of 0.5; pin it exactly with the threshold
        let p = spec.forward(&p_half, &[]).unwrap();
        assert_eq!(spec.with_threshold(p).unwrap().classify(&p_half, &[]).unwrap(), 0);
        let p_high = theta(&[2.0]);
        assert!(spec.forward(&p_high, &[]).unwrap() > 0.7);
        assert_eq!(spec.classify(&p_high, &[]).unwrap(), 1);
        let zero_b = spec.with_threshold(0.0).unwrap();
        assert_eq!(zero_b.classify(&theta(&[0.1]), &[]).unwrap(), 1);
    }

    #[test]
    fn sampled_extremes_and_errors() {
        let spec = CircuitSpec::three_layer();
        let x = [0.3, 0.4];
        // θ = 0 gives p = 1 exactly (two full swaps)
        assert_eq!(spec.forward_sampled(&Theta::zeros(6), &x, 17, 1).unwrap(), 1.0);
        assert!(matches!(spec.forward_sampled(&Theta::zeros(6), &x, 0, 1), Err(Error::ZeroShots)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_probability(0.0, 1000, &mut rng).unwrap(), 0.0);
        let a = spec.forward_sampled(&theta(&[0.4, 1.0, 2.0, 0.3, 1.1, -0.7]), &x, 500, 42).unwrap();
        let b = spec.forward_sampled(&theta(&[0.4, 1.0, 2.0, 0.3, 1.1, -0.7]), &x, 500, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_of_single_element() {
        let ps = ElementSpec::new(ElementKind::PhaseShifter, EncodingSpec::bias_only(0));
        let spec = CircuitSpec::new(2, vec![ps], InputState::Fock([1, 1]), [2, 0], 0.5, 1, 0).unwrap();
        let (pre, post) = spec.boundary_amplitudes(&theta(&[0.8]), &[], 0).unwrap();
        assert_eq!(pre, FockVector::fock(1, 1));
        assert_eq!(post, FockVector::fock(2, 0));
    }

    #[test]
    fn random_init_ranges() {
        let spec = CircuitSpec::three_layer();
        for seed in 0..50 {
            let t = Theta::random_init(&spec, seed);
            for j in [0, 2, 4] {
                assert!((0.0..2.0 * PI).contains(&t.get(j)));
            }
            for j in [1, 3, 5] {
                assert!((-PI..=PI).contains(&t.get(j)));
            }
        }
        assert_eq!(Theta::random_init(&spec, 9), Theta::random_init(&spec, 9));
    }
}
