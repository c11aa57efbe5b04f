//! Exact two-mode, N-photon passive linear optics.
//!
//! A 2×2 transformation of the modes' creation operators,
//! `a† → u00·a† + u10·b†`, `b† → u01·a† + u11·b†`, induces an
//! `(N+1)×(N+1)` unitary on the N-photon subspace. Basis index `k` is the
//! Fock state `|N-k, k⟩`, i.e. descending photon count in mode `a`, so for
//! two photons the order is `|20⟩, |11⟩, |02⟩`.

mod permanent;

pub use permanent::{lift_oracle, permanent, ORACLE_MAX_PHOTONS};

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the `U†U = I` check on mode unitaries.
pub const MODE_UNITARY_TOL: f64 = 1e-12;
/// Tolerance on `Σ|amplitude|² = 1` for physical states.
pub const STATE_NORM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Spatial mode a phase shifter acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// A 2×2 unitary acting on the two modes' creation operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeUnitary {
    m: [[Complex64; 2]; 2],
}

impl ModeUnitary {
    /// Builds a mode unitary, rejecting matrices with `max|U†U - I| > 1e-12`.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Self { m };
        let deviation = u.unitarity_deviation();
        if deviation.is_finite() && deviation <= MODE_UNITARY_TOL {
            Ok(u)
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    pub fn identity() -> Self {
        Self { m: [[ONE, ZERO], [ZERO, ONE]] }
    }

    /// Symmetric 50/50 beamsplitter `(1/√2)[[1, i], [i, 1]]`.
    pub fn beamsplitter() -> Self {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let t = Complex64::new(0.0, FRAC_1_SQRT_2);
        Self { m: [[r, t], [t, r]] }
    }

    /// `diag(e^{iφ}, 1)` for mode `a`, `diag(1, e^{iφ})` for mode `b`.
    pub fn phase(phi: f64, mode: Mode) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        match mode {
            Mode::A => Self { m: [[p, ZERO], [ZERO, ONE]] },
            Mode::B => Self { m: [[ONE, ZERO], [ZERO, p]] },
        }
    }

    /// Exchanges the two modes.
    pub fn swap() -> Self {
        Self { m: [[ZERO, ONE], [ONE, ZERO]] }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().product(self);
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((p.m[r][c] - target).norm());
            }
        }
        worst
    }

    fn product(&self, rhs: &Self) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, out) in row.iter_mut().enumerate() {
                *out = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        Self { m }
    }
}

impl Mul for ModeUnitary {
    type Output = ModeUnitary;

    fn mul(self, rhs: ModeUnitary) -> ModeUnitary {
        self.product(&rhs)
    }
}

/// Amplitudes over the two-mode N-photon Fock basis `|N,0⟩, …, |0,N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    /// Normalized state from explicit amplitudes (length `N+1`).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// The Fock state `|n_a, n_b⟩`.
    pub fn fock(n_a: usize, n_b: usize) -> Self {
        let n = n_a + n_b;
        Self::basis(n, n_b).expect("index within range by construction")
    }

    /// The `index`-th basis vector of the N-photon space.
    pub fn basis(photons: usize, index: usize) -> Result<Self> {
        if index > photons {
            return Err(Error::IndexOutOfRange { index, len: photons + 1 });
        }
        let mut amps = vec![ZERO; photons + 1];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    pub fn photon_number(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Photons in mode `a` for basis index `k` of the N-photon space.
pub fn photons_in_a(photons: usize, index: usize) -> usize {
    photons - index
}

/// An operator on the N-photon space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FockUnitary {
    photons: usize,
    data: Vec<Complex64>,
}

impl FockUnitary {
    pub(crate) fn from_raw(photons: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), (photons + 1) * (photons + 1));
        Self { photons, data }
    }

    pub fn identity(photons: usize) -> Self {
        let dim = photons + 1;
        let mut data = vec![ZERO; dim * dim];
        for k in 0..dim {
            data[k * dim + k] = ONE;
        }
        Self { photons, data }
    }

    pub fn photon_number(&self) -> usize {
        self.photons
    }

    pub fn dim(&self) -> usize {
        self.photons + 1
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        Self { photons: self.photons, data }
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &FockUnitary) -> Result<FockUnitary> {
        if self.photons != rhs.photons {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rhs.dim() });
        }
        let dim = self.dim();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let a = self.data[r * dim + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..dim {
                    data[r * dim + c] += a * rhs.data[k * dim + c];
                }
            }
        }
        Ok(FockUnitary { photons: self.photons, data })
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().compose(self).expect("same dimension");
        max_abs_diff(&p, &FockUnitary::identity(self.photons))
    }
}

/// Largest entrywise `|a - b|`; infinite when the dimensions differ.
pub fn max_abs_diff(a: &FockUnitary, b: &FockUnitary) -> f64 {
    if a.photons != b.photons {
        return f64::INFINITY;
    }
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Symmetric (bosonic) representation of a mode unitary on N photons.
///
/// Column `|p, N-p⟩` is obtained by expanding
/// `(u00·a† + u10·b†)^p (u01·a† + u11·b†)^(N-p) |0⟩` as a polynomial in
/// `a†` and normalizing with `√(q!(N-q)! / p!(N-p)!)`.
pub fn lift_unitary(u: &ModeUnitary, photons: usize) -> FockUnitary {
    let dim = photons + 1;
    let m = u.entries();
    let ln_fact: Vec<f64> = (0..=photons).map(ln_factorial).collect();
    let mut data = vec![ZERO; dim * dim];

    for col in 0..dim {
        let p = photons_in_a(photons, col);
        // poly[q] is the coefficient of (a†)^q (b†)^(N-q)
        let mut poly = vec![ZERO; dim];
        poly[0] = ONE;
        let factors = std::iter::repeat_n((m[1][0], m[0][0]), p)
            .chain(std::iter::repeat_n((m[1][1], m[0][1]), photons - p));
        for (degree, (on_b, on_a)) in factors.enumerate() {
            for q in (0..=degree + 1).rev() {
                let shifted = if q > 0 { poly[q - 1] * on_a } else { ZERO };
                let kept = if q <= degree { poly[q] * on_b } else { ZERO };
                poly[q] = shifted + kept;
            }
        }
        for (q, coeff) in poly.iter().enumerate() {
            let row = photons - q;
            let scale = (0.5
                * (ln_fact[q] + ln_fact[photons - q] - ln_fact[p] - ln_fact[photons - p]))
                .exp();
            data[row * dim + col] = coeff * scale;
        }
    }
    FockUnitary::from_raw(photons, data)
}

/// Diagonal phase shift `e^{i n φ}`, `n` the photon count in `mode`.
pub fn phase_shifter(phi: f64, mode: Mode, photons: usize) -> FockUnitary {
    let dim = photons + 1;
    let mut data = vec![ZERO; dim * dim];
    for k in 0..dim {
        let n = match mode {
            Mode::A => photons_in_a(photons, k),
            Mode::B => k,
        };
        data[k * dim + k] = Complex64::from_polar(1.0, n as f64 * phi);
    }
    FockUnitary::from_raw(photons, data)
}

/// Lifted 50/50 beamsplitter.
pub fn beamsplitter(photons: usize) -> FockUnitary {
    lift_unitary(&ModeUnitary::beamsplitter(), photons)
}

/// Mach-Zehnder interferometer: beamsplitter, phase `φ` on mode `a`, beamsplitter.
pub fn mzi(phi: f64, photons: usize) -> FockUnitary {
    let bs = beamsplitter(photons);
    bs.compose(&phase_shifter(phi, Mode::A, photons))
        .and_then(|m| m.compose(&bs))
        .expect("all factors share the photon number")
}

/// Applies `u` to `v`.
pub fn apply(u: &FockUnitary, v: &FockVector) -> Result<FockVector> {
    if u.dim() != v.amps.len() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.amps.len() });
    }
    let dim = u.dim();
    let amps = (0..dim)
        .map(|r| (0..dim).map(|c| u.data[r * dim + c] * v.amps[c]).sum())
        .collect();
    Ok(FockVector { amps })
}

/// Probability `|⟨m|v⟩|²` of detecting basis state `m`.
pub fn outcome_probability(v: &FockVector, index: usize) -> Result<f64> {
    v.amps
        .get(index)
        .map(|a| a.norm_sqr())
        .ok_or(Error::IndexOutOfRange { index, len: v.amps.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_unitary() {
        let err = ModeUnitary::new([[c(1.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        match err {
            Err(Error::NotUnitary { deviation }) => assert!(deviation > 0.09),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_lifts_to_identity() {
        let lifted = lift_unitary(&ModeUnitary::identity(), 2);
        assert!(max_abs_diff(&lifted, &FockUnitary::identity(2)) == 0.0);
    }

    #[test]
    fn single_photon_lift_is_the_matrix_itself() {
        let u = ModeUnitary::beamsplitter() * ModeUnitary::phase(0.3, Mode::A);
        let lifted = lift_unitary(&u, 1);
        for r in 0..2 {
            for col in 0..2 {
                assert!((lifted.get(r, col) - u.get(r, col)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn phase_on_mode_a_lifts_to_photon_count_diagonal() {
        let phi = 0.731;
        let lifted = lift_unitary(&ModeUnitary::phase(phi, Mode::A), 2);
        let expected = [2.0 * phi, phi, 0.0];
        for (k, angle) in expected.iter().enumerate() {
            assert!((lifted.get(k, k) - Complex64::from_polar(1.0, *angle)).norm() < 1e-15);
        }
        assert!(max_abs_diff(&lifted, &phase_shifter(phi, Mode::A, 2)) < 1e-15);
    }

    #[test]
    fn phase_shifter_examples() {
        assert!(max_abs_diff(&phase_shifter(0.0, Mode::A, 2), &FockUnitary::identity(2)) == 0.0);
        let flip = phase_shifter(PI, Mode::B, 2);
        let expected = [1.0, -1.0, 1.0];
        for (k, e) in expected.iter().enumerate() {
            assert!((flip.get(k, k) - c(*e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let out = apply(&beamsplitter(2), &FockVector::fock(1, 1)).unwrap();
        assert!(out.amplitudes()[1].norm() < 1e-15);
        assert!((outcome_probability(&out, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((outcome_probability(&out, 2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phase_shifter_on_one_one() {
        let phi = 1.1;
        let out = apply(&phase_shifter(phi, Mode::A, 2), &FockVector::fock(1, 1)).unwrap();
        assert!((out.amplitudes()[1] - Complex64::from_polar(1.0, phi)).norm() < 1e-15);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn mzi_single_photon_limits() {
        let swap = mzi(0.0, 1);
        let expected = [[c(0.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        for r in 0..2 {
            for col in 0..2 {
                assert!((swap.get(r, col) - expected[r][col]).norm() < 1e-15);
            }
        }
        // φ = π: bar state diag(−1, 1); no photon changes mode
        let bar = mzi(PI, 1);
        let expected = [[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        for r in 0..2 {
            for col in 0..2 {
                assert!((bar.get(r, col) - expected[r][col]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn apply_and_probability_errors() {
        let v = FockVector::fock(1, 1);
        assert!(matches!(
            apply(&FockUnitary::identity(3), &v),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(outcome_probability(&v, 3), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(outcome_probability(&v, 1).unwrap(), 1.0);
    }

    #[test]
    fn superposition_orthogonal_to_one_one() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let v = FockVector::from_amplitudes(vec![h, ZERO, h]).unwrap();
        assert_eq!(outcome_probability(&v, 1).unwrap(), 0.0);
        assert!(FockVector::from_amplitudes(vec![ONE, ONE]).is_err());
    }
}
