//! Brute-force transition amplitudes from matrix permanents.
//!
//! Independent of the polynomial expansion in [`super::lift_unitary`]; used
//! as its oracle.

use itertools::Itertools;
use num_complex::Complex64;

use super::{photons_in_a, FockUnitary, ModeUnitary};
use crate::error::{Error, Result};

/// Largest photon number the oracle accepts (`N!` terms per permanent).
pub const ORACLE_MAX_PHOTONS: usize = 8;

/// Permanent by full expansion over all permutations.
pub fn permanent(rows: &[Vec<Complex64>]) -> Complex64 {
    let n = rows.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    (0..n)
        .permutations(n)
        .map(|sigma| sigma.iter().enumerate().map(|(r, &c)| rows[r][c]).product::<Complex64>())
        .sum()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `⟨m|Û|n⟩ = per(U[m, n]) / √(m_a! m_b! n_a! n_b!)`, where `U[m, n]`
/// repeats row `j` of `U` `m_j` times and column `k` `n_k` times.
pub fn lift_oracle(u: &ModeUnitary, photons: usize) -> Result<FockUnitary> {
    if photons > ORACLE_MAX_PHOTONS {
        return Err(Error::OracleLimit { photons, max: ORACLE_MAX_PHOTONS });
    }
    let dim = photons + 1;
    let modes = |index: usize| {
        let in_a = photons_in_a(photons, index);
        std::iter::repeat_n(0, in_a).chain(std::iter::repeat_n(1, photons - in_a)).collect::<Vec<usize>>()
    };
    let occupation_norm = |index: usize| {
        let in_a = photons_in_a(photons, index);
        factorial(in_a) * factorial(photons - in_a)
    };

    let mut data = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let out_modes = modes(row);
        for col in 0..dim {
            let in_modes = modes(col);
            let sub: Vec<Vec<Complex64>> = out_modes
                .iter()
                .map(|&j| in_modes.iter().map(|&k| u.get(j, k)).collect())
                .collect();
            let norm = (occupation_norm(row) * occupation_norm(col)).sqrt();
            data.push(permanent(&sub) / norm);
        }
    }
    Ok(FockUnitary::from_raw(photons, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::max_abs_diff;

    #[test]
    fn identity_three_photons() {
        let lifted = lift_oracle(&ModeUnitary::identity(), 3).unwrap();
        assert!(max_abs_diff(&lifted, &FockUnitary::identity(3)) < 1e-15);
    }

    #[test]
    fn swap_reverses_basis() {
        let lifted = lift_oracle(&ModeUnitary::swap(), 2).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expected = if r + c == 2 { 1.0 } else { 0.0 };
                assert!((lifted.get(r, c) - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn refuses_large_photon_numbers() {
        assert!(matches!(
            lift_oracle(&ModeUnitary::identity(), 9),
            Err(Error::OracleLimit { photons: 9, max: 8 })
        ));
    }

    #[test]
    fn permanent_of_two_by_two() {
        let m = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)],
        ];
        assert_eq!(permanent(&m), Complex64::new(10.0, 0.0));
    }
}
