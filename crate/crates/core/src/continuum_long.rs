//! Long-wavelength effective theory near the bottom of the band.
//!
//! With `E^L = omega_xi + xi k^2` the photon obeys
//! `xi u'' + (E^L - omega_xi) u = J G^L [delta(x - d) + delta(x + d)] u`,
//! so `u` is continuous at `+-d` and its slope jumps by `(J G^L / xi) u`.
//! The ansatz puts the unit wave in the middle:
//!
//! ```text
//! u(x) = S1 e^{-ikx}             x < -d
//!        e^{ikx} + B_L e^{-ikx}  -d < x < d
//!        S2 e^{ikx}              x > d
//! ```
//!
//! Matching at `+d` fixes `B_L` and `S2`, continuity at `-d` fixes `S1`; the
//! slope jump at `-d` then holds only at a resonance.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{IdenticalAtoms, Parity, WaveguideParams};
use crate::newton::{newton, NewtonOptions, NewtonOutcome};
use crate::resonance::{Expansion, Region, I};

/// Default profile grid: 2048 points on `[-4d, 4d]`.
pub const DEFAULT_GRID_POINTS: usize = 2048;

pub fn long_energy(k: Complex64, wg: &WaveguideParams) -> Complex64 {
    wg.omega_xi() + wg.xi * k * k
}

/// `1 / (J G^L_k) = (E^L_k - Omega) / J^2`.
fn inverse_strength(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<Complex64> {
    atoms.require_coupling()?;
    Ok((long_energy(k, wg) - atoms.omega) / (atoms.j * atoms.j))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongCoefficients {
    pub s1: Complex64,
    pub s2: Complex64,
    pub b_l: Complex64,
}

/// Coefficients from the matching conditions:
/// `B_L = J G e^{2ikd} / (2 i k xi - J G)`, `S2 = 2 k xi / (2 k xi + i J G)`,
/// `S1 = e^{-2ikd} + B_L`. Written with `1 / (J G)` so the perfect-mirror
/// point `E^L = Omega` is regular.
pub fn long_coefficients(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<LongCoefficients> {
    if k.norm() == 0.0 {
        return Err(Error::SingularMatching { k: k.to_string() });
    }
    let w = inverse_strength(k, wg, atoms)?;
    let y = 2.0 * I * k * wg.xi * w;
    let den = y - 1.0;
    if den.norm() == 0.0 {
        return Err(Error::SingularMatching { k: k.to_string() });
    }
    let phase = (2.0 * I * k * atoms.df()).exp();
    let b_l = phase / den;
    Ok(LongCoefficients {
        s1: 1.0 / phase + b_l,
        s2: y / den,
        b_l,
    })
}

/// The coefficients exactly as published,
/// `S1 = (k xi e^{-2ikd} + J G sin 2kd) / (2 k xi + i J G)` and
/// `S2 = k xi / (2 k xi + i J G)`. Each is half of the matched value, so this
/// form violates continuity; it is kept for comparison only.
pub fn long_coefficients_printed(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
) -> Result<LongCoefficients> {
    atoms.require_coupling()?;
    let det = long_energy(k, wg) - atoms.omega;
    if det.norm() == 0.0 {
        return Err(Error::SingularMatching { k: k.to_string() });
    }
    let jg = atoms.j * atoms.j / det;
    let d = atoms.df();
    let den = 2.0 * k * wg.xi + I * jg;
    Ok(LongCoefficients {
        s1: (k * wg.xi * (-2.0 * I * k * d).exp() + jg * (2.0 * k * d).sin()) / den,
        s2: k * wg.xi / den,
        b_l: jg * (2.0 * I * k * d).exp() / (2.0 * I * k * wg.xi - jg),
    })
}

/// `e^{2ikd} - s (2 i xi k (E^L - Omega) / J^2 - 1)`.
pub fn long_resonance_condition(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    let w = inverse_strength(k, wg, atoms)?;
    Ok((2.0 * I * k * atoms.df()).exp() - parity.sign() * (2.0 * I * wg.xi * k * w - 1.0))
}

pub fn long_resonance_derivative(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    atoms.require_coupling()?;
    let d = atoms.df();
    let det = long_energy(k, wg) - atoms.omega;
    let inner = det + 2.0 * wg.xi * k * k;
    Ok(2.0 * I * d * (2.0 * I * k * d).exp() - parity.sign() * 2.0 * I * wg.xi * inner / (atoms.j * atoms.j))
}

/// `Q^L_n = (lambda q_n / d)(omega - 2 xi - Omega + xi q_n^2)`.
pub fn long_mode_shift(n: i64, wg: &WaveguideParams, atoms: &IdenticalAtoms, parity: Parity) -> Result<f64> {
    atoms.require_coupling()?;
    parity.check_mode(n, atoms.d)?;
    let q = parity.mode_q(n, atoms.d);
    let delta_xi = wg.omega_xi() - atoms.omega;
    Ok(atoms.lambda(wg) * q / atoms.df() * (delta_xi + wg.xi * q * q))
}

/// Second-order wave number in the long-wavelength regime.
///
/// * printed: `q - Q/2 + d Q^2 + i (lambda / 2d) Q (delta_xi + 3 xi q^2)`,
/// * corrected: `q - Q/2 + (lambda / 4d) Q (delta_xi + 3 xi q^2) - i (d / 4) Q^2`.
pub fn long_perturbative_k(
    n: i64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
    expansion: Expansion,
) -> Result<Complex64> {
    let qs = long_mode_shift(n, wg, atoms, parity)?;
    let q = parity.mode_q(n, atoms.d);
    let d = atoms.df();
    let lambda = atoms.lambda(wg);
    let slope = wg.omega_xi() - atoms.omega + 3.0 * wg.xi * q * q;
    Ok(match expansion {
        Expansion::Printed | Expansion::PatternConsistent => {
            Complex64::new(q - 0.5 * qs + d * qs * qs, lambda / (2.0 * d) * qs * slope)
        }
        Expansion::Corrected => Complex64::new(q - 0.5 * qs + lambda / (4.0 * d) * qs * slope, -0.25 * d * qs * qs),
    })
}

pub fn long_newton(
    seed: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<NewtonOutcome> {
    atoms.require_coupling()?;
    let nan = Complex64::new(f64::NAN, 0.0);
    newton(
        |k| {
            (
                long_resonance_condition(k, wg, atoms, parity).unwrap_or(nan),
                long_resonance_derivative(k, wg, atoms, parity).unwrap_or(nan),
            )
        },
        seed,
        NewtonOptions::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongWaveState {
    pub n: i64,
    pub parity: Parity,
    pub k: Complex64,
    pub k_perturbative: Complex64,
    pub coefficients: LongCoefficients,
    pub qn_shift: f64,
    pub omega_xi: f64,
    pub energy: Complex64,
    pub residual: f64,
}

/// Exact long-wavelength resonance for mode `(n, parity)`.
pub fn long_resonant_state(
    n: i64,
    parity: Parity,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    expansion: Expansion,
) -> Result<LongWaveState> {
    let seed = long_perturbative_k(n, wg, atoms, parity, expansion)?;
    let out = long_newton(seed, wg, atoms, parity)?;
    crate::resonance::check_mode_match(n, parity, atoms.d, out.root)?;
    Ok(LongWaveState {
        n,
        parity,
        k: out.root,
        k_perturbative: seed,
        coefficients: long_coefficients(out.root, wg, atoms)?,
        qn_shift: long_mode_shift(n, wg, atoms, parity)?,
        omega_xi: wg.omega_xi(),
        energy: long_energy(out.root, wg),
        residual: out.residual,
    })
}

/// Continuum profile with the matching diagnostics at both atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumProfile {
    pub x: Vec<f64>,
    pub values: Vec<Complex64>,
    pub regions: Vec<Region>,
    /// `|u(d+) - u(d-)|` at `-d` and `+d`, relative to the peak amplitude.
    pub continuity_residual: [f64; 2],
    /// `|xi (E - Omega)/J^2 [u'(x+) - u'(x-)] - u(x)|` at `-d` and `+d`,
    /// relative to the peak amplitude.
    pub jump_residual: [f64; 2],
}

impl ContinuumProfile {
    pub fn outside_probability(&self) -> f64 {
        crate::resonance::outside_fraction(&self.values, &self.regions)
    }

    pub fn max_outside(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.regions)
            .filter(|(_, r)| **r != Region::Inside)
            .fold(0.0, |m, (v, _)| m.max(v.norm()))
    }
}

/// Uniform grid of `points` samples on `[-4d, 4d]`.
pub fn default_grid(d: usize, points: usize) -> Vec<f64> {
    let half = 4.0 * d as f64;
    let n = points.max(2);
    (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
}

/// Evaluates the piecewise ansatz on `xgrid` and checks the matching
/// conditions analytically on both sides of each atom.
pub fn long_profile(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    xgrid: &[f64],
) -> Result<ContinuumProfile> {
    let c = long_coefficients(k, wg, atoms)?;
    let d = atoms.df();
    let plus = |x: f64| (I * k * x).exp();
    let minus = |x: f64| (-I * k * x).exp();
    let left = |x: f64| (c.s1 * minus(x), -I * k * c.s1 * minus(x));
    let middle = |x: f64| (plus(x) + c.b_l * minus(x), I * k * (plus(x) - c.b_l * minus(x)));
    let right = |x: f64| (c.s2 * plus(x), I * k * c.s2 * plus(x));
    let eval = |x: f64| {
        if x < -d {
            left(x).0
        } else if x > d {
            right(x).0
        } else {
            middle(x).0
        }
    };
    let values: Vec<Complex64> = xgrid.iter().map(|&x| eval(x)).collect();
    let regions = xgrid.iter().map(|&x| Region::of(x, d)).collect();
    let peak = values
        .iter()
        .map(|v| v.norm())
        .chain([middle(d).0.norm(), middle(-d).0.norm(), 1.0])
        .fold(0.0f64, f64::max);
    let w = inverse_strength(k, wg, atoms)?;
    let check = |outer: (Complex64, Complex64), inner: (Complex64, Complex64), outer_is_right: bool| {
        let slope_jump = if outer_is_right {
            outer.1 - inner.1
        } else {
            inner.1 - outer.1
        };
        (
            (outer.0 - inner.0).norm() / peak,
            (wg.xi * w * slope_jump - inner.0).norm() / peak,
        )
    };
    let (cl, jl) = check(left(-d), middle(-d), false);
    let (cr, jr) = check(right(d), middle(d), true);
    Ok(ContinuumProfile {
        x: xgrid.to_vec(),
        values,
        regions,
        continuity_residual: [cl, cr],
        jump_residual: [jl, jr],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fig7(big_omega: f64) -> (WaveguideParams, IdenticalAtoms) {
        (
            WaveguideParams::new(5.0, 0.1).unwrap(),
            IdenticalAtoms::new(big_omega, 1.0, 5).unwrap(),
        )
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn perfect_cavity_has_no_outer_amplitude() {
        let wg = WaveguideParams::new(5.0, 0.1).unwrap();
        for n in 1..5 {
            let q = Parity::Odd.mode_q(n, 5);
            let atoms = IdenticalAtoms::new(wg.omega_xi() + wg.xi * q * q, 1.0, 5).unwrap();
            let k = c(q, 0.0);
            let coef = long_coefficients(k, &wg, &atoms).unwrap();
            assert!(coef.s1.norm() < 1e-12 && coef.s2.norm() < 1e-12);
            assert!(long_resonance_condition(k, &wg, &atoms, Parity::Odd).unwrap().norm() < 1e-12);
            let prof = long_profile(k, &wg, &atoms, &default_grid(5, DEFAULT_GRID_POINTS)).unwrap();
            assert!(prof.max_outside() < 1e-12);
            assert!(prof.jump_residual.iter().all(|r| *r < 1e-12));
        }
    }

    #[test]
    fn matched_coefficients_hold_at_plus_d_for_any_k() {
        let (wg, atoms) = fig7(3.0);
        for k in [c(0.7, -0.1), c(1.3, 0.05), c(2.2, -0.4)] {
            let prof = long_profile(k, &wg, &atoms, &[0.0]).unwrap();
            assert!(prof.continuity_residual[0] < 1e-12 && prof.continuity_residual[1] < 1e-12);
            assert!(prof.jump_residual[1] < 1e-12);
        }
    }

    #[test]
    fn printed_coefficients_break_continuity() {
        let (wg, atoms) = fig7(3.0);
        let k = c(1.3, -0.02);
        let printed = long_coefficients_printed(k, &wg, &atoms).unwrap();
        let matched = long_coefficients(k, &wg, &atoms).unwrap();
        assert!((printed.b_l - matched.b_l).norm() < 1e-12);
        assert!((2.0 * printed.s2 - matched.s2).norm() < 1e-12);
        assert!((2.0 * printed.s1 - matched.s1).norm() < 1e-12);
        let d = atoms.df();
        let mid = (I * k * d).exp() + printed.b_l * (-I * k * d).exp();
        assert!((printed.s2 * (I * k * d).exp() - mid).norm() > 1e-3);
    }

    #[test]
    fn uncoupled_limit_transmits() {
        // J -> 0: B_L -> 0 and S2 -> 1
        let wg = WaveguideParams::new(5.0, 0.1).unwrap();
        let atoms = IdenticalAtoms::new(3.0, 1e-7, 5).unwrap();
        let coef = long_coefficients(c(1.0, 0.0), &wg, &atoms).unwrap();
        assert!(coef.b_l.norm() < 1e-10);
        assert!((coef.s2 - 1.0).norm() < 1e-10);
    }

    #[test]
    fn fig7_root_near_q3_and_jumps_hold() {
        let (wg, atoms) = fig7(3.0);
        let st = long_resonant_state(3, Parity::Odd, &wg, &atoms, Expansion::Corrected).unwrap();
        assert!((st.k.re - 3.0 * PI / 5.0).abs() < 0.1, "{}", st.k);
        assert!(st.residual < 1e-12);
        let prof = long_profile(st.k, &wg, &atoms, &default_grid(5, DEFAULT_GRID_POINTS)).unwrap();
        for r in prof.jump_residual.iter().chain(&prof.continuity_residual) {
            assert!(*r < 1e-10, "{r}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (wg, atoms) = fig7(4.0);
        let k = c(1.1, -0.07);
        let h = 1e-6;
        for p in [Parity::Odd, Parity::Even] {
            let fd = (long_resonance_condition(k + h, &wg, &atoms, p).unwrap()
                - long_resonance_condition(k - h, &wg, &atoms, p).unwrap())
                / (2.0 * h);
            let an = long_resonance_derivative(k, &wg, &atoms, p).unwrap();
            assert!((fd - an).norm() < 1e-6 * an.norm());
        }
    }

    #[test]
    fn leakage_ordering_matches_im_k() {
        let roots: Vec<Complex64> = [3.0, 4.0, 7.0]
            .iter()
            .map(|&om| {
                let (wg, atoms) = fig7(om);
                long_resonant_state(3, Parity::Odd, &wg, &atoms, Expansion::Corrected)
                    .unwrap()
                    .k
            })
            .collect();
        let leak: Vec<f64> = [3.0, 4.0, 7.0]
            .iter()
            .zip(&roots)
            .map(|(&om, k)| {
                let (wg, atoms) = fig7(om);
                long_profile(*k, &wg, &atoms, &default_grid(5, 801))
                    .unwrap()
                    .outside_probability()
            })
            .collect();
        let order = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
            idx
        };
        let im: Vec<f64> = roots.iter().map(|k| k.im.abs()).collect();
        assert_eq!(order(&im), order(&leak), "{im:?} {leak:?}");
    }
}
