//! Short-wavelength effective theory around the middle of the band.
//!
//! Linearising `E_k` about `k = pi/2` gives `E^S = omega_pi + 2 xi k` with
//! `omega_pi = omega - pi xi`. The field splits into chiral movers obeying
//! `-2i xi u_R' = (E - omega_pi) u_R` and `2i xi u_L' = (E - omega_pi) u_L`
//! away from the atoms. Each atom adds `J G^S delta(x -+ d) u` with
//! `u = u_L + u_R`, so `u_R` jumps by `-i (J G / 2 xi) u` and `u_L` by
//! `+i (J G / 2 xi) u`. The field entering the jump is taken from the region
//! between the atoms.
//!
//! ```text
//! u_R(x) = 0             x < -d      u_L(x) = t_L e^{-ikx}   x < -d
//!          e^{ikx}      |x| < d               r_L e^{-ikx}  |x| < d
//!          t_R e^{ikx}   x > d                0              x > d
//! ```

use num_complex::Complex64;

use crate::continuum_long::ContinuumProfile;
use crate::error::{Error, Result};
use crate::model::{IdenticalAtoms, Parity, WaveguideParams};
use crate::newton::{newton, NewtonOptions, NewtonOutcome};
use crate::resonance::{Expansion, Region, I};

/// Branch of `|k|` used everywhere: the analytic continuation from `Re k > 0`.
pub fn short_energy(k: Complex64, wg: &WaveguideParams) -> Complex64 {
    wg.omega_pi() + 2.0 * wg.xi * k
}

pub fn group_velocity(wg: &WaveguideParams) -> f64 {
    2.0 * wg.xi
}

fn inverse_strength(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<Complex64> {
    atoms.require_coupling()?;
    Ok((short_energy(k, wg) - atoms.omega) / (atoms.j * atoms.j))
}

/// `r_L = J G e^{2ikd} / (2 i xi - J G) = e^{2ikd} / (2 i xi (E - Omega)/J^2 - 1)`.
/// Zero coupling gives `r_L = 0`.
pub fn short_r_l(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<Complex64> {
    if atoms.j == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let w = inverse_strength(k, wg, atoms)?;
    let den = 2.0 * I * wg.xi * w - 1.0;
    if den.norm() == 0.0 {
        return Err(Error::SingularMatching { k: k.to_string() });
    }
    Ok((2.0 * I * k * atoms.df()).exp() / den)
}

/// The second expression for `r_L`, obtained from the jump at `-d`:
/// `(2 i xi / (J G) - 1) e^{-2ikd}`. It agrees with [`short_r_l`] only at a
/// resonance.
pub fn short_r_l_alternative(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<Complex64> {
    let w = inverse_strength(k, wg, atoms)?;
    Ok((2.0 * I * wg.xi * w - 1.0) * (-2.0 * I * k * atoms.df()).exp())
}

/// `e^{2ikd} - s (2 i xi (E - Omega)/J^2 - 1)`, with `s = +1` for even parity.
pub fn short_resonance_condition(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    let w = inverse_strength(k, wg, atoms)?;
    Ok((2.0 * I * k * atoms.df()).exp() - parity.sign() * (2.0 * I * wg.xi * w - 1.0))
}

pub fn short_resonance_derivative(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    atoms.require_coupling()?;
    let d = atoms.df();
    Ok(2.0 * I * d * (2.0 * I * k * d).exp() - parity.sign() * 4.0 * I * wg.xi * wg.xi / (atoms.j * atoms.j))
}

/// Residual recomputed through the amplitudes, `(2 i xi w - 1)(r_L - s)`.
pub fn short_residual_from_amplitudes(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    let r_l = short_r_l(k, wg, atoms)?;
    let w = inverse_strength(k, wg, atoms)?;
    Ok((2.0 * I * wg.xi * w - 1.0) * (r_l - parity.sign()))
}

/// Transition energy that makes `k = n pi / d` an exact odd root.
pub fn odd_bound_omega(n: i64, wg: &WaveguideParams, d: usize) -> f64 {
    wg.omega_pi() + 2.0 * wg.xi * (n as f64 * std::f64::consts::PI / d as f64).abs()
}

/// Transition energy that makes `k = (n + 1/2) pi / d` an exact even root.
pub fn even_bound_omega(n: i64, wg: &WaveguideParams, d: usize) -> f64 {
    wg.omega_pi() + 2.0 * wg.xi * ((n as f64 + 0.5) * std::f64::consts::PI / d as f64).abs()
}

/// `Q^S_n = (lambda / d)(delta_pi + 2 xi q_n)` with `delta_pi = omega_pi - Omega`.
pub fn short_mode_shift(n: i64, wg: &WaveguideParams, atoms: &IdenticalAtoms, parity: Parity) -> Result<f64> {
    atoms.require_coupling()?;
    parity.check_mode(n, atoms.d)?;
    let q = parity.mode_q(n, atoms.d);
    Ok(atoms.lambda(wg) / atoms.df() * (wg.omega_pi() - atoms.omega + 2.0 * wg.xi * q))
}

/// Second-order wave number in the short-wavelength regime.
///
/// * printed: `q - (J / 2d) Q + d Q^2 + i xi (lambda / d) Q`,
/// * pattern-consistent: `q - Q/2 + d Q^2 + i xi (lambda / d) Q`,
/// * corrected: `q - Q/2 + (lambda xi / 2d) Q - i (d / 4) Q^2`.
pub fn short_perturbative_k(
    n: i64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
    expansion: Expansion,
) -> Result<Complex64> {
    let qs = short_mode_shift(n, wg, atoms, parity)?;
    let q = parity.mode_q(n, atoms.d);
    let d = atoms.df();
    let lambda = atoms.lambda(wg);
    Ok(match expansion {
        Expansion::Printed => Complex64::new(q - atoms.j / (2.0 * d) * qs + d * qs * qs, wg.xi * lambda / d * qs),
        Expansion::PatternConsistent => Complex64::new(q - 0.5 * qs + d * qs * qs, wg.xi * lambda / d * qs),
        Expansion::Corrected => Complex64::new(q - 0.5 * qs + lambda * wg.xi / (2.0 * d) * qs, -0.25 * d * qs * qs),
    })
}

pub fn short_newton(
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
                short_resonance_condition(k, wg, atoms, parity).unwrap_or(nan),
                short_resonance_derivative(k, wg, atoms, parity).unwrap_or(nan),
            )
        },
        seed,
        NewtonOptions::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortWaveState {
    pub n: i64,
    pub parity: Parity,
    pub k: Complex64,
    pub k_perturbative: Complex64,
    pub r_l: Complex64,
    pub t_r: Complex64,
    pub t_l: Complex64,
    pub qn_shift: f64,
    pub omega_pi: f64,
    pub delta_pi: f64,
    pub energy: Complex64,
    pub group_velocity: f64,
    pub residual: f64,
}

impl ShortWaveState {
    /// Largest violation of `t_R = r_L e^{-2ikd} + 1` and `t_L = r_L + e^{-2ikd}`.
    pub fn amplitude_mismatch(&self, d: usize) -> f64 {
        let back = (-2.0 * I * self.k * d as f64).exp();
        (self.t_r - self.r_l * back - 1.0)
            .norm()
            .max((self.t_l - self.r_l - back).norm())
    }
}

/// Builds the chiral amplitudes at `k`.
pub fn short_amplitudes(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
) -> Result<(Complex64, Complex64, Complex64)> {
    let r_l = short_r_l(k, wg, atoms)?;
    let back = (-2.0 * I * k * atoms.df()).exp();
    Ok((r_l, r_l * back + 1.0, r_l + back))
}

pub fn short_resonant_state(
    n: i64,
    parity: Parity,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    expansion: Expansion,
) -> Result<ShortWaveState> {
    let seed = short_perturbative_k(n, wg, atoms, parity, expansion)?;
    let out = short_newton(seed, wg, atoms, parity)?;
    crate::resonance::check_mode_match(n, parity, atoms.d, out.root)?;
    let (r_l, t_r, t_l) = short_amplitudes(out.root, wg, atoms)?;
    Ok(ShortWaveState {
        n,
        parity,
        k: out.root,
        k_perturbative: seed,
        r_l,
        t_r,
        t_l,
        qn_shift: short_mode_shift(n, wg, atoms, parity)?,
        omega_pi: wg.omega_pi(),
        delta_pi: wg.omega_pi() - atoms.omega,
        energy: short_energy(out.root, wg),
        group_velocity: group_velocity(wg),
        residual: out.residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortProfiles {
    pub left: ContinuumProfile,
    pub right: ContinuumProfile,
    pub total: Vec<Complex64>,
    /// Largest transport-equation residual of either mover away from `+-d`.
    pub transport_residual: f64,
}

/// Left mover, right mover and total field on `xgrid`. The continuity slot of
/// each profile holds the jump residual of that mover at `-d` and `+d`; the
/// jump slot holds the sum rule `Delta u_L + Delta u_R = 0`.
pub fn short_profiles(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    xgrid: &[f64],
) -> Result<ShortProfiles> {
    let (r_l, t_r, t_l) = short_amplitudes(k, wg, atoms)?;
    let d = atoms.df();
    let plus = |x: f64| (I * k * x).exp();
    let minus = |x: f64| (-I * k * x).exp();
    let zero = Complex64::new(0.0, 0.0);
    let u_r = |x: f64| {
        if x < -d {
            zero
        } else if x > d {
            t_r * plus(x)
        } else {
            plus(x)
        }
    };
    let u_l = |x: f64| {
        if x < -d {
            t_l * minus(x)
        } else if x > d {
            zero
        } else {
            r_l * minus(x)
        }
    };
    let right: Vec<Complex64> = xgrid.iter().map(|&x| u_r(x)).collect();
    let left: Vec<Complex64> = xgrid.iter().map(|&x| u_l(x)).collect();
    let total: Vec<Complex64> = right.iter().zip(&left).map(|(a, b)| a + b).collect();
    let regions: Vec<Region> = xgrid.iter().map(|&x| Region::of(x, d)).collect();

    // transport equations: (E - omega_pi) u = -+ 2 i xi u'
    let e = short_energy(k, wg) - wg.omega_pi();
    let mut transport: f64 = 0.0;
    for ((&x, ur), ul) in xgrid.iter().zip(&right).zip(&left) {
        if (x.abs() - d).abs() < 1e-12 {
            continue;
        }
        let dur = I * k * ur;
        let dul = -I * k * ul;
        transport = transport
            .max((e * ur + 2.0 * I * wg.xi * dur).norm())
            .max((e * ul - 2.0 * I * wg.xi * dul).norm());
    }

    let inner = |x: f64| plus(x) + r_l * minus(x);
    let peak = total
        .iter()
        .map(|v| v.norm())
        .chain([inner(d).norm(), inner(-d).norm(), 1.0])
        .fold(0.0f64, f64::max);
    transport /= peak * (e.norm() + 2.0 * wg.xi * k.norm()).max(1.0);
    let strength = if atoms.j == 0.0 {
        zero
    } else {
        atoms.j * atoms.j / (short_energy(k, wg) - atoms.omega)
    };
    let kick = -I * strength / (2.0 * wg.xi);
    // jumps (outer minus inner at +d, inner minus outer at -d)
    let jr = [plus(-d), t_r * plus(d) - plus(d)];
    let jl = [r_l * minus(-d) - t_l * minus(-d), -r_l * minus(d)];
    let field = [inner(-d), inner(d)];
    let rel = |z: Complex64| z.norm() / peak;
    let right_jump = [rel(jr[0] - kick * field[0]), rel(jr[1] - kick * field[1])];
    let left_jump = [rel(jl[0] + kick * field[0]), rel(jl[1] + kick * field[1])];
    let sum_rule = [rel(jr[0] + jl[0]), rel(jr[1] + jl[1])];
    Ok(ShortProfiles {
        left: ContinuumProfile {
            x: xgrid.to_vec(),
            values: left,
            regions: regions.clone(),
            continuity_residual: left_jump,
            jump_residual: sum_rule,
        },
        right: ContinuumProfile {
            x: xgrid.to_vec(),
            values: right,
            regions,
            continuity_residual: right_jump,
            jump_residual: sum_rule,
        },
        total,
        transport_residual: transport,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum_long::default_grid;
    use std::f64::consts::PI;

    fn fig9() -> (WaveguideParams, IdenticalAtoms) {
        (
            WaveguideParams::new(5.0, 0.1).unwrap(),
            IdenticalAtoms::new(2.0, 1.0, 8).unwrap(),
        )
    }

    #[test]
    fn closed_form_omegas_give_real_roots() {
        let wg = WaveguideParams::new(5.0, 0.1).unwrap();
        for n in 1..4 {
            let odd = IdenticalAtoms::new(odd_bound_omega(n, &wg, 8), 1.0, 8).unwrap();
            let k = Complex64::new(n as f64 * PI / 8.0, 0.0);
            assert!(short_resonance_condition(k, &wg, &odd, Parity::Odd).unwrap().norm() < 1e-12);
            let even = IdenticalAtoms::new(even_bound_omega(n, &wg, 8), 1.0, 8).unwrap();
            let k = Complex64::new((n as f64 + 0.5) * PI / 8.0, 0.0);
            assert!(short_resonance_condition(k, &wg, &even, Parity::Even).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn zero_coupling_is_a_free_right_mover() {
        let wg = WaveguideParams::new(5.0, 0.1).unwrap();
        let atoms = IdenticalAtoms::new(2.0, 0.0, 8).unwrap();
        let k = Complex64::new(0.4, 0.0);
        assert_eq!(short_r_l(k, &wg, &atoms).unwrap(), Complex64::new(0.0, 0.0));
        let (_, t_r, _) = short_amplitudes(k, &wg, &atoms).unwrap();
        assert!((t_r - 1.0).norm() < 1e-15);
    }

    #[test]
    fn fig9_root_and_profiles() {
        let (wg, atoms) = fig9();
        let st = short_resonant_state(1, Parity::Odd, &wg, &atoms, Expansion::Corrected).unwrap();
        assert!((st.k - Complex64::new(0.36119, -0.00829)).norm() < 1e-4, "{}", st.k);
        assert!(st.amplitude_mismatch(8) < 1e-12);
        let alt = short_r_l_alternative(st.k, &wg, &atoms).unwrap();
        assert!((alt - st.r_l).norm() < 1e-10 * st.r_l.norm().max(1.0));
        let grid = default_grid(8, 1025);
        let prof = short_profiles(st.k, &wg, &atoms, &grid).unwrap();
        for (x, (ur, ul)) in grid.iter().zip(prof.right.values.iter().zip(&prof.left.values)) {
            if *x < -8.0 {
                assert_eq!(ur.norm(), 0.0);
            }
            if *x > 8.0 {
                assert_eq!(ul.norm(), 0.0);
            }
        }
        assert!(prof.transport_residual < 1e-10);
        for r in prof
            .right
            .continuity_residual
            .iter()
            .chain(&prof.left.continuity_residual)
        {
            assert!(*r < 1e-10, "{r}");
        }
    }

    #[test]
    fn plus_d_jump_holds_off_resonance() {
        let (wg, atoms) = fig9();
        let prof = short_profiles(Complex64::new(0.5, -0.05), &wg, &atoms, &[0.0]).unwrap();
        assert!(prof.right.continuity_residual[1] < 1e-12);
        assert!(prof.left.continuity_residual[1] < 1e-12);
        assert!(prof.right.jump_residual.iter().all(|r| *r < 1e-12));
        assert!(prof.right.continuity_residual[0] > 1e-6);
    }

    #[test]
    fn amplitude_route_matches_direct_residual() {
        let (wg, atoms) = fig9();
        for k in [Complex64::new(0.3, -0.01), Complex64::new(0.7, 0.02)] {
            for p in [Parity::Odd, Parity::Even] {
                let a = short_resonance_condition(k, &wg, &atoms, p).unwrap();
                let b = short_residual_from_amplitudes(k, &wg, &atoms, p).unwrap();
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn corrected_expansion_beats_printed() {
        let (wg, atoms) = fig9();
        let root = short_resonant_state(1, Parity::Odd, &wg, &atoms, Expansion::Corrected)
            .unwrap()
            .k;
        let gap = |e| (short_perturbative_k(1, &wg, &atoms, Parity::Odd, e).unwrap() - root).norm();
        assert!(gap(Expansion::Corrected) < gap(Expansion::Printed));
        assert!(gap(Expansion::Corrected) < gap(Expansion::PatternConsistent));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (wg, atoms) = fig9();
        let k = Complex64::new(0.4, -0.03);
        let h = 1e-6;
        let fd = (short_resonance_condition(k + h, &wg, &atoms, Parity::Even).unwrap()
            - short_resonance_condition(k - h, &wg, &atoms, Parity::Even).unwrap())
            / (2.0 * h);
        let an = short_resonance_derivative(k, &wg, &atoms, Parity::Even).unwrap();
        assert!((fd - an).norm() < 1e-6 * an.norm());
    }
}
