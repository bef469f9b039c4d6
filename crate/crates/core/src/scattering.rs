//! Real-k single-photon scattering off two (possibly different) atoms.
//!
//! The amplitudes of the piecewise plane-wave ansatz
//!
//! ```text
//! u(j) = e^{ikj} + r e^{-ikj}      j < -d
//!        A e^{ikj} + B e^{-ikj}    -d < j < d
//!        t e^{ikj}                 j > d
//! ```
//!
//! come from a direct 4x4 solve (continuity at `+-d` plus the lattice equation
//! at each atom site). The atom rows are multiplied through by `E_k - Omega_l`
//! so that a photon resonant with an atom gives the exact `u(+-d) = 0` limit
//! instead of an overflow. The printed closed form for `t` is a cross-check.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{canonical_k, AtomPair, WaveguideParams};

/// `|sin k|` at or below this is treated as a band edge.
pub const BAND_EDGE_SIN: f64 = 1e-6;
/// Relative window on `|E_k - Omega_l|` that counts as exact resonance.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Condition estimate above which the 4x4 system is reported singular.
pub const MAX_CONDITION: f64 = 1e13;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScatterFlags {
    /// Atom `l` is exactly resonant with the photon (`t = 0` limit taken).
    pub resonant_atom: [bool; 2],
    /// `|sin k|` too small to evaluate; total reflection reported.
    pub band_edge: bool,
}

impl ScatterFlags {
    pub fn any(&self) -> bool {
        self.band_edge || self.resonant_atom.iter().any(|&b| b)
    }

    pub fn label(&self) -> &'static str {
        match (self.band_edge, self.resonant_atom) {
            (true, _) => "band_edge",
            (false, [true, true]) => "resonant_both",
            (false, [true, false]) => "resonant_atom1",
            (false, [false, true]) => "resonant_atom2",
            _ => "ok",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSolution {
    pub k: f64,
    pub r: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub t: Complex64,
    /// `G_l = J_l / (E_k - Omega_l)`; infinite for a resonant atom.
    pub greens: [f64; 2],
    pub flags: ScatterFlags,
}

impl ScatteringSolution {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    /// Photon amplitude at lattice site `j`.
    pub fn amplitude(&self, j: i64, d: usize) -> Complex64 {
        let d = d as i64;
        let e = |m: i64| Complex64::from_polar(1.0, self.k * m as f64);
        if j < -d {
            e(j) + self.r * e(-j)
        } else if j > d {
            self.t * e(j)
        } else {
            self.a * e(j) + self.b * e(-j)
        }
    }
}

fn coupling_strength(j: f64, detuning: f64) -> f64 {
    if j == 0.0 {
        0.0
    } else {
        j * j / detuning
    }
}

fn is_resonant(wg: &WaveguideParams, atoms: &AtomPair, atom: usize, e_k: f64) -> bool {
    let j = atoms.coupling(atom);
    j > 0.0 && (e_k - atoms.transition(atom)).abs() < RESONANCE_TOL * wg.xi.max(j)
}

fn check_k(k: f64) -> Result<f64> {
    let k = canonical_k(k)?;
    if k <= 0.0 || k >= PI {
        return Err(Error::WaveNumberOutOfRange { k });
    }
    Ok(k)
}

/// Solves for `(r, A, B, t)` at real `k`.
///
/// Negative `k` is mapped to `|k|`. Near the band edges the solution is not
/// evaluated; it is flagged and reported as total reflection.
pub fn solve_scattering(k: f64, wg: &WaveguideParams, atoms: &AtomPair) -> Result<ScatteringSolution> {
    atoms.validate()?;
    let k = canonical_k(k)?;
    let e_k = wg.dispersion(k);
    let uncoupled = atoms.j1 == 0.0 && atoms.j2 == 0.0;
    let detunings = [e_k - atoms.omega1, e_k - atoms.omega2];
    let greens = [0, 1].map(|l| {
        let j = atoms.coupling(l);
        if j == 0.0 {
            0.0
        } else {
            j / detunings[l]
        }
    });
    let mut flags = ScatterFlags {
        resonant_atom: [0, 1].map(|l| is_resonant(wg, atoms, l, e_k)),
        band_edge: k.sin().abs() <= BAND_EDGE_SIN,
    };

    if uncoupled {
        let one = Complex64::new(1.0, 0.0);
        flags.resonant_atom = [false; 2];
        return Ok(ScatteringSolution {
            k,
            r: Complex64::new(0.0, 0.0),
            a: one,
            b: Complex64::new(0.0, 0.0),
            t: one,
            greens,
            flags,
        });
    }
    if flags.band_edge {
        let zero = Complex64::new(0.0, 0.0);
        return Ok(ScatteringSolution {
            k,
            r: Complex64::new(-1.0, 0.0),
            a: zero,
            b: zero,
            t: zero,
            greens,
            flags,
        });
    }

    let d = atoms.d as f64;
    let e = |m: f64| Complex64::from_polar(1.0, k * m);
    // Row factors for the atom sites: (E-w)(E-W_l) - J_l^2 and xi (E-W_l).
    let row = |l: usize| -> (Complex64, Complex64) {
        let j = atoms.coupling(l);
        let scale = if j == 0.0 {
            1.0
        } else if flags.resonant_atom[l] {
            0.0
        } else {
            detunings[l]
        };
        let c = (e_k - wg.omega) * scale - j * j;
        (Complex64::new(c, 0.0), Complex64::new(wg.xi * scale, 0.0))
    };
    let (c1, h1) = row(0);
    let (c2, h2) = row(1);
    let zero = Complex64::new(0.0, 0.0);

    #[rustfmt::skip]
    let m = Matrix4::new(
        e(d),          -e(-d),                       -e(d),                        zero,
        zero,          e(d),                         e(-d),                        -e(d),
        h1 * e(d + 1.0), c1 * e(-d) + h1 * e(-d + 1.0), c1 * e(d) + h1 * e(d - 1.0), zero,
        zero,          h2 * e(d - 1.0),              h2 * e(-d + 1.0),             c2 * e(d) + h2 * e(d + 1.0),
    );
    let rhs = Vector4::new(-e(-d), zero, -h1 * e(-d - 1.0), zero);

    let inverse = m.try_inverse().ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    let condition = one_norm(&m) * one_norm(&inverse);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularSystem { condition });
    }
    let x = m.lu().solve(&rhs).ok_or(Error::SingularSystem { condition })?;
    let mut t = x[3];
    if flags.resonant_atom.iter().any(|&b| b) {
        t = zero;
    }
    Ok(ScatteringSolution {
        k,
        r: x[0],
        a: x[1],
        b: x[2],
        t,
        greens,
        flags,
    })
}

fn one_norm(m: &Matrix4<Complex64>) -> f64 {
    (0..4)
        .map(|c| (0..4).map(|r| m[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Closed-form transmission amplitude for two atoms,
/// `t = 4 xi^2 sin^2 k / [(e^{4ikd} - 1) g1 g2 + 2 i xi sin k (g1 + g2) + 4 xi^2 sin^2 k]`
/// with `g_l = J_l G_l`. Resonant atoms and band edges return `0`.
pub fn transmission_closed_form(k: f64, wg: &WaveguideParams, atoms: &AtomPair) -> Result<Complex64> {
    atoms.validate()?;
    let k = canonical_k(k)?;
    if atoms.j1 == 0.0 && atoms.j2 == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let e_k = wg.dispersion(k);
    if k.sin().abs() <= BAND_EDGE_SIN || (0..2).any(|l| is_resonant(wg, atoms, l, e_k)) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g1 = coupling_strength(atoms.j1, e_k - atoms.omega1);
    let g2 = coupling_strength(atoms.j2, e_k - atoms.omega2);
    let s = wg.xi * k.sin();
    let phase = Complex64::from_polar(1.0, 4.0 * k * atoms.d as f64);
    let num = 4.0 * s * s;
    let den = (phase - 1.0) * g1 * g2 + 2.0 * I * s * (g1 + g2) + num;
    Ok(num / den)
}

/// `T = |t|^2` for identical atoms:
/// `T = {1 + (JG)^2 [JG sin(2kd) / (2 xi^2 sin^2 k) + cos(2kd) / (xi sin k)]^2}^-1`.
pub fn transmission_identical(k: f64, wg: &WaveguideParams, big_omega: f64, j: f64, d: usize) -> Result<f64> {
    let atoms = AtomPair::identical(big_omega, j, d)?;
    let k = check_k(k)?;
    if j == 0.0 {
        return Ok(1.0);
    }
    let e_k = wg.dispersion(k);
    if k.sin().abs() <= BAND_EDGE_SIN || is_resonant(wg, &atoms, 0, e_k) {
        return Ok(0.0);
    }
    let g = coupling_strength(j, e_k - big_omega);
    let s = k.sin();
    let two_kd = 2.0 * k * d as f64;
    let bracket = g * two_kd.sin() / (2.0 * wg.xi * wg.xi * s * s) + two_kd.cos() / (wg.xi * s);
    Ok(1.0 / (1.0 + g * g * bracket * bracket))
}

/// Weak-coupling form of `t` with the photon energy replaced by the cavity
/// frequency inside the Green functions, `G_l = J_l / delta_l`.
pub fn transmission_weak_coupling_approx(k: f64, wg: &WaveguideParams, atoms: &AtomPair) -> Result<Complex64> {
    atoms.validate()?;
    let k = canonical_k(k)?;
    let mut h = [0.0; 2];
    for (l, slot) in h.iter_mut().enumerate() {
        let j = atoms.coupling(l);
        if j == 0.0 {
            continue;
        }
        let delta = wg.omega - atoms.transition(l);
        if delta == 0.0 {
            return Err(Error::ZeroDetuning { atom: l + 1 });
        }
        *slot = j * j / (2.0 * wg.xi * delta);
    }
    if h == [0.0; 2] {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let s = k.sin();
    let phase = Complex64::from_polar(1.0, 4.0 * k * atoms.d as f64);
    let num = s * s;
    let den = (phase - 1.0) * h[0] * h[1] + I * s * (h[0] + h[1]) + num;
    if den.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Well,
    Barrier,
    InfiniteWell,
    InfiniteBarrier,
}

impl PotentialKind {
    fn finite(strength: f64) -> Self {
        if strength < 0.0 {
            PotentialKind::Well
        } else {
            PotentialKind::Barrier
        }
    }

    fn infinite(approach: Approach) -> Self {
        match approach {
            Approach::FromBelow => PotentialKind::InfiniteWell,
            Approach::FromAbove => PotentialKind::InfiniteBarrier,
        }
    }
}

/// Side from which the photon energy reaches an atomic transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    FromBelow,
    FromAbove,
}

/// The seven photon-energy regimes `a`..`g` for `Omega_1 <= Omega_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeCase {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl RegimeCase {
    pub fn label(self) -> char {
        match self {
            RegimeCase::A => 'a',
            RegimeCase::B => 'b',
            RegimeCase::C => 'c',
            RegimeCase::D => 'd',
            RegimeCase::E => 'e',
            RegimeCase::F => 'f',
            RegimeCase::G => 'g',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialRegime {
    pub case: RegimeCase,
    pub left_kind: PotentialKind,
    pub right_kind: PotentialKind,
    /// Effective delta strengths `J_l G_l` (signed, infinite at resonance).
    pub strengths: [f64; 2],
    /// The input had `Omega_1 > Omega_2` and was mirrored before classifying.
    pub swapped: bool,
}

/// Classifies the effective double-delta potential seen at photon energy `e_k`.
///
/// `approach` only matters when `e_k` sits on a transition, where it decides
/// between an infinite well (coming from below) and an infinite barrier.
pub fn classify_regime(e_k: f64, wg: &WaveguideParams, atoms: &AtomPair, approach: Approach) -> PotentialRegime {
    let (atoms, swapped) = if atoms.omega1 > atoms.omega2 {
        (atoms.swapped(), true)
    } else {
        (*atoms, false)
    };
    let on = [0, 1].map(|l| {
        let j = atoms.coupling(l);
        (e_k - atoms.transition(l)).abs() < RESONANCE_TOL * wg.xi.max(j)
    });
    let strengths = [0, 1].map(|l| {
        let j = atoms.coupling(l);
        if on[l] {
            match approach {
                Approach::FromBelow => f64::NEG_INFINITY,
                Approach::FromAbove => f64::INFINITY,
            }
        } else {
            coupling_strength(j, e_k - atoms.transition(l))
        }
    });
    let kind = |l: usize| {
        if on[l] {
            PotentialKind::infinite(approach)
        } else {
            PotentialKind::finite(strengths[l])
        }
    };
    let case = if on[0] {
        match approach {
            Approach::FromBelow => RegimeCase::B,
            Approach::FromAbove => RegimeCase::C,
        }
    } else if on[1] {
        match approach {
            Approach::FromBelow => RegimeCase::E,
            Approach::FromAbove => RegimeCase::F,
        }
    } else if e_k < atoms.omega1 {
        RegimeCase::A
    } else if e_k < atoms.omega2 {
        RegimeCase::D
    } else {
        RegimeCase::G
    };
    PotentialRegime {
        case,
        left_kind: kind(0),
        right_kind: kind(1),
        strengths,
        swapped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub k: f64,
    pub transmission: f64,
    /// `|r|^2`, computed from the reflected amplitude rather than `1 - T`.
    pub reflection: f64,
    pub flags: ScatterFlags,
}

/// Transmission and reflection over a k-grid, evaluated in parallel and
/// returned in grid order.
pub fn spectrum_sweep(kgrid: &[f64], wg: &WaveguideParams, atoms: &AtomPair) -> Result<Vec<SpectrumPoint>> {
    kgrid
        .par_iter()
        .map(|&k| {
            let sol = solve_scattering(k, wg, atoms)?;
            Ok(SpectrumPoint {
                k,
                transmission: sol.transmission(),
                reflection: sol.reflection(),
                flags: sol.flags,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_scatter, LatticeProblem};

    fn fig3(panel: char) -> (WaveguideParams, AtomPair) {
        let wg = WaveguideParams::new(5.0, 1.0).unwrap();
        let atoms = match panel {
            'a' => AtomPair::new(8.0, 8.0, 0.5, 0.7, 10),
            'b' => AtomPair::new(2.0, 8.0, 0.7, 2.0, 10),
            'c' => AtomPair::new(2.0, 8.0, 0.7, 2.6, 10),
            _ => AtomPair::new(2.0, 2.7, 0.5, 3.0, 10),
        }
        .unwrap();
        (wg, atoms)
    }

    #[test]
    fn no_scatterers_transmit_fully() {
        let wg = WaveguideParams::new(5.0, 1.0).unwrap();
        let atoms = AtomPair::new(4.0, 6.0, 0.0, 0.0, 3).unwrap();
        for k in [0.2, 1.0, 2.9] {
            let sol = solve_scattering(k, &wg, &atoms).unwrap();
            assert_eq!(sol.t, Complex64::new(1.0, 0.0));
            assert_eq!(sol.r, Complex64::new(0.0, 0.0));
            assert_eq!(
                transmission_closed_form(k, &wg, &atoms).unwrap(),
                Complex64::new(1.0, 0.0)
            );
            assert_eq!(transmission_identical(k, &wg, 4.0, 0.0, 3).unwrap(), 1.0);
        }
    }

    #[test]
    fn resonant_atom_blocks_transmission() {
        let wg = WaveguideParams::new(5.0, 1.0).unwrap();
        let atoms = AtomPair::new(5.5, 8.0, 0.6, 0.4, 4).unwrap();
        let k = crate::model::wavenumber_from_energy(5.5, &wg).unwrap();
        let sol = solve_scattering(k, &wg, &atoms).unwrap();
        assert!(sol.flags.resonant_atom[0]);
        assert_eq!(sol.t, Complex64::new(0.0, 0.0));
        assert!((sol.r.norm() - 1.0).abs() < 1e-12);
        // first atom is a node: incident + reflected cancel at j = -d
        assert!(sol.amplitude(-4, 4).norm() < 1e-12);
    }

    #[test]
    fn fig3a_matches_lattice_oracle() {
        let (wg, atoms) = fig3('a');
        let k = PI / 2.0;
        let sol = solve_scattering(k, &wg, &atoms).unwrap();
        let oracle = oracle_scatter(&LatticeProblem::new(1000, wg, atoms, k).unwrap()).unwrap();
        assert!((sol.t - oracle.t).norm() < 1e-8);
        assert!((sol.r - oracle.r).norm() < 1e-8);
        let closed = transmission_closed_form(k, &wg, &atoms).unwrap();
        assert!((sol.t - closed).norm() < 1e-10);
    }

    #[test]
    fn fig3d_is_reflection_dominated_at_band_centre() {
        let (wg, atoms) = fig3('d');
        let t = transmission_closed_form(PI / 2.0, &wg, &atoms).unwrap();
        let oracle = oracle_scatter(&LatticeProblem::new(500, wg, atoms, PI / 2.0).unwrap()).unwrap();
        assert!((t - oracle.t).norm() < 1e-8);
        // reflection dominates; the oracle gives T = 0.2003 here
        assert!(
            (t.norm_sqr() - 0.200_290_144_105_782).abs() < 1e-10,
            "T = {}",
            t.norm_sqr()
        );
    }

    #[test]
    fn identical_formula_matches_oracle() {
        let wg = WaveguideParams::new(10.0, 0.2).unwrap();
        let atoms = AtomPair::identical(10.0, 1.0, 10).unwrap();
        let k = 0.9;
        let tt = transmission_identical(k, &wg, 10.0, 1.0, 10).unwrap();
        let oracle = oracle_scatter(&LatticeProblem::new(500, wg, atoms, k).unwrap()).unwrap();
        assert!((tt - oracle.t.norm_sqr()).abs() < 1e-10);
        let closed = transmission_closed_form(k, &wg, &atoms).unwrap();
        assert!((tt - closed.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn resonant_tunnelling_condition_gives_full_transmission() {
        // tan(2kd) = -2 xi sin k / (J G_k), multiplied through by E_k - Omega
        let wg = WaveguideParams::new(10.0, 0.2).unwrap();
        let (big_omega, j, d) = (9.0, 0.5, 6);
        let f = |k: f64| {
            let det = wg.dispersion(k) - big_omega;
            (2.0 * k * d as f64).sin() * j * j + 2.0 * wg.xi * k.sin() * (2.0 * k * d as f64).cos() * det
        };
        let cells: Vec<f64> = (1..400).map(|i| i as f64 * PI / 400.0).collect();
        let c = cells
            .windows(2)
            .find(|w| f(w[0]) * f(w[1]) < 0.0)
            .expect("a sign change");
        let (mut lo, mut hi) = (c[0], c[1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t = transmission_identical(0.5 * (lo + hi), &wg, big_omega, j, d).unwrap();
        assert!((t - 1.0).abs() < 1e-10, "T = {t}");
    }

    #[test]
    fn band_edges_reflect_totally() {
        let (wg, atoms) = fig3('a');
        for k in [1e-9, PI - 1e-9] {
            assert!(transmission_closed_form(k, &wg, &atoms).unwrap().norm() < 1e-12);
            let sol = solve_scattering(k, &wg, &atoms).unwrap();
            assert!(sol.flags.band_edge);
            assert_eq!(sol.reflection(), 1.0);
        }
        // the closed form itself goes to zero approaching the edge
        let near = transmission_closed_form(1e-4, &wg, &atoms).unwrap().norm();
        let nearer = transmission_closed_form(1e-5, &wg, &atoms).unwrap().norm();
        assert!(near < 1e-2 && nearer < 0.2 * near, "{near} {nearer}");
    }

    #[test]
    fn weak_coupling_form_tracks_exact_ordering() {
        let (wg, b) = fig3('b');
        let (_, c) = fig3('c');
        let grid: Vec<f64> = (1..200).map(|i| i as f64 * PI / 200.0).collect();
        let mean = |f: &dyn Fn(f64) -> f64| grid.iter().map(|&k| f(k)).sum::<f64>() / grid.len() as f64;
        let approx_b = mean(&|k| transmission_weak_coupling_approx(k, &wg, &b).unwrap().norm_sqr());
        let approx_c = mean(&|k| transmission_weak_coupling_approx(k, &wg, &c).unwrap().norm_sqr());
        let exact_b = mean(&|k| transmission_closed_form(k, &wg, &b).unwrap().norm_sqr());
        let exact_c = mean(&|k| transmission_closed_form(k, &wg, &c).unwrap().norm_sqr());
        assert!(approx_c < approx_b);
        assert!(exact_c < exact_b);
    }

    #[test]
    fn weak_coupling_strong_limit_reflects() {
        let wg = WaveguideParams::new(5.0, 0.1).unwrap();
        let atoms = AtomPair::new(2.0, 8.0, 2.0, 2.0, 5).unwrap();
        let t = transmission_weak_coupling_approx(1.0, &wg, &atoms).unwrap();
        assert!(t.norm_sqr() < 1e-2);
        let zero_det = AtomPair::new(5.0, 8.0, 1.0, 1.0, 5).unwrap();
        assert!(matches!(
            transmission_weak_coupling_approx(1.0, &wg, &zero_det),
            Err(Error::ZeroDetuning { atom: 1 })
        ));
        let uncoupled = AtomPair::new(5.0, 5.0, 0.0, 0.0, 5).unwrap();
        assert_eq!(transmission_weak_coupling_approx(1.0, &wg, &uncoupled).unwrap().re, 1.0);
    }

    #[test]
    fn regimes_follow_the_seven_cases() {
        let wg = WaveguideParams::new(5.0, 1.0).unwrap();
        let atoms = AtomPair::new(5.0, 6.0, 0.5, 0.5, 3).unwrap();
        let r = classify_regime(4.0, &wg, &atoms, Approach::FromBelow);
        assert_eq!(
            (r.case, r.left_kind, r.right_kind),
            (RegimeCase::A, PotentialKind::Well, PotentialKind::Well)
        );

        let atoms = AtomPair::new(2.0, 8.0, 0.5, 0.5, 3).unwrap();
        let r = classify_regime(5.0, &wg, &atoms, Approach::FromBelow);
        assert_eq!(
            (r.case, r.left_kind, r.right_kind),
            (RegimeCase::D, PotentialKind::Barrier, PotentialKind::Well)
        );
        let r = classify_regime(8.0, &wg, &atoms, Approach::FromBelow);
        assert_eq!((r.case, r.right_kind), (RegimeCase::E, PotentialKind::InfiniteWell));
        let r = classify_regime(8.0, &wg, &atoms, Approach::FromAbove);
        assert_eq!((r.case, r.right_kind), (RegimeCase::F, PotentialKind::InfiniteBarrier));
        let r = classify_regime(2.0, &wg, &atoms, Approach::FromAbove);
        assert_eq!((r.case, r.left_kind), (RegimeCase::C, PotentialKind::InfiniteBarrier));
        let r = classify_regime(9.0, &wg, &atoms, Approach::FromAbove);
        assert_eq!(
            (r.case, r.left_kind, r.right_kind),
            (RegimeCase::G, PotentialKind::Barrier, PotentialKind::Barrier)
        );

        let r = classify_regime(5.0, &wg, &atoms.swapped(), Approach::FromBelow);
        assert!(r.swapped);
        assert_eq!(r.case, RegimeCase::D);
    }

    #[test]
    fn sweep_reports_r_independently() {
        let (wg, atoms) = fig3('a');
        let grid: Vec<f64> = (0..=64).map(|i| -PI + i as f64 * PI / 32.0).collect();
        let pts = spectrum_sweep(&grid, &wg, &atoms).unwrap();
        assert_eq!(pts.len(), grid.len());
        for p in &pts {
            assert!((p.reflection - (1.0 - p.transmission)).abs() < 1e-10);
        }
        assert!(pts[0].flags.band_edge && pts[32].flags.band_edge);
        // mostly transmitting
        let mean_t = pts.iter().map(|p| p.transmission).sum::<f64>() / pts.len() as f64;
        assert!(mean_t > 0.7, "{mean_t}");
    }

    #[test]
    fn well_and_barrier_transmit_equally_at_band_centre() {
        let wg = WaveguideParams::new(5.0, 1.0).unwrap();
        let k = PI / 2.0;
        let well = AtomPair::identical(6.5, 0.8, 4).unwrap();
        let barrier = AtomPair::identical(3.5, 0.8, 4).unwrap();
        let tw = solve_scattering(k, &wg, &well).unwrap().t;
        let tb = solve_scattering(k, &wg, &barrier).unwrap().t;
        assert!((tw.norm_sqr() - tb.norm_sqr()).abs() < 1e-12);
        assert!((tw.arg() - tb.arg()).abs() > 1e-3);
    }
}
