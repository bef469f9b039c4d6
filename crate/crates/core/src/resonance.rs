//! Quasi-bound states of the cavity formed between two identical atoms.
//!
//! A resonance is a complex wave number `k` at which the lattice equation has
//! a solution with only outgoing waves outside the atoms:
//!
//! ```text
//! u(j) = C e^{-ikj}                   j < -d
//!        A_b e^{ikj} + B_b e^{-ikj}   -d < j < d
//!        D e^{ikj}                    j > d
//! ```
//!
//! Matching at both atoms gives `e^{2ikd} = s (2 i xi sin k / (J G_k) - 1)`
//! with `s = +1` for even and `s = -1` for odd states. Everything here is
//! written in terms of `1 / (J G_k) = (E_k - Omega) / J^2`, which is entire in
//! `k`, so `E_k = Omega` (the perfect-mirror point) needs no special casing.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{IdenticalAtoms, Parity, WaveguideParams};
use crate::newton::{newton, NewtonOptions, NewtonOutcome};
use crate::oracle::{lattice_residual, oracle_root_scan, winding_number, Rect};

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which second-order expansion of a resonant wave number to evaluate.
///
/// `Printed` is the published expansion. Its second-order terms are not the
/// Taylor coefficients of the root, so it converges only like `lambda^2`.
/// `Corrected` carries the actual second-order terms and leaves a cubic
/// remainder. `PatternConsistent` only differs from `Printed` in the
/// short-wavelength regime, where the published first-order coefficient is
/// replaced by the `-Q/2` used everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Expansion {
    Printed,
    PatternConsistent,
    #[default]
    Corrected,
}

impl Expansion {
    pub fn as_str(self) -> &'static str {
        match self {
            Expansion::Printed => "printed",
            Expansion::PatternConsistent => "pattern",
            Expansion::Corrected => "corrected",
        }
    }
}

impl std::str::FromStr for Expansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "printed" => Ok(Expansion::Printed),
            "pattern" | "pattern-consistent" => Ok(Expansion::PatternConsistent),
            "corrected" => Ok(Expansion::Corrected),
            other => Err(crate::error::invalid(
                "expansion",
                format!("expected printed, pattern or corrected, got `{other}`"),
            )),
        }
    }
}

/// Where a lattice site sits relative to the two atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Left,
    Inside,
    Right,
}

impl Region {
    pub fn of(x: f64, d: f64) -> Self {
        if x < -d {
            Region::Left
        } else if x > d {
            Region::Right
        } else {
            Region::Inside
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Left => "left",
            Region::Inside => "inside",
            Region::Right => "right",
        }
    }
}

/// How the outgoing tails behave away from the atoms, read off `Im k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailBehaviour {
    /// `Im k < 0`: outgoing waves grow with distance (a decaying, leaky state).
    Growing,
    /// `Im k > 0`: tails decay with distance.
    Decaying,
    /// Real `k` within tolerance.
    Bounded,
}

impl TailBehaviour {
    pub fn from_k(k: Complex64) -> Self {
        if k.im.abs() <= 1e-12 * k.re.abs().max(1.0) {
            TailBehaviour::Bounded
        } else if k.im < 0.0 {
            TailBehaviour::Growing
        } else {
            TailBehaviour::Decaying
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TailBehaviour::Growing => "growing",
            TailBehaviour::Decaying => "decaying",
            TailBehaviour::Bounded => "bounded",
        }
    }
}

/// `1 / (J G_k) = (E_k - Omega) / J^2` at complex `k`.
pub fn inverse_strength(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<Complex64> {
    atoms.require_coupling()?;
    Ok((wg.dispersion_complex(k) - atoms.omega) / (atoms.j * atoms.j))
}

/// `2 i xi sin k / (J G_k) - 1`, the bracket of the parity condition.
fn bracket(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<Complex64> {
    Ok(2.0 * I * wg.xi * k.sin() * inverse_strength(k, wg, atoms)? - 1.0)
}

/// `e^{2ikd} - s (2 i xi sin k / (J G_k) - 1)`.
pub fn parity_condition_residual(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    let phase = (2.0 * I * k * atoms.df()).exp();
    Ok(phase - parity.sign() * bracket(k, wg, atoms)?)
}

/// Analytic `k`-derivative of [`parity_condition_residual`].
pub fn parity_condition_derivative(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    atoms.require_coupling()?;
    let d = atoms.df();
    let phase = (2.0 * I * k * d).exp();
    let det = wg.dispersion_complex(k) - atoms.omega;
    let s = k.sin();
    let inner = k.cos() * det + 2.0 * wg.xi * s * s;
    Ok(2.0 * I * d * phase - parity.sign() * 2.0 * I * wg.xi * inner / (atoms.j * atoms.j))
}

/// Partial derivative of the residual with respect to `Omega`.
pub fn parity_condition_omega_derivative(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<Complex64> {
    atoms.require_coupling()?;
    Ok(parity.sign() * 2.0 * I * wg.xi * k.sin() / (atoms.j * atoms.j))
}

/// Amplitude ratios relative to `A_b = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeRatios {
    /// `B_b / A_b` from matching at `+d`.
    pub b_right: Complex64,
    /// `B_b / A_b` from matching at `-d`.
    pub b_left: Complex64,
    /// `C / A_b`, the left outgoing amplitude.
    pub c: Complex64,
    /// `D / A_b`, the right outgoing amplitude.
    pub dd: Complex64,
}

impl AmplitudeRatios {
    /// Disagreement of the two routes to `B_b / A_b`; zero exactly at a root.
    pub fn mismatch(&self) -> f64 {
        (self.b_right - self.b_left).norm()
    }
}

/// Ratios from continuity plus the lattice equation at each atom:
/// `b = e^{2ikd} / X` (at `+d`), `b = X e^{-2ikd}` (at `-d`),
/// `c = 2 i xi sin k e^{-2ikd} / (J G_k)` and `dd = (X + 1) / X` with
/// `X = 2 i xi sin k / (J G_k) - 1`.
pub fn amplitude_ratios(k: Complex64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<AmplitudeRatios> {
    let x = bracket(k, wg, atoms)?;
    if x.norm() == 0.0 {
        return Err(Error::SingularMatching { k: k.to_string() });
    }
    let phase = (2.0 * I * k * atoms.df()).exp();
    Ok(AmplitudeRatios {
        b_right: phase / x,
        b_left: x / phase,
        c: (x + 1.0) / phase,
        dd: (x + 1.0) / x,
    })
}

/// Which matching condition supplies `B_b / A_b` when recomputing the
/// residual from amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingSide {
    Right,
    Left,
}

/// The parity residual rebuilt from one amplitude route:
/// `X (b_right - s)` or `-s e^{2ikd} (b_left - s)`. Both equal
/// [`parity_condition_residual`] identically.
pub fn residual_from_amplitudes(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
    side: MatchingSide,
) -> Result<Complex64> {
    let ratios = amplitude_ratios(k, wg, atoms)?;
    let s = parity.sign();
    Ok(match side {
        MatchingSide::Right => bracket(k, wg, atoms)? * (ratios.b_right - s),
        MatchingSide::Left => -s * (2.0 * I * k * atoms.df()).exp() * (ratios.b_left - s),
    })
}

/// First-order shift `Q_n = (lambda / d)(delta - 2 xi cos q_n) sin q_n`.
pub fn mode_shift(n: i64, wg: &WaveguideParams, atoms: &IdenticalAtoms, parity: Parity) -> Result<f64> {
    atoms.require_coupling()?;
    parity.check_mode(n, atoms.d)?;
    let q = parity.mode_q(n, atoms.d);
    let delta = wg.omega - atoms.omega;
    Ok(atoms.lambda(wg) / atoms.df() * (delta - 2.0 * wg.xi * q.cos()) * q.sin())
}

/// Real wave number to first order, `k_re = q_n - Q_n / 2`.
pub fn perturbative_k_real(n: i64, wg: &WaveguideParams, atoms: &IdenticalAtoms, parity: Parity) -> Result<f64> {
    let q = parity.mode_q(n, atoms.d);
    Ok(q - 0.5 * mode_shift(n, wg, atoms, parity)?)
}

/// Complex wave number to second order in `lambda`.
///
/// With `f(q) = (delta - 2 xi cos q) sin q` and `Q = (lambda / d) f(q_n)`:
/// * printed: `q - Q/2 + d Q^2 + i (lambda / 2d) Q f'(q)`,
/// * corrected: `q - Q/2 + (lambda / 4d) Q f'(q) - i (d / 4) Q^2`,
///
/// where `f'(q) = delta cos q - 2 xi cos 2q`.
pub fn perturbative_k_complex(
    n: i64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
    expansion: Expansion,
) -> Result<Complex64> {
    let q_shift = mode_shift(n, wg, atoms, parity)?;
    let q = parity.mode_q(n, atoms.d);
    let d = atoms.df();
    let lambda = atoms.lambda(wg);
    let slope = (wg.omega - atoms.omega) * q.cos() - 2.0 * wg.xi * (2.0 * q).cos();
    Ok(match expansion {
        Expansion::Printed | Expansion::PatternConsistent => Complex64::new(
            q - 0.5 * q_shift + d * q_shift * q_shift,
            lambda / (2.0 * d) * q_shift * slope,
        ),
        Expansion::Corrected => Complex64::new(
            q - 0.5 * q_shift + lambda / (4.0 * d) * q_shift * slope,
            -0.25 * d * q_shift * q_shift,
        ),
    })
}

/// Newton iteration on the parity condition with the analytic derivative.
pub fn newton_resonance(
    seed: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
) -> Result<NewtonOutcome> {
    atoms.require_coupling()?;
    newton(
        |k| {
            (
                parity_condition_residual(k, wg, atoms, parity).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                parity_condition_derivative(k, wg, atoms, parity).unwrap_or(Complex64::new(f64::NAN, 0.0)),
            )
        },
        seed,
        NewtonOptions::default(),
    )
}

/// Rejects a root whose real part strays more than `pi / 2d` from `q_n`.
pub fn check_mode_match(n: i64, parity: Parity, d: usize, k: Complex64) -> Result<()> {
    let q = parity.mode_q(n, d);
    if (k.re - q).abs() > PI / (2.0 * d as f64) {
        return Err(Error::WrongMode { n, k_re: k.re, q });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantState {
    pub n: i64,
    pub parity: Parity,
    pub k: Complex64,
    pub qn: f64,
    /// First-order shift `Q_n`.
    pub qn_shift: f64,
    /// Expansion used as the Newton seed.
    pub k_perturbative: Complex64,
    pub amplitudes: AmplitudeRatios,
    /// `Im k`; negative for a leaky state with growing outgoing tails.
    pub lifetime_proxy: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Exact resonance of mode `(n, parity)`, seeded by the expansion.
pub fn resonant_state(
    n: i64,
    parity: Parity,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    expansion: Expansion,
) -> Result<ResonantState> {
    let seed = perturbative_k_complex(n, wg, atoms, parity, expansion)?;
    let q = parity.mode_q(n, atoms.d);
    let attempt = |s: Complex64| -> Result<NewtonOutcome> {
        let out = newton_resonance(s, wg, atoms, parity)?;
        check_mode_match(n, parity, atoms.d, out.root)?;
        Ok(out)
    };
    let out = attempt(seed).or_else(|err| attempt(Complex64::new(q, 0.0)).map_err(|_| err))?;
    Ok(ResonantState {
        n,
        parity,
        k: out.root,
        qn: q,
        qn_shift: mode_shift(n, wg, atoms, parity)?,
        k_perturbative: seed,
        amplitudes: amplitude_ratios(out.root, wg, atoms)?,
        lifetime_proxy: out.root.im,
        residual: out.residual,
        iterations: out.iterations,
    })
}

/// Resonances for every admissible mode index of one parity, in mode order.
pub fn find_resonances(
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
    expansion: Expansion,
) -> Vec<(i64, Result<ResonantState>)> {
    let (lo, hi) = parity.mode_range(atoms.d);
    (lo..=hi)
        .into_par_iter()
        .map(|n| (n, resonant_state(n, parity, wg, atoms, expansion)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootScan {
    pub region: Rect,
    /// Distinct Newton-polished roots inside the region, by real part.
    pub roots: Vec<Complex64>,
    /// Zero count inside the region from the argument principle.
    pub winding: Option<i64>,
}

/// Default scan window: `Re k` in `[pi/4d, pi - pi/4d]` (excluding the trivial
/// roots at `0` and `pi`) and `|Im k| <= 0.5`.
pub fn default_scan_region(d: usize) -> Rect {
    let eps = PI / (4.0 * d as f64);
    Rect::new((eps, PI - eps), (-0.5, 0.5))
}

/// Grid scan of `|residual|`, Newton polish of every local minimum, and an
/// argument-principle count over the same rectangle.
pub fn scan_resonances(
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    parity: Parity,
    region: Rect,
    grid: (usize, usize),
) -> Result<RootScan> {
    atoms.require_coupling()?;
    let f = |k: Complex64| parity_condition_residual(k, wg, atoms, parity).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let seeds = oracle_root_scan(f, region, grid, 1.0);
    let mut roots: Vec<Complex64> = Vec::new();
    for seed in seeds {
        if let Ok(out) = newton_resonance(seed, wg, atoms, parity) {
            let z = out.root;
            if region.contains(z) && roots.iter().all(|r| (r - z).norm() > 1e-8) {
                roots.push(z);
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    let per_side = 400 * atoms.d.max(4);
    Ok(RootScan {
        region,
        winding: winding_number(f, region, per_side),
        roots,
    })
}

/// `Omega = omega - 2 xi cos(n pi / 2d)`: both atoms reflect perfectly at
/// `k = n pi / 2d` and the cavity does not leak. `n` runs over `1..2d`.
pub fn perfect_cavity_omega(n: i64, wg: &WaveguideParams, d: usize) -> Result<f64> {
    Ok(wg.omega - 2.0 * wg.xi * perfect_cavity_k(n, d)?.cos())
}

/// `k = n pi / 2d` for `1 <= n <= 2d - 1`.
pub fn perfect_cavity_k(n: i64, d: usize) -> Result<f64> {
    let max = 2 * d as i64 - 1;
    if n < 1 || n > max {
        return Err(Error::ModeIndexOutOfRange { n, min: 1, max });
    }
    Ok(n as f64 * PI / (2.0 * d as f64))
}

/// Parity and mode index of the perfect-cavity state: even `n` gives the odd
/// mode `n / 2`, odd `n` the even mode `(n - 1) / 2`.
pub fn perfect_cavity_mode(n: i64, d: usize) -> Result<(Parity, i64)> {
    perfect_cavity_k(n, d)?;
    Ok(if n % 2 == 0 {
        (Parity::Odd, n / 2)
    } else {
        (Parity::Even, (n - 1) / 2)
    })
}

/// Levels `omega - 2 xi cos(m pi / 2d)`, `m = 1..2d-1`, of the open chain of
/// `2d - 1` sites strictly between the atoms. A perfectly reflecting atom pins
/// the field to zero on its own site, so these are the levels a photon can be
/// trapped in.
pub fn segment_levels(d: usize, wg: &WaveguideParams) -> Vec<(usize, f64)> {
    (1..2 * d)
        .map(|m| (m, wg.omega - 2.0 * wg.xi * (m as f64 * PI / (2.0 * d as f64)).cos()))
        .collect()
}

/// Lattice profile of a resonant state, normalised to `A_b = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProfile {
    pub k: Complex64,
    pub energy: Complex64,
    pub d: usize,
    pub ratios: AmplitudeRatios,
    pub sites: Vec<i64>,
    pub values: Vec<Complex64>,
    pub regions: Vec<Region>,
    pub tail: TailBehaviour,
    /// Largest lattice-equation residual over the window, relative to the
    /// largest amplitude.
    pub lattice_residual: f64,
}

impl DiscreteProfile {
    pub fn amplitude(&self, j: i64) -> Option<Complex64> {
        let first = *self.sites.first()?;
        self.values.get((j - first) as usize).copied()
    }

    pub fn probability(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Values scaled so the largest modulus is one.
    pub fn max_normalized(&self) -> Vec<Complex64> {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if peak == 0.0 {
            return self.values.clone();
        }
        self.values.iter().map(|v| v / peak).collect()
    }

    /// `sum_{|j| > d} |u|^2 / sum |u|^2` over the window.
    pub fn outside_probability(&self) -> f64 {
        outside_fraction(&self.values, &self.regions)
    }

    /// Largest `|u|` outside `[-d, d]`.
    pub fn max_outside(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.regions)
            .filter(|(_, r)| **r != Region::Inside)
            .fold(0.0, |m, (v, _)| m.max(v.norm()))
    }
}

pub(crate) fn outside_fraction(values: &[Complex64], regions: &[Region]) -> f64 {
    let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let outside: f64 = values
        .iter()
        .zip(regions)
        .filter(|(_, r)| **r != Region::Inside)
        .map(|(v, _)| v.norm_sqr())
        .sum();
    outside / total
}

/// Tolerance on the disagreement of the two amplitude routes.
pub const AMPLITUDE_TOL: f64 = 1e-8;

/// Builds `u(j)` on `-L..=L` from the amplitude ratios at `k`. Fails with
/// [`Error::InconsistentAmplitudes`] when `k` is not a root.
pub fn reconstruct_wavefunction(
    k: Complex64,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    half_length: usize,
) -> Result<DiscreteProfile> {
    let ratios = amplitude_ratios(k, wg, atoms)?;
    let mismatch = ratios.mismatch();
    if mismatch.is_nan() || mismatch > AMPLITUDE_TOL {
        return Err(Error::InconsistentAmplitudes { mismatch });
    }
    let d = atoms.d as i64;
    let l = half_length.max(atoms.d + 1) as i64;
    let field = |j: i64| -> Complex64 {
        let plus = (I * k * j as f64).exp();
        let minus = (-I * k * j as f64).exp();
        if j < -d {
            ratios.c * minus
        } else if j > d {
            ratios.dd * plus
        } else {
            plus + ratios.b_right * minus
        }
    };
    let sites: Vec<i64> = (-l..=l).collect();
    let values: Vec<Complex64> = sites.iter().map(|&j| field(j)).collect();
    let regions = sites.iter().map(|&j| Region::of(j as f64, d as f64)).collect();
    let energy = wg.dispersion_complex(k);
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let pair = atoms.pair();
    let raw = lattice_residual(energy, wg, &pair, -l, l, |j| values[(j + l) as usize]);
    // atom rows carry an extra factor E - Omega ~ xi, J^2
    let row_scale = 1.0f64.max(atoms.j * atoms.j).max(wg.xi * wg.xi);
    Ok(DiscreteProfile {
        k,
        energy,
        d: atoms.d,
        ratios,
        sites,
        values,
        regions,
        tail: TailBehaviour::from_k(k),
        lattice_residual: raw / (peak * row_scale),
    })
}

/// A point where a tracked resonance touches the real axis as `Omega` varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRidge {
    pub omega: f64,
    pub k: Complex64,
}

/// Result of sweeping `Omega` across the band for one parity.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSweep {
    pub omegas: Vec<f64>,
    /// Root closest to the real axis at each `Omega`, if any was found.
    pub least_leaky: Vec<Option<Complex64>>,
    pub ridges: Vec<BoundRidge>,
}

/// Sweeps `Omega` over `n_omega` points strictly inside the band. At each
/// point the residual is scanned for roots near the real axis; interior local
/// minima of `|Im k|` along the sweep are refined by bisection on the sign of
/// `Im(dk/dOmega)` (with `dk/dOmega = -R_Omega / R_k`), and reported as bound
/// ridges when the refined `|Im k|` is below `1e-9`.
pub fn sweep_omega(wg: &WaveguideParams, j: f64, d: usize, parity: Parity, n_omega: usize) -> Result<OmegaSweep> {
    sweep_omega_range(wg, j, d, parity, wg.band(), n_omega)
}

/// As [`sweep_omega`], over `n_omega` points strictly inside `(lo, hi)`.
pub fn sweep_omega_range(
    wg: &WaveguideParams,
    j: f64,
    d: usize,
    parity: Parity,
    (lo, hi): (f64, f64),
    n_omega: usize,
) -> Result<OmegaSweep> {
    IdenticalAtoms::new(wg.omega, j, d)?.require_coupling()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(crate::error::invalid(
            "omega range",
            format!("need lo < hi, got ({lo}, {hi})"),
        ));
    }
    let n_omega = n_omega.max(5);
    let omegas: Vec<f64> = (1..=n_omega)
        .map(|i| lo + (hi - lo) * i as f64 / (n_omega + 1) as f64)
        .collect();
    let eps = PI / (4.0 * d as f64);
    let region = Rect::new((eps, PI - eps), (-0.4, 0.05));
    let grid = (40 * d, 48);
    let least_leaky: Vec<Option<Complex64>> = omegas
        .par_iter()
        .map(|&om| {
            let atoms = IdenticalAtoms { omega: om, j, d };
            let f = |k: Complex64| {
                parity_condition_residual(k, wg, &atoms, parity).unwrap_or(Complex64::new(f64::NAN, 0.0))
            };
            oracle_root_scan(f, region, grid, 1.0)
                .into_iter()
                .filter_map(|s| newton_resonance(s, wg, &atoms, parity).ok())
                .map(|o| o.root)
                .filter(|z| region.contains(*z))
                .min_by(|a, b| a.im.abs().total_cmp(&b.im.abs()))
        })
        .collect();

    let mut ridges = Vec::new();
    for i in 1..omegas.len() - 1 {
        let (Some(prev), Some(cur), Some(next)) = (least_leaky[i - 1], least_leaky[i], least_leaky[i + 1]) else {
            continue;
        };
        if !(cur.im.abs() <= prev.im.abs() && cur.im.abs() < next.im.abs()) {
            continue;
        }
        if let Some(r) = refine_ridge(wg, j, d, parity, (omegas[i - 1], omegas[i + 1]), cur)? {
            if r.k.im.abs() < 1e-9 && ridges.iter().all(|x: &BoundRidge| (x.omega - r.omega).abs() > 1e-6) {
                ridges.push(r);
            }
        }
    }
    Ok(OmegaSweep {
        omegas,
        least_leaky,
        ridges,
    })
}

fn k_slope_im(wg: &WaveguideParams, atoms: &IdenticalAtoms, parity: Parity, k: Complex64) -> Result<f64> {
    let r_k = parity_condition_derivative(k, wg, atoms, parity)?;
    let r_o = parity_condition_omega_derivative(k, wg, atoms, parity)?;
    Ok((-r_o / r_k).im)
}

fn refine_ridge(
    wg: &WaveguideParams,
    j: f64,
    d: usize,
    parity: Parity,
    bracket_omega: (f64, f64),
    seed: Complex64,
) -> Result<Option<BoundRidge>> {
    let root_at = |om: f64, s: Complex64| -> Option<Complex64> {
        let atoms = IdenticalAtoms { omega: om, j, d };
        newton_resonance(s, wg, &atoms, parity).ok().map(|o| o.root)
    };
    let slope_at = |om: f64, k: Complex64| k_slope_im(wg, &IdenticalAtoms { omega: om, j, d }, parity, k);
    let (mut a, mut b) = bracket_omega;
    let (Some(mut ka), Some(mut kb)) = (root_at(a, seed), root_at(b, seed)) else {
        return Ok(None);
    };
    let (mut sa, sb) = (slope_at(a, ka)?, slope_at(b, kb)?);
    if !(sa > 0.0 && sb < 0.0) {
        return Ok(None);
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let Some(km) = root_at(m, 0.5 * (ka + kb)) else {
            return Ok(None);
        };
        let sm = slope_at(m, km)?;
        if sm > 0.0 {
            a = m;
            ka = km;
            sa = sm;
        } else {
            b = m;
            kb = km;
        }
    }
    let _ = sa;
    let omega = 0.5 * (a + b);
    Ok(root_at(omega, 0.5 * (ka + kb)).map(|k| BoundRidge { omega, k }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_diagonalize;

    fn fig4(big_omega: f64) -> (WaveguideParams, IdenticalAtoms) {
        (
            WaveguideParams::new(10.0, 0.2).unwrap(),
            IdenticalAtoms::new(big_omega, 1.0, 10).unwrap(),
        )
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fig4_roots_are_frozen() {
        for (om, re, im) in [
            (10.0, 0.946_265_316_389, -0.000_143_228_178),
            (6.0, 0.898_664_06, -0.021_206_27),
            (7.0, 0.906_492_01, -0.013_714_88),
        ] {
            let (wg, atoms) = fig4(om);
            let st = resonant_state(3, Parity::Odd, &wg, &atoms, Expansion::Corrected).unwrap();
            assert!((st.k - c(re, im)).norm() < 1e-8, "Omega = {om}: {}", st.k);
            assert!(st.residual < 1e-12);
            assert!(st.iterations <= 10);
        }
    }

    #[test]
    fn first_order_k_matches_hand_value() {
        let (wg, atoms) = fig4(10.0);
        let q = mode_shift(3, &wg, &atoms, Parity::Odd).unwrap();
        assert!((q + 0.007_608_452_1).abs() < 1e-10);
        let k = perturbative_k_real(3, &wg, &atoms, Parity::Odd).unwrap();
        assert!((k - 0.946_282_4).abs() < 1e-6, "{k}");
        let root = resonant_state(3, Parity::Odd, &wg, &atoms, Expansion::Corrected)
            .unwrap()
            .k;
        assert!((k - root.re).abs() < 1e-4);
    }

    #[test]
    fn zero_shift_gives_exact_q() {
        let wg = WaveguideParams::new(10.0, 0.2).unwrap();
        let q = Parity::Odd.mode_q(3, 10);
        let atoms = IdenticalAtoms::new(10.0 - 0.4 * q.cos(), 1.0, 10).unwrap();
        for e in [Expansion::Printed, Expansion::Corrected] {
            let k = perturbative_k_complex(3, &wg, &atoms, Parity::Odd, e).unwrap();
            assert!((k - c(q, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn residual_routes_agree() {
        let (wg, atoms) = fig4(8.3);
        for k in [c(0.7, -0.05), c(1.9, 0.02), c(2.5, -0.3)] {
            for p in [Parity::Odd, Parity::Even] {
                let direct = parity_condition_residual(k, &wg, &atoms, p).unwrap();
                for side in [MatchingSide::Right, MatchingSide::Left] {
                    let other = residual_from_amplitudes(k, &wg, &atoms, p, side).unwrap();
                    assert!((direct - other).norm() < 1e-12 * (1.0 + direct.norm()));
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (wg, atoms) = fig4(6.0);
        let k = c(1.1, -0.07);
        for p in [Parity::Odd, Parity::Even] {
            let h = 1e-6;
            let fd = (parity_condition_residual(k + h, &wg, &atoms, p).unwrap()
                - parity_condition_residual(k - h, &wg, &atoms, p).unwrap())
                / (2.0 * h);
            let an = parity_condition_derivative(k, &wg, &atoms, p).unwrap();
            assert!((fd - an).norm() < 1e-6 * an.norm());
        }
    }

    #[test]
    fn perfect_cavity_examples() {
        let wg = WaveguideParams::new(10.0, 2.0).unwrap();
        let expect = 10.0 - 4.0 * (PI / 4.0).cos();
        assert!((perfect_cavity_omega(4, &wg, 8).unwrap() - expect).abs() < 1e-12);
        assert!((perfect_cavity_omega(6, &wg, 12).unwrap() - expect).abs() < 1e-12);
        assert!((perfect_cavity_omega(8, &wg, 8).unwrap() - 10.0).abs() < 1e-12);
        assert!(perfect_cavity_omega(0, &wg, 8).is_err());
        assert!(perfect_cavity_omega(16, &wg, 8).is_err());
        // tan(2kd) = -2 xi sin k / (J G_k) holds since 1/(J G_k) = 0 and sin(2kd) = 0
        let k = PI / 4.0;
        assert!((2.0 * k * 8.0).sin().abs() < 1e-12);
    }

    #[test]
    fn perfect_cavity_is_real_and_confined() {
        let wg = WaveguideParams::new(10.0, 2.0).unwrap();
        for n in 1..16 {
            let om = perfect_cavity_omega(n, &wg, 8).unwrap();
            let (parity, m) = perfect_cavity_mode(n, 8).unwrap();
            let atoms = IdenticalAtoms::new(om, 1.0, 8).unwrap();
            let k = c(perfect_cavity_k(n, 8).unwrap(), 0.0);
            assert!(parity_condition_residual(k, &wg, &atoms, parity).unwrap().norm() < 1e-12);
            let out = newton_resonance(k + c(0.01, -0.01), &wg, &atoms, parity).unwrap();
            assert!(out.root.im.abs() < 1e-10, "n = {n}: {}", out.root);
            check_mode_match(m, parity, 8, out.root).unwrap();
            let prof = reconstruct_wavefunction(out.root, &wg, &atoms, 40).unwrap();
            assert!(prof.max_outside() < 1e-8);
            assert!(prof.lattice_residual < 1e-10);
        }
    }

    #[test]
    fn parity_shows_in_profile() {
        let (wg, atoms) = fig4(10.0);
        for p in [Parity::Odd, Parity::Even] {
            let st = resonant_state(3, p, &wg, &atoms, Expansion::Corrected).unwrap();
            let prof = reconstruct_wavefunction(st.k, &wg, &atoms, 30).unwrap();
            let u0 = prof.amplitude(0).unwrap();
            let (um, up) = (prof.amplitude(-1).unwrap(), prof.amplitude(1).unwrap());
            match p {
                Parity::Odd => assert!(u0.norm() < 1e-8),
                Parity::Even => assert!((um - up).norm() < 1e-8),
            }
            assert!(prof.lattice_residual < 1e-8);
            assert_eq!(prof.tail, TailBehaviour::Growing);
        }
    }

    #[test]
    fn off_root_reconstruction_is_refused() {
        let (wg, atoms) = fig4(10.0);
        let err = reconstruct_wavefunction(c(0.9, -0.01), &wg, &atoms, 30).unwrap_err();
        assert!(matches!(err, Error::InconsistentAmplitudes { .. }));
    }

    #[test]
    fn leakage_follows_detuning() {
        let p = |om: f64| {
            let (wg, atoms) = fig4(om);
            let st = resonant_state(3, Parity::Odd, &wg, &atoms, Expansion::Corrected).unwrap();
            reconstruct_wavefunction(st.k, &wg, &atoms, 30)
                .unwrap()
                .outside_probability()
        };
        let (p6, p7, p10) = (p(6.0), p(7.0), p(10.0));
        assert!(p6 > p7 && p7 > p10, "{p6} {p7} {p10}");
    }

    #[test]
    fn far_seed_is_caught() {
        let (wg, atoms) = fig4(10.0);
        let res = newton_resonance(c(2.4, -0.2), &wg, &atoms, Parity::Odd);
        match res {
            Ok(out) => assert!(check_mode_match(3, Parity::Odd, 10, out.root).is_err()),
            Err(e) => assert!(matches!(e, Error::NoConvergence { .. })),
        }
    }

    #[test]
    fn scan_finds_every_odd_mode() {
        let (wg, atoms) = fig4(10.0);
        let scan = scan_resonances(&wg, &atoms, Parity::Odd, default_scan_region(10), (400, 100)).unwrap();
        assert_eq!(scan.roots.len(), 9, "{:?}", scan.roots);
        assert_eq!(scan.winding, Some(9));
        for (n, root) in (1..=9).zip(&scan.roots) {
            check_mode_match(n, Parity::Odd, 10, *root).unwrap();
        }
    }

    #[test]
    fn segment_levels_match_interior_chain() {
        let wg = WaveguideParams::new(10.0, 2.0).unwrap();
        let levels = segment_levels(8, &wg);
        let chain = oracle_diagonalize(15, &wg, None).unwrap();
        assert_eq!(levels.len(), 15);
        for ((_, e), o) in levels.iter().zip(&chain) {
            assert!((e - o).abs() < 1e-10);
            assert!(*e > 6.0 && *e < 14.0);
        }
        for (m, e) in &levels {
            let mirror = levels[levels.len() - m].1;
            assert!((e - 10.0 + mirror - 10.0).abs() < 1e-12);
        }
        assert_eq!(segment_levels(1, &wg), vec![(1, 10.0 - 4.0 * (PI / 2.0).cos())]);
    }

    #[test]
    fn zero_coupling_is_rejected() {
        let wg = WaveguideParams::new(10.0, 0.2).unwrap();
        let atoms = IdenticalAtoms::new(10.0, 0.0, 10).unwrap();
        assert!(matches!(
            parity_condition_residual(c(1.0, 0.0), &wg, &atoms, Parity::Odd),
            Err(Error::ZeroCoupling { .. })
        ));
    }
}
