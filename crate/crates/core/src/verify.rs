//! Invariant suites run by `supercavity verify`.
//!
//! Each suite reports the worst residual it measured against a fixed
//! tolerance. The scattering amplitudes under test are injectable so a
//! deliberately broken closed form can be shown to fail.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boundstates::find_edge_bound_states;
use crate::continuum_long::{default_grid, long_profile, long_resonant_state};
use crate::continuum_short::{short_profiles, short_r_l_alternative, short_resonant_state};
use crate::error::Result;
use crate::model::{dressed_energies, AtomPair, IdenticalAtoms, Parity, WaveguideParams};
use crate::oracle::{oracle_out_of_band, oracle_scatter, LatticeProblem};
use crate::resonance::{
    perfect_cavity_mode, perfect_cavity_omega, reconstruct_wavefunction, resonant_state, Expansion,
};
use crate::scattering::{solve_scattering, transmission_closed_form};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Fast => "fast",
            Level::Full => "full",
        }
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level `{other}` (expected fast or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<CheckResult>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# verify level={}", self.level.as_str());
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<24} worst={:.3e} tol={:.1e} time={:.2}s {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.tolerance,
                c.elapsed.as_secs_f64(),
                c.detail
            );
        }
        let _ = writeln!(
            out,
            "# {} of {} checks passed in {:.2}s",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len(),
            self.elapsed.as_secs_f64()
        );
        out
    }
}

/// `(r, t)` at real `k`.
pub type Amplitudes = dyn Fn(f64, &WaveguideParams, &AtomPair) -> Result<(Complex64, Complex64)> + Sync;

fn default_amplitudes(k: f64, wg: &WaveguideParams, atoms: &AtomPair) -> Result<(Complex64, Complex64)> {
    let sol = solve_scattering(k, wg, atoms)?;
    Ok((sol.r, sol.t))
}

/// Random parameters with both atoms anywhere around the band.
pub fn random_parameters(rng: &mut impl Rng) -> (WaveguideParams, AtomPair) {
    let omega = rng.gen_range(3.0..10.0);
    let xi = rng.gen_range(0.2..2.0);
    let wg = WaveguideParams::new(omega, xi).expect("valid waveguide");
    let mut om = || omega + xi * rng.gen_range(-4.0..4.0);
    let (o1, o2) = (om(), om());
    let atoms = AtomPair::new(
        o1,
        o2,
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..3.0),
        rng.gen_range(1..=12),
    )
    .expect("valid atoms");
    (wg, atoms)
}

/// The four transmission-spectrum parameter sets (`omega = 5`, `xi = 1`, `d = 10`).
pub fn spectrum_presets() -> [(char, WaveguideParams, AtomPair); 4] {
    let wg = WaveguideParams::new(5.0, 1.0).expect("valid waveguide");
    let pair = |o1, o2, j1, j2| AtomPair::new(o1, o2, j1, j2, 10).expect("valid atoms");
    [
        ('a', wg, pair(8.0, 8.0, 0.5, 0.7)),
        ('b', wg, pair(2.0, 8.0, 0.7, 2.0)),
        ('c', wg, pair(2.0, 8.0, 0.7, 2.6)),
        ('d', wg, pair(2.0, 2.7, 0.5, 3.0)),
    ]
}

/// Interior grid `k_i = pi (i + 1/2) / n`.
pub fn interior_k_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect()
}

fn timed(name: &'static str, tolerance: f64, f: impl FnOnce() -> (f64, String)) -> CheckResult {
    let start = Instant::now();
    let (worst, detail) = f();
    CheckResult {
        name,
        worst,
        tolerance,
        passed: worst.is_finite() && worst <= tolerance,
        detail,
        elapsed: start.elapsed(),
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

pub fn check_unitarity(level: Level, amplitudes: &Amplitudes) -> CheckResult {
    let (sets, points) = match level {
        Level::Fast => (8, 32),
        Level::Full => (20, 64),
    };
    timed("unitarity", 1e-10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        let params: Vec<_> = (0..sets).map(|_| random_parameters(&mut rng)).collect();
        let ks = interior_k_grid(points);
        let worst = max_of(
            params
                .par_iter()
                .map(|(wg, atoms)| {
                    max_of(ks.iter().map(|&k| match amplitudes(k, wg, atoms) {
                        Ok((r, t)) => (r.norm_sqr() + t.norm_sqr() - 1.0).abs(),
                        Err(_) => f64::NAN,
                    }))
                })
                .collect::<Vec<_>>(),
        );
        (worst, format!("{sets} parameter sets x {points} k"))
    })
}

pub fn check_oracle_equivalence(level: Level) -> CheckResult {
    let points = match level {
        Level::Fast => 8,
        Level::Full => 64,
    };
    timed("oracle_equivalence", 1e-8, || {
        let ks = interior_k_grid(points);
        let jobs: Vec<_> = spectrum_presets()
            .into_iter()
            .flat_map(|(_, wg, atoms)| ks.iter().map(move |&k| (wg, atoms, k)))
            .collect();
        let worst = max_of(
            jobs.par_iter()
                .map(|&(wg, atoms, k)| {
                    let closed = transmission_closed_form(k, &wg, &atoms);
                    let oracle = LatticeProblem::new(50 * atoms.d, wg, atoms, k).and_then(|p| oracle_scatter(&p));
                    match (closed, oracle) {
                        (Ok(t), Ok(o)) => (t - o.t).norm(),
                        _ => f64::NAN,
                    }
                })
                .collect::<Vec<_>>(),
        );
        (worst, format!("4 presets x {points} k, L = 50d"))
    })
}

pub fn check_resonant_reflection(level: Level) -> CheckResult {
    let count = match level {
        Level::Fast => 5,
        Level::Full => 10,
    };
    timed("resonant_reflection", 1e-10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        let worst = max_of((0..count).map(|_| {
            let (wg, mut atoms) = random_parameters(&mut rng);
            let k = rng.gen_range(0.05..PI - 0.05);
            atoms.omega1 = wg.dispersion(k);
            solve_scattering(k, &wg, &atoms).map(|s| s.t.norm()).unwrap_or(f64::NAN)
        }));
        (worst, format!("{count} random in-band Omega_1"))
    })
}

/// Worst `|Im k|` and worst outside amplitude over every perfect-cavity index.
pub fn perfect_cavity_errors(d: usize) -> (f64, f64) {
    let wg = WaveguideParams::new(10.0, 2.0).expect("valid waveguide");
    let rows: Vec<(f64, f64)> = (1..2 * d as i64)
        .into_par_iter()
        .map(|n| {
            let run = || -> Result<(f64, f64)> {
                let atoms = IdenticalAtoms::new(perfect_cavity_omega(n, &wg, d)?, 1.0, d)?;
                let (parity, mode) = perfect_cavity_mode(n, d)?;
                let st = resonant_state(mode, parity, &wg, &atoms, Expansion::Corrected)?;
                let prof = reconstruct_wavefunction(st.k, &wg, &atoms, 3 * d)?;
                Ok((st.k.im.abs(), prof.max_outside()))
            };
            run().unwrap_or((f64::NAN, f64::NAN))
        })
        .collect();
    (max_of(rows.iter().map(|r| r.0)), max_of(rows.iter().map(|r| r.1)))
}

fn perfect_cavity_sizes(level: Level) -> &'static [usize] {
    match level {
        Level::Fast => &[8],
        Level::Full => &[8, 12],
    }
}

pub fn check_perfect_cavity(level: Level) -> [CheckResult; 2] {
    let ds = perfect_cavity_sizes(level);
    let start = Instant::now();
    let errors: Vec<(f64, f64)> = ds.iter().map(|&d| perfect_cavity_errors(d)).collect();
    let elapsed = start.elapsed();
    let im = max_of(errors.iter().map(|e| e.0));
    let out = max_of(errors.iter().map(|e| e.1));
    let make = |name, worst: f64, tolerance| CheckResult {
        name,
        worst,
        tolerance,
        passed: worst.is_finite() && worst <= tolerance,
        detail: format!("d in {ds:?}, every n"),
        elapsed,
    };
    [
        make("perfect_cavity_im_k", im, 1e-10),
        make("perfect_cavity_outside", out, 1e-8),
    ]
}

/// Largest relative deviation between the closed-form dressed energies and
/// a symmetric 2x2 eigensolver.
pub fn dressed_identity_error(count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    max_of((0..count).map(|_| {
        let omega = rng.gen_range(-20.0..20.0);
        let big_omega = rng.gen_range(-20.0..20.0);
        let j = rng.gen_range(0.0..5.0);
        let p = dressed_energies(omega, big_omega, j);
        let m = Matrix2::new(omega, j, j, big_omega);
        let eig = m.symmetric_eigen().eigenvalues;
        let (lo, hi) = if eig[0] <= eig[1] {
            (eig[0], eig[1])
        } else {
            (eig[1], eig[0])
        };
        let scale = omega.abs().max(big_omega.abs()).max(j).max(1.0);
        ((p.eps_plus - hi).abs().max((p.eps_minus - lo).abs())) / scale
    }))
}

pub fn check_dressed_identity(_level: Level) -> CheckResult {
    timed("dressed_identity", 1e-12, || {
        (
            dressed_identity_error(100, 0x5eed_0003),
            "100 random triples".to_string(),
        )
    })
}

fn random_identical(rng: &mut impl Rng) -> (WaveguideParams, IdenticalAtoms) {
    let wg = WaveguideParams::new(rng.gen_range(3.0..10.0), rng.gen_range(0.2..2.0)).expect("valid");
    let atoms = IdenticalAtoms::new(
        wg.omega + wg.xi * rng.gen_range(-3.0..3.0),
        rng.gen_range(0.2..3.0),
        rng.gen_range(1..=6),
    )
    .expect("valid");
    (wg, atoms)
}

/// `kappa = 0` residual over random parameter sets.
pub fn check_edge_kappa_zero(_level: Level) -> CheckResult {
    timed("edge_kappa_zero", 1e-14, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let worst = max_of((0..50).flat_map(|_| {
            let (wg, atoms) = random_identical(&mut rng);
            (0..2)
                .map(|n| crate::boundstates::edge_condition_residual(0.0, n, &wg, &atoms).abs())
                .collect::<Vec<_>>()
        }));
        (worst, "50 random sets, both edges".to_string())
    })
}

/// Worst energy gap to the chain oracle and worst lattice residual of the
/// nonzero-`kappa` edge states for `sets` random parameter sets.
pub fn edge_state_errors(sets: usize, seed: u64) -> (f64, f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<_> = (0..sets).map(|_| random_identical(&mut rng)).collect();
    let rows: Vec<(f64, f64, usize)> = params
        .par_iter()
        .map(|(wg, atoms)| {
            let Ok(states) = find_edge_bound_states(wg, atoms) else {
                return (f64::NAN, f64::NAN, 0);
            };
            let nonzero: Vec<_> = states.iter().filter(|s| !s.degenerate).collect();
            let Some(kmin) = nonzero.iter().map(|s| s.kappa).reduce(f64::min) else {
                return (0.0, 0.0, 0);
            };
            let half = ((20.0 / kmin).ceil() as usize)
                .max(10 * atoms.d)
                .min(crate::oracle::MAX_CHAIN / 2 - 1);
            let Ok(oracle) = oracle_out_of_band(2 * half + 1, wg, Some(&atoms.pair())) else {
                return (f64::NAN, f64::NAN, 0);
            };
            let gap = max_of(nonzero.iter().map(|s| {
                oracle
                    .iter()
                    .map(|e| (e - s.energy).abs())
                    .fold(f64::INFINITY, f64::min)
            }));
            let lattice = max_of(nonzero.iter().map(|s| s.lattice_residual(wg, atoms)));
            (gap, lattice, nonzero.len())
        })
        .collect();
    (
        max_of(rows.iter().map(|r| r.0)),
        max_of(rows.iter().map(|r| r.1)),
        rows.iter().map(|r| r.2).sum(),
    )
}

pub fn check_edge_states(level: Level) -> [CheckResult; 2] {
    let sets = match level {
        Level::Fast => 3,
        Level::Full => 12,
    };
    let start = Instant::now();
    let (gap, lattice, found) = edge_state_errors(sets, 0x5eed_0005);
    let elapsed = start.elapsed();
    let make = |name, worst: f64, tolerance| CheckResult {
        name,
        worst,
        tolerance,
        passed: worst.is_finite() && worst <= tolerance,
        detail: format!("{found} nonzero-kappa states on {sets} random sets"),
        elapsed,
    };
    [
        make("edge_oracle_energies", gap, 1e-6),
        make("edge_lattice_residual", lattice, 1e-8),
    ]
}

pub fn check_continuum_matching(_level: Level) -> CheckResult {
    timed("continuum_matching", 1e-10, || {
        let mut worst: f64 = 0.0;
        let wg = WaveguideParams::new(5.0, 0.1).expect("valid");
        for om in [3.0, 4.0, 7.0] {
            let atoms = IdenticalAtoms::new(om, 1.0, 5).expect("valid");
            let r = long_resonant_state(3, Parity::Odd, &wg, &atoms, Expansion::Corrected)
                .and_then(|st| long_profile(st.k, &wg, &atoms, &default_grid(5, 257)));
            worst = max_of([
                worst,
                r.map(|p| max_of(p.jump_residual.into_iter().chain(p.continuity_residual)))
                    .unwrap_or(f64::NAN),
            ]);
        }
        let atoms = IdenticalAtoms::new(2.0, 1.0, 8).expect("valid");
        let short = short_resonant_state(1, Parity::Odd, &wg, &atoms, Expansion::Corrected).and_then(|st| {
            let prof = short_profiles(st.k, &wg, &atoms, &default_grid(8, 257))?;
            let alt = short_r_l_alternative(st.k, &wg, &atoms)?;
            Ok(max_of(
                prof.left
                    .continuity_residual
                    .into_iter()
                    .chain(prof.right.continuity_residual)
                    .chain(prof.right.jump_residual)
                    .chain([prof.transport_residual, st.amplitude_mismatch(8), (alt - st.r_l).norm()]),
            ))
        });
        worst = max_of([worst, short.unwrap_or(f64::NAN)]);
        (
            worst,
            "long-wave jumps at three roots, short-wave jumps and amplitude relations".to_string(),
        )
    })
}

/// Runs every suite with the library's own scattering amplitudes.
pub fn run_verify(level: Level) -> VerifyReport {
    run_verify_with(level, &default_amplitudes)
}

/// Runs every suite, taking `(r, t)` for the unitarity suite from `amplitudes`.
pub fn run_verify_with(level: Level, amplitudes: &Amplitudes) -> VerifyReport {
    let start = Instant::now();
    let mut checks = vec![
        check_unitarity(level, amplitudes),
        check_oracle_equivalence(level),
        check_resonant_reflection(level),
    ];
    checks.extend(check_perfect_cavity(level));
    checks.push(check_dressed_identity(level));
    checks.push(check_edge_kappa_zero(level));
    checks.extend(check_edge_states(level));
    checks.push(check_continuum_matching(level));
    VerifyReport {
        level,
        checks,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let report = run_verify(Level::Fast);
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn broken_amplitudes_fail_unitarity() {
        let broken = |k: f64, wg: &WaveguideParams, atoms: &AtomPair| {
            let (r, t) = default_amplitudes(k, wg, atoms)?;
            Ok((r, t * 1.001))
        };
        let check = check_unitarity(Level::Fast, &broken);
        assert!(!check.passed);
    }

    #[test]
    fn level_parses() {
        assert_eq!("fast".parse::<Level>().unwrap(), Level::Fast);
        assert!("slow".parse::<Level>().is_err());
    }
}
