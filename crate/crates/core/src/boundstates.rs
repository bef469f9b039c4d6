//! Odd bound states at the band edges.
//!
//! The ansatz
//!
//! ```text
//! Psi(j) = -A e^{(i n pi + kappa) j}   j <= -d
//!           B e^{i n pi j} sinh(kappa j)  |j| <= d
//!           A e^{(i n pi - kappa) j}   j >= d
//! ```
//!
//! solves the free lattice at `E_kappa = omega - 2 xi s cosh(kappa)` with
//! `s = (-1)^n`. Continuity at `+-d` gives `A = B e^{kappa d} sinh(kappa d)`
//! and the atom row at `+d` leaves
//! `tanh(kappa d) = -xi s sinh(kappa) / (xi s sinh(kappa) + J G_kappa)`.
//! Multiplying through by `E_kappa - Omega` removes the pole at
//! `E_kappa = Omega` and makes `kappa = 0` an exact zero.
//!
//! The amplitudes use `B = 1`. At `kappa = 0` the ansatz collapses to the
//! zero field, so the `kappa = 0` entries are marked as degenerate.

use rayon::prelude::*;

use crate::error::Result;
use crate::model::{IdenticalAtoms, WaveguideParams};

/// Upper end of the `kappa` scan.
pub const KAPPA_MAX: f64 = 10.0;
/// Number of bracketing cells on `(0, KAPPA_MAX]`.
pub const BRACKET_CELLS: usize = 10_000;
/// Largest `|residual|` accepted after bisection; larger values mark a pole.
const ROOT_TOL: f64 = 1e-10;

fn edge_sign(n_edge: i64) -> f64 {
    if n_edge.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `E_kappa = omega - xi (e^{i n pi - kappa} + e^{-i n pi + kappa})`.
pub fn edge_energy(kappa: f64, n_edge: i64, wg: &WaveguideParams) -> f64 {
    wg.omega - 2.0 * wg.xi * edge_sign(n_edge) * kappa.cosh()
}

/// `tanh(kappa d) + xi s sinh(kappa)(E - Omega) / (xi s sinh(kappa)(E - Omega) + J^2)`.
/// Identically zero at `kappa = 0`.
pub fn edge_condition_residual(kappa: f64, n_edge: i64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> f64 {
    if kappa == 0.0 {
        return 0.0;
    }
    let s = edge_sign(n_edge);
    let det = edge_energy(kappa, n_edge, wg) - atoms.omega;
    let num = wg.xi * s * kappa.sinh() * det;
    (kappa * atoms.df()).tanh() + num / (num + atoms.j * atoms.j)
}

/// The same condition evaluated with `G_kappa = J / (E_kappa - Omega)` and the
/// denominator written out term by term, `E - omega - J G + xi (e^{i n pi - kappa} + e^{-i n pi} cosh kappa)`.
/// Singular when `E_kappa = Omega`.
pub fn edge_condition_unscaled(kappa: f64, n_edge: i64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Option<f64> {
    let s = edge_sign(n_edge);
    let e = edge_energy(kappa, n_edge, wg);
    if e == atoms.omega {
        return None;
    }
    let jg = atoms.j * atoms.j / (e - atoms.omega);
    let den = e - wg.omega - jg + wg.xi * (s * (-kappa).exp() + s * kappa.cosh());
    Some((kappa * atoms.df()).tanh() - wg.xi * s * kappa.sinh() / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBoundState {
    pub kappa: f64,
    pub n_edge: i64,
    pub energy: f64,
    pub a: f64,
    pub b: f64,
    /// `kappa = 0`: the ansatz reduces to the zero field.
    pub degenerate: bool,
    pub residual: f64,
}

impl EdgeBoundState {
    fn new(kappa: f64, n_edge: i64, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Self {
        let d = atoms.df();
        Self {
            kappa,
            n_edge,
            energy: edge_energy(kappa, n_edge, wg),
            a: (kappa * d).exp() * (kappa * d).sinh(),
            b: 1.0,
            degenerate: kappa == 0.0,
            residual: edge_condition_residual(kappa, n_edge, wg, atoms).abs(),
        }
    }

    /// Photon amplitude at site `j`.
    pub fn amplitude(&self, j: i64, d: usize) -> f64 {
        let phase = if (self.n_edge.rem_euclid(2) == 1) && j.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        };
        let jf = j as f64;
        let di = d as i64;
        phase
            * if j <= -di {
                -self.a * (self.kappa * jf).exp()
            } else if j >= di {
                self.a * (-self.kappa * jf).exp()
            } else {
                self.b * (self.kappa * jf).sinh()
            }
    }

    /// Atomic amplitudes `u_e(+-d) = J u(+-d) / (E - Omega)`; zero when the
    /// state sits exactly at `Omega`, which cannot happen for a nonzero root.
    pub fn atom_amplitudes(&self, atoms: &IdenticalAtoms) -> [f64; 2] {
        let det = self.energy - atoms.omega;
        if det == 0.0 {
            return [0.0, 0.0];
        }
        let d = atoms.d as i64;
        [
            atoms.j * self.amplitude(-d, atoms.d) / det,
            atoms.j * self.amplitude(d, atoms.d) / det,
        ]
    }

    /// Window half-width `L >= 10 / kappa` (or `10 d` at `kappa = 0`).
    pub fn window(&self, d: usize) -> usize {
        if self.kappa == 0.0 {
            10 * d
        } else {
            ((10.0 / self.kappa).ceil() as usize).max(d + 2)
        }
    }

    /// Largest residual of the lattice equations on `-L..=L`, including the
    /// atom rows, relative to the peak amplitude. The atom rows are multiplied
    /// by `E - Omega` so the check is finite for every state.
    pub fn lattice_residual(&self, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> f64 {
        let l = self.window(atoms.d) as i64;
        let d = atoms.d as i64;
        let u = |j: i64| self.amplitude(j, atoms.d);
        let det = self.energy - atoms.omega;
        let j2 = atoms.j * atoms.j;
        let peak = (-l..=l).map(|j| u(j).abs()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let worst = (-l + 1..l)
            .into_par_iter()
            .map(|j| {
                let free = (self.energy - wg.omega) * u(j) + wg.xi * (u(j + 1) + u(j - 1));
                let r = if j.abs() == d { det * free - j2 * u(j) } else { free };
                let scale = if j.abs() == d { det.abs().max(1.0) } else { 1.0 };
                (r / scale).abs()
            })
            .reduce(|| 0.0, f64::max);
        worst / peak
    }
}

/// All roots of the edge condition on `[0, KAPPA_MAX]` for `n_edge` in `{0, 1}`.
/// The two `kappa = 0` solutions always come first.
pub fn find_edge_bound_states(wg: &WaveguideParams, atoms: &IdenticalAtoms) -> Result<Vec<EdgeBoundState>> {
    let mut out: Vec<EdgeBoundState> = (0..2).map(|n| EdgeBoundState::new(0.0, n, wg, atoms)).collect();
    if atoms.j == 0.0 {
        return Ok(out);
    }
    let h = KAPPA_MAX / BRACKET_CELLS as f64;
    for n_edge in 0..2 {
        let f = |kappa: f64| edge_condition_residual(kappa, n_edge, wg, atoms);
        let roots: Vec<f64> = (1..BRACKET_CELLS)
            .into_par_iter()
            .filter_map(|c| {
                let (lo, hi) = (c as f64 * h, (c + 1) as f64 * h);
                let (flo, fhi) = (f(lo), f(hi));
                if flo == 0.0 {
                    return Some(lo);
                }
                if flo.signum() == fhi.signum() {
                    return None;
                }
                let root = bisect(&f, lo, hi, flo);
                (f(root).abs() < ROOT_TOL).then_some(root)
            })
            .collect();
        // the first cell (0, h] is skipped above because f(0) = 0 exactly
        let first = {
            let lo = 0.5 * h;
            let (flo, fhi) = (f(lo), f(h));
            (flo.signum() != fhi.signum())
                .then(|| bisect(&f, lo, h, flo))
                .filter(|r| f(*r).abs() < ROOT_TOL)
        };
        out.extend(
            first
                .into_iter()
                .chain(roots)
                .map(|k| EdgeBoundState::new(k, n_edge, wg, atoms)),
        );
    }
    Ok(out)
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dressed_energies;
    use crate::oracle::oracle_out_of_band;

    fn example() -> (WaveguideParams, IdenticalAtoms) {
        (
            WaveguideParams::new(10.0, 1.0).unwrap(),
            IdenticalAtoms::new(9.0, 2.0, 2).unwrap(),
        )
    }

    fn nonzero(states: &[EdgeBoundState]) -> Vec<EdgeBoundState> {
        states.iter().copied().filter(|s| !s.degenerate).collect()
    }

    #[test]
    fn kappa_zero_is_always_a_root() {
        let (wg, atoms) = example();
        for n in 0..2 {
            assert_eq!(edge_condition_residual(0.0, n, &wg, &atoms), 0.0);
        }
    }

    #[test]
    fn scaled_and_unscaled_forms_agree() {
        let (wg, atoms) = example();
        for kappa in [0.1, 0.7, 2.3] {
            for n in 0..2 {
                let a = edge_condition_residual(kappa, n, &wg, &atoms);
                let b = edge_condition_unscaled(kappa, n, &wg, &atoms).unwrap();
                assert!((a - b).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn example_energies() {
        let (wg, atoms) = example();
        let states = nonzero(&find_edge_bound_states(&wg, &atoms).unwrap());
        let mut energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
        energies.sort_by(f64::total_cmp);
        assert_eq!(energies.len(), 2, "{energies:?}");
        assert!((energies[0] - 7.1205168).abs() < 1e-6);
        assert!((energies[1] - 12.2661975).abs() < 1e-6);
        for s in &states {
            assert!(s.residual < 1e-12);
            assert!(s.lattice_residual(&wg, &atoms) < 1e-8);
            assert!((s.energy - wg.omega).abs() >= 2.0 * wg.xi);
        }
    }

    #[test]
    fn energies_match_chain_oracle() {
        let (wg, atoms) = example();
        let states = nonzero(&find_edge_bound_states(&wg, &atoms).unwrap());
        let kmin = states.iter().map(|s| s.kappa).fold(f64::INFINITY, f64::min);
        let len = 2 * ((20.0 / kmin).ceil() as usize).max(40) + 1;
        let oracle = oracle_out_of_band(len, &wg, Some(&atoms.pair())).unwrap();
        for s in &states {
            let best = oracle
                .iter()
                .map(|e| (e - s.energy).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "{} vs {oracle:?}", s.energy);
        }
    }

    #[test]
    fn wavefunction_is_odd() {
        let (wg, atoms) = example();
        for s in find_edge_bound_states(&wg, &atoms).unwrap() {
            for j in 0..12 {
                assert!((s.amplitude(-j, 2) + s.amplitude(j, 2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_coupling_gives_only_trivial_roots() {
        let wg = WaveguideParams::new(10.0, 1.0).unwrap();
        let atoms = IdenticalAtoms::new(9.0, 0.0, 3).unwrap();
        let states = find_edge_bound_states(&wg, &atoms).unwrap();
        assert_eq!(states.len(), 2);
        assert!(states.iter().all(|s| s.degenerate));
    }

    #[test]
    fn strong_coupling_approaches_dressed_levels() {
        let wg = WaveguideParams::new(10.0, 0.05).unwrap();
        let atoms = IdenticalAtoms::new(10.0, 3.0, 4).unwrap();
        let states = nonzero(&find_edge_bound_states(&wg, &atoms).unwrap());
        let dressed = dressed_energies(10.0, 10.0, 3.0);
        for target in [dressed.eps_minus, dressed.eps_plus] {
            let best = states
                .iter()
                .map(|s| (s.energy - target).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 0.01, "{target} {states:?}");
        }
    }
}
