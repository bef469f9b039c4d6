//! Finite-lattice scattering solve with plane-wave closures.
//!
//! Unknowns, in band order: `r`, the sites `-L..=-d`, the excitation of atom 1,
//! the sites `-d+1..=d`, the excitation of atom 2, the sites `d+1..=L`, `t`.
//! Two rows pin `u(-L)` and `u(-L+1)` to `e^{ikj} + r e^{-ikj}`, two rows pin
//! `u(L-1)` and `u(L)` to `t e^{ikj}`, and the remaining rows are the lattice
//! equation for every interior site and the equation of each atom. Atoms are
//! kept as explicit unknowns so no Green function ever appears.

use num_complex::Complex64;

use super::banded::BandedMatrix;
use crate::error::{invalid, Error, Result};
use crate::model::{canonical_k, AtomPair, WaveguideParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeProblem {
    pub half_length: usize,
    pub wg: WaveguideParams,
    pub atoms: AtomPair,
    pub k: f64,
}

impl LatticeProblem {
    /// `half_length` must be at least `50 d` so the closures sit far from the
    /// scatterers.
    pub fn new(half_length: usize, wg: WaveguideParams, atoms: AtomPair, k: f64) -> Result<Self> {
        atoms.validate()?;
        if half_length < 50 * atoms.d {
            return Err(invalid(
                "half_length",
                format!("need at least 50 d = {}, got {half_length}", 50 * atoms.d),
            ));
        }
        let k = canonical_k(k)?;
        if k.sin() <= 0.0 {
            return Err(Error::WaveNumberOutOfRange { k });
        }
        Ok(Self {
            half_length,
            wg,
            atoms,
            k,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleScattering {
    pub r: Complex64,
    pub t: Complex64,
    /// Largest misfit of the three outermost sites on either side against the
    /// plane-wave forms built from `r` and `t`.
    pub fit_residual: f64,
    /// Pivot-ratio conditioning indicator of the banded factorisation.
    pub pivot_ratio: f64,
    /// Photon amplitudes on sites `-L..=L`.
    pub field: Vec<Complex64>,
    /// Excitation amplitudes of the two atoms.
    pub atom_amplitudes: [Complex64; 2],
}

impl OracleScattering {
    pub fn amplitude(&self, j: i64) -> Complex64 {
        let l = (self.field.len() as i64 - 1) / 2;
        self.field[(j + l) as usize]
    }
}

struct Layout {
    l: i64,
    d: i64,
}

impl Layout {
    fn site(&self, j: i64) -> usize {
        let base = (j + self.l + 1) as usize;
        if j <= -self.d {
            base
        } else if j <= self.d {
            base + 1
        } else {
            base + 2
        }
    }

    fn atom(&self, which: usize) -> usize {
        if which == 0 {
            (self.l - self.d + 2) as usize
        } else {
            (self.l + self.d + 3) as usize
        }
    }

    fn t(&self) -> usize {
        (2 * self.l + 4) as usize
    }

    fn size(&self) -> usize {
        (2 * self.l + 5) as usize
    }
}

/// Brute-force scattering amplitudes on the chain `-L..=L`.
pub fn oracle_scatter(problem: &LatticeProblem) -> Result<OracleScattering> {
    let LatticeProblem { wg, atoms, k, .. } = *problem;
    let l = problem.half_length as i64;
    let d = atoms.d as i64;
    let lay = Layout { l, d };
    let n = lay.size();
    let e = wg.dispersion(k);
    let pw = |j: i64| Complex64::from_polar(1.0, k * j as f64);
    let one = Complex64::new(1.0, 0.0);
    let mut a = BandedMatrix::zeros(n, 2, 2);
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    let mut row = 0usize;

    for j in [-l, -l + 1] {
        a.add(row, lay.site(j), one);
        a.add(row, 0, -pw(-j));
        b[row] = pw(j);
        row += 1;
    }
    for j in -l + 1..l {
        a.add(row, lay.site(j), Complex64::new(e - wg.omega, 0.0));
        a.add(row, lay.site(j - 1), Complex64::new(wg.xi, 0.0));
        a.add(row, lay.site(j + 1), Complex64::new(wg.xi, 0.0));
        if j == -d || j == d {
            let which = usize::from(j == d);
            a.add(row, lay.atom(which), Complex64::new(-atoms.coupling(which), 0.0));
            row += 1;
            a.add(row, lay.atom(which), Complex64::new(e - atoms.transition(which), 0.0));
            a.add(row, lay.site(j), Complex64::new(-atoms.coupling(which), 0.0));
        }
        row += 1;
    }
    for j in [l - 1, l] {
        a.add(row, lay.site(j), one);
        a.add(row, lay.t(), -pw(j));
        row += 1;
    }
    debug_assert_eq!(row, n);

    let (x, pivot_ratio) = a.solve(b)?;
    let r = x[0];
    let t = x[lay.t()];
    let field: Vec<Complex64> = (-l..=l).map(|j| x[lay.site(j)]).collect();
    let at = |j: i64| field[(j + l) as usize];
    let left = (0..3).map(|m| (at(-l + m) - pw(-l + m) - r * pw(l - m)).norm());
    let right = (0..3).map(|m| (at(l - m) - t * pw(l - m)).norm());
    let fit_residual = left.chain(right).fold(0.0, f64::max);
    if !pivot_ratio.is_finite() {
        return Err(Error::SingularSystem { condition: pivot_ratio });
    }
    Ok(OracleScattering {
        r,
        t,
        fit_residual,
        pivot_ratio,
        atom_amplitudes: [x[lay.atom(0)], x[lay.atom(1)]],
        field,
    })
}

/// Largest residual of the photon lattice equation with both atoms eliminated,
/// evaluated at (possibly complex) energy `e` for the amplitudes `u(j)` on
/// sites `lo..=hi`. Atom rows use the form multiplied through by
/// `E - Omega_l`, which stays finite at `E = Omega_l`.
pub fn lattice_residual(
    e: Complex64,
    wg: &WaveguideParams,
    atoms: &AtomPair,
    lo: i64,
    hi: i64,
    u: impl Fn(i64) -> Complex64,
) -> f64 {
    let d = atoms.d as i64;
    (lo + 1..hi)
        .map(|j| {
            let hop = wg.xi * (u(j + 1) + u(j - 1));
            if j == -d || j == d {
                let which = usize::from(j == d);
                let det = e - atoms.transition(which);
                let jj = atoms.coupling(which);
                ((e - wg.omega) * det - jj * jj) * u(j) + hop * det
            } else {
                (e - wg.omega) * u(j) + hop
            }
            .norm()
        })
        .fold(0.0, f64::max)
}
