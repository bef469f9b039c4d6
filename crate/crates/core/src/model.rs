//! Shared domain types: the tight-binding band, the atom pair, detunings and
//! dressed atom-cavity energies.
//!
//! Energies carry whatever unit the caller picked (hopping units or coupling
//! units); nothing in this crate assumes one. The lattice constant is 1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Cavity frequency and nearest-neighbour hopping of the resonator chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideParams {
    pub omega: f64,
    pub xi: f64,
}

impl WaveguideParams {
    pub fn new(omega: f64, xi: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(invalid("xi", format!("hopping must be positive, got {xi}")));
        }
        Ok(Self { omega, xi })
    }

    /// Closed band interval `[omega - 2 xi, omega + 2 xi]`.
    pub fn band(&self) -> (f64, f64) {
        (self.omega - 2.0 * self.xi, self.omega + 2.0 * self.xi)
    }

    pub fn in_band(&self, energy: f64) -> bool {
        (energy - self.omega).abs() <= 2.0 * self.xi
    }

    pub fn dispersion(&self, k: f64) -> f64 {
        dispersion(k, self)
    }

    /// Analytic continuation of the cosine band to complex wave numbers.
    pub fn dispersion_complex(&self, k: Complex64) -> Complex64 {
        self.omega - 2.0 * self.xi * k.cos()
    }

    /// Bottom of the band, `omega - 2 xi`; reference energy of the quadratic
    /// long-wavelength expansion.
    pub fn omega_xi(&self) -> f64 {
        self.omega - 2.0 * self.xi
    }

    /// Reference energy `omega - pi xi` of the linearised mid-band expansion.
    pub fn omega_pi(&self) -> f64 {
        self.omega - PI * self.xi
    }
}

/// `E_k = omega - 2 xi cos k`.
pub fn dispersion(k: f64, wg: &WaveguideParams) -> f64 {
    wg.omega - 2.0 * wg.xi * k.cos()
}

/// Inverse of [`dispersion`] on the canonical half zone `[0, pi]`.
pub fn wavenumber_from_energy(energy: f64, wg: &WaveguideParams) -> Result<f64> {
    let (lower, upper) = wg.band();
    if !wg.in_band(energy) {
        return Err(Error::OutOfBand { energy, lower, upper });
    }
    let c = ((wg.omega - energy) / (2.0 * wg.xi)).clamp(-1.0, 1.0);
    Ok(c.acos())
}

/// Maps any wave number in `[-pi, pi]` onto `[0, pi]` using `E_{-k} = E_k`.
pub fn canonical_k(k: f64) -> Result<f64> {
    if !k.is_finite() || k.abs() > PI + 1e-12 {
        return Err(Error::WaveNumberOutOfRange { k });
    }
    Ok(k.abs().min(PI))
}

/// Two two-level atoms at sites `-d` and `+d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPair {
    pub omega1: f64,
    pub omega2: f64,
    pub j1: f64,
    pub j2: f64,
    pub d: usize,
}

impl AtomPair {
    pub fn new(omega1: f64, omega2: f64, j1: f64, j2: f64, d: usize) -> Result<Self> {
        let pair = Self {
            omega1,
            omega2,
            j1,
            j2,
            d,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn identical(omega: f64, j: f64, d: usize) -> Result<Self> {
        Self::new(omega, omega, j, j, d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(invalid("d", "half-separation must be at least 1"));
        }
        for (name, v) in [("omega1", self.omega1), ("omega2", self.omega2)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        for (name, v) in [("j1", self.j1), ("j2", self.j2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("coupling must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Exchanges the two atoms (mirror image about site 0).
    pub fn swapped(&self) -> Self {
        Self {
            omega1: self.omega2,
            omega2: self.omega1,
            j1: self.j2,
            j2: self.j1,
            d: self.d,
        }
    }

    pub fn transition(&self, atom: usize) -> f64 {
        if atom == 0 {
            self.omega1
        } else {
            self.omega2
        }
    }

    pub fn coupling(&self, atom: usize) -> f64 {
        if atom == 0 {
            self.j1
        } else {
            self.j2
        }
    }

    /// `Some` when both atoms share transition energy and coupling.
    pub fn as_identical(&self) -> Option<IdenticalAtoms> {
        (self.omega1 == self.omega2 && self.j1 == self.j2).then_some(IdenticalAtoms {
            omega: self.omega1,
            j: self.j1,
            d: self.d,
        })
    }
}

/// Identical mirror atoms, the setting of every resonance calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdenticalAtoms {
    pub omega: f64,
    pub j: f64,
    pub d: usize,
}

impl IdenticalAtoms {
    pub fn new(omega: f64, j: f64, d: usize) -> Result<Self> {
        AtomPair::identical(omega, j, d)?;
        Ok(Self { omega, j, d })
    }

    /// Resonance conditions divide by `J^2`; a decoupled pair has none.
    pub(crate) fn require_coupling(&self) -> Result<()> {
        if self.j > 0.0 {
            Ok(())
        } else {
            Err(Error::ZeroCoupling { j: self.j })
        }
    }

    pub fn pair(&self) -> AtomPair {
        AtomPair {
            omega1: self.omega,
            omega2: self.omega,
            j1: self.j,
            j2: self.j,
            d: self.d,
        }
    }

    pub fn df(&self) -> f64 {
        self.d as f64
    }

    /// `lambda = 2 xi / J^2`.
    pub fn lambda(&self, wg: &WaveguideParams) -> f64 {
        2.0 * wg.xi / (self.j * self.j)
    }
}

impl From<IdenticalAtoms> for AtomPair {
    fn from(a: IdenticalAtoms) -> Self {
        a.pair()
    }
}

/// Parity of a quasi-bound state under `j -> -j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    /// Sign in front of the bracket of the parity condition: `+` even, `-` odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Unperturbed wave number: `n pi / d` (odd) or `(n + 1/2) pi / d` (even).
    pub fn mode_q(self, n: i64, d: usize) -> f64 {
        let shift = match self {
            Parity::Odd => 0.0,
            Parity::Even => 0.5,
        };
        (n as f64 + shift) * PI / d as f64
    }

    /// Mode indices that keep the unperturbed wave number inside `(0, pi)`.
    pub fn mode_range(self, d: usize) -> (i64, i64) {
        match self {
            Parity::Odd => (1, d as i64 - 1),
            Parity::Even => (0, d as i64 - 1),
        }
    }

    pub fn check_mode(self, n: i64, d: usize) -> Result<()> {
        let (min, max) = self.mode_range(d);
        if n < min || n > max {
            return Err(Error::ModeIndexOutOfRange { n, min, max });
        }
        Ok(())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "odd" => Ok(Parity::Odd),
            "even" => Ok(Parity::Even),
            other => Err(invalid("parity", format!("expected odd or even, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Detunings and small parameters that the expansions are organised around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningSet {
    /// `omega - Omega`
    pub delta: f64,
    /// `omega - Omega_l` for each atom.
    pub delta_l: [f64; 2],
    /// `E_k - Omega`
    pub delta_ph: f64,
    /// `omega - 2 xi - Omega`
    pub delta_xi: f64,
    /// `omega - pi xi - Omega`
    pub delta_pi: f64,
    /// `2 xi / J^2`
    pub lambda: f64,
    /// `4 xi^2 / (d J^2)`
    pub pee: f64,
    /// `2 xi^2 / (J^2 d^3)`
    pub qcube: f64,
}

impl DetuningSet {
    /// Detunings for a pair; single-atom quantities refer to atom 1.
    pub fn new(wg: &WaveguideParams, atoms: &AtomPair, e_k: f64) -> Self {
        let big_omega = atoms.omega1;
        let j2 = atoms.j1 * atoms.j1;
        let d = atoms.d as f64;
        Self {
            delta: wg.omega - big_omega,
            delta_l: [wg.omega - atoms.omega1, wg.omega - atoms.omega2],
            delta_ph: e_k - big_omega,
            delta_xi: wg.omega - 2.0 * wg.xi - big_omega,
            delta_pi: wg.omega - PI * wg.xi - big_omega,
            lambda: 2.0 * wg.xi / j2,
            pee: 4.0 * wg.xi * wg.xi / (d * j2),
            qcube: 2.0 * wg.xi * wg.xi / (j2 * d * d * d),
        }
    }
}

/// Dressed energies of one cavity mode coupled to one atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedPair {
    pub eps_plus: f64,
    pub eps_minus: f64,
}

/// Eigenvalues of `[[omega, J], [J, Omega]]`.
pub fn dressed_energies(omega: f64, big_omega: f64, j: f64) -> DressedPair {
    let mean = 0.5 * (omega + big_omega);
    let half_gap = 0.5 * (omega - big_omega).hypot(2.0 * j);
    // The sum is exact; recover the smaller root from the product when the
    // larger one would cancel.
    let (eps_plus, eps_minus) = if mean >= 0.0 {
        let plus = mean + half_gap;
        let minus = if plus != 0.0 {
            (omega * big_omega - j * j) / plus
        } else {
            mean - half_gap
        };
        (plus, minus)
    } else {
        let minus = mean - half_gap;
        let plus = if minus != 0.0 {
            (omega * big_omega - j * j) / minus
        } else {
            mean + half_gap
        };
        (plus, minus)
    };
    DressedPair { eps_plus, eps_minus }
}

/// Leading large-detuning shift of the upper dressed level relative to the
/// cavity: `eps_plus - omega = J^2 / delta - J^4 / delta^3 + ...`.
pub fn dressed_shift_asymptote(omega: f64, big_omega: f64, j: f64) -> f64 {
    j * j / (omega - big_omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wg(omega: f64, xi: f64) -> WaveguideParams {
        WaveguideParams::new(omega, xi).unwrap()
    }

    #[test]
    fn dispersion_hits_band_centre_and_edges() {
        let w = wg(5.0, 1.0);
        assert!((dispersion(PI / 2.0, &w) - 5.0).abs() < 1e-15);
        assert!((dispersion(0.0, &w) - 3.0).abs() < 1e-15);
        assert!((dispersion(PI, &w) - 7.0).abs() < 1e-15);
    }

    #[test]
    fn dispersion_fig4_point() {
        // 10 - 0.4 cos(3 pi / 10)
        let e = dispersion(0.3 * PI, &wg(10.0, 0.2));
        assert!((e - 9.764_885_899_083_01).abs() < 1e-12, "{e}");
        let k = wavenumber_from_energy(e, &wg(10.0, 0.2)).unwrap();
        assert!((k - 0.3 * PI).abs() < 1e-12);
    }

    #[test]
    fn inverse_dispersion_trivial_points() {
        let w = wg(5.0, 1.0);
        assert!((wavenumber_from_energy(5.0, &w).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(wavenumber_from_energy(3.0, &w).unwrap(), 0.0);
        assert!(matches!(wavenumber_from_energy(7.5, &w), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn dressed_examples() {
        let p = dressed_energies(10.0, 10.0, 1.0);
        assert!((p.eps_plus - 11.0).abs() < 1e-14 && (p.eps_minus - 9.0).abs() < 1e-14);
        let p = dressed_energies(5.0, 6.0, 0.0);
        assert_eq!((p.eps_plus, p.eps_minus), (6.0, 5.0));
        // 8 +- sqrt(5)
        let p = dressed_energies(10.0, 6.0, 1.0);
        assert!((p.eps_plus - 10.236_067_977_499_79).abs() < 1e-12);
        assert!((p.eps_minus - 5.763_932_022_500_21).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WaveguideParams::new(1.0, 0.0).is_err());
        assert!(AtomPair::new(1.0, 1.0, -0.1, 0.0, 2).is_err());
        assert!(AtomPair::new(1.0, 1.0, 0.1, 0.0, 0).is_err());
        assert!(canonical_k(4.0).is_err());
        assert_eq!(canonical_k(-1.0).unwrap(), 1.0);
    }

    #[test]
    fn detunings_are_their_definitions() {
        let w = wg(10.0, 0.2);
        let atoms = AtomPair::new(6.0, 7.0, 1.0, 1.0, 10).unwrap();
        let set = DetuningSet::new(&w, &atoms, 9.9);
        let close = |a: f64, b: f64| assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        close(set.delta, 4.0);
        close(set.delta_l[0], 4.0);
        close(set.delta_l[1], 3.0);
        close(set.delta_ph, 9.9 - 6.0);
        close(set.delta_xi, 10.0 - 0.4 - 6.0);
        close(set.delta_pi, 10.0 - PI * 0.2 - 6.0);
        close(set.lambda, 0.4);
        close(set.pee, 4.0 * 0.04 / 10.0);
        close(set.qcube, 2.0 * 0.04 / 1000.0);
    }

    #[test]
    fn mode_ranges() {
        assert!(Parity::Odd.check_mode(0, 10).is_err());
        assert!(Parity::Odd.check_mode(9, 10).is_ok());
        assert!(Parity::Odd.check_mode(10, 10).is_err());
        assert!(Parity::Even.check_mode(0, 10).is_ok());
        assert!((Parity::Even.mode_q(3, 10) - 0.35 * PI).abs() < 1e-15);
    }
}
