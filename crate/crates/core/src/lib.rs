//! Single-photon transport through a coupled-resonator waveguide with two
//! embedded two-level atoms.
//!
//! The atoms at sites `-d` and `+d` act as frequency-selective mirrors. The
//! crate computes real-k scattering amplitudes, quasi-bound states of the
//! cavity formed between the mirrors (complex wave numbers, perturbative and
//! exact), continuum effective theories near the band bottom and band centre,
//! out-of-band edge bound states, and brute-force lattice oracles that every
//! closed form is tested against.

pub mod boundstates;
pub mod cli;
pub mod continuum_long;
pub mod continuum_short;
pub mod error;
pub mod model;
pub mod newton;
pub mod oracle;
pub mod resonance;
pub mod scattering;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    canonical_k, dispersion, dressed_energies, wavenumber_from_energy, AtomPair, DetuningSet, DressedPair,
    IdenticalAtoms, Parity, WaveguideParams,
};
pub use scattering::{solve_scattering, transmission_closed_form, ScatteringSolution};

/// Crate version embedded in every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
