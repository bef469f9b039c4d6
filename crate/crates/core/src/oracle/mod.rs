//! Brute-force reference solvers that the closed forms are checked against.

pub mod banded;
mod diag;
mod lattice;
mod roots;

pub use banded::BandedMatrix;
pub use diag::{oracle_diagonalize, oracle_out_of_band, MAX_CHAIN};
pub use lattice::{lattice_residual, oracle_scatter, LatticeProblem, OracleScattering};
pub use roots::{oracle_root_scan, winding_number, Rect};
