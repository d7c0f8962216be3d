//! Lattice numerics for multi-time wave functions of one Dirac particle
//! species coupled to photons: spectral grid operators, free Dirac and
//! Maxwell dynamics, photon scalar products, the sector Hamiltonian, gauge
//! transformations and external-source constructions.

pub mod container;
pub mod dirac;
pub mod error;
pub mod fock;
pub mod gauge;
pub mod grid;
pub mod maxwell;
pub mod multitime;
pub mod par;
pub mod random;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
