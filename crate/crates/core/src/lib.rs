//! Exact simulation of an effective Motzkin spin chain realised with
//! three-level Rydberg atoms.
//!
//! The crate is organised bottom-up:
//!
//! - [`qutrit`] and [`sparse`]: basis indexing, state vectors, sparse
//!   operators and partial traces for chains of three-level sites.
//! - [`motzkin`]: lattice-path combinatorics, the ideal Motzkin state and the
//!   frustration-free Motzkin Hamiltonian.
//! - [`rydberg`]: interaction tables, array geometry, the Rydberg pair
//!   Hamiltonian, microwave drives and the fine-tuning checker.
//! - [`spectra`]: dense and Lanczos eigensolvers.
//! - [`krylov`] and [`dynamics`]: time propagation and the adiabatic
//!   detuning-ramp protocol.
//! - [`grape`]: gradient pulse optimisation used to prepare the Rydberg
//!   ground state from `|00…0⟩`.
//! - [`entanglement`]: entropies, magnetisation blocks and scaling studies.
//! - [`config`], [`output`] and [`pipeline`]: run configuration, file
//!   formats and the end-to-end pipelines behind the `motzkin-ryd` binary.
//!
//! Energies are in MHz and times in µs throughout. With the default unit
//! convention a propagator is `exp(-i H t)` with `H` in MHz and `t` in µs.

pub mod config;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod grape;
pub mod krylov;
pub mod motzkin;
pub mod output;
pub mod pipeline;
pub mod qutrit;
pub mod rydberg;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qutrit::{BasisConfig, QutritState, SiteLabel};
pub use sparse::SparseOperator;
