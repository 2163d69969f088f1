//! Variational simulation toolkit for the one-dimensional antiferromagnetic
//! Heisenberg chain.
//!
//! The crate covers the full loop: Pauli-string observables ([`pauli`]), a
//! dense statevector engine ([`statevec`]), the chain Hamiltonian and its exact
//! spectrum ([`model`]), hardware-efficient, exchange and layered ansätze
//! ([`ansatz`]), shot-based Pauli measurement with error propagation
//! ([`measure`]), a density-matrix noise model calibrated to superconducting
//! hardware ([`noise`]), and sweep/optimizer orchestration with report output
//! ([`runner`]). The [`cli`] module backs the `spinvqe` binary.
//!
//! Conventions: site `i` is bit `i` of a basis index (site 0 least
//! significant); bitstrings and Pauli strings are written site 0 first.

pub mod ansatz;
pub mod cli;
pub mod error;
pub mod measure;
pub mod model;
pub mod noise;
pub mod pauli;
pub mod rng;
pub mod runner;
pub mod statevec;

pub use error::{Error, Result};
