//! Simulation and equilibrium analysis for two-player EWL quantum games and
//! the Bayesian game assembled from them.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; randomness is always drawn from an RNG the caller
//! passes in, see [`rng`] for the deterministic stream layout.
//!
//! Basis ordering is big-endian in qubit index: qubit 0 is the most
//! significant bit of a basis index, so a two-qubit index `0b10` is `|A=1, B=0⟩`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bayesian;
pub mod circuit;
pub mod emulation;
pub mod equilibrium;
mod error;
pub mod game;
pub mod noise;
pub mod rng;
pub mod statevector;

pub use error::{Error, Result};
