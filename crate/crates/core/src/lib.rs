//! Absorption and coherent energy transfer in a driven, dissipative
//! two-pigment dimer.
//!
//! The donor is driven by a train of Gaussian pulses; both pigments couple to
//! thermal baths through `σz`. Dynamics are integrated in the instantaneous
//! eigenbasis of the driven Hamiltonian and reported as acceptor excitation
//! `P`, total efficiency `η_total` and concurrence.

pub mod error;
pub mod hamiltonian;
pub mod master;
pub mod observables;
pub mod pulse;
pub mod scenarios;

pub use error::{Error, Result};
pub use hamiltonian::{DimerParams, EigenFrame, Mat4};
pub use master::{evolve, evolve_with, DensityState, EvolveOptions, Route, Trajectory};
pub use pulse::{GaussianSegment, PulseTrain, TimeGrid};
