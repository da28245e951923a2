//! Flip-flop qubits (donor electron/nuclear spin dressed by a donor-dot charge
//! qubit) under classical 1/f charge noise.
//!
//! Energies are angular frequencies in rad/s throughout (ħ = 1); times are in
//! seconds.

pub mod error;
pub mod fourlevel;
pub mod linalg;
pub mod noise;
pub mod par;
pub mod quad;
pub mod single_qubit;
pub mod special;
pub mod two_qubit;
pub mod units;

pub use error::{Error, Result};
