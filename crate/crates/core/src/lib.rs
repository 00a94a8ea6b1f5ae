//! Simulation of a single trapped ion inside an optical or microwave cavity,
//! driven by a classical laser.
//!
//! The crate builds Hamiltonians of the ion ⊗ vibration ⊗ cavity system in
//! the lab frame and the interaction picture, and uses them to evaluate a
//! three-pulse controlled-NOT protocol: a Hadamard-type
//! carrier pulse, an anti-Jaynes-Cummings phase pulse through the cavity,
//! and a second carrier pulse. The vibrational mode carries the control
//! qubit, the ion's internal levels the target, and the cavity vacuum acts
//! as an auxiliary qubit.

pub mod cli;
pub mod config;
pub mod error;
pub mod gates;
pub mod hamiltonian;
pub mod noise;
pub mod propagate;
pub mod space;
mod sparse;

pub use error::{Error, Result};
pub use sparse::Generator;
