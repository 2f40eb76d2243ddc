//! Lindblad dynamics of one ion's two-level system coupled to one motional mode.

mod integrator;
mod master;
mod matrix;
mod scans;
mod state;

pub use integrator::{dopri5, IntegratorOptions, IntegratorStats};
pub use master::{evolve, evolve_sampled, evolve_with, NoiseModel, Pulse, Sideband, Target};
pub use matrix::{CMatrix, SparseOp};
pub use scans::*;
pub use state::{fock_cutoff, thermal_populations, QuantumState};
