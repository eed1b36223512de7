//! Core solver for a continuous polymer size-distribution model with
//! monomer-driven growth (polymerization/depolymerization transport),
//! coagulation, and fragmentation.
//!
//! The model evolves a size density `u(x, t)` on `[0, R]` coupled to a scalar
//! monomer concentration `V(t)` through exact mass conservation
//! `V(t) + ∫ x·u dx = const`. The discretization is built to preserve that
//! identity: all integral terms share one fifth-order end-corrected
//! quadrature ([`quad`]), the coagulation–fragmentation operator is applied
//! in flux (divergence) form ([`flux`]), spatial derivatives use a
//! fifth-order node-based WENO reconstruction ([`weno`]), and time stepping
//! is strong-stability-preserving RK3 with an adaptive CFL time step
//! ([`stepper`]). The [`sim`] module ties these into a full run loop with
//! observables, snapshots, and divergence diagnostics.
//!
//! This crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod flux;
pub mod grid;
pub mod kernels;
pub mod quad;
pub mod sim;
pub mod stepper;
pub mod weno;

pub use error::{Error, Result};
pub use flux::{DiscoagWeight, SplittingScheme};
pub use grid::{Grid, InitialProfile, SystemState};
pub use kernels::{KernelTables, RateModel};
pub use sim::{ode_monomer_check, run, SimConfig, SimulationResult, Termination};
pub use stepper::StepControl;
pub use weno::{SpatialScheme, WenoConfig};
