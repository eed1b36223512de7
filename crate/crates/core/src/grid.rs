//! Spatial discretization and evolving system state.
//!
//! The size axis `[0, R]` is divided into `N` uniform cells with nodes
//! `x_i = i·Δx`. The state carries the nodal size-density `u` (μM per unit
//! size), the current time (hours), and two frozen scalars: the initial free
//! monomer concentration `V0` and the initial polymer mass `m0`. The free
//! monomer concentration at any later time is recovered algebraically from
//! mass conservation, `V(t) = V0 + m0 − m(t)`, rather than integrated as an
//! independent unknown.

use crate::error::{Error, Result};
use crate::quad;
use alloc::format;
use alloc::vec::Vec;

/// Minimum cell count: the boundary quadrature rows reach up to 8 nodes from
/// each end and the fifth-order reconstruction needs 7-node stencils, so the
/// two ends must not overlap.
pub const MIN_CELLS: usize = 16;

/// Uniform grid on `[0, R]` with `N` cells (`N + 1` nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    /// Maximum polymer size (dimensionless size units).
    pub r: f64,
    /// Number of cells; nodes are indexed `0..=n`.
    pub n: usize,
    /// Cell width `R / N`.
    pub dx: f64,
    /// Node coordinates `x_i = i·dx`, length `n + 1`.
    pub x: Vec<f64>,
}

/// Initial size-density profile.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `u(x, 0) = height` for `0 < x ≤ cutoff`, zero beyond (and zero at the
    /// pinned node `x = 0`).
    Step { height: f64, cutoff: f64 },
    /// Explicit nodal values, length `N + 1`; node 0 is overridden to zero.
    Tabulated(Vec<f64>),
}

/// Full evolving state of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    /// Nodal size-density, length `N + 1`; `u[0] == 0` at all times.
    pub u: Vec<f64>,
    /// Current time in hours.
    pub time: f64,
    /// Initial free monomer concentration (μM), frozen at initialization.
    pub v0: f64,
    /// Initial polymer mass `Δx·Σ′ x_j·u_j(0)` (μM), frozen at initialization.
    pub m0: f64,
}

/// Builds the uniform grid on `[0, R]` with `n` cells.
pub fn make_grid(r: f64, n: usize) -> Result<Grid> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Config(format!(
            "domain size R must be positive and finite, got {r}"
        )));
    }
    if n < MIN_CELLS {
        return Err(Error::Config(format!(
            "cell count N must be at least {MIN_CELLS}, got {n}"
        )));
    }
    let dx = r / n as f64;
    let x = (0..=n).map(|i| i as f64 * dx).collect();
    Ok(Grid { r, n, dx, x })
}

/// Evaluates the initial profile on the grid. Node 0 is forced to zero: the
/// boundary condition `u(0, t) = 0` overrides the initial datum there.
pub fn init_density(grid: &Grid, profile: &InitialProfile) -> Result<Vec<f64>> {
    let mut u = match profile {
        InitialProfile::Step { height, cutoff } => {
            if *height < 0.0 || !height.is_finite() {
                return Err(Error::Config(format!(
                    "initial profile height must be nonnegative, got {height}"
                )));
            }
            if !(*cutoff > 0.0 && *cutoff < grid.r) {
                return Err(Error::Config(format!(
                    "initial profile cutoff must lie inside (0, {}), got {cutoff}",
                    grid.r
                )));
            }
            grid.x
                .iter()
                .map(|&x| if x <= *cutoff { *height } else { 0.0 })
                .collect::<Vec<f64>>()
        }
        InitialProfile::Tabulated(values) => {
            if values.len() != grid.n + 1 {
                return Err(Error::LengthMismatch {
                    expected: grid.n + 1,
                    got: values.len(),
                });
            }
            values.clone()
        }
    };
    u[0] = 0.0;
    Ok(u)
}

/// Discrete polymer mass `Δx·Σ′_{j=0}^{N} x_j·u_j` (μM), via the full-span
/// fifth-order quadrature rule.
pub fn polymer_mass(grid: &Grid, u: &[f64]) -> Result<f64> {
    if u.len() != grid.n + 1 {
        return Err(Error::LengthMismatch {
            expected: grid.n + 1,
            got: u.len(),
        });
    }
    let weighted: Vec<f64> = grid.x.iter().zip(u).map(|(&x, &ui)| x * ui).collect();
    quad::integrate(&weighted, grid.dx, 0, grid.n)
}

impl SystemState {
    /// Assembles the initial state: evaluates the profile, pins node 0, and
    /// freezes `V0` and the initial polymer mass `m0`.
    pub fn new(grid: &Grid, profile: &InitialProfile, v0: f64) -> Result<Self> {
        if v0 < 0.0 || !v0.is_finite() {
            return Err(Error::Config(format!(
                "initial monomer concentration V0 must be nonnegative, got {v0}"
            )));
        }
        let u = init_density(grid, profile)?;
        let m0 = polymer_mass(grid, &u)?;
        Ok(SystemState {
            u,
            time: 0.0,
            v0,
            m0,
        })
    }

    /// Free monomer concentration by mass conservation:
    /// `V = V0 + m0 − polymer_mass(u)`.
    pub fn monomer(&self, grid: &Grid) -> Result<f64> {
        Ok(self.v0 + self.m0 - polymer_mass(grid, &self.u)?)
    }
}
