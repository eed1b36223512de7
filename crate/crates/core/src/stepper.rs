//! Third-order strong-stability-preserving Runge–Kutta stepping with the
//! model's adaptive CFL step size.
//!
//! The step bound is `Δt = cfl_safety / (G + C + F)` with
//!
//! * `G = (1/Δx)·max_i (G⁺_i − G⁻_i)` — transport speeds;
//! * `C = Δx·max_i Σ′_{j=1}^{N} k_c[i][j]·u_j` — coagulation intensity;
//! * `F = max_i (Δx/2)·Σ′_{j=1}^{i−1} k_f[j][i−j]` — fragmentation
//!   intensity (state-independent, so callers may precompute it).
//!
//! The `Δx` factors on `C` and `F` complete the dimensional balance of the
//! underlying integral bounds; `cfl_literal = true` drops them, leaving the
//! bare kernel sums as the denominator terms.

use crate::error::{Error, Result};
use crate::flux::{split_transport, SplittingScheme};
use crate::grid::{Grid, SystemState};
use crate::kernels::KernelTables;
use crate::quad::weighted_sum;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Time-step control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Safety factor in `(0, 1]` applied to the CFL bound. Default 0.9.
    pub cfl_safety: f64,
    /// Hard floor (hours): a CFL step below this aborts the run as diverged.
    pub dt_min: f64,
    /// Optional cap (hours) on the step size.
    pub dt_max: Option<f64>,
    /// Use the bare kernel sums in the CFL denominator (no `Δx` factor on
    /// the coagulation and fragmentation terms).
    pub cfl_literal: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            cfl_safety: 0.9,
            dt_min: 1e-12,
            dt_max: None,
            cfl_literal: false,
        }
    }
}

impl StepControl {
    /// Checks ranges and the `dt_min < dt_max` ordering.
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::Config(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.dt_min > 0.0) || !self.dt_min.is_finite() {
            return Err(Error::Config(format!(
                "dt_min must be positive and finite, got {}",
                self.dt_min
            )));
        }
        if let Some(cap) = self.dt_max {
            if !(cap > 0.0) || !cap.is_finite() {
                return Err(Error::Config(format!(
                    "dt_max must be positive and finite, got {cap}"
                )));
            }
            if self.dt_min >= cap {
                return Err(Error::Config(format!(
                    "dt_min ({}) must be smaller than dt_max ({cap})",
                    self.dt_min
                )));
            }
        }
        Ok(())
    }
}

/// Transport part of the CFL denominator: `(1/Δx)·max_i (G⁺_i − G⁻_i)`.
pub fn transport_cfl_term(gplus: &[f64], gminus: &[f64], grid: &Grid) -> f64 {
    let spread = gplus
        .iter()
        .zip(gminus)
        .fold(0.0_f64, |acc, (&p, &m)| acc.max(p - m));
    spread / grid.dx
}

/// Coagulation part of the CFL denominator:
/// `Δx·max_i Σ′_{j=1}^{N} k_c[i][j]·u_j` (the `Δx` dropped when `literal`).
pub fn coag_cfl_term(tables: &KernelTables, u: &[f64], grid: &Grid, literal: bool) -> Result<f64> {
    let n = grid.n;
    let mut row = vec![0.0_f64; n + 1];
    let mut worst = 0.0_f64;
    for i in 0..=n {
        for j in 0..=n {
            row[j] = tables.kc(i, j) * u[j];
        }
        worst = worst.max(weighted_sum(&row, 1, n)?);
    }
    Ok(if literal { worst } else { grid.dx * worst })
}

/// Fragmentation part of the CFL denominator:
/// `max_i (Δx/2)·Σ′_{j=1}^{i−1} k_f[j][i−j]` (the `Δx` dropped when
/// `literal`). State-independent: precompute once per run.
///
/// The span `(1, i−1)` is interior, where the quadrature has no dedicated
/// short rows; spans of up to six intervals (`i ≤ 8`) fall back to the plain
/// unit-weight sum, which is second-order — ample for a step-size bound.
pub fn frag_cfl_term(tables: &KernelTables, grid: &Grid, literal: bool) -> Result<f64> {
    let n = grid.n;
    let mut anti = vec![0.0_f64; n + 1];
    let mut worst = 0.0_f64;
    for i in 0..=n {
        for v in anti.iter_mut() {
            *v = 0.0;
        }
        for j in 0..i {
            anti[j] = tables.kf(j, i - j);
        }
        let s = if i >= 3 && i - 2 > 6 {
            weighted_sum(&anti, 1, i - 1)?
        } else if i >= 3 {
            anti[1..i].iter().sum()
        } else {
            0.0
        };
        worst = worst.max(0.5 * s);
    }
    Ok(if literal { worst } else { grid.dx * worst })
}

/// Full CFL step: `cfl_safety / (G + C + F)`, capped by `dt_max`. The caller
/// (the run driver) treats a result below `dt_min` as divergence.
pub fn cfl_timestep(
    state: &SystemState,
    tables: &KernelTables,
    scheme: SplittingScheme,
    grid: &Grid,
    control: &StepControl,
) -> Result<f64> {
    let (gp, gm, _) = split_transport(tables, state, scheme, grid)?;
    let g = transport_cfl_term(&gp, &gm, grid);
    let c = coag_cfl_term(tables, &state.u, grid, control.cfl_literal)?;
    let f = frag_cfl_term(tables, grid, control.cfl_literal)?;
    Ok(bounded_step(g + c + f, control))
}

/// Applies the safety factor and the optional cap to a computed denominator.
pub fn bounded_step(denominator: f64, control: &StepControl) -> f64 {
    let dt = control.cfl_safety / denominator;
    match control.dt_max {
        Some(cap) => dt.min(cap),
        None => dt,
    }
}

/// One strong-stability-preserving third-order Runge–Kutta step:
///
/// `u⁽¹⁾ = uⁿ + Δt·L(uⁿ)`;
/// `u⁽²⁾ = 3/4·uⁿ + 1/4·u⁽¹⁾ + 1/4·Δt·L(u⁽¹⁾)`;
/// `uⁿ⁺¹ = 1/3·uⁿ + 2/3·u⁽²⁾ + 2/3·Δt·L(u⁽²⁾)`.
///
/// Node 0 is re-pinned to zero after every stage. The right-hand side `L`
/// sees each stage density, so anything it derives from the density (the
/// monomer concentration in particular) is stage-consistent.
pub fn rk3_step(
    u: &[f64],
    dt: f64,
    mut rhs: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    debug_assert!(dt > 0.0);
    let l0 = rhs(u)?;
    let mut u1: Vec<f64> = u
        .iter()
        .zip(&l0)
        .map(|(&ui, &li)| ui + dt * li)
        .collect();
    u1[0] = 0.0;

    let l1 = rhs(&u1)?;
    let mut u2: Vec<f64> = (0..u.len())
        .map(|i| 0.75 * u[i] + 0.25 * u1[i] + 0.25 * dt * l1[i])
        .collect();
    u2[0] = 0.0;

    let l2 = rhs(&u2)?;
    let mut out: Vec<f64> = (0..u.len())
        .map(|i| u[i] / 3.0 + 2.0 / 3.0 * u2[i] + 2.0 / 3.0 * dt * l2[i])
        .collect();
    out[0] = 0.0;
    Ok(out)
}
