//! Nodal flux assembly: transport splitting, the conservative
//! coagulation-fragmentation flux, the algebraic monomer concentration, and
//! the source term.
//!
//! The size-weighted density `x·u` obeys a conservation law whose flux has
//! two parts:
//!
//! * a transport part `G·x·u` with velocity `G(x) = V·k_on(x) − k_off(x)`,
//!   split into `G⁺ ≥ 0` and `G⁻ ≤ 0` branches for upwinding (a λ-family of
//!   convex splittings, or Lax–Friedrichs with the spread recomputed at every
//!   evaluation);
//! * a coagulation-fragmentation part `CF` expressed as a double primed sum
//!   so that coagulation and fragmentation move mass *within* the domain
//!   without creating or destroying it (`CF_0 = CF_N = 0` structurally).
//!
//! The free monomer concentration `V` is never integrated as a separate
//! unknown: total mass conservation gives it algebraically as
//! `V = V0 + m0 − m(t)` with `m` the current polymer mass.
//!
//! At the truncation boundary `x = R` the model requires the transport flux
//! to vanish (mass must not be pushed through the artificial right edge), so
//! [`assemble`] zeroes both split velocities at the last node. The *physical*
//! velocity `G` is kept alongside for the source term and step-size control.

use crate::error::{Error, Result};
use crate::grid::{polymer_mass, Grid, SystemState};
use crate::kernels::KernelTables;
use crate::quad::{END_BLOCK, LEFT_ROWS, RIGHT_ROWS};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Transport flux decomposition `G = G⁺ + G⁻`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplittingScheme {
    /// Convex family: `G⁺ = (V0 + m0 − m + λ·m)·k_on`,
    /// `G⁻ = −λ·m·k_on − k_off`, with `λ ∈ [0, 1]`.
    Lambda(f64),
    /// `G± = (G ± m_LF)/2` with `m_LF = max|G|` recomputed at every
    /// evaluation.
    LaxFriedrichs,
}

impl SplittingScheme {
    /// Checks the λ parameter range.
    pub fn validate(&self) -> Result<()> {
        if let SplittingScheme::Lambda(lam) = self {
            if !(*lam >= 0.0 && *lam <= 1.0) {
                return Err(Error::Config(format!(
                    "splitting parameter lambda must lie in [0, 1], got {lam}"
                )));
            }
        }
        Ok(())
    }
}

/// Which size weights the coagulation-fragmentation integrand: the inner
/// summation variable (`x_j`, the form consistent with the continuous
/// operators — default) or the outer one (`x_l`, kept for comparison).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiscoagWeight {
    #[default]
    Inner,
    Printed,
}

/// All nodal flux ingredients for one right-hand-side evaluation.
///
/// Invariants: `hplus_i = gplus_i·x_i·u_i + cf_i` and
/// `hminus_i = gminus_i·x_i·u_i` for the *stored* velocities;
/// `cf[0] = cf[n] = 0`. The stored `gplus`/`gminus` are the physical split
/// velocities except at the last node, where the truncation closure zeroes
/// both (so `hplus[n] = hminus[n] = 0` and no mass crosses `x = R`); `g`
/// keeps the physical unsplit velocity everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalFluxes {
    pub hplus: Vec<f64>,
    pub hminus: Vec<f64>,
    pub gplus: Vec<f64>,
    pub gminus: Vec<f64>,
    pub g: Vec<f64>,
    pub cf: Vec<f64>,
}

/// Free monomer concentration by mass conservation:
/// `V = V0 + m0 − polymer_mass(u)`. May go transiently negative under
/// undershoot; the driver reports that as a divergence diagnostic.
pub fn monomer_concentration(state: &SystemState, grid: &Grid) -> Result<f64> {
    state.monomer(grid)
}

/// Splits the transport velocity into upwind branches.
///
/// Returns `(gplus, gminus, g)` where `g = V·k_on − k_off` is the physical
/// velocity and `gplus + gminus = g` elementwise to roundoff.
pub fn split_transport(
    tables: &KernelTables,
    state: &SystemState,
    scheme: SplittingScheme,
    grid: &Grid,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    scheme.validate()?;
    let n1 = grid.n + 1;
    if tables.len() != n1 || state.u.len() != n1 {
        return Err(Error::LengthMismatch {
            expected: n1,
            got: tables.len().min(state.u.len()),
        });
    }
    let m = polymer_mass(grid, &state.u)?;
    Ok(split_transport_raw(
        tables, m, state.v0, state.m0, scheme, grid,
    ))
}

/// Splitting with the polymer mass already computed (shared by the public
/// wrapper and the run driver, which reuses the mass for other purposes).
pub(crate) fn split_transport_raw(
    tables: &KernelTables,
    m: f64,
    v0: f64,
    m0: f64,
    scheme: SplittingScheme,
    grid: &Grid,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n1 = grid.n + 1;
    debug_assert_eq!(tables.len(), n1);
    let v = v0 + m0 - m;
    let g: Vec<f64> = (0..n1)
        .map(|i| v * tables.kon[i] - tables.koff[i])
        .collect();
    match scheme {
        SplittingScheme::Lambda(lam) => {
            let gplus: Vec<f64> = (0..n1)
                .map(|i| (v0 + m0 - m + lam * m) * tables.kon[i])
                .collect();
            let gminus: Vec<f64> = (0..n1)
                .map(|i| -lam * m * tables.kon[i] - tables.koff[i])
                .collect();
            (gplus, gminus, g)
        }
        SplittingScheme::LaxFriedrichs => {
            let m_lf = g.iter().fold(0.0_f64, |acc, &gi| acc.max(gi.abs()));
            let gplus: Vec<f64> = g.iter().map(|&gi| (gi + m_lf) / 2.0).collect();
            let gminus: Vec<f64> = g.iter().map(|&gi| (gi - m_lf) / 2.0).collect();
            (gplus, gminus, g)
        }
    }
}

/// Conservative coagulation-fragmentation flux:
///
/// `CF_i = Δx²·Σ′_{j=0}^{i} Σ′_{l=i}^{N} w·(k_c[j, l−j]·u_j·u_{l−j} −
/// k_f[j, l−j]·u_l)` with weight `w = x_j` ([`DiscoagWeight::Inner`]) or
/// `x_l` ([`DiscoagWeight::Printed`]); samples below the diagonal (`l < j`)
/// are zero. The outer primed sum is left-anchored, the inner right-anchored,
/// and empty spans vanish, so `CF_0 = CF_N = 0` exactly.
///
/// Evaluated in O(N²) by splitting each quadrature row into its unit part
/// plus end corrections: running prefix/suffix sums supply the unit×unit
/// block, and the corrections touch at most four indices per span end.
pub fn coagfrag_flux(
    tables: &KernelTables,
    u: &[f64],
    grid: &Grid,
    weight: DiscoagWeight,
) -> Result<Vec<f64>> {
    let n = grid.n;
    let n1 = n + 1;
    if tables.len() != n1 || u.len() != n1 {
        return Err(Error::LengthMismatch {
            expected: n1,
            got: tables.len().min(u.len()),
        });
    }
    let dx2 = grid.dx * grid.dx;
    // Generic-rule end corrections relative to unit weights.
    let delta: [f64; 4] = [
        END_BLOCK[0] - 1.0,
        END_BLOCK[1] - 1.0,
        END_BLOCK[2] - 1.0,
        END_BLOCK[3] - 1.0,
    ];

    // Integrand matrix g[j][l] (flat, stride n1), zero below the diagonal.
    let mut gm = vec![0.0_f64; n1 * n1];
    for j in 0..n1 {
        let uj = u[j];
        let xj = grid.x[j];
        for l in j..n1 {
            let d = l - j;
            let w = match weight {
                DiscoagWeight::Inner => xj,
                DiscoagWeight::Printed => grid.x[l],
            };
            gm[j * n1 + l] = w * (tables.kc(j, d) * uj * u[d] - tables.kf(j, d) * u[l]);
        }
    }
    // Row suffix sums: suf[j][l] = Σ_{l' ≥ l} g[j][l'] for every l (below the
    // diagonal the sum plateaus, since those samples are zero; left-anchored
    // rows do reach support nodes j > i, so the full range matters).
    let mut suf = vec![0.0_f64; n1 * n1];
    for j in 0..n1 {
        let mut acc = 0.0;
        for l in (0..n1).rev() {
            acc += gm[j * n1 + l];
            suf[j * n1 + l] = acc;
        }
    }
    // Column prefix over rows, maintained incrementally while i ascends:
    // after the update at iteration i, pre_row[l] = Σ_{j ≤ i} g[j][l].
    let mut pre_row = vec![0.0_f64; n1];
    for l in 0..n1 {
        pre_row[l] = gm[l]; // row j = 0
    }

    // Inner-weighted row sum Σ_l b_l·g[j][l] over the generic span (i, N).
    let inner_generic = |j: usize, i: usize| -> f64 {
        let mut s = suf[j * n1 + i];
        for (m, d) in delta.iter().enumerate() {
            s += d * (gm[j * n1 + i + m] + gm[j * n1 + n - m]);
        }
        s
    };

    let mut cf = vec![0.0_f64; n1];
    for i in 1..n {
        for l in 0..n1 {
            pre_row[l] += gm[i * n1 + l];
        }
        let span_in = n - i;
        let tot = if i <= 7 {
            // Outer span (0, i) uses its exact left-anchored row (support on
            // nodes 1..); the inner span (i, N) is generic since N ≥ 16.
            let mut tot = 0.0;
            for (k, a) in LEFT_ROWS[i - 1].iter().enumerate() {
                tot += a * inner_generic(1 + k, i);
            }
            tot
        } else if span_in <= 6 {
            // Inner span uses its exact right-anchored row (support on nodes
            // N, N−1, …); the outer span (0, i) is generic since i > 7.
            let mut tot = 0.0;
            for (k, b) in RIGHT_ROWS[span_in - 1].iter().enumerate() {
                let l = n - k;
                let mut osum = pre_row[l];
                for (m, d) in delta.iter().enumerate() {
                    osum += d * (gm[m * n1 + l] + gm[(i - m) * n1 + l]);
                }
                tot += b * osum;
            }
            tot
        } else {
            // Both spans generic: unit×unit block via the running sums, then
            // end corrections on each side (outer corrections multiply the
            // fully inner-weighted row sums).
            let mut tot = 0.0;
            for j in 0..=i {
                tot += suf[j * n1 + i];
            }
            for (m, d) in delta.iter().enumerate() {
                tot += d * (pre_row[i + m] + pre_row[n - m]);
            }
            for (m, d) in delta.iter().enumerate() {
                tot += d * (inner_generic(m, i) + inner_generic(i - m, i));
            }
            tot
        };
        cf[i] = dx2 * tot;
    }
    Ok(cf)
}

/// Combines the pieces into nodal fluxes `H⁺ = G⁺·x·u + CF`,
/// `H⁻ = G⁻·x·u`, applying the truncation closure at the last node (both
/// split velocities zeroed there so the flux cannot carry mass past `x = R`).
pub fn assemble(
    mut gplus: Vec<f64>,
    mut gminus: Vec<f64>,
    g: Vec<f64>,
    cf: Vec<f64>,
    u: &[f64],
    grid: &Grid,
) -> NodalFluxes {
    let n = grid.n;
    debug_assert!(
        gplus.len() == n + 1
            && gminus.len() == n + 1
            && g.len() == n + 1
            && cf.len() == n + 1
            && u.len() == n + 1
    );
    gplus[n] = 0.0;
    gminus[n] = 0.0;
    let hplus: Vec<f64> = (0..=n)
        .map(|i| gplus[i] * grid.x[i] * u[i] + cf[i])
        .collect();
    let hminus: Vec<f64> = (0..=n).map(|i| gminus[i] * grid.x[i] * u[i]).collect();
    NodalFluxes {
        hplus,
        hminus,
        gplus,
        gminus,
        g,
        cf,
    }
}

/// Source term of the size-weighted conservation form: `s_i = G_i·u_i` with
/// the full physical velocity.
pub fn source_term(g: &[f64], u: &[f64]) -> Vec<f64> {
    g.iter().zip(u).map(|(&gi, &ui)| gi * ui).collect()
}
