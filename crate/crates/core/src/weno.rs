//! Node-based fifth-order WENO reconstruction of half-node fluxes, ghost
//! handling, flux divergence, and a first-order upwind alternative.
//!
//! Each split flux branch is reconstructed at the half-nodes `i ± 1/2` from
//! five nodal values gathered upwind-first: for `H⁺` (wind blowing right)
//! the stencils ascend, for `H⁻` (wind blowing left) they descend, so a
//! single face routine serves all four gathers. Out-of-range indices use
//! ghost values that are identically zero: left of the origin `u = 0` kills
//! the transport flux and the coagulation-fragmentation flux extends by
//! zero; right of the truncation boundary the transport velocity is zeroed
//! and the coagulation-fragmentation flux is zero at and beyond `x = R`.
//!
//! The reconstruction is the classical smooth-selective combination: three
//! third-order sub-stencils, smoothness indicators, and regularized ideal
//! weights. The middle indicator uses the standard `1/4·(W2 − W4)²` first
//! -difference term so that all three indicators agree to leading order on
//! smooth data — this is what preserves fifth-order accuracy.

use crate::grid::Grid;
use alloc::vec;
use alloc::vec::Vec;

/// Ideal (linear) weights in the order returned by [`nonlinear_weights`]:
/// index 0 pairs with the downwind-most sub-stencil, index 2 with the
/// upwind-most.
pub const IDEAL_WEIGHTS: [f64; 3] = [3.0 / 10.0, 6.0 / 10.0, 1.0 / 10.0];

/// Spatial discretization of the flux divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpatialScheme {
    /// Fifth-order WENO reconstruction.
    #[default]
    Weno5,
    /// First-order upwind differencing (for scheme comparisons).
    Upwind1,
}

/// Reconstruction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WenoConfig {
    /// Regularization added to the smoothness indicators before forming
    /// weights; prevents the denominator from vanishing. Default `1e-6`.
    pub epsilon: f64,
    /// Which divergence operator the stepper uses.
    pub scheme: SpatialScheme,
}

impl Default for WenoConfig {
    fn default() -> Self {
        WenoConfig {
            epsilon: 1e-6,
            scheme: SpatialScheme::Weno5,
        }
    }
}

impl WenoConfig {
    /// Checks the regularization parameter.
    pub fn validate(&self) -> crate::error::Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(crate::error::Error::Config(alloc::format!(
                "weno_epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Smoothness indicators of the three sub-stencils of `W1..W5`, in stencil
/// order: index 0 for `(W1, W2, W3)`, 1 for `(W2, W3, W4)`, 2 for
/// `(W3, W4, W5)`.
pub fn smoothness_indicators(w: &[f64; 5]) -> [f64; 3] {
    let sq = |v: f64| v * v;
    let s1 = 13.0 / 12.0 * sq(w[0] - 2.0 * w[1] + w[2])
        + 0.25 * sq(w[0] - 4.0 * w[1] + 3.0 * w[2]);
    let s2 = 13.0 / 12.0 * sq(w[1] - 2.0 * w[2] + w[3]) + 0.25 * sq(w[1] - w[3]);
    let s3 = 13.0 / 12.0 * sq(w[2] - 2.0 * w[3] + w[4])
        + 0.25 * sq(3.0 * w[2] - 4.0 * w[3] + w[4]);
    [s1, s2, s3]
}

/// Normalized nonlinear weights `w_r = a_r / Σ a` with
/// `a_r = d_r / (ε + S_r)` and ideal weights `d = (3/10, 6/10, 1/10)` in the
/// given index order. All weights are positive and sum to 1.
pub fn nonlinear_weights(s: &[f64; 3], epsilon: f64) -> [f64; 3] {
    let a = [
        IDEAL_WEIGHTS[0] / (epsilon + s[0]),
        IDEAL_WEIGHTS[1] / (epsilon + s[1]),
        IDEAL_WEIGHTS[2] / (epsilon + s[2]),
    ];
    let total = a[0] + a[1] + a[2];
    [a[0] / total, a[1] / total, a[2] / total]
}

/// Fifth-order half-node reconstruction from five upwind-first nodal values;
/// the target face lies between `W3` and `W4`. The descending gathers used
/// for `H⁻` make the same routine serve both branches (the mirror image of a
/// valid stencil list is the other branch's stencil list).
pub fn reconstruct_half_flux(w: &[f64; 5], epsilon: f64) -> f64 {
    let s = smoothness_indicators(w);
    // The downwind-most sub-stencil carries the largest ideal weight, the
    // upwind-most the smallest; feed the indicators in that order.
    let nw = nonlinear_weights(&[s[2], s[1], s[0]], epsilon);
    let q_up = (2.0 * w[0] - 7.0 * w[1] + 11.0 * w[2]) / 6.0;
    let q_mid = (-w[1] + 5.0 * w[2] + 2.0 * w[3]) / 6.0;
    let q_down = (2.0 * w[2] + 5.0 * w[3] - w[4]) / 6.0;
    nw[0] * q_down + nw[1] * q_mid + nw[2] * q_up
}

const GHOST: usize = 3;

/// Zero-extends a nodal sequence by three ghost nodes on each side.
fn ghosted(h: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; h.len() + 2 * GHOST];
    z[GHOST..GHOST + h.len()].copy_from_slice(h);
    z
}

/// WENO flux divergence `D_i ≈ ∂_x(H⁺ + H⁻)` at nodes `i = 1..N`
/// (`D_0 = 0`; node 0 is pinned and never evolved).
///
/// For each node, four half-node values are reconstructed: `H⁺` at `i ∓ 1/2`
/// from ascending stencils, `H⁻` from descending ones, all reading the
/// ghost-extended sequences.
pub fn flux_divergence(hplus: &[f64], hminus: &[f64], grid: &Grid, epsilon: f64) -> Vec<f64> {
    debug_assert_eq!(hplus.len(), grid.n + 1);
    debug_assert_eq!(hminus.len(), grid.n + 1);
    let hp = ghosted(hplus);
    let hm = ghosted(hminus);
    let mut d = vec![0.0; grid.n + 1];
    for i in 1..=grid.n {
        let k = i + GHOST;
        let hp_r = reconstruct_half_flux(
            &[hp[k - 2], hp[k - 1], hp[k], hp[k + 1], hp[k + 2]],
            epsilon,
        );
        let hp_l = reconstruct_half_flux(
            &[hp[k - 3], hp[k - 2], hp[k - 1], hp[k], hp[k + 1]],
            epsilon,
        );
        let hm_r = reconstruct_half_flux(
            &[hm[k + 3], hm[k + 2], hm[k + 1], hm[k], hm[k - 1]],
            epsilon,
        );
        let hm_l = reconstruct_half_flux(
            &[hm[k + 2], hm[k + 1], hm[k], hm[k - 1], hm[k - 2]],
            epsilon,
        );
        d[i] = (hp_r + hm_r - hp_l - hm_l) / grid.dx;
    }
    d
}

/// First-order upwind divergence
/// `D_i = (H⁺_i − H⁺_{i−1} + H⁻_{i+1} − H⁻_i)/Δx`, with the same zero
/// ghosts.
pub fn upwind1_divergence(hplus: &[f64], hminus: &[f64], grid: &Grid) -> Vec<f64> {
    debug_assert_eq!(hplus.len(), grid.n + 1);
    debug_assert_eq!(hminus.len(), grid.n + 1);
    let hp = ghosted(hplus);
    let hm = ghosted(hminus);
    let mut d = vec![0.0; grid.n + 1];
    for i in 1..=grid.n {
        let k = i + GHOST;
        d[i] = (hp[k] - hp[k - 1] + hm[k + 1] - hm[k]) / grid.dx;
    }
    d
}

/// Dispatches to the configured divergence operator.
pub fn divergence(cfg: &WenoConfig, hplus: &[f64], hminus: &[f64], grid: &Grid) -> Vec<f64> {
    match cfg.scheme {
        SpatialScheme::Weno5 => flux_divergence(hplus, hminus, grid, cfg.epsilon),
        SpatialScheme::Upwind1 => upwind1_divergence(hplus, hminus, grid),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use proptest::prelude::*;

    #[test]
    fn smoothness_of_constant_and_linear_data() {
        assert_eq!(smoothness_indicators(&[4.0; 5]), [0.0, 0.0, 0.0]);
        // Linear data: all three indicators agree (this equality is what the
        // fifth-order combination relies on).
        let s = smoothness_indicators(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(s, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn smoothness_quadratic_homogeneity() {
        let w = [0.3, -1.2, 0.7, 2.1, -0.4];
        let s1 = smoothness_indicators(&w);
        let wc: [f64; 5] = core::array::from_fn(|i| 3.0 * w[i]);
        let s9 = smoothness_indicators(&wc);
        for r in 0..3 {
            assert!((s9[r] - 9.0 * s1[r]).abs() <= 1e-12 * s9[r].abs().max(1.0));
        }
    }

    #[test]
    fn weights_reduce_to_ideal_and_normalize() {
        let w = nonlinear_weights(&[0.0, 0.0, 0.0], 1e-6);
        for r in 0..3 {
            assert!((w[r] - IDEAL_WEIGHTS[r]).abs() <= 1e-14);
        }
        let w = nonlinear_weights(&[7.5, 7.5, 7.5], 1e-6);
        for r in 0..3 {
            assert!((w[r] - IDEAL_WEIGHTS[r]).abs() <= 1e-14);
        }
        // A very rough first stencil loses essentially all weight; the ratio
        // of the surviving weights is the ideal ratio 6:1.
        let w = nonlinear_weights(&[1e12, 0.0, 0.0], 1e-6);
        assert!(w[0] <= 1e-10);
        assert!((w[1] / w[2] - 6.0).abs() <= 1e-6);
    }

    #[test]
    fn reconstruction_exact_for_constants_and_linears() {
        let c = reconstruct_half_flux(&[2.5; 5], 1e-6);
        assert!((c - 2.5).abs() <= 1e-14);
        // Linear in the node index: exact half-node value between W3 and W4.
        let a = 0.7;
        let b = -1.3;
        let lin: [f64; 5] = core::array::from_fn(|j| a * (j + 1) as f64 + b);
        let v = reconstruct_half_flux(&lin, 1e-6);
        assert!((v - (a * 3.5 + b)).abs() <= 1e-12);
        // Mirrored (descending) linear input: the face sits between the
        // mirrored W3 and W4, i.e. at original index 2.5.
        let rev: [f64; 5] = core::array::from_fn(|j| lin[4 - j]);
        let v = reconstruct_half_flux(&rev, 1e-6);
        assert!((v - (a * 2.5 + b)).abs() <= 1e-12);
    }

    #[test]
    fn divergence_of_zero_and_linear_fields() {
        let grid = make_grid(5.0, 64).unwrap();
        let zero = vec![0.0; 65];
        let d = flux_divergence(&zero, &zero, &grid, 1e-6);
        assert!(d.iter().all(|&v| v == 0.0));
        let d = upwind1_divergence(&zero, &zero, &grid);
        assert!(d.iter().all(|&v| v == 0.0));

        // H⁺ linear in x, H⁻ = 0: interior divergence equals the slope to
        // roundoff (nodes whose stencils stay clear of the ghost zeros).
        let slope = 1.7;
        let hp: Vec<f64> = grid.x.iter().map(|&x| slope * x + 0.4).collect();
        let d = flux_divergence(&hp, &zero, &grid, 1e-6);
        for i in 4..=60 {
            assert!((d[i] - slope).abs() <= 1e-10, "node {i}: {}", d[i]);
        }
        let d = upwind1_divergence(&hp, &zero, &grid);
        for i in 1..=64 {
            assert!((d[i] - slope).abs() <= 1e-10, "node {i}: {}", d[i]);
        }
    }

    #[test]
    fn boundary_nodes_use_ghost_zeros_without_panicking() {
        let grid = make_grid(5.0, 16).unwrap();
        let hp: Vec<f64> = (0..=16).map(|i| (i as f64).sin() + 2.0).collect();
        let hm: Vec<f64> = (0..=16).map(|i| (i as f64).cos() - 2.0).collect();
        let d = flux_divergence(&hp, &hm, &grid, 1e-6);
        assert_eq!(d[0], 0.0);
        assert!(d.iter().all(|v| v.is_finite()));
        let d = upwind1_divergence(&hp, &hm, &grid);
        assert!(d.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn smooth_divergence_order_at_least_four() {
        // H⁺ = sin(x), H⁻ = 0; error against cos(x) on a window away from
        // both the boundaries and the extrema of sin.
        let mut errs = Vec::new();
        for n in [50usize, 100, 200] {
            let grid = make_grid(5.0, n).unwrap();
            let hp: Vec<f64> = grid.x.iter().map(|&x| x.sin()).collect();
            let hm = vec![0.0; n + 1];
            let d = flux_divergence(&hp, &hm, &grid, 1e-6);
            let mut worst = 0.0_f64;
            for i in 0..=n {
                let x = grid.x[i];
                if x > 1.0 && x < 4.0 && x.cos().abs() > 0.3 {
                    worst = worst.max((d[i] - x.cos()).abs());
                }
            }
            errs.push(worst);
        }
        for k in 0..errs.len() - 1 {
            let order = (errs[k] / errs[k + 1]).log2();
            assert!(order >= 4.0, "order {order:.2} between refinements");
        }
    }

    #[test]
    fn epsilon_insensitive_on_smooth_data() {
        let grid = make_grid(5.0, 100).unwrap();
        let hp: Vec<f64> = grid.x.iter().map(|&x| x.sin()).collect();
        let hm = vec![0.0; 101];
        let d6 = flux_divergence(&hp, &hm, &grid, 1e-6);
        let d8 = flux_divergence(&hp, &hm, &grid, 1e-8);
        let mut worst_gap = 0.0_f64;
        let mut worst_err = 0.0_f64;
        for i in 0..=100 {
            let x = grid.x[i];
            if x > 1.0 && x < 4.0 {
                worst_gap = worst_gap.max((d6[i] - d8[i]).abs());
                worst_err = worst_err.max((d6[i] - x.cos()).abs());
            }
        }
        assert!(
            worst_gap < 0.1 * worst_err,
            "gap {worst_gap:.3e} vs err {worst_err:.3e}"
        );
    }

    #[test]
    fn upwind_step_data_stays_monotone() {
        let grid = make_grid(5.0, 32).unwrap();
        let hp: Vec<f64> = grid.x.iter().map(|&x| if x < 2.5 { 0.0 } else { 3.0 }).collect();
        let hm = vec![0.0; 33];
        let d = upwind1_divergence(&hp, &hm, &grid);
        let jump = 3.0 / grid.dx;
        let mut nonzero = 0;
        for i in 1..=32 {
            assert!(
                d[i] == 0.0 || (d[i] - jump).abs() <= 1e-12 * jump,
                "new extremum at node {i}: {}",
                d[i]
            );
            if d[i] != 0.0 {
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn invalid_epsilon_rejected() {
        let cfg = WenoConfig {
            epsilon: 0.0,
            ..WenoConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(WenoConfig::default().validate().is_ok());
    }

    proptest! {
        #[test]
        fn weights_always_normalized_and_positive(
            s1 in 0.0f64..1e6,
            s2 in 0.0f64..1e6,
            s3 in 0.0f64..1e6,
        ) {
            let w = nonlinear_weights(&[s1, s2, s3], 1e-6);
            prop_assert!((w[0] + w[1] + w[2] - 1.0).abs() <= 1e-12);
            for r in 0..3 {
                prop_assert!(w[r] > 0.0 && w[r] < 1.0 + 1e-12);
            }
        }

        #[test]
        fn reconstruction_bounded_by_data_for_smooth_inputs(
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            // Convex combination of third-order interpolants of a linear
            // function stays exactly on the line regardless of the weights.
            let lin: [f64; 5] = core::array::from_fn(|j| a * j as f64 + b);
            let v = reconstruct_half_flux(&lin, 1e-6);
            prop_assert!((v - (a * 2.5 + b)).abs() <= 1e-10);
        }
    }
}
