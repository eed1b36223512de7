//! Fifth-order end-corrected composite quadrature (the "primed sum" Σ′).
//!
//! `Σ′_{k=lo}^{hi} f_k` approximates `(1/Δx)·∫ f dx` over `[x_lo, x_hi]` with
//! unit interior weights and corrected weights near the span ends. Three
//! weight families cover the spans the solver needs:
//!
//! * **generic** — spans longer than 6 intervals: the four end nodes on each
//!   side carry the correction block (251/720, 299/240, 211/240, 739/720),
//!   everything between is weight 1;
//! * **left-anchored** — short spans `(0, s)`, `s = 1..=7`: dedicated rows
//!   that never touch node 0 (the integrand is pinned there) and may
//!   reference one node *past* the span end;
//! * **right-anchored** — short spans `(N−s, N)`, `s = 1..=6`: dedicated rows
//!   anchored at the last node.
//!
//! Interior short spans (away from both ends, ≤ 6 intervals) have no rule and
//! are rejected; in-model use never produces them. All weights are exact
//! rationals rendered to `f64` once, at compile time.

use crate::error::{Error, Result};

/// End-correction block of the generic rule, applied to the four outermost
/// nodes of each end (mirrored on the right).
pub const END_BLOCK: [f64; 4] = [251.0 / 720.0, 299.0 / 240.0, 211.0 / 240.0, 739.0 / 720.0];

/// Left-anchored rows for spans `(0, s)`, `s = 1..=7`. Row `s-1` holds the
/// weights of nodes `1, 2, 3, …` (node 0 always has weight 0).
pub const LEFT_ROWS: [&[f64]; 7] = [
    &[55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0],
    &[8.0 / 3.0, -5.0 / 3.0, 4.0 / 3.0, -1.0 / 3.0],
    &[21.0 / 8.0, -9.0 / 8.0, 15.0 / 8.0, -3.0 / 8.0],
    &[21.0 / 8.0, -7.0 / 6.0, 29.0 / 12.0, 1.0 / 6.0, -1.0 / 24.0],
    &[21.0 / 8.0, -7.0 / 6.0, 19.0 / 8.0, 17.0 / 24.0, 1.0 / 2.0, -1.0 / 24.0],
    &[21.0 / 8.0, -7.0 / 6.0, 19.0 / 8.0, 2.0 / 3.0, 25.0 / 24.0, 1.0 / 2.0, -1.0 / 24.0],
    &[21.0 / 8.0, -7.0 / 6.0, 19.0 / 8.0, 2.0 / 3.0, 1.0, 25.0 / 24.0, 1.0 / 2.0, -1.0 / 24.0],
];

/// Right-anchored rows for spans `(N−s, N)`, `s = 1..=6`. Row `s-1` holds the
/// weights of nodes `N, N−1, N−2, …` in that (descending) order.
///
/// The span-1 leading weight is 3/8, completing the Adams–Moulton-style
/// pattern (3, 19, −5, 1)/24 so the row integrates constants exactly.
pub const RIGHT_ROWS: [&[f64]; 6] = [
    &[3.0 / 8.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0],
    &[1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0],
    &[1.0 / 3.0, 31.0 / 24.0, 7.0 / 8.0, 13.0 / 24.0, -1.0 / 24.0],
    &[1.0 / 3.0, 31.0 / 24.0, 5.0 / 6.0, 13.0 / 12.0, 1.0 / 2.0, -1.0 / 24.0],
    &[1.0 / 3.0, 31.0 / 24.0, 5.0 / 6.0, 25.0 / 24.0, 25.0 / 24.0, 1.0 / 2.0, -1.0 / 24.0],
    &[1.0 / 3.0, 31.0 / 24.0, 5.0 / 6.0, 25.0 / 24.0, 1.0, 25.0 / 24.0, 1.0 / 2.0, -1.0 / 24.0],
];

/// Primed sum of `values[lo..=hi]` (with `N = values.len() - 1`).
///
/// Supported spans: empty (`lo == hi`, returns 0), generic (`hi − lo > 6`,
/// except left-anchored spans of exactly 7), left-anchored (`lo == 0`,
/// `hi ≤ 7`), right-anchored (`hi == N`, `hi − lo ≤ 6`). Anything else is an
/// [`Error::UnsupportedSpan`].
pub fn weighted_sum(values: &[f64], lo: usize, hi: usize) -> Result<f64> {
    let n = values.len() - 1;
    assert!(lo <= hi && hi <= n, "span ({lo},{hi}) out of range 0..={n}");
    if lo == hi {
        return Ok(0.0);
    }
    let span = hi - lo;
    if lo == 0 && span <= 7 {
        let row = LEFT_ROWS[span - 1];
        // Rows reference up to max(4, span + 1) nodes starting at node 1.
        return Ok(row.iter().zip(&values[1..]).map(|(w, v)| w * v).sum());
    }
    if span > 6 {
        let mut sum: f64 = values[lo..=hi].iter().sum();
        for (k, w) in END_BLOCK.iter().enumerate() {
            sum += (w - 1.0) * (values[lo + k] + values[hi - k]);
        }
        return Ok(sum);
    }
    if hi == n {
        let row = RIGHT_ROWS[span - 1];
        return Ok(row.iter().enumerate().map(|(k, w)| w * values[n - k]).sum());
    }
    Err(Error::UnsupportedSpan { lo, hi })
}

/// `Δx · Σ′_{k=lo}^{hi} values_k` — the composite approximation of
/// `∫_{x_lo}^{x_hi} f dx`.
pub fn integrate(values: &[f64], dx: f64, lo: usize, hi: usize) -> Result<f64> {
    Ok(dx * weighted_sum(values, lo, hi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn constant(n: usize, c: f64) -> Vec<f64> {
        vec![c; n + 1]
    }

    #[test]
    fn generic_rule_integrates_constants_exactly() {
        let v = constant(200, 1.0);
        let s = weighted_sum(&v, 0, 200).unwrap();
        assert!((s - 200.0).abs() <= 1e-14 * 200.0);
        // End block alone: 2·(251/720 + 299/240 + 211/240 + 739/720) = 7,
        // so an 8-node generic window also reproduces its span.
        let s = weighted_sum(&v, 20, 27).unwrap();
        assert!((s - 7.0).abs() <= 1e-14 * 7.0);
    }

    #[test]
    fn every_dedicated_row_integrates_constants_exactly() {
        let v = constant(32, 1.0);
        for span in 1..=7usize {
            let s = weighted_sum(&v, 0, span).unwrap();
            assert!(
                (s - span as f64).abs() <= 1e-14 * span as f64,
                "left span {span}: {s}"
            );
        }
        for span in 1..=6usize {
            let s = weighted_sum(&v, 32 - span, 32).unwrap();
            assert!(
                (s - span as f64).abs() <= 1e-14 * span as f64,
                "right span {span}: {s}"
            );
        }
    }

    #[test]
    fn left_span2_row_reproduces_linear_ramp() {
        // f_k = k over (0,2): 8/3·1 − 5/3·2 + 4/3·3 − 1/3·4 = 2 = ∫₀² k dk.
        let v: Vec<f64> = (0..=16).map(|k| k as f64).collect();
        let s = weighted_sum(&v, 0, 2).unwrap();
        assert!((s - 2.0).abs() <= 1e-14);
    }

    #[test]
    fn right_span2_row_is_the_simpson_stencil() {
        let v = constant(20, 1.0);
        let s = weighted_sum(&v, 18, 20).unwrap();
        assert!((s - 2.0).abs() <= 1e-14);
        assert_eq!(RIGHT_ROWS[1], &[1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn left_rows_never_touch_node_zero() {
        let mut v = constant(32, 1.0);
        v[0] = 1.0e300; // must not leak into any left-anchored span
        for span in 1..=7usize {
            let s = weighted_sum(&v, 0, span).unwrap();
            assert!((s - span as f64).abs() <= 1e-12, "left span {span}: {s}");
        }
    }

    #[test]
    fn empty_span_is_zero() {
        let v = constant(20, 3.5);
        assert_eq!(weighted_sum(&v, 5, 5).unwrap(), 0.0);
        assert_eq!(weighted_sum(&v, 20, 20).unwrap(), 0.0);
    }

    #[test]
    fn interior_short_span_is_rejected() {
        let v = constant(32, 1.0);
        assert_eq!(
            weighted_sum(&v, 5, 10),
            Err(Error::UnsupportedSpan { lo: 5, hi: 10 })
        );
    }

    #[test]
    fn full_span_linear_integrand_is_exact() {
        // Symmetry of the generic end block + constants-exactness imply
        // exactness for linears: ∫₀ᴿ x dx = R²/2.
        let n = 100;
        let dx = 5.0 / n as f64;
        let v: Vec<f64> = (0..=n).map(|i| i as f64 * dx).collect();
        let s = integrate(&v, dx, 0, n).unwrap();
        assert!((s - 12.5).abs() <= 1e-12 * 12.5);
    }

    #[test]
    fn sin_integral_converges_at_fifth_order() {
        let exact = 1.0 - 5.0_f64.cos();
        let mut errs = Vec::new();
        for n in [50usize, 100, 200, 400] {
            let dx = 5.0 / n as f64;
            let v: Vec<f64> = (0..=n).map(|i| (i as f64 * dx).sin()).collect();
            errs.push((integrate(&v, dx, 0, n).unwrap() - exact).abs());
        }
        for k in 0..errs.len() - 1 {
            let order = (errs[k] / errs[k + 1]).log2();
            assert!(order >= 4.7, "order between refinements: {order:.2}");
        }
    }

    proptest! {
        #[test]
        fn weighted_sum_is_linear(
            f in proptest::collection::vec(-1.0f64..1.0, 33),
            g in proptest::collection::vec(-1.0f64..1.0, 33),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let combo: Vec<f64> =
                f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            for (lo, hi) in [(0usize, 32usize), (0, 4), (28, 32), (3, 32)] {
                let lhs = weighted_sum(&combo, lo, hi).unwrap();
                let rhs = a * weighted_sum(&f, lo, hi).unwrap()
                    + b * weighted_sum(&g, lo, hi).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12);
            }
        }
    }
}
