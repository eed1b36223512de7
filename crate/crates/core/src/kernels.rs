//! The four rate functions of the model and their nodal tabulations.
//!
//! * `k_on(x)` — polymerization rate: linear `a·x + b` below a critical size
//!   `x_c`, constant plateau `c` above (right-continuous at `x_c`);
//! * `k_off`  — depolymerization rate: constant `η·10⁻⁶`;
//! * `k_c(x, y) = C·|x−y|^{3/2} / (1 + x + y)` — coagulation kernel;
//! * `k_f(x, y) = A·(x+y) / (B + x + y)` — fragmentation kernel.
//!
//! Parameters are supplied in s⁻¹-based units and multiplied by
//! `time_unit_scale` (3600 by default) on evaluation, so everything
//! downstream works in hours. All four rates are time-independent, so they
//! are tabulated once per run on the grid nodes; the per-step loops only read
//! the tables.

use crate::error::{Error, Result};
use crate::grid::Grid;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Range of the depolymerization intensity η explored by the model; values
/// outside it are accepted but reported by [`RateModel::warnings`].
pub const ETA_COMFORT_RANGE: (f64, f64) = (2.0, 8.0);

/// Parameter set for the four rate functions. Construct with
/// [`RateModel::default`] and override fields as needed; call
/// [`RateModel::validate`] before use.
#[derive(Debug, Clone, PartialEq)]
pub struct RateModel {
    /// Slope `a` of the polymerization rate below the critical size
    /// (μM⁻¹s⁻¹ per unit size).
    pub kon_slope: f64,
    /// Intercept `b` of the polymerization rate (μM⁻¹s⁻¹).
    pub kon_intercept: f64,
    /// Critical size `x_c` where the polymerization rate plateaus.
    pub kon_critical: f64,
    /// Plateau value `c` of the polymerization rate for `x ≥ x_c` (μM⁻¹s⁻¹).
    pub kon_plateau: f64,
    /// Depolymerization intensity: `k_off = η·10⁻⁶` s⁻¹.
    pub eta: f64,
    /// Fragmentation amplitude `A` (s⁻¹).
    pub kf_amplitude: f64,
    /// Fragmentation half-saturation size `B`.
    pub kf_half_size: f64,
    /// Coagulation amplitude `C` (μM⁻¹s⁻¹).
    pub kc_amplitude: f64,
    /// Unit conversion applied on evaluation (3600 turns s⁻¹ into h⁻¹).
    pub time_unit_scale: f64,
}

impl Default for RateModel {
    fn default() -> Self {
        RateModel {
            kon_slope: 4.0e-6,
            kon_intercept: 0.2e-6,
            kon_critical: 0.5,
            kon_plateau: 4.0e-6,
            eta: 5.0,
            kf_amplitude: 80.0e-5,
            kf_half_size: 10.0,
            kc_amplitude: 4.0e-6,
            time_unit_scale: 3600.0,
        }
    }
}

impl RateModel {
    /// Checks that every parameter is finite and within its allowed range.
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("kon_slope", self.kon_slope),
            ("kon_intercept", self.kon_intercept),
            ("kon_plateau", self.kon_plateau),
            ("eta", self.eta),
            ("kf_amplitude", self.kf_amplitude),
            ("kc_amplitude", self.kc_amplitude),
        ];
        for (name, value) in nonneg {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Config(format!(
                    "{name} must be nonnegative and finite, got {value}"
                )));
            }
        }
        for (name, value) in [
            ("kon_critical", self.kon_critical),
            ("kf_half_size", self.kf_half_size),
            ("time_unit_scale", self.time_unit_scale),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Non-fatal advisories about unusual parameter choices.
    pub fn warnings(&self) -> Vec<String> {
        let mut notes = Vec::new();
        let (lo, hi) = ETA_COMFORT_RANGE;
        if self.eta < lo || self.eta > hi {
            notes.push(format!(
                "eta = {} is outside the explored range [{lo}, {hi}]; \
                 results may be far from the documented regimes",
                self.eta
            ));
        }
        notes
    }

    /// Polymerization rate `k_on(x)` in converted units (μM⁻¹h⁻¹ with the
    /// default scale).
    pub fn eval_kon(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain { what: "size x", value: x });
        }
        let raw = if x < self.kon_critical {
            self.kon_slope * x + self.kon_intercept
        } else {
            self.kon_plateau
        };
        Ok(raw * self.time_unit_scale)
    }

    /// Depolymerization rate `k_off = η·10⁻⁶` in converted units,
    /// independent of `x`.
    pub fn eval_koff(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain { what: "size x", value: x });
        }
        Ok(self.eta * 1.0e-6 * self.time_unit_scale)
    }

    /// Coagulation kernel `k_c(x, y)` in converted units.
    pub fn eval_kc(&self, x: f64, y: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain { what: "size x", value: x });
        }
        if y < 0.0 {
            return Err(Error::Domain { what: "size y", value: y });
        }
        // Combine the arguments through commutative subexpressions so the
        // result is bitwise symmetric in (x, y).
        let d = (x - y).abs();
        let s = x + y;
        let raw = self.kc_amplitude * d * libm::sqrt(d) / (1.0 + s);
        Ok(raw * self.time_unit_scale)
    }

    /// Fragmentation kernel `k_f(x, y)` in converted units.
    pub fn eval_kf(&self, x: f64, y: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain { what: "size x", value: x });
        }
        if y < 0.0 {
            return Err(Error::Domain { what: "size y", value: y });
        }
        let s = x + y;
        let raw = self.kf_amplitude * s / (self.kf_half_size + s);
        Ok(raw * self.time_unit_scale)
    }
}

/// Nodal tabulations of the four rates in converted units. Immutable after
/// construction; the symmetric tables are stored dense, row-major with
/// stride `N + 1`, each unordered pair computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTables {
    /// `k_on(x_i)`, length `N + 1`.
    pub kon: Vec<f64>,
    /// `k_off(x_i)`, length `N + 1` (constant in the default model).
    pub koff: Vec<f64>,
    pub(crate) kc: Vec<f64>,
    pub(crate) kf: Vec<f64>,
    pub(crate) stride: usize,
}

impl KernelTables {
    /// Coagulation kernel at nodes `(x_i, x_j)`.
    #[inline]
    pub fn kc(&self, i: usize, j: usize) -> f64 {
        self.kc[i * self.stride + j]
    }

    /// Fragmentation kernel at nodes `(x_i, x_j)`.
    #[inline]
    pub fn kf(&self, i: usize, j: usize) -> f64 {
        self.kf[i * self.stride + j]
    }

    /// Number of nodes per axis (`N + 1`).
    #[inline]
    pub fn len(&self) -> usize {
        self.stride
    }

    /// True when the tables are empty (never for a valid grid).
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.stride == 0
    }
}

/// Evaluates all four rates on the grid nodes.
pub fn tabulate(model: &RateModel, grid: &Grid) -> Result<KernelTables> {
    model.validate()?;
    let n1 = grid.n + 1;
    let mut kon = Vec::with_capacity(n1);
    let mut koff = Vec::with_capacity(n1);
    for &x in &grid.x {
        kon.push(model.eval_kon(x)?);
        koff.push(model.eval_koff(x)?);
    }
    let mut kc = alloc::vec![0.0; n1 * n1];
    let mut kf = alloc::vec![0.0; n1 * n1];
    for i in 0..n1 {
        for j in i..n1 {
            let c = model.eval_kc(grid.x[i], grid.x[j])?;
            let f = model.eval_kf(grid.x[i], grid.x[j])?;
            kc[i * n1 + j] = c;
            kc[j * n1 + i] = c;
            kf[i * n1 + j] = f;
            kf[j * n1 + i] = f;
        }
    }
    Ok(KernelTables {
        kon,
        koff,
        kc,
        kf,
        stride: n1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use proptest::prelude::*;

    /// Model with unit scale, for checking values in pre-conversion units.
    fn raw_model() -> RateModel {
        RateModel {
            time_unit_scale: 1.0,
            ..RateModel::default()
        }
    }

    #[test]
    fn kon_linear_branch_and_plateau() {
        let m = raw_model();
        assert!((m.eval_kon(0.25).unwrap() - 1.2e-6).abs() <= 1e-20);
        assert_eq!(m.eval_kon(1.0).unwrap(), 4.0e-6);
        // Right-continuous at the critical size: plateau value applies.
        assert_eq!(m.eval_kon(0.5).unwrap(), 4.0e-6);
        assert!(m.eval_kon(-0.1).is_err());
    }

    #[test]
    fn koff_is_constant_in_x() {
        let mut m = raw_model();
        m.eta = 8.0;
        assert_eq!(m.eval_koff(0.3).unwrap(), 8.0e-6);
        m.eta = 0.0;
        assert_eq!(m.eval_koff(1.0).unwrap(), 0.0);
        m.eta = 5.0;
        assert_eq!(m.eval_koff(0.0).unwrap(), m.eval_koff(4.7).unwrap());
    }

    #[test]
    fn kc_values() {
        let m = raw_model();
        assert_eq!(m.eval_kc(1.7, 1.7).unwrap(), 0.0);
        // C·1^{3/2}/(1+1+0) = 4e-6/2.
        assert!((m.eval_kc(1.0, 0.0).unwrap() - 2.0e-6).abs() <= 1e-20);
        assert_eq!(
            m.eval_kc(1.0, 3.0).unwrap().to_bits(),
            m.eval_kc(3.0, 1.0).unwrap().to_bits()
        );
        assert!(m.eval_kc(1.0, -1.0).is_err());
    }

    #[test]
    fn kf_values_and_asymptote() {
        let m = raw_model();
        assert_eq!(m.eval_kf(0.0, 0.0).unwrap(), 0.0);
        let expect = 80.0e-5 * 3.0 / 13.0;
        assert!((m.eval_kf(1.0, 2.0).unwrap() - expect).abs() <= 1e-20);
        let far = m.eval_kf(5.0e5, 5.0e5).unwrap();
        assert!((far - 80.0e-5).abs() / 80.0e-5 <= 1e-3);
    }

    #[test]
    fn tabulation_on_default_grid() {
        let grid = make_grid(5.0, 200).unwrap();
        let tables = tabulate(&RateModel::default(), &grid).unwrap();
        // The polymerization rate jumps across the critical size between
        // nodes 19 (x = 0.475) and 20 (x = 0.5).
        assert!((tables.kon[19] - 2.1e-6 * 3600.0).abs() <= 1e-12);
        assert!((tables.kon[20] - 4.0e-6 * 3600.0).abs() <= 1e-12);
        for i in 0..=200 {
            assert_eq!(tables.kc(i, i), 0.0, "kc diagonal at {i}");
        }
        assert_eq!(tables.kf(0, 0), 0.0);
        // Symmetry is structural in storage.
        assert_eq!(tables.kc(7, 150).to_bits(), tables.kc(150, 7).to_bits());
        assert_eq!(tables.kf(7, 150).to_bits(), tables.kf(150, 7).to_bits());
        assert_eq!(tables.len(), 201);
    }

    #[test]
    fn unit_round_trip() {
        let raw = raw_model();
        let scaled = RateModel::default();
        for &(x, y) in &[(0.1, 0.9), (0.5, 0.5), (2.0, 4.9), (0.0, 5.0)] {
            let pairs = [
                (raw.eval_kon(x).unwrap(), scaled.eval_kon(x).unwrap()),
                (raw.eval_koff(x).unwrap(), scaled.eval_koff(x).unwrap()),
                (raw.eval_kc(x, y).unwrap(), scaled.eval_kc(x, y).unwrap()),
                (raw.eval_kf(x, y).unwrap(), scaled.eval_kf(x, y).unwrap()),
            ];
            for (unscaled, converted) in pairs {
                let diff = (unscaled * 3600.0 - converted).abs();
                assert!(diff <= 4.0 * f64::EPSILON * converted.abs().max(1e-30));
            }
        }
    }

    #[test]
    fn eta_warning_outside_range() {
        let mut m = RateModel::default();
        assert!(m.warnings().is_empty());
        m.eta = 12.0;
        assert_eq!(m.warnings().len(), 1);
        m.eta = 1.0;
        assert_eq!(m.warnings().len(), 1);
        m.eta = 2.0;
        assert!(m.warnings().is_empty());
    }

    #[test]
    fn invalid_parameters_rejected() {
        let mut m = RateModel::default();
        m.kc_amplitude = -1.0;
        assert!(m.validate().is_err());
        let mut m = RateModel::default();
        m.kf_half_size = 0.0;
        assert!(m.validate().is_err());
        let mut m = RateModel::default();
        m.kon_slope = f64::NAN;
        assert!(m.validate().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn kernel_symmetry_bitwise(x in 0.0f64..5.0, y in 0.0f64..5.0) {
            let m = RateModel::default();
            prop_assert_eq!(
                m.eval_kc(x, y).unwrap().to_bits(),
                m.eval_kc(y, x).unwrap().to_bits()
            );
            prop_assert_eq!(
                m.eval_kf(x, y).unwrap().to_bits(),
                m.eval_kf(y, x).unwrap().to_bits()
            );
        }

        #[test]
        fn monotonicity(a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let m = RateModel::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(m.eval_kon(lo).unwrap() <= m.eval_kon(hi).unwrap());
            // kf depends on x + y only and saturates monotonically.
            prop_assert!(
                m.eval_kf(lo, 0.0).unwrap() <= m.eval_kf(hi, 0.0).unwrap()
            );
        }
    }
}
