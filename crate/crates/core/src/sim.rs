//! Run driver: configuration, the time loop with snapshot landing,
//! observable extraction, and divergence/oscillation diagnostics.

use crate::error::{Error, Result};
use crate::flux::{
    assemble, coagfrag_flux, source_term, split_transport_raw, DiscoagWeight, SplittingScheme,
};
use crate::grid::{make_grid, polymer_mass, Grid, InitialProfile, SystemState};
use crate::kernels::{tabulate, KernelTables, RateModel};
use crate::stepper::{
    bounded_step, coag_cfl_term, frag_cfl_term, rk3_step, transport_cfl_term, StepControl,
};
use crate::weno::{divergence, WenoConfig};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Absolute slack used when matching times (snapshot landing, loop end).
const TIME_EPS: f64 = 1e-12;

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Maximum polymer size.
    pub r: f64,
    /// Number of grid cells.
    pub n: usize,
    /// Initial free monomer concentration (μM).
    pub v0: f64,
    /// Rate function parameters.
    pub rates: RateModel,
    /// Transport flux splitting.
    pub scheme: SplittingScheme,
    /// Reconstruction parameters and spatial scheme choice.
    pub weno: WenoConfig,
    /// Time-step control.
    pub control: StepControl,
    /// Initial density profile.
    pub profile: InitialProfile,
    /// Final time (hours).
    pub t_end: f64,
    /// Times (hours) at which to store full density snapshots.
    pub snapshot_times: Vec<f64>,
    /// Record a timeseries row every this many steps (snapshot landings and
    /// the final step are always recorded).
    pub timeseries_stride: usize,
    /// Include coagulation and fragmentation.
    pub enable_coagfrag: bool,
    /// Include polymerization/depolymerization transport (disabling zeroes
    /// `k_on` and `k_off`).
    pub enable_transport: bool,
    /// Size weight convention in the coagulation-fragmentation flux.
    pub discoag_weight: DiscoagWeight,
    /// Density magnitude above which the run is declared diverged.
    pub blowup_limit: f64,
    /// Relative second-difference floor of the oscillation metric.
    pub osc_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            r: 5.0,
            n: 200,
            v0: 98.0,
            rates: RateModel::default(),
            scheme: SplittingScheme::Lambda(0.2),
            weno: WenoConfig::default(),
            control: StepControl::default(),
            profile: InitialProfile::Step {
                height: 2.6,
                cutoff: 0.4,
            },
            t_end: 20.0,
            snapshot_times: vec![0.0, 0.5, 6.0, 12.0, 18.0, 20.0],
            timeseries_stride: 1,
            enable_coagfrag: true,
            enable_transport: true,
            discoag_weight: DiscoagWeight::Inner,
            blowup_limit: 1e6,
            osc_threshold: 1e-3,
        }
    }
}

impl SimConfig {
    /// Checks every parameter range (the grid itself is validated when
    /// built).
    pub fn validate(&self) -> Result<()> {
        make_grid(self.r, self.n)?;
        if !(self.v0 >= 0.0) || !self.v0.is_finite() {
            return Err(Error::Config(format!(
                "V0 must be nonnegative and finite, got {}",
                self.v0
            )));
        }
        self.rates.validate()?;
        self.scheme.validate()?;
        self.weno.validate()?;
        self.control.validate()?;
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!(
                "t_end must be positive and finite, got {}",
                self.t_end
            )));
        }
        for &s in &self.snapshot_times {
            if !(s >= -TIME_EPS && s <= self.t_end + TIME_EPS) {
                return Err(Error::Config(format!(
                    "snapshot time {s} outside [0, {}]",
                    self.t_end
                )));
            }
        }
        if self.timeseries_stride == 0 {
            return Err(Error::Config(
                "timeseries_stride must be at least 1".into(),
            ));
        }
        if !(self.blowup_limit > 0.0) {
            return Err(Error::Config(format!(
                "blowup_limit must be positive, got {}",
                self.blowup_limit
            )));
        }
        if !(self.osc_threshold >= 0.0) || !self.osc_threshold.is_finite() {
            return Err(Error::Config(format!(
                "osc_threshold must be nonnegative and finite, got {}",
                self.osc_threshold
            )));
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    Diverged { reason: String, time: f64 },
}

/// One recorded observable row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeseriesRow {
    pub t: f64,
    /// Step size that produced this state (0 for the initial row).
    pub dt: f64,
    /// Free monomer concentration `V0 + m0 − m`.
    pub v: f64,
    pub polymer_mass: f64,
    /// `v + polymer_mass`; equals `V0 + m0` to roundoff by construction.
    pub total_mass: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub oscillation: f64,
}

/// Full density stored at (or just past) a requested time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub requested: f64,
    pub time: f64,
    pub u: Vec<f64>,
}

/// Per-step record enabling the monomer ODE cross-check: the step size, the
/// density moments `Δx·Σ′ k_on·u` and `Δx·Σ′ k_off·u` at each of the three
/// stage densities, and the algebraic monomer concentration at step end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeStepRecord {
    pub dt: f64,
    pub kon_moment: [f64; 3],
    pub koff_moment: [f64; 3],
    pub v_alg: f64,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub timeseries: Vec<TimeseriesRow>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub ode_history: Vec<OdeStepRecord>,
    pub v0: f64,
    pub m0: f64,
}

impl SimulationResult {
    /// True when the run reached `t_end`.
    pub fn completed(&self) -> bool {
        matches!(self.termination, Termination::Completed)
    }
}

/// Oscillation diagnostic: the number of sign changes among consecutive
/// second differences `u_{i+1} − 2u_i + u_{i−1}` whose magnitude exceeds
/// `threshold_rel·max|u|`, normalized by the cell count.
pub fn oscillation_metric(u: &[f64], threshold_rel: f64) -> f64 {
    let n = u.len() - 1;
    let max_abs = u.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    if max_abs == 0.0 {
        return 0.0;
    }
    let floor = threshold_rel * max_abs;
    let mut changes = 0usize;
    let mut prev_sign = 0i8;
    for i in 1..n {
        let d2 = u[i + 1] - 2.0 * u[i] + u[i - 1];
        if d2.abs() > floor {
            let sign = if d2 > 0.0 { 1 } else { -1 };
            if prev_sign != 0 && sign != prev_sign {
                changes += 1;
            }
            prev_sign = sign;
        }
    }
    changes as f64 / n as f64
}

/// Shared per-stage right-hand-side evaluator; also records the density
/// moments the monomer ODE check needs.
struct Engine<'a> {
    grid: &'a Grid,
    tables: &'a KernelTables,
    scheme: SplittingScheme,
    weno: WenoConfig,
    weight: DiscoagWeight,
    enable_coagfrag: bool,
    v0: f64,
    m0: f64,
    stage: usize,
    kon_moment: [f64; 3],
    koff_moment: [f64; 3],
}

impl<'a> Engine<'a> {
    fn rhs(&mut self, u: &[f64]) -> Result<Vec<f64>> {
        let grid = self.grid;
        let n = grid.n;
        let m = polymer_mass(grid, u)?;
        let (gp, gm, g) =
            split_transport_raw(self.tables, m, self.v0, self.m0, self.scheme, grid);
        let cf = if self.enable_coagfrag {
            coagfrag_flux(self.tables, u, grid, self.weight)?
        } else {
            vec![0.0; n + 1]
        };
        let fx = assemble(gp, gm, g, cf, u, grid);
        let d = divergence(&self.weno, &fx.hplus, &fx.hminus, grid);
        let s = source_term(&fx.g, u);
        let mut du = vec![0.0; n + 1];
        let mut finite = true;
        for i in 1..=n {
            du[i] = (s[i] - d[i]) / grid.x[i];
            finite &= du[i].is_finite();
        }
        if !finite {
            return Err(Error::NonFinite);
        }
        if self.stage < 3 {
            let weighted_kon: Vec<f64> =
                (0..=n).map(|i| self.tables.kon[i] * u[i]).collect();
            let weighted_koff: Vec<f64> =
                (0..=n).map(|i| self.tables.koff[i] * u[i]).collect();
            self.kon_moment[self.stage] =
                grid.dx * crate::quad::weighted_sum(&weighted_kon, 0, n)?;
            self.koff_moment[self.stage] =
                grid.dx * crate::quad::weighted_sum(&weighted_koff, 0, n)?;
        }
        self.stage += 1;
        Ok(du)
    }
}

/// Runs one simulation to completion or divergence. Configuration errors are
/// returned as `Err`; divergence is reported in the result's termination so
/// that partial outputs stay available.
pub fn run(config: &SimConfig) -> Result<SimulationResult> {
    config.validate()?;
    let grid = make_grid(config.r, config.n)?;
    let mut tables = tabulate(&config.rates, &grid)?;
    if !config.enable_transport {
        for v in tables.kon.iter_mut() {
            *v = 0.0;
        }
        for v in tables.koff.iter_mut() {
            *v = 0.0;
        }
    }
    let state0 = SystemState::new(&grid, &config.profile, config.v0)?;
    let (v0, m0) = (state0.v0, state0.m0);
    let budget = v0 + m0;

    let mut pending = config.snapshot_times.clone();
    pending.sort_by(|a, b| a.partial_cmp(b).expect("snapshot times are finite"));
    pending.dedup_by(|a, b| (*a - *b).abs() <= TIME_EPS);

    let frag_term = if config.enable_coagfrag {
        frag_cfl_term(&tables, &grid, config.control.cfl_literal)?
    } else {
        0.0
    };

    let mut engine = Engine {
        grid: &grid,
        tables: &tables,
        scheme: config.scheme,
        weno: config.weno,
        weight: config.discoag_weight,
        enable_coagfrag: config.enable_coagfrag,
        v0,
        m0,
        stage: 0,
        kon_moment: [0.0; 3],
        koff_moment: [0.0; 3],
    };

    let mut u = state0.u;
    let mut t = 0.0_f64;
    let mut timeseries = Vec::new();
    let mut snapshots = Vec::new();
    let mut ode_history = Vec::new();
    let mut termination = Termination::Completed;

    let record_row = |timeseries: &mut Vec<TimeseriesRow>,
                      grid: &Grid,
                      u: &[f64],
                      t: f64,
                      dt: f64,
                      threshold: f64|
     -> Result<()> {
        let m = polymer_mass(grid, u)?;
        let v = v0 + m0 - m;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &val in u {
            lo = lo.min(val);
            hi = hi.max(val);
        }
        timeseries.push(TimeseriesRow {
            t,
            dt,
            v,
            polymer_mass: m,
            total_mass: v + m,
            min_u: lo,
            max_u: hi,
            oscillation: oscillation_metric(u, threshold),
        });
        Ok(())
    };

    record_row(&mut timeseries, &grid, &u, t, 0.0, config.osc_threshold)?;
    while pending.first().is_some_and(|&s| s <= t + TIME_EPS) {
        snapshots.push(Snapshot {
            requested: pending.remove(0),
            time: t,
            u: u.clone(),
        });
    }

    let mut step_count = 0usize;
    while t < config.t_end - TIME_EPS {
        // CFL bound from the current state.
        let m = polymer_mass(&grid, &u)?;
        let (gp, gm, _) = split_transport_raw(&tables, m, v0, m0, config.scheme, &grid);
        let g_term = transport_cfl_term(&gp, &gm, &grid);
        let c_term = if config.enable_coagfrag {
            coag_cfl_term(&tables, &u, &grid, config.control.cfl_literal)?
        } else {
            0.0
        };
        let dt_cfl = bounded_step(g_term + c_term + frag_term, &config.control);
        if dt_cfl < config.control.dt_min {
            termination = Termination::Diverged {
                reason: format!(
                    "time step underflow: CFL step {dt_cfl:.3e} h fell below dt_min {:.3e} h",
                    config.control.dt_min
                ),
                time: t,
            };
            break;
        }
        // Truncate to land exactly on the next snapshot or the end time.
        let next_event = pending.first().copied().unwrap_or(config.t_end).min(config.t_end);
        let landing = t + dt_cfl >= next_event - TIME_EPS;
        let dt = if landing { next_event - t } else { dt_cfl };

        engine.stage = 0;
        u = match rk3_step(&u, dt, |stage_u| engine.rhs(stage_u)) {
            Ok(next) => next,
            Err(Error::NonFinite) => {
                termination = Termination::Diverged {
                    reason: "non-finite values in the right-hand side".into(),
                    time: t,
                };
                break;
            }
            Err(other) => return Err(other),
        };
        t = if landing { next_event } else { t + dt };
        step_count += 1;

        let m_new = polymer_mass(&grid, &u)?;
        let v_new = v0 + m0 - m_new;
        ode_history.push(OdeStepRecord {
            dt,
            kon_moment: engine.kon_moment,
            koff_moment: engine.koff_moment,
            v_alg: v_new,
        });

        let mut worst = 0.0_f64;
        let mut all_finite = true;
        for &val in &u {
            worst = worst.max(val.abs());
            all_finite &= val.is_finite();
        }
        let diverged_reason = if !all_finite {
            Some(format!("non-finite density values at t = {t:.6} h"))
        } else if worst > config.blowup_limit {
            Some(format!(
                "density magnitude {worst:.3e} exceeded the blow-up bound {:.1e} at t = {t:.6} h",
                config.blowup_limit
            ))
        } else if v_new < 0.0 {
            Some(format!(
                "monomer concentration went negative ({v_new:.3e} μM) at t = {t:.6} h"
            ))
        } else {
            None
        };
        if let Some(reason) = diverged_reason {
            record_row(&mut timeseries, &grid, &u, t, dt, config.osc_threshold)?;
            termination = Termination::Diverged { reason, time: t };
            break;
        }

        let snapshot_landing =
            landing && pending.first().is_some_and(|&s| (s - t).abs() <= TIME_EPS);
        if snapshot_landing {
            snapshots.push(Snapshot {
                requested: pending.remove(0),
                time: t,
                u: u.clone(),
            });
        }
        if step_count % config.timeseries_stride == 0
            || snapshot_landing
            || t >= config.t_end - TIME_EPS
        {
            record_row(&mut timeseries, &grid, &u, t, dt, config.osc_threshold)?;
        }
    }

    // Guard against accounting bugs: V is defined through the mass budget,
    // so the identity must hold on every recorded row.
    debug_assert!(timeseries
        .iter()
        .all(|r| (r.total_mass - budget).abs() <= 1e-9 * budget.max(1.0)));

    Ok(SimulationResult {
        timeseries,
        snapshots,
        termination,
        ode_history,
        v0,
        m0,
    })
}

/// Integrates the monomer ODE `dV/dt = −Δx·Σ′ (V·k_on − k_off)·u` through
/// the recorded stage moments with the same three-stage scheme the run used,
/// and returns the worst gap to the algebraic `V`, relative to `V0`
/// (absolute when `V0 = 0`).
///
/// This is the numerical verification that evolving the monomer
/// concentration as its own unknown reproduces the mass-conservation value.
pub fn ode_monomer_check(result: &SimulationResult) -> f64 {
    let mut v = result.v0;
    let mut worst = 0.0_f64;
    for rec in &result.ode_history {
        let f = |stage: usize, vv: f64| -> f64 {
            -(vv * rec.kon_moment[stage] - rec.koff_moment[stage])
        };
        let v1 = v + rec.dt * f(0, v);
        let v2 = 0.75 * v + 0.25 * v1 + 0.25 * rec.dt * f(1, v1);
        v = v / 3.0 + 2.0 / 3.0 * v2 + 2.0 / 3.0 * rec.dt * f(2, v2);
        worst = worst.max((v - rec.v_alg).abs());
    }
    if result.v0 > 0.0 {
        worst / result.v0
    } else {
        worst
    }
}
