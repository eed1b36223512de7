//! Flat `key = value` configuration format with decorative sections,
//! `#` comments, full defaulting, and exact round-tripping.
//!
//! Every key has a default, so an empty file is a valid run. Unknown keys
//! and sections are rejected with the offending line number. The same
//! parser ingests `--set key=value` overrides, and [`print_config`] emits a
//! file that parses back to an identical configuration (floats are printed
//! with Rust's shortest round-trip formatting, so values survive
//! bit-for-bit).

use polyweno_core::flux::DiscoagWeight;
use polyweno_core::grid::InitialProfile;
use polyweno_core::kernels::RateModel;
use polyweno_core::sim::SimConfig;
use polyweno_core::stepper::StepControl;
use polyweno_core::weno::{SpatialScheme, WenoConfig};
use polyweno_core::SplittingScheme;
use std::collections::BTreeMap;
use std::fmt;

/// The six accepted (purely organizational) section names.
const SECTIONS: [&str; 6] = ["grid", "rates", "splitting", "weno", "stepping", "output"];

/// Every accepted key. The namespace is flat: placement under a section is
/// not semantically checked.
const KEYS: [&str; 31] = [
    "R",
    "N",
    "V0",
    "u0_height",
    "u0_cutoff",
    "eta",
    "kon_slope",
    "kon_intercept",
    "kon_critical",
    "kon_plateau",
    "kf_amplitude",
    "kf_half_size",
    "kc_amplitude",
    "time_unit_scale",
    "enable_coagfrag",
    "enable_transport",
    "splitting",
    "lambda",
    "scheme",
    "weno_epsilon",
    "discoag_weight",
    "cfl_safety",
    "cfl_literal",
    "dt_min",
    "dt_max",
    "t_end",
    "blowup_limit",
    "osc_threshold",
    "snapshot_times",
    "timeseries_stride",
    "plot_script",
];

/// Configuration error with the line it came from (overrides have none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// A parsed-but-unresolved configuration: raw string values by key.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<&'static str, (String, Option<usize>)>,
}

/// Fully resolved run configuration plus CLI-layer output options.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub sim: SimConfig,
    /// Emit the plain-text plot script alongside the CSVs.
    pub plot_script: bool,
}

impl RawConfig {
    /// Parses the flat file format, recording one raw value per key.
    pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut raw = RawConfig::default();
        for (idx, full_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match full_line.find('#') {
                Some(pos) => &full_line[..pos],
                None => full_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(Some(lineno), format!("malformed section header `{line}`")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(
                        Some(lineno),
                        format!(
                            "unknown section `[{name}]` (expected one of: {})",
                            SECTIONS.join(", ")
                        ),
                    ));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                err(
                    Some(lineno),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            raw.insert(key.trim(), value.trim(), Some(lineno))?;
        }
        Ok(raw)
    }

    /// Applies one `key=value` override (used for `--set`).
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            err(
                None,
                format!("override `{assignment}` is not of the form key=value"),
            )
        })?;
        self.insert(key.trim(), value.trim(), None)
    }

    fn insert(
        &mut self,
        key: &str,
        value: &str,
        line: Option<usize>,
    ) -> Result<(), ConfigError> {
        let canonical = KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| err(line, format!("unknown key `{key}`")))?;
        if let Some((_, first)) = self.entries.get(canonical) {
            let at = match first {
                Some(l) => format!("line {l}"),
                None => "an earlier override".to_string(),
            };
            if line.is_some() {
                return Err(err(
                    line,
                    format!("duplicate key `{key}` (first set at {at})"),
                ));
            }
            // Overrides replace file values and earlier overrides.
        }
        self.entries
            .insert(canonical, (value.to_string(), line));
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<(String, Option<usize>)> {
        self.entries.remove(key)
    }

    fn take_f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((raw, line)) => raw.parse::<f64>().map_err(|_| {
                err(line, format!("key `{key}`: `{raw}` is not a number"))
            }),
        }
    }

    fn take_usize(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((raw, line)) => raw.parse::<usize>().map_err(|_| {
                err(
                    line,
                    format!("key `{key}`: `{raw}` is not a nonnegative integer"),
                )
            }),
        }
    }

    fn take_bool(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((raw, line)) => match raw.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(err(
                    line,
                    format!("key `{key}`: expected true or false, got `{raw}`"),
                )),
            },
        }
    }

    /// Resolves defaults, cross-key constraints, and core-side validation.
    pub fn build(mut self) -> Result<ResolvedConfig, ConfigError> {
        let defaults = SimConfig::default();
        let default_rates = RateModel::default();
        let default_control = StepControl::default();
        let default_weno = WenoConfig::default();

        let r = self.take_f64("R", defaults.r)?;
        let n = self.take_usize("N", defaults.n)?;
        let v0 = self.take_f64("V0", defaults.v0)?;
        let (default_height, default_cutoff) = match defaults.profile {
            InitialProfile::Step { height, cutoff } => (height, cutoff),
            _ => unreachable!("default profile is a step"),
        };
        let u0_height = self.take_f64("u0_height", default_height)?;
        let u0_cutoff = self.take_f64("u0_cutoff", default_cutoff)?;

        let rates = RateModel {
            kon_slope: self.take_f64("kon_slope", default_rates.kon_slope)?,
            kon_intercept: self.take_f64("kon_intercept", default_rates.kon_intercept)?,
            kon_critical: self.take_f64("kon_critical", default_rates.kon_critical)?,
            kon_plateau: self.take_f64("kon_plateau", default_rates.kon_plateau)?,
            eta: self.take_f64("eta", default_rates.eta)?,
            kf_amplitude: self.take_f64("kf_amplitude", default_rates.kf_amplitude)?,
            kf_half_size: self.take_f64("kf_half_size", default_rates.kf_half_size)?,
            kc_amplitude: self.take_f64("kc_amplitude", default_rates.kc_amplitude)?,
            time_unit_scale: self.take_f64("time_unit_scale", default_rates.time_unit_scale)?,
        };

        let scheme = match self.take("splitting") {
            None => {
                let lam = self.take_f64(
                    "lambda",
                    match defaults.scheme {
                        SplittingScheme::Lambda(l) => l,
                        SplittingScheme::LaxFriedrichs => 0.2,
                    },
                )?;
                SplittingScheme::Lambda(lam)
            }
            Some((raw, line)) => match raw.as_str() {
                "lambda" => {
                    let lam = self.take_f64("lambda", 0.2)?;
                    SplittingScheme::Lambda(lam)
                }
                "lax_friedrichs" => {
                    if let Some((_, lam_line)) = self.take("lambda") {
                        return Err(err(
                            lam_line,
                            "key `lambda` is not accepted when splitting = lax_friedrichs"
                                .to_string(),
                        ));
                    }
                    SplittingScheme::LaxFriedrichs
                }
                _ => {
                    return Err(err(
                        line,
                        format!(
                            "key `splitting`: expected lambda or lax_friedrichs, got `{raw}`"
                        ),
                    ))
                }
            },
        };

        let spatial = match self.take("scheme") {
            None => default_weno.scheme,
            Some((raw, line)) => match raw.as_str() {
                "weno5" => SpatialScheme::Weno5,
                "upwind1" => SpatialScheme::Upwind1,
                _ => {
                    return Err(err(
                        line,
                        format!("key `scheme`: expected weno5 or upwind1, got `{raw}`"),
                    ))
                }
            },
        };
        let weno = WenoConfig {
            epsilon: self.take_f64("weno_epsilon", default_weno.epsilon)?,
            scheme: spatial,
        };

        let discoag_weight = match self.take("discoag_weight") {
            None => defaults.discoag_weight,
            Some((raw, line)) => match raw.as_str() {
                "inner" => DiscoagWeight::Inner,
                "printed" => DiscoagWeight::Printed,
                _ => {
                    return Err(err(
                        line,
                        format!(
                            "key `discoag_weight`: expected inner or printed, got `{raw}`"
                        ),
                    ))
                }
            },
        };

        let dt_max = match self.take("dt_max") {
            None => default_control.dt_max,
            Some((raw, line)) => {
                if raw == "none" {
                    None
                } else {
                    Some(raw.parse::<f64>().map_err(|_| {
                        err(
                            line,
                            format!("key `dt_max`: `{raw}` is not a number or `none`"),
                        )
                    })?)
                }
            }
        };
        let control = StepControl {
            cfl_safety: self.take_f64("cfl_safety", default_control.cfl_safety)?,
            dt_min: self.take_f64("dt_min", default_control.dt_min)?,
            dt_max,
            cfl_literal: self.take_bool("cfl_literal", default_control.cfl_literal)?,
        };

        let snapshot_times = match self.take("snapshot_times") {
            None => defaults.snapshot_times.clone(),
            Some((raw, line)) => {
                let trimmed = raw.trim();
                if trimmed.is_empty() {
                    Vec::new()
                } else {
                    trimmed
                        .split(',')
                        .map(|piece| {
                            piece.trim().parse::<f64>().map_err(|_| {
                                err(
                                    line,
                                    format!(
                                        "key `snapshot_times`: `{}` is not a number",
                                        piece.trim()
                                    ),
                                )
                            })
                        })
                        .collect::<Result<Vec<f64>, ConfigError>>()?
                }
            }
        };

        let sim = SimConfig {
            r,
            n,
            v0,
            rates,
            scheme,
            weno,
            control,
            profile: InitialProfile::Step {
                height: u0_height,
                cutoff: u0_cutoff,
            },
            t_end: self.take_f64("t_end", defaults.t_end)?,
            snapshot_times,
            timeseries_stride: self.take_usize("timeseries_stride", defaults.timeseries_stride)?,
            enable_coagfrag: self.take_bool("enable_coagfrag", defaults.enable_coagfrag)?,
            enable_transport: self.take_bool("enable_transport", defaults.enable_transport)?,
            discoag_weight,
            blowup_limit: self.take_f64("blowup_limit", defaults.blowup_limit)?,
            osc_threshold: self.take_f64("osc_threshold", defaults.osc_threshold)?,
        };
        let plot_script = self.take_bool("plot_script", false)?;

        if let Some((key, (_, line))) = self.entries.iter().next() {
            return Err(err(*line, format!("unhandled key `{key}`")));
        }

        sim.validate().map_err(|e| err(None, e.to_string()))?;
        Ok(ResolvedConfig { sim, plot_script })
    }
}

/// Parses a complete configuration file (empty text = all defaults).
#[cfg_attr(not(test), allow(dead_code))] // the binary composes parse + set + build instead
pub fn parse_config(text: &str) -> Result<ResolvedConfig, ConfigError> {
    RawConfig::parse(text)?.build()
}

/// Emits the configuration in the file format; parsing the result yields an
/// identical configuration (floats use shortest round-trip formatting).
pub fn print_config(cfg: &ResolvedConfig) -> String {
    use std::fmt::Write as _;
    let sim = &cfg.sim;
    let (height, cutoff) = match sim.profile {
        InitialProfile::Step { height, cutoff } => (height, cutoff),
        // Tabulated profiles are not expressible in the file format; the
        // CLI never constructs them.
        InitialProfile::Tabulated(_) => (f64::NAN, f64::NAN),
    };
    let mut out = String::new();
    let _ = writeln!(out, "[grid]");
    let _ = writeln!(out, "R = {}", sim.r);
    let _ = writeln!(out, "N = {}", sim.n);
    let _ = writeln!(out, "V0 = {}", sim.v0);
    let _ = writeln!(out, "u0_height = {height}");
    let _ = writeln!(out, "u0_cutoff = {cutoff}");
    let _ = writeln!(out);
    let _ = writeln!(out, "[rates]");
    let _ = writeln!(out, "eta = {}", sim.rates.eta);
    let _ = writeln!(out, "kon_slope = {}", sim.rates.kon_slope);
    let _ = writeln!(out, "kon_intercept = {}", sim.rates.kon_intercept);
    let _ = writeln!(out, "kon_critical = {}", sim.rates.kon_critical);
    let _ = writeln!(out, "kon_plateau = {}", sim.rates.kon_plateau);
    let _ = writeln!(out, "kf_amplitude = {}", sim.rates.kf_amplitude);
    let _ = writeln!(out, "kf_half_size = {}", sim.rates.kf_half_size);
    let _ = writeln!(out, "kc_amplitude = {}", sim.rates.kc_amplitude);
    let _ = writeln!(out, "time_unit_scale = {}", sim.rates.time_unit_scale);
    let _ = writeln!(out, "enable_coagfrag = {}", sim.enable_coagfrag);
    let _ = writeln!(out, "enable_transport = {}", sim.enable_transport);
    let _ = writeln!(out);
    let _ = writeln!(out, "[splitting]");
    match sim.scheme {
        SplittingScheme::Lambda(lam) => {
            let _ = writeln!(out, "splitting = lambda");
            let _ = writeln!(out, "lambda = {lam}");
        }
        SplittingScheme::LaxFriedrichs => {
            let _ = writeln!(out, "splitting = lax_friedrichs");
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[weno]");
    let _ = writeln!(
        out,
        "scheme = {}",
        match sim.weno.scheme {
            SpatialScheme::Weno5 => "weno5",
            SpatialScheme::Upwind1 => "upwind1",
        }
    );
    let _ = writeln!(out, "weno_epsilon = {}", sim.weno.epsilon);
    let _ = writeln!(
        out,
        "discoag_weight = {}",
        match sim.discoag_weight {
            DiscoagWeight::Inner => "inner",
            DiscoagWeight::Printed => "printed",
        }
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "[stepping]");
    let _ = writeln!(out, "cfl_safety = {}", sim.control.cfl_safety);
    let _ = writeln!(out, "cfl_literal = {}", sim.control.cfl_literal);
    let _ = writeln!(out, "dt_min = {}", sim.control.dt_min);
    match sim.control.dt_max {
        Some(v) => {
            let _ = writeln!(out, "dt_max = {v}");
        }
        None => {
            let _ = writeln!(out, "dt_max = none");
        }
    }
    let _ = writeln!(out, "t_end = {}", sim.t_end);
    let _ = writeln!(out, "blowup_limit = {}", sim.blowup_limit);
    let _ = writeln!(out);
    let _ = writeln!(out, "[output]");
    let times: Vec<String> = sim.snapshot_times.iter().map(|t| t.to_string()).collect();
    let _ = writeln!(out, "snapshot_times = {}", times.join(", "));
    let _ = writeln!(out, "timeseries_stride = {}", sim.timeseries_stride);
    let _ = writeln!(out, "osc_threshold = {}", sim.osc_threshold);
    let _ = writeln!(out, "plot_script = {}", cfg.plot_script);
    out
}
