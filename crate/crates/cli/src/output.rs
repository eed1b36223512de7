//! Output bundle: timeseries CSV, per-snapshot CSVs, a re-runnable manifest,
//! and an optional plot script. All numeric fields are printed with 17
//! significant digits so re-reading reproduces the values bit-for-bit.

use crate::config::{print_config, ResolvedConfig};
use anyhow::{Context, Result};
use polyweno_core::grid::make_grid;
use polyweno_core::sim::{SimulationResult, Termination};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Round-trip-exact float formatting (17 significant digits).
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Fixed formatting for the time embedded in snapshot filenames.
pub fn snapshot_filename(requested: f64) -> String {
    format!("snapshot_{requested:.6}.csv")
}

/// Writes the whole bundle into `out_dir` (created if missing) and returns
/// the paths written.
pub fn write_outputs(
    cfg: &ResolvedConfig,
    result: &SimulationResult,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let mut paths = Vec::new();

    let mut ts = String::from("t,dt,V,polymer_mass,total_mass,min_u,max_u,oscillation\n");
    for row in &result.timeseries {
        let _ = writeln!(
            ts,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(row.t),
            fmt_f64(row.dt),
            fmt_f64(row.v),
            fmt_f64(row.polymer_mass),
            fmt_f64(row.total_mass),
            fmt_f64(row.min_u),
            fmt_f64(row.max_u),
            fmt_f64(row.oscillation),
        );
    }
    let ts_path = out_dir.join("timeseries.csv");
    fs::write(&ts_path, ts).with_context(|| format!("writing {}", ts_path.display()))?;
    paths.push(ts_path);

    let grid = make_grid(cfg.sim.r, cfg.sim.n)
        .map_err(|e| anyhow::anyhow!("rebuilding grid for snapshot output: {e}"))?;
    for snap in &result.snapshots {
        let mut body = String::from("x,u\n");
        for (x, u) in grid.x.iter().zip(&snap.u) {
            let _ = writeln!(body, "{},{}", fmt_f64(*x), fmt_f64(*u));
        }
        let path = out_dir.join(snapshot_filename(snap.requested));
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        paths.push(path);
    }

    let mut manifest = String::new();
    let _ = writeln!(
        manifest,
        "# polyweno {} run manifest (re-runnable: pass as --config)",
        env!("CARGO_PKG_VERSION")
    );
    match &result.termination {
        Termination::Completed => {
            let _ = writeln!(manifest, "# status: completed");
        }
        Termination::Diverged { reason, time } => {
            let _ = writeln!(manifest, "# status: diverged at t = {time} ({reason})");
        }
    }
    let _ = writeln!(
        manifest,
        "# initial monomer V0 = {}, initial polymer mass m0 = {}",
        fmt_f64(result.v0),
        fmt_f64(result.m0)
    );
    manifest.push('\n');
    manifest.push_str(&print_config(cfg));
    let manifest_path = out_dir.join("run_manifest.cfg");
    fs::write(&manifest_path, manifest)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    paths.push(manifest_path);

    if cfg.plot_script {
        let mut plot = String::from(
            "# Plot commands for the run outputs (gnuplot syntax).\n\
             set datafile separator ','\n\
             set key autotitle columnhead\n\
             set xlabel 'polymer size x'\n\
             set ylabel 'density u(x)'\n",
        );
        let series: Vec<String> = result
            .snapshots
            .iter()
            .map(|s| {
                format!(
                    "'{}' using 1:2 with lines title 't={}'",
                    snapshot_filename(s.requested),
                    s.requested
                )
            })
            .collect();
        if !series.is_empty() {
            let _ = writeln!(plot, "plot {}", series.join(", \\\n     "));
            plot.push_str("pause -1 'press enter for the monomer curve'\n");
        }
        plot.push_str(
            "set xlabel 'time t (h)'\n\
             set ylabel 'free monomer V (uM)'\n\
             plot 'timeseries.csv' using 1:3 with lines title 'V(t)'\n\
             pause -1 'press enter to close'\n",
        );
        let plot_path = out_dir.join("plot.gp");
        fs::write(&plot_path, plot)
            .with_context(|| format!("writing {}", plot_path.display()))?;
        paths.push(plot_path);
    }

    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use polyweno_core::sim::run;

    #[test]
    fn bundle_contents_and_snapshot_round_trip() {
        let cfg =
            parse_config("t_end = 0.1\nsnapshot_times = 0, 0.1\nplot_script = true\n").unwrap();
        let result = run(&cfg.sim).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = write_outputs(&cfg, &result, dir.path()).unwrap();
        let names: Vec<String> = paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            vec![
                "timeseries.csv",
                "snapshot_0.000000.csv",
                "snapshot_0.100000.csv",
                "run_manifest.cfg",
                "plot.gp"
            ]
        );

        // Re-reading a snapshot CSV reproduces the density bitwise.
        let body = fs::read_to_string(dir.path().join("snapshot_0.100000.csv")).unwrap();
        let mut lines = body.lines();
        assert_eq!(lines.next(), Some("x,u"));
        let snap = &result.snapshots[1];
        for (line, want) in lines.zip(&snap.u) {
            let got: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(got.to_bits(), want.to_bits());
        }

        // The manifest parses back to the identical configuration.
        let manifest = fs::read_to_string(dir.path().join("run_manifest.cfg")).unwrap();
        let reparsed = parse_config(&manifest).unwrap();
        assert_eq!(reparsed, cfg);
    }

    #[test]
    fn zero_snapshot_config_writes_timeseries_and_manifest_only() {
        let cfg = parse_config("t_end = 0.05\nsnapshot_times = \n").unwrap();
        let result = run(&cfg.sim).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = write_outputs(&cfg, &result, dir.path()).unwrap();
        let names: Vec<String> = paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["timeseries.csv", "run_manifest.cfg"]);
    }
}
