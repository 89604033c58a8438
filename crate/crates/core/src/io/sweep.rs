use std::path::Path;

use rayon::prelude::*;

use super::config::{RunConfig, SweepConfig};
use super::experiment::run_experiment;
use super::files::fmt_f64;
use super::IoError;

pub const SWEEP_FILE: &str = "sweep.csv";

/// Environment variable capping the number of concurrent sweep cells.
pub const THREADS_ENV: &str = "IMCF_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub cell: usize,
    pub config: RunConfig,
    /// `ok`, `rejected` (invalid scenario) or `failed`.
    pub status: &'static str,
    pub message: String,
    pub stop_reason: String,
    pub t_max_lower: f64,
    pub t_max_upper: f64,
    pub final_u_min: f64,
    pub eps_hat: f64,
    pub willmore_margin: f64,
    pub l2a_margin: f64,
}

const SWEEP_COLUMNS: [&str; 14] = [
    "cell",
    "major_radius",
    "minor_radius",
    "modes",
    "status",
    "stop_reason",
    "t_max_lower",
    "t_max_upper",
    "final_u_min",
    "eps_hat",
    "willmore_margin",
    "l2a_margin",
    "message",
    "out_dir",
];

/// Threads for a sweep: `IMCF_THREADS` if set to a positive integer, else
/// rayon's default.
pub fn sweep_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

fn cell_dir(cell: usize) -> String {
    format!("cell_{cell:03}")
}

fn run_cell(cell: usize, config: RunConfig, out: &Path) -> SweepRow {
    let mut row = SweepRow {
        cell,
        config,
        status: "ok",
        message: String::new(),
        stop_reason: String::new(),
        t_max_lower: f64::NAN,
        t_max_upper: f64::NAN,
        final_u_min: f64::NAN,
        eps_hat: f64::NAN,
        willmore_margin: f64::NAN,
        l2a_margin: f64::NAN,
    };
    match run_experiment(&row.config, &out.join(cell_dir(cell))) {
        Ok(outcome) => {
            let m = &outcome.manifest;
            let get = |k: &str| m.get_f64(k).unwrap_or(f64::NAN);
            row.stop_reason = outcome.stop.to_string();
            row.t_max_lower = get("t_max_lower");
            row.t_max_upper = get("t_max_upper");
            row.final_u_min = get("final_u_min");
            row.eps_hat = get("eps_hat");
            row.willmore_margin = get("willmore_margin");
            row.l2a_margin = get("l2a_margin");
        }
        Err(e) => {
            row.status = if e.exit_code() == 3 { "rejected" } else { "failed" };
            row.message = e.to_string();
        }
    }
    row
}

/// Runs every grid cell independently, each into `out/cell_NNN`, and writes
/// the aggregate table `out/sweep.csv`. Failing cells are recorded, not fatal.
pub fn run_sweep(config: &SweepConfig, out: &Path) -> Result<Vec<SweepRow>, IoError> {
    std::fs::create_dir_all(out).map_err(|e| IoError::io(out, e))?;
    let cells = config.cells();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = sweep_threads() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| IoError::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        cells
            .into_par_iter()
            .enumerate()
            .map(|(i, c)| run_cell(i, c, out))
            .collect()
    });
    let path = out.join(SWEEP_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(|e| IoError::Csv {
        path: path.clone(),
        message: e.to_string(),
    })?;
    let csv_err = |e: csv::Error| IoError::Csv {
        path: path.clone(),
        message: e.to_string(),
    };
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for r in &rows {
        let modes = r
            .config
            .scenario
            .modes
            .iter()
            .map(|m| format!("{}:{}:{}", m.m, m.amplitude, m.phase))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.cell.to_string(),
            fmt_f64(r.config.scenario.major_radius),
            fmt_f64(r.config.scenario.minor_radius),
            modes,
            r.status.to_string(),
            r.stop_reason.clone(),
            fmt_f64(r.t_max_lower),
            fmt_f64(r.t_max_upper),
            fmt_f64(r.final_u_min),
            fmt_f64(r.eps_hat),
            fmt_f64(r.willmore_margin),
            fmt_f64(r.l2a_margin),
            r.message.clone(),
            cell_dir(r.cell),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| IoError::io(&path, e))?;
    Ok(rows)
}
