use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::RunConfig;
use super::files::{
    snapshot_file_name, write_curve, write_rescaled, write_rescaled_summary, write_series,
    write_snapshot_index, Manifest, OutputLayout, RescaledSummaryRow, SnapshotEntry,
    RESCALED_SUMMARY,
};
use super::IoError;
use crate::diagnostics::{
    area_law_check, evaluate_series, h_decay_ratio, limit_curve_monitor, DiagnosticsRecord,
    SampleEvaluation, SeriesSettings,
};
use crate::flow::{self, Snapshot, StopReason, Trajectory};
use crate::geometry::GeneratingCurve;
use crate::rescale::{catenary_deviation, contradiction_integral, rescale_band, RescaledBand};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub records: Vec<DiagnosticsRecord>,
    pub stop: StopReason,
}

/// Sample snapshots with the final one dropped when it repeats the last
/// regular sample.
pub(super) fn sample_snapshots(traj: &Trajectory) -> Vec<&Snapshot> {
    let mut out: Vec<&Snapshot> = Vec::new();
    for s in traj.samples() {
        if out.last().is_some_and(|p| p.step == s.step) {
            continue;
        }
        out.push(s);
    }
    out
}

pub(super) fn rescaled_row(
    eval: &SampleEvaluation,
    samples: usize,
    window: Option<f64>,
) -> Result<(RescaledBand, RescaledSummaryRow), IoError> {
    let rb = rescale_band(&eval.band, samples)?;
    let window = window.unwrap_or_else(|| rb.default_window()).min(rb.half_width);
    let dev = catenary_deviation(&rb, window)?;
    let row = RescaledSummaryRow {
        t: eval.record.t,
        u_min: eval.band.u_min,
        half_width: rb.half_width,
        window,
        deviation: dev.value,
        deviation_slope: dev.slope,
        deviation_second: dev.second,
        gamma: dev.gamma,
        contradiction_window: contradiction_integral(&rb.samples, window)?,
        contradiction_full: contradiction_integral(&rb.samples, rb.half_width)?,
        band_integral: eval.record.band_integral,
    };
    Ok((rb, row))
}

/// Aggregates the per-sample evaluations into manifest entries.
pub(super) fn summarize(
    m: &mut Manifest,
    evals: &[SampleEvaluation],
    settings: &SeriesSettings,
    t_stop: f64,
    a2_flag: f64,
) -> Result<(), IoError> {
    let records: Vec<DiagnosticsRecord> = evals.iter().map(|e| e.record).collect();
    let max_of = |f: &dyn Fn(&SampleEvaluation) -> f64| {
        evals.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    };
    let min_of = |f: &dyn Fn(&SampleEvaluation) -> f64| {
        evals.iter().map(f).fold(f64::INFINITY, f64::min)
    };
    let early: Vec<DiagnosticsRecord> = records
        .iter()
        .copied()
        .filter(|r| r.t <= 0.8 * t_stop)
        .collect();
    let max_band = max_of(&|e| e.record.band_integral);
    m.set_f64("band_half_width", settings.band_half_width);
    m.set_f64("slope_bound", settings.slope_bound);
    m.set_f64("max_band_integral", max_band);
    m.set_f64("eps_hat", 1.0 - max_band / (4.0 * std::f64::consts::PI));
    m.set_f64("max_boundary_slope", max_of(&|e| e.band.boundary_slope));
    m.set_f64("max_nu_e2_boundary", max_of(&|e| e.band.nu_e2_boundary));
    m.set_f64("willmore_margin", min_of(&|e| e.record.willmore_bound - e.record.willmore));
    m.set_f64("l2a_margin", min_of(&|e| e.record.l2a_bound - e.record.l2a));
    m.set_f64("max_gauss_bonnet_residual", max_of(&|e| e.record.gauss_bonnet_residual));
    if early.len() >= 2 {
        m.set_f64("area_law_deviation", area_law_check(&early)?);
    }
    m.set_f64("h_decay_ratio", h_decay_ratio(&records)?);
    let a2_ratio = max_of(&|e| e.record.a2_max) / records[0].a2_max;
    m.set_f64("a2_growth_ratio", a2_ratio);
    m.set("a2_growth_flagged", a2_ratio > a2_flag);
    m.set_f64("min_u_min", min_of(&|e| e.record.u_min));
    Ok(())
}

/// Runs the configured flow and writes series, snapshots, rescaled bands and
/// the manifest under `out`.
pub fn run_experiment(config: &RunConfig, out: &Path) -> Result<RunOutcome, IoError> {
    let start = Instant::now();
    let initial = config.scenario.build()?;
    let ctl = config.flow.step_control(&initial)?;
    let traj = flow::run(initial.clone(), &ctl, config.flow.sample_every)?;
    let settings = SeriesSettings::from_initial(&initial, config.diagnostics.band_half_width)?;

    let samples = sample_snapshots(&traj);
    let pairs: Vec<(f64, &GeneratingCurve)> = samples.iter().map(|s| (s.t, &s.curve)).collect();
    let evals = evaluate_series(&pairs, &settings)?;
    let records: Vec<DiagnosticsRecord> = evals.iter().map(|e| e.record).collect();
    let rescaled = evals
        .par_iter()
        .map(|e| {
            rescaled_row(
                e,
                config.diagnostics.rescale_samples,
                config.diagnostics.rescale_window,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let layout = OutputLayout::new(out);
    layout.create_dirs()?;
    write_series(&layout.series(), &records)?;
    let mut index = Vec::new();
    for s in &traj.snapshots {
        let file = snapshot_file_name(s.t);
        let path = layout.snapshots().join(&file);
        if !path.exists() {
            write_curve(&path, &s.curve)?;
        }
        index.push(SnapshotEntry {
            file,
            t: s.t,
            step: s.step,
            kind: s.kind,
        });
    }
    write_snapshot_index(&layout.snapshot_index(), &index)?;
    for (rb, row) in &rescaled {
        write_rescaled(&layout.rescaled().join(snapshot_file_name(row.t)), rb)?;
    }
    let rows: Vec<RescaledSummaryRow> = rescaled.iter().map(|(_, r)| *r).collect();
    write_rescaled_summary(&layout.rescaled().join(RESCALED_SUMMARY), &rows)?;

    let fin = &traj.final_state;
    let mut m = Manifest::default();
    m.set("stop_reason", fin.stop);
    m.set_f64("t_stop", fin.t);
    let (lo, hi) = fin.t_max_bracket();
    m.set_f64("t_max_lower", lo);
    m.set_f64("t_max_upper", hi);
    m.set("steps", fin.step_count);
    m.set("rejected_steps", fin.rejected_steps);
    m.set("remeshes", fin.mesh_epoch);
    m.set("nodes", initial.len());
    m.set_f64("major_radius", config.scenario.major_radius);
    m.set_f64("minor_radius", config.scenario.minor_radius);
    m.set("modes", config.scenario.modes.len());
    m.set_f64("cfl", ctl.cfl);
    m.set_f64("eps_h", ctl.eps_h);
    m.set_f64("eps_u", ctl.eps_u);
    m.set_f64("sample_every", config.flow.sample_every);
    m.set_f64("initial_h_min", traj.initial_h_min);
    m.set_f64("initial_h_max", traj.initial_h_max);
    m.set_f64("initial_u_min", initial.u_min());
    m.set_f64("final_u_min", fin.curve.u_min());
    m.set_f64("a2_growth_flag", config.diagnostics.a2_growth_flag);
    m.set("rescale_samples", config.diagnostics.rescale_samples);
    m.set("samples", records.len());
    summarize(&mut m, &evals, &settings, fin.t, config.diagnostics.a2_growth_flag)?;

    let approach: Vec<(f64, &GeneratingCurve)> =
        traj.approach().map(|s| (s.t, &s.curve)).collect();
    match limit_curve_monitor(&approach, fin.t) {
        Ok(mon) => {
            write_curve(&layout.limit(), &mon.limit)?;
            m.set("limit_snapshots", mon.times.len());
            m.set("limit_decreasing", mon.decreasing);
            m.set("limit_embedded", mon.limit_embedded);
            m.set("limit_decomposes", mon.limit_decomposes);
            if let Some(w) = mon.warning {
                m.set("limit_warning", w);
            }
        }
        Err(e) => m.set("limit_warning", e),
    }
    m.set_f64("wall_seconds", start.elapsed().as_secs_f64());
    m.write(&layout.manifest())?;
    Ok(RunOutcome {
        manifest: m,
        records,
        stop: fin.stop,
    })
}
