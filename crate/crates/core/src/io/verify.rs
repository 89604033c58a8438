use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use super::experiment::rescaled_row;
use super::files::{read_curve, read_series, read_snapshot_index, Manifest, OutputLayout};
use super::IoError;
use crate::diagnostics::{
    area_law_check_against, evaluate_series, h_decay_ratio, limit_curve_monitor, DiagnosticsRecord,
    SeriesSettings,
};
use crate::flow::{checked_decomposition, graphs_monotone, nesting_check, SnapshotKind};
use crate::geometry::GeneratingCurve;
use crate::rescale::RESCALE_SAMPLES;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported but not counted as a failure.
    Warn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Warn => "WARN",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn push(&mut self, name: &'static str, pass: bool, detail: String) {
        let status = if pass { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(Check { name, status, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn required_f64(m: &Manifest, key: &str, path: &Path) -> Result<f64, IoError> {
    m.get_f64(key).ok_or_else(|| IoError::Csv {
        path: path.to_path_buf(),
        message: format!("manifest lacks numeric key {key}"),
    })
}

/// Re-evaluates the stored run in `out` against every invariant and bound.
pub fn verify_output(out: &Path) -> Result<VerifyReport, IoError> {
    let layout = OutputLayout::new(out);
    let manifest = Manifest::read(&layout.manifest())?;
    let series = read_series(&layout.series())?;
    let index = read_snapshot_index(&layout.snapshot_index())?;
    let mpath = layout.manifest();
    let t_stop = required_f64(&manifest, "t_stop", &mpath)?;
    let band_half_width = required_f64(&manifest, "band_half_width", &mpath)?;
    let eps_u = required_f64(&manifest, "eps_u", &mpath)?;
    let a2_flag = manifest.get_f64("a2_growth_flag").unwrap_or(10.0);

    let mut curves = Vec::with_capacity(index.len());
    for e in &index {
        curves.push(read_curve(&layout.snapshots().join(&e.file))?);
    }
    let initial = index
        .iter()
        .position(|e| e.kind == SnapshotKind::Initial)
        .map(|i| &curves[i])
        .ok_or_else(|| IoError::Missing(layout.snapshots().join("<initial snapshot>")))?;
    let settings = SeriesSettings::from_initial(initial, Some(band_half_width))?;

    let mut sample_ids: Vec<usize> = Vec::new();
    for (i, e) in index.iter().enumerate() {
        if e.kind.is_sample() && sample_ids.last().is_none_or(|&j| index[j].step != e.step) {
            sample_ids.push(i);
        }
    }
    let samples: Vec<(f64, &GeneratingCurve)> =
        sample_ids.iter().map(|&i| (index[i].t, &curves[i])).collect();

    let mut report = VerifyReport::default();

    // recomputation fidelity
    let evals = evaluate_series(&samples, &settings);
    let evals = match evals {
        Ok(e) => e,
        Err(e) => {
            report.push("structure", false, format!("diagnostics failed on a snapshot: {e}"));
            return Ok(report);
        }
    };
    let recomputed: Vec<DiagnosticsRecord> = evals.iter().map(|e| e.record).collect();
    let worst = if recomputed.len() == series.len() {
        recomputed
            .iter()
            .zip(&series)
            .flat_map(|(a, b)| {
                a.to_row()
                    .into_iter()
                    .zip(b.to_row())
                    .map(|(x, y)| rel_diff(x, y))
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    report.push(
        "series-recompute",
        worst <= 1e-12,
        format!(
            "{} stored rows, {} recomputed, max relative difference {worst:.3e} (tol 1e-12)",
            series.len(),
            recomputed.len()
        ),
    );
    if series.is_empty() {
        report.push("series", false, "series.csv has no rows".into());
        return Ok(report);
    }

    let early: Vec<DiagnosticsRecord> =
        series.iter().copied().filter(|r| r.t <= 0.8 * t_stop).collect();
    // the reference area comes from the initial snapshot, not the stored series
    match area_law_check_against(&early, recomputed[0].area) {
        Ok(d) => report.push(
            "area-law",
            d < 1e-3,
            format!(
                "max |log(A/A0) - t| = {d:.3e} over {} samples with t <= 0.8 T (tol 1e-3)",
                early.len()
            ),
        ),
        Err(e) => report.push("area-law", false, e.to_string()),
    }

    let ratio = h_decay_ratio(&series)?;
    report.push(
        "h-decay",
        ratio <= 1.05,
        format!("max H(t) / (exp(-t/2) max H(0)) = {ratio:.6} (bound 1.05)"),
    );

    let gb = series.iter().map(|r| r.gauss_bonnet_residual).fold(0.0, f64::max);
    report.push("gauss-bonnet", gb < 0.05, format!("max |int K| = {gb:.3e} (tol 0.05)"));

    let max_band = series.iter().map(|r| r.band_integral).fold(0.0, f64::max);
    let eps_hat = 1.0 - max_band / (4.0 * PI);
    report.push(
        "band-estimate",
        max_band < 4.0 * PI && eps_hat > 0.0,
        format!("max band integral {max_band:.6} < 4pi, eps_hat = {eps_hat:.4}"),
    );

    let max_slope = evals.iter().map(|e| e.band.boundary_slope).fold(0.0, f64::max);
    let max_nu = evals
        .iter()
        .map(|e| e.band.nu_e2_boundary)
        .fold(f64::NEG_INFINITY, f64::max);
    report.push(
        "band-boundary",
        max_slope <= settings.slope_bound && max_nu <= -0.01,
        format!(
            "max |w'(+-a)| = {max_slope:.4} (bound b/a = {:.4}), max <e2,nu> at ends = {max_nu:.4} (<= -0.01)",
            settings.slope_bound
        ),
    );

    let w_margin = series.iter().map(|r| r.willmore_bound - r.willmore).fold(f64::INFINITY, f64::min);
    let l_margin = series.iter().map(|r| r.l2a_bound - r.l2a).fold(f64::INFINITY, f64::min);
    report.push(
        "energy-bounds",
        w_margin > 0.0 && l_margin > 0.0,
        format!("min Willmore margin {w_margin:.4}, min L2(|A|) margin {l_margin:.4}"),
    );

    let stop = manifest.get("stop_reason").unwrap_or("missing");
    let u0 = series[0].u_min;
    let u_min = series.iter().map(|r| r.u_min).fold(f64::INFINITY, f64::min);
    let u_final = series.last().unwrap().u_min;
    report.push(
        "non-pinching",
        stop == "h_min_reached" && u_min > eps_u && u_final > 0.25 * u0,
        format!(
            "stop = {stop}, final u_min = {u_final:.4} (> 0.25 u_min(0) = {:.4}), min u_min {u_min:.4} > eps_u {eps_u:.3e}",
            0.25 * u0
        ),
    );

    let a2_ratio = series.iter().map(|r| r.a2_max).fold(0.0, f64::max) / series[0].a2_max;
    let a_ratio = a2_ratio.sqrt();
    report.push(
        "curvature-bound",
        a_ratio <= 10.0,
        format!("max|A| / max|A|(0) = {a_ratio:.4} (bound 10)"),
    );
    report.checks.push(Check {
        name: "a2-growth",
        status: if a2_ratio > a2_flag { CheckStatus::Warn } else { CheckStatus::Pass },
        detail: format!("max|A|^2 / max|A|^2(0) = {a2_ratio:.4} (flag above {a2_flag})"),
    });

    let all_embedded = evals.iter().all(|e| e.embedded);
    let all_convex = evals.iter().all(|e| e.convex);
    let pairs: Vec<(bool, bool)> = samples
        .par_windows(2)
        .map(|w| {
            let (prev, next) = (w[0].1, w[1].1);
            let nested = nesting_check(prev, next);
            let tol = 1e-9 * next.diameter();
            let monotone = checked_decomposition(prev).is_ok_and(|d| graphs_monotone(&d, next, tol));
            (nested, monotone)
        })
        .collect();
    let nested = pairs.iter().all(|p| p.0);
    let monotone = pairs.iter().all(|p| p.1);
    report.push(
        "structure",
        all_embedded && all_convex && nested && monotone,
        format!(
            "embedded {all_embedded}, two graphs with convex bottom {all_convex}, nested {nested}, w/v monotone {monotone} over {} samples",
            samples.len()
        ),
    );

    let rescale_samples = manifest
        .get("rescale_samples")
        .and_then(|s| s.parse().ok())
        .unwrap_or(RESCALE_SAMPLES);
    let worst_forms = evals
        .par_iter()
        .map(|e| rescaled_row(e, rescale_samples, None).map(|(_, r)| rel_diff(r.contradiction_full, r.band_integral)))
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push(
        "band-forms",
        worst_forms <= 1e-6,
        format!("max relative gap between rescaled and band integrals {worst_forms:.3e} (tol 1e-6)"),
    );

    let approach: Vec<(f64, &GeneratingCurve)> = index
        .iter()
        .zip(&curves)
        .filter(|(e, _)| e.kind != SnapshotKind::Regular)
        .map(|(e, c)| (e.t, c))
        .collect();
    match limit_curve_monitor(&approach, t_stop) {
        Ok(mon) => {
            let d = &mon.distances;
            let last = &d[d.len().saturating_sub(4)..];
            let decreasing = d.len() >= 4 && last.windows(2).all(|w| w[1] < w[0]);
            report.push(
                "limit-curve",
                decreasing && mon.limit_embedded && mon.limit_decomposes,
                format!(
                    "last distances {:?}, strictly decreasing {decreasing}, limit embedded {}, two graphs {}",
                    last.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>(),
                    mon.limit_embedded,
                    mon.limit_decomposes
                ),
            );
        }
        Err(e) => report.push("limit-curve", false, e.to_string()),
    }
    Ok(report)
}
