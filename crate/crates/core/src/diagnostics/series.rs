use rayon::prelude::*;

use super::{
    band_gauss_integral, build_band, energy_suite, hausdorff_distance, reference_half_width,
    Band, BandIntegral, DiagnosticsError, EnergyBounds,
};
use crate::geometry::{
    decompose_graphs, is_embedded, surface_area, CurvatureField, GeneratingCurve,
};

/// Column names of the series file, in order.
pub const SERIES_COLUMNS: [&str; 14] = [
    "t",
    "area",
    "u_min",
    "h_min",
    "h_max",
    "a2_max",
    "band_integral",
    "eps_hat",
    "gauss_bonnet_residual",
    "willmore",
    "willmore_bound",
    "l2a",
    "l2a_bound",
    "hausdorff_prev",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub area: f64,
    pub u_min: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub a2_max: f64,
    pub band_integral: f64,
    pub eps_hat: f64,
    pub gauss_bonnet_residual: f64,
    pub willmore: f64,
    pub willmore_bound: f64,
    pub l2a: f64,
    pub l2a_bound: f64,
    /// Hausdorff distance to the previous sample; 0 for the first.
    pub hausdorff_prev: f64,
}

impl DiagnosticsRecord {
    pub fn to_row(&self) -> [f64; 14] {
        [
            self.t,
            self.area,
            self.u_min,
            self.h_min,
            self.h_max,
            self.a2_max,
            self.band_integral,
            self.eps_hat,
            self.gauss_bonnet_residual,
            self.willmore,
            self.willmore_bound,
            self.l2a,
            self.l2a_bound,
            self.hausdorff_prev,
        ]
    }

    pub fn from_row(r: &[f64; 14]) -> Self {
        Self {
            t: r[0],
            area: r[1],
            u_min: r[2],
            h_min: r[3],
            h_max: r[4],
            a2_max: r[5],
            band_integral: r[6],
            eps_hat: r[7],
            gauss_bonnet_residual: r[8],
            willmore: r[9],
            willmore_bound: r[10],
            l2a: r[11],
            l2a_bound: r[12],
            hausdorff_prev: r[13],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_row().iter().all(|v| v.is_finite())
    }
}

/// Quantities fixed by the initial curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSettings {
    pub band_half_width: f64,
    /// b/a with b the maximum height of the initial curve.
    pub slope_bound: f64,
    pub bounds: EnergyBounds,
}

impl SeriesSettings {
    /// Uses `band_half_width` if given, else half the smaller distance from
    /// the bottom minimum to the extremes of x₁.
    pub fn from_initial(
        curve: &GeneratingCurve,
        band_half_width: Option<f64>,
    ) -> Result<Self, DiagnosticsError> {
        let field = CurvatureField::compute(curve)?;
        let a = match band_half_width {
            Some(a) => a,
            None => {
                let dec = decompose_graphs(curve, &field.nu)?;
                reference_half_width(curve, &dec)?
            }
        };
        if !(a > 0.0) {
            return Err(DiagnosticsError::InvalidHalfWidth(a));
        }
        Ok(Self {
            band_half_width: a,
            slope_bound: curve.u_max() / a,
            bounds: EnergyBounds::from_initial(curve, &field),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SampleEvaluation {
    pub record: DiagnosticsRecord,
    pub band: Band,
    pub band_integral: BandIntegral,
    pub gauss_integral: f64,
    pub embedded: bool,
    pub convex: bool,
}

pub fn evaluate_sample(
    curve: &GeneratingCurve,
    t: f64,
    prev: Option<&GeneratingCurve>,
    settings: &SeriesSettings,
) -> Result<SampleEvaluation, DiagnosticsError> {
    let field = CurvatureField::compute(curve)?;
    let dec = decompose_graphs(curve, &field.nu)?;
    let band = build_band(curve, &dec, settings.band_half_width)?;
    let bi = band_gauss_integral(&band, curve, &field);
    let energy = energy_suite(curve, &field, settings.bounds);
    let record = DiagnosticsRecord {
        t,
        area: surface_area(curve),
        u_min: curve.u_min(),
        h_min: field.h_min(),
        h_max: field.h_max(),
        a2_max: field.a2_max(),
        band_integral: bi.value,
        eps_hat: bi.eps_hat,
        gauss_bonnet_residual: energy.gauss_bonnet_residual,
        willmore: energy.willmore,
        willmore_bound: settings.bounds.willmore,
        l2a: energy.l2a,
        l2a_bound: settings.bounds.l2a,
        hausdorff_prev: prev.map_or(0.0, |p| hausdorff_distance(p, curve)),
    };
    Ok(SampleEvaluation {
        record,
        band,
        band_integral: bi,
        gauss_integral: energy.gauss_integral,
        embedded: is_embedded(curve).is_embedded(),
        convex: dec.is_convex(),
    })
}

/// Evaluates every sample concurrently; `samples` must be in time order.
pub fn evaluate_series(
    samples: &[(f64, &GeneratingCurve)],
    settings: &SeriesSettings,
) -> Result<Vec<SampleEvaluation>, DiagnosticsError> {
    (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let (t, c) = samples[i];
            let prev = i.checked_sub(1).map(|j| samples[j].1);
            evaluate_sample(c, t, prev, settings)
        })
        .collect()
}

/// max |log(area(t)/area(t₀)) − (t − t₀)| over the records.
pub fn area_law_check(records: &[DiagnosticsRecord]) -> Result<f64, DiagnosticsError> {
    let area0 = records.first().map_or(f64::NAN, |r| r.area);
    area_law_check_against(records, area0)
}

/// As [`area_law_check`] with the area at the first record's time given
/// independently of the records.
pub fn area_law_check_against(
    records: &[DiagnosticsRecord],
    area0: f64,
) -> Result<f64, DiagnosticsError> {
    if records.len() < 2 {
        return Err(DiagnosticsError::TooFewRecords {
            needed: 2,
            got: records.len(),
        });
    }
    let t0 = records[0].t;
    Ok(records
        .iter()
        .map(|r| ((r.area / area0).ln() - (r.t - t0)).abs())
        .fold(0.0, f64::max))
}

/// max over records of max H(t) / (e^{−t/2} max H(t₀)).
pub fn h_decay_ratio(records: &[DiagnosticsRecord]) -> Result<f64, DiagnosticsError> {
    let Some(first) = records.first() else {
        return Err(DiagnosticsError::TooFewRecords { needed: 1, got: 0 });
    };
    Ok(records
        .iter()
        .map(|r| r.h_max / ((-0.5 * (r.t - first.t)).exp() * first.h_max))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::make_round_torus;

    fn record(t: f64, area: f64) -> DiagnosticsRecord {
        DiagnosticsRecord::from_row(&[t, area, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    #[test]
    fn exact_exponential_area_has_zero_deviation() {
        let recs: Vec<_> = (0..10).map(|i| record(0.1 * i as f64, 5.0 * (0.1 * i as f64).exp())).collect();
        assert!(area_law_check(&recs).unwrap() < 1e-14);
        assert!(area_law_check(&recs[..1]).is_err());
    }

    #[test]
    fn scaled_area_is_detected() {
        let mut recs: Vec<_> = (0..5).map(|i| record(i as f64, (i as f64).exp())).collect();
        recs[3].area *= 1.1;
        assert!((area_law_check(&recs).unwrap() - 1.1f64.ln()).abs() < 1e-12);
        for r in &mut recs {
            r.area *= 1.5;
        }
        assert!(area_law_check(&recs).unwrap() < 0.1);
        assert!(area_law_check_against(&recs, 1.0).unwrap() > 1.5f64.ln() - 1e-12);
    }

    #[test]
    fn row_round_trip() {
        let r = record(0.5, 2.0);
        assert_eq!(DiagnosticsRecord::from_row(&r.to_row()), r);
    }

    #[test]
    fn initial_torus_sample() {
        let c = make_round_torus(3.0, 1.0, 512).unwrap();
        let s = SeriesSettings::from_initial(&c, None).unwrap();
        assert!((s.band_half_width - 0.5).abs() < 1e-9);
        assert!((s.slope_bound - 8.0).abs() < 1e-9);
        let e = evaluate_sample(&c, 0.0, None, &s).unwrap();
        let r = e.record;
        assert!(r.is_finite());
        assert!((r.h_min - 0.5).abs() < 1e-4 && (r.h_max - 1.25).abs() < 1e-4);
        assert!(r.band_integral < 4.0 * std::f64::consts::PI);
        assert!(e.embedded && e.convex);
        assert_eq!(r.hausdorff_prev, 0.0);
    }

    #[test]
    fn series_matches_single_evaluations() {
        let a = make_round_torus(3.0, 1.0, 128).unwrap();
        let b = make_round_torus(3.0, 1.05, 128).unwrap();
        let s = SeriesSettings::from_initial(&a, None).unwrap();
        let series = evaluate_series(&[(0.0, &a), (0.1, &b)], &s).unwrap();
        let single = evaluate_sample(&b, 0.1, Some(&a), &s).unwrap();
        assert_eq!(series[1].record, single.record);
        assert!((series[1].record.hausdorff_prev - 0.05).abs() < 1e-3);
    }
}
