//! Quantities monitored along a run: the inner band and its Gauss-curvature
//! integral, curvature energies, the area law, the residual of the evolution
//! equation for H, and convergence of the curves near the stopping time.

mod band;
mod energy;
mod evolution;
mod limit;
mod series;

pub use band::{
    band_gauss_integral, build_band, locate_bottom_minimum, reference_half_width, Band,
    BandIntegral, BAND_QUADRATURE_CELLS,
};
pub use energy::{energy_suite, EnergyBounds, EnergySuite};
pub use evolution::{
    h_evolution_residual, h_evolution_residual_curves, h_evolution_rhs, EvolutionResidual,
};
pub use limit::{hausdorff_distance, limit_curve_monitor, LimitMonitor};
pub use series::{
    area_law_check, area_law_check_against, evaluate_sample, evaluate_series, h_decay_ratio, DiagnosticsRecord,
    SampleEvaluation, SeriesSettings, SERIES_COLUMNS,
};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::rescale::RescaleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Rescale(#[from] RescaleError),
    #[error("band too wide: [{lo}, {hi}] exceeds the bottom graph domain [{domain_lo}, {domain_hi}]")]
    BandTooWide {
        lo: f64,
        hi: f64,
        domain_lo: f64,
        domain_hi: f64,
    },
    #[error("band half-width must be positive, got {0}")]
    InvalidHalfWidth(f64),
    #[error("bottom graph has too few nodes ({0}) for a band model")]
    BandTooNarrow(usize),
    #[error("at least {needed} records required, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("node correspondence lost between states (remesh or node count change)")]
    CorrespondenceLost,
    #[error("{0}")]
    InsufficientSnapshots(String),
}
