//! Initial data: round and Fourier-perturbed tori, and catenary fixtures.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    decompose_graphs, is_embedded, CurvatureField, Embedding, GeneratingCurve, GeometryError,
    Point, MIN_NODES,
};
use crate::rescale::GraphSamples;

/// Node count used to decide numerically whether a perturbed torus is mean-convex.
pub const VALIDATION_NODES: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid radii: {0}")]
    InvalidRadii(String),
    #[error("at least {MIN_NODES} nodes required, got {0}")]
    TooFewNodes(usize),
    #[error("not mean-convex: {0}")]
    NotMeanConvex(String),
    #[error("perturbed radius is not positive at phi = {phi:.6}")]
    NonPositiveRadius { phi: f64 },
    #[error("perturbed profile is not embedded (segments {0} and {1} cross)")]
    NotEmbedded(usize, usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One term `amplitude · cos(m φ + phase)` of the relative radius perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub m: u32,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

fn profile(
    major: f64,
    minor: f64,
    modes: &[FourierMode],
    n: usize,
) -> Result<Vec<Point>, ScenarioError> {
    // φ decreases so the node (ρ sin φ, R + ρ cos φ) is traversed counterclockwise
    (0..n)
        .map(|i| {
            let phi = -2.0 * PI * i as f64 / n as f64;
            let rel: f64 = modes
                .iter()
                .map(|c| c.amplitude * (c.m as f64 * phi + c.phase).cos())
                .sum();
            let rho = minor * (1.0 + rel);
            if rho <= 0.0 {
                return Err(ScenarioError::NonPositiveRadius { phi });
            }
            Ok(Point::new(rho * phi.sin(), major + rho * phi.cos()))
        })
        .collect()
}

/// Circle of radius `minor` centred at `(0, major)`, `n` uniform nodes,
/// positively oriented. Mean-convex iff `major > 2 minor`.
pub fn make_round_torus(major: f64, minor: f64, n: usize) -> Result<GeneratingCurve, ScenarioError> {
    if !(minor > 0.0) || !major.is_finite() || !minor.is_finite() {
        return Err(ScenarioError::InvalidRadii(format!("R = {major}, r = {minor}")));
    }
    if n < MIN_NODES {
        return Err(ScenarioError::TooFewNodes(n));
    }
    if major <= 2.0 * minor {
        let h_inner = 1.0 / minor - 1.0 / (major - minor);
        return Err(ScenarioError::NotMeanConvex(format!(
            "inner-ring mean curvature 1/r - 1/(R - r) = {h_inner} <= 0 (requires R > 2r; R = {major}, r = {minor})"
        )));
    }
    Ok(GeneratingCurve::new(profile(major, minor, &[], n)?)?)
}

/// Round torus with radius ρ(φ) = r (1 + Σ c_m cos(mφ + φ_m)). Mean convexity
/// and embeddedness are checked on a [`VALIDATION_NODES`]-node copy.
pub fn make_perturbed_torus(
    major: f64,
    minor: f64,
    modes: &[FourierMode],
    n: usize,
) -> Result<GeneratingCurve, ScenarioError> {
    if modes.iter().all(|c| c.amplitude == 0.0) {
        return make_round_torus(major, minor, n);
    }
    if !(minor > 0.0) || !major.is_finite() || !minor.is_finite() {
        return Err(ScenarioError::InvalidRadii(format!("R = {major}, r = {minor}")));
    }
    if n < MIN_NODES {
        return Err(ScenarioError::TooFewNodes(n));
    }
    let check_nodes = n.max(VALIDATION_NODES);
    let fine = GeneratingCurve::new(profile(major, minor, modes, check_nodes)?)?;
    if let Embedding::Crossing(i, j) = is_embedded(&fine) {
        return Err(ScenarioError::NotEmbedded(i, j));
    }
    let field = CurvatureField::compute(&fine)?;
    let worst = field.argmin_h();
    if field.h[worst] <= 0.0 {
        let p = fine.nodes()[worst];
        return Err(ScenarioError::NotMeanConvex(format!(
            "H = {:.6e} at validation node {worst} of {check_nodes} (x1 = {:.6}, x2 = {:.6})",
            field.h[worst], p.x, p.y
        )));
    }
    decompose_graphs(&fine, &field.nu)?;
    let curve = GeneratingCurve::new(profile(major, minor, modes, n)?)?;
    if let Embedding::Crossing(i, j) = is_embedded(&curve) {
        return Err(ScenarioError::NotEmbedded(i, j));
    }
    Ok(curve)
}

/// Samples of cosh on `[-x0, x0]` at `n` uniform points.
pub fn make_catenary_band(x0: f64, n: usize) -> GraphSamples {
    assert!(x0 > 0.0 && n >= 2, "catenary band needs x0 > 0 and n >= 2");
    let dx = 2.0 * x0 / (n - 1) as f64;
    let w = (0..n).map(|i| (-x0 + dx * i as f64).cosh()).collect();
    GraphSamples::new(-x0, dx, w)
}
