//! Discrete differential geometry of a closed generating curve in the upper
//! half-plane, revolved about the x₁-axis.
//!
//! The curve is stored counterclockwise so the outward normal is the tangent
//! rotated clockwise. The surface of revolution has principal curvatures `k`
//! (planar curvature of the profile) and `p = ⟨ν, e₂⟩ / x₂` (the parallel
//! circles).

mod curvature;
mod curve;
mod embedding;
mod graphs;
mod region;

pub use curvature::{
    compute_normals_and_k, mean_and_gauss, rotational_curvature, sign_identity_check,
    surface_area, surface_integral, CurvatureField, NormalsAndCurvature, SignIdentity,
    SIGN_IDENTITY_WINDOW,
};
pub use curve::{GeneratingCurve, Orientation, Point, MIN_NODES};
pub use embedding::{first_crossing, is_embedded, segments_intersect, Embedding};
pub use graphs::{decompose_graphs, vertical_section, GraphDecomposition, TRANSITION_TOL};
pub use region::{
    distance_to_polyline, enclosed_region_area, point_segment_distance, shoelace_area,
    winding_number, EnclosedRegion,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curve has {0} nodes, at least {MIN_NODES} required")]
    TooFewNodes(usize),
    #[error("node {index} has x2 = {x2}, the curve must lie strictly above the axis")]
    BelowAxis { index: usize, x2: f64 },
    #[error("node {index} is not finite")]
    NonFinite { index: usize },
    #[error("edge {0} has zero length")]
    DegenerateEdge(usize),
    #[error("pinch: node {index} has x2 = {x2} <= 0")]
    Pinch { index: usize, x2: f64 },
    #[error("graph structure violated: {0}")]
    GraphStructure(String),
    #[error("curve is not embedded: segments {0} and {1} intersect")]
    NotEmbedded(usize, usize),
}
