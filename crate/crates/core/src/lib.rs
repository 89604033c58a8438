//! Inverse mean curvature flow of rotationally symmetric tori.
//!
//! The torus is represented by its generating curve in the half-plane
//! `x₂ > 0`; the surface is the revolution of that curve about the x₁-axis.
//! [`flow`] evolves the curve with normal speed `1/H` until the mean
//! curvature degenerates, [`diagnostics`] and [`rescale`] evaluate the
//! curvature, energy and blow-up quantities along a run, and [`io`] drives
//! runs from configuration files and verifies stored results.

pub mod diagnostics;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod rescale;
pub mod scenarios;
pub mod spline;

pub use geometry::{CurvatureField, GeneratingCurve, Point};
