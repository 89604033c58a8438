use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::flow::StepControl;
use crate::geometry::{CurvatureField, GeneratingCurve};
use crate::rescale::RESCALE_SAMPLES;
use crate::scenarios::{make_perturbed_torus, FourierMode, ScenarioError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub major_radius: f64,
    pub minor_radius: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default)]
    pub modes: Vec<FourierMode>,
}

fn default_nodes() -> usize {
    512
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<GeneratingCurve, ScenarioError> {
        make_perturbed_torus(self.major_radius, self.minor_radius, &self.modes, self.nodes)
    }
}

/// Step control as configured; thresholds are relative to the initial curve
/// unless given in absolute form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    /// eps_H as a fraction of max H(0).
    #[serde(default = "default_rel")]
    pub eps_h_relative: f64,
    /// eps_u as a fraction of min x₂(0).
    #[serde(default = "default_rel")]
    pub eps_u_relative: f64,
    #[serde(default = "default_remesh")]
    pub remesh_every: u32,
    #[serde(default)]
    pub max_steps: Option<u64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "default_sample_every")]
    pub sample_every: f64,
}

fn default_cfl() -> f64 {
    StepControl::DEFAULT_CFL
}
fn default_dt_max() -> f64 {
    StepControl::DEFAULT_DT_MAX
}
fn default_rel() -> f64 {
    StepControl::DEFAULT_RELATIVE_EPS
}
fn default_remesh() -> u32 {
    StepControl::DEFAULT_REMESH_EVERY
}
fn default_sample_every() -> f64 {
    0.01
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            cfl: default_cfl(),
            dt_max: default_dt_max(),
            eps_h_relative: default_rel(),
            eps_u_relative: default_rel(),
            remesh_every: default_remesh(),
            max_steps: None,
            t_end: None,
            sample_every: default_sample_every(),
        }
    }
}

impl FlowConfig {
    pub fn step_control(&self, initial: &GeneratingCurve) -> Result<StepControl, IoError> {
        let field = CurvatureField::compute(initial).map_err(|e| IoError::Config(e.to_string()))?;
        let ctl = StepControl {
            cfl: self.cfl,
            dt_max: self.dt_max,
            eps_h: self.eps_h_relative * field.h_max(),
            eps_u: self.eps_u_relative * initial.u_min(),
            remesh_every: self.remesh_every,
            max_steps: self.max_steps,
            t_end: self.t_end,
        };
        ctl.validate().map_err(|e| IoError::Config(e.to_string()))?;
        if !(self.sample_every > 0.0) {
            return Err(IoError::Config(format!(
                "flow.sample_every must be positive, got {}",
                self.sample_every
            )));
        }
        Ok(ctl)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Band half-width a; derived from the initial curve when absent.
    #[serde(default)]
    pub band_half_width: Option<f64>,
    /// Rescale window x₀; min(3, ã/2) when absent.
    #[serde(default)]
    pub rescale_window: Option<f64>,
    #[serde(default = "default_rescale_samples")]
    pub rescale_samples: usize,
    /// Flag threshold for max |A|² relative to its initial value.
    #[serde(default = "default_a2_multiple")]
    pub a2_growth_flag: f64,
}

fn default_rescale_samples() -> usize {
    RESCALE_SAMPLES
}
fn default_a2_multiple() -> f64 {
    10.0
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            band_half_width: None,
            rescale_window: None,
            rescale_samples: default_rescale_samples(),
            a2_growth_flag: default_a2_multiple(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| IoError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub major_radius: Vec<f64>,
    pub minor_radius: Vec<f64>,
    /// Perturbations to combine with every radius pair; the round torus if empty.
    #[serde(default)]
    pub perturbations: Vec<Vec<FourierMode>>,
}

/// A run configuration whose radii and perturbations are taken from a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: GridConfig,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| IoError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        Self::parse(&text)
    }

    /// One run configuration per cell, radii varying slowest.
    pub fn cells(&self) -> Vec<RunConfig> {
        let perturbations = if self.grid.perturbations.is_empty() {
            vec![Vec::new()]
        } else {
            self.grid.perturbations.clone()
        };
        let mut cells = Vec::new();
        for &major_radius in &self.grid.major_radius {
            for &minor_radius in &self.grid.minor_radius {
                for modes in &perturbations {
                    cells.push(RunConfig {
                        scenario: ScenarioConfig {
                            major_radius,
                            minor_radius,
                            nodes: self.nodes,
                            modes: modes.clone(),
                        },
                        flow: self.flow.clone(),
                        diagnostics: self.diagnostics.clone(),
                    });
                }
            }
        }
        cells
    }
}
