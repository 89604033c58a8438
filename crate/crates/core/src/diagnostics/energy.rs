use crate::geometry::{surface_area, surface_integral, CurvatureField, GeneratingCurve};

/// Bounds on the curvature energies fixed by the initial surface N₀ of a
/// torus: ∫H² ≤ sup H²·|N₀| and ∫|A|² ≤ 3 sup H²·|N₀| − 2πχ with χ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBounds {
    pub willmore: f64,
    pub l2a: f64,
}

impl EnergyBounds {
    pub fn from_initial(curve: &GeneratingCurve, field: &CurvatureField) -> Self {
        let sup_h = field.h.iter().fold(0.0f64, |m, h| m.max(h.abs()));
        let area = surface_area(curve);
        let willmore = sup_h * sup_h * area;
        Self {
            willmore,
            l2a: 3.0 * willmore,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySuite {
    /// ∫H² dμ
    pub willmore: f64,
    /// ∫|A|² dμ
    pub l2a: f64,
    /// ∫K dμ
    pub gauss_integral: f64,
    /// |∫K dμ|, zero for a torus.
    pub gauss_bonnet_residual: f64,
    pub bounds: EnergyBounds,
}

impl EnergySuite {
    pub fn willmore_margin(&self) -> f64 {
        self.bounds.willmore - self.willmore
    }

    pub fn l2a_margin(&self) -> f64 {
        self.bounds.l2a - self.l2a
    }
}

pub fn energy_suite(
    curve: &GeneratingCurve,
    field: &CurvatureField,
    bounds: EnergyBounds,
) -> EnergySuite {
    let h2: Vec<f64> = field.h.iter().map(|h| h * h).collect();
    let willmore = surface_integral(curve, &h2);
    let l2a = surface_integral(curve, &field.a2);
    let gauss_integral = surface_integral(curve, &field.gauss);
    EnergySuite {
        willmore,
        l2a,
        gauss_integral,
        gauss_bonnet_residual: gauss_integral.abs(),
        bounds,
    }
}
