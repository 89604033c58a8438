use super::DiagnosticsError;
use crate::flow::FlowState;
use crate::geometry::{CurvatureField, GeneratingCurve};

/// Right-hand side of ∂ₜH = ΔH/H² − |A|²/H − 2|∇H|²/H³ with the
/// axisymmetric Laplacian ΔH = H_ss + (u_s/u) H_s.
pub fn h_evolution_rhs(h: f64, h_s: f64, h_ss: f64, u_s_over_u: f64, a2: f64) -> f64 {
    (h_ss + u_s_over_u * h_s) / (h * h) - a2 / h - 2.0 * h_s * h_s / (h * h * h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResidual {
    /// Residual per node; NaN where the node was excluded.
    pub per_node: Vec<f64>,
    /// Max |residual| over nodes with H > 0.1 max H.
    pub max: f64,
    pub considered: usize,
}

/// First and second arc-length derivatives by the three-point stencil on
/// non-uniform spacing.
fn arc_derivatives(hm: f64, hp: f64, fm: f64, f0: f64, fp: f64) -> (f64, f64) {
    let d1 = (hm * hm * (fp - f0) + hp * hp * (f0 - fm)) / (hm * hp * (hm + hp));
    let d2 = 2.0 * (hm * (fp - f0) - hp * (f0 - fm)) / (hm * hp * (hm + hp));
    (d1, d2)
}

/// Residual of the evolution equation for H between two states with node
/// correspondence, using the data of `before` for the spatial terms.
pub fn h_evolution_residual_curves(
    before: &GeneratingCurve,
    after: &GeneratingCurve,
    dt: f64,
) -> Result<EvolutionResidual, DiagnosticsError> {
    if before.len() != after.len() {
        return Err(DiagnosticsError::CorrespondenceLost);
    }
    let f0 = CurvatureField::compute(before)?;
    let f1 = CurvatureField::compute(after)?;
    let n = before.len();
    let pts = before.nodes();
    let threshold = 0.1 * f0.h_max();
    let mut per_node = vec![f64::NAN; n];
    let mut max = 0.0f64;
    let mut considered = 0;
    for i in 0..n {
        if f0.h[i] <= threshold {
            continue;
        }
        let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
        let hm = (pts[i] - pts[im]).norm();
        let hp = (pts[ip] - pts[i]).norm();
        let (h_s, h_ss) = arc_derivatives(hm, hp, f0.h[im], f0.h[i], f0.h[ip]);
        // u_s = ⟨∂s, e₂⟩ = ⟨ν, e₁⟩ for the outward normal of a positive curve
        let u_s_over_u = f0.nu[i].x / pts[i].y;
        let rhs = h_evolution_rhs(f0.h[i], h_s, h_ss, u_s_over_u, f0.a2[i]);
        let r = (f1.h[i] - f0.h[i]) / dt - rhs;
        per_node[i] = r;
        max = max.max(r.abs());
        considered += 1;
    }
    Ok(EvolutionResidual {
        per_node,
        max,
        considered,
    })
}

/// As [`h_evolution_residual_curves`], refusing states separated by a remesh.
pub fn h_evolution_residual(
    before: &FlowState,
    after: &FlowState,
    dt: f64,
) -> Result<EvolutionResidual, DiagnosticsError> {
    if before.mesh_epoch != after.mesh_epoch {
        return Err(DiagnosticsError::CorrespondenceLost);
    }
    h_evolution_residual_curves(&before.curve, &after.curve, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{euler_nodes, remesh, FlowState};
    use crate::scenarios::make_round_torus;

    fn advanced(c: &GeneratingCurve, dt: f64) -> GeneratingCurve {
        let f = CurvatureField::compute(c).unwrap();
        GeneratingCurve::new(euler_nodes(c, &f, dt)).unwrap()
    }

    #[test]
    fn stencil_is_exact_on_quadratics() {
        let f = |s: f64| 1.0 + 2.0 * s + 3.0 * s * s;
        let (hm, hp) = (0.3, 0.1);
        let (d1, d2) = arc_derivatives(hm, hp, f(-hm), f(0.0), f(hp));
        assert!((d1 - 2.0).abs() < 1e-12);
        assert!((d2 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn torus_side_node_matches_analytic_rate() {
        let c = make_round_torus(3.0, 1.0, 512).unwrap();
        let dt = 1e-4;
        let res = h_evolution_residual_curves(&c, &advanced(&c, dt), dt).unwrap();
        let side = 3 * 512 / 4;
        assert!(res.per_node[side].abs() < 1e-2, "{}", res.per_node[side]);
        assert!(res.max < 1e-2, "{}", res.max);
        assert!(res.considered == 512);
    }

    #[test]
    fn residual_decreases_under_refinement() {
        let coarse = {
            let c = make_round_torus(3.0, 1.0, 256).unwrap();
            h_evolution_residual_curves(&c, &advanced(&c, 4e-4), 4e-4).unwrap().max
        };
        let fine = {
            let c = make_round_torus(3.0, 1.0, 512).unwrap();
            h_evolution_residual_curves(&c, &advanced(&c, 1e-4), 1e-4).unwrap().max
        };
        assert!(fine < coarse);
    }

    #[test]
    fn sphere_like_data_reduces_to_zeroth_order_term() {
        // sphere of radius ρ₀e^{t/2}: p = k, H = 2/ρ, |A|² = H²/2, no gradients
        let rho0: f64 = 1.5;
        let h = |t: f64| 2.0 / (rho0 * (0.5 * t).exp());
        let dt = 1e-6;
        let fd = (h(dt) - h(0.0)) / dt;
        let rhs = h_evolution_rhs(h(0.0), 0.0, 0.0, 0.7, 0.5 * h(0.0) * h(0.0));
        assert!((rhs + 0.5 * h(0.0)).abs() < 1e-15);
        assert!((fd - rhs).abs() < 1e-6);
    }

    #[test]
    fn remesh_breaks_correspondence() {
        let c = make_round_torus(3.0, 1.0, 64).unwrap();
        let a = FlowState::new(c.clone());
        let mut b = FlowState::new(remesh(&advanced(&c, 1e-4)).unwrap());
        b.mesh_epoch = 1;
        assert_eq!(
            h_evolution_residual(&a, &b, 1e-4),
            Err(DiagnosticsError::CorrespondenceLost)
        );
    }
}
