use std::f64::consts::PI;

use super::{GeneratingCurve, GeometryError, Point};

/// Outward unit normals and planar curvature at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalsAndCurvature {
    pub nu: Vec<Point>,
    pub k: Vec<f64>,
}

/// Per-node curvature data of the revolved surface.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub nu: Vec<Point>,
    /// Planar curvature of the profile, positive where it bends toward the
    /// enclosed region.
    pub k: Vec<f64>,
    /// Rotational principal curvature ⟨ν, e₂⟩ / x₂.
    pub p: Vec<f64>,
    pub h: Vec<f64>,
    pub gauss: Vec<f64>,
    /// |A|² = k² + p².
    pub a2: Vec<f64>,
}

/// Three-point circumscribed-circle curvature with the tangent of the
/// interpolating circle; both are second order on non-uniform spacing.
pub fn compute_normals_and_k(
    curve: &GeneratingCurve,
) -> Result<NormalsAndCurvature, GeometryError> {
    let pts = curve.nodes();
    let n = pts.len();
    let mut nu = Vec::with_capacity(n);
    let mut k = Vec::with_capacity(n);
    for i in 0..n {
        let prev = pts[(i + n - 1) % n];
        let next = pts[(i + 1) % n];
        let a = pts[i] - prev;
        let b = next - pts[i];
        let la = a.norm();
        let lb = b.norm();
        if la == 0.0 {
            return Err(GeometryError::DegenerateEdge((i + n - 1) % n));
        }
        if lb == 0.0 {
            return Err(GeometryError::DegenerateEdge(i));
        }
        let lc = (next - prev).norm();
        let cross = a.x * b.y - a.y * b.x;
        k.push(if lc == 0.0 { 0.0 } else { 2.0 * cross / (la * lb * lc) });
        let t = (a * (lb / la) + b * (la / lb)).normalize();
        nu.push(Point::new(t.y, -t.x));
    }
    Ok(NormalsAndCurvature { nu, k })
}

pub fn rotational_curvature(
    curve: &GeneratingCurve,
    nu: &[Point],
) -> Result<Vec<f64>, GeometryError> {
    curve
        .nodes()
        .iter()
        .zip(nu)
        .enumerate()
        .map(|(index, (x, n))| {
            if x.y <= 0.0 {
                Err(GeometryError::Pinch { index, x2: x.y })
            } else {
                Ok(n.y / x.y)
            }
        })
        .collect()
}

/// Assembles H = k + p, K = k·p and |A|² = k² + p².
pub fn mean_and_gauss(nu: Vec<Point>, k: Vec<f64>, p: Vec<f64>) -> CurvatureField {
    let h = k.iter().zip(&p).map(|(k, p)| k + p).collect();
    let gauss = k.iter().zip(&p).map(|(k, p)| k * p).collect();
    let a2 = k.iter().zip(&p).map(|(k, p)| k * k + p * p).collect();
    CurvatureField { nu, k, p, h, gauss, a2 }
}

impl CurvatureField {
    pub fn compute(curve: &GeneratingCurve) -> Result<Self, GeometryError> {
        let NormalsAndCurvature { nu, k } = compute_normals_and_k(curve)?;
        let p = rotational_curvature(curve, &nu)?;
        Ok(mean_and_gauss(nu, k, p))
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h_min(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        self.h.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn a2_max(&self) -> f64 {
        self.a2.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the node with the smallest mean curvature.
    pub fn argmin_h(&self) -> usize {
        (0..self.h.len())
            .min_by(|&i, &j| self.h[i].total_cmp(&self.h[j]))
            .unwrap_or(0)
    }
}

/// Area of the surface of revolution, 2π Σ ū·|e| over edges.
pub fn surface_area(curve: &GeneratingCurve) -> f64 {
    let pts = curve.nodes();
    let n = pts.len();
    2.0 * PI
        * (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                0.5 * (pts[i].y + pts[j].y) * (pts[j] - pts[i]).norm()
            })
            .sum::<f64>()
}

/// ∫ f dμ over the revolved surface for per-node values `f`, by the edge
/// midpoint rule on f·u.
pub fn surface_integral(curve: &GeneratingCurve, f: &[f64]) -> f64 {
    let pts = curve.nodes();
    let n = pts.len();
    2.0 * PI
        * (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                0.5 * (f[i] * pts[i].y + f[j] * pts[j].y) * (pts[j] - pts[i]).norm()
            })
            .sum::<f64>()
}

/// Nodes with |⟨ν, e₂⟩| below this take part in the sign-identity check.
pub const SIGN_IDENTITY_WINDOW: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SignIdentity {
    pub max_residual: f64,
    pub checked: Vec<usize>,
}

/// Compares the arc derivative of ⟨e₂, ν⟩ with k·⟨∂ₛ, e₂⟩ (which is ±k where
/// ⟨e₂, ν⟩ vanishes) near the points with horizontal normal.
pub fn sign_identity_check(curve: &GeneratingCurve, field: &CurvatureField) -> SignIdentity {
    let pts = curve.nodes();
    let n = pts.len();
    let mut max_residual = 0.0f64;
    let mut checked = Vec::new();
    for i in 0..n {
        if field.nu[i].y.abs() >= SIGN_IDENTITY_WINDOW {
            continue;
        }
        let ip = (i + n - 1) % n;
        let inx = (i + 1) % n;
        let ha = (pts[i] - pts[ip]).norm();
        let hb = (pts[inx] - pts[i]).norm();
        let f = |j: usize| field.nu[j].y;
        let deriv = -hb / (ha * (ha + hb)) * f(ip)
            + (hb - ha) / (ha * hb) * f(i)
            + ha / (hb * (ha + hb)) * f(inx);
        // tangent is ν rotated counterclockwise, so ⟨∂ₛ, e₂⟩ = ν₁
        let expected = field.k[i] * field.nu[i].x;
        max_residual = max_residual.max((deriv - expected).abs());
        checked.push(i);
    }
    SignIdentity { max_residual, checked }
}
