use std::f64::consts::PI;

use super::DiagnosticsError;
use crate::geometry::{CurvatureField, GeneratingCurve, GraphDecomposition};
use crate::spline::GraphSpline;

/// Midpoint cells used for the band integral.
pub const BAND_QUADRATURE_CELLS: usize = 4096;

/// Arc of the bottom graph over `(c − a, c + a)`, where `c` is the location
/// of the minimum height.
#[derive(Debug, Clone)]
pub struct Band {
    pub a: f64,
    pub center: f64,
    /// Minimum of the band's graph model.
    pub u_min: f64,
    pub node_ids: Vec<usize>,
    /// max |w′| at the two ends.
    pub boundary_slope: f64,
    /// max ⟨e₂, ν⟩ at the two ends (closest to zero).
    pub nu_e2_boundary: f64,
    pub end_slopes: [f64; 2],
    graph: GraphSpline,
}

impl Band {
    /// Cubic spline through the bottom nodes near the band.
    pub fn graph(&self) -> &GraphSpline {
        &self.graph
    }
}

/// Lowest point of the bottom graph, refined by a parabola through the
/// lowest node and its neighbours. Returns `(x₁, height)`.
pub fn locate_bottom_minimum(
    curve: &GeneratingCurve,
    decomposition: &GraphDecomposition,
) -> Result<(f64, f64), DiagnosticsError> {
    let ids = &decomposition.bottom_node_ids;
    if ids.len() < 3 {
        return Err(DiagnosticsError::BandTooNarrow(ids.len()));
    }
    let pts = curve.nodes();
    let k = (0..ids.len())
        .min_by(|&i, &j| pts[ids[i]].y.total_cmp(&pts[ids[j]].y))
        .unwrap();
    let k = k.clamp(1, ids.len() - 2);
    let (p0, p1, p2) = (pts[ids[k - 1]], pts[ids[k]], pts[ids[k + 1]]);
    let d01 = (p1.y - p0.y) / (p1.x - p0.x);
    let d12 = (p2.y - p1.y) / (p2.x - p1.x);
    let curv = (d12 - d01) / (p2.x - p0.x);
    if curv <= 0.0 {
        return Ok((p1.x, p1.y));
    }
    // vertex of the interpolating parabola
    let x = 0.5 * (p0.x + p1.x) - d01 / (2.0 * curv);
    let x = x.clamp(p0.x, p2.x);
    let y = p0.y + d01 * (x - p0.x) + curv * (x - p0.x) * (x - p1.x);
    Ok((x, y))
}

/// Half of the smaller distance from the bottom minimum to the extremes of x₁.
pub fn reference_half_width(
    curve: &GeneratingCurve,
    decomposition: &GraphDecomposition,
) -> Result<f64, DiagnosticsError> {
    let (c, _) = locate_bottom_minimum(curve, decomposition)?;
    Ok(0.5 * (c - decomposition.a).min(decomposition.b - c))
}

pub fn build_band(
    curve: &GeneratingCurve,
    decomposition: &GraphDecomposition,
    a: f64,
) -> Result<Band, DiagnosticsError> {
    if !(a > 0.0) {
        return Err(DiagnosticsError::InvalidHalfWidth(a));
    }
    let (c0, _) = locate_bottom_minimum(curve, decomposition)?;
    let pts = curve.nodes();
    let ids = &decomposition.bottom_node_ids;
    let xs_all: Vec<f64> = ids.iter().map(|&i| pts[i].x).collect();
    let (domain_lo, domain_hi) = (xs_all[0], *xs_all.last().unwrap());
    if c0 - a < domain_lo || c0 + a > domain_hi {
        return Err(DiagnosticsError::BandTooWide {
            lo: c0 - a,
            hi: c0 + a,
            domain_lo,
            domain_hi,
        });
    }
    // model the graph on the bottom nodes within 1.5a of the centre, plus a few more
    let first = xs_all
        .iter()
        .position(|&x| x >= c0 - 1.5 * a)
        .unwrap_or(0)
        .saturating_sub(3);
    let last = (xs_all.iter().rposition(|&x| x <= c0 + 1.5 * a).unwrap_or(ids.len() - 1) + 3)
        .min(ids.len() - 1);
    let xs = &xs_all[first..=last];
    let ys: Vec<f64> = ids[first..=last].iter().map(|&i| pts[i].y).collect();
    let graph = GraphSpline::new(xs, &ys).ok_or(DiagnosticsError::BandTooNarrow(xs.len()))?;

    // Newton polish of the minimum on the model
    let mut center = c0;
    for _ in 0..20 {
        let (_, d1, d2) = graph.eval3(center);
        if d2 <= 0.0 {
            break;
        }
        let next = center - d1 / d2;
        if (next - center).abs() < 1e-15 * (1.0 + center.abs()) {
            center = next;
            break;
        }
        center = next;
    }
    if (center - c0).abs() > 0.25 * a {
        center = c0;
    }
    let u_min = graph.value(center);
    if center - a < domain_lo || center + a > domain_hi {
        return Err(DiagnosticsError::BandTooWide {
            lo: center - a,
            hi: center + a,
            domain_lo,
            domain_hi,
        });
    }

    let node_ids = ids
        .iter()
        .copied()
        .filter(|&i| (pts[i].x - center).abs() < a)
        .collect();
    let end_slopes = [graph.eval3(center - a).1, graph.eval3(center + a).1];
    let boundary_slope = end_slopes[0].abs().max(end_slopes[1].abs());
    let nu_e2_boundary = end_slopes
        .iter()
        .map(|s| -1.0 / (1.0 + s * s).sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Band {
        a,
        center,
        u_min,
        node_ids,
        boundary_slope,
        nu_e2_boundary,
        end_slopes,
        graph,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandIntegral {
    /// ∫ |K| dμ over the revolved band.
    pub value: f64,
    /// 1 − value / 4π.
    pub eps_hat: f64,
    /// The same integral from the node curvature field, 2π Σ |K| u Δs.
    pub node_sum: f64,
    /// Band nodes where the discrete K is positive (expected negative).
    pub positive_k_nodes: usize,
}

/// 2π ∫ |K| u ds over the band, K = k·p evaluated on the band's graph model
/// by the midpoint rule; the node-field sum is reported alongside.
pub fn band_gauss_integral(
    band: &Band,
    curve: &GeneratingCurve,
    field: &CurvatureField,
) -> BandIntegral {
    let m = BAND_QUADRATURE_CELLS;
    let lo = band.center - band.a;
    let dx = 2.0 * band.a / m as f64;
    let mut total = 0.0;
    for j in 0..m {
        let x = lo + (j as f64 + 0.5) * dx;
        let (w, w1, w2) = band.graph.eval3(x);
        let v = (1.0 + w1 * w1).sqrt();
        let k = w2 / (v * v * v);
        let p = (-1.0 / v) / w;
        let ds = v * dx;
        total += (k * p).abs() * w * ds;
    }
    let value = 2.0 * PI * total;

    let n = curve.len();
    let pts = curve.nodes();
    let kmax = field.gauss.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let mut node_sum = 0.0;
    let mut positive_k_nodes = 0;
    for &i in &band.node_ids {
        let dual = 0.5 * (curve.edge_length(i) + curve.edge_length((i + n - 1) % n));
        node_sum += field.gauss[i].abs() * pts[i].y * dual;
        if field.gauss[i] > 1e-12 * kmax {
            positive_k_nodes += 1;
        }
    }
    BandIntegral {
        value,
        eps_hat: 1.0 - value / (4.0 * PI),
        node_sum: 2.0 * PI * node_sum,
        positive_k_nodes,
    }
}
