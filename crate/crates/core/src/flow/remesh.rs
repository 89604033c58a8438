use super::FlowError;
use crate::geometry::{is_embedded, Embedding, GeneratingCurve, Point};
use crate::spline::ClosedSpline;

const NEWTON_ITERATIONS: usize = 8;

/// Redistributes the nodes uniformly in arc length along the periodic cubic
/// spline through them. Node 0 stays fixed and the node count is unchanged.
pub fn remesh(curve: &GeneratingCurve) -> Result<GeneratingCurve, FlowError> {
    let n = curve.len();
    let spline = ClosedSpline::new(curve.nodes());
    let seg_len: Vec<f64> = (0..n)
        .map(|i| spline.arc_length(i, spline.segment_param_length(i)))
        .collect();
    let total: f64 = seg_len.iter().sum();
    let spacing = total / n as f64;

    let mut nodes = Vec::with_capacity(n);
    nodes.push(curve.nodes()[0]);
    let mut seg = 0;
    let mut start = 0.0;
    for j in 1..n {
        let target = j as f64 * spacing;
        while seg + 1 < n && start + seg_len[seg] < target {
            start += seg_len[seg];
            seg += 1;
        }
        let p = point_at_arc_length(&spline, seg, target - start, seg_len[seg]);
        if !(p.y > 0.0) {
            return Err(FlowError::RemeshPinch { index: j, x2: p.y });
        }
        nodes.push(p);
    }
    let out = GeneratingCurve::new(nodes)?;
    if let Embedding::Crossing(i, j) = is_embedded(&out) {
        return Err(FlowError::RemeshCrossing(i, j));
    }
    Ok(out)
}

/// Point at arc length `sigma` from the start of segment `i`, by Newton
/// iteration on the local spline parameter.
fn point_at_arc_length(spline: &ClosedSpline, i: usize, sigma: f64, seg_len: f64) -> Point {
    let h = spline.segment_param_length(i);
    let sigma = sigma.clamp(0.0, seg_len);
    let mut tau = h * sigma / seg_len;
    for _ in 0..NEWTON_ITERATIONS {
        let speed = spline.derivative(i, tau).norm();
        let step = (spline.arc_length(i, tau) - sigma) / speed;
        tau = (tau - step).clamp(0.0, h);
        if step.abs() <= 1e-15 * h {
            break;
        }
    }
    spline.eval(i, tau)
}

/// Length of the periodic spline through the nodes.
pub fn smooth_length(curve: &GeneratingCurve) -> f64 {
    ClosedSpline::new(curve.nodes()).total_length()
}
