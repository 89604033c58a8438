use super::DiagnosticsError;
use crate::flow::checked_decomposition;
use crate::geometry::{
    distance_to_polyline, is_embedded, point_segment_distance, GeneratingCurve, Point,
};

/// Symmetric Hausdorff distance between two closed polylines, measured from
/// the nodes of each to the segments of the other.
pub fn hausdorff_distance(a: &GeneratingCurve, b: &GeneratingCurve) -> f64 {
    let one_sided = |from: &GeneratingCurve, to: &GeneratingCurve| {
        from.nodes()
            .iter()
            .map(|&q| distance_to_polyline(to.nodes(), q))
            .fold(0.0f64, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitMonitor {
    pub times: Vec<f64>,
    /// Hausdorff distance between each snapshot and the one before it.
    pub distances: Vec<f64>,
    pub decreasing: bool,
    /// Estimate of the curve at the stopping time.
    pub limit: GeneratingCurve,
    pub limit_embedded: bool,
    pub limit_decomposes: bool,
    pub warning: Option<String>,
}

fn closest_point_on(curve: &GeneratingCurve, q: Point) -> Point {
    let pts = curve.nodes();
    let n = pts.len();
    let mut best = (f64::INFINITY, q);
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let d = point_segment_distance(q, a, b);
        if d < best.0 {
            let ab = b - a;
            let t = ((q - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
            best = (d, a + ab * t);
        }
    }
    best.1
}

/// Distances between successive snapshots taken in the last 5% of the flow
/// time up to `t_final`, and a geometric extrapolation of the last snapshot
/// towards the limit curve.
pub fn limit_curve_monitor(
    snapshots: &[(f64, &GeneratingCurve)],
    t_final: f64,
) -> Result<LimitMonitor, DiagnosticsError> {
    let tail: Vec<(f64, &GeneratingCurve)> = snapshots
        .iter()
        .copied()
        .filter(|(t, _)| *t >= 0.95 * t_final)
        .collect();
    if tail.len() < 3 {
        return Err(DiagnosticsError::InsufficientSnapshots(format!(
            "{} snapshots in the last 5% of flow time (t >= {:.6}); at least 3 required",
            tail.len(),
            0.95 * t_final
        )));
    }
    let distances: Vec<f64> = tail
        .windows(2)
        .map(|w| hausdorff_distance(w[0].1, w[1].1))
        .collect();
    let decreasing = distances.windows(2).all(|d| d[1] < d[0]);
    let warning = (!decreasing).then(|| "no convergence detected".to_string());

    let (_, last) = tail[tail.len() - 1];
    let (_, prev) = tail[tail.len() - 2];
    let (d_prev, d_last) = (distances[distances.len() - 2], distances[distances.len() - 1]);
    let q = if d_prev > 0.0 { d_last / d_prev } else { 1.0 };
    let limit = if decreasing && q < 1.0 {
        let factor = q / (1.0 - q);
        let nodes = last
            .nodes()
            .iter()
            .map(|&x| x + (x - closest_point_on(prev, x)) * factor)
            .collect();
        GeneratingCurve::new(nodes)?
    } else {
        last.clone()
    };
    let limit_embedded = is_embedded(&limit).is_embedded();
    let limit_decomposes = checked_decomposition(&limit).is_ok();
    Ok(LimitMonitor {
        times: tail.iter().map(|(t, _)| *t).collect(),
        distances,
        decreasing,
        limit,
        limit_embedded,
        limit_decomposes,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::make_round_torus;

    fn circle(r: f64, n: usize) -> GeneratingCurve {
        GeneratingCurve::new(
            (0..n)
                .map(|i| {
                    let s = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    Point::new(r * s.cos(), 4.0 + r * s.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_curves_have_zero_distance() {
        let c = make_round_torus(3.0, 1.0, 64).unwrap();
        assert_eq!(hausdorff_distance(&c, &c), 0.0);
    }

    #[test]
    fn concentric_circles() {
        let d = hausdorff_distance(&circle(1.0, 256), &circle(1.2, 256));
        assert!((d - 0.2).abs() < 1e-3);
    }

    #[test]
    fn geometric_sequence_extrapolates_to_limit() {
        // radii 2 − 2^{-k}: distances halve and the limit is the radius-2 circle
        let curves: Vec<GeneratingCurve> =
            (1..=5).map(|k| circle(2.0 - 0.5f64.powi(k), 256)).collect();
        let snaps: Vec<(f64, &GeneratingCurve)> = curves
            .iter()
            .enumerate()
            .map(|(k, c)| (0.96 + 0.01 * k as f64, c))
            .collect();
        let m = limit_curve_monitor(&snaps, 1.0).unwrap();
        assert!(m.decreasing && m.warning.is_none());
        assert_eq!(m.distances.len(), 4);
        for p in m.limit.nodes() {
            assert!(((p - Point::new(0.0, 4.0)).norm() - 2.0).abs() < 1e-3);
        }
        assert!(m.limit_embedded && m.limit_decomposes);
    }

    #[test]
    fn stalled_sequence_warns() {
        let curves: Vec<GeneratingCurve> =
            [1.0, 1.1, 1.15, 1.3].iter().map(|&r| circle(r, 64)).collect();
        let snaps: Vec<(f64, &GeneratingCurve)> =
            curves.iter().enumerate().map(|(k, c)| (0.97 + 0.01 * k as f64, c)).collect();
        let m = limit_curve_monitor(&snaps, 1.0).unwrap();
        assert!(!m.decreasing);
        assert_eq!(m.warning.as_deref(), Some("no convergence detected"));
        assert_eq!(&m.limit, curves.last().unwrap());
    }

    #[test]
    fn needs_three_late_snapshots() {
        let c = circle(1.0, 64);
        let snaps = [(0.1, &c), (0.5, &c), (0.99, &c), (1.0, &c)];
        assert!(matches!(
            limit_curve_monitor(&snaps, 1.0),
            Err(DiagnosticsError::InsufficientSnapshots(_))
        ));
    }
}
