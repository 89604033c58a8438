use robust::{orient2d, Coord};

use super::{GeneratingCurve, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    Embedded,
    /// First pair of non-adjacent intersecting edges found by the sweep,
    /// as edge indices `(i, j)` with `i < j`.
    Crossing(usize, usize),
}

impl Embedding {
    pub fn is_embedded(&self) -> bool {
        matches!(self, Embedding::Embedded)
    }
}

fn coord(p: Point) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Sign of the exact orientation determinant.
fn orient(a: Point, b: Point, c: Point) -> i8 {
    let d = orient2d(coord(a), coord(b), coord(c));
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test with exact orientation predicates;
/// touching and collinear overlap count as intersecting.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, q2, p1))
        || (d2 == 0 && on_segment(q1, q2, p2))
        || (d3 == 0 && on_segment(p1, p2, q1))
        || (d4 == 0 && on_segment(p1, p2, q2))
}

/// Sweep over edges sorted by their left end; only edges whose x-extents
/// overlap are tested. Edges sharing a node are skipped.
pub fn first_crossing(points: &[Point]) -> Option<(usize, usize)> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let edge = |i: usize| (points[i], points[(i + 1) % n]);
    let mut order: Vec<usize> = (0..n).collect();
    let min_x = |i: usize| {
        let (a, b) = edge(i);
        a.x.min(b.x)
    };
    let max_x = |i: usize| {
        let (a, b) = edge(i);
        a.x.max(b.x)
    };
    order.sort_by(|&i, &j| min_x(i).total_cmp(&min_x(j)).then(i.cmp(&j)));
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let left = min_x(i);
        active.retain(|&j| max_x(j) >= left);
        let (a, b) = edge(i);
        for &j in &active {
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                continue;
            }
            let (c, d) = edge(j);
            if segments_intersect(a, b, c, d) {
                return Some((i.min(j), i.max(j)));
            }
        }
        active.push(i);
    }
    None
}

pub fn is_embedded(curve: &GeneratingCurve) -> Embedding {
    match first_crossing(curve.nodes()) {
        None => Embedding::Embedded,
        Some((i, j)) => Embedding::Crossing(i, j),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn brute_force(points: &[Point]) -> bool {
        let n = points.len();
        for i in 0..n {
            for j in i + 1..n {
                if (i + 1) % n == j || (j + 1) % n == i {
                    continue;
                }
                if segments_intersect(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]) {
                    return false;
                }
            }
        }
        true
    }

    fn circle(n: usize) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Point::new(t.cos(), 3.0 + t.sin())
            })
            .collect()
    }

    #[test]
    fn circle_is_embedded() {
        let c = GeneratingCurve::new(circle(128)).unwrap();
        assert_eq!(is_embedded(&c), Embedding::Embedded);
    }

    #[test]
    fn figure_eight_reports_crossing() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / 40.0;
                Point::new(t.sin(), 3.0 + t.sin() * t.cos())
            })
            .collect();
        let c = GeneratingCurve::from_nodes_unchecked(pts.clone());
        match is_embedded(&c) {
            Embedding::Crossing(i, j) => {
                let n = pts.len();
                assert!(segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]));
            }
            Embedding::Embedded => panic!("figure eight must cross"),
        }
        assert!(!brute_force(&pts));
    }

    #[test]
    fn nested_graphs_are_embedded() {
        // bottom w(x) = 2 + x², top v(x) = 4 - x², closed over [-1, 1]
        let m = 30;
        let mut pts = Vec::new();
        for i in 0..m {
            let x = -1.0 + 2.0 * i as f64 / m as f64;
            pts.push(Point::new(x, 2.0 + x * x * 0.5));
        }
        for i in 0..m {
            let x = 1.0 - 2.0 * i as f64 / m as f64;
            pts.push(Point::new(x, 4.0 - x * x * 0.5));
        }
        assert_eq!(first_crossing(&pts), None);
        assert!(brute_force(&pts));
    }

    #[test]
    fn touching_and_collinear_segments() {
        let p = |x: f64, y: f64| Point::new(x, y);
        assert!(segments_intersect(p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.0), p(0.5, 1.0)));
        assert!(segments_intersect(p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.0), p(2.0, 0.0)));
        assert!(!segments_intersect(p(0.0, 0.0), p(1.0, 0.0), p(1.5, 0.0), p(2.0, 0.0)));
        assert!(!segments_intersect(p(0.0, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(0.4, 0.6)));
    }

    proptest! {
        #[test]
        fn sweep_agrees_with_brute_force(
            radii in proptest::collection::vec(0.3f64..1.5, 16..40),
            jitter in proptest::collection::vec(-0.3f64..0.3, 40),
        ) {
            let n = radii.len();
            let pts: Vec<Point> = (0..n)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / n as f64 + jitter[i] * 2.0 * PI / n as f64 * 3.0;
                    Point::new(radii[i] * t.cos(), 3.0 + radii[i] * t.sin())
                })
                .collect();
            prop_assert_eq!(first_crossing(&pts).is_none(), brute_force(&pts));
        }
    }
}
