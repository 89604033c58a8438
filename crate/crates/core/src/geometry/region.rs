use super::{is_embedded, Embedding, GeneratingCurve, GeometryError, Point};

/// Signed polygon area (shoelace); positive for counterclockwise order.
pub fn shoelace_area(points: &[Point]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            a.x * b.y - a.y * b.x
        })
        .sum::<f64>()
}

/// Winding number of the closed polyline around `q`.
pub fn winding_number(points: &[Point], q: Point) -> i32 {
    let n = points.len();
    let mut wn = 0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let side = (b.x - a.x) * (q.y - a.y) - (q.x - a.x) * (b.y - a.y);
        if a.y <= q.y {
            if b.y > q.y && side > 0.0 {
                wn += 1;
            }
        } else if b.y <= q.y && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

pub fn point_segment_distance(q: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (q - a).norm();
    }
    let t = ((q - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (q - (a + ab * t)).norm()
}

pub fn distance_to_polyline(points: &[Point], q: Point) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| point_segment_distance(q, points[i], points[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Open region enclosed by an embedded generating curve.
#[derive(Debug, Clone, Copy)]
pub struct EnclosedRegion<'a> {
    curve: &'a GeneratingCurve,
    signed_area: f64,
}

impl<'a> EnclosedRegion<'a> {
    pub fn new(curve: &'a GeneratingCurve) -> Result<Self, GeometryError> {
        if let Embedding::Crossing(i, j) = is_embedded(curve) {
            return Err(GeometryError::NotEmbedded(i, j));
        }
        Ok(Self {
            curve,
            signed_area: shoelace_area(curve.nodes()),
        })
    }

    pub fn curve(&self) -> &GeneratingCurve {
        self.curve
    }

    pub fn signed_area(&self) -> f64 {
        self.signed_area
    }

    pub fn contains(&self, q: Point) -> bool {
        winding_number(self.curve.nodes(), q) != 0
    }

    /// Inside, or within `tol` of the boundary.
    pub fn contains_with_tolerance(&self, q: Point, tol: f64) -> bool {
        self.contains(q) || distance_to_polyline(self.curve.nodes(), q) <= tol
    }
}

pub fn enclosed_region_area(curve: &GeneratingCurve) -> Result<f64, GeometryError> {
    EnclosedRegion::new(curve).map(|r| r.signed_area())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize, r: f64) -> GeneratingCurve {
        GeneratingCurve::new(
            (0..n)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / n as f64;
                    Point::new(r * t.cos(), 3.0 + r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn unit_circle_region() {
        let c = circle(2048, 1.0);
        let region = EnclosedRegion::new(&c).unwrap();
        assert!((region.signed_area() - PI).abs() < 1e-5);
        assert!(region.contains(Point::new(0.0, 3.0)));
        assert!(!region.contains(Point::new(0.0, 3.0 + 1.001)));
    }

    #[test]
    fn non_embedded_input_is_rejected() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / 40.0;
                Point::new(t.sin(), 3.0 + t.sin() * t.cos())
            })
            .collect();
        let c = GeneratingCurve::from_nodes_unchecked(pts);
        assert!(matches!(
            enclosed_region_area(&c),
            Err(GeometryError::NotEmbedded(_, _))
        ));
    }

    #[test]
    fn tolerance_admits_boundary_points() {
        let c = circle(64, 1.0);
        let region = EnclosedRegion::new(&c).unwrap();
        let node = c.nodes()[3];
        assert!(region.contains_with_tolerance(node, 1e-12));
        let outside = node + (node - Point::new(0.0, 3.0)) * 0.01;
        assert!(!region.contains_with_tolerance(outside, 1e-12));
    }
}
