use nalgebra::Vector2;

use super::GeometryError;

pub type Point = Vector2<f64>;

pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Counterclockwise: the outward normal points away from the enclosed region.
    Positive,
    Negative,
}

/// Closed polyline in the open upper half-plane. The last node connects back
/// to node 0; the closing node is not repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingCurve {
    nodes: Vec<Point>,
}

impl GeneratingCurve {
    /// Validates the nodes and stores them counterclockwise. A clockwise input
    /// is reversed with node 0 kept in place.
    pub fn new(mut nodes: Vec<Point>) -> Result<Self, GeometryError> {
        if nodes.len() < MIN_NODES {
            return Err(GeometryError::TooFewNodes(nodes.len()));
        }
        for (index, p) in nodes.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(GeometryError::NonFinite { index });
            }
            if p.y <= 0.0 {
                return Err(GeometryError::BelowAxis { index, x2: p.y });
            }
        }
        let n = nodes.len();
        if let Some(i) = (0..n).find(|&i| nodes[i] == nodes[(i + 1) % n]) {
            return Err(GeometryError::DegenerateEdge(i));
        }
        if super::shoelace_area(&nodes) < 0.0 {
            nodes[1..].reverse();
        }
        Ok(Self { nodes })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    /// Skips validation, for constructing invalid curves in tests.
    #[cfg(test)]
    pub(crate) fn from_nodes_unchecked(nodes: Vec<Point>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Point> {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn orientation(&self) -> Orientation {
        if super::shoelace_area(&self.nodes) >= 0.0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }

    /// Node following `i` (cyclic).
    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.nodes.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.nodes.len() - 1) % self.nodes.len()
    }

    /// Length of edge `i`, from node `i` to node `i + 1`.
    pub fn edge_length(&self, i: usize) -> f64 {
        (self.nodes[self.next(i)] - self.nodes[i]).norm()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.edge_length(i)).collect()
    }

    /// Polyline length.
    pub fn length(&self) -> f64 {
        (0..self.len()).map(|i| self.edge_length(i)).sum()
    }

    pub fn min_edge(&self) -> f64 {
        (0..self.len())
            .map(|i| self.edge_length(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimum height above the rotation axis.
    pub fn u_min(&self) -> f64 {
        self.nodes.iter().map(|p| p.y).fold(f64::INFINITY, f64::min)
    }

    pub fn u_max(&self) -> f64 {
        self.nodes.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Extreme values of x₁ over the nodes.
    pub fn x_range(&self) -> (f64, f64) {
        self.nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.x), hi.max(p.x))
        })
    }

    /// Diagonal of the bounding box.
    pub fn diameter(&self) -> f64 {
        let (x0, x1) = self.x_range();
        let (y0, y1) = (self.u_min(), self.u_max());
        (x1 - x0).hypot(y1 - y0)
    }

    /// Homothety about the origin; `factor` must be positive.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "scale factor must be positive");
        Self {
            nodes: self.nodes.iter().map(|p| p * factor).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize, ccw: bool) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64 * if ccw { 1.0 } else { -1.0 };
                Point::new(t.cos(), 3.0 + t.sin())
            })
            .collect()
    }

    #[test]
    fn clockwise_input_is_reversed_keeping_node_zero() {
        let cw = circle(32, false);
        let c = GeneratingCurve::new(cw.clone()).unwrap();
        assert_eq!(c.orientation(), Orientation::Positive);
        assert_eq!(c.nodes()[0], cw[0]);
        assert_eq!(c.nodes()[1], cw[31]);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert_eq!(
            GeneratingCurve::new(circle(8, true)),
            Err(GeometryError::TooFewNodes(8))
        );
        let mut below = circle(32, true);
        below[5].y = 0.0;
        assert!(matches!(
            GeneratingCurve::new(below),
            Err(GeometryError::BelowAxis { index: 5, .. })
        ));
        let mut dup = circle(32, true);
        dup[7] = dup[6];
        assert_eq!(GeneratingCurve::new(dup), Err(GeometryError::DegenerateEdge(6)));
    }
}
