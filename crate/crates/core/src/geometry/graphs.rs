use super::{GeneratingCurve, GeometryError, Point};

/// Nodes with |⟨ν, e₂⟩| below this are assigned to the side of their neighbours.
pub const TRANSITION_TOL: f64 = 1e-9;

/// The profile as a lower graph `w` and an upper graph `v` over `(a, b)`,
/// both sampled on a shared uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDecomposition {
    pub a: f64,
    pub b: f64,
    pub grid: Vec<f64>,
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
    /// Bottom nodes (⟨ν, e₂⟩ < 0) in traversal order, i.e. increasing x₁.
    pub bottom_node_ids: Vec<usize>,
    /// Top nodes in traversal order, i.e. decreasing x₁.
    pub top_node_ids: Vec<usize>,
}

impl GraphDecomposition {
    pub fn tol_convex(&self) -> f64 {
        1e-6 * (self.b - self.a)
    }

    /// Smallest second difference of the sampled bottom graph.
    pub fn min_second_difference(&self) -> f64 {
        self.bottom
            .windows(3)
            .map(|w| w[0] - 2.0 * w[1] + w[2])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_convex(&self) -> bool {
        self.min_second_difference() >= -self.tol_convex()
    }

    /// Sorted union of the bottom and top node sets.
    pub fn reassemble(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .bottom_node_ids
            .iter()
            .chain(&self.top_node_ids)
            .copied()
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Checks the convexity of the bottom graph on top of the structural
    /// conditions already enforced by [`decompose_graphs`].
    pub fn check_invariants(&self) -> Result<(), GeometryError> {
        if !self.is_convex() {
            return Err(GeometryError::GraphStructure(format!(
                "bottom graph not convex: second difference {:.3e}",
                self.min_second_difference()
            )));
        }
        Ok(())
    }
}

/// Heights where the vertical line x₁ = `x` crosses the closed polyline,
/// sorted ascending. Edges are treated as half-open so shared vertices are
/// counted once.
pub fn vertical_section(points: &[Point], x: f64) -> Vec<f64> {
    let n = points.len();
    let mut ys = Vec::with_capacity(2);
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        if (p.x <= x && x < q.x) || (q.x <= x && x < p.x) {
            let t = (x - p.x) / (q.x - p.x);
            ys.push(p.y + t * (q.y - p.y));
        }
    }
    ys.sort_by(f64::total_cmp);
    ys
}

fn side_signs(nu: &[Point]) -> Vec<i8> {
    let n = nu.len();
    let raw: Vec<i8> = nu
        .iter()
        .map(|v| {
            if v.y.abs() < TRANSITION_TOL {
                0
            } else if v.y < 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();
    (0..n)
        .map(|i| {
            if raw[i] != 0 {
                return raw[i];
            }
            let back = (1..n).map(|d| raw[(i + n - d) % n]).find(|&s| s != 0);
            let fwd = (1..n).map(|d| raw[(i + d) % n]).find(|&s| s != 0);
            match (back, fwd) {
                (Some(s), _) => s,
                (None, Some(s)) => s,
                (None, None) => 0,
            }
        })
        .collect()
}

/// Splits the profile by the sign of ⟨ν, e₂⟩ and samples both graphs.
pub fn decompose_graphs(
    curve: &GeneratingCurve,
    nu: &[Point],
) -> Result<GraphDecomposition, GeometryError> {
    let n = curve.len();
    let signs = side_signs(nu);
    let transitions: Vec<usize> = (0..n).filter(|&i| signs[i] != signs[(i + 1) % n]).collect();
    if transitions.len() != 2 {
        return Err(GeometryError::GraphStructure(format!(
            "expected 2 sign changes of <nu,e2>, found {}",
            transitions.len()
        )));
    }
    let arc = |start: usize| -> Vec<usize> {
        let mut ids = Vec::new();
        let mut i = (start + 1) % n;
        let s = signs[i];
        while signs[i] == s {
            ids.push(i);
            i = (i + 1) % n;
            if ids.len() == n {
                break;
            }
        }
        ids
    };
    let first = arc(transitions[0]);
    let second = arc(transitions[1]);
    let (bottom_node_ids, top_node_ids) = if signs[first[0]] < 0 {
        (first, second)
    } else {
        (second, first)
    };

    let (a, b) = curve.x_range();
    let m = n;
    let mut grid = Vec::with_capacity(m);
    let mut bottom = Vec::with_capacity(m);
    let mut top = Vec::with_capacity(m);
    for j in 0..m {
        let x = a + (b - a) * (j + 1) as f64 / (m + 1) as f64;
        let ys = vertical_section(curve.nodes(), x);
        if ys.len() != 2 {
            return Err(GeometryError::GraphStructure(format!(
                "vertical line x1 = {x} meets the curve {} times",
                ys.len()
            )));
        }
        if ys[0] >= ys[1] {
            return Err(GeometryError::GraphStructure(format!(
                "graphs touch at x1 = {x}"
            )));
        }
        grid.push(x);
        bottom.push(ys[0]);
        top.push(ys[1]);
    }
    Ok(GraphDecomposition {
        a,
        b,
        grid,
        bottom,
        top,
        bottom_node_ids,
        top_node_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compute_normals_and_k;
    use std::f64::consts::PI;

    fn torus(big_r: f64, r: f64, n: usize) -> GeneratingCurve {
        GeneratingCurve::new(
            (0..n)
                .map(|i| {
                    let phi = -2.0 * PI * i as f64 / n as f64;
                    Point::new(r * phi.sin(), big_r + r * phi.cos())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn round_torus_splits_into_semicircles() {
        let n = 512;
        let c = torus(3.0, 1.0, n);
        let nk = compute_normals_and_k(&c).unwrap();
        let g = decompose_graphs(&c, &nk.nu).unwrap();
        assert!((g.a + 1.0).abs() < 1e-12 && (g.b - 1.0).abs() < 1e-12);
        let mid = g.grid.len() / 2;
        let x = g.grid[mid];
        let exact_w = 3.0 - (1.0 - x * x).sqrt();
        let exact_v = 3.0 + (1.0 - x * x).sqrt();
        assert!((g.bottom[mid] - exact_w).abs() < 1e-4);
        assert!((g.top[mid] - exact_v).abs() < 1e-4);
        assert!(g.bottom_node_ids.contains(&(n / 2)));
        assert!(g.top_node_ids.contains(&0));
        assert!(g.is_convex());
        assert_eq!(g.reassemble(), (0..n).collect::<Vec<_>>());
        for &i in &g.bottom_node_ids {
            assert!(nk.nu[i].y < TRANSITION_TOL);
        }
        // bottom arc runs left to right
        let xs: Vec<f64> = g.bottom_node_ids.iter().map(|&i| c.nodes()[i].x).collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
        assert!(g.bottom.iter().zip(&g.top).all(|(w, v)| w < v));
    }

    #[test]
    fn symmetric_curve_transitions_at_extremes() {
        let n = 64;
        let c = torus(5.0, 2.0, n);
        let nk = compute_normals_and_k(&c).unwrap();
        let g = decompose_graphs(&c, &nk.nu).unwrap();
        // node n/4 (leftmost) and 3n/4 (rightmost) have nu_y = 0 and sit at the arc ends
        let ends = [
            *g.bottom_node_ids.first().unwrap(),
            *g.bottom_node_ids.last().unwrap(),
            *g.top_node_ids.first().unwrap(),
            *g.top_node_ids.last().unwrap(),
        ];
        for i in ends {
            assert!(i.abs_diff(n / 4) <= 1 || i.abs_diff(3 * n / 4) <= 1, "arc end {i}");
        }
    }

    #[test]
    fn too_many_sign_changes_is_rejected() {
        // a wavy bottom makes <nu,e2> change sign several times
        let n = 200;
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                let rho = 1.0 + 0.3 * (6.0 * t).cos();
                Point::new(rho * t.cos(), 4.0 + rho * t.sin())
            })
            .collect();
        let c = GeneratingCurve::new(pts).unwrap();
        let nk = compute_normals_and_k(&c).unwrap();
        assert!(matches!(
            decompose_graphs(&c, &nk.nu),
            Err(GeometryError::GraphStructure(_))
        ));
    }

    #[test]
    fn vertical_section_counts_each_vertex_once() {
        let c = torus(3.0, 1.0, 16);
        let x = c.nodes()[2].x;
        assert_eq!(vertical_section(c.nodes(), x).len(), 2);
    }
}
