//! Cubic spline interpolation used by remeshing and by the smooth graph
//! model of the inner band.

use nalgebra::Vector2;

type Point = Vector2<f64>;

/// Solves a tridiagonal system in place (Thomas algorithm).
/// `lower[0]` and `upper[n-1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    c[0] = upper[0] / d;
    rhs[0] /= d;
    for i in 1..n {
        d = diag[i] - lower[i] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / d;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Cyclic tridiagonal solve via Sherman-Morrison. `lower[0]` couples row 0 to
/// the last unknown and `upper[n-1]` couples the last row to unknown 0.
fn solve_cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let mut x = rhs.to_vec();
    solve_tridiagonal(lower, &d, upper, &mut x);
    let mut z = vec![0.0; n];
    z[0] = gamma;
    z[n - 1] = alpha;
    solve_tridiagonal(lower, &d, upper, &mut z);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for i in 0..n {
        x[i] -= fact * z[i];
    }
    x
}

/// Periodic parametric cubic spline through the nodes of a closed polyline,
/// parametrized by cumulative chord length.
#[derive(Debug, Clone)]
pub struct ClosedSpline {
    knots: Vec<f64>,
    points: Vec<Point>,
    second: Vec<Point>,
}

impl ClosedSpline {
    pub fn new(points: &[Point]) -> Self {
        let n = points.len();
        let h: Vec<f64> = (0..n)
            .map(|i| (points[(i + 1) % n] - points[i]).norm())
            .collect();
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        for hi in &h {
            knots.push(knots.last().unwrap() + hi);
        }
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rx = vec![0.0; n];
        let mut ry = vec![0.0; n];
        for i in 0..n {
            let hp = h[(i + n - 1) % n];
            let hn = h[i];
            lower[i] = hp;
            diag[i] = 2.0 * (hp + hn);
            upper[i] = hn;
            let slope_n = (points[(i + 1) % n] - points[i]) / hn;
            let slope_p = (points[i] - points[(i + n - 1) % n]) / hp;
            let r = 6.0 * (slope_n - slope_p);
            rx[i] = r.x;
            ry[i] = r.y;
        }
        let mx = solve_cyclic(&lower, &diag, &upper, &rx);
        let my = solve_cyclic(&lower, &diag, &upper, &ry);
        let second = mx.iter().zip(&my).map(|(&x, &y)| Point::new(x, y)).collect();
        Self {
            knots,
            points: points.to_vec(),
            second,
        }
    }

    pub fn segments(&self) -> usize {
        self.points.len()
    }

    pub fn segment_param_length(&self, i: usize) -> f64 {
        self.knots[i + 1] - self.knots[i]
    }

    fn ends(&self, i: usize) -> (Point, Point, Point, Point, f64) {
        let j = (i + 1) % self.points.len();
        (
            self.points[i],
            self.points[j],
            self.second[i],
            self.second[j],
            self.segment_param_length(i),
        )
    }

    /// Position on segment `i` at local parameter `tau` in `[0, h_i]`.
    pub fn eval(&self, i: usize, tau: f64) -> Point {
        let (p0, p1, m0, m1, h) = self.ends(i);
        let a = (h - tau) / h;
        let b = tau / h;
        p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0)
    }

    pub fn derivative(&self, i: usize, tau: f64) -> Point {
        let (p0, p1, m0, m1, h) = self.ends(i);
        let a = (h - tau) / h;
        let b = tau / h;
        (p1 - p0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0)
    }

    /// Arc length of segment `i` between local parameters 0 and `tau`.
    pub fn arc_length(&self, i: usize, tau: f64) -> f64 {
        gauss_legendre(0.0, tau, |s| self.derivative(i, s).norm())
    }

    /// Arc length of the whole closed spline.
    pub fn total_length(&self) -> f64 {
        (0..self.segments())
            .map(|i| self.arc_length(i, self.segment_param_length(i)))
            .sum()
    }
}

/// Natural cubic spline `y(x)` through points with strictly increasing `x`.
#[derive(Debug, Clone)]
pub struct GraphSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl GraphSpline {
    /// Returns `None` if fewer than 3 points or `xs` is not strictly increasing.
    pub fn new(xs: &[f64], ys: &[f64]) -> Option<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n || xs.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let m = n - 2;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            lower[k] = h[i - 1];
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            upper[k] = h[i];
            rhs[k] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs);
        let mut second = vec![0.0; n];
        second[1..n - 1].copy_from_slice(&rhs);
        Some(Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            second,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn interval(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Value, first and second derivative at `x`.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let i = self.interval(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let y = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let dy = (y1 - y0) / h + ((3.0 * b * b - 1.0) * m1 - (3.0 * a * a - 1.0) * m0) * h / 6.0;
        let d2y = a * m0 + b * m1;
        (y, dy, d2y)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval3(x).0
    }
}

const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss-Legendre quadrature on `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}
