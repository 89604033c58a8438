//! Blow-up of the inner band by `1/u_min` and comparison with the catenary.
//!
//! All graph operations work on [`GraphSamples`], a function sampled on a
//! uniform grid. Derivatives are second-order finite differences.

use thiserror::Error;

use crate::diagnostics::Band;

/// Default number of samples of a rescaled band (odd, so the minimum sits on a sample).
pub const RESCALE_SAMPLES: usize = 4097;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RescaleError {
    #[error("pinch: u_min = {0} <= 0")]
    Pinch(f64),
    #[error("window [-{window}, {window}] exceeds the sampled domain [{lo}, {hi}]")]
    WindowExceedsDomain { window: f64, lo: f64, hi: f64 },
    #[error("{0} samples are too few for second differences")]
    TooFewSamples(usize),
}

/// Values of a graph on the uniform grid `x_i = x0 + i·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSamples {
    x0: f64,
    dx: f64,
    w: Vec<f64>,
}

impl GraphSamples {
    pub fn new(x0: f64, dx: f64, w: Vec<f64>) -> Self {
        assert!(dx > 0.0, "grid spacing must be positive");
        Self { x0, dx, w }
    }

    /// Samples `f` at `n` uniform points of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let dx = (hi - lo) / (n - 1) as f64;
        Self::new(lo, dx, (0..n).map(|i| f(lo + dx * i as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.w[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x0, self.x(self.len() - 1))
    }

    pub fn derivative(&self) -> Vec<f64> {
        let (w, h, n) = (&self.w, self.dx, self.w.len());
        (0..n)
            .map(|i| {
                if i == 0 {
                    (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h)
                } else if i == n - 1 {
                    (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * h)
                } else {
                    (w[i + 1] - w[i - 1]) / (2.0 * h)
                }
            })
            .collect()
    }

    pub fn second_derivative(&self) -> Vec<f64> {
        let (w, h2, n) = (&self.w, self.dx * self.dx, self.w.len());
        (0..n)
            .map(|i| {
                if i == 0 {
                    (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) / h2
                } else if i == n - 1 {
                    (2.0 * w[n - 1] - 5.0 * w[n - 2] + 4.0 * w[n - 3] - w[n - 4]) / h2
                } else {
                    (w[i + 1] - 2.0 * w[i] + w[i - 1]) / h2
                }
            })
            .collect()
    }

    /// Index range of samples with |x| ≤ `window`.
    fn window_range(&self, window: f64) -> Result<std::ops::Range<usize>, RescaleError> {
        let (lo, hi) = self.domain();
        let slack = 1e-9 * self.dx;
        if -window < lo - slack || window > hi + slack {
            return Err(RescaleError::WindowExceedsDomain { window, lo, hi });
        }
        let first = ((-window - self.x0) / self.dx - 1e-9).ceil().max(0.0) as usize;
        let last = ((window - self.x0) / self.dx + 1e-9).floor() as usize;
        Ok(first..(last + 1).min(self.len()))
    }
}

/// The band graph in rescaled coordinates: x̃ = (x₁ − c)/u_min, w̃ = w/u_min.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledBand {
    pub scale: f64,
    pub center: f64,
    /// ã = a / u_min.
    pub half_width: f64,
    pub samples: GraphSamples,
    pub slope: Vec<f64>,
    /// (1 + |w̃′|²)^{1/2}.
    pub v_field: Vec<f64>,
}

impl RescaledBand {
    fn from_samples(samples: GraphSamples, scale: f64, center: f64, half_width: f64) -> Self {
        let slope = samples.derivative();
        let v_field = slope.iter().map(|s| (1.0 + s * s).sqrt()).collect();
        Self {
            scale,
            center,
            half_width,
            samples,
            slope,
            v_field,
        }
    }

    pub fn mean_curvature(&self) -> Vec<f64> {
        graph_mean_curvature(&self.samples)
    }

    /// min(3, ã/2).
    pub fn default_window(&self) -> f64 {
        3.0f64.min(0.5 * self.half_width)
    }
}

/// Rescales graph samples about `(center, 0)` by `1/u_min`.
pub fn rescale_graph(
    samples: &GraphSamples,
    center: f64,
    u_min: f64,
) -> Result<GraphSamples, RescaleError> {
    if !(u_min > 0.0) {
        return Err(RescaleError::Pinch(u_min));
    }
    Ok(GraphSamples::new(
        (samples.x0 - center) / u_min,
        samples.dx / u_min,
        samples.w.iter().map(|w| w / u_min).collect(),
    ))
}

/// Samples the band's graph model on `n` points over `(c − a, c + a)` and
/// rescales by the model minimum.
pub fn rescale_band(band: &Band, n: usize) -> Result<RescaledBand, RescaleError> {
    if n < 5 {
        return Err(RescaleError::TooFewSamples(n));
    }
    let u_min = band.u_min;
    if !(u_min > 0.0) {
        return Err(RescaleError::Pinch(u_min));
    }
    let (c, a) = (band.center, band.a);
    let raw = GraphSamples::from_fn(c - a, c + a, n, |x| band.graph().value(x));
    let samples = rescale_graph(&raw, c, u_min)?;
    Ok(RescaledBand::from_samples(samples, 1.0 / u_min, c, a / u_min))
}

/// Rescaled band from samples already in rescaled coordinates.
pub fn rescaled_from_samples(samples: GraphSamples) -> RescaledBand {
    let (lo, hi) = samples.domain();
    RescaledBand::from_samples(samples, 1.0, 0.0, (-lo).min(hi))
}

/// Mean curvature of the surface generated by a graph, w″/v³ − 1/(w v).
pub fn graph_mean_curvature(samples: &GraphSamples) -> Vec<f64> {
    let d1 = samples.derivative();
    let d2 = samples.second_derivative();
    samples
        .w
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(&w, (&s, &c))| {
            let v = (1.0 + s * s).sqrt();
            c / (v * v * v) - 1.0 / (w * v)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenaryDeviation {
    /// sup |w̃ − cosh|
    pub value: f64,
    /// sup |w̃′ − sinh|
    pub slope: f64,
    /// sup |w̃″ − cosh|
    pub second: f64,
    /// Best γ for cosh(γx)/γ in the sup norm.
    pub gamma: f64,
    pub gamma_residual: f64,
    pub window: f64,
}

const GAMMA_RANGE: (f64, f64) = (0.1, 10.0);

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let ratio = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-12 * (1.0 + lo.abs()) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

pub fn catenary_deviation(
    rescaled: &RescaledBand,
    window: f64,
) -> Result<CatenaryDeviation, RescaleError> {
    let s = &rescaled.samples;
    if s.len() < 5 {
        return Err(RescaleError::TooFewSamples(s.len()));
    }
    let range = s.window_range(window)?;
    let d2 = s.second_derivative();
    let (mut value, mut slope, mut second) = (0.0f64, 0.0f64, 0.0f64);
    for i in range.clone() {
        let x = s.x(i);
        value = value.max((s.w[i] - x.cosh()).abs());
        slope = slope.max((rescaled.slope[i] - x.sinh()).abs());
        second = second.max((d2[i] - x.cosh()).abs());
    }
    let sup_fit = |g: f64| {
        range
            .clone()
            .map(|i| (s.w[i] - (g * s.x(i)).cosh() / g).abs())
            .fold(0.0, f64::max)
    };
    let gamma = golden_section(GAMMA_RANGE.0, GAMMA_RANGE.1, sup_fit);
    Ok(CatenaryDeviation {
        value,
        slope,
        second,
        gamma,
        gamma_residual: sup_fit(gamma),
        window,
    })
}

/// 2π ∫ w″ / (1 + w′²)^{3/2} dx over `[-window, window]`, midpoint rule with
/// second-order derivative estimates at cell midpoints.
pub fn contradiction_integral(samples: &GraphSamples, window: f64) -> Result<f64, RescaleError> {
    if window <= 0.0 {
        return Ok(0.0);
    }
    if samples.len() < 4 {
        return Err(RescaleError::TooFewSamples(samples.len()));
    }
    let range = samples.window_range(window)?;
    let d2 = samples.second_derivative();
    let h = samples.dx;
    let mut total = 0.0;
    for i in range.start..range.end.saturating_sub(1) {
        let slope = (samples.w[i + 1] - samples.w[i]) / h;
        let curv = 0.5 * (d2[i] + d2[i + 1]);
        total += curv / (1.0 + slope * slope).powf(1.5) * h;
    }
    Ok(2.0 * std::f64::consts::PI * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::make_catenary_band;
    use std::f64::consts::PI;

    #[test]
    fn catenary_is_minimal() {
        let s = make_catenary_band(2.0, 2001);
        let h = graph_mean_curvature(&s);
        assert!(h.iter().all(|v| v.abs() < 1e-5));
    }

    #[test]
    fn catenary_fixture_slope_at_edge() {
        let s = make_catenary_band(1.5, 3001);
        let d = s.derivative();
        assert!((d[3000] - 1.5f64.sinh()).abs() < 1e-5);
    }

    #[test]
    fn cylinder_mean_curvature() {
        let s = GraphSamples::from_fn(-1.0, 1.0, 101, |_| 2.5);
        for h in graph_mean_curvature(&s) {
            assert!((h + 1.0 / 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_graph_matches_torus_inner_ring() {
        // w(x) = 3 − √(1 − x²) at x = 0: 1 − 1/2
        let s = GraphSamples::from_fn(-0.5, 0.5, 1001, |x| 3.0 - (1.0 - x * x).sqrt());
        let h = graph_mean_curvature(&s);
        assert!((h[500] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn identity_rescale_of_catenary() {
        let s = make_catenary_band(3.0, 257);
        assert_eq!(rescale_graph(&s, 0.0, 1.0).unwrap(), s);
        assert_eq!(rescale_graph(&s, 0.0, 0.0), Err(RescaleError::Pinch(0.0)));
    }

    #[test]
    fn exact_cosh_has_no_deviation() {
        let r = rescaled_from_samples(make_catenary_band(3.0, 4001));
        let d = catenary_deviation(&r, 2.0).unwrap();
        assert!(d.value == 0.0);
        assert!(d.slope < 1e-4 && d.second < 1e-4);
        assert!((d.gamma - 1.0).abs() < 1e-6);
    }

    #[test]
    fn scaled_catenary_gamma_is_recovered() {
        let s = GraphSamples::from_fn(-1.5, 1.5, 2001, |x| (2.0 * x).cosh() / 2.0);
        let d = catenary_deviation(&rescaled_from_samples(s), 1.5).unwrap();
        assert!((d.gamma - 2.0).abs() < 1e-6, "gamma {}", d.gamma);
    }

    #[test]
    fn window_outside_domain_is_an_error() {
        let r = rescaled_from_samples(make_catenary_band(1.0, 101));
        assert!(matches!(
            catenary_deviation(&r, 1.5),
            Err(RescaleError::WindowExceedsDomain { .. })
        ));
    }

    #[test]
    fn contradiction_integral_of_cosh() {
        let s = make_catenary_band(3.0, 4096);
        let v = contradiction_integral(&s, 3.0).unwrap();
        let exact = 4.0 * PI * 3.0f64.tanh();
        assert!(((v - exact) / exact).abs() < 1e-6);
        assert!((v - 12.504).abs() < 1e-3);
        assert_eq!(contradiction_integral(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn contradiction_integral_approaches_four_pi() {
        let s = make_catenary_band(12.0, 20001);
        let v = contradiction_integral(&s, 12.0).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn shrinking_necks_converge_to_the_catenary() {
        // w_σ(x) = σ cosh(x/σ) rescaled by its minimum σ is exactly cosh
        let mut prev = f64::INFINITY;
        for sigma in [0.2, 0.05, 0.01] {
            let s = GraphSamples::from_fn(-1.0, 1.0, 8001, |x: f64| {
                sigma * (x / sigma).cosh() + 0.05 * x.powi(4) / sigma.sqrt()
            });
            let r = rescale_graph(&s, 0.0, sigma).unwrap();
            let band = rescaled_from_samples(r);
            let window = band.default_window().min(band.half_width);
            let d = catenary_deviation(&band, window).unwrap();
            assert!(d.value < prev);
            prev = d.value;
            let integral = contradiction_integral(&band.samples, window).unwrap();
            let expected = 4.0 * PI * window.tanh();
            assert!((integral - expected).abs() / expected < 0.05);
        }
        assert!(prev < 1e-3);
    }
}
