//! Explicit time stepping of the generating curve under normal speed `1/H`.

mod remesh;

pub use remesh::{remesh, smooth_length};

use thiserror::Error;

use crate::geometry::{
    decompose_graphs, is_embedded, vertical_section, CurvatureField, EnclosedRegion, Embedding,
    GeneratingCurve, GeometryError, GraphDecomposition, Point, MIN_NODES,
};

/// Maximum number of step halvings after a rejected step.
pub const MAX_RETRIES: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("initial curve has {0} nodes; at least {MIN_NODES} required")]
    TooFewNodes(usize),
    #[error("initial curve is not mean-convex: H = {h:.6e} at node {index}")]
    NotMeanConvex { index: usize, h: f64 },
    #[error("initial curve is not embedded: segments {0} and {1} intersect")]
    NotEmbedded(usize, usize),
    #[error("invalid step control: {0}")]
    InvalidControl(String),
    #[error("remesh produced x2 = {x2:.6e} at node {index}")]
    RemeshPinch { index: usize, x2: f64 },
    #[error("remesh produced crossing segments {0} and {1}")]
    RemeshCrossing(usize, usize),
    #[error("sample interval must be positive, got {0}")]
    InvalidSampleInterval(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    Running,
    HMinReached,
    PinchDetected,
    StructureViolated,
    MaxSteps,
    TimeLimit,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Running => "running",
            StopReason::HMinReached => "h_min_reached",
            StopReason::PinchDetected => "pinch_detected",
            StopReason::StructureViolated => "structure_violated",
            StopReason::MaxSteps => "max_steps",
            StopReason::TimeLimit => "time_limit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            StopReason::Running,
            StopReason::HMinReached,
            StopReason::PinchDetected,
            StopReason::StructureViolated,
            StopReason::MaxSteps,
            StopReason::TimeLimit,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub cfl: f64,
    pub dt_max: f64,
    /// Stop once min H falls to this value.
    pub eps_h: f64,
    /// Pinch alarm once min x₂ falls to this value.
    pub eps_u: f64,
    pub remesh_every: u32,
    pub max_steps: Option<u64>,
    pub t_end: Option<f64>,
}

impl StepControl {
    pub const DEFAULT_CFL: f64 = 0.25;
    pub const DEFAULT_DT_MAX: f64 = 1e-2;
    pub const DEFAULT_RELATIVE_EPS: f64 = 1e-3;
    pub const DEFAULT_REMESH_EVERY: u32 = 10;

    /// Defaults with the thresholds relative to the initial curve:
    /// eps_H = 1e-3 max H(0), eps_u = 1e-3 min x₂(0).
    pub fn for_initial(curve: &GeneratingCurve) -> Result<Self, FlowError> {
        let field = CurvatureField::compute(curve)?;
        Ok(Self {
            cfl: Self::DEFAULT_CFL,
            dt_max: Self::DEFAULT_DT_MAX,
            eps_h: Self::DEFAULT_RELATIVE_EPS * field.h_max(),
            eps_u: Self::DEFAULT_RELATIVE_EPS * curve.u_min(),
            remesh_every: Self::DEFAULT_REMESH_EVERY,
            max_steps: None,
            t_end: None,
        })
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: String| Err(FlowError::InvalidControl(m));
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return bad(format!("cfl must lie in (0, 0.5], got {}", self.cfl));
        }
        if !(self.dt_max > 0.0) {
            return bad(format!("dt_max must be positive, got {}", self.dt_max));
        }
        if !(self.eps_h > 0.0) {
            return bad(format!("eps_h must be positive, got {}", self.eps_h));
        }
        if !(self.eps_u > 0.0) {
            return bad(format!("eps_u must be positive, got {}", self.eps_u));
        }
        if self.remesh_every == 0 {
            return bad("remesh_every must be at least 1".into());
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0) {
                return bad(format!("t_end must be positive, got {t}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub curve: GeneratingCurve,
    pub step_count: u64,
    pub dt_last: f64,
    pub stop: StopReason,
    /// Incremented by every remesh; node correspondence holds only between
    /// states with equal epoch.
    pub mesh_epoch: u64,
    pub rejected_steps: u64,
    /// min H of the curve the last step started from.
    pub h_min_start: f64,
}

impl FlowState {
    pub fn new(curve: GeneratingCurve) -> Self {
        Self {
            t: 0.0,
            curve,
            step_count: 0,
            dt_last: 0.0,
            stop: StopReason::Running,
            mesh_epoch: 0,
            rejected_steps: 0,
            h_min_start: f64::INFINITY,
        }
    }

    pub fn is_running(&self) -> bool {
        self.stop == StopReason::Running
    }

    /// `[t, t + dt_last]`, the interval expected to contain the singular time
    /// once the run stopped on small H.
    pub fn t_max_bracket(&self) -> (f64, f64) {
        (self.t, self.t + self.dt_last)
    }
}

/// Node positions after one explicit Euler step, x + dt ν / H.
pub fn euler_nodes(curve: &GeneratingCurve, field: &CurvatureField, dt: f64) -> Vec<Point> {
    curve
        .nodes()
        .iter()
        .zip(field.nu.iter().zip(&field.h))
        .map(|(x, (nu, h))| x + nu * (dt / h))
        .collect()
}

/// min(dt_max, cfl Δs²_min H²_min).
pub fn stable_dt(curve: &GeneratingCurve, field: &CurvatureField, ctl: &StepControl) -> f64 {
    let ds = curve.min_edge();
    let h = field.h_min();
    ctl.dt_max.min(ctl.cfl * ds * ds * h * h)
}

fn try_euler(
    curve: &GeneratingCurve,
    field: &CurvatureField,
    dt: f64,
) -> Option<GeneratingCurve> {
    let nodes = euler_nodes(curve, field, dt);
    if nodes.iter().any(|p| !(p.y > 0.0) || !p.x.is_finite()) {
        return None;
    }
    let next = GeneratingCurve::new(nodes).ok()?;
    is_embedded(&next).is_embedded().then_some(next)
}

/// One accepted step of the flow, or the state with its stop reason set.
pub fn step(state: &FlowState, ctl: &StepControl) -> FlowState {
    step_toward(state, ctl, None)
}

/// Like [`step`], but never steps past `target`; a step that reaches it
/// lands on it exactly.
pub fn step_toward(state: &FlowState, ctl: &StepControl, target: Option<f64>) -> FlowState {
    let mut out = state.clone();
    if !state.is_running() {
        return out;
    }
    if ctl.max_steps.is_some_and(|m| state.step_count >= m) {
        out.stop = StopReason::MaxSteps;
        return out;
    }
    if ctl.t_end.is_some_and(|t| state.t >= t) {
        out.stop = StopReason::TimeLimit;
        return out;
    }
    if state.curve.u_min() <= ctl.eps_u {
        out.stop = StopReason::PinchDetected;
        return out;
    }
    let field = match CurvatureField::compute(&state.curve) {
        Ok(f) => f,
        Err(_) => {
            out.stop = StopReason::PinchDetected;
            return out;
        }
    };
    out.h_min_start = field.h_min();
    if field.h_min() <= ctl.eps_h {
        out.stop = StopReason::HMinReached;
        return out;
    }

    let mut dt = stable_dt(&state.curve, &field, ctl);
    let mut landing = None;
    for limit in [target, ctl.t_end].into_iter().flatten() {
        if limit > state.t && state.t + dt >= limit {
            dt = limit - state.t;
            landing = Some(limit);
        }
    }
    let mut retries = 0;
    let next = loop {
        if let Some(c) = try_euler(&state.curve, &field, dt) {
            break c;
        }
        retries += 1;
        out.rejected_steps += 1;
        if retries > MAX_RETRIES {
            out.stop = StopReason::StructureViolated;
            return out;
        }
        dt *= 0.5;
        landing = None;
    };
    out.t = landing.unwrap_or(state.t + dt);
    out.step_count += 1;
    out.dt_last = dt;
    out.curve = next;
    if out.step_count % ctl.remesh_every as u64 == 0 {
        match remesh(&out.curve) {
            Ok(c) => {
                out.curve = c;
                out.mesh_epoch += 1;
            }
            Err(FlowError::RemeshPinch { .. }) => out.stop = StopReason::PinchDetected,
            Err(_) => out.stop = StopReason::StructureViolated,
        }
    }
    out
}

/// Checks the hypotheses of a run: node count, H > 0, embeddedness.
pub fn validate_initial(curve: &GeneratingCurve) -> Result<CurvatureField, FlowError> {
    if curve.len() < MIN_NODES {
        return Err(FlowError::TooFewNodes(curve.len()));
    }
    let field = CurvatureField::compute(curve)?;
    let index = field.argmin_h();
    if !(field.h[index] > 0.0) {
        return Err(FlowError::NotMeanConvex {
            index,
            h: field.h[index],
        });
    }
    if let Embedding::Crossing(i, j) = is_embedded(curve) {
        return Err(FlowError::NotEmbedded(i, j));
    }
    Ok(field)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotKind {
    Initial,
    /// Taken every `sample_every` of flow time.
    Regular,
    /// Taken when min H first falls below min H(0)·2⁻ᵏ.
    Approach,
    Final,
}

impl SnapshotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SnapshotKind::Initial => "initial",
            SnapshotKind::Regular => "regular",
            SnapshotKind::Approach => "approach",
            SnapshotKind::Final => "final",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            SnapshotKind::Initial,
            SnapshotKind::Regular,
            SnapshotKind::Approach,
            SnapshotKind::Final,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }

    /// Snapshots that enter the diagnostics series.
    pub fn is_sample(self) -> bool {
        !matches!(self, SnapshotKind::Approach)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub step: u64,
    pub kind: SnapshotKind,
    pub curve: GeneratingCurve,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: FlowState,
    pub snapshots: Vec<Snapshot>,
    pub initial_h_max: f64,
    pub initial_h_min: f64,
}

impl Trajectory {
    /// Initial, regular and final snapshots in time order.
    pub fn samples(&self) -> impl Iterator<Item = &Snapshot> {
        self.snapshots.iter().filter(|s| s.kind.is_sample())
    }

    /// Initial and approach snapshots followed by the final one.
    pub fn approach(&self) -> impl Iterator<Item = &Snapshot> {
        self.snapshots
            .iter()
            .filter(|s| !matches!(s.kind, SnapshotKind::Regular))
    }
}

/// Runs the flow until it stops, snapshotting the curve every `sample_every`
/// of flow time, on each halving of min H, and at the end.
pub fn run(
    initial: GeneratingCurve,
    ctl: &StepControl,
    sample_every: f64,
) -> Result<Trajectory, FlowError> {
    ctl.validate()?;
    if !(sample_every > 0.0) {
        return Err(FlowError::InvalidSampleInterval(sample_every));
    }
    let field = validate_initial(&initial)?;
    let (h_min0, h_max0) = (field.h_min(), field.h_max());
    let mut state = FlowState::new(initial);
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        step: 0,
        kind: SnapshotKind::Initial,
        curve: state.curve.clone(),
    }];
    let mut next_sample = sample_every;
    let mut next_level = 0.5 * h_min0;
    let mut sample_index = 1u64;
    while state.is_running() {
        let next = step_toward(&state, ctl, Some(next_sample));
        if !next.is_running() {
            state = next;
            break;
        }
        if next.h_min_start <= next_level {
            while next.h_min_start <= next_level {
                next_level *= 0.5;
            }
            snapshots.push(Snapshot {
                t: state.t,
                step: state.step_count,
                kind: SnapshotKind::Approach,
                curve: state.curve.clone(),
            });
        }
        state = next;
        if state.t >= next_sample {
            snapshots.push(Snapshot {
                t: state.t,
                step: state.step_count,
                kind: SnapshotKind::Regular,
                curve: state.curve.clone(),
            });
            sample_index += 1;
            next_sample = sample_every * sample_index as f64;
        }
    }
    snapshots.push(Snapshot {
        t: state.t,
        step: state.step_count,
        kind: SnapshotKind::Final,
        curve: state.curve.clone(),
    });
    Ok(Trajectory {
        final_state: state,
        snapshots,
        initial_h_max: h_max0,
        initial_h_min: h_min0,
    })
}

/// Every node of `prev` lies inside the region enclosed by `next` or within
/// 1e-9·diameter of its boundary.
pub fn nesting_check(prev: &GeneratingCurve, next: &GeneratingCurve) -> bool {
    let Ok(region) = EnclosedRegion::new(next) else {
        return false;
    };
    let tol = 1e-9 * next.diameter();
    prev.nodes()
        .iter()
        .all(|&q| region.contains_with_tolerance(q, tol))
}

/// On the grid of `prev` (restricted to the x₁-range of `next`), the bottom
/// graph does not rise and the top graph does not sink.
pub fn graphs_monotone(
    prev: &GraphDecomposition,
    next: &GeneratingCurve,
    tol: f64,
) -> bool {
    let (lo, hi) = next.x_range();
    prev.grid
        .iter()
        .zip(prev.bottom.iter().zip(&prev.top))
        .filter(|(&x, _)| x > lo && x < hi)
        .all(|(&x, (&w, &v))| {
            let ys = vertical_section(next.nodes(), x);
            match (ys.first(), ys.last()) {
                (Some(&w2), Some(&v2)) if ys.len() == 2 => w2 <= w + tol && v2 >= v - tol,
                _ => false,
            }
        })
}

/// Graph decomposition with its convexity invariant checked.
pub fn checked_decomposition(curve: &GeneratingCurve) -> Result<GraphDecomposition, GeometryError> {
    let field = CurvatureField::compute(curve)?;
    let dec = decompose_graphs(curve, &field.nu)?;
    dec.check_invariants()?;
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::make_round_torus;

    fn torus(n: usize) -> GeneratingCurve {
        make_round_torus(3.0, 1.0, n).unwrap()
    }

    #[test]
    fn euler_displacements_match_torus_oracle() {
        let c = torus(512);
        let f = CurvatureField::compute(&c).unwrap();
        let dt = 1e-4;
        let moved = euler_nodes(&c, &f, dt);
        let inner = 256;
        let d = moved[inner] - c.nodes()[inner];
        assert!((d - Point::new(0.0, -2.0 * dt)).norm() < 1e-4 * dt);
        let d = moved[0] - c.nodes()[0];
        assert!((d - Point::new(0.0, 0.8 * dt)).norm() < 1e-4 * dt);
    }

    #[test]
    fn zero_step_is_identity() {
        let c = torus(64);
        let f = CurvatureField::compute(&c).unwrap();
        assert_eq!(euler_nodes(&c, &f, 0.0), c.nodes().to_vec());
    }

    #[test]
    fn step_respects_cfl_and_target() {
        let c = torus(128);
        let ctl = StepControl::for_initial(&c).unwrap();
        let s0 = FlowState::new(c.clone());
        let s1 = step(&s0, &ctl);
        let f = CurvatureField::compute(&c).unwrap();
        assert!((s1.dt_last - stable_dt(&c, &f, &ctl)).abs() < 1e-18);
        assert_eq!(s1.step_count, 1);
        let target = 0.3 * s1.dt_last;
        let s2 = step_toward(&s0, &ctl, Some(target));
        assert_eq!(s2.t, target);
    }

    #[test]
    fn stop_conditions() {
        let c = torus(64);
        let mut ctl = StepControl::for_initial(&c).unwrap();
        ctl.eps_h = 0.6;
        assert_eq!(step(&FlowState::new(c.clone()), &ctl).stop, StopReason::HMinReached);
        ctl.eps_h = 1e-3;
        ctl.eps_u = 2.5;
        assert_eq!(step(&FlowState::new(c.clone()), &ctl).stop, StopReason::PinchDetected);
        ctl.eps_u = 1e-3;
        ctl.max_steps = Some(3);
        let t = run(c, &ctl, 1.0).unwrap();
        assert_eq!(t.final_state.stop, StopReason::MaxSteps);
        assert_eq!(t.final_state.step_count, 3);
    }

    #[test]
    fn control_validation() {
        let c = torus(64);
        let mut ctl = StepControl::for_initial(&c).unwrap();
        assert!(ctl.validate().is_ok());
        ctl.cfl = 0.6;
        assert!(ctl.validate().is_err());
        ctl.cfl = 0.25;
        ctl.remesh_every = 0;
        assert!(ctl.validate().is_err());
    }

    #[test]
    fn run_rejects_invalid_initial_data() {
        let c = make_round_torus(3.0, 1.0, 64).unwrap();
        let ctl = StepControl::for_initial(&c).unwrap();
        // R = 1.8 r: inner ring has H < 0
        let bad = GeneratingCurve::new(
            c.nodes().iter().map(|p| Point::new(p.x, p.y - 1.2)).collect(),
        )
        .unwrap();
        assert!(matches!(
            run(bad, &ctl, 0.1),
            Err(FlowError::NotMeanConvex { .. })
        ));
        assert!(run(c, &ctl, 0.0).is_err());
    }

    #[test]
    fn round_torus_reaches_small_h() {
        let c = torus(64);
        let ctl = StepControl::for_initial(&c).unwrap();
        let u0 = c.u_min();
        let traj = run(c, &ctl, 0.05).unwrap();
        let fin = &traj.final_state;
        assert_eq!(fin.stop, StopReason::HMinReached);
        assert!(fin.t > 0.2 && fin.t < 0.4, "T = {}", fin.t);
        assert!(fin.curve.u_min() > 0.25 * u0);
        assert_eq!(traj.snapshots.first().unwrap().kind, SnapshotKind::Initial);
        assert_eq!(traj.snapshots.last().unwrap().kind, SnapshotKind::Final);
        let regular: Vec<f64> = traj
            .snapshots
            .iter()
            .filter(|s| s.kind == SnapshotKind::Regular)
            .map(|s| s.t)
            .collect();
        for (i, t) in regular.iter().enumerate() {
            assert!((t - 0.05 * (i + 1) as f64).abs() < 1e-12);
        }
        let samples: Vec<&Snapshot> = traj.samples().collect();
        for w in samples.windows(2) {
            assert!(w[0].t < w[1].t || w[1].kind == SnapshotKind::Final);
            assert!(nesting_check(&w[0].curve, &w[1].curve));
        }
    }

    #[test]
    fn sample_interval_longer_than_run() {
        let c = torus(32);
        let ctl = StepControl::for_initial(&c).unwrap();
        let traj = run(c, &ctl, 10.0).unwrap();
        assert_eq!(traj.samples().count(), 2);
    }

    #[test]
    fn nesting_of_concentric_circles() {
        let circle = |r: f64| {
            GeneratingCurve::new(
                (0..64)
                    .map(|i| {
                        let s = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
                        Point::new(r * s.cos(), 3.0 + r * s.sin())
                    })
                    .collect(),
            )
            .unwrap()
        };
        assert!(nesting_check(&circle(1.0), &circle(1.1)));
        assert!(!nesting_check(&circle(1.1), &circle(1.0)));
    }

    #[test]
    fn graphs_move_apart() {
        let c = torus(128);
        let ctl = StepControl::for_initial(&c).unwrap();
        let mut s = FlowState::new(c.clone());
        for _ in 0..50 {
            s = step(&s, &ctl);
        }
        let dec = checked_decomposition(&c).unwrap();
        assert!(graphs_monotone(&dec, &s.curve, 1e-12));
        let back = checked_decomposition(&s.curve).unwrap();
        assert!(!graphs_monotone(&back, &c, 1e-12));
    }
}
