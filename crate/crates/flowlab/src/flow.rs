//! Flow simulation: Euler–Maruyama ensembles under common noise.
//!
//! One [`BrownianPath`] drives every initial point of an ensemble — the
//! common-random-number coupling that makes pathwise differences
//! `X_t(x) - X_t(y)` meaningful. The scheme is plain Euler–Maruyama:
//! with non-differentiable coefficients the usual justification for
//! higher-order schemes evaporates, so correctness is anchored to exact
//! oracles and dt-refinement instead.
//!
//! Trajectories are a pure function of `(field, initial points, path)`;
//! permuting the initial points permutes the output bit-for-bit.

use serde::Serialize;

use crate::brownian::BrownianPath;
use crate::error::{FlowLabError, Result};
use crate::fields::CoefficientField;
use crate::stats::{distance_sq, norm};

/// Time-stepping scheme. Only Euler–Maruyama is provided; with merely
/// continuous coefficients nothing higher-order is justified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    EulerMaruyama,
}

/// Coordinates beyond this magnitude abort the run (explosion guard).
pub const OVERFLOW_LIMIT: f64 = 1e300;

/// Advance every point one Euler–Maruyama step at a time, invoking
/// `observe(step_index, t, positions)` after step 0 (initial state) and
/// after every subsequent step. `positions` is `(point, coordinate)`
/// row-major. Returns the final positions.
pub(crate) fn drive<F>(
    field: &CoefficientField,
    initial_flat: &[f64],
    path: &BrownianPath,
    mut observe: F,
) -> Result<Vec<f64>>
where
    F: FnMut(usize, f64, &[f64]),
{
    let d = field.dim_state();
    let m = field.dim_noise();
    debug_assert_eq!(initial_flat.len() % d, 0);
    let n_points = initial_flat.len() / d;
    let dt = path.dt();

    let mut x = initial_flat.to_vec();
    let mut sigma = vec![0.0; d * m];
    let mut drift = vec![0.0; d];

    observe(0, 0.0, &x);
    for step in 0..path.n_steps() {
        let dw = path.step_increments(step);
        for p in 0..n_points {
            let xi = &mut x[p * d..(p + 1) * d];
            field.eval_sigma(xi, &mut sigma);
            field.eval_drift(xi, &mut drift);
            for i in 0..d {
                let mut noise = 0.0;
                for j in 0..m {
                    noise += sigma[i * m + j] * dw[j];
                }
                xi[i] += noise + drift[i] * dt;
            }
            for (i, &v) in xi.iter().enumerate() {
                if !(v.abs() <= OVERFLOW_LIMIT) {
                    return Err(FlowLabError::Overflow {
                        step: step + 1,
                        point: p,
                        detail: format!("coordinate {i} became {v}"),
                    });
                }
            }
        }
        observe(step + 1, (step + 1) as f64 * dt, &x);
    }
    Ok(x)
}

/// Trajectories of many initial points driven by one shared Brownian path.
#[derive(Debug, Clone)]
pub struct FlowEnsemble {
    field: CoefficientField,
    initial_points: Vec<Vec<f64>>,
    path: BrownianPath,
    scheme: Scheme,
    dim: usize,
    n_points: usize,
    /// `(step, point, coordinate)` row-major, `(n_steps + 1)` time slices.
    data: Vec<f64>,
}

impl FlowEnsemble {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_steps(&self) -> usize {
        self.path.n_steps()
    }

    pub fn dt(&self) -> f64 {
        self.path.dt()
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.path.dt()
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn path(&self) -> &BrownianPath {
        &self.path
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn initial_points(&self) -> &[Vec<f64>] {
        &self.initial_points
    }

    /// Position of `point` after `step` steps.
    #[inline]
    pub fn position(&self, step: usize, point: usize) -> &[f64] {
        let base = (step * self.n_points + point) * self.dim;
        &self.data[base..base + self.dim]
    }

    pub fn endpoint(&self, point: usize) -> &[f64] {
        self.position(self.n_steps(), point)
    }

    /// Grid step nearest to time `t`.
    pub fn step_of_time(&self, t: f64) -> usize {
        ((t / self.path.dt()).round() as usize).min(self.n_steps())
    }
}

/// Run the scheme for every initial point against the shared path.
pub fn simulate_ensemble(
    field: &CoefficientField,
    initial_points: &[Vec<f64>],
    path: &BrownianPath,
    scheme: Scheme,
) -> Result<FlowEnsemble> {
    let d = field.dim_state();
    if initial_points.is_empty() {
        return Err(FlowLabError::Parameter("ensemble needs at least one initial point".into()));
    }
    for (i, p) in initial_points.iter().enumerate() {
        if p.len() != d {
            return Err(FlowLabError::Parameter(format!(
                "initial point {i} has dimension {}, field expects {d}",
                p.len()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(FlowLabError::Parameter(format!("initial point {i} is not finite")));
        }
    }
    if field.dim_noise() != path.noise_dim() {
        return Err(FlowLabError::Parameter(format!(
            "field expects {} noise components, path provides {}",
            field.dim_noise(),
            path.noise_dim()
        )));
    }
    let n_points = initial_points.len();
    let flat: Vec<f64> = initial_points.iter().flatten().copied().collect();
    let mut data = Vec::with_capacity((path.n_steps() + 1) * n_points * d);
    drive(field, &flat, path, |_, _, positions| {
        data.extend_from_slice(positions);
    })?;
    Ok(FlowEnsemble {
        field: field.clone(),
        initial_points: initial_points.to_vec(),
        path: path.clone(),
        scheme,
        dim: d,
        n_points,
        data,
    })
}

/// Result of a dt-refinement study.
#[derive(Debug)]
pub struct RefinementOutcome {
    pub ensemble: FlowEnsemble,
    pub achieved_dt: f64,
    pub refinements: usize,
    /// Endpoint movement between the last two refinement levels.
    pub last_move: f64,
    pub converged: bool,
}

pub const DEFAULT_MAX_REFINEMENTS: usize = 12;

/// Repeatedly halve `dt`, refining the *same* Brownian path by midpoint
/// bridging, until the endpoints move less than `target` (relative, with an
/// absolute guard near zero) between successive levels.
///
/// Non-convergence within `max_refinements` is reported in the outcome, not
/// an error: the finest ensemble is still returned.
pub fn refine_until_converged(
    field: &CoefficientField,
    initial_points: &[Vec<f64>],
    seed: u64,
    horizon: f64,
    dt0: f64,
    target: f64,
    max_refinements: usize,
) -> Result<RefinementOutcome> {
    if !(horizon > 0.0) || !(dt0 > 0.0) {
        return Err(FlowLabError::Parameter(format!(
            "need horizon > 0 and dt0 > 0, got {horizon}, {dt0}"
        )));
    }
    if !(target > 0.0) {
        return Err(FlowLabError::Parameter(format!("convergence target must be positive, got {target}")));
    }
    // Adjust dt downward so the grid hits the horizon exactly.
    let n_steps0 = (horizon / dt0).ceil().max(1.0) as usize;
    let dt_adj = horizon / n_steps0 as f64;

    let mut path = BrownianPath::generate(seed, dt_adj, n_steps0, field.dim_noise())?;
    let mut ensemble = simulate_ensemble(field, initial_points, &path, Scheme::EulerMaruyama)?;
    let mut refinements = 0usize;
    let mut last_move = f64::INFINITY;

    while refinements < max_refinements {
        let fine_path = path.refine()?;
        let fine = simulate_ensemble(field, initial_points, &fine_path, Scheme::EulerMaruyama)?;
        let mut worst = 0.0f64;
        for p in 0..ensemble.n_points() {
            let a = ensemble.endpoint(p);
            let b = fine.endpoint(p);
            let delta = distance_sq(a, b).sqrt();
            worst = worst.max(delta / (1.0 + norm(b)));
        }
        path = fine_path;
        ensemble = fine;
        refinements += 1;
        last_move = worst;
        if worst <= target {
            return Ok(RefinementOutcome {
                achieved_dt: ensemble.dt(),
                ensemble,
                refinements,
                last_move,
                converged: true,
            });
        }
    }
    Ok(RefinementOutcome {
        achieved_dt: ensemble.dt(),
        ensemble,
        refinements,
        last_move,
        converged: false,
    })
}

/// What a hitting-time query monitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum HittingKind {
    /// First time the squared distance of the pair drops to `eps`.
    PairContact { eps: f64, pair: (usize, usize) },
    /// First time `|X(point)|` reaches `radius` from below.
    BallExit { radius: f64, point: usize },
    /// First time `|X(point)|` drops to `radius`.
    BallEntry { radius: f64, point: usize },
}

/// First grid time at which the monitored quantity crossed its threshold,
/// or `None` when it never did within the horizon. Times are resolved at
/// grid precision; no sub-step interpolation.
#[derive(Debug, Clone, Serialize)]
pub struct HittingTimeRecord {
    pub kind: HittingKind,
    pub time: Option<f64>,
    pub step: Option<usize>,
    pub horizon: f64,
}

pub fn hitting_time(ensemble: &FlowEnsemble, kind: HittingKind) -> Result<HittingTimeRecord> {
    let n_steps = ensemble.n_steps();
    let check_point = |p: usize| -> Result<()> {
        if p >= ensemble.n_points() {
            return Err(FlowLabError::Parameter(format!(
                "point index {p} out of range (ensemble has {})",
                ensemble.n_points()
            )));
        }
        Ok(())
    };

    let hit_step = match kind {
        HittingKind::PairContact { eps, pair: (i, j) } => {
            check_point(i)?;
            check_point(j)?;
            if i == j {
                return Err(FlowLabError::Parameter("pair indices must be distinct".into()));
            }
            let xi0 = distance_sq(ensemble.position(0, i), ensemble.position(0, j));
            if !(eps > 0.0) || eps >= xi0 {
                return Err(FlowLabError::ThresholdOrdering(format!(
                    "contact level eps = {eps} must lie in ]0, initial squared distance {xi0}["
                )));
            }
            (0..=n_steps).find(|&s| {
                distance_sq(ensemble.position(s, i), ensemble.position(s, j)) <= eps
            })
        }
        HittingKind::BallExit { radius, point } => {
            check_point(point)?;
            if !(radius > 0.0) {
                return Err(FlowLabError::ThresholdOrdering(format!(
                    "exit radius must be positive, got {radius}"
                )));
            }
            (0..=n_steps).find(|&s| norm(ensemble.position(s, point)) >= radius)
        }
        HittingKind::BallEntry { radius, point } => {
            check_point(point)?;
            if !(radius > 0.0) {
                return Err(FlowLabError::ThresholdOrdering(format!(
                    "entry radius must be positive, got {radius}"
                )));
            }
            (0..=n_steps).find(|&s| norm(ensemble.position(s, point)) <= radius)
        }
    };

    Ok(HittingTimeRecord {
        kind,
        time: hit_step.map(|s| ensemble.time(s)),
        step: hit_step,
        horizon: ensemble.time(n_steps),
    })
}
