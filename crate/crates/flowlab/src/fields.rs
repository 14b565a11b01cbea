//! Coefficient fields and the built-in example corpus.
//!
//! A [`CoefficientField`] bundles the diffusion matrix `sigma: R^d -> R^{d x m}`
//! and drift `b: R^d -> R^d` of an Ito equation together with the metadata the
//! verifiers need: declared continuity modulus and constant, support radius,
//! and (for escape experiments) a growth envelope. Evaluators are pure
//! functions behind `Arc`, so fields are cheap to clone and safe to share
//! across worker threads.
//!
//! The corpus carries one field per regime the theory distinguishes:
//! zero and linear baselines, a deterministic log-drift field with an exact
//! closed-form flow (the workhorse oracle), a log-modulus diffusion, and a
//! superlinear growth field for escape-to-infinity runs.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{FlowLabError, Result};
use crate::modulus::ModulusSpec;
use crate::rng::KeyedStream;
use crate::stats::{distance, norm};

type EvalFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Diffusion/drift pair with declared regularity metadata.
#[derive(Clone)]
pub struct CoefficientField {
    name: String,
    dim_state: usize,
    dim_noise: usize,
    sigma: EvalFn,
    drift: EvalFn,
    support_radius: Option<f64>,
    modulus: ModulusSpec,
    modulus_constant: f64,
    growth: Option<GrowthSpec>,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("name", &self.name)
            .field("dim_state", &self.dim_state)
            .field("dim_noise", &self.dim_noise)
            .field("support_radius", &self.support_radius)
            .field("modulus", &self.modulus)
            .field("modulus_constant", &self.modulus_constant)
            .finish()
    }
}

impl CoefficientField {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dim_state: usize,
        dim_noise: usize,
        sigma: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        drift: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        support_radius: Option<f64>,
        modulus: ModulusSpec,
        modulus_constant: f64,
    ) -> Result<Self> {
        if dim_state == 0 || dim_noise == 0 {
            return Err(FlowLabError::Parameter("state and noise dimensions must be positive".into()));
        }
        if !(modulus_constant > 0.0) {
            return Err(FlowLabError::Parameter(format!(
                "modulus constant must be positive, got {modulus_constant}"
            )));
        }
        if let Some(r) = support_radius {
            if !(r >= 0.0) {
                return Err(FlowLabError::Parameter(format!("support radius must be >= 0, got {r}")));
            }
        }
        Ok(Self {
            name: name.into(),
            dim_state,
            dim_noise,
            sigma: Arc::new(sigma),
            drift: Arc::new(drift),
            support_radius,
            modulus,
            modulus_constant,
            growth: None,
        })
    }

    /// Convenience constructor for scalar fields.
    pub fn scalar(
        name: impl Into<String>,
        sigma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        drift: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: Option<f64>,
        modulus: ModulusSpec,
        modulus_constant: f64,
    ) -> Result<Self> {
        Self::new(
            name,
            1,
            1,
            move |x, out| out[0] = sigma(x[0]),
            move |x, out| out[0] = drift(x[0]),
            support_radius,
            modulus,
            modulus_constant,
        )
    }

    pub fn with_growth(mut self, growth: GrowthSpec) -> Self {
        self.growth = Some(growth);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_state(&self) -> usize {
        self.dim_state
    }

    pub fn dim_noise(&self) -> usize {
        self.dim_noise
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn modulus(&self) -> &ModulusSpec {
        &self.modulus
    }

    pub fn modulus_constant(&self) -> f64 {
        self.modulus_constant
    }

    pub fn growth(&self) -> Option<&GrowthSpec> {
        self.growth.as_ref()
    }

    /// Write the `d x m` diffusion matrix at `x` into `out` (row-major).
    #[inline]
    pub fn eval_sigma(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim_state);
        debug_assert_eq!(out.len(), self.dim_state * self.dim_noise);
        (self.sigma)(x, out);
    }

    /// Write the drift vector at `x` into `out`.
    #[inline]
    pub fn eval_drift(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim_state);
        debug_assert_eq!(out.len(), self.dim_state);
        (self.drift)(x, out);
    }

    pub fn sigma_at(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_state * self.dim_noise];
        self.eval_sigma(x, &mut out);
        out
    }

    pub fn drift_at(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_state];
        self.eval_drift(x, &mut out);
        out
    }

    /// Sampled verification that the coefficients vanish outside the declared
    /// support radius, exactly.
    pub fn check_support(&self, n_samples: usize, seed: u64) -> Result<()> {
        let r = match self.support_radius {
            Some(r) => r,
            None => return Ok(()),
        };
        let mut rng = KeyedStream::new(seed, 0xFEED);
        for _ in 0..n_samples {
            // Radii in [r, r + 3], random direction.
            let radius = r + 3.0 * rng.next_uniform();
            let x = random_direction(&mut rng, self.dim_state, radius);
            if self.sigma_at(&x).iter().any(|&v| v != 0.0) || self.drift_at(&x).iter().any(|&v| v != 0.0) {
                return Err(FlowLabError::Domain(format!(
                    "{}: coefficients nonzero at |x| = {radius} >= declared support {r}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn random_direction(rng: &mut KeyedStream, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.next_normal()).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.iter().map(|c| c / n * radius).collect();
        }
    }
}

/// Growth envelope for escape experiments: `rho` on `[1, inf)` and its
/// strictly positive C¹ extension `f` to `[0, inf)` with `f = rho` above 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSpec {
    family: GrowthFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
enum GrowthFamily {
    /// `rho(s) = 1 + ln s`, extended below 1 by the matching quadratic
    /// `(1 + s^2)/2` (value 1 and slope 1 at s = 1, positive at 0).
    LogGrowth,
    /// `rho ≡ c`. `c = 0` is the degenerate baseline where the escape
    /// integrand collapses to 1.
    Constant(f64),
}

impl GrowthSpec {
    pub fn log_growth() -> Self {
        Self { family: GrowthFamily::LogGrowth }
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(FlowLabError::Parameter(format!("growth constant must be >= 0, got {c}")));
        }
        Ok(Self { family: GrowthFamily::Constant(c) })
    }

    /// `rho(s)` for `s >= 1`.
    pub fn rho(&self, s: f64) -> Result<f64> {
        if !(s >= 1.0) {
            return Err(FlowLabError::Domain(format!("rho is defined on [1, inf), got {s}")));
        }
        Ok(self.f(s))
    }

    /// The extension `f(s)` for `s >= 0`.
    pub fn f(&self, s: f64) -> f64 {
        debug_assert!(s >= 0.0);
        match self.family {
            GrowthFamily::LogGrowth => {
                if s >= 1.0 {
                    1.0 + s.ln()
                } else {
                    0.5 * (1.0 + s * s)
                }
            }
            GrowthFamily::Constant(c) => c,
        }
    }

    /// Sampled invariants: `f > 0` on `[0, inf)` and `f = rho` above 1.
    pub fn check_invariants(&self) -> Result<()> {
        for k in 0..=400 {
            let s = k as f64 * 0.25;
            if !(self.f(s) > 0.0) {
                return Err(FlowLabError::Domain(format!("f({s}) = {} not positive", self.f(s))));
            }
            if s >= 1.0 && (self.f(s) - self.rho(s)?).abs() > 0.0 {
                return Err(FlowLabError::Domain(format!("f({s}) != rho({s})")));
            }
        }
        Ok(())
    }
}

/// Quintic smoothstep cut-off profile in the radial coordinate: exactly 1
/// for `t <= r`, exactly 0 for `t >= r + 1`, `6u^5 - 15u^4 + 10u^3` ramp in
/// between (C² at both ends; the midpoint value is exactly 1/2).
pub fn bump_profile(t: f64, r: f64) -> f64 {
    if t <= r {
        1.0
    } else if t >= r + 1.0 {
        0.0
    } else {
        let u = t - r;
        1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

/// Compactly supported version of a field: both coefficients are multiplied
/// by the radial bump that is 1 inside `|x| <= radius` and 0 outside
/// `|x| >= radius + 1`. The support radius of the result is `radius + 1`.
pub fn truncate_field(field: &CoefficientField, radius: f64) -> Result<CoefficientField> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(FlowLabError::Parameter(format!("truncation radius must be positive, got {radius}")));
    }
    let sigma_inner = field.sigma.clone();
    let drift_inner = field.drift.clone();
    let growth = field.growth.clone();
    let mut out = CoefficientField {
        name: format!("{}(truncated R={radius})", field.name),
        dim_state: field.dim_state,
        dim_noise: field.dim_noise,
        sigma: Arc::new(move |x: &[f64], out: &mut [f64]| {
            sigma_inner(x, out);
            let w = bump_profile(norm(x), radius);
            if w != 1.0 {
                out.iter_mut().for_each(|v| *v *= w);
            }
        }),
        drift: Arc::new(move |x: &[f64], out: &mut [f64]| {
            drift_inner(x, out);
            let w = bump_profile(norm(x), radius);
            if w != 1.0 {
                out.iter_mut().for_each(|v| *v *= w);
            }
        }),
        support_radius: Some(radius + 1.0),
        modulus: field.modulus.clone(),
        modulus_constant: field.modulus_constant,
        growth: None,
    };
    if let Some(g) = growth {
        out = out.with_growth(g);
    }
    Ok(out)
}

/// Worst observed (H1)-style ratios over a pair sample.
#[derive(Debug, Clone, Serialize)]
pub struct H1Report {
    pub field: String,
    /// Pairs actually evaluated (sampled pairs falling inside the domain).
    pub n_pairs: usize,
    pub max_sigma_ratio: f64,
    pub max_drift_ratio: f64,
    pub worst_sigma_separation: f64,
    pub worst_drift_separation: f64,
    pub declared_constant: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Sample pairs `(x, y)` with `|x - y|^2 <= delta_o` inside a coordinate box
/// of half-width `radius` and report the worst ratios
/// `||sigma(x)-sigma(y)||^2 / (|x-y|^2 r(|x-y|^2))` and
/// `|b(x)-b(y)| / (|x-y| r(|x-y|^2))` against the declared constant.
///
/// Separations are drawn geometrically down to 1e-12 so the near-contact
/// regime, where the modulus matters, is actually exercised.
pub fn verify_h1_empirically(
    field: &CoefficientField,
    n_pairs: usize,
    radius: f64,
    seed: u64,
) -> Result<H1Report> {
    verify_h1_with_tolerance(field, n_pairs, radius, seed, 0.05)
}

pub fn verify_h1_with_tolerance(
    field: &CoefficientField,
    n_pairs: usize,
    radius: f64,
    seed: u64,
    tolerance: f64,
) -> Result<H1Report> {
    if n_pairs == 0 {
        return Err(FlowLabError::Sampling("no pairs requested".into()));
    }
    if !(radius > 0.0) {
        return Err(FlowLabError::Sampling(format!("sampling radius must be positive, got {radius}")));
    }
    let delta_o = field.modulus.delta_o();
    let sep_max = delta_o.sqrt() * 0.999;
    let sep_min = 1e-12;
    let mut rng = KeyedStream::new(seed, 0x481);
    let d = field.dim_state;

    let mut max_sigma = 0.0f64;
    let mut max_drift = 0.0f64;
    let (mut worst_sigma_sep, mut worst_drift_sep) = (0.0, 0.0);
    let mut used = 0usize;

    let mut sig_x = vec![0.0; d * field.dim_noise];
    let mut sig_y = vec![0.0; d * field.dim_noise];
    let mut b_x = vec![0.0; d];
    let mut b_y = vec![0.0; d];

    for _ in 0..n_pairs {
        let sep = sep_min * (sep_max / sep_min).powf(rng.next_uniform());
        let x: Vec<f64> = (0..d).map(|_| (2.0 * rng.next_uniform() - 1.0) * radius).collect();
        let dir = random_direction(&mut rng, d, 1.0);
        let y: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + sep * di).collect();
        let sep_actual = distance(&x, &y);
        if !(sep_actual > 0.0) || sep_actual * sep_actual > delta_o {
            continue;
        }
        used += 1;
        let r = field.modulus.eval(sep_actual * sep_actual)?;

        field.eval_sigma(&x, &mut sig_x);
        field.eval_sigma(&y, &mut sig_y);
        let sigma_diff_sq: f64 = sig_x.iter().zip(&sig_y).map(|(a, b)| (a - b) * (a - b)).sum();
        let sigma_ratio = sigma_diff_sq / (sep_actual * sep_actual * r);
        if sigma_ratio > max_sigma {
            max_sigma = sigma_ratio;
            worst_sigma_sep = sep_actual;
        }

        field.eval_drift(&x, &mut b_x);
        field.eval_drift(&y, &mut b_y);
        let drift_diff = distance(&b_x, &b_y);
        let drift_ratio = drift_diff / (sep_actual * r);
        if drift_ratio > max_drift {
            max_drift = drift_ratio;
            worst_drift_sep = sep_actual;
        }
    }

    if used == 0 {
        return Err(FlowLabError::Sampling(format!(
            "no valid pairs within radius {radius} (delta_o = {delta_o})"
        )));
    }
    let bound = field.modulus_constant * (1.0 + tolerance);
    Ok(H1Report {
        field: field.name.clone(),
        n_pairs: used,
        max_sigma_ratio: max_sigma,
        max_drift_ratio: max_drift,
        worst_sigma_separation: worst_sigma_sep,
        worst_drift_separation: worst_drift_sep,
        declared_constant: field.modulus_constant,
        tolerance,
        pass: max_sigma <= bound && max_drift <= bound,
    })
}

/// Worst ratios against the rescaled modulus `r((|x-y|^2 / M)^p)` with
/// `M = 4(R+1)^2 / delta_o`, sampled over the ball `|x|, |y| <= R + 1`
/// at unrestricted separations. Only meaningful for compactly supported
/// fields; the rescaling pulls every argument back inside `]0, delta_o]`.
#[derive(Debug, Clone, Serialize)]
pub struct RescaledModulusReport {
    pub field: String,
    pub power: i32,
    pub rescale_m: f64,
    pub max_sigma_ratio: f64,
    pub max_drift_ratio: f64,
}

pub fn rescaled_modulus_ratios(
    field: &CoefficientField,
    power: i32,
    n_pairs: usize,
    seed: u64,
) -> Result<RescaledModulusReport> {
    let r_support = field.support_radius.ok_or_else(|| {
        FlowLabError::Parameter(format!("{} has unbounded support", field.name))
    })?;
    if power < 1 {
        return Err(FlowLabError::Parameter(format!("power must be >= 1, got {power}")));
    }
    let delta_o = field.modulus.delta_o();
    let m_const = 4.0 * (r_support + 1.0) * (r_support + 1.0) / delta_o;
    let mut rng = KeyedStream::new(seed, 0x2_1000);
    let d = field.dim_state;
    let half = r_support + 1.0;

    let mut max_sigma = 0.0f64;
    let mut max_drift = 0.0f64;
    for _ in 0..n_pairs {
        let x: Vec<f64> = (0..d).map(|_| (2.0 * rng.next_uniform() - 1.0) * half).collect();
        let y: Vec<f64> = (0..d).map(|_| (2.0 * rng.next_uniform() - 1.0) * half).collect();
        let sep = distance(&x, &y);
        if sep < 1e-9 {
            continue;
        }
        let arg = (sep * sep / m_const).powi(power);
        let r = field.modulus.eval(arg)?;
        let sig_x = field.sigma_at(&x);
        let sig_y = field.sigma_at(&y);
        let sigma_diff_sq: f64 = sig_x.iter().zip(&sig_y).map(|(a, b)| (a - b) * (a - b)).sum();
        max_sigma = max_sigma.max(sigma_diff_sq / (sep * sep * r));
        let drift_diff = distance(&field.drift_at(&x), &field.drift_at(&y));
        max_drift = max_drift.max(drift_diff / (sep * r));
    }
    Ok(RescaledModulusReport {
        field: field.name.clone(),
        power,
        rescale_m: m_const,
        max_sigma_ratio: max_sigma,
        max_drift_ratio: max_drift,
    })
}

// ---------------------------------------------------------------------------
// Built-in corpus
// ---------------------------------------------------------------------------

/// Default diffusion amplitude of `LogDiffusion`.
pub const LOG_DIFFUSION_SIGMA_SCALE: f64 = 0.15;
/// Default drift and diffusion amplitudes of `EscapeGrowthField`.
pub const ESCAPE_DRIFT_SCALE: f64 = 0.5;
pub const ESCAPE_SIGMA_SCALE: f64 = 0.3;

/// Names of the built-in example fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CorpusField {
    /// `sigma = 0`, `b = 0`: every trajectory is constant.
    ZeroField,
    /// `b(x) = x`, `sigma = 0`: outward exponential baseline.
    IdentityDrift,
    /// `b(x) = -x`, `sigma = 0`: contracting Lipschitz baseline.
    LipschitzBaseline,
    /// `b(x) = x log(1/|x|)` (smoothly cut off above `|x| = 2`), `sigma = 0`:
    /// deterministic field whose flow is exactly `x0^(exp(-t))` on `(0, 1)`.
    LogDriftDeterministic,
    /// Scalar diffusion with log modulus: `sigma(x) ~ x sqrt(log(1/|x|))`.
    LogDiffusion,
    /// Superlinear outward field obeying the growth envelope
    /// `rho(s) = 1 + log s`.
    EscapeGrowthField,
}

impl CorpusField {
    pub fn all() -> [CorpusField; 6] {
        [
            CorpusField::ZeroField,
            CorpusField::IdentityDrift,
            CorpusField::LipschitzBaseline,
            CorpusField::LogDriftDeterministic,
            CorpusField::LogDiffusion,
            CorpusField::EscapeGrowthField,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            CorpusField::ZeroField => "ZeroField",
            CorpusField::IdentityDrift => "IdentityDrift",
            CorpusField::LipschitzBaseline => "LipschitzBaseline",
            CorpusField::LogDriftDeterministic => "LogDriftDeterministic",
            CorpusField::LogDiffusion => "LogDiffusion",
            CorpusField::EscapeGrowthField => "EscapeGrowthField",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            CorpusField::ZeroField => "zero coefficients; constant trajectories",
            CorpusField::IdentityDrift => "b(x) = x, sigma = 0; outward exponential baseline",
            CorpusField::LipschitzBaseline => "b(x) = -x, sigma = 0; contracting Lipschitz baseline",
            CorpusField::LogDriftDeterministic => {
                "b(x) = x log(1/|x|), sigma = 0; exact flow x^(exp(-t)) on (0,1)"
            }
            CorpusField::LogDiffusion => "sigma(x) = 0.15 x sqrt(log(1/|x|)), b = 0; log-modulus noise",
            CorpusField::EscapeGrowthField => {
                "b(x) = 0.5 x (1+log(1+x^2)), sigma = 0.3 x sqrt(1+log(1+x^2)); growth-envelope field"
            }
        }
    }
}

impl FromStr for CorpusField {
    type Err = FlowLabError;

    fn from_str(s: &str) -> Result<Self> {
        CorpusField::all()
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FlowLabError::UnknownField(s.to_string()))
    }
}

/// Optional parameter overrides for the corpus constructors.
#[derive(Debug, Clone, Default)]
pub struct FieldParams {
    /// Multiplies the diffusion amplitude where the field has one.
    pub sigma_scale: Option<f64>,
    /// Multiplies the drift amplitude where the field has one.
    pub drift_scale: Option<f64>,
}

/// Build a corpus field with its default parameters.
pub fn example_field(which: CorpusField) -> CoefficientField {
    example_field_with(which, &FieldParams::default()).expect("default corpus parameters are valid")
}

/// Build a corpus field by name.
pub fn example_field_by_name(name: &str) -> Result<CoefficientField> {
    Ok(example_field(name.parse::<CorpusField>()?))
}

pub fn example_field_with(which: CorpusField, params: &FieldParams) -> Result<CoefficientField> {
    for v in [params.sigma_scale, params.drift_scale].into_iter().flatten() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(FlowLabError::Parameter(format!("field scale overrides must be positive, got {v}")));
        }
    }
    match which {
        CorpusField::ZeroField => CoefficientField::scalar(
            "ZeroField",
            |_| 0.0,
            |_| 0.0,
            Some(0.0),
            ModulusSpec::log(),
            1.0,
        ),
        CorpusField::IdentityDrift => CoefficientField::scalar(
            "IdentityDrift",
            |_| 0.0,
            |x| x,
            None,
            ModulusSpec::constant(1.0)?,
            1.0,
        ),
        CorpusField::LipschitzBaseline => CoefficientField::scalar(
            "LipschitzBaseline",
            |_| 0.0,
            |x| -x,
            None,
            ModulusSpec::constant(1.0)?,
            1.0,
        ),
        CorpusField::LogDriftDeterministic => {
            let scale = params.drift_scale.unwrap_or(1.0);
            CoefficientField::scalar(
                "LogDriftDeterministic",
                |_| 0.0,
                move |x| scale * log_drift(x),
                Some(3.0),
                ModulusSpec::log(),
                8.0 * scale,
            )
        }
        CorpusField::LogDiffusion => {
            let scale = params.sigma_scale.unwrap_or(LOG_DIFFUSION_SIGMA_SCALE);
            CoefficientField::scalar(
                "LogDiffusion",
                move |x| scale * log_diffusion_profile(x),
                |_| 0.0,
                Some(2.0),
                ModulusSpec::log(),
                // Worst ratio sits on the bump shoulder, ~3.2 * scale^2;
                // declared at 8 * scale^2 for headroom.
                (8.0 * scale * scale).max(0.05),
            )
        }
        CorpusField::EscapeGrowthField => {
            let ds = params.drift_scale.unwrap_or(ESCAPE_DRIFT_SCALE);
            let ss = params.sigma_scale.unwrap_or(ESCAPE_SIGMA_SCALE);
            Ok(CoefficientField::scalar(
                "EscapeGrowthField",
                move |x| ss * x * (1.0 + (1.0 + x * x).ln()).sqrt(),
                move |x| ds * x * (1.0 + (1.0 + x * x).ln()),
                None,
                ModulusSpec::constant(1.0)?,
                // Lipschitz ratios within the default sampling box |x| <= 4.
                (4.0 * ds.max(ss * ss)).max(4.0),
            )?
            .with_growth(GrowthSpec::log_growth()))
        }
    }
}

/// `x log(1/|x|)`, smoothly cut off between `|x| = 2` and `|x| = 3`, with the
/// continuous extension `b(0) = 0`. The formula is kept intact on `(0, 2]`
/// so the closed-form flow `x0^(exp(-t))` is exact for starts in `(0, 1)`:
/// 0 and 1 are fixed points and trajectories never reach the cut-off.
fn log_drift(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let a = x.abs();
    x * (1.0 / a).ln() * bump_profile(a, 2.0)
}

/// `x sqrt(log(1/|x|))` inside `|x| <= 1/e`, continued as `x` beyond (where
/// the square root would dip below 1), cut off between `|x| = 1` and 2.
fn log_diffusion_profile(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let a = x.abs();
    let amp = (1.0 / a).ln().max(1.0).sqrt();
    x * amp * bump_profile(a, 1.0)
}
