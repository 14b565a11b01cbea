//! Exponential transforms and the probability bounds they produce.
//!
//! Two transforms drive the quantitative estimates. For the non-contact
//! argument, `psi(xi)` integrates `1/(s r(s))` from `xi` up to `delta_o` and
//! `phi = exp(psi)` blows up as the squared pair distance `xi` shrinks; an
//! exponential supermartingale estimate then caps the probability that the
//! pair distance ever drops to `eps` by `phi(xi0) e^{Ct} / phi(eps)`. For the
//! escape argument, `psi(xi)` integrates `1/(s f(s) + 1)` from zero and
//! `phi = exp(-psi)` decays as the squared radius grows, capping the
//! probability that a far-away start comes back inside a ball.
//!
//! The same machinery solves the scalar comparison envelope
//! `phi'(t) = C phi(t) r(phi(t))` that upper-bounds pair-distance moments:
//! closed forms for the built-in families, an adaptive embedded pair in the
//! substituted variable `u = log(1/phi)` otherwise. The substitution is
//! exact for the `Log` family (there `u' = -C u` is linear), which is
//! precisely the regime the verifiers lean on.
//!
//! Note on the upper integration limit: the contact transform integrates to
//! `delta_o` rather than to 1. That shifts `psi` by a constant, i.e. scales
//! `phi` by a constant factor, which cancels in every bound ratio; it keeps
//! the integrand positive for families whose modulus vanishes at 1.

use serde::Serialize;

use crate::error::{FlowLabError, Result};
use crate::fields::GrowthSpec;
use crate::modulus::{ModulusFamily, ModulusSpec};
use crate::ode45::{integrate_scalar, ScalarSolution};
use crate::quadrature::adaptive_simpson;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Transform for the non-contact bound: `phi(xi) = exp(int_xi^delta_o ds/(s r(s)))`.
#[derive(Debug, Clone)]
pub struct ContactTransform {
    modulus: ModulusSpec,
    quad_tol: f64,
}

impl ContactTransform {
    pub fn new(modulus: ModulusSpec) -> Self {
        Self { modulus, quad_tol: DEFAULT_QUAD_TOL }
    }

    pub fn with_tolerance(modulus: ModulusSpec, quad_tol: f64) -> Result<Self> {
        if !(quad_tol > 0.0) {
            return Err(FlowLabError::Parameter(format!(
                "quadrature tolerance must be positive, got {quad_tol}"
            )));
        }
        Ok(Self { modulus, quad_tol })
    }

    pub fn modulus(&self) -> &ModulusSpec {
        &self.modulus
    }

    fn check_domain(&self, xi: f64) -> Result<()> {
        let d = self.modulus.delta_o();
        if !(xi > 0.0) || xi > d * (1.0 + 1e-12) {
            return Err(FlowLabError::Domain(format!("xi = {xi} outside ]0, {d}]")));
        }
        Ok(())
    }

    /// `psi(xi)`: closed form for the built-in families, quadrature otherwise.
    pub fn psi(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        match self.psi_closed_form(xi) {
            Some(v) => Ok(v),
            None => self.psi_quadrature(xi),
        }
    }

    /// Closed-form `psi`, when the family has one.
    pub fn psi_closed_form(&self, xi: f64) -> Option<f64> {
        let d = self.modulus.delta_o();
        let scale = self.modulus.scale();
        match self.modulus.family() {
            ModulusFamily::Log => {
                // int ds/(s log(1/s)) = log log(1/s)
                Some(((1.0 / xi).ln().ln() - (1.0 / d).ln().ln()) / scale)
            }
            ModulusFamily::LogLog => {
                Some(((1.0 / xi).ln().ln().ln() - (1.0 / d).ln().ln().ln()) / scale)
            }
            ModulusFamily::Constant => Some((d / xi).ln() / scale),
            ModulusFamily::Tabulated(_) => None,
        }
    }

    /// `psi` by adaptive quadrature in `u = log(1/s)`, where the integrand
    /// `1/r(e^{-u})` is smooth and slowly varying.
    pub fn psi_quadrature(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        let d = self.modulus.delta_o();
        let (ua, ub) = ((1.0f64 / d).ln(), (1.0f64 / xi).ln());
        adaptive_simpson(&|u: f64| 1.0 / self.modulus.eval_extended((-u).exp()), ua, ub, self.quad_tol)
    }

    /// `int_lo^hi ds/(s r(s))` for `0 < lo <= hi <= delta_o`.
    pub fn psi_between(&self, lo: f64, hi: f64) -> Result<f64> {
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        if lo > hi {
            return Err(FlowLabError::ThresholdOrdering(format!("lo = {lo} must not exceed hi = {hi}")));
        }
        if let (Some(a), Some(b)) = (self.psi_closed_form(lo), self.psi_closed_form(hi)) {
            return Ok(a - b);
        }
        let (ua, ub) = ((1.0f64 / hi).ln(), (1.0f64 / lo).ln());
        adaptive_simpson(&|u: f64| 1.0 / self.modulus.eval_extended((-u).exp()), ua, ub, self.quad_tol)
    }

    /// `phi(xi) = exp(psi(xi))`; strictly decreasing, `phi(delta_o) = 1`.
    pub fn phi(&self, xi: f64) -> Result<f64> {
        Ok(self.psi(xi)?.exp())
    }
}

/// Upper bound on the probability that the squared pair distance, started at
/// `xi0`, drops to `eps` before `horizon`: `min(1, phi(xi0) e^{C t} / phi(eps))`.
pub fn noncontact_probability_bound(
    transform: &ContactTransform,
    xi0: f64,
    eps: f64,
    c: f64,
    horizon: f64,
) -> Result<f64> {
    if !(eps < xi0) {
        return Err(FlowLabError::ThresholdOrdering(format!(
            "contact level eps = {eps} must lie strictly below xi0 = {xi0}"
        )));
    }
    if !(c >= 0.0 && c.is_finite()) || !(horizon >= 0.0) {
        return Err(FlowLabError::Parameter(format!(
            "need C >= 0 and horizon >= 0, got C = {c}, horizon = {horizon}"
        )));
    }
    // phi(xi0)/phi(eps) = exp(-int_eps^xi0 ds/(s r(s))).
    let gap = transform.psi_between(eps, xi0)?;
    Ok((c * horizon - gap).exp().min(1.0))
}

/// Transform for the escape bound: `phi(xi) = exp(-int_0^xi ds/(s f(s)+1))`.
#[derive(Debug, Clone)]
pub struct EscapeTransform {
    growth: GrowthSpec,
    quad_tol: f64,
}

impl EscapeTransform {
    pub fn new(growth: GrowthSpec) -> Self {
        Self { growth, quad_tol: DEFAULT_QUAD_TOL }
    }

    pub fn growth(&self) -> &GrowthSpec {
        &self.growth
    }

    /// `psi(xi) = int_0^xi ds/(s f(s) + 1)` for `xi >= 0`.
    pub fn psi(&self, xi: f64) -> Result<f64> {
        self.psi_between(0.0, xi)
    }

    /// Integral of `1/(s f(s)+1)` over `[lo, hi]`.
    ///
    /// Below 1 the integrand is tame and integrated directly; above 1 the
    /// integration runs in `v = log s` (`e^v dv / (e^v f(e^v) + 1)`), which
    /// stays accurate over astronomically wide radius ranges.
    pub fn psi_between(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo >= 0.0) || !(hi >= lo) {
            return Err(FlowLabError::Domain(format!("need 0 <= lo <= hi, got [{lo}, {hi}]")));
        }
        let g = &self.growth;
        let mut total = 0.0;
        if lo < 1.0 {
            let top = hi.min(1.0);
            total += adaptive_simpson(&|s: f64| 1.0 / (s * g.f(s) + 1.0), lo, top, self.quad_tol)?;
        }
        if hi > 1.0 {
            let bottom = lo.max(1.0);
            total += adaptive_simpson(
                &|v: f64| {
                    let s = v.exp();
                    s / (s * g.f(s) + 1.0)
                },
                bottom.ln(),
                hi.ln(),
                self.quad_tol,
            )?;
        }
        Ok(total)
    }

    /// `phi(xi) = exp(-psi(xi))`, in `]0, 1]` and strictly decreasing.
    pub fn phi(&self, xi: f64) -> Result<f64> {
        Ok((-self.psi(xi)?).exp())
    }
}

/// Upper bound on `P(inf_{s<=horizon} |X_s| <= R)` for a start at distance
/// `x0_norm > R`: `min(1, e^{C t} exp(-int_{R^2}^{x0^2} ds/(s f(s)+1)))`.
pub fn escape_probability_bound(
    transform: &EscapeTransform,
    x0_norm: f64,
    radius: f64,
    c: f64,
    horizon: f64,
) -> Result<f64> {
    if !(radius > 0.0) || !(x0_norm > radius) {
        return Err(FlowLabError::ThresholdOrdering(format!(
            "need |x0| = {x0_norm} > R = {radius} > 0"
        )));
    }
    if !(c >= 0.0 && c.is_finite()) || !(horizon >= 0.0) {
        return Err(FlowLabError::Parameter(format!(
            "need C >= 0 and horizon >= 0, got C = {c}, horizon = {horizon}"
        )));
    }
    let gap = transform.psi_between(radius * radius, x0_norm * x0_norm)?;
    Ok((c * horizon - gap).exp().min(1.0))
}

/// How a `ComparisonSolution` was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionMethod {
    ClosedForm,
    Numeric,
}

/// Saturated solution of the comparison envelope `phi' = C_p phi r(phi)`.
#[derive(Debug, Clone)]
pub struct ComparisonSolution {
    c_p: f64,
    modulus: ModulusSpec,
    phi0: f64,
    method: SolutionMethod,
    /// Numeric solution in the substituted variable `u = log(1/phi)`.
    numeric: Option<ScalarSolution>,
    /// First requested time at which the solution exceeded `delta_o`.
    delta_o_crossing: Option<f64>,
    t_end: f64,
}

impl ComparisonSolution {
    pub fn method(&self) -> SolutionMethod {
        self.method
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Time at which the envelope crossed `delta_o`, if it did within the
    /// requested grid. Reported, not an error: the family formulas stay
    /// positive well past `delta_o`.
    pub fn delta_o_crossing(&self) -> Option<f64> {
        self.delta_o_crossing
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > self.t_end * (1.0 + 1e-12) {
            return Err(FlowLabError::Domain(format!("t = {t} outside [0, {}]", self.t_end)));
        }
        if t == 0.0 {
            // Exact initial condition; exp(log(1/phi0)) would round.
            return Ok(self.phi0);
        }
        match self.method {
            SolutionMethod::ClosedForm => closed_form_phi(&self.modulus, self.c_p, self.phi0, t)
                .ok_or_else(|| FlowLabError::Parameter("family has no closed form".into())),
            SolutionMethod::Numeric => {
                let sol = self.numeric.as_ref().expect("numeric method stores a solution");
                Ok((-sol.eval(t)?).exp())
            }
        }
    }
}

fn closed_form_phi(modulus: &ModulusSpec, c_p: f64, phi0: f64, t: f64) -> Option<f64> {
    let rate = c_p * modulus.scale();
    match modulus.family() {
        // u' = -C u  =>  phi = phi0^{exp(-C t)}
        ModulusFamily::Log => {
            let u0 = (1.0 / phi0).ln();
            Some((-u0 * (-rate * t).exp()).exp())
        }
        // (log u)' = -C log u  =>  phi = exp(-[log(1/phi0)]^{exp(-C t)})
        ModulusFamily::LogLog => {
            let u0 = (1.0 / phi0).ln();
            Some((-(u0.powf((-rate * t).exp()))).exp())
        }
        ModulusFamily::Constant => Some(phi0 * (rate * t).exp()),
        ModulusFamily::Tabulated(_) => None,
    }
}

/// Solve `phi' = C_p phi r(phi)`, `phi(0) = phi0`, on the requested grid.
///
/// `ClosedForm` uses the family formulas; `Numeric` integrates the
/// substituted equation `u' = -C_p r(e^{-u})` with the adaptive embedded
/// pair. Fails when the state leaves the family's positivity domain or the
/// requested method does not exist for the family.
pub fn solve_comparison_ode(
    c_p: f64,
    modulus: &ModulusSpec,
    phi0: f64,
    t_grid: &[f64],
    method: SolutionMethod,
) -> Result<ComparisonSolution> {
    if !(c_p > 0.0 && c_p.is_finite()) {
        return Err(FlowLabError::Parameter(format!("C_p must be positive, got {c_p}")));
    }
    let delta_o = modulus.delta_o();
    if !(phi0 > 0.0) || phi0 > delta_o * (1.0 + 1e-12) {
        return Err(FlowLabError::Domain(format!("phi0 = {phi0} outside ]0, {delta_o}]")));
    }
    if t_grid.is_empty() || t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FlowLabError::Parameter("t grid must be strictly increasing and nonnegative".into()));
    }
    let t_end = *t_grid.last().unwrap();

    let numeric = match method {
        SolutionMethod::ClosedForm => {
            if closed_form_phi(modulus, c_p, phi0, 0.0).is_none() {
                return Err(FlowLabError::Parameter(format!(
                    "{} family has no closed-form comparison solution",
                    modulus.family().name()
                )));
            }
            None
        }
        SolutionMethod::Numeric => {
            let u0 = (1.0 / phi0).ln();
            // u may not cross the positivity limit of the family (phi there
            // makes r vanish or go negative); unbounded families get an
            // exp-overflow guard instead.
            let u_floor = match modulus.positivity_limit() {
                l if l.is_finite() => (1.0 / l).ln(),
                _ => -700.0,
            };
            let m = modulus.clone();
            let sol = integrate_scalar(
                move |u: f64| -c_p * m.eval_extended((-u).exp()),
                0.0,
                u0,
                t_grid,
                1e-9,
                1e-12,
                move |u| u > u_floor,
            )
            .map_err(|e| match e {
                FlowLabError::OdeFailure(msg) => {
                    FlowLabError::OdeFailure(format!("comparison envelope left its domain: {msg}"))
                }
                other => other,
            })?;
            Some(sol)
        }
    };

    let mut solution = ComparisonSolution {
        c_p,
        modulus: modulus.clone(),
        phi0,
        method,
        numeric,
        delta_o_crossing: None,
        t_end,
    };
    for &t in t_grid {
        if solution.eval(t)? > delta_o {
            solution.delta_o_crossing = Some(t);
            break;
        }
    }
    Ok(solution)
}

/// Feasibility probe for power-law (Kolmogorov-type) moment bounds.
///
/// Inputs are on the log scale: each entry of `log_inv_phi0` is
/// `log(1/phi0)`, so initial values far below the floating-point range
/// (e.g. `phi0 = e^{-10^6}`) stay representable.
///
/// For the iterated-log bound the probe computes
/// `ratio = [log(1/phi0)]^{exp(-C t)} / log(1/phi0)`; a power bound
/// `phi0^alpha` would need `ratio >= alpha > 0` uniformly, and the report
/// shows the ratio instead decaying to zero as `phi0` shrinks. For the
/// plain log bound the exponent `exp(-C t)` is constant in `phi0`, which is
/// why a continuous modification exists in that regime.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub c_p: f64,
    pub t: f64,
    /// `log(1/phi0)` grid, increasing (phi0 decreasing toward zero).
    pub log_inv_phi0: Vec<f64>,
    /// Iterated-log bound ratios per grid entry.
    pub ratios: Vec<f64>,
    /// Constant exponent of the plain log bound.
    pub log_family_exponent: f64,
    /// Whether the ratio strictly decreases along the grid.
    pub ratios_strictly_decreasing: bool,
}

pub fn kolmogorov_feasibility_probe(log_inv_phi0: &[f64], c_p: f64, t: f64) -> Result<FeasibilityReport> {
    if log_inv_phi0.is_empty() {
        return Err(FlowLabError::Parameter("empty phi0 grid".into()));
    }
    if log_inv_phi0.iter().any(|&u| !(u > 1.0)) {
        return Err(FlowLabError::Parameter("log(1/phi0) entries must exceed 1 (phi0 < 1/e)".into()));
    }
    if log_inv_phi0.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FlowLabError::Parameter("grid must have phi0 strictly decreasing".into()));
    }
    if !(c_p > 0.0) || !(t >= 0.0) {
        return Err(FlowLabError::Parameter(format!("need C_p > 0 and t >= 0, got {c_p}, {t}")));
    }
    let decay = (-c_p * t).exp();
    let ratios: Vec<f64> = log_inv_phi0.iter().map(|&u| u.powf(decay - 1.0)).collect();
    let strictly_decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    Ok(FeasibilityReport {
        c_p,
        t,
        log_inv_phi0: log_inv_phi0.to_vec(),
        ratios,
        log_family_exponent: decay,
        ratios_strictly_decreasing: strictly_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn log_transform() -> ContactTransform {
        ContactTransform::new(ModulusSpec::log())
    }

    #[test]
    fn psi_empty_interval_is_zero() {
        let t = log_transform();
        let d = t.modulus().delta_o();
        assert_eq!(t.psi(d).unwrap(), 0.0);
        assert_eq!(t.phi(d).unwrap(), 1.0);
    }

    #[test]
    fn psi_log_closed_form_value() {
        // delta_o = 1/e, xi = e^{-e}: loglog(e^e) - loglog(e) = 1 - 0.
        let t = log_transform();
        let got = t.psi((-E).exp()).unwrap();
        assert!((got - 1.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn psi_constant_closed_form_value() {
        // r = 2: psi(xi) = log(delta_o/xi)/2; at xi = delta_o/e that is 1/2.
        let m = ModulusSpec::constant(2.0).unwrap();
        let t = ContactTransform::new(m);
        let xi = t.modulus().delta_o() / E;
        assert!((t.psi(xi).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn phi_log_is_log_ratio() {
        let t = log_transform();
        assert!((t.phi((-4.0f64).exp()).unwrap() - 4.0).abs() < 1e-12);
        assert!((t.phi((-16.0f64).exp()).unwrap() - 16.0).abs() < 1e-11);
    }

    #[test]
    fn quadrature_matches_closed_forms_to_1e8_relative() {
        for (transform, name) in [
            (log_transform(), "log"),
            (ContactTransform::new(ModulusSpec::constant(2.0).unwrap()), "constant"),
            (ContactTransform::new(ModulusSpec::log_log()), "loglog"),
        ] {
            let d = transform.modulus().delta_o();
            for k in 0..=24 {
                let xi = d * 10f64.powf(-12.0 * k as f64 / 24.0);
                let cf = transform.psi(xi).unwrap();
                let nq = transform.psi_quadrature(xi).unwrap();
                let denom = cf.abs().max(nq.abs()).max(1e-30);
                let rel = (cf - nq).abs() / denom;
                assert!(
                    rel <= 1e-8 || (cf - nq).abs() < 1e-12,
                    "{name}: xi = {xi}: |{cf} - {nq}| rel {rel}"
                );
            }
        }
    }

    #[test]
    fn phi_contact_strictly_decreasing() {
        // Decreasing in xi: the grid walks xi downward, so phi must grow.
        let t = log_transform();
        let d = t.modulus().delta_o();
        let mut prev = 0.0;
        for k in 0..30 {
            let xi = d * 10f64.powf(-10.0 * k as f64 / 29.0);
            let v = t.phi(xi).unwrap();
            assert!(v > prev, "phi not decreasing in xi at xi = {xi}");
            prev = v;
        }
    }

    #[test]
    fn noncontact_bound_log_example() {
        // Log, delta_o = 1/e, xi0 = e^-4, eps = e^-16, C = 1, t = 1:
        // phi ratio 4/16, bound = e/4.
        let t = log_transform();
        let got = noncontact_probability_bound(&t, (-4.0f64).exp(), (-16.0f64).exp(), 1.0, 1.0).unwrap();
        assert!((got - E / 4.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn noncontact_bound_zero_horizon_ratio() {
        // xi0 = eps * e: ratio (log(1/eps) - 1)/log(1/eps); eps = e^-5 gives 4/5.
        let t = log_transform();
        let got = noncontact_probability_bound(&t, (-4.0f64).exp(), (-5.0f64).exp(), 1.0, 0.0).unwrap();
        assert!((got - 0.8).abs() < 1e-12, "{got}");
    }

    #[test]
    fn noncontact_bound_vanishes_as_eps_shrinks() {
        let t = log_transform();
        let xi0 = (-2.0f64).exp();
        let mut prev = 2.0;
        for k in 2..40 {
            let eps = 10f64.powf(-(k as f64));
            let b = noncontact_probability_bound(&t, xi0, eps, 1.0, 1.0).unwrap();
            assert!(b <= prev + 1e-15, "bound not monotone at eps = {eps}");
            prev = b;
        }
        assert!(prev < 0.1, "bound should be small for tiny eps, got {prev}");
    }

    #[test]
    fn noncontact_bound_rejects_bad_ordering() {
        let t = log_transform();
        assert!(matches!(
            noncontact_probability_bound(&t, 0.01, 0.01, 1.0, 1.0),
            Err(FlowLabError::ThresholdOrdering(_))
        ));
    }

    #[test]
    fn bounds_monotone_in_horizon_and_c() {
        let t = log_transform();
        let (xi0, eps) = ((-3.0f64).exp(), (-9.0f64).exp());
        let mut prev = -1.0;
        for k in 0..8 {
            let b = noncontact_probability_bound(&t, xi0, eps, 1.0, 0.25 * k as f64).unwrap();
            assert!(b >= prev);
            prev = b;
        }
        let lo = noncontact_probability_bound(&t, xi0, eps, 0.5, 1.0).unwrap();
        let hi = noncontact_probability_bound(&t, xi0, eps, 2.0, 1.0).unwrap();
        assert!(hi >= lo);
    }

    #[test]
    fn escape_bound_degenerate_growth() {
        // f = 0: integrand 1, bound = exp(-(x0^2 - R^2)) = e^-3.
        let t = EscapeTransform::new(GrowthSpec::constant(0.0).unwrap());
        let got = escape_probability_bound(&t, 2.0, 1.0, 1.0, 0.0).unwrap();
        assert!((got - (-3.0f64).exp()).abs() < 1e-10, "{got}");
    }

    #[test]
    fn escape_bound_constant_growth() {
        // f = 1: int_1^9 ds/(s+1) = log 5, bound = 1/5.
        let t = EscapeTransform::new(GrowthSpec::constant(1.0).unwrap());
        let got = escape_probability_bound(&t, 3.0, 1.0, 1.0, 0.0).unwrap();
        assert!((got - 0.2).abs() < 1e-10, "{got}");
    }

    #[test]
    fn escape_bound_decays_with_distance() {
        // The log-growth integral diverges only like log log, so the bound
        // decays slowly; a genuinely huge start is needed to push it small.
        let t = EscapeTransform::new(GrowthSpec::log_growth());
        let mut prev = 2.0;
        for &x0 in &[2.0, 4.0, 8.0, 16.0, 64.0, 256.0, 1e8, 1e75, 1e150] {
            let b = escape_probability_bound(&t, x0, 1.0, 0.5, 1.0).unwrap();
            assert!(b < prev, "bound not decreasing at x0 = {x0}");
            prev = b;
        }
        assert!(prev < 0.01, "tail bound should be small, got {prev}");
    }

    #[test]
    fn escape_phi_decreasing_in_unit_interval() {
        let t = EscapeTransform::new(GrowthSpec::log_growth());
        let mut prev = 1.0 + 1e-12;
        for k in 0..=30 {
            let xi = k as f64;
            let p = t.phi(xi).unwrap();
            assert!(p > 0.0 && p <= 1.0 && p < prev);
            prev = p;
        }
    }

    #[test]
    fn comparison_log_closed_form_examples() {
        let m = ModulusSpec::log();
        let grid = [0.0, 2f64.ln(), 1.0];
        let sol = solve_comparison_ode(1.0, &m, 1e-4, &grid, SolutionMethod::ClosedForm).unwrap();
        assert_eq!(sol.eval(0.0).unwrap(), 1e-4);
        let got = sol.eval(2f64.ln()).unwrap();
        assert!((got - 1e-2).abs() < 1e-14, "{got}");
    }

    #[test]
    fn comparison_loglog_closed_form_example() {
        let m = ModulusSpec::log_log();
        let phi0 = (-(E * E)).exp();
        let grid = [0.0, 2f64.ln()];
        let sol = solve_comparison_ode(1.0, &m, phi0, &grid, SolutionMethod::ClosedForm).unwrap();
        let got = sol.eval(2f64.ln()).unwrap();
        let want = (-E).exp(); // exp(-(e^2)^(1/2))
        assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
    }

    #[test]
    fn comparison_numeric_matches_closed_forms() {
        let grid: Vec<f64> = (0..=25).map(|k| 0.2 * k as f64).collect();
        for modulus in [ModulusSpec::log(), ModulusSpec::log_log()] {
            for &phi0_frac in &[1e-10f64, 1e-6, 1e-3, 0.5] {
                let phi0 = modulus.delta_o() * phi0_frac.min(0.5);
                let num = solve_comparison_ode(1.0, &modulus, phi0, &grid, SolutionMethod::Numeric).unwrap();
                let cf = solve_comparison_ode(1.0, &modulus, phi0, &grid, SolutionMethod::ClosedForm).unwrap();
                for &t in &grid {
                    let a = num.eval(t).unwrap();
                    let b = cf.eval(t).unwrap();
                    assert!(
                        (a - b).abs() <= 1e-6 * b.abs().max(1e-300),
                        "{} phi0={phi0} t={t}: {a} vs {b}",
                        modulus.family().name()
                    );
                }
            }
        }
    }

    #[test]
    fn comparison_solution_is_nondecreasing() {
        let m = ModulusSpec::log();
        let grid: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
        let sol = solve_comparison_ode(0.7, &m, 1e-6, &grid, SolutionMethod::Numeric).unwrap();
        let mut prev = 0.0;
        for &t in &grid {
            let v = sol.eval(t).unwrap();
            assert!(v >= prev, "solution decreased at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn comparison_reports_delta_o_crossing() {
        // phi0 = delta_o/2 with C_p = 1 crosses delta_o quickly.
        let m = ModulusSpec::log();
        let grid: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
        let sol = solve_comparison_ode(1.0, &m, m.delta_o() / 2.0, &grid, SolutionMethod::Numeric).unwrap();
        let crossing = sol.delta_o_crossing().expect("envelope must cross delta_o");
        // Exit time: e^{-t} log(1/phi0) = log(1/delta_o) => t = log(1 + log 2).
        let want = (1.0 + 2f64.ln()).ln();
        assert!((crossing - want).abs() < 0.11, "crossing {crossing}, want ~{want}");
    }

    #[test]
    fn comparison_semigroup_property_log() {
        let m = ModulusSpec::log();
        let phi0 = 1e-8;
        let (s, t) = (0.7, 1.3);
        let grid = [0.0, s, t, s + t];
        let sol = solve_comparison_ode(1.0, &m, phi0, &grid, SolutionMethod::ClosedForm).unwrap();
        let direct = sol.eval(s + t).unwrap();
        let mid = sol.eval(s).unwrap();
        let sol2 = solve_comparison_ode(1.0, &m, mid, &[0.0, t], SolutionMethod::ClosedForm).unwrap();
        let composed = sol2.eval(t).unwrap();
        assert!((direct - composed).abs() <= 1e-12 * direct.abs(), "{direct} vs {composed}");
    }

    #[test]
    fn comparison_rejects_bad_inputs() {
        let m = ModulusSpec::log();
        assert!(solve_comparison_ode(0.0, &m, 1e-4, &[0.0, 1.0], SolutionMethod::Numeric).is_err());
        assert!(solve_comparison_ode(1.0, &m, 0.9, &[0.0, 1.0], SolutionMethod::Numeric).is_err());
        let tab = ModulusSpec::tabulated(vec![(1e-12, 5.0), (0.5, 1.0)], 0.5).unwrap();
        assert!(solve_comparison_ode(1.0, &tab, 0.1, &[0.0, 1.0], SolutionMethod::ClosedForm).is_err());
    }

    #[test]
    fn probe_iterated_log_ratio_example() {
        // u0 = 10^6, t = 1: ratio = 10^{6 (e^{-1} - 1)}.
        let grid = [10.0, 1e2, 1e3, 1e4, 1e5, 1e6];
        let rep = kolmogorov_feasibility_probe(&grid, 1.0, 1.0).unwrap();
        let want = 10f64.powf(6.0 * ((-1.0f64).exp() - 1.0));
        let got = *rep.ratios.last().unwrap();
        assert!((got - want).abs() <= 1e-6 * want, "{got} vs {want}");
        assert!(rep.ratios_strictly_decreasing);
        assert!((rep.log_family_exponent - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn probe_at_time_zero_is_identity() {
        let grid = [10.0, 1e3, 1e6];
        let rep = kolmogorov_feasibility_probe(&grid, 1.0, 0.0).unwrap();
        assert!(rep.ratios.iter().all(|&r| (r - 1.0).abs() < 1e-15));
    }
}
