//! Embedded Dormand–Prince 5(4) integrator for scalar autonomous ODEs.
//!
//! Adaptive step control on a mixed error norm, steps clipped so every
//! requested output time is hit exactly. Accepted nodes keep the derivative,
//! so evaluation between nodes uses cubic Hermite interpolation.

use crate::error::{FlowLabError, Result};

/// Dense solution of a scalar ODE `u' = g(u)`.
#[derive(Debug, Clone)]
pub struct ScalarSolution {
    /// Accepted nodes (t, u, u') in increasing t, including all output times.
    nodes: Vec<(f64, f64, f64)>,
}

impl ScalarSolution {
    /// Interpolated value at `t` (must lie within the integrated span).
    pub fn eval(&self, t: f64) -> Result<f64> {
        let first = self.nodes.first().expect("solution has nodes");
        let last = self.nodes.last().expect("solution has nodes");
        if t < first.0 - 1e-12 || t > last.0 + 1e-12 {
            return Err(FlowLabError::Domain(format!(
                "evaluation time {t} outside integrated span [{}, {}]",
                first.0, last.0
            )));
        }
        let t = t.clamp(first.0, last.0);
        // Binary search for the bracketing node pair.
        let idx = match self.nodes.binary_search_by(|n| n.0.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.nodes[i].1),
            Err(i) => i,
        };
        let (t0, u0, d0) = self.nodes[idx - 1];
        let (t1, u1, d1) = self.nodes[idx];
        let h = t1 - t0;
        let s = (t - t0) / h;
        // Cubic Hermite basis.
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Ok(h00 * u0 + h10 * h * d0 + h01 * u1 + h11 * h * d1)
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Fifth-order weights minus the embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `u' = g(u)` from `(t0, u0)`, hitting every time in `t_out`
/// exactly. `t_out` must be strictly increasing and start at or after `t0`.
///
/// `guard` is consulted after every accepted step and may reject the state
/// (e.g. the substituted variable leaving its meaningful range); rejection
/// aborts with [`FlowLabError::OdeFailure`] carrying the exit time.
pub fn integrate_scalar<G, H>(
    g: G,
    t0: f64,
    u0: f64,
    t_out: &[f64],
    rtol: f64,
    atol: f64,
    guard: H,
) -> Result<ScalarSolution>
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> bool,
{
    if t_out.is_empty() {
        return Err(FlowLabError::Parameter("empty output time grid".into()));
    }
    if t_out.windows(2).any(|w| w[1] <= w[0]) || t_out[0] < t0 {
        return Err(FlowLabError::Parameter("output times must be strictly increasing and >= t0".into()));
    }
    if !guard(u0) {
        return Err(FlowLabError::OdeFailure(format!("initial state {u0} rejected by domain guard")));
    }

    let t_end = *t_out.last().unwrap();
    let mut nodes = Vec::with_capacity(t_out.len() + 32);
    let mut t = t0;
    let mut u = u0;
    let mut k1 = g(u);
    nodes.push((t, u, k1));

    if t_end == t0 {
        return Ok(ScalarSolution { nodes });
    }

    let span = t_end - t0;
    let mut h = (span / 100.0).clamp(1e-8, 0.1);
    let mut out_iter = t_out.iter().copied().peekable();
    // Skip any output time equal to t0 (already recorded).
    while let Some(&tn) = out_iter.peek() {
        if tn <= t0 {
            out_iter.next();
        } else {
            break;
        }
    }
    let mut next_out = match out_iter.next() {
        Some(v) => v,
        None => return Ok(ScalarSolution { nodes }),
    };

    let mut rejected_in_a_row = 0usize;
    let max_steps = 1_000_000usize;
    for _ in 0..max_steps {
        // Clip to the next output time so it is hit exactly.
        let mut clipped = false;
        if t + h >= next_out - 1e-14 * span.abs() {
            h = next_out - t;
            clipped = true;
        }

        let k2 = g(u + h * (A21 * k1));
        let k3 = g(u + h * (A31 * k1 + A32 * k2));
        let k4 = g(u + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = g(u + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = g(u + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let u_new = u + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = g(u_new);
        let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = atol + rtol * u.abs().max(u_new.abs());
        let err_norm = (err / scale).abs();

        if !u_new.is_finite() {
            return Err(FlowLabError::OdeFailure(format!("state became non-finite near t = {t}")));
        }

        if err_norm <= 1.0 {
            t += h;
            u = u_new;
            k1 = k7;
            if !guard(u) {
                return Err(FlowLabError::OdeFailure(format!(
                    "state left its domain at t = {t} (u = {u})"
                )));
            }
            nodes.push((t, u, k1));
            rejected_in_a_row = 0;
            if clipped {
                // Snap to the exact output time to avoid drift.
                nodes.last_mut().unwrap().0 = next_out;
                t = next_out;
                match out_iter.next() {
                    Some(v) => next_out = v,
                    None => return Ok(ScalarSolution { nodes }),
                }
            }
            let grow = 0.9 * err_norm.max(1e-12).powf(-0.2);
            h *= grow.clamp(0.2, 5.0);
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 60 {
                return Err(FlowLabError::OdeFailure(format!("step size collapsed near t = {t}")));
            }
            h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-15 * span {
            return Err(FlowLabError::OdeFailure(format!("step underflow near t = {t}")));
        }
    }
    Err(FlowLabError::OdeFailure("step budget exhausted".into()))
}
