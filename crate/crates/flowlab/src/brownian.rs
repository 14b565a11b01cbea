//! Seeded Brownian increments with exact midpoint-bridge refinement.
//!
//! A [`BrownianPath`] holds the increments of an `m`-dimensional Brownian
//! motion on a uniform grid. Paths are pure functions of
//! `(seed, dt, n_steps, m)`: every Gaussian draw is keyed by
//! `(level, step, component)` through the counter-based generator in
//! [`crate::rng`], so identical parameters give bit-identical increments on
//! any machine and any thread count.
//!
//! Refinement halves `dt` by midpoint bridge sampling: a coarse increment
//! `D` over `[t, t+h]` splits into `D/2 + Z` and `D/2 - Z` with
//! `Z ~ N(0, h/4)` keyed by the coarse step index. Because the bridge noise
//! is keyed, refining is consistent across levels — a dt-convergence study
//! runs on the *same* underlying Brownian path, which is what pathwise
//! statements presume.
//!
//! To make the refinement contract exact rather than approximate, every
//! increment is snapped to a dyadic lattice (spacing about `2^-45` relative
//! to the step scale, halved per level). Sums of lattice multiples of this
//! size are exact in f64, so
//!
//! ```text
//! fine[2k] + fine[2k+1] == coarse[k]      (bit-exact)
//! ```
//!
//! holds by construction, and the last floating-point bits — the ones where
//! platform `ln`/`sqrt` implementations could in principle disagree — are
//! discarded instead of trusted. The lattice offset is ~1e-13 relative, far
//! below both discretization error and Monte Carlo noise.

use crate::error::{FlowLabError, Result};
use crate::rng::normal_at;

const LATTICE_BITS: i32 = 45;
const MAX_LEVEL: u32 = 20;

/// Discretized Brownian increments on a uniform time grid.
#[derive(Debug, Clone)]
pub struct BrownianPath {
    seed: u64,
    dt: f64,
    n_steps: usize,
    m: usize,
    level: u32,
    lattice: f64,
    /// Row-major `(step, component)`.
    increments: Vec<f64>,
}

#[inline]
fn quantize(x: f64, lattice: f64) -> f64 {
    // lattice is a power of two: the scale, round and rescale are all exact.
    (x / lattice).round() * lattice
}

/// Key layout: level in the top byte block, component in the low byte.
#[inline]
fn draw_key(level: u32, step: usize, component: usize) -> u64 {
    ((level as u64) << 56) | ((step as u64) << 8) | component as u64
}

impl BrownianPath {
    /// Generate a fresh level-0 path with `N(0, dt)` increments.
    pub fn generate(seed: u64, dt: f64, n_steps: usize, m: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FlowLabError::Parameter(format!("dt must be positive, got {dt}")));
        }
        if n_steps == 0 || n_steps >= 1 << 47 {
            return Err(FlowLabError::Parameter(format!("n_steps must be in [1, 2^47), got {n_steps}")));
        }
        if m == 0 || m > 255 {
            return Err(FlowLabError::Parameter(format!("noise dimension must be in [1, 255], got {m}")));
        }
        let sd = dt.sqrt();
        // Power-of-two lattice tied to the step scale.
        let lattice = exp2i(sd.log2().floor() as i32 - LATTICE_BITS);
        let mut increments = Vec::with_capacity(n_steps * m);
        for step in 0..n_steps {
            for comp in 0..m {
                increments.push(quantize(sd * normal_at(seed, draw_key(0, step, comp)), lattice));
            }
        }
        Ok(Self { seed, dt, n_steps, m, level: 0, lattice, increments })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn noise_dim(&self) -> usize {
        self.m
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// Increment of component `component` over step `step`.
    #[inline]
    pub fn increment(&self, step: usize, component: usize) -> f64 {
        self.increments[step * self.m + component]
    }

    /// All `m` components of step `step`.
    #[inline]
    pub fn step_increments(&self, step: usize) -> &[f64] {
        &self.increments[step * self.m..(step + 1) * self.m]
    }

    /// Midpoint-bridge refinement: same Brownian path at half the step.
    pub fn refine(&self) -> Result<Self> {
        if self.level >= MAX_LEVEL {
            return Err(FlowLabError::Parameter(format!(
                "refinement level cap {MAX_LEVEL} reached"
            )));
        }
        let fine_lattice = self.lattice * 0.5;
        let bridge_sd = 0.5 * self.dt.sqrt();
        let mut fine = vec![0.0; self.increments.len() * 2];
        for step in 0..self.n_steps {
            for comp in 0..self.m {
                let half = 0.5 * self.increment(step, comp);
                let z = quantize(
                    bridge_sd * normal_at(self.seed, draw_key(self.level + 1, step, comp)),
                    fine_lattice,
                );
                // Both halves are lattice multiples, so their sum reproduces
                // the coarse increment exactly.
                fine[(2 * step) * self.m + comp] = half + z;
                fine[(2 * step + 1) * self.m + comp] = half - z;
            }
        }
        Ok(Self {
            seed: self.seed,
            dt: self.dt * 0.5,
            n_steps: self.n_steps * 2,
            m: self.m,
            level: self.level + 1,
            lattice: fine_lattice,
            increments: fine,
        })
    }
}

#[inline]
fn exp2i(e: i32) -> f64 {
    f64::from_bits(((e + 1023) as u64) << 52)
}
