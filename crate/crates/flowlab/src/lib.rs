//! flowlab: a simulation laboratory for stochastic flows with non-Lipschitz
//! coefficients.
//!
//! The crate simulates the Ito equation `dX = sigma(X) dW + b(X) dt` for
//! whole ensembles of initial points driven by one shared Brownian path
//! (common-random-number coupling), and confronts the simulated flows with
//! the structural properties such equations are known to have when the
//! coefficients are log-Lipschitz rather than Lipschitz: trajectories from
//! distinct starts never meet, far-away starts stay far, the flow map is
//! Hölder with a time-decaying exponent, and on compact support the flow is
//! injective with controlled inverse distances.
//!
//! | Module | What lives there |
//! |--------|------------------|
//! | [`modulus`] | Continuity-modulus families `r` and their structural checks |
//! | [`fields`] | Coefficient fields `(sigma, b)`, the example corpus, truncation |
//! | [`lyapunov`] | Exponential transforms, probability bounds, the comparison ODE |
//! | [`brownian`] | Seeded Brownian increments with exact bridge refinement |
//! | [`flow`] | Euler–Maruyama ensembles, dt-refinement, hitting times |
//! | [`verify`] | Monte Carlo estimators and pass/fail property checks |
//! | [`rng`] | Counter-based draws behind every random quantity |
//! | [`config`] | Experiment configuration files |
//! | [`report`] | JSON/CSV emission |
//!
//! Every random quantity is a pure function of the experiment seed; rerunning
//! a configuration reproduces results bit for bit.

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`: the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brownian;
pub mod config;
pub mod error;
pub mod fields;
pub mod flow;
pub mod lyapunov;
pub mod modulus;
mod ode45;
mod quadrature;
pub mod report;
pub mod rng;
mod stats;
pub mod verify;

pub use error::{FlowLabError, Result};
pub use fields::{
    example_field, example_field_by_name, truncate_field, CoefficientField, CorpusField, GrowthSpec,
};
pub use modulus::{ModulusFamily, ModulusSpec};
