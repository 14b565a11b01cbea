//! Simulate an ensemble of initial points under one shared Brownian path
//! and dump the trajectories as CSV.
//!
//! Every point sees the same noise increments — the common-random-number
//! coupling that makes the differences `X_t(x) - X_t(y)` meaningful — and
//! the whole run is a pure function of `(field, points, seed, dt)`.
//!
//! ```bash
//! cargo run -p flowlab --example flow_simulation
//! ```

use flowlab::brownian::BrownianPath;
use flowlab::fields::{example_field, CorpusField};
use flowlab::flow::{simulate_ensemble, Scheme};
use flowlab::report::write_trajectory_csv;

fn main() -> flowlab::Result<()> {
    let field = example_field(CorpusField::LogDiffusion);
    let path = BrownianPath::generate(2024, 1e-3, 1000, field.dim_noise())?;
    let points: Vec<Vec<f64>> = (1..=7).map(|k| vec![0.04 * k as f64 - 0.16]).collect();
    let ensemble = simulate_ensemble(&field, &points, &path, Scheme::EulerMaruyama)?;

    println!("field: {}   dt = {}   horizon = {}", field.name(), ensemble.dt(), ensemble.time(ensemble.n_steps()));
    println!("{:>6} positions", "t");
    for step in (0..=ensemble.n_steps()).step_by(200) {
        let row: Vec<String> = (0..ensemble.n_points())
            .map(|p| format!("{:>9.5}", ensemble.position(step, p)[0]))
            .collect();
        println!("{:>6.2} {}", ensemble.time(step), row.join(" "));
    }

    let out = std::env::temp_dir().join("flowlab_flow_simulation.csv");
    write_trajectory_csv(&out, &ensemble)?;
    println!("\nfull trajectories written to {}", out.display());
    Ok(())
}
