//! dt-refinement against an exact flow.
//!
//! The log-drift field integrates `x' = x log(1/x)` whose flow is exactly
//! `x0^(exp(-t))` on `(0, 1)`. Halving dt refines the same Brownian bridge
//! (trivial here, the field is deterministic), so the endpoint converges to
//! the true flow and the refinement loop can certify its own accuracy.
//!
//! ```bash
//! cargo run -p flowlab --example dt_refinement
//! ```

use flowlab::fields::{example_field, CorpusField};
use flowlab::flow::refine_until_converged;

fn main() -> flowlab::Result<()> {
    let field = example_field(CorpusField::LogDriftDeterministic);
    println!("{:>6} {:>5} {:>14} {:>14} {:>10} {:>12}", "x0", "T", "endpoint", "exact", "rel err", "achieved dt");
    for &x0 in &[0.01, 0.1, 0.3] {
        for &t in &[0.5, 1.0, 2.0] {
            let out = refine_until_converged(&field, &[vec![x0]], 7, t, 0.02, 1e-4, 12)?;
            let got = out.ensemble.endpoint(0)[0];
            let exact = x0.powf((-t).exp());
            println!(
                "{x0:>6} {t:>5} {got:>14.8} {exact:>14.8} {:>10.2e} {:>12.3e}",
                (got - exact).abs() / exact,
                out.achieved_dt,
            );
        }
    }
    println!("\n(each row stops once successive refinements move the endpoint < 1e-4 relative)");
    Ok(())
}
