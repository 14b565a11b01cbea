//! The decaying Hölder exponent of a log-Lipschitz flow map.
//!
//! Fitting `log E|X_t(x0+s) - X_t(x0)|^{2p}` against `log s` gives the
//! scaling exponent `beta(t)`. For a Lipschitz field it stays flat at `2p`;
//! for the log-drift field it decays exactly like `2p e^{-t}` — the flow
//! map loses regularity as time passes, the signature of log-Lipschitz
//! coefficients.
//!
//! ```bash
//! cargo run -p flowlab --example holder_exponent
//! ```

use flowlab::fields::{example_field, CorpusField};
use flowlab::verify::check_holder_decay;

fn main() -> flowlab::Result<()> {
    let separations = [1e-4, 1e-3, 1e-2, 1e-1];
    let times = [0.0, 0.5, 1.0, 2.0];
    for which in [CorpusField::LipschitzBaseline, CorpusField::LogDriftDeterministic] {
        let field = example_field(which);
        let rep = check_holder_decay(&field, &[0.0], &separations, 2.0, &times, 2, 1e-4, 11)?;
        println!("{} (2p = 2, expectation: {:?}):", field.name(), rep.expectation);
        println!("  {:>5} {:>10} {:>12} {:>8}", "t", "beta(t)", "2p e^-t", "R^2");
        for fit in &rep.fits {
            println!(
                "  {:>5.2} {:>10.5} {:>12.5} {:>8.5}",
                fit.t,
                fit.slope,
                2.0 * (-fit.t).exp(),
                fit.r_squared
            );
        }
        if let Some(rate) = rep.fitted_decay_rate {
            println!("  fitted decay rate of beta(t): {rate:.4}");
        }
        println!("  verdict: {:?}\n", rep.verdict);
    }
    Ok(())
}
