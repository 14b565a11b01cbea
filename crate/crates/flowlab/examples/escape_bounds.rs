//! The escape transform: how unlikely a far-away start is to come back.
//!
//! For growth envelopes `rho` with a divergent `1/(s f(s)+1)` integral, the
//! bound `e^{Ct} exp(-int_{R^2}^{|x0|^2})` tends to zero as `|x0|` grows.
//! The log envelope diverges only like log log, so the decay is slow —
//! visible here over astronomically spaced starting radii.
//!
//! ```bash
//! cargo run -p flowlab --example escape_bounds
//! ```

use flowlab::fields::GrowthSpec;
use flowlab::lyapunov::{escape_probability_bound, EscapeTransform};

fn main() -> flowlab::Result<()> {
    for (name, growth) in [
        ("rho = 0 (degenerate)", GrowthSpec::constant(0.0)?),
        ("rho = 1", GrowthSpec::constant(1.0)?),
        ("rho = 1 + log s", GrowthSpec::log_growth()),
    ] {
        let transform = EscapeTransform::new(growth);
        println!("{name}: P(inf_s |X_s| <= 1 before t = 1), C = 0.5");
        for &x0 in &[2.0, 4.0, 16.0, 256.0, 1e8, 1e75] {
            let bound = escape_probability_bound(&transform, x0, 1.0, 0.5, 1.0)?;
            println!("  |x0| = {x0:>8.1e}   bound = {bound:.6e}");
        }
        println!();
    }
    Ok(())
}
