//! Escape to infinity: far-away starts stay far, empirically.
//!
//! On the growth-envelope field the probability of returning inside the
//! unit ball before the horizon decays with the starting radius; the
//! contracting baseline is the negative control where every start comes
//! back once the horizon exceeds `log(|x0|/R)`.
//!
//! ```bash
//! cargo run -p flowlab --example escape_probability
//! ```

use flowlab::fields::{example_field, CorpusField, GrowthSpec};
use flowlab::verify::check_escape;

fn main() -> flowlab::Result<()> {
    let field = example_field(CorpusField::EscapeGrowthField);
    let rep = check_escape(&field, &[1.2, 1.5, 2.0, 3.0], 1.0, 1.0, 600, 1e-3, 512)?;
    println!("{} (horizon 1):", field.name());
    println!("  {:>6} {:>14} {:>10} {:>12}", "|x0|", "P(return<=R)", "ci", "bound");
    for p in &rep.points {
        println!("  {:>6} {:>14.4} {:>10.4} {:>12.4}", p.x0_norm, p.probability, p.ci_halfwidth, p.bound);
    }
    println!("  monotone within CI: {}   verdict: {:?}\n", rep.monotone_within_ci, rep.verdict);

    // Negative control: b = -x pulls everything back; horizon 2 > log 5.
    let control = example_field(CorpusField::LipschitzBaseline).with_growth(GrowthSpec::constant(1.0)?);
    let rep = check_escape(&control, &[1.5, 2.0, 3.0, 5.0], 1.0, 2.0, 100, 1e-3, 512)?;
    println!("negative control ({}):", control.name());
    for p in &rep.points {
        println!("  |x0| = {:>4}   P(return) = {:.3}", p.x0_norm, p.probability);
    }
    println!("  (all ones: contraction reaches the ball deterministically)");
    Ok(())
}
