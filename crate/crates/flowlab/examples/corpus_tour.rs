//! Tour of the built-in coefficient fields: dimensions, declared moduli,
//! and an empirical check that each field respects its declared continuity
//! bound down to separations of 1e-12.
//!
//! ```bash
//! cargo run -p flowlab --example corpus_tour
//! ```

use flowlab::fields::{example_field, verify_h1_empirically, CorpusField};

fn main() -> flowlab::Result<()> {
    println!("{:<24} {:>4} {:>8} {:>10} {:>10}", "field", "dim", "support", "modulus", "constant");
    for which in CorpusField::all() {
        let f = example_field(which);
        println!(
            "{:<24} {:>4} {:>8} {:>10} {:>10}",
            f.name(),
            f.dim_state(),
            f.support_radius().map_or("inf".into(), |r| format!("{r}")),
            f.modulus().family().name(),
            f.modulus_constant(),
        );
    }

    println!("\nempirical continuity ratios (10^4 pairs, separations down to 1e-12):");
    for which in CorpusField::all() {
        let f = example_field(which);
        let rep = verify_h1_empirically(&f, 10_000, 4.0, 2024)?;
        println!(
            "  {:<24} sigma ratio {:>9.4}  drift ratio {:>9.4}  declared {:>5}  {}",
            f.name(),
            rep.max_sigma_ratio,
            rep.max_drift_ratio,
            rep.declared_constant,
            if rep.pass { "ok" } else { "VIOLATED" },
        );
    }
    Ok(())
}
