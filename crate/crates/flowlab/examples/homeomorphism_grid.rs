//! Injectivity of the flow map on a grid: the computable core of the
//! homeomorphism property.
//!
//! One common-noise run carries a whole grid of initial points. In one
//! dimension the order of the points must be preserved at every output
//! step; in any dimension the inverse pair distance `1/|X_t(x)-X_t(y)|`
//! must stay bounded for pairs that start at least `delta` apart.
//!
//! ```bash
//! cargo run -p flowlab --example homeomorphism_grid
//! ```

use flowlab::fields::{example_field, CorpusField};
use flowlab::verify::check_homeomorphism_grid;

fn span(which: CorpusField) -> (f64, f64) {
    // Grids sized to each field's natural scale, so the delta floor
    // (1e-3 times the support scale) sits well below the grid spacing.
    match which {
        CorpusField::ZeroField => (0.02, 0.1),
        CorpusField::IdentityDrift | CorpusField::LipschitzBaseline => (-0.5, 0.5),
        CorpusField::LogDriftDeterministic => (0.02, 0.98),
        CorpusField::LogDiffusion => (-0.4, 0.4),
        CorpusField::EscapeGrowthField => (1.0, 3.0),
    }
}

fn main() -> flowlab::Result<()> {
    for which in CorpusField::all() {
        let (lo, hi) = span(which);
        let grid: Vec<Vec<f64>> = (0..50).map(|k| vec![lo + (hi - lo) * k as f64 / 49.0]).collect();
        let field = example_field(which);
        let rep = check_homeomorphism_grid(&field, &grid, 1.0, 1e-3, 31, None)?;
        println!(
            "{:<24} order {:>5} | max 1/dist {:>10.2} (ceiling {:>8.0}) | edge distortion [{:.4}, {:.4}] | {:?}",
            field.name(),
            rep.order_preserved.map_or("n/a".into(), |b| b.to_string()),
            rep.max_inverse_distance,
            rep.inverse_distance_ceiling,
            rep.min_edge_distortion,
            rep.max_edge_distortion,
            rep.verdict,
        );
    }
    Ok(())
}
