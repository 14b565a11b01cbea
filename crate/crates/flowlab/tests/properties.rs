//! Property tests for the structural invariants, plus the heavier
//! statistical module invariants that need real replication counts.

use proptest::prelude::*;

use flowlab::brownian::BrownianPath;
use flowlab::fields::{example_field, CorpusField, GrowthSpec};
use flowlab::flow::{simulate_ensemble, Scheme};
use flowlab::lyapunov::{
    escape_probability_bound, noncontact_probability_bound, solve_comparison_ode, ContactTransform,
    EscapeTransform, SolutionMethod,
};
use flowlab::modulus::ModulusSpec;
use flowlab::verify::{check_holder_decay, estimate_pair_moment, Verdict};

fn log_transform() -> ContactTransform {
    ContactTransform::new(ModulusSpec::log())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn phi_contact_decreasing_in_xi(
        a in 1e-12f64..0.36,
        factor in 1.0000001f64..1e6,
    ) {
        let t = log_transform();
        let lo = (a / factor).max(1e-300);
        let hi = a.min(t.modulus().delta_o());
        prop_assume!(lo < hi);
        let phi_lo = t.phi(lo).unwrap();
        let phi_hi = t.phi(hi).unwrap();
        prop_assert!(phi_lo > phi_hi, "phi({lo}) = {phi_lo} <= phi({hi}) = {phi_hi}");
    }

    #[test]
    fn noncontact_bound_is_a_probability_and_monotone(
        xi0 in 1e-8f64..0.36,
        ratio in 1.5f64..1e8,
        c in 0.0f64..4.0,
        horizon in 0.0f64..4.0,
    ) {
        let t = log_transform();
        prop_assume!(xi0 <= t.modulus().delta_o());
        let eps = xi0 / ratio;
        prop_assume!(eps > 0.0);
        let b = noncontact_probability_bound(&t, xi0, eps, c, horizon).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        // Nonincreasing in eps.
        let b_smaller = noncontact_probability_bound(&t, xi0, eps / 2.0, c, horizon).unwrap();
        prop_assert!(b_smaller <= b + 1e-15);
        // Nondecreasing in horizon and C.
        let b_later = noncontact_probability_bound(&t, xi0, eps, c, horizon + 1.0).unwrap();
        prop_assert!(b_later + 1e-15 >= b);
        let b_bigger_c = noncontact_probability_bound(&t, xi0, eps, c + 1.0, horizon).unwrap();
        prop_assert!(b_bigger_c + 1e-15 >= b);
    }

    #[test]
    fn escape_bound_is_a_probability_and_decays(
        x0 in 1.1f64..1e6,
        c in 0.0f64..2.0,
        horizon in 0.0f64..2.0,
    ) {
        let t = EscapeTransform::new(GrowthSpec::log_growth());
        let b = escape_probability_bound(&t, x0, 1.0, c, horizon).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        let b_father = escape_probability_bound(&t, x0 * 2.0, 1.0, c, horizon).unwrap();
        prop_assert!(b_father <= b + 1e-12);
    }

    #[test]
    fn comparison_log_semigroup(
        c in 0.05f64..3.0,
        log_phi0 in -22.0f64..-2.0,
        s in 0.01f64..2.0,
        t in 0.01f64..2.0,
    ) {
        let m = ModulusSpec::log();
        let phi0 = log_phi0.exp().min(m.delta_o() * 0.999);
        let grid = if s < s + t { vec![0.0, s, s + t] } else { vec![0.0, s] };
        let sol = solve_comparison_ode(c, &m, phi0, &grid, SolutionMethod::ClosedForm).unwrap();
        let direct = sol.eval(s + t).unwrap();
        let mid = sol.eval(s).unwrap();
        prop_assume!(mid <= m.delta_o());
        let sol2 = solve_comparison_ode(c, &m, mid, &[0.0, t], SolutionMethod::ClosedForm).unwrap();
        let composed = sol2.eval(t).unwrap();
        prop_assert!(
            (direct - composed).abs() <= 1e-12 * direct.max(1e-300),
            "{direct} vs {composed}"
        );
    }

    #[test]
    fn bridge_refinement_sums_exact_for_random_paths(
        seed in any::<u64>(),
        dt_exp in -12.0f64..2.0,
        n_steps in 1usize..64,
    ) {
        let dt = dt_exp.exp2();
        let p = BrownianPath::generate(seed, dt, n_steps, 1).unwrap();
        let f = p.refine().unwrap();
        for k in 0..n_steps {
            let sum = f.increment(2 * k, 0) + f.increment(2 * k + 1, 0);
            prop_assert_eq!(sum.to_bits(), p.increment(k, 0).to_bits());
        }
    }

    #[test]
    fn permutation_of_initial_points_is_bit_exact(
        seed in any::<u64>(),
        x in -0.3f64..0.3,
        gap in 0.001f64..0.1,
    ) {
        let field = example_field(CorpusField::LogDiffusion);
        let p = BrownianPath::generate(seed, 1e-3, 64, 1).unwrap();
        let points = vec![vec![x], vec![x + gap], vec![x + 2.0 * gap]];
        let permuted = vec![vec![x + 2.0 * gap], vec![x], vec![x + gap]];
        let a = simulate_ensemble(&field, &points, &p, Scheme::EulerMaruyama).unwrap();
        let b = simulate_ensemble(&field, &permuted, &p, Scheme::EulerMaruyama).unwrap();
        let map = [1usize, 2, 0];
        for (i, &pi) in map.iter().enumerate() {
            prop_assert_eq!(
                a.endpoint(i)[0].to_bits(),
                b.endpoint(pi)[0].to_bits()
            );
        }
    }

    #[test]
    fn modulus_positive_and_decreasing_on_domain(
        frac in 1e-12f64..1.0,
    ) {
        for spec in [ModulusSpec::log(), ModulusSpec::log_log()] {
            let s = spec.delta_o() * frac;
            prop_assume!(s > 0.0);
            let r = spec.eval(s).unwrap();
            prop_assert!(r > 0.0);
            let r_smaller = spec.eval(s * 0.5).unwrap();
            prop_assert!(r_smaller > r);
        }
    }
}

proptest! {
    // Numeric ODE runs are costlier; fewer cases.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn comparison_numeric_tracks_closed_form_at_random_parameters(
        c in 0.1f64..2.5,
        log_phi0 in -20.0f64..-3.0,
    ) {
        let m = ModulusSpec::log();
        let phi0 = log_phi0.exp().min(m.delta_o() * 0.999);
        let grid = [0.0, 1.0, 2.5, 4.0];
        let num = solve_comparison_ode(c, &m, phi0, &grid, SolutionMethod::Numeric).unwrap();
        let cf = solve_comparison_ode(c, &m, phi0, &grid, SolutionMethod::ClosedForm).unwrap();
        for &t in &grid {
            let (a, b) = (num.eval(t).unwrap(), cf.eval(t).unwrap());
            prop_assert!((a - b).abs() <= 1e-6 * b.max(1e-300), "t={t}: {a} vs {b}");
        }
    }
}

// ---------------------------------------------------------------------------
// Statistical module invariants (pinned seeds, real replication counts)
// ---------------------------------------------------------------------------

/// Every log-modulus corpus field shows a strictly decreasing fitted
/// exponent with beta(0) within 5% of 2p; Lipschitz corpus fields stay flat.
#[test]
fn holder_decay_signature_across_the_corpus() {
    let seps = [1e-4, 1e-3, 1e-2, 1e-1];

    // Deterministic log-modulus field: exact decay.
    let log_drift = example_field(CorpusField::LogDriftDeterministic);
    let rep =
        check_holder_decay(&log_drift, &[0.0], &seps, 2.0, &[0.0, 0.5, 1.0, 2.0], 2, 1e-3, 7).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "log drift: {:?}", rep);

    // Noisy log-modulus field: the decay is small but resolvable at this
    // replication count (the per-step drop is ~6 standard errors).
    let log_diffusion = example_field(CorpusField::LogDiffusion);
    let rep = check_holder_decay(
        &log_diffusion,
        &[0.0],
        &seps,
        2.0,
        &[0.0, 0.8, 1.6, 2.4],
        2500,
        2e-3,
        77,
    )
    .unwrap();
    assert!(rep.beta_strictly_decreasing, "betas: {:?}", rep.fits.iter().map(|f| f.slope).collect::<Vec<_>>());
    assert!(rep.beta0_matches_power);
    assert_eq!(rep.verdict, Verdict::Pass);

    // Lipschitz corpus fields: flat within 5%.
    for which in [CorpusField::IdentityDrift, CorpusField::LipschitzBaseline] {
        let field = example_field(which);
        let rep =
            check_holder_decay(&field, &[0.0], &seps, 2.0, &[0.0, 0.5, 1.0, 2.0], 2, 1e-3, 7).unwrap();
        assert!(rep.flat_within_5pct, "{}: {:?}", field.name(), rep.fits.iter().map(|f| f.slope).collect::<Vec<_>>());
        assert_eq!(rep.verdict, Verdict::Pass, "{}", field.name());
    }
}

/// Doubling the replication count shrinks the confidence half-width by
/// about sqrt(2).
#[test]
fn estimator_ci_shrinks_like_sqrt_n() {
    let field = example_field(CorpusField::LogDiffusion);
    let a = estimate_pair_moment(&field, &[-0.05], &[0.05], 2.0, 0.5, 500, 1e-3, 300).unwrap();
    let b = estimate_pair_moment(&field, &[-0.05], &[0.05], 2.0, 0.5, 1000, 1e-3, 300).unwrap();
    let ratio = a.ci_halfwidth / b.ci_halfwidth;
    let want = 2f64.sqrt();
    assert!(
        (ratio - want).abs() <= 0.2 * want,
        "CI ratio {ratio} not within 20% of sqrt(2)"
    );
}

/// The moment estimator's interval is genuinely positive for noisy fields
/// and collapses (flagged) only for deterministic ones.
#[test]
fn ci_degeneracy_matches_determinism() {
    let noisy = example_field(CorpusField::LogDiffusion);
    let rep = estimate_pair_moment(&noisy, &[-0.05], &[0.05], 2.0, 0.5, 100, 1e-3, 5).unwrap();
    assert!(rep.ci_halfwidth > 0.0 && !rep.degenerate);

    let deterministic = example_field(CorpusField::LogDriftDeterministic);
    let rep = estimate_pair_moment(&deterministic, &[0.1], &[0.0], 2.0, 0.5, 100, 1e-3, 5).unwrap();
    assert!(rep.ci_halfwidth == 0.0 && rep.degenerate);
}
