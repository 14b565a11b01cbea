//! Command-line front door for the flow laboratory.
//!
//! ```text
//! flowlab simulate        --config exp.cfg [--out DIR] [--seed N] [--replications N]
//! flowlab verify <check>  --config exp.cfg [...]
//! flowlab bounds          --config exp.cfg [...]
//! flowlab corpus list
//! ```
//!
//! Exit codes: 0 success (all hard assertions pass), 1 a check failed,
//! 2 usage/config errors, 3 simulation overflow, 4 domain errors in bounds.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use flowlab::config::ExperimentConfig;
use flowlab::error::FlowLabError;
use flowlab::fields::{
    example_field_with, truncate_field, verify_h1_with_tolerance, CoefficientField, CorpusField,
    FieldParams, GrowthSpec,
};
use flowlab::flow::{refine_until_converged, simulate_ensemble, Scheme};
use flowlab::lyapunov::{
    escape_probability_bound, kolmogorov_feasibility_probe, noncontact_probability_bound,
    solve_comparison_ode, ContactTransform, EscapeTransform, SolutionMethod,
};
use flowlab::modulus::ModulusSpec;
use flowlab::report::{
    write_estimates_csv, write_json, write_trajectory_csv, BoundRecord, BoundsDocument,
    CheckDocument, EstimateRow, SimulationSummary, SCHEMA_VERSION, TOOL_VERSION,
};
use flowlab::verify::{
    check_escape, check_holder_decay, check_homeomorphism_grid, check_nonconfluence,
    check_time_regularity, estimate_pair_moment_with_floor, Verdict,
};
use flowlab::brownian::BrownianPath;

const USAGE: &str = "usage: flowlab <simulate | verify <check> | bounds | corpus list>
        [--config <path>] [--out <dir>] [--seed <u64>] [--replications <n>]

checks: nonconfluence escape holder time-regularity negative-moment
        homeomorphism h1 modulus-conditions";

struct Cli {
    command: String,
    check: Option<String>,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    replications: Option<usize>,
}

fn parse_args(args: &[String]) -> Result<Cli, String> {
    let mut it = args.iter().peekable();
    let command = it.next().cloned().ok_or_else(|| "missing command".to_string())?;
    let mut cli = Cli {
        command: command.clone(),
        check: None,
        config: None,
        out: None,
        seed: None,
        replications: None,
    };
    if command == "verify" || command == "corpus" {
        cli.check = it.next().cloned();
        if cli.check.is_none() {
            return Err(format!("'{command}' needs an argument"));
        }
    }
    while let Some(arg) = it.next() {
        let mut need = |name: &str| -> Result<String, String> {
            it.next().cloned().ok_or_else(|| format!("{name} needs a value"))
        };
        match arg.as_str() {
            "--config" => cli.config = Some(PathBuf::from(need("--config")?)),
            "--out" => cli.out = Some(PathBuf::from(need("--out")?)),
            "--seed" => {
                cli.seed = Some(need("--seed")?.parse().map_err(|_| "--seed must be a u64".to_string())?)
            }
            "--replications" => {
                cli.replications = Some(
                    need("--replications")?
                        .parse()
                        .map_err(|_| "--replications must be an integer".to_string())?,
                )
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    Ok(cli)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}\n{USAGE}");
            return ExitCode::from(2);
        }
    };

    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &FlowLabError) -> u8 {
    match e {
        FlowLabError::Config(_) | FlowLabError::UnknownField(_) => 2,
        FlowLabError::Overflow { .. } => 3,
        FlowLabError::Domain(_) | FlowLabError::ThresholdOrdering(_) => 4,
        _ => 5,
    }
}

fn run(cli: Cli) -> flowlab::Result<ExitCode> {
    if cli.command == "corpus" {
        match cli.check.as_deref() {
            Some("list") => {
                for f in CorpusField::all() {
                    println!("{:24} {}", f.name(), f.description());
                }
                return Ok(ExitCode::SUCCESS);
            }
            other => {
                return Err(FlowLabError::Config(format!(
                    "unknown corpus subcommand '{}'",
                    other.unwrap_or("")
                )))
            }
        }
    }

    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(reps) = cli.replications {
        config.replications = reps;
    }
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("FLOWLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs").join(&config.name));

    match cli.command.as_str() {
        "simulate" => cmd_simulate(&config, &out_dir),
        "verify" => cmd_verify(&config, cli.check.as_deref().unwrap_or(""), &out_dir),
        "bounds" => cmd_bounds(&config, &out_dir),
        other => Err(FlowLabError::Config(format!("unknown command '{other}'"))),
    }
}

fn build_field(config: &ExperimentConfig) -> flowlab::Result<CoefficientField> {
    let which: CorpusField = config.field.name.parse()?;
    let params = FieldParams {
        sigma_scale: config.field.sigma_scale,
        drift_scale: config.field.drift_scale,
    };
    let mut field = example_field_with(which, &params)?;
    if let Some(radius) = config.field.truncate_radius {
        field = truncate_field(&field, radius)?;
    }
    Ok(field)
}

fn write_resolved_config(config: &ExperimentConfig, out_dir: &Path) -> flowlab::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("config.resolved.cfg"), config.serialize())?;
    Ok(())
}

fn cmd_simulate(config: &ExperimentConfig, out_dir: &Path) -> flowlab::Result<ExitCode> {
    let field = build_field(config)?;
    write_resolved_config(config, out_dir)?;
    let points: Vec<Vec<f64>> = config.simulate.points.iter().map(|&x| vec![x]).collect();

    let (ensemble, refinements, converged, last_move) = if config.simulate.refine {
        let out = refine_until_converged(
            &field,
            &points,
            config.seed,
            config.horizon,
            config.dt,
            config.simulate.refine_target,
            config.simulate.max_refinements,
        )?;
        (out.ensemble, Some(out.refinements), Some(out.converged), Some(out.last_move))
    } else {
        let n_steps = ((config.horizon / config.dt).round() as usize).max(1);
        let path = BrownianPath::generate(config.seed, config.dt, n_steps, field.dim_noise())?;
        (simulate_ensemble(&field, &points, &path, Scheme::EulerMaruyama)?, None, None, None)
    };

    let summary = SimulationSummary {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.into(),
        field: field.name().into(),
        seed: config.seed,
        dt: ensemble.dt(),
        n_steps: ensemble.n_steps(),
        horizon: ensemble.time(ensemble.n_steps()),
        scheme: "euler-maruyama".into(),
        initial_points: ensemble.initial_points().to_vec(),
        endpoints: (0..ensemble.n_points()).map(|p| ensemble.endpoint(p).to_vec()).collect(),
        refinements,
        refinement_converged: converged,
        refinement_last_move: last_move,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    if config.simulate.dump_trajectories {
        write_trajectory_csv(&out_dir.join("trajectory.csv"), &ensemble)?;
    }
    println!("simulate: {} points, dt = {}, wrote {}", ensemble.n_points(), ensemble.dt(), out_dir.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(config: &ExperimentConfig, check: &str, out_dir: &Path) -> flowlab::Result<ExitCode> {
    let check = if check.is_empty() {
        config.verify.check.clone().ok_or_else(|| {
            FlowLabError::Config("no check named on the command line or in [verify] check".into())
        })?
    } else {
        check.to_string()
    };
    let field = build_field(config)?;
    write_resolved_config(config, out_dir)?;
    let v = &config.verify;
    let params = serde_json::json!({
        "seed": config.seed,
        "dt": config.dt,
        "horizon": config.horizon,
        "replications": config.replications,
    });

    let mut estimate_rows: Vec<EstimateRow> = Vec::new();
    let verdict = match check.as_str() {
        "nonconfluence" => {
            let (a, b) = v.pair.ok_or_else(|| {
                FlowLabError::Config("nonconfluence needs [verify] pair = a b".into())
            })?;
            let rep = check_nonconfluence(
                &field,
                &[(vec![a], vec![b])],
                config.horizon,
                &v.eps,
                config.replications,
                config.dt,
                config.seed,
            )?;
            for stats in &rep.pairs {
                for (&eps, &f) in stats.eps_grid.iter().zip(&stats.frequencies) {
                    let se = (f * (1.0 - f) / rep.n_replications as f64).sqrt();
                    estimate_rows.push(EstimateRow {
                        t: rep.horizon,
                        abscissa: eps,
                        estimate: f,
                        ci_halfwidth: 1.959963984540054 * se,
                        n: rep.n_replications,
                    });
                }
            }
            let verdict = rep.verdict;
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("nonconfluence", field.name(), params, rep, verdict),
            )?;
            verdict
        }
        "escape" => {
            let rep = check_escape(
                &field,
                &v.x0_grid,
                v.ball_radius,
                config.horizon,
                config.replications,
                config.dt,
                config.seed,
            )?;
            for p in &rep.points {
                estimate_rows.push(EstimateRow {
                    t: rep.horizon,
                    abscissa: p.x0_norm,
                    estimate: p.probability,
                    ci_halfwidth: p.ci_halfwidth,
                    n: rep.n_replications,
                });
            }
            let verdict = rep.verdict;
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("escape", field.name(), params, rep, verdict),
            )?;
            verdict
        }
        "holder" => {
            let mut reports = Vec::new();
            let mut verdict = Verdict::Pass;
            for &power in &v.powers {
                let rep = check_holder_decay(
                    &field,
                    &[0.0],
                    &v.separations,
                    power,
                    &v.times,
                    config.replications.max(1),
                    config.dt,
                    config.seed,
                )?;
                for fit in &rep.fits {
                    for ((&s, &m), &ci) in
                        fit.separations.iter().zip(&fit.moments).zip(&fit.moment_ci)
                    {
                        estimate_rows.push(EstimateRow {
                            t: fit.t,
                            abscissa: s,
                            estimate: m,
                            ci_halfwidth: ci,
                            n: config.replications.max(1),
                        });
                    }
                }
                if rep.verdict == Verdict::Fail {
                    verdict = Verdict::Fail;
                }
                reports.push(rep);
            }
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("holder", field.name(), params, reports, verdict),
            )?;
            verdict
        }
        "time-regularity" => {
            let pairs: Vec<(f64, f64)> = if v.time_pairs.is_empty() {
                [1.0 / 64.0, 1.0 / 16.0, 0.25, 1.0]
                    .iter()
                    .map(|&frac| (0.0, frac * config.horizon))
                    .collect()
            } else {
                v.time_pairs.clone()
            };
            let x0 = v.pair.map(|p| p.0).unwrap_or(0.0);
            let p_half = v.moment_power.abs() / 2.0;
            let rep = check_time_regularity(
                &field,
                &[x0],
                p_half,
                &pairs,
                config.replications,
                config.dt,
                config.seed,
            )?;
            for (&g, &m) in rep.gaps.iter().zip(&rep.estimates) {
                estimate_rows.push(EstimateRow {
                    t: g,
                    abscissa: 0.0,
                    estimate: m,
                    ci_halfwidth: 0.0,
                    n: config.replications,
                });
            }
            let verdict = rep.verdict;
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("time-regularity", field.name(), params, rep, verdict),
            )?;
            verdict
        }
        "negative-moment" => {
            let (a, b) = v.pair.ok_or_else(|| {
                FlowLabError::Config("negative-moment needs [verify] pair = a b".into())
            })?;
            let rep = estimate_pair_moment_with_floor(
                &field,
                &[a],
                &[b],
                v.moment_power,
                v.moment_t,
                config.replications.max(2),
                config.dt,
                config.seed,
                v.delta,
            )?;
            estimate_rows.push(EstimateRow {
                t: rep.t,
                abscissa: (a - b).abs(),
                estimate: rep.estimate,
                ci_halfwidth: rep.ci_halfwidth,
                n: rep.n_replications,
            });
            let verdict = if rep.estimate.is_finite() { Verdict::Pass } else { Verdict::Fail };
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("negative-moment", field.name(), params, rep, verdict),
            )?;
            verdict
        }
        "homeomorphism" => {
            // Default grid sized to the field scale, so the delta floor
            // stays well below the grid spacing.
            let scale = field.support_radius().unwrap_or(2.5).max(0.5);
            let grid = v
                .grid
                .clone()
                .unwrap_or(flowlab::config::GridSpec { lo: -0.2 * scale, hi: 0.2 * scale, n: 50 })
                .points();
            let rep = check_homeomorphism_grid(&field, &grid, config.horizon, config.dt, config.seed, v.delta)?;
            let verdict = rep.verdict;
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("homeomorphism", field.name(), params, rep, verdict),
            )?;
            verdict
        }
        "h1" => {
            let rep = verify_h1_with_tolerance(&field, v.h1_pairs, v.h1_radius, config.seed, 0.05)?;
            let verdict = if rep.pass { Verdict::Pass } else { Verdict::Fail };
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("h1", field.name(), params, rep, verdict),
            )?;
            verdict
        }
        "modulus-conditions" => {
            let grid = field.modulus().geometric_grid(12.0, 25);
            let rep = field.modulus().check_conditions(&grid)?;
            let verdict = if rep.unbounded_at_zero && rep.integral_diverges && rep.slope_ratio_vanishes {
                Verdict::Pass
            } else {
                Verdict::ReportOnly
            };
            write_json(
                &out_dir.join("verdict.json"),
                &CheckDocument::new("modulus-conditions", field.name(), params, rep, verdict),
            )?;
            verdict
        }
        other => {
            return Err(FlowLabError::Config(format!(
                "unknown check '{other}' (see flowlab --help)"
            )))
        }
    };

    if !estimate_rows.is_empty() {
        write_estimates_csv(&out_dir.join("estimates.csv"), &estimate_rows)?;
    }
    println!("verify {check}: {verdict:?} (outputs in {})", out_dir.display());
    Ok(if verdict == Verdict::Fail { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn build_modulus(b: &flowlab::config::BoundsConfig) -> flowlab::Result<ModulusSpec> {
    match b.modulus.as_str() {
        "Log" => match b.delta_o {
            Some(d) => ModulusSpec::log_with(b.scale, d),
            None if b.scale == 1.0 => Ok(ModulusSpec::log()),
            None => ModulusSpec::log_with(b.scale, flowlab::modulus::DEFAULT_LOG_DELTA),
        },
        "LogLog" => match b.delta_o {
            Some(d) => ModulusSpec::log_log_with(b.scale, d),
            None if b.scale == 1.0 => Ok(ModulusSpec::log_log()),
            None => ModulusSpec::log_log_with(b.scale, flowlab::modulus::DEFAULT_LOGLOG_DELTA),
        },
        "Constant" => match b.delta_o {
            Some(d) => ModulusSpec::constant_with(b.scale, d),
            None => ModulusSpec::constant(b.scale),
        },
        other => Err(FlowLabError::Config(format!("unknown modulus family '{other}'"))),
    }
}

fn build_growth(spec: &str) -> flowlab::Result<GrowthSpec> {
    if spec == "log" {
        return Ok(GrowthSpec::log_growth());
    }
    if let Some(c) = spec.strip_prefix("constant:") {
        let c: f64 = c
            .parse()
            .map_err(|_| FlowLabError::Config(format!("bad growth constant '{c}'")))?;
        return GrowthSpec::constant(c);
    }
    Err(FlowLabError::Config(format!("unknown growth spec '{spec}' (log | constant:<c>)")))
}

fn cmd_bounds(config: &ExperimentConfig, out_dir: &Path) -> flowlab::Result<ExitCode> {
    let b = &config.bounds;
    write_resolved_config(config, out_dir)?;
    let modulus = build_modulus(b)?;
    let contact = ContactTransform::new(modulus.clone());
    let mut records = Vec::new();

    for &xi in &b.xi {
        let psi = contact.psi(xi)?;
        let method = if contact.psi_closed_form(xi).is_some() { "closed_form" } else { "quadrature" };
        records.push(BoundRecord {
            operation: "psi_contact".into(),
            inputs: serde_json::json!({"modulus": b.modulus, "delta_o": modulus.delta_o(), "scale": b.scale, "xi": xi}),
            value: serde_json::json!(psi),
            method: method.into(),
        });
        records.push(BoundRecord {
            operation: "phi_contact".into(),
            inputs: serde_json::json!({"modulus": b.modulus, "delta_o": modulus.delta_o(), "scale": b.scale, "xi": xi}),
            value: serde_json::json!(psi.exp()),
            method: method.into(),
        });
    }

    if let Some(xi0) = b.xi0 {
        for &eps in &b.eps {
            let bound = noncontact_probability_bound(&contact, xi0, eps, b.c, b.horizon)?;
            records.push(BoundRecord {
                operation: "noncontact_probability_bound".into(),
                inputs: serde_json::json!({"xi0": xi0, "eps": eps, "c": b.c, "horizon": b.horizon}),
                value: serde_json::json!(bound),
                method: "transform_ratio".into(),
            });
        }
    }

    if !b.x0.is_empty() {
        let growth = build_growth(&b.growth)?;
        let escape = EscapeTransform::new(growth);
        for &x0 in &b.x0 {
            let bound = escape_probability_bound(&escape, x0, b.radius, b.c, b.horizon)?;
            records.push(BoundRecord {
                operation: "escape_probability_bound".into(),
                inputs: serde_json::json!({"x0": x0, "radius": b.radius, "c": b.c, "horizon": b.horizon, "growth": b.growth}),
                value: serde_json::json!(bound),
                method: "transform_ratio".into(),
            });
        }
    }

    if let Some(phi0) = b.phi0 {
        if b.comparison_times.is_empty() {
            return Err(FlowLabError::Config("phi0 given but comparison_times empty".into()));
        }
        for method in [SolutionMethod::ClosedForm, SolutionMethod::Numeric] {
            let sol = solve_comparison_ode(b.c, &modulus, phi0, &b.comparison_times, method);
            match sol {
                Ok(sol) => {
                    let values: Vec<f64> = b
                        .comparison_times
                        .iter()
                        .map(|&t| sol.eval(t))
                        .collect::<flowlab::Result<_>>()?;
                    records.push(BoundRecord {
                        operation: "solve_comparison_ode".into(),
                        inputs: serde_json::json!({"c_p": b.c, "phi0": phi0, "t": b.comparison_times, "modulus": b.modulus}),
                        value: serde_json::json!({
                            "phi": values,
                            "delta_o_crossing": sol.delta_o_crossing(),
                        }),
                        method: format!("{method:?}").to_lowercase(),
                    });
                }
                Err(FlowLabError::Parameter(_)) if method == SolutionMethod::ClosedForm => {
                    // No closed form for this family; numeric still runs.
                }
                Err(e) => return Err(e),
            }
        }
    }

    if !b.log_inv_phi0.is_empty() {
        let rep = kolmogorov_feasibility_probe(&b.log_inv_phi0, b.c, b.probe_t)?;
        records.push(BoundRecord {
            operation: "kolmogorov_feasibility_probe".into(),
            inputs: serde_json::json!({"log_inv_phi0": b.log_inv_phi0, "c_p": b.c, "t": b.probe_t}),
            value: serde_json::to_value(&rep).expect("probe serializes"),
            method: "closed_form".into(),
        });
    }

    if records.is_empty() {
        return Err(FlowLabError::Config(
            "[bounds] requests nothing; set xi, xi0+eps, x0, phi0 or log_inv_phi0".into(),
        ));
    }
    write_json(&out_dir.join("bounds.json"), &BoundsDocument::new(records))?;
    println!("bounds: wrote {}", out_dir.join("bounds.json").display());
    Ok(ExitCode::SUCCESS)
}
