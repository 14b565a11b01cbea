//! Experiment configuration files.
//!
//! A deliberately plain format: `key = value` lines grouped under
//! `[section]` headers, `#` comments, whitespace-separated numeric lists,
//! `a:b` pairs and `lo:hi:n` grid ranges. One file describes one
//! experiment. Parsing is strict — an unknown key is an error naming the
//! key — and serialization is canonical, so every run can write its
//! resolved configuration next to its outputs and a rerun from that file
//! reproduces the run exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{FlowLabError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Linearly spaced 1D grid description `lo:hi:n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<Vec<f64>> {
        if self.n == 1 {
            return vec![vec![self.lo]];
        }
        (0..self.n)
            .map(|k| vec![self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub name: String,
    pub sigma_scale: Option<f64>,
    pub drift_scale: Option<f64>,
    /// Extra compact-support truncation applied after construction.
    pub truncate_radius: Option<f64>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { name: "ZeroField".into(), sigma_scale: None, drift_scale: None, truncate_radius: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    /// Initial points (scalar state coordinates).
    pub points: Vec<f64>,
    /// Run the dt-refinement loop instead of a single pass.
    pub refine: bool,
    pub refine_target: f64,
    pub max_refinements: usize,
    pub dump_trajectories: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            points: vec![0.1],
            refine: false,
            refine_target: 1e-4,
            max_refinements: crate::flow::DEFAULT_MAX_REFINEMENTS,
            dump_trajectories: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub check: Option<String>,
    /// Scalar pair for contact/moment checks.
    pub pair: Option<(f64, f64)>,
    /// Contact levels (squared-distance scale), any order.
    pub eps: Vec<f64>,
    pub separations: Vec<f64>,
    /// Moment powers `2p` for the exponent fit.
    pub powers: Vec<f64>,
    /// Output times for exponent fits.
    pub times: Vec<f64>,
    /// `(s, t)` pairs for the time-regularity check.
    pub time_pairs: Vec<(f64, f64)>,
    /// Starting radii for the escape check.
    pub x0_grid: Vec<f64>,
    pub ball_radius: f64,
    /// 1D grid for the homeomorphism check.
    pub grid: Option<GridSpec>,
    /// Pair-separation floor; defaults per field when absent.
    pub delta: Option<f64>,
    /// Power for the single-moment (negative-moment) check.
    pub moment_power: f64,
    pub moment_t: f64,
    /// Half-width of the sampling box for the (H1) ratio check.
    pub h1_radius: f64,
    pub h1_pairs: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            check: None,
            pair: None,
            eps: vec![1e-4, 1e-6, 1e-8, 1e-10, 1e-12],
            separations: vec![1e-4, 1e-3, 1e-2, 1e-1],
            powers: vec![2.0, 4.0],
            times: vec![0.0, 0.5, 1.0, 2.0],
            time_pairs: Vec::new(),
            x0_grid: vec![1.5, 2.0, 3.0, 5.0],
            ball_radius: 1.0,
            grid: None,
            delta: None,
            moment_power: -2.0,
            moment_t: 1.0,
            h1_radius: 4.0,
            h1_pairs: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsConfig {
    /// Modulus family for contact-side records: Log | LogLog | Constant.
    pub modulus: String,
    pub delta_o: Option<f64>,
    pub scale: f64,
    /// Growth family for escape records: `log` or `constant:<c>`.
    pub growth: String,
    pub c: f64,
    pub horizon: f64,
    /// Evaluation grid for psi/phi records.
    pub xi: Vec<f64>,
    /// Non-contact bound request: initial squared separation + levels.
    pub xi0: Option<f64>,
    pub eps: Vec<f64>,
    /// Escape bound request.
    pub x0: Vec<f64>,
    pub radius: f64,
    /// Comparison-envelope request.
    pub phi0: Option<f64>,
    pub comparison_times: Vec<f64>,
    /// Feasibility probe request (log(1/phi0) grid).
    pub log_inv_phi0: Vec<f64>,
    pub probe_t: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            modulus: "Log".into(),
            delta_o: None,
            scale: 1.0,
            growth: "log".into(),
            c: 1.0,
            horizon: 1.0,
            xi: Vec::new(),
            xi0: None,
            eps: Vec::new(),
            x0: Vec::new(),
            radius: 1.0,
            phi0: None,
            comparison_times: Vec::new(),
            log_inv_phi0: Vec::new(),
            probe_t: 1.0,
        }
    }
}

/// Everything one run needs, resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub dt: f64,
    pub horizon: f64,
    pub replications: usize,
    pub field: FieldConfig,
    pub simulate: SimulateConfig,
    pub verify: VerifyConfig,
    pub bounds: BoundsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            seed: 42,
            dt: 1e-3,
            horizon: 1.0,
            replications: 100,
            field: FieldConfig::default(),
            simulate: SimulateConfig::default(),
            verify: VerifyConfig::default(),
            bounds: BoundsConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| bad(lineno, "unterminated section header"))?;
                section = name.trim().to_string();
                if !matches!(section.as_str(), "experiment" | "field" | "simulate" | "verify" | "bounds") {
                    return Err(FlowLabError::Config(format!(
                        "line {}: unknown section [{section}]",
                        lineno + 1
                    )));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(lineno, "expected 'key = value'"))?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply(&section, key, value).map_err(|e| match e {
                FlowLabError::Config(msg) => {
                    FlowLabError::Config(format!("line {}: {msg}", lineno + 1))
                }
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        match (section, key) {
            ("", "schema_version") => {
                let v: u32 = parse_num(key, value)?;
                if v != SCHEMA_VERSION {
                    return Err(FlowLabError::Config(format!(
                        "unsupported schema_version {v} (tool speaks {SCHEMA_VERSION})"
                    )));
                }
            }
            ("experiment", "name") => self.name = value.to_string(),
            ("experiment", "seed") => self.seed = parse_num(key, value)?,
            ("experiment", "dt") => self.dt = parse_f64(key, value)?,
            ("experiment", "horizon") => self.horizon = parse_f64(key, value)?,
            ("experiment", "replications") => self.replications = parse_num(key, value)?,
            ("field", "name") => self.field.name = value.to_string(),
            ("field", "sigma_scale") => self.field.sigma_scale = Some(parse_f64(key, value)?),
            ("field", "drift_scale") => self.field.drift_scale = Some(parse_f64(key, value)?),
            ("field", "truncate_radius") => self.field.truncate_radius = Some(parse_f64(key, value)?),
            ("simulate", "points") => self.simulate.points = parse_list(key, value)?,
            ("simulate", "refine") => self.simulate.refine = parse_bool(key, value)?,
            ("simulate", "refine_target") => self.simulate.refine_target = parse_f64(key, value)?,
            ("simulate", "max_refinements") => self.simulate.max_refinements = parse_num(key, value)?,
            ("simulate", "dump_trajectories") => {
                self.simulate.dump_trajectories = parse_bool(key, value)?
            }
            ("verify", "check") => self.verify.check = Some(value.to_string()),
            ("verify", "pair") => {
                let v = parse_list(key, value)?;
                if v.len() != 2 {
                    return Err(FlowLabError::Config(format!("key 'pair' needs exactly 2 values, got {}", v.len())));
                }
                self.verify.pair = Some((v[0], v[1]));
            }
            ("verify", "eps") => self.verify.eps = parse_list(key, value)?,
            ("verify", "separations") => self.verify.separations = parse_list(key, value)?,
            ("verify", "powers") => self.verify.powers = parse_list(key, value)?,
            ("verify", "times") => self.verify.times = parse_list(key, value)?,
            ("verify", "time_pairs") => self.verify.time_pairs = parse_pairs(key, value)?,
            ("verify", "x0_grid") => self.verify.x0_grid = parse_list(key, value)?,
            ("verify", "ball_radius") => self.verify.ball_radius = parse_f64(key, value)?,
            ("verify", "grid") => self.verify.grid = Some(parse_grid(key, value)?),
            ("verify", "delta") => self.verify.delta = Some(parse_f64(key, value)?),
            ("verify", "moment_power") => self.verify.moment_power = parse_f64(key, value)?,
            ("verify", "moment_t") => self.verify.moment_t = parse_f64(key, value)?,
            ("verify", "h1_radius") => self.verify.h1_radius = parse_f64(key, value)?,
            ("verify", "h1_pairs") => self.verify.h1_pairs = parse_num(key, value)?,
            ("bounds", "modulus") => self.bounds.modulus = value.to_string(),
            ("bounds", "delta_o") => self.bounds.delta_o = Some(parse_f64(key, value)?),
            ("bounds", "scale") => self.bounds.scale = parse_f64(key, value)?,
            ("bounds", "growth") => self.bounds.growth = value.to_string(),
            ("bounds", "c") => self.bounds.c = parse_f64(key, value)?,
            ("bounds", "horizon") => self.bounds.horizon = parse_f64(key, value)?,
            ("bounds", "xi") => self.bounds.xi = parse_list(key, value)?,
            ("bounds", "xi0") => self.bounds.xi0 = Some(parse_f64(key, value)?),
            ("bounds", "eps") => self.bounds.eps = parse_list(key, value)?,
            ("bounds", "x0") => self.bounds.x0 = parse_list(key, value)?,
            ("bounds", "radius") => self.bounds.radius = parse_f64(key, value)?,
            ("bounds", "phi0") => self.bounds.phi0 = Some(parse_f64(key, value)?),
            ("bounds", "comparison_times") => self.bounds.comparison_times = parse_list(key, value)?,
            ("bounds", "log_inv_phi0") => self.bounds.log_inv_phi0 = parse_list(key, value)?,
            ("bounds", "probe_t") => self.bounds.probe_t = parse_f64(key, value)?,
            _ => {
                return Err(FlowLabError::Config(if section.is_empty() {
                    format!("unknown top-level key '{key}'")
                } else {
                    format!("unknown key '{key}' in section [{section}]")
                }))
            }
        }
        Ok(())
    }

    /// Canonical serialization; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "schema_version = {SCHEMA_VERSION}");
        let _ = writeln!(s);
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "horizon = {}", self.horizon);
        let _ = writeln!(s, "replications = {}", self.replications);
        let _ = writeln!(s);
        let _ = writeln!(s, "[field]");
        let _ = writeln!(s, "name = {}", self.field.name);
        if let Some(v) = self.field.sigma_scale {
            let _ = writeln!(s, "sigma_scale = {v}");
        }
        if let Some(v) = self.field.drift_scale {
            let _ = writeln!(s, "drift_scale = {v}");
        }
        if let Some(v) = self.field.truncate_radius {
            let _ = writeln!(s, "truncate_radius = {v}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "[simulate]");
        let _ = writeln!(s, "points = {}", join(&self.simulate.points));
        let _ = writeln!(s, "refine = {}", self.simulate.refine);
        let _ = writeln!(s, "refine_target = {}", self.simulate.refine_target);
        let _ = writeln!(s, "max_refinements = {}", self.simulate.max_refinements);
        let _ = writeln!(s, "dump_trajectories = {}", self.simulate.dump_trajectories);
        let _ = writeln!(s);
        let _ = writeln!(s, "[verify]");
        if let Some(check) = &self.verify.check {
            let _ = writeln!(s, "check = {check}");
        }
        if let Some((a, b)) = self.verify.pair {
            let _ = writeln!(s, "pair = {a} {b}");
        }
        let _ = writeln!(s, "eps = {}", join(&self.verify.eps));
        let _ = writeln!(s, "separations = {}", join(&self.verify.separations));
        let _ = writeln!(s, "powers = {}", join(&self.verify.powers));
        let _ = writeln!(s, "times = {}", join(&self.verify.times));
        if !self.verify.time_pairs.is_empty() {
            let items: Vec<String> =
                self.verify.time_pairs.iter().map(|(a, b)| format!("{a}:{b}")).collect();
            let _ = writeln!(s, "time_pairs = {}", items.join(" "));
        }
        let _ = writeln!(s, "x0_grid = {}", join(&self.verify.x0_grid));
        let _ = writeln!(s, "ball_radius = {}", self.verify.ball_radius);
        if let Some(g) = &self.verify.grid {
            let _ = writeln!(s, "grid = {}:{}:{}", g.lo, g.hi, g.n);
        }
        if let Some(d) = self.verify.delta {
            let _ = writeln!(s, "delta = {d}");
        }
        let _ = writeln!(s, "moment_power = {}", self.verify.moment_power);
        let _ = writeln!(s, "moment_t = {}", self.verify.moment_t);
        let _ = writeln!(s, "h1_radius = {}", self.verify.h1_radius);
        let _ = writeln!(s, "h1_pairs = {}", self.verify.h1_pairs);
        let _ = writeln!(s);
        let _ = writeln!(s, "[bounds]");
        let _ = writeln!(s, "modulus = {}", self.bounds.modulus);
        if let Some(v) = self.bounds.delta_o {
            let _ = writeln!(s, "delta_o = {v}");
        }
        let _ = writeln!(s, "scale = {}", self.bounds.scale);
        let _ = writeln!(s, "growth = {}", self.bounds.growth);
        let _ = writeln!(s, "c = {}", self.bounds.c);
        let _ = writeln!(s, "horizon = {}", self.bounds.horizon);
        if !self.bounds.xi.is_empty() {
            let _ = writeln!(s, "xi = {}", join(&self.bounds.xi));
        }
        if let Some(v) = self.bounds.xi0 {
            let _ = writeln!(s, "xi0 = {v}");
        }
        if !self.bounds.eps.is_empty() {
            let _ = writeln!(s, "eps = {}", join(&self.bounds.eps));
        }
        if !self.bounds.x0.is_empty() {
            let _ = writeln!(s, "x0 = {}", join(&self.bounds.x0));
        }
        let _ = writeln!(s, "radius = {}", self.bounds.radius);
        if let Some(v) = self.bounds.phi0 {
            let _ = writeln!(s, "phi0 = {v}");
        }
        if !self.bounds.comparison_times.is_empty() {
            let _ = writeln!(s, "comparison_times = {}", join(&self.bounds.comparison_times));
        }
        if !self.bounds.log_inv_phi0.is_empty() {
            let _ = writeln!(s, "log_inv_phi0 = {}", join(&self.bounds.log_inv_phi0));
        }
        let _ = writeln!(s, "probe_t = {}", self.bounds.probe_t);
        s
    }
}

fn bad(lineno: usize, msg: &str) -> FlowLabError {
    FlowLabError::Config(format!("line {}: {msg}", lineno + 1))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| FlowLabError::Config(format!("key '{key}': cannot parse '{value}' as a number")))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| FlowLabError::Config(format!("key '{key}': cannot parse '{value}' as an integer")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(FlowLabError::Config(format!("key '{key}': expected true/false, got '{value}'"))),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split_whitespace().map(|tok| parse_f64(key, tok)).collect()
}

fn parse_pairs(key: &str, value: &str) -> Result<Vec<(f64, f64)>> {
    value
        .split_whitespace()
        .map(|tok| {
            let (a, b) = tok.split_once(':').ok_or_else(|| {
                FlowLabError::Config(format!("key '{key}': expected 'a:b' items, got '{tok}'"))
            })?;
            Ok((parse_f64(key, a)?, parse_f64(key, b)?))
        })
        .collect()
}

fn parse_grid(key: &str, value: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 3 {
        return Err(FlowLabError::Config(format!("key '{key}': expected 'lo:hi:n', got '{value}'")));
    }
    let n: usize = parse_num(key, parts[2])?;
    if n == 0 {
        return Err(FlowLabError::Config(format!("key '{key}': grid needs at least one point")));
    }
    Ok(GridSpec { lo: parse_f64(key, parts[0])?, hi: parse_f64(key, parts[1])?, n })
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
