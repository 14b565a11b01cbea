//! Report emission: JSON records and CSV tables.
//!
//! One JSON document per record file, `schema_version` stamped from day
//! one, no timestamps anywhere — outputs are pure functions of the resolved
//! configuration, so byte-identical reruns hash identically. CSV uses a
//! header row, comma separators, `.` decimals and shortest-roundtrip float
//! formatting.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::flow::FlowEnsemble;
use crate::verify::Verdict;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;

/// One evaluated bound/transform record.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub operation: String,
    pub inputs: serde_json::Value,
    pub value: serde_json::Value,
    pub method: String,
}

/// Envelope for a batch of bound records.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub records: Vec<BoundRecord>,
}

impl BoundsDocument {
    pub fn new(records: Vec<BoundRecord>) -> Self {
        Self { schema_version: SCHEMA_VERSION, tool_version: TOOL_VERSION.into(), records }
    }
}

/// Envelope for one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckDocument<T: Serialize> {
    pub schema_version: u32,
    pub tool_version: String,
    pub check: String,
    pub field: String,
    pub params: serde_json::Value,
    pub statistics: T,
    pub verdict: Verdict,
}

impl<T: Serialize> CheckDocument<T> {
    pub fn new(
        check: impl Into<String>,
        field: impl Into<String>,
        params: serde_json::Value,
        statistics: T,
        verdict: Verdict,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            check: check.into(),
            field: field.into(),
            params,
            statistics,
            verdict,
        }
    }
}

/// Envelope for a simulation summary.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub schema_version: u32,
    pub tool_version: String,
    pub field: String,
    pub seed: u64,
    pub dt: f64,
    pub n_steps: usize,
    pub horizon: f64,
    pub scheme: String,
    pub initial_points: Vec<Vec<f64>>,
    pub endpoints: Vec<Vec<f64>>,
    pub refinements: Option<usize>,
    pub refinement_converged: Option<bool>,
    pub refinement_last_move: Option<f64>,
}

/// Write a value as a single pretty-printed JSON document.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push('\n');
    fs::write(path, out)?;
    Ok(())
}

/// Trajectory dump: `t, point_id, x_1..x_d`, time-major then point id.
pub fn write_trajectory_csv(path: &Path, ensemble: &FlowEnsemble) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    write!(w, "t,point_id")?;
    for i in 1..=ensemble.dim() {
        write!(w, ",x_{i}")?;
    }
    writeln!(w)?;
    for step in 0..=ensemble.n_steps() {
        let t = ensemble.time(step);
        for point in 0..ensemble.n_points() {
            write!(w, "{t},{point}")?;
            for v in ensemble.position(step, point) {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of an estimate table.
#[derive(Debug, Clone, Copy)]
pub struct EstimateRow {
    pub t: f64,
    /// Separation, starting radius or contact level, depending on the check.
    pub abscissa: f64,
    pub estimate: f64,
    pub ci_halfwidth: f64,
    pub n: usize,
}

/// Estimate table: `t, separation_or_x0, estimate, ci_halfwidth, n`.
pub fn write_estimates_csv(path: &Path, rows: &[EstimateRow]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(w, "t,separation_or_x0,estimate,ci_halfwidth,n")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.t, r.abscissa, r.estimate, r.ci_halfwidth, r.n)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::BrownianPath;
    use crate::fields::{example_field, CorpusField};
    use crate::flow::{simulate_ensemble, Scheme};

    #[test]
    fn json_documents_carry_schema_version() {
        let doc = BoundsDocument::new(vec![BoundRecord {
            operation: "phi_contact".into(),
            inputs: serde_json::json!({"xi": 0.01}),
            value: serde_json::json!(3.2),
            method: "closed_form".into(),
        }]);
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["schema_version"], 1);
        assert_eq!(parsed["records"][0]["operation"], "phi_contact");
    }

    #[test]
    fn trajectory_csv_has_header_and_deterministic_order() {
        let f = example_field(CorpusField::LipschitzBaseline);
        let p = BrownianPath::generate(1, 0.5, 2, 1).unwrap();
        let e = simulate_ensemble(&f, &[vec![1.0], vec![2.0]], &p, Scheme::EulerMaruyama).unwrap();
        let dir = std::env::temp_dir().join("flowlab-report-test");
        let path = dir.join("traj.csv");
        write_trajectory_csv(&path, &e).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,point_id,x_1");
        // 3 time slices x 2 points.
        assert_eq!(lines.len(), 1 + 3 * 2);
        assert!(lines[1].starts_with("0,0,"));
        assert!(lines[2].starts_with("0,1,"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn estimates_csv_layout() {
        let dir = std::env::temp_dir().join("flowlab-report-test2");
        let path = dir.join("est.csv");
        write_estimates_csv(
            &path,
            &[EstimateRow { t: 1.0, abscissa: 0.1, estimate: 0.5, ci_halfwidth: 0.01, n: 100 }],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "t,separation_or_x0,estimate,ci_halfwidth,n\n1,0.1,0.5,0.01,100\n");
        std::fs::remove_dir_all(&dir).ok();
    }
}
