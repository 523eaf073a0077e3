//! Text artifacts: CSV tables and versioned JSON summaries.
//!
//! Floats are written with 17 significant digits so that a rerun with the
//! same inputs reproduces every file byte for byte.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::screening::ScreeningReport;
use crate::solver::PathResult;

pub const SCHEMA_VERSION: u32 = 1;

/// `{:.16e}`; non-finite values as `nan`, `inf`, `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Columns `index,score,screened`.
pub fn screening_csv(report: &ScreeningReport) -> String {
    let mut out = String::from("index,score,screened\n");
    for (i, (s, m)) in report.scores.iter().zip(&report.screened).enumerate() {
        writeln!(out, "{i},{},{}", fmt_f64(*s), u8::from(*m)).unwrap();
    }
    out
}

/// Columns `lambda,primal,gap,screened_fraction,cumulative_epochs`.
pub fn path_csv(path: &PathResult) -> String {
    let mut out = String::from("lambda,primal,gap,screened_fraction,cumulative_epochs\n");
    for p in &path.points {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(p.lambda),
            fmt_f64(p.result.primal),
            fmt_f64(p.result.gap),
            fmt_f64(p.screened_fraction),
            fmt_f64(p.cumulative_epochs)
        )
        .unwrap();
    }
    out
}

/// Replaces non-finite numbers (which JSON cannot carry) by strings.
pub fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_f64(v))
    }
}

/// Wraps a command's payload with the schema version and command name.
pub fn summary(command: &str, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("summary body is an object");
    obj.insert("schema".into(), json!(SCHEMA_VERSION));
    obj.insert("command".into(), json!(command));
    body
}

/// Counts, threshold, region metadata and audit verdicts of a report.
pub fn screening_summary(report: &ScreeningReport) -> Value {
    let audit = report.audit.as_ref().map(|a| {
        json!({
            "passed": a.passed(),
            "contains_solution": a.contains_solution,
            "margins_inside": a.margins_inside,
            "refit_matches": a.refit_matches,
        })
    });
    json!({
        "n": report.n(),
        "screened": report.screened_count(),
        "screened_fraction": json_f64(report.screened_fraction()),
        "threshold": json_f64(report.threshold),
        "region": report.region,
        "warning": report.warning,
        "audit": audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn summary_is_versioned() {
        let v = summary("solve", json!({"primal": 1.0}));
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "solve");
    }
}
