//! CSV emission for experiment traces.
//!
//! One data file per method plus `summary.csv`, all under a caller-chosen
//! output directory. The data schema is fixed:
//!
//! ```text
//! k,method,theta_hat_1..theta_hat_n,param_err,ident_err,min_eig_phi,
//! min_eig_omega_sq,min_eig_P,cond_P,lyapunov,diverged
//! ```
//!
//! Floats are rendered with 17 significant digits so re-parsing reproduces
//! the exact f64 bits; infinities render as `inf`/`-inf` and NaN as `nan`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::experiment::{compute_summary, MethodTrace, RunResult, TraceRecord};

/// I/O failure with the path that produced it.
#[derive(Debug)]
pub struct CsvError {
    pub path: PathBuf,
    pub source: io::Error,
}

impl std::fmt::Display for CsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path.display(), self.source)
    }
}

impl std::error::Error for CsvError {}

/// 17-significant-digit rendering; exact f64 round-trip.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Inverse of [`format_float`].
pub fn parse_float(s: &str) -> Result<f64, std::num::ParseFloatError> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        other => other.parse::<f64>(),
    }
}

/// Data-file header for estimate dimension `n`.
pub fn csv_header(n: usize) -> String {
    let mut h = String::from("k,method");
    for i in 1..=n {
        let _ = write!(h, ",theta_hat_{i}");
    }
    h.push_str(
        ",param_err,ident_err,min_eig_phi,min_eig_omega_sq,min_eig_P,cond_P,lyapunov,diverged",
    );
    h
}

fn record_line(r: &TraceRecord) -> String {
    let mut line = format!("{},{}", r.k, r.method);
    for t in &r.theta_hat {
        let _ = write!(line, ",{}", format_float(*t));
    }
    let _ = write!(
        line,
        ",{},{},{},{},{},{},{},{}",
        format_float(r.param_err),
        format_float(r.ident_err),
        format_float(r.min_eig_phi),
        format_float(r.min_eig_omega_sq),
        format_float(r.min_eig_p),
        format_float(r.cond_p),
        format_float(r.lyapunov),
        u8::from(r.diverged),
    );
    line
}

/// Renders one method's trace as CSV text.
pub fn render_trace(trace: &MethodTrace, n: usize) -> String {
    let mut out = csv_header(n);
    out.push('\n');
    for r in &trace.records {
        out.push_str(&record_line(r));
        out.push('\n');
    }
    out
}

/// File stem for a method label (`/` and `=` folded to `-`).
pub fn label_slug(label: &str) -> String {
    label.replace(['/', '='], "-")
}

/// Writes one CSV per method plus `summary.csv`; returns the written paths.
/// The output directory is created when missing.
pub fn emit_csv(result: &RunResult, out_dir: &Path) -> Result<Vec<PathBuf>, CsvError> {
    fs::create_dir_all(out_dir).map_err(|e| CsvError {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let n = result
        .traces
        .first()
        .and_then(|t| t.records.first())
        .map_or(crate::plant::ARX_DIM, |r| r.theta_hat.len());
    let mut written = Vec::new();
    for trace in &result.traces {
        let path = out_dir.join(format!(
            "{}_{}.csv",
            result.config.case.as_str(),
            label_slug(&trace.label)
        ));
        fs::write(&path, render_trace(trace, n)).map_err(|e| CsvError {
            path: path.clone(),
            source: e,
        })?;
        written.push(path);
    }

    let mut summary = String::from(
        "method,final_param_err,final_ident_err,k_e,max_cond_P,contraction_violations,diverged\n",
    );
    for s in compute_summary(result) {
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{}",
            s.label,
            format_float(s.final_param_err),
            format_float(s.final_ident_err),
            s.k_e.map_or(String::new(), |k| k.to_string()),
            format_float(s.max_cond_p),
            s.contraction_violations
                .map_or(String::new(), |c| c.to_string()),
            u8::from(s.diverged),
        );
    }
    let path = out_dir.join("summary.csv");
    fs::write(&path, summary).map_err(|e| CsvError {
        path: path.clone(),
        source: e,
    })?;
    written.push(path);
    Ok(written)
}

/// Parses text produced by [`render_trace`] back into records.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty csv")?;
    let cols: Vec<&str> = header.split(',').collect();
    let n = cols.iter().filter(|c| c.starts_with("theta_hat_")).count();
    if n == 0 {
        return Err("header missing theta_hat columns".into());
    }
    let expect = n + 10;
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expect {
            return Err(format!(
                "row {}: expected {expect} fields, got {}",
                idx + 2,
                fields.len()
            ));
        }
        let fl = |s: &str| parse_float(s).map_err(|e| format!("row {}: {e}", idx + 2));
        let mut theta_hat = Vec::with_capacity(n);
        for f in &fields[2..2 + n] {
            theta_hat.push(fl(f)?);
        }
        let rest = &fields[2 + n..];
        records.push(TraceRecord {
            k: fields[0]
                .parse::<usize>()
                .map_err(|e| format!("row {}: {e}", idx + 2))?,
            method: fields[1].to_string(),
            theta_hat,
            param_err: fl(rest[0])?,
            ident_err: fl(rest[1])?,
            min_eig_phi: fl(rest[2])?,
            min_eig_omega_sq: fl(rest[3])?,
            min_eig_p: fl(rest[4])?,
            cond_p: fl(rest[5])?,
            lyapunov: fl(rest[6])?,
            diverged: rest[7] == "1",
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run, ExperimentConfig};

    #[test]
    fn header_is_stable() {
        assert_eq!(
            csv_header(4),
            "k,method,theta_hat_1,theta_hat_2,theta_hat_3,theta_hat_4,param_err,ident_err,\
             min_eig_phi,min_eig_omega_sq,min_eig_P,cond_P,lyapunov,diverged"
        );
    }

    #[test]
    fn float_rendering() {
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_float(f64::NAN), "nan");
        let v = 0.1 + 0.2;
        assert_eq!(
            parse_float(&format_float(v)).unwrap().to_bits(),
            v.to_bits()
        );
    }

    #[test]
    fn row_count_is_steps_plus_header() {
        let cfg = ExperimentConfig {
            steps: 25,
            ..ExperimentConfig::case1()
        };
        let result = run(&cfg).unwrap();
        let text = render_trace(&result.traces[0], 4);
        assert_eq!(text.lines().count(), 26);
    }

    #[test]
    fn round_trip_preserves_bits() {
        let cfg = ExperimentConfig {
            steps: 30,
            ..ExperimentConfig::case1()
        };
        let result = run(&cfg).unwrap();
        for trace in &result.traces {
            let text = render_trace(trace, 4);
            let parsed = parse_trace(&text).unwrap();
            assert_eq!(parsed.len(), trace.records.len());
            for (a, b) in parsed.iter().zip(&trace.records) {
                assert_eq!(a.k, b.k);
                assert_eq!(a.method, b.method);
                assert_eq!(a.param_err.to_bits(), b.param_err.to_bits());
                assert_eq!(a.cond_p.to_bits(), b.cond_p.to_bits());
                // NaN columns compare by bit pattern too.
                assert_eq!(a.min_eig_omega_sq.is_nan(), b.min_eig_omega_sq.is_nan());
                assert_eq!(a.diverged, b.diverged);
            }
        }
    }

    #[test]
    fn emit_writes_per_method_and_summary() {
        let cfg = ExperimentConfig {
            steps: 12,
            ..ExperimentConfig::case1()
        };
        let result = run(&cfg).unwrap();
        let dir = std::env::temp_dir().join(format!("tlf_rls_csv_test_{}", std::process::id()));
        let paths = emit_csv(&result, &dir).unwrap();
        assert_eq!(paths.len(), cfg.methods.len() + 1);
        for p in &paths {
            assert!(p.exists(), "{}", p.display());
        }
        let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), cfg.methods.len() + 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn diverged_rows_keep_numeric_columns() {
        let cfg = ExperimentConfig {
            steps: 40,
            ..ExperimentConfig::case1()
        };
        let result = run(&cfg).unwrap();
        let aggressive = result
            .traces
            .iter()
            .find(|t| t.label == "ef-rls/l0.01")
            .unwrap();
        let text = render_trace(aggressive, 4);
        let diverged_row = text
            .lines()
            .find(|l| l.ends_with(",1"))
            .expect("aggressive forgetting should diverge within 40 steps");
        assert_eq!(diverged_row.split(',').count(), 14);
    }
}
