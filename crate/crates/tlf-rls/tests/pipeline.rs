//! End-to-end pipeline checks: config → run → CSV → reparse, plus the CLI
//! binary's exit-code contract.

use std::fs;
use std::process::Command;

use tlf_rls::config::{emit_config, parse_config};
use tlf_rls::experiment::{run, CaseId, ExperimentConfig};
use tlf_rls::trace_csv::{emit_csv, parse_trace};

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("tlf_rls_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn run_emit_reparse_round_trip() {
    let cfg = ExperimentConfig {
        steps: 60,
        ..ExperimentConfig::case1()
    };
    let result = run(&cfg).unwrap();
    let dir = temp_dir("pipeline");
    let paths = emit_csv(&result, &dir).unwrap();
    assert_eq!(paths.len(), cfg.methods.len() + 1);

    for trace in &result.traces {
        let path = paths
            .iter()
            .find(|p| {
                p.file_name()
                    .unwrap()
                    .to_str()
                    .unwrap()
                    .contains(&tlf_rls::trace_csv::label_slug(&trace.label))
            })
            .expect("per-method file");
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), cfg.steps + 1);
        let parsed = parse_trace(&text).unwrap();
        for (a, b) in parsed.iter().zip(&trace.records) {
            assert_eq!(a.param_err.to_bits(), b.param_err.to_bits());
        }
    }
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identification_error_converges_for_rls_methods() {
    // Every non-diverged RLS-type method drives the a-priori output error
    // below 1e-6 on the constant plant.
    let result = run(&ExperimentConfig::case1()).unwrap();
    for trace in &result.traces {
        if trace.label.starts_with("ef-rls/l0.99") || trace.label.starts_with("tlf-rls") {
            let last = trace.records.last().unwrap();
            assert!(!last.diverged, "{}", trace.label);
            assert!(
                last.ident_err.abs() < 1e-6,
                "{}: final ident_err {:e}",
                trace.label,
                last.ident_err
            );
        }
    }
}

#[test]
fn config_text_round_trips_through_runner() {
    let cfg = parse_config("", CaseId::Case2).unwrap();
    let text = emit_config(&cfg);
    let reparsed = parse_config(&text, CaseId::Case2).unwrap();
    assert_eq!(cfg, reparsed);
    // Identical configs give bit-identical traces (compared through the
    // rendered CSV, which encodes every float exactly and NaN stably).
    let mut small = reparsed.clone();
    small.steps = 40;
    let a = run(&small).unwrap();
    let b = run(&small).unwrap();
    for (ta, tb) in a.traces.iter().zip(&b.traces) {
        assert_eq!(
            tlf_rls::trace_csv::render_trace(ta, 4),
            tlf_rls::trace_csv::render_trace(tb, 4)
        );
    }
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tlf-rls");
    let dir = temp_dir("cli");

    // Successful short run.
    let out = Command::new(bin)
        .args(["case1", "--steps", "20", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(dir.join("summary.csv").exists());

    // Validation error: steps = 0.
    let out = Command::new(bin)
        .args(["case1", "--set", "steps=0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Unknown override key.
    let out = Command::new(bin)
        .args(["case2", "--set", "bogus=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Missing config file surfaces as an I/O error.
    let out = Command::new(bin)
        .args(["case1", "--config", "/nonexistent/path.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // Unknown subcommand.
    let out = Command::new(bin).arg("case3").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn custom_case_runs_user_methods() {
    let text = "\
steps = 50

[schedule]
0 = b

[method tlf-rls]
inner = df
lambda = 0.1
mu = 0.9
";
    let cfg = parse_config(text, CaseId::Custom).unwrap();
    let result = run(&cfg).unwrap();
    assert_eq!(result.traces.len(), 1);
    let final_err = result.traces[0].records.last().unwrap().param_err;
    assert!(final_err < 1e-3, "final error {final_err:e}");
}
