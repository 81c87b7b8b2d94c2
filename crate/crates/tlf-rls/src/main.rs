//! Experiment front end.
//!
//! ```text
//! tlf-rls <case1|case2|custom|verify> [--config PATH] [--out DIR]
//!         [--set key=value]... [--steps N]
//! ```
//!
//! Exit codes: 0 success, 1 parse/validation error, 2 verification failure,
//! 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use tlf_rls::config::{apply_overrides, parse_config, ConfigError};
use tlf_rls::experiment::{compute_summary, run, CaseId, ExperimentConfig};
use tlf_rls::trace_csv::emit_csv;
use tlf_rls::verify::VerifyContext;

const USAGE: &str = "\
usage: tlf-rls <case1|case2|custom|verify> [options]

subcommands:
  case1    convergence-rate comparison on the constant plant (a)
  case2    robustness comparison across the a -> b -> c schedule
  custom   user-defined run (methods/schedule from --config)
  verify   run the full verification suite; exit 0 only if all pass

options:
  --config PATH     configuration file (plain key = value text)
  --out DIR         output directory for CSV traces (default: out)
  --set KEY=VALUE   override a config key (repeatable)
  --steps N         shorthand for --set steps=N
  -h, --help        show this help
";

struct Invocation {
    subcommand: String,
    config_path: Option<PathBuf>,
    out_dir: PathBuf,
    overrides: Vec<(String, String)>,
}

fn parse_args(args: &[String]) -> Result<Invocation, String> {
    let mut it = args.iter();
    let subcommand = match it.next() {
        Some(s) if !s.starts_with('-') => s.clone(),
        Some(s) if s == "-h" || s == "--help" => return Err(String::new()),
        _ => return Err("missing subcommand".into()),
    };
    if !matches!(subcommand.as_str(), "case1" | "case2" | "custom" | "verify") {
        return Err(format!("unknown subcommand `{subcommand}`"));
    }
    let mut inv = Invocation {
        subcommand,
        config_path: None,
        out_dir: PathBuf::from("out"),
        overrides: Vec::new(),
    };
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                let v = it.next().ok_or("--config needs a path")?;
                inv.config_path = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = it.next().ok_or("--out needs a directory")?;
                inv.out_dir = PathBuf::from(v);
            }
            "--set" => {
                let v = it.next().ok_or("--set needs key=value")?;
                let (k, val) = v
                    .split_once('=')
                    .ok_or_else(|| format!("--set expects key=value, got `{v}`"))?;
                inv.overrides
                    .push((k.trim().to_string(), val.trim().to_string()));
            }
            "--steps" => {
                let v = it.next().ok_or("--steps needs a number")?;
                inv.overrides.push(("steps".into(), v.clone()));
            }
            "-h" | "--help" => return Err(String::new()),
            other => return Err(format!("unknown option `{other}`")),
        }
    }
    Ok(inv)
}

fn load_config(inv: &Invocation, case: CaseId) -> Result<ExperimentConfig, ExitCode> {
    let text = match &inv.config_path {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(3)
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text, case).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })?;
    apply_overrides(&mut cfg, &inv.overrides).map_err(|e: ConfigError| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })?;
    Ok(cfg)
}

fn run_experiment(inv: &Invocation, case: CaseId) -> ExitCode {
    let cfg = match load_config(inv, case) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let result = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let paths = match emit_csv(&result, &inv.out_dir) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    println!(
        "{} — {} steps, {} methods",
        cfg.case.as_str(),
        cfg.steps,
        cfg.methods.len()
    );
    println!(
        "{:<28} {:>13} {:>13} {:>5} {:>12} {:>9}",
        "method", "final_err", "final_ident", "k_e", "max_cond_P", "diverged"
    );
    for s in compute_summary(&result) {
        println!(
            "{:<28} {:>13.4e} {:>13.4e} {:>5} {:>12.4e} {:>9}",
            s.label,
            s.final_param_err,
            s.final_ident_err,
            s.k_e.map_or("-".into(), |k| k.to_string()),
            s.max_cond_p,
            if s.diverged { "yes" } else { "no" }
        );
    }
    for p in &paths {
        println!("wrote {}", p.display());
    }
    ExitCode::SUCCESS
}

fn run_verify(inv: &Invocation) -> ExitCode {
    let case1 = match load_config(inv, CaseId::Case1) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let case2 = match load_config(inv, CaseId::Case2) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let ctx = VerifyContext::with_configs(case1, case2);
    let outcomes = ctx.run_all();
    let total = outcomes.len();
    let mut failed = 0usize;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("[{:>2}/{total}] {status}  {} — {}", o.id, o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {total} criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {total} criteria failed");
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inv = match parse_args(&args) {
        Ok(inv) => inv,
        Err(msg) => {
            if msg.is_empty() {
                print!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(1);
        }
    };
    match inv.subcommand.as_str() {
        "case1" => run_experiment(&inv, CaseId::Case1),
        "case2" => run_experiment(&inv, CaseId::Case2),
        "custom" => run_experiment(&inv, CaseId::Custom),
        "verify" => run_verify(&inv),
        _ => unreachable!("validated in parse_args"),
    }
}
