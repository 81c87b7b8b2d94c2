//! Runtime verification suite.
//!
//! Every stability claim the library makes is checked here as an executable
//! criterion over the built-in experiment configurations: positive
//! definiteness onset of the augmented matrix, the non-PE premise of the
//! input, per-step error-energy contraction, information-matrix bounds,
//! covariance–information duality, equivalence of the recursion with a
//! batch least-squares oracle, the qualitative method orderings, the
//! destabilization exhibit, recovery after plant changes, and the bank
//! property suite with hand-computed examples.
//!
//! The same functions back the `verify` CLI subcommand and the acceptance
//! integration tests, so CI and humans run one gate.

use crate::bank::{normalize, InnerMode, RegressorBank, RegressorSample};
use crate::estimators::{dcl_step, dfcl_step, CLMemory, EstimatorState, GainConfig};
use crate::experiment::{run, ExperimentConfig, MethodTrace, RunResult, CONTRACTION_SLACK};
use crate::linalg::{dot, Mat, SplitMix64, SymMatrix, Tolerances};
use crate::plant::{simulate, CaseLabel, PlantModel};

/// Expected onset step of positive definiteness for the default stream.
pub const EXPECTED_ONSET: usize = 4;

/// Horizon of the long diagnostic runs behind the bound checks.
pub const LONG_RUN_STEPS: usize = 10_000;

/// Windowed raw excitation must stay below this once non-PE behavior is
/// claimed.
pub const EXCITATION_CEILING: f64 = 1e-6;

/// Duality tolerance: ‖P·R − I‖∞ per step.
pub const DUALITY_TOL: f64 = 1e-6;

/// Lower information-matrix bound, as a fraction of its value at onset.
/// Frozen from the reference run: the onset value carries the decaying
/// initial-information mass, and the data-driven floor that replaces it
/// bottoms out at 0.2125× of it (λ = 0.99, k ≈ 500).
pub const R_LOWER_FACTOR: f64 = 0.2;

/// Batch-oracle agreement, per component.
pub const ORACLE_TOL: f64 = 1e-8;

/// Recovery ceilings after the two plant changes, frozen from the
/// reference run (min error within 300 steps: 6.98e-3 and 4.29e-1). The
/// second change leaves the regressor spanning only three of four
/// directions, which caps how much stale bank content can be flushed.
pub const RECOVERY_AFTER_FIRST_CHANGE: f64 = 2e-2;
pub const RECOVERY_AFTER_SECOND_CHANGE: f64 = 0.5;

/// Floor that the no-inner-forgetting variant must stay above after the
/// first plant change.
pub const STALE_BANK_FLOOR: f64 = 1e-1;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Per-step diagnostics of one layered-forgetting run that the traces do
/// not carry (information-matrix eigenvalues, duality products).
struct TlfDetail {
    lambda: f64,
    k_e: Option<usize>,
    omega_min: Vec<f64>,
    r_min: Vec<f64>,
    r_max: Vec<f64>,
    /// Running maximum of λ_max(Ω²) up to each step.
    omega_sq_max_running: Vec<f64>,
    pr_dev: Vec<f64>,
}

fn run_tlf_detail(cfg: &ExperimentConfig, lambda: f64, mu: f64, steps: usize) -> TlfDetail {
    let samples = simulate(&cfg.schedule, &cfg.input, steps);
    let mut bank = RegressorBank::new(4, InnerMode::Df, mu);
    let mut est = EstimatorState::new(4, lambda, cfg.gamma);
    let mut detail = TlfDetail {
        lambda,
        k_e: None,
        omega_min: Vec::with_capacity(steps),
        r_min: Vec::with_capacity(steps),
        r_max: Vec::with_capacity(steps),
        omega_sq_max_running: Vec::with_capacity(steps),
        pr_dev: Vec::with_capacity(steps),
    };
    let mut omega_sq_peak = 0.0f64;
    for s in &samples {
        bank = bank.update(
            &RegressorSample::new(s.phi.to_vec(), s.y_next),
            &cfg.tolerances,
        );
        est = match est.tlf_rls_step(bank.omega(), bank.m_vec(), &cfg.tolerances) {
            Ok(next) => next,
            Err(_) => break,
        };
        detail.omega_min.push(bank.omega().min_eigenvalue());
        let r_eigs = est.r_mat.eigenvalues();
        detail.r_min.push(r_eigs[0]);
        detail.r_max.push(r_eigs[r_eigs.len() - 1]);
        omega_sq_peak = omega_sq_peak.max(bank.omega().square().max_eigenvalue());
        detail.omega_sq_max_running.push(omega_sq_peak);
        detail.pr_dev.push(
            est.p_mat
                .mul(&est.r_mat)
                .minus(&Mat::identity(4))
                .inf_norm(),
        );
        if detail.k_e.is_none() {
            detail.k_e = bank.k_e();
        }
    }
    detail
}

/// Everything the criteria need, computed once.
pub struct VerifyContext {
    case1_cfg: ExperimentConfig,
    case1: Result<RunResult, String>,
    case2: Result<RunResult, String>,
    details: Vec<TlfDetail>,
}

impl VerifyContext {
    /// Runs the default experiment matrix.
    pub fn new() -> VerifyContext {
        VerifyContext::with_configs(ExperimentConfig::case1(), ExperimentConfig::case2())
    }

    /// Runs with caller-adjusted configs (e.g. shortened horizons); the
    /// criteria report failures rather than panicking when a horizon is
    /// too short for the quantity they check.
    pub fn with_configs(case1_cfg: ExperimentConfig, case2_cfg: ExperimentConfig) -> VerifyContext {
        let case1 = run(&case1_cfg);
        let case2 = run(&case2_cfg);
        let long = LONG_RUN_STEPS.max(case1_cfg.steps);
        let details = vec![
            run_tlf_detail(&case1_cfg, 0.99, 0.99, long),
            run_tlf_detail(&case1_cfg, 0.01, 0.99, long),
        ];
        VerifyContext {
            case1_cfg,
            case1,
            case2,
            details,
        }
    }

    pub fn criterion_count() -> usize {
        11
    }

    pub fn outcome(&self, id: usize) -> CriterionOutcome {
        match id {
            1 => self.c1_onset(),
            2 => self.c2_non_pe_premise(),
            3 => self.c3_contraction(),
            4 => self.c4_information_bounds(),
            5 => self.c5_duality(),
            6 => self.c6_batch_oracle(),
            7 => self.c7_convergence_ordering(),
            8 => self.c8_destabilization(),
            9 => self.c9_recovery(),
            10 => self.c10_condition_ordering(),
            11 => self.c11_property_suite(),
            _ => panic!("criterion ids run from 1 to 11"),
        }
    }

    pub fn run_all(&self) -> Vec<CriterionOutcome> {
        (1..=Self::criterion_count())
            .map(|id| self.outcome(id))
            .collect()
    }

    fn case1_trace(&self, label: &str) -> Result<&MethodTrace, String> {
        let result = self.case1.as_ref().map_err(|e| e.clone())?;
        result
            .traces
            .iter()
            .find(|t| t.label == label)
            .ok_or_else(|| format!("method `{label}` missing from case1 run"))
    }

    fn case2_trace(&self, label: &str) -> Result<&MethodTrace, String> {
        let result = self.case2.as_ref().map_err(|e| e.clone())?;
        result
            .traces
            .iter()
            .find(|t| t.label == label)
            .ok_or_else(|| format!("method `{label}` missing from case2 run"))
    }

    fn c1_onset(&self) -> CriterionOutcome {
        let name = "augmented matrix becomes positive definite at step 4";
        let detail = &self.details[0];
        let mut failures = Vec::new();
        if detail.k_e != Some(EXPECTED_ONSET) {
            failures.push(format!(
                "onset k_e = {:?}, expected {EXPECTED_ONSET}",
                detail.k_e
            ));
        }
        for (idx, &me) in detail.omega_min.iter().enumerate() {
            let k = idx + 1;
            if k < EXPECTED_ONSET && me > 1e-12 {
                failures.push(format!(
                    "step {k}: λ_min(Ω) = {me:e} but Ω should still be singular"
                ));
            }
            if k >= EXPECTED_ONSET && me <= 1e-12 {
                failures.push(format!("step {k}: λ_min(Ω) = {me:e} ≤ 1e-12"));
                break;
            }
        }
        if detail.omega_min.len() < EXPECTED_ONSET {
            failures.push(format!(
                "run too short ({} steps) to reach the expected onset",
                detail.omega_min.len()
            ));
        }
        let passed = failures.is_empty();
        let detail_msg = if passed {
            format!(
                "k_e = {EXPECTED_ONSET}; λ_min(Ω) ∈ [{:.3e}, {:.3e}] for k ≥ {EXPECTED_ONSET} over {} steps",
                detail.omega_min[EXPECTED_ONSET - 1..]
                    .iter()
                    .fold(f64::INFINITY, |a, &b| a.min(b)),
                detail.omega_min[EXPECTED_ONSET - 1..]
                    .iter()
                    .fold(0.0f64, |a, &b| a.max(b)),
                detail.omega_min.len(),
            )
        } else {
            failures.join("; ")
        };
        CriterionOutcome {
            id: 1,
            name,
            passed,
            detail: detail_msg,
        }
    }

    fn c2_non_pe_premise(&self) -> CriterionOutcome {
        let name = "windowed raw excitation stays below 1e-6 all run";
        let outcome = |passed, detail| CriterionOutcome {
            id: 2,
            name,
            passed,
            detail,
        };
        let result = match self.case1.as_ref() {
            Ok(r) => r,
            Err(e) => return outcome(false, e.clone()),
        };
        let Some(trace) = result.traces.first() else {
            return outcome(false, "case1 run has no methods".into());
        };
        let mut peak = (0usize, 0.0f64);
        let mut first_exceed = None;
        let mut last_exceed = None;
        for r in &trace.records {
            if r.min_eig_phi > peak.1 {
                peak = (r.k, r.min_eig_phi);
            }
            if r.min_eig_phi >= EXCITATION_CEILING {
                first_exceed.get_or_insert(r.k);
                last_exceed = Some(r.k);
            }
        }
        match (first_exceed, last_exceed) {
            (None, _) => outcome(
                true,
                format!("peak windowed λ_min(Σφφᵀ) = {:.3e} at k = {}", peak.1, peak.0),
            ),
            (Some(first), Some(last)) => outcome(
                false,
                format!(
                    "exceeds {EXCITATION_CEILING:e} for k ∈ [{first}, {last}] (peak {:.3e} at k = {}); \
                     the start-up transient that makes the bank positive definite is itself \
                     excitation, so the premise holds only after it leaves the window",
                    peak.1, peak.0
                ),
            ),
            _ => unreachable!(),
        }
    }

    fn c3_contraction(&self) -> CriterionOutcome {
        let name = "error energy contracts by lambda every step";
        let mut details = Vec::new();
        let mut passed = true;
        for label in ["tlf-rls/df/l0.99/m0.99", "tlf-rls/df/l0.01/m0.99"] {
            match self.case1_trace(label) {
                Ok(trace) => {
                    let lambda = match trace.spec {
                        crate::experiment::MethodSpec::TlfRls { lambda, .. } => lambda,
                        _ => unreachable!(),
                    };
                    let k_e = trace
                        .records
                        .iter()
                        .find(|r| r.min_eig_omega_sq > 0.0)
                        .map(|r| r.k);
                    let Some(k_e) = k_e else {
                        passed = false;
                        details.push(format!("{label}: bank never became positive definite"));
                        continue;
                    };
                    let mut violations = 0usize;
                    let mut max_excess = f64::NEG_INFINITY;
                    for pair in trace.records.windows(2) {
                        if pair[0].k >= k_e {
                            let excess = pair[1].lyapunov - lambda * pair[0].lyapunov;
                            max_excess = max_excess.max(excess);
                            if excess > CONTRACTION_SLACK {
                                violations += 1;
                            }
                        }
                    }
                    if violations > 0 {
                        passed = false;
                    }
                    details.push(format!(
                        "{label}: {violations} violations, max excess {max_excess:.2e}"
                    ));
                }
                Err(e) => {
                    passed = false;
                    details.push(e);
                }
            }
        }
        CriterionOutcome {
            id: 3,
            name,
            passed,
            detail: details.join("; "),
        }
    }

    fn c4_information_bounds(&self) -> CriterionOutcome {
        let name = "information matrix stays bounded after onset";
        let mut details = Vec::new();
        let mut passed = true;
        for d in &self.details {
            let Some(k_e) = d.k_e else {
                passed = false;
                details.push(format!("λ={}: onset never reached", d.lambda));
                continue;
            };
            let idx0 = k_e - 1;
            let (r_min_ke, r_max_ke) = (d.r_min[idx0], d.r_max[idx0]);
            let floor = R_LOWER_FACTOR * r_min_ke;
            let mut low_excursions = 0usize;
            let mut high_excursions = 0usize;
            let mut worst_low = f64::INFINITY;
            for i in idx0..d.r_min.len() {
                worst_low = worst_low.min(d.r_min[i] / r_min_ke);
                if d.r_min[i] < floor {
                    low_excursions += 1;
                }
                let bound = r_max_ke + d.omega_sq_max_running[i] / (1.0 - d.lambda);
                if d.r_max[i] > bound {
                    high_excursions += 1;
                }
            }
            if low_excursions + high_excursions > 0 {
                passed = false;
            }
            details.push(format!(
                "λ={}: {} low / {} high excursions over {} steps (worst λ_min ratio {:.3})",
                d.lambda,
                low_excursions,
                high_excursions,
                d.r_min.len() - idx0,
                worst_low
            ));
        }
        CriterionOutcome {
            id: 4,
            name,
            passed,
            detail: details.join("; "),
        }
    }

    fn c5_duality(&self) -> CriterionOutcome {
        let name = "covariance and information matrices stay inverse";
        let steps = self.case1_cfg.steps;
        let mut details = Vec::new();
        let mut passed = true;
        for d in &self.details {
            let horizon = steps.min(d.pr_dev.len());
            let mut max_dev = (0usize, 0.0f64);
            let mut exceed = 0usize;
            let mut last_exceed = 0usize;
            for (idx, &dev) in d.pr_dev[..horizon].iter().enumerate() {
                if dev > max_dev.1 {
                    max_dev = (idx + 1, dev);
                }
                if dev >= DUALITY_TOL {
                    exceed += 1;
                    last_exceed = idx + 1;
                }
            }
            if exceed > 0 {
                passed = false;
                details.push(format!(
                    "λ={}: ‖PR−I‖∞ ≥ {DUALITY_TOL:e} at {exceed} of {horizon} steps (max {:.2e} \
                     at k={}, none past k={last_exceed}); the covariance spans ~{:.0} decades \
                     before the onset collapse, beyond what f64 carries through the update",
                    d.lambda,
                    max_dev.1,
                    max_dev.0,
                    (1.0 / d.lambda).log10() * (EXPECTED_ONSET as f64 - 1.0) + 3.0
                ));
            } else {
                details.push(format!(
                    "λ={}: max ‖PR−I‖∞ = {:.2e} at k={} over {horizon} steps",
                    d.lambda, max_dev.1, max_dev.0
                ));
            }
        }
        CriterionOutcome {
            id: 5,
            name,
            passed,
            detail: details.join("; "),
        }
    }

    fn c6_batch_oracle(&self) -> CriterionOutcome {
        let name = "recursion matches the batch least-squares oracle";
        let (max_dev, steps) = batch_oracle_deviation(0.7, 50.0, 0.9, 50, 12345);
        let passed = max_dev < ORACLE_TOL && steps == 50;
        CriterionOutcome {
            id: 6,
            name,
            passed,
            detail: format!(
                "max per-component deviation {max_dev:.3e} over {steps} steps (tolerance {ORACLE_TOL:e})"
            ),
        }
    }

    fn c7_convergence_ordering(&self) -> CriterionOutcome {
        let name = "convergence-rate ordering at the final step";
        let outcome = |passed, detail| CriterionOutcome {
            id: 7,
            name,
            passed,
            detail,
        };
        let labels = [
            "tlf-rls/df/l0.01/m0.99",
            "tlf-rls/df/l0.99/m0.99",
            "df-cl/m0.5/g1",
            "dcl/g1/c8",
            "ef-rls/l0.99",
        ];
        let mut finals = Vec::new();
        for label in labels {
            match self.case1_trace(label) {
                Ok(t) => match t.records.last() {
                    Some(r) => finals.push(r.param_err),
                    None => return outcome(false, format!("{label}: empty trace")),
                },
                Err(e) => return outcome(false, e),
            }
        }
        let (tlf_fast, tlf_slow, dfcl, dcl, ef) =
            (finals[0], finals[1], finals[2], finals[3], finals[4]);
        let mut failures = Vec::new();
        if !(tlf_fast < tlf_slow && tlf_slow < dfcl && dfcl < dcl) {
            failures.push("ordering tlf(0.01) < tlf(0.99) < df-cl < dcl broken".to_string());
        }
        if ef <= 1e-2 {
            failures.push(format!("ef-rls plateau {ef:.3e} not above 1e-2"));
        }
        if tlf_fast >= 1e-8 {
            failures.push(format!(
                "tlf(0.01) final error {tlf_fast:.3e} not below 1e-8"
            ));
        }
        let detail = format!(
            "final errors: tlf(0.01)={tlf_fast:.2e}, tlf(0.99)={tlf_slow:.2e}, df-cl={dfcl:.2e}, \
             dcl={dcl:.2e}, ef-rls(0.99)={ef:.2e}{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        );
        outcome(failures.is_empty(), detail)
    }

    fn c8_destabilization(&self) -> CriterionOutcome {
        let name = "aggressive forgetting destabilizes classical EF-RLS";
        let outcome = |passed, detail| CriterionOutcome {
            id: 8,
            name,
            passed,
            detail,
        };
        match self.case1_trace("ef-rls/l0.01") {
            Ok(trace) => {
                let first = trace.records.iter().find(|r| r.diverged).map(|r| r.k);
                match first {
                    Some(k) if k < 2000 => {
                        outcome(true, format!("divergence flag latched at step {k}"))
                    }
                    Some(k) => outcome(false, format!("flag latched only at step {k}")),
                    None => outcome(false, "divergence flag never latched".into()),
                }
            }
            Err(e) => outcome(false, e),
        }
    }

    fn c9_recovery(&self) -> CriterionOutcome {
        let name = "layered identifier recovers after plant changes";
        let outcome = |passed, detail| CriterionOutcome {
            id: 9,
            name,
            passed,
            detail,
        };
        let df = match self.case2_trace("tlf-rls/df/l0.01/m0.99") {
            Ok(t) => t,
            Err(e) => return outcome(false, e),
        };
        let none = match self.case2_trace("tlf-rls/none/l0.01") {
            Ok(t) => t,
            Err(e) => return outcome(false, e),
        };
        let min_err_in = |t: &MethodTrace, lo: usize, hi: usize| -> Option<f64> {
            let vals: Vec<f64> = t
                .records
                .iter()
                .filter(|r| r.k > lo && r.k <= hi)
                .map(|r| r.param_err)
                .collect();
            if vals.is_empty() {
                None
            } else {
                Some(vals.iter().fold(f64::INFINITY, |a, &b| a.min(b)))
            }
        };
        let mut failures = Vec::new();
        let mut notes = Vec::new();
        match min_err_in(df, 200, 500) {
            Some(v) if v < RECOVERY_AFTER_FIRST_CHANGE => {
                notes.push(format!("after k=200: min err {v:.3e}"))
            }
            Some(v) => failures.push(format!(
                "after k=200: min err {v:.3e} ≥ {RECOVERY_AFTER_FIRST_CHANGE:e}"
            )),
            None => failures.push("run too short to cover the k=200 change window".into()),
        }
        match min_err_in(df, 1200, 1500) {
            Some(v) if v < RECOVERY_AFTER_SECOND_CHANGE => {
                notes.push(format!("after k=1200: min err {v:.3e}"))
            }
            Some(v) => failures.push(format!(
                "after k=1200: min err {v:.3e} ≥ {RECOVERY_AFTER_SECOND_CHANGE:e}"
            )),
            None => failures.push("run too short to cover the k=1200 change window".into()),
        }
        let stale_min = none
            .records
            .iter()
            .filter(|r| r.k > 200)
            .map(|r| r.param_err)
            .fold(f64::INFINITY, f64::min);
        if stale_min > STALE_BANK_FLOOR {
            notes.push(format!("no-inner-forgetting floor {stale_min:.3e}"));
        } else {
            failures.push(format!(
                "no-inner-forgetting variant dipped to {stale_min:.3e} ≤ {STALE_BANK_FLOOR:e}"
            ));
        }
        let passed = failures.is_empty();
        outcome(
            passed,
            if passed {
                notes.join("; ")
            } else {
                failures.join("; ")
            },
        )
    }

    fn c10_condition_ordering(&self) -> CriterionOutcome {
        let name = "directional inner forgetting gives the best conditioning";
        let outcome = |passed, detail| CriterionOutcome {
            id: 10,
            name,
            passed,
            detail,
        };
        let avg_cond = |t: &MethodTrace| -> f64 {
            let vals: Vec<f64> = t
                .records
                .iter()
                .filter(|r| r.k >= 1500)
                .map(|r| r.cond_p)
                .collect();
            vals.iter().sum::<f64>() / vals.len().max(1) as f64
        };
        let df = match self.case2_trace("tlf-rls/df/l0.01/m0.99") {
            Ok(t) => avg_cond(t),
            Err(e) => return outcome(false, e),
        };
        let ef_inner = match self.case2_trace("tlf-rls/ef/l0.01/m0.99") {
            Ok(t) => avg_cond(t),
            Err(e) => return outcome(false, e),
        };
        let ef_rls = match self.case2_trace("ef-rls/l0.99") {
            Ok(t) => avg_cond(t),
            Err(e) => return outcome(false, e),
        };
        let passed = df.is_finite() && df < ef_inner && df < ef_rls;
        outcome(
            passed,
            format!(
                "time-averaged cond(P) over the tail: df-inner {df:.3e}, ef-inner {ef_inner:.3e}, \
                 ef-rls {ef_rls:.3e}"
            ),
        )
    }

    fn c11_property_suite(&self) -> CriterionOutcome {
        let name = "bank invariants and hand-computed examples";
        let mut failures = Vec::new();
        let tol = Tolerances::default();

        // 100 randomized noise-free streams × 100 steps: positive
        // semidefiniteness and the Ωθ = M coupling at every step.
        let mut rng = SplitMix64::new(0xD1CE);
        let mut checked = 0usize;
        'streams: for stream in 0..100 {
            let n = 2 + (stream % 3);
            let theta: Vec<f64> = (0..n).map(|_| rng.range(-2.0, 2.0)).collect();
            let mode = match stream % 3 {
                0 => InnerMode::Df,
                1 => InnerMode::Ef,
                _ => InnerMode::None,
            };
            let mu = if mode == InnerMode::None {
                0.0
            } else {
                rng.range(0.0, 0.999)
            };
            let mut bank = RegressorBank::new(n, mode, mu);
            for step in 0..100 {
                let phi: Vec<f64> = (0..n).map(|_| rng.range(-3.0, 3.0)).collect();
                let y = dot(&phi, &theta);
                bank = bank.update(&RegressorSample::new(phi, y), &tol);
                checked += 1;
                if bank.omega().min_eigenvalue() < -tol.eps_psd {
                    failures.push(format!(
                        "stream {stream} step {step}: λ_min(Ω) = {:e}",
                        bank.omega().min_eigenvalue()
                    ));
                    break 'streams;
                }
                if bank.consistency_residual(&theta) > 1e-10 {
                    failures.push(format!(
                        "stream {stream} step {step}: ‖Ωθ − M‖ = {:e}",
                        bank.consistency_residual(&theta)
                    ));
                    break 'streams;
                }
            }
        }

        // Zero-μ uniform forgetting coincides with plain accumulation.
        let mut ef = RegressorBank::new(3, InnerMode::Ef, 0.0);
        let mut none = RegressorBank::new(3, InnerMode::None, 0.0);
        for _ in 0..200 {
            let phi: Vec<f64> = (0..3).map(|_| rng.range(-2.0, 2.0)).collect();
            let s = RegressorSample::new(phi, rng.range(-1.0, 1.0));
            ef = ef.update(&s, &tol);
            none = none.update(&s, &tol);
            for i in 0..3 {
                for j in 0..3 {
                    if (ef.omega().get(i, j) - none.omega().get(i, j)).abs() > 1e-15 {
                        failures.push("μ=0 uniform forgetting deviates from accumulation".into());
                    }
                }
            }
        }

        // Hand-computed examples.
        let (_, m) = normalize(&[2.0]);
        if (m - 5.0f64.sqrt()).abs() > 1e-15 {
            failures.push("normalize([2]) magnitude".into());
        }
        let first = RegressorBank::new(2, InnerMode::Df, 0.99)
            .update(&RegressorSample::new(vec![1.0, 0.0], 3.0), &tol);
        if (first.omega().get(0, 0) - 0.5).abs() > 1e-15 || (first.m_vec()[0] - 1.5).abs() > 1e-15 {
            failures.push("first directional accumulate".into());
        }

        let mut scalar = EstimatorState::new(1, 0.5, 1.0);
        scalar.theta_hat = vec![1.0];
        let omega1 = SymMatrix::diag(&[1.0]);
        match scalar.tlf_rls_step(&omega1, &[0.0], &tol) {
            Ok(next) => {
                if (next.theta_hat[0] - 1.0 / 3.0).abs() > 1e-15
                    || (next.p_mat.get(0, 0) - 2.0 / 3.0).abs() > 1e-15
                    || (next.r_mat.get(0, 0) - 1.5).abs() > 1e-15
                    || (next.lyapunov_value(&[0.0]) - 1.0 / 6.0).abs() > 1e-14
                {
                    failures.push("scalar layered step values".into());
                }
            }
            Err(e) => failures.push(format!("scalar layered step failed: {e}")),
        }

        let est = EstimatorState::new(1, 0.5, 1.0);
        let next = est.ef_rls_step(&RegressorSample::new(vec![1.0], 1.0), 1e12);
        let g = 1.0 / 1.5;
        if (next.theta_hat[0] - g).abs() > 1e-15 {
            failures.push("scalar EF-RLS gain".into());
        }

        let mem = CLMemory::new(1, 2);
        let (dcl_next, _) = dcl_step(
            &EstimatorState::new(1, 0.5, 1.0),
            &RegressorSample::new(vec![1.0], 1.0),
            &mem,
            &GainConfig::default(),
            &tol,
        );
        if (dcl_next.theta_hat[0] - 0.5).abs() > 1e-15 {
            failures.push("scalar concurrent-learning step".into());
        }

        let mut proj = EstimatorState::new(2, 0.5, 1.0);
        proj.theta_hat = vec![3.0, -1.0];
        let target = vec![0.5, 0.25];
        let projected = dfcl_step(
            &proj,
            &SymMatrix::identity(2),
            &target,
            &GainConfig::default(),
        );
        if (projected.theta_hat[0] - 0.5).abs() > 1e-15
            || (projected.theta_hat[1] - 0.25).abs() > 1e-15
        {
            failures.push("identity-bank gradient projection".into());
        }

        let theta_a = PlantModel::preset(CaseLabel::A).theta;
        let norm_a: f64 = theta_a.iter().map(|t| t * t).sum::<f64>().sqrt();
        if (norm_a - 1.9388565676707499).abs() > 1e-12 {
            failures.push("case (a) coefficient norm".into());
        }

        let passed = failures.is_empty();
        CriterionOutcome {
            id: 11,
            name,
            passed,
            detail: if passed {
                format!("{checked} randomized bank steps plus hand examples all hold")
            } else {
                failures.join("; ")
            },
        }
    }
}

impl Default for VerifyContext {
    fn default() -> Self {
        VerifyContext::new()
    }
}

/// Maximum per-component deviation between the recursive estimate and the
/// direct minimizer of the exponentially weighted cost, computed over an
/// n = 2 synthetic stream.
///
/// The oracle forms the weighted normal equations explicitly and solves the
/// 2×2 system by Cramer's rule — an implementation path fully independent
/// of the recursion and its Cholesky machinery.
#[allow(clippy::needless_range_loop)]
pub fn batch_oracle_deviation(
    lambda: f64,
    gamma: f64,
    mu: f64,
    steps: usize,
    seed: u64,
) -> (f64, usize) {
    let tol = Tolerances::default();
    let theta_true = [0.8, -0.6];
    let mut rng = SplitMix64::new(seed);
    let mut bank = RegressorBank::new(2, InnerMode::Df, mu);
    let mut est = EstimatorState::new(2, lambda, gamma);
    let mut omegas: Vec<SymMatrix> = Vec::new();
    let mut ms: Vec<Vec<f64>> = Vec::new();
    let mut max_dev = 0.0f64;
    let mut completed = 0usize;
    for _ in 1..=steps {
        let phi: Vec<f64> = (0..2).map(|_| rng.range(-1.5, 1.5)).collect();
        let y = phi[0] * theta_true[0] + phi[1] * theta_true[1];
        bank = bank.update(&RegressorSample::new(phi, y), &tol);
        est = match est.tlf_rls_step(bank.omega(), bank.m_vec(), &tol) {
            Ok(next) => next,
            Err(_) => break,
        };
        omegas.push(bank.omega().clone());
        ms.push(bank.m_vec().to_vec());
        completed += 1;

        let t = omegas.len();
        // lhs = λᵗ R(0) + Σ λ^{t-i} Ω(i)²; rhs = λᵗ R(0) θ̂(0) + Σ λ^{t-i} Ω(i) M(i).
        let lam_t = lambda.powi(t as i32);
        let mut lhs = [[0.0f64; 2]; 2];
        let mut rhs = [0.0f64; 2];
        lhs[0][0] = lam_t / gamma;
        lhs[1][1] = lam_t / gamma;
        for (idx, (om, mv)) in omegas.iter().zip(&ms).enumerate() {
            let w = lambda.powi((t - (idx + 1)) as i32);
            for i in 0..2 {
                for j in 0..2 {
                    lhs[i][j] += w * (om.get(i, 0) * om.get(0, j) + om.get(i, 1) * om.get(1, j));
                }
                rhs[i] += w * (om.get(i, 0) * mv[0] + om.get(i, 1) * mv[1]);
            }
        }
        let det = lhs[0][0] * lhs[1][1] - lhs[0][1] * lhs[1][0];
        let x0 = (lhs[1][1] * rhs[0] - lhs[0][1] * rhs[1]) / det;
        let x1 = (lhs[0][0] * rhs[1] - lhs[1][0] * rhs[0]) / det;
        let dev = (x0 - est.theta_hat[0])
            .abs()
            .max((x1 - est.theta_hat[1]).abs());
        max_dev = max_dev.max(dev);
    }
    (max_dev, completed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn oracle_detects_corrupted_forgetting_factor() {
        // The recursion run at a different λ than the oracle's weighting
        // must be flagged; this is the sensitivity counterpart of the
        // batch-equivalence criterion.
        let (dev_clean, _) = batch_oracle_deviation(0.7, 50.0, 0.9, 30, 7);
        assert!(dev_clean < 1e-10, "clean deviation {dev_clean:e}");

        // Re-run the oracle with its weights corrupted relative to the
        // recursion's λ.
        let tol = Tolerances::default();
        let theta_true = [0.8, -0.6];
        let mut rng = SplitMix64::new(7);
        let mut bank = RegressorBank::new(2, InnerMode::Df, 0.9);
        let mut est = EstimatorState::new(2, 0.7, 50.0);
        let mut omegas = Vec::new();
        let mut ms = Vec::new();
        let mut max_dev = 0.0f64;
        for _ in 0..30 {
            let phi: Vec<f64> = (0..2).map(|_| rng.range(-1.5, 1.5)).collect();
            let y = phi[0] * theta_true[0] + phi[1] * theta_true[1];
            bank = bank.update(&RegressorSample::new(phi, y), &tol);
            est = est.tlf_rls_step(bank.omega(), bank.m_vec(), &tol).unwrap();
            omegas.push(bank.omega().clone());
            ms.push(bank.m_vec().to_vec());
            let t = omegas.len();
            let wrong_lambda: f64 = 0.5;
            let lam_t = wrong_lambda.powi(t as i32);
            let mut lhs = [[lam_t / 50.0, 0.0], [0.0, lam_t / 50.0]];
            let mut rhs = [0.0f64; 2];
            for (idx, (om, mv)) in omegas.iter().zip(&ms).enumerate() {
                let w = wrong_lambda.powi((t - (idx + 1)) as i32);
                for i in 0..2 {
                    for j in 0..2 {
                        lhs[i][j] +=
                            w * (om.get(i, 0) * om.get(0, j) + om.get(i, 1) * om.get(1, j));
                    }
                    rhs[i] += w * (om.get(i, 0) * mv[0] + om.get(i, 1) * mv[1]);
                }
            }
            let det = lhs[0][0] * lhs[1][1] - lhs[0][1] * lhs[1][0];
            let x0 = (lhs[1][1] * rhs[0] - lhs[0][1] * rhs[1]) / det;
            let x1 = (lhs[0][0] * rhs[1] - lhs[1][0] * rhs[0]) / det;
            max_dev = max_dev
                .max((x0 - est.theta_hat[0]).abs())
                .max((x1 - est.theta_hat[1]).abs());
        }
        assert!(
            max_dev > 1e-4,
            "corrupted oracle should disagree, got {max_dev:e}"
        );
    }

    #[test]
    fn short_horizon_reports_failure_not_panic() {
        let mut c1 = ExperimentConfig::case1();
        c1.steps = 2;
        let mut c2 = ExperimentConfig::case2();
        c2.steps = 2;
        let ctx = VerifyContext::with_configs(c1, c2);
        // Horizon is too short for the recovery windows; the outcome must
        // be a plain failure.
        let o9 = ctx.outcome(9);
        assert!(!o9.passed);
        assert!(o9.detail.contains("too short"), "{}", o9.detail);
    }
}
