//! Discrete-time recursive least squares identification with two layered
//! forgetting factors.
//!
//! Classical exponentially-forgetting RLS needs a persistently exciting
//! regressor: without one, forgetting inflates the covariance until the
//! estimator winds up or destabilizes, so the forgetting factor cannot be
//! chosen freely. This crate implements an identifier that removes that
//! restriction for streams that are only *finitely* exciting:
//!
//! * an **inner layer** ([`bank`]) folds each normalized regressor into an
//!   augmented matrix Ω and companion vector M, discounting old data only
//!   along currently excited directions (directional forgetting), so Ω
//!   becomes positive definite as soon as the stream has spanned the
//!   parameter space once — and stays that way;
//! * an **outer layer** ([`estimators`]) runs an exponentially forgetting
//!   least-squares recursion against (Ω, M) instead of raw data. With Ω
//!   uniformly positive definite, the outer factor λ can sit anywhere in
//!   (0, 1) — aggressive values buy convergence speed without windup, and
//!   the error energy θ̃ᵀRθ̃ contracts by λ every step.
//!
//! Around the core sit comparison baselines (classical EF-RLS and two
//! gradient-type concurrent-learning updates), ARX test plants with a
//! parameter-change schedule ([`plant`]), an experiment runner with CSV
//! traces ([`experiment`], [`trace_csv`], [`config`]), and a verification
//! suite that measures the stability guarantees at runtime ([`verify`]).
//!
//! ```
//! use tlf_rls::bank::{InnerMode, RegressorBank, RegressorSample};
//! use tlf_rls::estimators::EstimatorState;
//! use tlf_rls::linalg::Tolerances;
//!
//! // Identify θ = [0.5, -0.25] from noise-free samples.
//! let tol = Tolerances::default();
//! let mut bank = RegressorBank::new(2, InnerMode::Df, 0.9);
//! let mut est = EstimatorState::new(2, 0.1, 100.0);
//! for k in 1..=40 {
//!     let phi = vec![(0.3 * k as f64).sin(), (0.7 * k as f64).cos()];
//!     let y = 0.5 * phi[0] - 0.25 * phi[1];
//!     bank = bank.update(&RegressorSample::new(phi, y), &tol);
//!     est = est.tlf_rls_step(bank.omega(), bank.m_vec(), &tol).unwrap();
//! }
//! assert!(est.parameter_error(&[0.5, -0.25]) < 1e-9);
//! ```
//!
//! The `tlf-rls` binary exposes the built-in experiments
//! (`case1`, `case2`, `custom`) and the verification suite (`verify`);
//! each runnable example under `examples/` demonstrates one capability.

pub mod bank;
pub mod config;
pub mod estimators;
pub mod experiment;
pub mod linalg;
pub mod plant;
pub mod trace_csv;
pub mod verify;

pub use bank::{InnerMode, RegressorBank, RegressorSample};
pub use estimators::{CLMemory, EstimatorState, GainConfig};
pub use experiment::{run, CaseId, ExperimentConfig, MethodSpec, RunResult, TraceRecord};
pub use linalg::{Mat, SymMatrix, Tolerances};
pub use plant::{CaseLabel, ChangeSchedule, InputSignal, PlantModel};
