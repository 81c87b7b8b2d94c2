//! Minimal identification loop: estimate the coefficients of the built-in
//! ARX plant (a) from its input/output stream.
//!
//! The estimator is the layered-forgetting RLS: a directional-forgetting
//! bank folds each regressor into the augmented pair (Ω, M), and the outer
//! recursion updates the estimate against that pair. Because Ω stays
//! positive definite once the stream has excited every direction, the outer
//! forgetting factor can be pushed as low as 0.01 without windup, which
//! makes convergence essentially one-shot after the onset.
//!
//! Run with: `cargo run --release --example identify`

use tlf_rls::bank::{InnerMode, RegressorBank, RegressorSample};
use tlf_rls::estimators::EstimatorState;
use tlf_rls::linalg::Tolerances;
use tlf_rls::plant::{simulate, CaseLabel, ChangeSchedule, InputSignal, PlantModel};

fn main() {
    let tol = Tolerances::default();
    let model = PlantModel::preset(CaseLabel::A);
    let schedule = ChangeSchedule::constant(model);
    let samples = simulate(&schedule, &InputSignal::default(), 200);

    let mut bank = RegressorBank::new(4, InnerMode::Df, 0.99);
    let mut est = EstimatorState::new(4, 0.01, 1000.0);

    for s in &samples {
        bank = bank.update(&RegressorSample::new(s.phi.to_vec(), s.y_next), &tol);
        est = est
            .tlf_rls_step(bank.omega(), bank.m_vec(), &tol)
            .expect("healthy run");
        if matches!(s.k, 1 | 2 | 3 | 4 | 5 | 10 | 50 | 200) {
            println!(
                "k = {:3}  error = {:10.3e}  (augmented matrix {} )",
                s.k,
                est.parameter_error(&model.theta),
                if bank.k_e().is_some_and(|ke| s.k >= ke) {
                    "positive definite"
                } else {
                    "still singular"
                },
            );
        }
    }

    println!("\ntrue coefficients:      {:?}", model.theta);
    println!("estimated coefficients: {:?}", est.theta_hat);
    println!(
        "onset of positive definiteness: step {}",
        bank.k_e().expect("reached within 200 steps")
    );
}
