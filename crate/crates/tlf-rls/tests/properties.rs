//! Property tests over randomized inputs.

use proptest::prelude::*;

use tlf_rls::bank::{normalize, InnerMode, RegressorBank, RegressorSample};
use tlf_rls::config::{emit_config, parse_config};
use tlf_rls::experiment::{CaseId, ExperimentConfig, MethodSpec};
use tlf_rls::linalg::{norm2, Tolerances};

proptest! {
    /// The normalized regressor always has norm strictly below one and the
    /// magnitude is never below one.
    #[test]
    fn normalization_contracts(phi in proptest::collection::vec(-1e3f64..1e3, 1..6)) {
        let (phi_bar, m) = normalize(&phi);
        prop_assert!(m >= 1.0);
        prop_assert!(norm2(&phi_bar) < 1.0);
    }

    /// Positive semidefiniteness and the Ωθ = M coupling hold along every
    /// noise-free stream, in every inner mode.
    #[test]
    fn bank_psd_and_coupling(
        seed_data in proptest::collection::vec(
            proptest::collection::vec(-5.0f64..5.0, 3), 1..40),
        theta in proptest::collection::vec(-2.0f64..2.0, 3),
        mode_sel in 0usize..3,
        mu in 0.0f64..0.999,
    ) {
        let tol = Tolerances::default();
        let mode = [InnerMode::Df, InnerMode::Ef, InnerMode::None][mode_sel];
        let mu = if mode == InnerMode::None { 0.0 } else { mu };
        let mut bank = RegressorBank::new(3, mode, mu);
        for phi in &seed_data {
            let y: f64 = phi.iter().zip(&theta).map(|(p, t)| p * t).sum();
            bank = bank.update(&RegressorSample::new(phi.clone(), y), &tol);
            prop_assert!(bank.omega().min_eigenvalue() >= -tol.eps_psd);
            prop_assert!(bank.consistency_residual(&theta) <= 1e-10);
        }
    }

    /// Emitted config text reparses to the identical config.
    #[test]
    fn config_round_trip(
        steps in 1usize..5000,
        window in 1usize..200,
        gamma in 0.1f64..1e4,
        lambda in 0.001f64..0.999,
        mu in 0.0f64..0.999,
        gain in 0.01f64..1.99,
    ) {
        let mut cfg = ExperimentConfig::custom();
        cfg.steps = steps;
        cfg.window = window;
        cfg.gamma = gamma;
        cfg.methods = vec![
            MethodSpec::EfRls { lambda },
            MethodSpec::TlfRls { inner: InnerMode::Df, lambda, mu },
            MethodSpec::DfCl { mu, gain },
        ];
        prop_assume!(cfg.validate().is_ok());
        let text = emit_config(&cfg);
        let reparsed = parse_config(&text, CaseId::Custom).unwrap();
        prop_assert_eq!(cfg, reparsed);
    }
}
