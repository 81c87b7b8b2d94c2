//! Augmented regressor bank.
//!
//! A bank folds the stream of regressor vectors φ(k) into a square matrix
//! Ω(k) and companion vector M(k), both built from normalized outer products
//! `φφᵀ/m²` with `m = √(1 + φᵀφ)`. Running plain accumulation leaves Ω
//! unbounded; the bank therefore supports three inner-forgetting modes:
//!
//! * [`InnerMode::Df`] — directional forgetting. When the incoming φ adds no
//!   new direction, the rank-preserving update
//!   `Ω⁺ = Ω − μ (Ωφφᵀ/(φᵀΩφ)) Ω + φφᵀ/m²` discounts Ω only along the
//!   excited direction, so information in unexcited directions survives and
//!   Ω stays positive definite once it first becomes so.
//! * [`InnerMode::Ef`] — uniform discount `Ω⁺ = (1−μ)Ω + φφᵀ/m²`. Kept as a
//!   comparison variant; it cannot hold a lower eigenvalue bound without a
//!   persistently exciting φ.
//! * [`InnerMode::None`] — pure accumulation, also a comparison variant.
//!
//! Unlike the usual forgetting-factor convention, μ close to 1 means heavy
//! forgetting and μ = 0 means none, for both Df and Ef modes.
//!
//! M receives the same linear map as Ω in every branch, which keeps the
//! coupling `M(k) = Ω(k) θ` exact for noise-free data from a constant θ.
//!
//! Bank states are immutable values: every update returns a fresh state, so
//! experiment runs are trivially replayable.

use crate::linalg::{dot, norm2, SymMatrix, Tolerances};

/// One step of the identification stream: the regressor formed at step k and
/// the plant output it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorSample {
    pub phi: Vec<f64>,
    pub y_next: f64,
}

impl RegressorSample {
    pub fn new(phi: Vec<f64>, y_next: f64) -> Self {
        RegressorSample { phi, y_next }
    }
}

/// Inner-forgetting mode applied while building Ω and M.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InnerMode {
    Df,
    Ef,
    None,
}

impl InnerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InnerMode::Df => "df",
            InnerMode::Ef => "ef",
            InnerMode::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<InnerMode> {
        match s {
            "df" => Some(InnerMode::Df),
            "ef" => Some(InnerMode::Ef),
            "none" => Some(InnerMode::None),
            _ => None,
        }
    }
}

/// Normalizes a regressor: returns `(φ/m, m)` with `m = √(1 + φᵀφ) ≥ 1`,
/// so the normalized vector always has norm < 1.
pub fn normalize(phi: &[f64]) -> (Vec<f64>, f64) {
    let m = (1.0 + dot(phi, phi)).sqrt();
    (phi.iter().map(|p| p / m).collect(), m)
}

/// Augmented regressor matrix Ω, companion vector M, and excitation
/// bookkeeping for one inner-forgetting mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorBank {
    omega: SymMatrix,
    m_vec: Vec<f64>,
    mode: InnerMode,
    mu: f64,
    /// First step at which Ω became positive definite; never unset.
    k_e: Option<usize>,
    /// Number of samples processed.
    step: usize,
}

impl RegressorBank {
    /// Fresh bank with Ω = 0 and M = 0.
    ///
    /// For Df and Ef modes, μ must lie in [0, 1); None ignores μ.
    pub fn new(n: usize, mode: InnerMode, mu: f64) -> RegressorBank {
        if matches!(mode, InnerMode::Df | InnerMode::Ef) {
            assert!(
                (0.0..1.0).contains(&mu),
                "inner forgetting factor must lie in [0, 1), got {mu}"
            );
        }
        RegressorBank {
            omega: SymMatrix::zeros(n),
            m_vec: vec![0.0; n],
            mode,
            mu,
            k_e: None,
            step: 0,
        }
    }

    pub fn omega(&self) -> &SymMatrix {
        &self.omega
    }

    pub fn m_vec(&self) -> &[f64] {
        &self.m_vec
    }

    pub fn mode(&self) -> InnerMode {
        self.mode
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k_e(&self) -> Option<usize> {
        self.k_e
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn n(&self) -> usize {
        self.omega.n()
    }

    /// Folds one sample into the bank according to its mode and returns the
    /// successor state. A zero regressor leaves everything but the step
    /// count unchanged (its normalized contribution is zero, and the
    /// directional branch would otherwise divide by φᵀΩφ = 0).
    pub fn update(&self, s: &RegressorSample, tol: &Tolerances) -> RegressorBank {
        assert_eq!(s.phi.len(), self.n(), "regressor dimension mismatch");
        let phi_norm_sq = dot(&s.phi, &s.phi);
        if phi_norm_sq == 0.0 {
            let mut next = self.clone();
            next.step += 1;
            return next;
        }
        let m_sq = 1.0 + phi_norm_sq;
        let (omega, m_vec) = match self.mode {
            InnerMode::Df => self.step_df(s, m_sq, phi_norm_sq, tol),
            InnerMode::Ef => self.step_ef(s, m_sq),
            InnerMode::None => self.step_accumulate(s, m_sq),
        };
        let step = self.step + 1;
        let k_e = match self.k_e {
            Some(k) => Some(k),
            None if omega.min_eigenvalue() > tol.eps_psd => Some(step),
            None => None,
        };
        RegressorBank {
            omega,
            m_vec,
            mode: self.mode,
            mu: self.mu,
            k_e,
            step,
        }
    }

    /// Plain accumulation: `Ω += φφᵀ/m²`, `M += φ y/m²`.
    fn step_accumulate(&self, s: &RegressorSample, m_sq: f64) -> (SymMatrix, Vec<f64>) {
        let omega = self
            .omega
            .plus(&SymMatrix::scaled_outer(&s.phi, 1.0 / m_sq));
        let m_vec = self
            .m_vec
            .iter()
            .zip(&s.phi)
            .map(|(m, p)| m + p * s.y_next / m_sq)
            .collect();
        (omega, m_vec)
    }

    /// Uniform discount then accumulate: `Ω⁺ = (1−μ)Ω + φφᵀ/m²`.
    fn step_ef(&self, s: &RegressorSample, m_sq: f64) -> (SymMatrix, Vec<f64>) {
        let omega = self
            .omega
            .scaled(1.0 - self.mu)
            .plus(&SymMatrix::scaled_outer(&s.phi, 1.0 / m_sq));
        let m_vec = self
            .m_vec
            .iter()
            .zip(&s.phi)
            .map(|(m, p)| (1.0 - self.mu) * m + p * s.y_next / m_sq)
            .collect();
        (omega, m_vec)
    }

    /// Directional forgetting. While the incoming φ still adds a new
    /// direction (or the denominator guard trips), accumulate; afterwards
    /// discount only along the excited direction:
    ///
    /// `Ω⁺ = Ω − μ (Ωφφᵀ/(φᵀΩφ)) Ω + φφᵀ/m²`,
    ///
    /// with the same map `I − μ Ωφφᵀ/(φᵀΩφ)` applied to M.
    fn step_df(
        &self,
        s: &RegressorSample,
        m_sq: f64,
        phi_norm_sq: f64,
        tol: &Tolerances,
    ) -> (SymMatrix, Vec<f64>) {
        let quad = self.omega.quad_form(&s.phi);
        let accumulate = if quad <= tol.eps_div * phi_norm_sq {
            // Division guard; also covers the fresh-bank case Ω = 0.
            true
        } else {
            let candidate = self
                .omega
                .plus(&SymMatrix::scaled_outer(&s.phi, 1.0 / m_sq));
            candidate.numerical_rank(tol) > self.omega.numerical_rank(tol)
        };
        if accumulate {
            return self.step_accumulate(s, m_sq);
        }
        // The forgetting operator is T = I − μ Ωφφᵀ/(φᵀΩφ), applied from the
        // left to both Ω and M. TΩ = Ω − μ (Ωφ)(Ωφ)ᵀ/(φᵀΩφ) stays symmetric,
        // and PSD is preserved by Cauchy-Schwarz in the Ω inner product.
        let omega_phi = self.omega.mat_vec(&s.phi);
        let coeff = self.mu / quad;
        let mut omega = self.omega.clone();
        for i in 0..self.n() {
            for j in i..self.n() {
                let v = omega.get(i, j) - coeff * omega_phi[i] * omega_phi[j]
                    + s.phi[i] * s.phi[j] / m_sq;
                omega.set(i, j, v);
            }
        }
        let phi_dot_m = dot(&s.phi, &self.m_vec);
        let m_vec = self
            .m_vec
            .iter()
            .zip(&s.phi)
            .zip(&omega_phi)
            .map(|((m, p), op)| m - coeff * op * phi_dot_m + p * s.y_next / m_sq)
            .collect();
        (omega, m_vec)
    }

    /// ‖Ω θ − M‖₂ — residual of the coupling identity. Zero (to round-off)
    /// when θ is the true parameter vector of a noise-free stream.
    pub fn consistency_residual(&self, theta: &[f64]) -> f64 {
        let lhs = self.omega.mat_vec(theta);
        let diff: Vec<f64> = lhs.iter().zip(&self.m_vec).map(|(a, b)| a - b).collect();
        norm2(&diff)
    }
}

/// Windowed excitation diagnostics; see [`excitation_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationReport {
    /// λ_min of Σ φφᵀ over the trailing window.
    pub min_eig_phi_outer: f64,
    /// λ_min of Ω² for the bank's current state.
    pub min_eig_omega_sq: f64,
    /// Window parameter δ (the window spans δ+1 samples).
    pub window_delta: usize,
    /// The achieved excitation level: min of the two eigenvalues above.
    pub level_alpha: f64,
}

/// λ_min of `Σ φφᵀ` over the trailing `window` samples of `phis`
/// (or all of them when fewer are available). Zero-width windows yield 0.
pub fn windowed_phi_min_eig(phis: &[Vec<f64>], window: usize) -> f64 {
    if phis.is_empty() || window == 0 {
        return 0.0;
    }
    let n = phis[0].len();
    let start = phis.len().saturating_sub(window);
    let mut sum = SymMatrix::zeros(n);
    for phi in &phis[start..] {
        sum = sum.plus(&SymMatrix::scaled_outer(phi, 1.0));
    }
    sum.min_eigenvalue()
}

/// Excitation snapshot over the trailing window of width `delta + 1`.
///
/// The raw-regressor diagnostic is the windowed λ_min of Σφφᵀ; the bank
/// diagnostic is the instantaneous λ_min of Ω², which is the relevant
/// quantity once Ω holds positive definiteness (the window can then be
/// taken as zero).
pub fn excitation_report(
    phis: &[Vec<f64>],
    bank: &RegressorBank,
    delta: usize,
) -> ExcitationReport {
    let min_eig_phi_outer = windowed_phi_min_eig(phis, delta + 1).max(0.0);
    let min_eig_omega_sq = bank.omega().square().min_eigenvalue().max(0.0);
    ExcitationReport {
        min_eig_phi_outer,
        min_eig_omega_sq,
        window_delta: delta,
        level_alpha: min_eig_phi_outer.min(min_eig_omega_sq),
    }
}
