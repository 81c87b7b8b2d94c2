//! Parameter update laws.
//!
//! * [`EstimatorState::tlf_rls_step`] — the layered-forgetting RLS: an
//!   exponentially forgetting least-squares recursion driven by the bank's
//!   augmented pair (Ω, M) instead of raw regressors. Because Ω stays
//!   positive definite under directional inner forgetting, the outer factor
//!   λ can be chosen anywhere in (0, 1) — including aggressively small
//!   values — without covariance windup.
//! * [`EstimatorState::ef_rls_step`] — the classical exponential-forgetting
//!   RLS over raw (φ, y). Kept bit-faithful to the textbook recursion so its
//!   windup under poor excitation is reproducible as data: blow-ups latch a
//!   divergence flag instead of aborting.
//! * [`dcl_step`] — normalized-gradient update with a memory of recorded
//!   samples whose replay term keeps the error contracting once the memory
//!   spans the parameter space.
//! * [`dfcl_step`] — gradient update driven by a directionally-forgotten
//!   (Ω, M) pair, normalized by λ_max(Ω).
//!
//! All states are immutable values; each step returns the successor.

use crate::bank::RegressorSample;
use crate::linalg::{dot, norm2, Cholesky, LinalgError, Mat, SymMatrix, Tolerances};

/// Covariance eigenvalue ceiling beyond which an estimator is flagged as
/// diverged. High enough that healthy runs never touch it.
pub const DEFAULT_DIVERGENCE_CEILING: f64 = 1e12;

/// Estimate, covariance P, and shadow information matrix R for one method.
///
/// R is propagated purely for diagnostics (`R⁺ = λR + Ω²` alongside the
/// covariance recursion); the estimate path only ever touches P. For a
/// healthy layered-forgetting run `P R = I` holds to round-off, which the
/// verification suite checks explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    pub theta_hat: Vec<f64>,
    pub p_mat: SymMatrix,
    pub r_mat: SymMatrix,
    pub lambda: f64,
    pub gamma: f64,
    /// Latched when the covariance blows past the ceiling or the state
    /// stops being finite. Never cleared.
    pub diverged: bool,
    /// Asymmetry of the covariance update before re-symmetrization at the
    /// most recent step; a numerical health probe.
    pub p_asym: f64,
}

impl EstimatorState {
    /// Fresh state: θ̂ = 0, P = γI, R = γ⁻¹I.
    pub fn new(n: usize, lambda: f64, gamma: f64) -> EstimatorState {
        assert!(
            lambda > 0.0 && lambda < 1.0,
            "outer forgetting factor must lie in (0, 1), got {lambda}"
        );
        assert!(gamma > 0.0, "initial covariance scale must be positive");
        EstimatorState {
            theta_hat: vec![0.0; n],
            p_mat: SymMatrix::scaled_identity(n, gamma),
            r_mat: SymMatrix::scaled_identity(n, 1.0 / gamma),
            lambda,
            gamma,
            diverged: false,
            p_asym: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.theta_hat.len()
    }

    pub fn is_finite(&self) -> bool {
        self.theta_hat.iter().all(|v| v.is_finite())
            && self.p_mat.is_finite()
            && self.r_mat.is_finite()
    }

    /// ‖θ̂ − θ_true‖₂.
    pub fn parameter_error(&self, theta_true: &[f64]) -> f64 {
        let diff: Vec<f64> = self
            .theta_hat
            .iter()
            .zip(theta_true)
            .map(|(a, b)| a - b)
            .collect();
        norm2(&diff)
    }

    /// Error energy `θ̃ᵀ R θ̃` with θ̃ = θ̂ − θ_true. Under the layered
    /// recursion on noise-free data this contracts by at least λ per step.
    pub fn lyapunov_value(&self, theta_true: &[f64]) -> f64 {
        let diff: Vec<f64> = self
            .theta_hat
            .iter()
            .zip(theta_true)
            .map(|(a, b)| a - b)
            .collect();
        self.r_mat.quad_form(&diff)
    }

    /// One layered-forgetting RLS step over the augmented pair (Ω, M):
    ///
    /// ```text
    /// N  = λI + Ω P Ω
    /// θ̂⁺ = θ̂ − P Ω N⁻¹ (Ω θ̂ − M)
    /// P⁺ = (P − P Ω N⁻¹ Ω P) / λ      (re-symmetrized)
    /// R⁺ = λR + Ω²
    /// ```
    ///
    /// N⁻¹ is applied through a positive definite solve; no inverse is ever
    /// formed. N is positive definite by construction (λ > 0, ΩPΩ PSD), so
    /// an error here means the state was already corrupted.
    pub fn tlf_rls_step(
        &self,
        omega: &SymMatrix,
        m_vec: &[f64],
        tol: &Tolerances,
    ) -> Result<EstimatorState, LinalgError> {
        let n = self.n();
        assert_eq!(omega.n(), n);
        assert_eq!(m_vec.len(), n);

        // N = λI + Ω P Ω; the sandwich of a PSD matrix is symmetrized to
        // scrub round-off asymmetry before the solve.
        let omega_p = omega.mul(&self.p_mat);
        let opo = omega_p.mul(&Mat::from_sym(omega)).symmetrized();
        let n_mat = SymMatrix::scaled_identity(n, self.lambda).plus(&opo);
        let chol = Cholesky::new(&n_mat, tol.eps_psd)?;

        // Augmented error e = Ω θ̂ − M, gain direction w = N⁻¹ e.
        let err: Vec<f64> = omega
            .mat_vec(&self.theta_hat)
            .iter()
            .zip(m_vec)
            .map(|(a, b)| a - b)
            .collect();
        let w_mat = chol.solve(&Mat::column(&err));
        let w: Vec<f64> = (0..n).map(|i| w_mat.get(i, 0)).collect();
        let p_omega_w = self.p_mat.mat_vec(&omega.mat_vec(&w));
        let theta_hat: Vec<f64> = self
            .theta_hat
            .iter()
            .zip(&p_omega_w)
            .map(|(t, d)| t - d)
            .collect();

        // P⁺ = (P − (ΩP)ᵀ N⁻¹ (ΩP)) / λ, with the correction built as the
        // Gram matrix (L⁻¹ΩP)ᵀ(L⁻¹ΩP) so it is symmetric to the last bit.
        let correction = chol.gram_quotient(&omega_p);
        let p_raw = Mat::from_sym(&self.p_mat).minus(&Mat::from_sym(&correction));
        let p_asym = p_raw.asymmetry();
        let p_mat = p_raw.symmetrized().scaled(1.0 / self.lambda);

        let r_mat = self.r_mat.scaled(self.lambda).plus(&omega.square());

        let next = EstimatorState {
            theta_hat,
            p_mat,
            r_mat,
            lambda: self.lambda,
            gamma: self.gamma,
            diverged: self.diverged,
            p_asym,
        };
        Ok(if next.is_finite() {
            next
        } else {
            self.freeze_diverged()
        })
    }

    /// One classical exponential-forgetting RLS step over a raw sample:
    ///
    /// ```text
    /// e  = y − φᵀθ̂
    /// g  = Pφ / (λ + φᵀPφ)
    /// θ̂⁺ = θ̂ + g e
    /// P⁺ = (P − g φᵀ P) / λ             (re-symmetrized)
    /// R⁺ = λR + φφᵀ
    /// ```
    ///
    /// Without persistent excitation the covariance inflates without bound;
    /// once λ_max(P) exceeds `ceiling` the divergence flag latches. The
    /// state keeps updating while finite and freezes at the last finite
    /// value after that, so traces stay readable.
    pub fn ef_rls_step(&self, s: &RegressorSample, ceiling: f64) -> EstimatorState {
        if self.diverged && !self.is_finite() {
            return self.clone();
        }
        let e = s.y_next - dot(&s.phi, &self.theta_hat);
        let p_phi = self.p_mat.mat_vec(&s.phi);
        let denom = self.lambda + dot(&s.phi, &p_phi);
        let g: Vec<f64> = p_phi.iter().map(|v| v / denom).collect();
        let theta_hat: Vec<f64> = self
            .theta_hat
            .iter()
            .zip(&g)
            .map(|(t, gi)| t + gi * e)
            .collect();
        let n = self.n();
        let p_raw = Mat::from_fn(n, n, |i, j| self.p_mat.get(i, j) - g[i] * p_phi[j]);
        let p_asym = p_raw.asymmetry();
        let p_mat = p_raw.symmetrized().scaled(1.0 / self.lambda);
        let r_mat = self
            .r_mat
            .scaled(self.lambda)
            .plus(&SymMatrix::scaled_outer(&s.phi, 1.0));

        let next = EstimatorState {
            theta_hat,
            p_mat,
            r_mat,
            lambda: self.lambda,
            gamma: self.gamma,
            diverged: self.diverged,
            p_asym,
        };
        if !next.is_finite() {
            return self.freeze_diverged();
        }
        let diverged = next.diverged || next.p_mat.max_eigenvalue() > ceiling;
        EstimatorState { diverged, ..next }
    }

    fn freeze_diverged(&self) -> EstimatorState {
        EstimatorState {
            diverged: true,
            ..self.clone()
        }
    }
}

/// Scalar adaptation gain for the gradient-type baselines. Stability of the
/// normalized updates requires it below two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainConfig {
    gain: f64,
}

impl GainConfig {
    pub fn new(gain: f64) -> Result<GainConfig, String> {
        if gain > 0.0 && gain < 2.0 {
            Ok(GainConfig { gain })
        } else {
            Err(format!(
                "gain must lie strictly between 0 and 2, got {gain}"
            ))
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
}

impl Default for GainConfig {
    fn default() -> Self {
        GainConfig { gain: 1.0 }
    }
}

/// One recorded sample in a concurrent-learning memory.
#[derive(Debug, Clone, PartialEq)]
struct StoredSample {
    phi: Vec<f64>,
    y: f64,
    m_sq: f64,
}

/// Memory stack for the concurrent-learning baseline.
///
/// Admission favors informativeness: a sample is stored when it raises the
/// numerical rank of the memory's information matrix `Σ φⱼφⱼᵀ/mⱼ²`, and
/// otherwise swapped in whenever replacing some stored sample improves the
/// matrix's smallest eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct CLMemory {
    n: usize,
    capacity: usize,
    samples: Vec<StoredSample>,
}

impl CLMemory {
    pub fn new(n: usize, capacity: usize) -> CLMemory {
        assert!(
            capacity >= n,
            "memory capacity must be at least the dimension"
        );
        CLMemory {
            n,
            capacity,
            samples: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// `Σ φⱼφⱼᵀ/mⱼ²` over the stored samples.
    pub fn info_matrix(&self) -> SymMatrix {
        let mut sum = SymMatrix::zeros(self.n);
        for s in &self.samples {
            sum = sum.plus(&SymMatrix::scaled_outer(&s.phi, 1.0 / s.m_sq));
        }
        sum
    }

    /// Applies the admission rule to one incoming sample and returns the
    /// successor memory (possibly unchanged).
    pub fn admit(&self, s: &RegressorSample, tol: &Tolerances) -> CLMemory {
        let phi_norm_sq = dot(&s.phi, &s.phi);
        if phi_norm_sq == 0.0 {
            return self.clone();
        }
        let m_sq = 1.0 + phi_norm_sq;
        let incoming = StoredSample {
            phi: s.phi.clone(),
            y: s.y_next,
            m_sq,
        };
        let info = self.info_matrix();
        let with_new = info.plus(&SymMatrix::scaled_outer(&s.phi, 1.0 / m_sq));
        if self.samples.len() < self.capacity
            && with_new.numerical_rank(tol) > info.numerical_rank(tol)
        {
            let mut next = self.clone();
            next.samples.push(incoming);
            return next;
        }
        // No new direction: look for the swap that most improves λ_min.
        let current_min = info.min_eigenvalue();
        let mut best: Option<(usize, f64)> = None;
        for (j, old) in self.samples.iter().enumerate() {
            let swapped = with_new.minus(&SymMatrix::scaled_outer(&old.phi, 1.0 / old.m_sq));
            let min_eig = swapped.min_eigenvalue();
            if min_eig > best.map_or(current_min, |(_, b)| b) {
                best = Some((j, min_eig));
            }
        }
        match best {
            Some((j, improved)) if improved > current_min * (1.0 + 1e-12) => {
                let mut next = self.clone();
                next.samples[j] = incoming;
                next
            }
            _ => self.clone(),
        }
    }
}

/// One concurrent-learning step: a normalized gradient move on the
/// instantaneous error plus the averaged replay of the recorded samples.
/// The incoming sample feeds the replay term only from the next step on —
/// at this step it already contributes through the instantaneous term — so
/// the replay sum runs over `mem` as passed in, while the returned memory
/// has the admission rule applied. The covariance in `est` is untouched.
pub fn dcl_step(
    est: &EstimatorState,
    s: &RegressorSample,
    mem: &CLMemory,
    cfg: &GainConfig,
    tol: &Tolerances,
) -> (EstimatorState, CLMemory) {
    let n = est.n();
    let m_sq = 1.0 + dot(&s.phi, &s.phi);
    let mut update = vec![0.0; n];
    let inst_err = s.y_next - dot(&s.phi, &est.theta_hat);
    for (u, p) in update.iter_mut().zip(&s.phi) {
        *u += p * inst_err / m_sq;
    }
    let scale = 1.0 / (mem.len().max(1) as f64);
    for stored in &mem.samples {
        let err = stored.y - dot(&stored.phi, &est.theta_hat);
        for (u, p) in update.iter_mut().zip(&stored.phi) {
            *u += scale * p * err / stored.m_sq;
        }
    }
    let theta_hat: Vec<f64> = est
        .theta_hat
        .iter()
        .zip(&update)
        .map(|(t, u)| t + cfg.gain() * u)
        .collect();
    (
        EstimatorState {
            theta_hat,
            ..est.clone()
        },
        mem.admit(s, tol),
    )
}

/// One gradient step over a directionally-forgotten (Ω, M) pair, with the
/// step normalized by λ_max(Ω) so a unit gain cannot overshoot.
pub fn dfcl_step(
    est: &EstimatorState,
    omega: &SymMatrix,
    m_vec: &[f64],
    cfg: &GainConfig,
) -> EstimatorState {
    let err: Vec<f64> = omega
        .mat_vec(&est.theta_hat)
        .iter()
        .zip(m_vec)
        .map(|(a, b)| a - b)
        .collect();
    let denom = omega.max_eigenvalue().max(1.0);
    let theta_hat: Vec<f64> = est
        .theta_hat
        .iter()
        .zip(&err)
        .map(|(t, e)| t - cfg.gain() * e / denom)
        .collect();
    EstimatorState {
        theta_hat,
        ..est.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::{InnerMode, RegressorBank};
    use crate::linalg::SplitMix64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn tlf_zero_omega_inflates_covariance_only() {
        let est = EstimatorState::new(3, 0.5, 2.0);
        let next = est
            .tlf_rls_step(&SymMatrix::zeros(3), &[0.0; 3], &tol())
            .unwrap();
        assert_eq!(next.theta_hat, est.theta_hat);
        for i in 0..3 {
            assert!((next.p_mat.get(i, i) - 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tlf_scalar_hand_computation() {
        // n=1: θ̂=1, M=0, Ω=1, P=1, λ=0.5 →
        // N = 1.5, θ̂⁺ = 1 − (1/1.5) = 1/3, P⁺ = 2(1 − 1/1.5) = 2/3,
        // R⁺ = 0.5 + 1 = 1.5 = 1/P⁺.
        let mut est = EstimatorState::new(1, 0.5, 1.0);
        est.theta_hat = vec![1.0];
        let omega = SymMatrix::diag(&[1.0]);
        let next = est.tlf_rls_step(&omega, &[0.0], &tol()).unwrap();
        assert!((next.theta_hat[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((next.p_mat.get(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((next.r_mat.get(0, 0) - 1.5).abs() < 1e-15);
        assert!((next.p_mat.get(0, 0) * next.r_mat.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tlf_zero_augmented_error_is_fixed_point() {
        let mut rng = SplitMix64::new(8);
        let mut est = EstimatorState::new(2, 0.3, 10.0);
        est.theta_hat = vec![1.25, -0.5];
        let omega = SymMatrix::from_rows(&[&[2.0, 0.5], &[0.5, 1.0]]).unwrap();
        let m_vec = omega.mat_vec(&est.theta_hat);
        for _ in 0..5 {
            est = est.tlf_rls_step(&omega, &m_vec, &tol()).unwrap();
            assert!((est.theta_hat[0] - 1.25).abs() < 1e-12);
            assert!((est.theta_hat[1] + 0.5).abs() < 1e-12);
            // Perturbation sanity: the fixed point is independent of P.
            let _ = rng.next_u64();
        }
    }

    #[test]
    fn tlf_lyapunov_contraction_scalar() {
        // Continuing the scalar example with θ_true = 0: V goes from 1 to
        // (1/3)² · 1.5 = 1/6, below λV = 0.5.
        let mut est = EstimatorState::new(1, 0.5, 1.0);
        est.theta_hat = vec![1.0];
        let v0 = est.lyapunov_value(&[0.0]);
        assert!((v0 - 1.0).abs() < 1e-15);
        let omega = SymMatrix::diag(&[1.0]);
        let next = est.tlf_rls_step(&omega, &[0.0], &tol()).unwrap();
        let v1 = next.lyapunov_value(&[0.0]);
        assert!((v1 - 1.0 / 6.0).abs() < 1e-14);
        assert!(v1 <= 0.5 * v0);
    }

    #[test]
    fn lyapunov_identity_information_matrix_is_squared_norm() {
        let mut est = EstimatorState::new(3, 0.5, 1.0);
        est.theta_hat = vec![1.0, 2.0, -2.0];
        assert!((est.lyapunov_value(&[0.0; 3]) - 9.0).abs() < 1e-14);
    }

    #[test]
    fn parameter_error_examples() {
        let mut est = EstimatorState::new(4, 0.5, 1.0);
        let theta_a = [1.6405, -0.8187, 0.4606, 0.4307];
        // θ̂ = 0 against case (a): the norm of the coefficient vector.
        let expected: f64 = theta_a.iter().map(|t| t * t).sum::<f64>().sqrt();
        assert!((est.parameter_error(&theta_a) - expected).abs() < 1e-12);
        assert!((expected - 1.9388565676707499).abs() < 1e-12);
        est.theta_hat = theta_a.to_vec();
        assert_eq!(est.parameter_error(&theta_a), 0.0);
        est.theta_hat[0] += 1.0;
        assert!((est.parameter_error(&theta_a) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ef_rls_zero_phi_is_pure_windup() {
        let est = EstimatorState::new(2, 0.5, 1.0);
        let s = RegressorSample::new(vec![0.0, 0.0], 3.0);
        let next = est.ef_rls_step(&s, 1e12);
        assert_eq!(next.theta_hat, est.theta_hat);
        assert!((next.p_mat.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((next.p_mat.get(1, 1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ef_rls_scalar_hand_computation() {
        // The textbook scalar case θ̂=0, y=1, φ=1, P=1 at the no-forgetting
        // boundary λ=1 gives g = 0.5, θ̂⁺ = 0.5, P⁺ = 0.5. λ=1 sits outside
        // the state's domain, so check the recursion algebra directly, then
        // the library path at an interior λ.
        let p = 1.0f64;
        let (phi, y, lambda) = (1.0f64, 1.0f64, 1.0f64);
        let g = p * phi / (lambda + phi * p * phi);
        let theta = 0.0 + g * (y - phi * 0.0);
        let p_next = (p - g * phi * p) / lambda;
        assert_eq!(g, 0.5);
        assert_eq!(theta, 0.5);
        assert_eq!(p_next, 0.5);
        // And the library path at an interior λ reproduces its own algebra.
        let est = EstimatorState::new(1, 0.5, 1.0);
        let next = est.ef_rls_step(&RegressorSample::new(vec![1.0], 1.0), 1e12);
        let g = 1.0 / (0.5 + 1.0);
        assert!((next.theta_hat[0] - g).abs() < 1e-15);
        assert!((next.p_mat.get(0, 0) - (1.0 - g) / 0.5).abs() < 1e-15);
    }

    #[test]
    fn ef_rls_true_theta_is_fixed_point() {
        let mut rng = SplitMix64::new(21);
        let theta = vec![0.7, -1.3, 0.2];
        let mut est = EstimatorState::new(3, 0.9, 100.0);
        est.theta_hat = theta.clone();
        for _ in 0..50 {
            let phi: Vec<f64> = (0..3).map(|_| rng.range(-1.0, 1.0)).collect();
            let y = dot(&phi, &theta);
            est = est.ef_rls_step(&RegressorSample::new(phi, y), 1e12);
            for (got, want) in est.theta_hat.iter().zip(&theta) {
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ef_rls_divergence_flag_latches() {
        // Aggressive forgetting with a fixed direction regressor: the
        // orthogonal subspace inflates 1/λ per step until the flag trips.
        let mut est = EstimatorState::new(2, 0.01, 1000.0);
        let s = RegressorSample::new(vec![1.0, 0.0], 1.0);
        let mut tripped_at = None;
        for k in 1..=20 {
            est = est.ef_rls_step(&s, 1e12);
            if est.diverged {
                tripped_at = Some(k);
                break;
            }
        }
        assert!(tripped_at.is_some(), "flag never latched");
        let frozen = est.clone();
        est = est.ef_rls_step(&s, 1e12);
        assert!(est.diverged);
        assert!(est.is_finite() || est == frozen);
    }

    #[test]
    fn dcl_empty_memory_zero_phi_is_identity() {
        let est = EstimatorState::new(2, 0.5, 1.0);
        let mem = CLMemory::new(2, 4);
        let s = RegressorSample::new(vec![0.0, 0.0], 1.0);
        let (next, mem) = dcl_step(&est, &s, &mem, &GainConfig::default(), &tol());
        assert_eq!(next.theta_hat, est.theta_hat);
        assert!(mem.is_empty());
    }

    #[test]
    fn dcl_scalar_hand_computation() {
        // Scalar φ=1, y=1, θ̂=0, gain=1, empty memory: only the instantaneous
        // term fires, normalized by m² = 2, so θ̂⁺ = 0.5. The sample lands in
        // the returned memory for the steps after this one.
        let est = EstimatorState::new(1, 0.5, 1.0);
        let mem = CLMemory::new(1, 2);
        let s = RegressorSample::new(vec![1.0], 1.0);
        let (next, mem) = dcl_step(&est, &s, &mem, &GainConfig::default(), &tol());
        assert_eq!(mem.len(), 1);
        assert!((next.theta_hat[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dcl_error_contracts_with_spanning_memory() {
        let mut rng = SplitMix64::new(4);
        let theta = vec![1.0, -2.0];
        let mut est = EstimatorState::new(2, 0.5, 1.0);
        let mut mem = CLMemory::new(2, 4);
        let cfg = GainConfig::new(0.8).unwrap();
        let mut prev_err = est.parameter_error(&theta);
        for k in 0..200 {
            let phi: Vec<f64> = (0..2).map(|_| rng.range(-1.0, 1.0)).collect();
            let y = dot(&phi, &theta);
            let s = RegressorSample::new(phi, y);
            let (next, next_mem) = dcl_step(&est, &s, &mem, &cfg, &tol());
            est = next;
            mem = next_mem;
            let err = est.parameter_error(&theta);
            assert!(err <= prev_err + 1e-12, "step {k}: {err} > {prev_err}");
            prev_err = err;
        }
        assert!(mem.len() >= 2);
        assert!(prev_err < 1e-2);
    }

    #[test]
    fn dcl_memory_swap_improves_min_eigenvalue() {
        let t = tol();
        let mut mem = CLMemory::new(2, 2);
        // Two nearly-collinear samples fill the memory.
        mem = mem.admit(&RegressorSample::new(vec![1.0, 0.0], 0.0), &t);
        mem = mem.admit(&RegressorSample::new(vec![1.0, 0.05], 0.0), &t);
        let before = mem.info_matrix().min_eigenvalue();
        // An orthogonal sample should displace one of them.
        mem = mem.admit(&RegressorSample::new(vec![0.0, 1.0], 0.0), &t);
        let after = mem.info_matrix().min_eigenvalue();
        assert!(after > before, "{after} <= {before}");
        assert_eq!(mem.len(), 2);
    }

    #[test]
    fn dfcl_zero_omega_is_identity() {
        let est = EstimatorState::new(3, 0.5, 1.0);
        let next = dfcl_step(
            &est,
            &SymMatrix::zeros(3),
            &[0.0; 3],
            &GainConfig::default(),
        );
        assert_eq!(next.theta_hat, est.theta_hat);
    }

    #[test]
    fn dfcl_identity_omega_projects_in_one_step() {
        let mut est = EstimatorState::new(3, 0.5, 1.0);
        est.theta_hat = vec![5.0, -1.0, 2.0];
        let theta_true = vec![0.25, 0.5, -0.75];
        let omega = SymMatrix::identity(3);
        let next = dfcl_step(&est, &omega, &theta_true, &GainConfig::default());
        for (got, want) in next.theta_hat.iter().zip(&theta_true) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn dfcl_converges_on_df_bank() {
        let theta = vec![0.5, -0.25];
        let mut rng = SplitMix64::new(31);
        let mut bank = RegressorBank::new(2, InnerMode::Df, 0.5);
        let mut est = EstimatorState::new(2, 0.5, 1.0);
        for _ in 0..400 {
            let phi: Vec<f64> = (0..2).map(|_| rng.range(-1.0, 1.0)).collect();
            let y = dot(&phi, &theta);
            let s = RegressorSample::new(phi, y);
            bank = bank.update(&s, &tol());
            est = dfcl_step(&est, bank.omega(), bank.m_vec(), &GainConfig::default());
        }
        assert!(est.parameter_error(&theta) < 1e-6);
    }

    #[test]
    fn covariance_updates_stay_symmetric() {
        // Pre-symmetrization asymmetry stays far below 1e-10 per step for
        // both recursions along the built-in stream (the layered update is
        // symmetric by construction, the classical one to round-off).
        use crate::plant::{simulate, CaseLabel, ChangeSchedule, InputSignal, PlantModel};
        let sched = ChangeSchedule::constant(PlantModel::preset(CaseLabel::A));
        let samples = simulate(&sched, &InputSignal::default(), 500);
        let mut bank = RegressorBank::new(4, InnerMode::Df, 0.99);
        let mut tlf = EstimatorState::new(4, 0.01, 1000.0);
        let mut ef = EstimatorState::new(4, 0.99, 1000.0);
        for s in &samples {
            let sample = RegressorSample::new(s.phi.to_vec(), s.y_next);
            bank = bank.update(&sample, &tol());
            tlf = tlf
                .tlf_rls_step(bank.omega(), bank.m_vec(), &tol())
                .unwrap();
            ef = ef.ef_rls_step(&sample, 1e12);
            assert!(
                tlf.p_asym < 1e-10,
                "step {}: tlf asym {:e}",
                s.k,
                tlf.p_asym
            );
            assert!(ef.p_asym < 1e-10, "step {}: ef asym {:e}", s.k, ef.p_asym);
        }
    }

    #[test]
    fn gain_config_bounds() {
        assert!(GainConfig::new(1.0).is_ok());
        assert!(GainConfig::new(1.99).is_ok());
        assert!(GainConfig::new(0.0).is_err());
        assert!(GainConfig::new(2.0).is_err());
        assert!(GainConfig::new(-0.5).is_err());
    }
}
