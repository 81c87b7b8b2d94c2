//! Small dense symmetric-matrix utilities.
//!
//! Everything in the identification loop lives in dimension n ≈ 4, so the
//! matrix types here are plain heap vectors with hand-rolled kernels: cyclic
//! Jacobi for eigenvalues (symmetric input guarantees real output) and
//! Cholesky for positive definite solves. No attempt is made at large-n
//! performance.

use std::fmt;

/// Numeric guards shared across the crate.
///
/// * `eps_rank` — relative singular-value threshold for rank decisions.
/// * `eps_div` — guard on denominators before dividing.
/// * `eps_psd` — slack when testing positive (semi)definiteness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_rank: f64,
    pub eps_div: f64,
    pub eps_psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        // Double-precision headroom at n = 4.
        Tolerances {
            eps_rank: 1e-9,
            eps_div: 1e-12,
            eps_psd: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("eps_rank", self.eps_rank),
            ("eps_div", self.eps_div),
            ("eps_psd", self.eps_psd),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(format!("{name} must lie strictly between 0 and 1, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Cholesky pivot fell below the positive-definiteness guard.
    NotPositiveDefinite { pivot: f64 },
    /// Two operands had incompatible dimensions.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot:e})")
            }
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

/// Dense symmetric matrix with full row-major storage.
///
/// Symmetry is enforced on construction: every setter writes both `(i, j)`
/// and `(j, i)`, so `get(i, j) == get(j, i)` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix::scaled_identity(n, 1.0)
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * m.n + i] = d;
        }
        m
    }

    /// Scaled identity `c * I`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    /// Builds from `f(i, j)`, evaluated only for `i <= j` and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Builds from explicit rows, failing if they are not exactly symmetric.
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(LinalgError::DimensionMismatch {
                        expected: n,
                        got: n,
                    });
                }
            }
        }
        Ok(SymMatrix::from_fn(n, |i, j| rows[i][j]))
    }

    /// Scaled outer product `c * v vᵀ`.
    pub fn scaled_outer(v: &[f64], c: f64) -> Self {
        SymMatrix::from_fn(v.len(), |i, j| c * v[i] * v[j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn plus(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn minus(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    /// Quadratic form `vᵀ S v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let sv = self.mat_vec(v);
        dot(v, &sv)
    }

    /// General product `self * other`; the result is not symmetric in general.
    pub fn mul(&self, other: &SymMatrix) -> Mat {
        assert_eq!(self.n, other.n);
        Mat::from_fn(self.n, self.n, |i, j| {
            (0..self.n).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    /// `self * self`, symmetric by construction (identical term order for
    /// entries `(i, j)` and `(j, i)`).
    pub fn square(&self) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| {
            (0..self.n).map(|k| self.get(i, k) * self.get(k, j)).sum()
        })
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// All eigenvalues, ascending, by cyclic Jacobi rotations. A symmetric
    /// algorithm is used so the outputs are real by construction.
    ///
    /// Non-finite input yields NaNs rather than looping.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if !self.is_finite() {
            return vec![f64::NAN; self.n];
        }
        let n = self.n;
        if n == 1 {
            return vec![self.data[0]];
        }
        let mut a = self.data.clone();
        let get = |a: &[f64], i: usize, j: usize| a[i * n + j];

        // Frobenius-scaled stopping threshold.
        let scale: f64 = self.data.iter().map(|v| v * v).sum::<f64>().sqrt();
        let tol = 1e-15 * scale.max(1.0);

        for _sweep in 0..64 {
            let mut off = 0.0;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    off += get(&a, p, q).abs();
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = get(&a, p, q);
                    if apq.abs() <= tol / (n * n) as f64 {
                        continue;
                    }
                    let app = get(&a, p, p);
                    let aqq = get(&a, q, q);
                    let theta = 0.5 * (aqq - app) / apq;
                    let t = if theta.abs() > 1e150 {
                        // Rotation angle underflows; 1/(2θ) avoids θ² overflow.
                        0.5 / theta
                    } else {
                        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                        sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = get(&a, k, p);
                        let akq = get(&a, k, q);
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = get(&a, p, k);
                        let aqk = get(&a, q, k);
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().unwrap()
    }

    /// Count of singular values above `eps_rank * max(1, σ_max)`. For a
    /// symmetric matrix the singular values are the eigenvalue magnitudes.
    pub fn numerical_rank(&self, tol: &Tolerances) -> usize {
        let mut sv: Vec<f64> = self.eigenvalues().iter().map(|e| e.abs()).collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let thr = tol.eps_rank * sv[0].max(1.0);
        sv.iter().filter(|&&s| s > thr).count()
    }

    /// `λ_max / λ_min` for positive definite input; `f64::INFINITY` when the
    /// smallest eigenvalue is zero or negative. Singular covariances occur
    /// legitimately in long traces, so the sentinel is not an error.
    pub fn condition_number(&self) -> f64 {
        let eigs = self.eigenvalues();
        let (min, max) = (eigs[0], eigs[eigs.len() - 1]);
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// General dense matrix used for non-symmetric intermediates
/// (e.g. products of two symmetric matrices).
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Single-column matrix from a vector.
    pub fn column(v: &[f64]) -> Self {
        Mat::from_fn(v.len(), 1, |i, _| v[i])
    }

    pub fn from_sym(s: &SymMatrix) -> Self {
        Mat::from_fn(s.n(), s.n(), |i, j| s.get(i, j))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        Mat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|k| self.get(i, k) * other.get(k, j))
                .sum()
        })
    }

    /// `selfᵀ * other`.
    pub fn t_mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.cols, other.cols, |i, j| {
            (0..self.rows)
                .map(|k| self.get(k, i) * other.get(k, j))
                .sum()
        })
    }

    pub fn minus(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    /// Operator ∞-norm: maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Largest asymmetry `max |a_ij − a_ji|` of a square matrix.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `(A + Aᵀ) / 2` of a square matrix.
    pub fn symmetrized(&self) -> SymMatrix {
        assert_eq!(self.rows, self.cols);
        SymMatrix::from_fn(self.rows, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `A = L Lᵀ`, failing when a pivot drops to `eps_psd` or below
    /// (the matrix is then not positive definite to working precision).
    pub fn new(a: &SymMatrix, eps_psd: f64) -> Result<Cholesky, LinalgError> {
        let n = a.n();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a.get(i, j);
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= eps_psd {
                        return Err(LinalgError::NotPositiveDefinite { pivot: sum });
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Forward substitution only: solves `L Y = B`.
    pub fn forward(&self, b: &Mat) -> Mat {
        assert_eq!(b.rows(), self.n);
        let n = self.n;
        let mut y = b.clone();
        for col in 0..b.cols() {
            for i in 0..n {
                let mut v = y.get(i, col);
                for k in 0..i {
                    v -= self.l[i * n + k] * y.get(k, col);
                }
                y.set(i, col, v / self.l[i * n + i]);
            }
        }
        y
    }

    /// Full solve `A X = B` (forward then back substitution).
    pub fn solve(&self, b: &Mat) -> Mat {
        let n = self.n;
        let mut x = self.forward(b);
        for col in 0..b.cols() {
            for i in (0..n).rev() {
                let mut v = x.get(i, col);
                for k in (i + 1)..n {
                    v -= self.l[k * n + i] * x.get(k, col);
                }
                x.set(i, col, v / self.l[i * n + i]);
            }
        }
        x
    }

    /// `Bᵀ A⁻¹ B` as a Gram matrix `YᵀY` with `Y = L⁻¹B`; exactly symmetric
    /// in floating point, unlike `Bᵀ (A⁻¹ B)`.
    pub fn gram_quotient(&self, b: &Mat) -> SymMatrix {
        let y = self.forward(b);
        SymMatrix::from_fn(b.cols(), |i, j| {
            (0..y.rows()).map(|k| y.get(k, i) * y.get(k, j)).sum()
        })
    }
}

/// Solves `A X = B` for symmetric positive definite `A` via Cholesky,
/// never forming an explicit inverse.
pub fn solve_spd(a: &SymMatrix, b: &Mat, eps_psd: f64) -> Result<Mat, LinalgError> {
    if b.rows() != a.n() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.n(),
            got: b.rows(),
        });
    }
    Ok(Cholesky::new(a, eps_psd)?.solve(b))
}

/// Vector right-hand-side convenience wrapper around [`solve_spd`].
pub fn solve_spd_vec(a: &SymMatrix, b: &[f64], eps_psd: f64) -> Result<Vec<f64>, LinalgError> {
    let x = solve_spd(a, &Mat::column(b), eps_psd)?;
    Ok((0..b.len()).map(|i| x.get(i, 0)).collect())
}

/// SplitMix64. Deterministic streams for randomized checks and synthetic
/// experiment variants; good enough statistical quality at this scale and
/// reproducible across platforms.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Random SPD matrix with eigenvalues drawn from [lo, hi], built by
    /// conjugating a diagonal with random plane rotations.
    pub(crate) fn random_spd(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> SymMatrix {
        let eigs: Vec<f64> = (0..n).map(|_| rng.range(lo, hi)).collect();
        let mut m = Mat::from_fn(n, n, |i, j| if i == j { eigs[i] } else { 0.0 });
        for _ in 0..3 * n {
            let p = (rng.next_u64() as usize) % n;
            let mut q = (rng.next_u64() as usize) % n;
            if p == q {
                q = (q + 1) % n;
            }
            let angle = rng.range(0.0, std::f64::consts::TAU);
            let (c, s) = (angle.cos(), angle.sin());
            let mut g = Mat::identity(n);
            g.set(p, p, c);
            g.set(p, q, -s);
            g.set(q, p, s);
            g.set(q, q, c);
            let gt = Mat::from_fn(n, n, |i, j| g.get(j, i));
            m = g.mul(&m).mul(&gt);
        }
        m.symmetrized()
    }

    #[test]
    fn min_eigenvalue_identity_is_one() {
        assert_eq!(SymMatrix::identity(4).min_eigenvalue(), 1.0);
    }

    #[test]
    fn min_eigenvalue_diagonal() {
        let s = SymMatrix::diag(&[2.0, 5.0]);
        assert!((s.min_eigenvalue() - 2.0).abs() < 1e-14);
        assert!((s.max_eigenvalue() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn min_eigenvalue_rank_one_outer_product() {
        let s = SymMatrix::scaled_outer(&[1.0, 2.0], 1.0);
        assert!(s.min_eigenvalue().abs() < 1e-14);
        // Nonzero eigenvalue is the squared norm.
        assert!((s.max_eigenvalue() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_known_3x3() {
        // Eigenvalues of [[2,0,0],[0,3,4],[0,4,9]] are 1, 2, 11.
        let s =
            SymMatrix::from_rows(&[&[2.0, 0.0, 0.0], &[0.0, 3.0, 4.0], &[0.0, 4.0, 9.0]]).unwrap();
        let e = s.eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 2.0).abs() < 1e-12);
        assert!((e[2] - 11.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..200 {
            let s = random_spd(&mut rng, 4, 0.5, 4.0);
            let sum: f64 = s.eigenvalues().iter().sum();
            assert!((sum - s.trace()).abs() <= 1e-10 * s.trace().abs().max(1.0));
        }
    }

    #[test]
    fn eigen_bounds_by_trace() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..300 {
            let n = 2 + (rng.next_u64() as usize) % 4;
            let s = SymMatrix::from_fn(n, |_, _| rng.range(-3.0, 3.0));
            let eigs = s.eigenvalues();
            let avg = s.trace() / n as f64;
            assert!(eigs[0] <= avg + 1e-10);
            assert!(avg <= eigs[n - 1] + 1e-10);
        }
    }

    #[test]
    fn rank_zero_matrix() {
        assert_eq!(
            SymMatrix::zeros(4).numerical_rank(&Tolerances::default()),
            0
        );
    }

    #[test]
    fn rank_outer_product_is_one() {
        let tol = Tolerances::default();
        let phi = [0.3, -1.2, 0.05, 2.0];
        let m_sq = 1.0 + dot(&phi, &phi);
        let s = SymMatrix::scaled_outer(&phi, 1.0 / m_sq);
        assert_eq!(s.numerical_rank(&tol), 1);
    }

    #[test]
    fn rank_identity_full() {
        assert_eq!(
            SymMatrix::identity(4).numerical_rank(&Tolerances::default()),
            4
        );
    }

    #[test]
    fn rank_invariant_under_permutation() {
        let mut rng = SplitMix64::new(3);
        let tol = Tolerances::default();
        for _ in 0..100 {
            let u: Vec<f64> = (0..4).map(|_| rng.range(-1.0, 1.0)).collect();
            let v: Vec<f64> = (0..4).map(|_| rng.range(-1.0, 1.0)).collect();
            let s = SymMatrix::scaled_outer(&u, 1.0).plus(&SymMatrix::scaled_outer(&v, 1.0));
            let perm = [2usize, 0, 3, 1];
            let p = SymMatrix::from_fn(4, |i, j| s.get(perm[i], perm[j]));
            assert_eq!(s.numerical_rank(&tol), p.numerical_rank(&tol));
        }
    }

    #[test]
    fn condition_number_cases() {
        assert_eq!(SymMatrix::identity(4).condition_number(), 1.0);
        let d = SymMatrix::diag(&[10.0, 1.0]);
        assert!((d.condition_number() - 10.0).abs() < 1e-12);
        let singular = SymMatrix::scaled_outer(&[1.0, 2.0], 1.0);
        assert!(singular.condition_number().is_infinite());
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let a = SymMatrix::identity(3);
        let b = Mat::from_fn(3, 2, |i, j| (i + 2 * j) as f64);
        let x = solve_spd(&a, &b, 1e-12).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_diagonal() {
        let a = SymMatrix::diag(&[2.0, 4.0]);
        let x = solve_spd_vec(&a, &[2.0, 4.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert!((x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_round_trips_constructed_solution() {
        let mut rng = SplitMix64::new(42);
        let a = random_spd(&mut rng, 4, 0.5, 5.0);
        let x_true: Vec<f64> = (0..4).map(|_| rng.range(-2.0, 2.0)).collect();
        let b = a.mat_vec(&x_true);
        let x = solve_spd_vec(&a, &b, 1e-12).unwrap();
        for i in 0..4 {
            assert!((x[i] - x_true[i]).abs() < 1e-10, "component {i}");
        }
    }

    #[test]
    fn solve_rejects_indefinite() {
        let a = SymMatrix::diag(&[1.0, -1.0]);
        match solve_spd_vec(&a, &[1.0, 1.0], 1e-12) {
            Err(LinalgError::NotPositiveDefinite { .. }) => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn solve_residual_bound_random_spd() {
        // Residual stays below 1e-10 ‖B‖∞ across 1000 matrices with
        // condition number up to 1e6, dimensions up to 8.
        let mut rng = SplitMix64::new(2024);
        for trial in 0..1000 {
            let n = 2 + (rng.next_u64() as usize) % 7;
            let hi = 10f64.powf(rng.range(0.0, 3.0));
            let lo = hi / 10f64.powf(rng.range(0.0, 6.0));
            let a = random_spd(&mut rng, n, lo, hi);
            let b = Mat::from_fn(n, 2, |_, _| rng.range(-1.0, 1.0));
            let x = solve_spd(&a, &b, 1e-15).unwrap();
            let residual = Mat::from_sym(&a).mul(&x).minus(&b).inf_norm();
            assert!(
                residual <= 1e-10 * b.inf_norm().max(1e-300),
                "trial {trial}: residual {residual:e} vs rhs {:e}",
                b.inf_norm()
            );
        }
    }

    #[test]
    fn square_is_bitwise_symmetric() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let s = SymMatrix::from_fn(4, |_, _| rng.range(-2.0, 2.0));
            let sq = s.square();
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(sq.get(i, j).to_bits(), sq.get(j, i).to_bits());
                }
            }
        }
    }

    #[test]
    fn nonfinite_input_yields_nan_eigenvalues() {
        let mut s = SymMatrix::identity(3);
        s.set(0, 1, f64::NAN);
        assert!(s.eigenvalues().iter().all(|e| e.is_nan()));
    }

    #[test]
    fn tolerances_validation() {
        assert!(Tolerances::default().validate().is_ok());
        let bad = Tolerances {
            eps_rank: 1.5,
            ..Tolerances::default()
        };
        assert!(bad.validate().is_err());
    }
}
