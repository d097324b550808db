//! Truncated Fock ⊗ collective-spin basis and the elementary ladder operators.
//!
//! Basis states are `|n⟩ ⊗ |j, m⟩` with `j = N/2` fixed. Indices are row-major
//! with the photon number `n` outer and `q = j - m` inner:
//!
//! ```text
//! idx = n * (N + 1) + q,    q = 0 ↔ m = +j,  q = N ↔ m = -j
//! ```
//!
//! The ordering is frozen: CSV exports and the explicit matrix-element check
//! depend on it.

use faer::Mat;

use crate::error::{Error, Result};

/// Largest Hilbert-space dimension accepted unless the caller raises the guard.
pub const DEFAULT_DIM_GUARD: usize = 20_000;

/// The truncated product basis for `n_tls` two-level systems and one cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_tls: usize,
    n_ph_max: usize,
}

impl HilbertSpace {
    /// Builds the space with photon cutoff `cutoff_factor * n_tls`, rejecting
    /// dimensions above [`DEFAULT_DIM_GUARD`].
    pub fn new(n_tls: usize, cutoff_factor: usize) -> Result<Self> {
        Self::with_guard(n_tls, cutoff_factor, DEFAULT_DIM_GUARD)
    }

    pub fn with_guard(n_tls: usize, cutoff_factor: usize, max_dim: usize) -> Result<Self> {
        if n_tls == 0 {
            return Err(Error::InvalidParameter("n_tls must be at least 1".into()));
        }
        if cutoff_factor == 0 {
            return Err(Error::InvalidParameter(
                "cutoff_factor must be at least 1".into(),
            ));
        }
        let n_ph_max = cutoff_factor
            .checked_mul(n_tls)
            .ok_or_else(|| Error::InvalidParameter("photon cutoff overflows".into()))?;
        let dim = (n_ph_max + 1).saturating_mul(n_tls + 1);
        if dim > max_dim {
            return Err(Error::DimensionGuard {
                dim,
                limit: max_dim,
                n_tls,
                n_ph_max,
            });
        }
        Ok(Self { n_tls, n_ph_max })
    }

    /// Number of two-level systems `N`.
    pub fn n_tls(&self) -> usize {
        self.n_tls
    }

    /// Photon cutoff `N_ph`.
    pub fn n_ph_max(&self) -> usize {
        self.n_ph_max
    }

    /// Total spin `j = N/2`.
    pub fn j(&self) -> f64 {
        self.n_tls as f64 / 2.0
    }

    /// Size of the spin block, `N + 1`.
    pub fn spin_dim(&self) -> usize {
        self.n_tls + 1
    }

    pub fn dim(&self) -> usize {
        (self.n_ph_max + 1) * (self.n_tls + 1)
    }

    /// Index of `|n; j, m⟩`. `m` must be one of `-j, -j+1, …, +j`.
    pub fn index_of(&self, n: usize, m: f64) -> Result<usize> {
        if n > self.n_ph_max {
            return Err(Error::OutOfRange(format!(
                "photon number {n} exceeds cutoff {}",
                self.n_ph_max
            )));
        }
        let q = self.j() - m;
        let q_idx = q.round();
        if (q - q_idx).abs() > 1e-9 || q_idx < 0.0 || q_idx > self.n_tls as f64 {
            return Err(Error::OutOfRange(format!(
                "m = {m} is not a valid projection for j = {}",
                self.j()
            )));
        }
        Ok(n * self.spin_dim() + q_idx as usize)
    }

    /// Inverse of [`index_of`](Self::index_of): returns `(n, m)`.
    pub fn state_of(&self, idx: usize) -> Result<(usize, f64)> {
        if idx >= self.dim() {
            return Err(Error::OutOfRange(format!(
                "basis index {idx} outside [0, {})",
                self.dim()
            )));
        }
        Ok(self.decompose_index(idx))
    }

    /// `(n, q)` for an index known to be in range.
    pub(crate) fn decompose_index(&self, idx: usize) -> (usize, f64) {
        let n = idx / self.spin_dim();
        let q = idx % self.spin_dim();
        (n, self.j() - q as f64)
    }

    /// `J_z` eigenvalue of basis state `idx`.
    pub fn m_of(&self, idx: usize) -> f64 {
        self.j() - (idx % self.spin_dim()) as f64
    }

    /// Photon number of basis state `idx`.
    pub fn n_of(&self, idx: usize) -> usize {
        idx / self.spin_dim()
    }

    pub fn annihilate(&self) -> OperatorMatrix {
        let s = self.spin_dim();
        let mut a = Mat::zeros(self.dim(), self.dim());
        for n in 1..=self.n_ph_max {
            let amp = (n as f64).sqrt();
            for q in 0..s {
                a[((n - 1) * s + q, n * s + q)] = amp;
            }
        }
        OperatorMatrix::new(*self, a)
    }

    /// `â†`, built as the transpose of `â` so the two are exact adjoints.
    pub fn create(&self) -> OperatorMatrix {
        self.annihilate().transpose()
    }

    pub fn number(&self) -> OperatorMatrix {
        self.diagonal(|idx| self.n_of(idx) as f64)
    }

    pub fn jz(&self) -> OperatorMatrix {
        self.diagonal(|idx| self.m_of(idx))
    }

    pub fn jplus(&self) -> OperatorMatrix {
        self.spin_ladder(1.0)
    }

    pub fn jminus(&self) -> OperatorMatrix {
        self.spin_ladder(-1.0)
    }

    /// `J_x = (J_+ + J_-)/2`.
    pub fn jx(&self) -> OperatorMatrix {
        let jp = self.jplus();
        let jm = self.jminus();
        OperatorMatrix::new(*self, (jp.data + jm.data) * faer::Scale(0.5))
    }

    /// `i·J_y = (J_+ - J_-)/2`, which is real in this basis.
    pub fn i_jy(&self) -> OperatorMatrix {
        let jp = self.jplus();
        let jm = self.jminus();
        OperatorMatrix::new(*self, (jp.data - jm.data) * faer::Scale(0.5))
    }

    /// Casimir `J² = j(j+1)` assembled from components: `J_x² - (iJ_y)² + J_z²`.
    pub fn j_squared(&self) -> OperatorMatrix {
        let jx = self.jx();
        let ijy = self.i_jy();
        let jz = self.jz();
        let data = &jx.data * &jx.data - &ijy.data * &ijy.data + &jz.data * &jz.data;
        OperatorMatrix::new(*self, data)
    }

    fn diagonal(&self, f: impl Fn(usize) -> f64) -> OperatorMatrix {
        let d = self.dim();
        OperatorMatrix::new(*self, Mat::from_fn(d, d, |i, k| if i == k { f(i) } else { 0.0 }))
    }

    // J_± |j,m⟩ = √(j(j+1) − m(m±1)) |j,m±1⟩; raising m lowers q by one.
    fn spin_ladder(&self, sign: f64) -> OperatorMatrix {
        let s = self.spin_dim();
        let j = self.j();
        let mut out = Mat::zeros(self.dim(), self.dim());
        for n in 0..=self.n_ph_max {
            for q in 0..s {
                let m = j - q as f64;
                let m_new = m + sign;
                if m_new > j + 1e-9 || m_new < -j - 1e-9 {
                    continue;
                }
                let amp = (j * (j + 1.0) - m * m_new).max(0.0).sqrt();
                let q_new = if sign > 0.0 { q - 1 } else { q + 1 };
                out[(n * s + q_new, n * s + q)] = amp;
            }
        }
        OperatorMatrix::new(*self, out)
    }
}

/// A dense real operator on a [`HilbertSpace`].
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    space: HilbertSpace,
    data: Mat<f64>,
}

impl OperatorMatrix {
    pub(crate) fn new(space: HilbertSpace, data: Mat<f64>) -> Self {
        debug_assert_eq!(data.nrows(), space.dim());
        debug_assert_eq!(data.ncols(), space.dim());
        Self { space, data }
    }

    /// Wraps an existing matrix; its shape must match `space.dim()`.
    pub fn from_mat(space: HilbertSpace, data: Mat<f64>) -> Result<Self> {
        if data.nrows() != space.dim() || data.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self { space, data })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn mat(&self) -> &Mat<f64> {
        &self.data
    }

    pub fn into_mat(self) -> Mat<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.space, self.data.transpose().to_owned())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Self::new(self.space, &self.data * &rhs.data)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(self.space, &self.data + &rhs.data)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(self.space, &self.data - &rhs.data)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.space, &self.data * faer::Scale(factor))
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        Self::new(self.space, &self.data * &rhs.data - &rhs.data * &self.data)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[(i, i)]).collect()
    }

    /// Largest absolute element.
    pub fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                best = best.max(self.data[(i, j)].abs());
            }
        }
        best
    }

    /// `max |A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut best = 0.0f64;
        for j in 0..d {
            for i in (j + 1)..d {
                best = best.max((self.data[(i, j)] - self.data[(j, i)]).abs());
            }
        }
        best
    }

    /// `max |A_ij − B_ij|`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        let d = self.dim();
        let mut best = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                best = best.max((self.data[(i, j)] - rhs.data[(i, j)]).abs());
            }
        }
        best
    }

    /// `A·x` for a real vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (k, &xk) in x.iter().enumerate() {
            if xk == 0.0 {
                continue;
            }
            let col = self.data.col(k);
            for i in 0..d {
                out[i] += col[i] * xk;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(HilbertSpace::new(10, 4).unwrap().dim(), 451);
        assert_eq!(HilbertSpace::new(1, 1).unwrap().dim(), 4);
        assert_eq!(HilbertSpace::new(30, 4).unwrap().dim(), 3751);
        assert_eq!(HilbertSpace::new(30, 5).unwrap().dim(), 4681);
    }

    #[test]
    fn rejects_empty_and_oversized() {
        assert!(matches!(
            HilbertSpace::new(0, 4),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            HilbertSpace::new(10, 0),
            Err(Error::InvalidParameter(_))
        ));
        let err = HilbertSpace::new(80, 4).unwrap_err();
        assert!(matches!(err, Error::DimensionGuard { dim: 26_001, .. }));
        assert!(err.to_string().contains("26001"));
        assert!(HilbertSpace::with_guard(80, 4, 30_000).is_ok());
    }

    #[test]
    fn index_conventions() {
        let s = HilbertSpace::new(3, 2).unwrap();
        assert_eq!(s.index_of(0, -1.5).unwrap(), 3);
        assert_eq!(s.index_of(0, 1.5).unwrap(), 0);
        assert_eq!(s.index_of(s.n_ph_max(), 1.5).unwrap(), s.dim() - 4);
        assert_eq!(s.index_of(s.n_ph_max(), -1.5).unwrap(), s.dim() - 1);
        for idx in 0..s.dim() {
            let (n, m) = s.state_of(idx).unwrap();
            assert_eq!(s.index_of(n, m).unwrap(), idx);
        }
        assert!(s.index_of(7, 0.5).is_err());
        assert!(s.index_of(0, 2.5).is_err());
        assert!(s.index_of(0, 1.0).is_err());
        assert!(s.state_of(s.dim()).is_err());
    }

    #[test]
    fn photon_ladder_elements() {
        let s = HilbertSpace::new(2, 4).unwrap();
        let a = s.annihilate();
        for m in [-1.0, 0.0, 1.0] {
            let col = s.index_of(3, m).unwrap();
            let row = s.index_of(2, m).unwrap();
            assert!((a.get(row, col) - 3f64.sqrt()).abs() < 1e-15);
            let vac = s.index_of(0, m).unwrap();
            assert!((0..s.dim()).all(|r| a.get(r, vac) == 0.0));
        }
        let ad = s.create();
        assert_eq!(ad.max_abs_diff(&a.transpose()), 0.0);
        let nop = ad.matmul(&a).diagonal();
        for (idx, v) in nop.iter().enumerate() {
            assert!((v - s.n_of(idx) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_ladder_elements() {
        let s = HilbertSpace::new(2, 1).unwrap();
        let jp = s.jplus();
        let from = s.index_of(0, 0.0).unwrap();
        let to = s.index_of(0, 1.0).unwrap();
        assert!((jp.get(to, from) - 2f64.sqrt()).abs() < 1e-15);
        let top = s.index_of(1, 1.0).unwrap();
        assert!((0..s.dim()).all(|r| jp.get(r, top) == 0.0));
        assert_eq!(s.jminus().max_abs_diff(&jp.transpose()), 0.0);
    }

    #[test]
    fn su2_algebra() {
        for n in 1..=5 {
            let s = HilbertSpace::new(n, 1).unwrap();
            let (jp, jm, jz) = (s.jplus(), s.jminus(), s.jz());
            assert!(jp.commutator(&jm).max_abs_diff(&jz.scale(2.0)) < 1e-12);
            assert!(jz.commutator(&jp).max_abs_diff(&jp) < 1e-12);
            assert!(jz.commutator(&jm).max_abs_diff(&jm.scale(-1.0)) < 1e-12);
            let j = s.j();
            let casimir = s.j_squared();
            let d = s.dim();
            let ident = Mat::<f64>::from_fn(d, d, |i, k| if i == k { j * (j + 1.0) } else { 0.0 });
            assert!(casimir.max_abs_diff(&OperatorMatrix::new(s, ident)) < 1e-12);
        }
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let s = HilbertSpace::new(2, 3).unwrap();
        let c = s.annihilate().commutator(&s.create());
        for col in 0..s.dim() {
            if s.n_of(col) == s.n_ph_max() {
                continue;
            }
            for row in 0..s.dim() {
                if s.n_of(row) == s.n_ph_max() {
                    continue;
                }
                let expect = if row == col { 1.0 } else { 0.0 };
                assert!((c.get(row, col) - expect).abs() < 1e-12);
            }
        }
    }
}
