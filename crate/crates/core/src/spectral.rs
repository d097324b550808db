//! Dense symmetric eigendecomposition of the charging Hamiltonian.
//!
//! The Hamiltonian is first split into the connected components of its
//! sparsity graph. Without a drive the photon–spin parity `(−1)^{n + j + m}` is
//! conserved and the matrix falls into two blocks, each diagonalized on its
//! own; with a drive there is a single block. The assembled decomposition is a
//! full `dim × dim` orthogonal matrix either way.

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, OperatorMatrix};

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    space: HilbertSpace,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
    /// Block label of each basis row.
    row_block: Vec<usize>,
    /// Block label of each eigenvector column.
    eig_block: Vec<usize>,
    blocks: usize,
}

/// Labels each basis index with the connected component of the nonzero
/// pattern of `h` it belongs to.
fn connected_blocks(h: &Mat<f64>) -> (Vec<usize>, usize) {
    let d = h.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for col in 0..d {
        let c = h.col(col);
        for row in (col + 1)..d {
            if c[row] != 0.0 || h[(col, row)] != 0.0 {
                let a = find(&mut parent, row);
                let b = find(&mut parent, col);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; d];
    let mut root_label = vec![usize::MAX; d];
    let mut count = 0;
    for i in 0..d {
        let r = find(&mut parent, i);
        if root_label[r] == usize::MAX {
            root_label[r] = count;
            count += 1;
        }
        label[i] = root_label[r];
    }
    (label, count)
}

fn check_symmetric(h: &OperatorMatrix) -> Result<()> {
    let asym = h.asymmetry();
    if !(asym <= 1e-10 * h.max_abs().max(1.0)) {
        return Err(Error::Eigensolver(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

/// Ascending eigenpairs of the principal submatrix on `members`.
fn eigen_block(mat: &Mat<f64>, members: &[usize]) -> Result<(Vec<f64>, Mat<f64>)> {
    let k = members.len();
    let sub = Mat::from_fn(k, k, |i, j| mat[(members[i], members[j])]);
    let eig = sub
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let vals: Vec<f64> = eig.S().column_vector().iter().copied().collect();
    let vecs = eig.U().to_owned();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    for c in 0..k {
        if vecs.col(c).iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigensolver("non-finite eigenvector".into()));
        }
    }
    // faer returns ascending eigenvalues; keep that guarantee explicit.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = Mat::from_fn(k, k, |i, c| vecs[(i, order[c])]);
    Ok((sorted_vals, sorted_vecs))
}

/// Eigendecomposition of a real symmetric operator.
pub fn decompose(h: &OperatorMatrix) -> Result<SpectralDecomposition> {
    check_symmetric(h)?;
    let d = h.dim();
    let mat = h.mat();
    let (row_block, blocks) = connected_blocks(mat);
    let members: Vec<Vec<usize>> = {
        let mut m = vec![Vec::new(); blocks];
        for (i, &b) in row_block.iter().enumerate() {
            m[b].push(i);
        }
        m
    };

    // (eigenvalue, block, column within block)
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d);
    let mut block_vectors = Vec::with_capacity(blocks);
    for (b, rows) in members.iter().enumerate() {
        let (vals, vecs) = eigen_block(mat, rows)?;
        pairs.extend(vals.iter().enumerate().map(|(c, &v)| (v, b, c)));
        block_vectors.push(vecs);
    }
    // Stable sort: ties keep block order, so the result is deterministic.
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut vectors = Mat::<f64>::zeros(d, d);
    let mut eigenvalues = Vec::with_capacity(d);
    let mut eig_block = Vec::with_capacity(d);
    for (out_col, &(v, b, c)) in pairs.iter().enumerate() {
        eigenvalues.push(v);
        eig_block.push(b);
        for (i, &row) in members[b].iter().enumerate() {
            vectors[(row, out_col)] = block_vectors[b][(i, c)];
        }
    }
    Ok(SpectralDecomposition {
        space: *h.space(),
        eigenvalues,
        eigenvectors: vectors,
        row_block,
        eig_block,
        blocks,
    })
}

/// Eigenpairs of the single invariant block that contains basis state `row`.
#[derive(Debug, Clone)]
pub struct BlockEigen {
    /// Basis indices spanning the block, ascending.
    pub rows: Vec<usize>,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// `rows.len() × rows.len()`; column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Mat<f64>,
}

/// Diagonalizes only the invariant block holding `row`.
pub fn decompose_block_containing(h: &OperatorMatrix, row: usize) -> Result<BlockEigen> {
    check_symmetric(h)?;
    if row >= h.dim() {
        return Err(Error::OutOfRange(format!("row {row} outside [0, {})", h.dim())));
    }
    let (labels, _) = connected_blocks(h.mat());
    let rows: Vec<usize> = (0..h.dim()).filter(|&i| labels[i] == labels[row]).collect();
    let (eigenvalues, eigenvectors) = eigen_block(h.mat(), &rows)?;
    Ok(BlockEigen {
        rows,
        eigenvalues,
        eigenvectors,
    })
}

impl SpectralDecomposition {
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal matrix whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &Mat<f64> {
        &self.eigenvectors
    }

    /// Number of invariant blocks found in the Hamiltonian.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn row_block(&self, row: usize) -> usize {
        self.row_block[row]
    }

    pub fn eig_block(&self, col: usize) -> usize {
        self.eig_block[col]
    }

    /// `max |V·diag(λ)·Vᵀ − H|`.
    pub fn reconstruction_residual(&self, h: &OperatorMatrix) -> f64 {
        let d = self.eigenvalues.len();
        let scaled = Mat::from_fn(d, d, |i, j| self.eigenvectors[(i, j)] * self.eigenvalues[j]);
        let rebuilt = &scaled * self.eigenvectors.transpose();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                worst = worst.max((rebuilt[(i, j)] - h.get(i, j)).abs());
            }
        }
        worst
    }

    /// `max |VᵀV − 𝟙|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let d = self.eigenvalues.len();
        let gram = self.eigenvectors.transpose() * &self.eigenvectors;
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - expect).abs());
            }
        }
        worst
    }

    /// Energy gap between the two lowest levels (infinite for a 1-d space).
    pub fn ground_gap(&self) -> f64 {
        match self.eigenvalues.as_slice() {
            [a, b, ..] => b - a,
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_h_total, ModelParams};

    #[test]
    fn free_spectrum_is_exact() {
        let p = ModelParams::resonant(3, 0.0, 0.0, 0.0);
        let s = p.space().unwrap();
        let h = build_h_total(&p, &s).unwrap();
        let dec = decompose(&h).unwrap();
        let mut expect: Vec<f64> = (0..s.dim())
            .map(|i| s.n_of(i) as f64 + s.m_of(i))
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in dec.eigenvalues().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        // diagonal matrix: every basis state is its own block
        assert_eq!(dec.blocks(), s.dim());
    }

    #[test]
    fn parity_splits_undriven_hamiltonian() {
        let p = ModelParams::resonant(4, 0.3, 1.0, 0.0);
        let s = p.space().unwrap();
        let h = build_h_total(&p, &s).unwrap();
        let dec = decompose(&h).unwrap();
        assert_eq!(dec.blocks(), 2);
        for i in 0..s.dim() {
            let parity = (s.n_of(i) + (s.m_of(i) + s.j()) as usize) % 2;
            let other = (s.n_of(0) + (s.m_of(0) + s.j()) as usize) % 2;
            assert_eq!(dec.row_block(i) == dec.row_block(0), parity == other);
        }
        let driven = ModelParams::resonant(4, 0.3, 1.0, 0.2);
        let h = build_h_total(&driven, &s).unwrap();
        assert_eq!(decompose(&h).unwrap().blocks(), 1);
    }

    #[test]
    fn residuals() {
        let p = ModelParams::resonant(5, 0.7, -1.5, 0.4);
        let s = p.space().unwrap();
        let h = build_h_total(&p, &s).unwrap();
        let dec = decompose(&h).unwrap();
        assert!(dec.reconstruction_residual(&h) <= 1e-9 * h.max_abs());
        assert!(dec.orthogonality_residual() <= 1e-10);
        assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn single_block_matches_full_decomposition() {
        let p = ModelParams::resonant(3, 0.6, 0.8, 0.0);
        let s = p.space().unwrap();
        let h = build_h_total(&p, &s).unwrap();
        let start = s.index_of(3, -1.5).unwrap();
        let full = decompose(&h).unwrap();
        let block = decompose_block_containing(&h, start).unwrap();
        assert_eq!(block.rows.len(), s.dim() / 2);
        let mut expect: Vec<f64> = (0..s.dim())
            .filter(|&k| full.eig_block(k) == full.row_block(start))
            .map(|k| full.eigenvalues()[k])
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in block.eigenvalues.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let s = HilbertSpace::new(1, 1).unwrap();
        let a = s.annihilate();
        assert!(matches!(decompose(&a), Err(Error::Eigensolver(_))));
    }
}
