//! From a heat operator to cluster labels.
//!
//! The eigenvalue-1 eigenspace of `exp(-tL)` is spanned by indicators of
//! connected components, so any orthonormal basis `Ψ` of it (rows =
//! eigenvectors, columns = points) sends every point of one component to the
//! same column vector. Column-pivoted Gauss–Jordan elimination on `Ψ` turns
//! that basis into one where the columns are standard basis vectors `e_i`;
//! points are then assigned to the nearest `e_i`, which absorbs the small
//! numerical noise in the eigenvectors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::laplacian::HeatOperator;
use crate::linalg::symmetric_eigen;

/// Pivots smaller than this make [`modified_gaussian_elimination`] fail.
pub const PIVOT_THRESHOLD: f64 = 1e-12;
/// Assignments whose two smallest distances differ by less than this are
/// reported as ambiguous.
pub const AMBIGUITY_GAP: f64 = 1e-6;

/// Orthonormal basis of the near-unit eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    /// `k x n`; row `i` is eigenvector `f_i` sampled at every point.
    pub psi: DMatrix<f64>,
    /// Eigenvalues of the rows of `psi`, descending.
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
    /// The largest eigenvalues of the operator (up to `k + 3` of them), for reporting.
    pub leading_eigenvalues: Vec<f64>,
}

impl EigenBasis {
    /// Estimated number of connected components.
    pub fn dimension(&self) -> usize {
        self.psi.nrows()
    }
}

pub fn unit_eigenspace(heat: &HeatOperator, tolerance: f64) -> Result<EigenBasis> {
    unit_eigenspace_of(heat.matrix(), tolerance)
}

/// Eigenpairs of a symmetric matrix with eigenvalue at least `1 - tolerance`.
pub fn unit_eigenspace_of(matrix: &DMatrix<f64>, tolerance: f64) -> Result<EigenBasis> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "unit eigenvalue tolerance must lie in (0, 1), got {tolerance}"
        )));
    }
    if !matrix.is_square() || matrix.nrows() == 0 {
        return Err(Error::InvalidArgument(
            "heat operator must be square and nonempty".into(),
        ));
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(matrix);
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    // descending; index breaks ties so the order is deterministic
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]).then(a.cmp(&b)));
    let selected: Vec<usize> = order
        .iter()
        .copied()
        .take_while(|&i| eigenvalues[i] >= 1.0 - tolerance)
        .collect();
    if selected.is_empty() {
        return Err(Error::NoUnitEigenvalue { tolerance });
    }
    let k = selected.len();
    let n = matrix.nrows();
    let psi = DMatrix::from_fn(k, n, |row, col| eigenvectors[(col, selected[row])]);
    Ok(EigenBasis {
        psi,
        eigenvalues: selected.iter().map(|&i| eigenvalues[i]).collect(),
        tolerance,
        leading_eigenvalues: order.iter().take(k + 3).map(|&i| eigenvalues[i]).collect(),
    })
}

/// Result of [`modified_gaussian_elimination`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMap {
    /// `k x n`, in the original column order: column `j` is `Φ(x_j)`.
    pub phi: DMatrix<f64>,
    /// `column_permutation[p]` is the original column sitting at position `p`
    /// after pivoting; the first `k` entries are the pivot columns.
    pub column_permutation: Vec<usize>,
}

impl ClusterMap {
    pub fn dimension(&self) -> usize {
        self.phi.nrows()
    }

    pub fn len(&self) -> usize {
        self.phi.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.ncols() == 0
    }

    /// The `k` pivot columns, in pivot order.
    pub fn pivots(&self) -> &[usize] {
        &self.column_permutation[..self.dimension()]
    }
}

/// Gauss–Jordan elimination on the rows of `psi` with column pivoting.
///
/// For row `i`: bring the column of largest magnitude among positions
/// `i..n` to position `i` (smallest original index on ties), scale row `i`
/// so the pivot is 1, and clear column `i` in every other row.
pub fn modified_gaussian_elimination(psi: &DMatrix<f64>) -> Result<ClusterMap> {
    let (k, n) = psi.shape();
    if k == 0 || n < k {
        return Err(Error::InvalidArgument(format!(
            "elimination needs 1 <= k <= n, got a {k}x{n} basis"
        )));
    }
    let mut work = psi.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let mut best = i;
        for p in i + 1..n {
            let (cand, cur) = (work[(i, p)].abs(), work[(i, best)].abs());
            if cand > cur || (cand == cur && perm[p] < perm[best]) {
                best = p;
            }
        }
        work.swap_columns(i, best);
        perm.swap(i, best);

        let pivot = work[(i, i)];
        if pivot.abs() < PIVOT_THRESHOLD {
            return Err(Error::DegenerateEigenbasis {
                row: i,
                pivot: pivot.abs(),
                threshold: PIVOT_THRESHOLD,
            });
        }
        work.row_mut(i).unscale_mut(pivot);
        work[(i, i)] = 1.0;
        for r in 0..k {
            if r == i {
                continue;
            }
            let factor = work[(r, i)];
            if factor != 0.0 {
                for c in 0..n {
                    let v = work[(i, c)];
                    work[(r, c)] -= factor * v;
                }
                work[(r, i)] = 0.0;
            }
        }
    }

    let mut phi = DMatrix::zeros(k, n);
    for (pos, &orig) in perm.iter().enumerate() {
        phi.set_column(orig, &work.column(pos));
    }
    Ok(ClusterMap {
        phi,
        column_permutation: perm,
    })
}

/// Nearest-basis-vector assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// 0-based cluster index per point.
    pub labels: Vec<usize>,
    /// `n x k`; entry `(j, i)` is `‖Φ(x_j) - e_i‖`.
    pub distances: DMatrix<f64>,
    /// Points whose two closest basis vectors are within [`AMBIGUITY_GAP`].
    pub ambiguous: Vec<usize>,
}

pub fn assign_clusters(map: &ClusterMap) -> Assignment {
    let (k, n) = map.phi.shape();
    let mut distances = DMatrix::zeros(n, k);
    let mut labels = Vec::with_capacity(n);
    let mut ambiguous = Vec::new();
    for j in 0..n {
        let col = map.phi.column(j);
        let sq_norm = col.norm_squared();
        for i in 0..k {
            // ‖v - e_i‖² = ‖v‖² - 2 v_i + 1
            distances[(j, i)] = (sq_norm - 2.0 * col[i] + 1.0).max(0.0).sqrt();
        }
        let row = distances.row(j);
        let mut best = 0;
        for i in 1..k {
            if row[i] < row[best] {
                best = i;
            }
        }
        let runner_up = (0..k)
            .filter(|&i| i != best)
            .map(|i| row[i])
            .fold(f64::INFINITY, f64::min);
        if runner_up - row[best] < AMBIGUITY_GAP {
            ambiguous.push(j);
        }
        labels.push(best);
    }
    Assignment {
        labels,
        distances,
        ambiguous,
    }
}
