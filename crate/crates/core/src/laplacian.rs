//! Graph Laplacians restricted to a subsample, and their heat operators.
//!
//! For weights `W` and an active set `S'`, the Laplacian is
//!
//! ```text
//! L[i][j] = -W[i][j]               i != j, both i and j in S'
//! L[i][i] = sum_{j in S'} W[i][j]  for every i
//! L[i][j] = 0                      otherwise
//! ```
//!
//! This is the positive semidefinite sign convention: `exp(-tL)` has its
//! spectrum in `(0, 1]`, and its eigenvalue-1 eigenspace is spanned by the
//! indicators of the connected components of the active support graph. Rows of
//! inactive points keep their degree term towards the active set, so they are
//! diagonal-only and decay under the heat flow.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::SubsampleSet;
use crate::kernel::KernelMatrix;
use crate::linalg::symmetric_exponential;

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    matrix: DMatrix<f64>,
    active: SubsampleSet,
    bandwidth: f64,
}

impl LaplacianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn active(&self) -> &SubsampleSet {
        &self.active
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    /// Groups of indices that are connected through nonzero off-diagonal
    /// entries; `exp(-tL)` is block diagonal over them. Each group is sorted
    /// and groups are ordered by their smallest member.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut blocks = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut block = Vec::new();
            while let Some(i) = queue.pop_front() {
                block.push(i);
                for (j, visited) in seen.iter_mut().enumerate() {
                    if !*visited && j != i && self.matrix[(i, j)] != 0.0 {
                        *visited = true;
                        queue.push_back(j);
                    }
                }
            }
            block.sort_unstable();
            blocks.push(block);
        }
        blocks
    }
}

pub fn build_laplacian(weights: &KernelMatrix, active: &SubsampleSet) -> Result<LaplacianMatrix> {
    let n = weights.len();
    if active.parent_len() != n {
        return Err(Error::InvalidSubsample(format!(
            "subsample of a {}-point set used with a {n}-point kernel",
            active.parent_len()
        )));
    }
    let w = weights.weights();
    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut degree = 0.0;
        for &j in active.indices() {
            let wij = w[(i, j)];
            degree += wij;
            if j != i && active.contains(i) {
                matrix[(i, j)] = -wij;
            }
        }
        matrix[(i, i)] = degree;
    }
    Ok(LaplacianMatrix {
        matrix,
        active: active.clone(),
        bandwidth: weights.bandwidth(),
    })
}

/// `exp(-tL)` together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatOperator {
    matrix: DMatrix<f64>,
    time: f64,
    bandwidth: f64,
    active: SubsampleSet,
}

impl HeatOperator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn active(&self) -> &SubsampleSet {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

/// Computes `exp(-tL)` one connected block at a time.
pub fn heat_operator(laplacian: &LaplacianMatrix, t: f64) -> Result<HeatOperator> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "diffusion time must be positive, got {t}"
        )));
    }
    let n = laplacian.len();
    let l = laplacian.matrix();
    let mut matrix = DMatrix::zeros(n, n);
    for block in laplacian.blocks() {
        let m = block.len();
        let sub = DMatrix::from_fn(m, m, |a, b| -t * l[(block[a], block[b])]);
        let exp = symmetric_exponential(&sub);
        for (a, &i) in block.iter().enumerate() {
            for (b, &j) in block.iter().enumerate() {
                matrix[(i, j)] = exp[(a, b)];
            }
        }
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteExponential);
    }
    Ok(HeatOperator {
        matrix,
        time: t,
        bandwidth: laplacian.bandwidth(),
        active: laplacian.active().clone(),
    })
}
