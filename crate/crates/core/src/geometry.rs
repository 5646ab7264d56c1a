//! Point clouds, Euclidean distance matrices and random subsamples.

use nalgebra::{DMatrix, RowDVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `n` points in `d`-dimensional Euclidean space, stored one point per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: DMatrix<f64>,
}

impl PointCloud {
    pub fn new(coords: DMatrix<f64>) -> Result<Self> {
        if coords.nrows() == 0 {
            return Err(Error::InvalidPointCloud("no points".into()));
        }
        if coords.ncols() == 0 {
            return Err(Error::InvalidPointCloud("points have dimension 0".into()));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            // column-major storage
            let (row, col) = (pos % coords.nrows(), pos / coords.nrows());
            return Err(Error::InvalidPointCloud(format!(
                "non-finite coordinate at point {row}, axis {col}"
            )));
        }
        Ok(Self { coords })
    }

    /// Builds a cloud from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidPointCloud("no points".into()));
        };
        let d = first.len();
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidPointCloud(format!(
                "point {i} has {} coordinates, expected {d}",
                rows[i].len()
            )));
        }
        Self::new(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn point(&self, i: usize) -> RowDVector<f64> {
        self.coords.row(i).into_owned()
    }

    /// The cloud with its points reordered so that point `i` of the result is
    /// point `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} for {} points",
                order.len(),
                self.len()
            )));
        }
        Self::new(DMatrix::from_fn(self.len(), self.dim(), |i, j| {
            self.coords[(order[i], j)]
        }))
    }
}

/// Symmetric matrix of pairwise Euclidean distances.
///
/// Also records the ambient dimension of the points it was computed from,
/// which the Lebesgue-ball kernel needs for its normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    dist: DMatrix<f64>,
    ambient_dim: usize,
}

impl DistanceMatrix {
    /// Wraps an existing distance matrix after validating it.
    pub fn from_matrix(dist: DMatrix<f64>, ambient_dim: usize) -> Result<Self> {
        if !dist.is_square() || dist.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "distance matrix must be square and nonempty, got {}x{}",
                dist.nrows(),
                dist.ncols()
            )));
        }
        if ambient_dim == 0 {
            return Err(Error::InvalidArgument(
                "ambient dimension must be positive".into(),
            ));
        }
        let n = dist.nrows();
        for i in 0..n {
            if dist[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let v = dist[(i, j)];
                if !(v.is_finite() && v >= 0.0) || v != dist[(j, i)] {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) is negative, non-finite or asymmetric"
                    )));
                }
            }
        }
        Ok(Self { dist, ambient_dim })
    }

    pub fn len(&self) -> usize {
        self.dist.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.dist
    }

    /// Smallest strictly positive distance, if any pair of distinct points exists.
    pub fn min_positive(&self) -> Option<f64> {
        self.dist
            .iter()
            .copied()
            .filter(|&v| v > 0.0)
            .min_by(f64::total_cmp)
    }
}

/// Euclidean distance between every pair of points.
pub fn pairwise_distances(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let x = cloud.coords();
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let mut acc = 0.0;
            for k in 0..cloud.dim() {
                let diff = x[(i, k)] - x[(j, k)];
                acc += diff * diff;
            }
            let v = acc.sqrt();
            dist[(i, j)] = v;
            dist[(j, i)] = v;
        }
    }
    DistanceMatrix {
        dist,
        ambient_dim: cloud.dim(),
    }
}

/// Largest pairwise distance; 0 for a single point.
pub fn diameter(dist: &DistanceMatrix) -> f64 {
    dist.as_matrix().iter().copied().fold(0.0, f64::max)
}

/// A nonempty set of distinct point indices drawn from `0..parent_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsampleSet {
    indices: Vec<usize>,
    mask: Vec<bool>,
}

impl SubsampleSet {
    pub fn new(mut indices: Vec<usize>, parent_len: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSubsample("subsample is empty".into()));
        }
        let mut mask = vec![false; parent_len];
        for &i in &indices {
            if i >= parent_len {
                return Err(Error::InvalidSubsample(format!(
                    "index {i} out of range for {parent_len} points"
                )));
            }
            if std::mem::replace(&mut mask[i], true) {
                return Err(Error::InvalidSubsample(format!("duplicate index {i}")));
            }
        }
        indices.sort_unstable();
        Ok(Self { indices, mask })
    }

    /// Every index of a parent set of size `n`.
    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
            mask: vec![true; n],
        }
    }

    /// Sorted member indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn parent_len(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.mask.len()
    }
}

/// Number of points kept by [`subsample`] for a given fraction.
pub fn subsample_size(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).clamp(1, n)
}

fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "subsample fraction must lie in (0, 1), got {fraction}"
        )))
    }
}

/// Uniform random subset of `0..n` without replacement, of size
/// `round(fraction * n)` (at least one point).
pub fn subsample(n: usize, fraction: f64, seed: u64) -> Result<SubsampleSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    subsample_with(&mut rng, n, fraction)
}

pub(crate) fn subsample_with(
    rng: &mut ChaCha8Rng,
    n: usize,
    fraction: f64,
) -> Result<SubsampleSet> {
    check_fraction(fraction)?;
    if n == 0 {
        return Err(Error::InvalidSubsample("parent set is empty".into()));
    }
    let size = subsample_size(n, fraction);
    let picked = rand::seq::index::sample(rng, n, size).into_vec();
    SubsampleSet::new(picked, n)
}

/// `count` independent subsamples, all drawn from one generator seeded by `seed`.
pub fn draw_subsamples(
    n: usize,
    count: usize,
    fraction: f64,
    seed: u64,
) -> Result<Vec<SubsampleSet>> {
    check_fraction(fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| subsample_with(&mut rng, n, fraction))
        .collect()
}
