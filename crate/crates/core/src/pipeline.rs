//! The full clustering run: subsamples, variance curve, bandwidth, heat
//! operator, unit eigenspace, elimination and assignment.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::bandwidth::{
    radius_grid, select_bandwidth, variance_curve, SelectionRule, VarianceCurve,
};
use crate::error::{Error, Result};
use crate::geometry::{diameter, pairwise_distances, PointCloud, SubsampleSet};
use crate::kernel::{evaluate_kernel_matrix, KernelFamily, KernelSpec};
use crate::laplacian::{build_laplacian, heat_operator};
use crate::spectral::{assign_clusters, modified_gaussian_elimination, unit_eigenspace};

/// How the bandwidth is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BandwidthMode {
    #[default]
    Elbow,
    Max,
    Fixed(f64),
}

impl fmt::Display for BandwidthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthMode::Elbow => f.write_str("auto"),
            BandwidthMode::Max => f.write_str("max"),
            BandwidthMode::Fixed(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for BandwidthMode {
    type Err = Error;

    /// `auto` (elbow rule), `max`, or a positive radius.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" | "elbow" => Ok(BandwidthMode::Elbow),
            "max" => Ok(BandwidthMode::Max),
            other => match other.parse::<f64>() {
                Ok(r) if r.is_finite() && r > 0.0 => Ok(BandwidthMode::Fixed(r)),
                _ => Err(Error::InvalidArgument(format!(
                    "bandwidth must be 'auto', 'max' or a positive number, got '{other}'"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub kernel: KernelFamily,
    pub bandwidth: BandwidthMode,
    /// Number of radii on the grid.
    pub grid_size: usize,
    /// Number of cross-validation subsamples.
    pub subsamples: usize,
    /// Fraction of points kept in each subsample.
    pub fraction: f64,
    /// Diffusion time of the heat operator.
    pub time: f64,
    /// Eigenvalues at or above `1 - tolerance` count as unit eigenvalues.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            kernel: KernelFamily::RowNormalizedBall,
            bandwidth: BandwidthMode::Elbow,
            grid_size: 30,
            subsamples: 10,
            fraction: 0.8,
            time: 1.0,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.grid_size < 3 {
            return bad(format!(
                "grid size must be at least 3, got {}",
                self.grid_size
            ));
        }
        if self.subsamples == 0 {
            return bad("subsample count must be at least 1".into());
        }
        if !(self.fraction > 0.0 && self.fraction < 1.0) {
            return bad(format!(
                "fraction must lie in (0, 1), got {}",
                self.fraction
            ));
        }
        if !(self.time.is_finite() && self.time > 0.0) {
            return bad(format!(
                "diffusion time must be positive, got {}",
                self.time
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad(format!(
                "tolerance must lie in (0, 1), got {}",
                self.tolerance
            ));
        }
        if let BandwidthMode::Fixed(r) = self.bandwidth {
            if !(r.is_finite() && r > 0.0) {
                return bad(format!("fixed bandwidth must be positive, got {r}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Only one point: it is its own cluster and no bandwidth is selected.
    SinglePoint,
    /// No grid index satisfied the elbow inequality.
    NoElbow { fallback_radius: f64 },
    /// A point's two nearest basis vectors are nearly equidistant.
    AmbiguousAssignment { point: usize },
}

impl Warning {
    /// Warnings that `--strict` treats as a failed run.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Warning::SinglePoint | Warning::NoElbow { .. })
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::SinglePoint => f.write_str("single-point input; returning one cluster"),
            Warning::NoElbow { fallback_radius } => write!(
                f,
                "no elbow found on the variance curve; fell back to r = {fallback_radius}"
            ),
            Warning::AmbiguousAssignment { point } => {
                write!(f, "point {point} is nearly equidistant from two clusters")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// Estimated number of connected components.
    pub beta0: usize,
    /// 0-based cluster per point.
    pub labels: Vec<usize>,
    /// `n x beta0` distances from `Φ(x_j)` to each basis vector.
    pub distances: DMatrix<f64>,
    /// `beta0 x n` eliminated eigenvector map.
    pub phi: DMatrix<f64>,
    pub r_hat: f64,
    /// Grid index of `r_hat`, when it came from a curve.
    pub bandwidth_index: Option<usize>,
    pub curve: Option<VarianceCurve>,
    /// Largest eigenvalues of the final heat operator.
    pub leading_eigenvalues: Vec<f64>,
    pub warnings: Vec<Warning>,
}

impl ClusteringResult {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.beta0];
        self.labels.iter().for_each(|&l| sizes[l] += 1);
        sizes
    }
}

/// Clusters `cloud` end to end. Deterministic given `config.seed`.
pub fn cluster(cloud: &PointCloud, config: &ClusterConfig) -> Result<ClusteringResult> {
    config.validate()?;
    let n = cloud.len();
    if n == 1 {
        return Ok(ClusteringResult {
            beta0: 1,
            labels: vec![0],
            distances: DMatrix::zeros(1, 1),
            phi: DMatrix::from_element(1, 1, 1.0),
            r_hat: 0.0,
            bandwidth_index: None,
            curve: None,
            leading_eigenvalues: vec![1.0],
            warnings: vec![Warning::SinglePoint],
        });
    }

    let dist = pairwise_distances(cloud);
    let mut warnings = Vec::new();
    let (r_hat, bandwidth_index, curve) = match config.bandwidth {
        BandwidthMode::Fixed(r) => (r, None, None),
        mode => {
            if diameter(&dist) == 0.0 {
                return Err(Error::ZeroDiameter(n));
            }
            let grid = radius_grid(&dist, config.grid_size)?;
            let curve = variance_curve(
                &dist,
                config.kernel,
                &grid,
                config.time,
                config.subsamples,
                config.fraction,
                config.seed,
            )?;
            let rule = if mode == BandwidthMode::Max {
                SelectionRule::Max
            } else {
                SelectionRule::Elbow
            };
            let choice = select_bandwidth(&curve, rule)?;
            if choice.fallback {
                warnings.push(Warning::NoElbow {
                    fallback_radius: choice.radius,
                });
            }
            (choice.radius, Some(choice.index), Some(curve))
        }
    };

    let spec = KernelSpec::for_distances(config.kernel, r_hat, &dist)?;
    let weights = evaluate_kernel_matrix(&spec, &dist);
    let heat = heat_operator(
        &build_laplacian(&weights, &SubsampleSet::full(n))?,
        config.time,
    )?;
    let basis = unit_eigenspace(&heat, config.tolerance)?;
    let map = modified_gaussian_elimination(&basis.psi)?;
    let assignment = assign_clusters(&map);
    warnings.extend(
        assignment
            .ambiguous
            .iter()
            .map(|&point| Warning::AmbiguousAssignment { point }),
    );

    Ok(ClusteringResult {
        beta0: basis.dimension(),
        labels: assignment.labels,
        distances: assignment.distances,
        phi: map.phi,
        r_hat,
        bandwidth_index,
        curve,
        leading_eigenvalues: basis.leading_eigenvalues,
        warnings,
    })
}
