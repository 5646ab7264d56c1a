//! Topological clustering of point clouds.
//!
//! Points are joined into a graph whenever they lie within a bandwidth `r`
//! of each other. The heat operator `exp(-tL)` of that graph fixes exactly
//! the functions that are constant on its connected components, so the
//! dimension of its eigenvalue-1 eigenspace is the number of clusters, and
//! the eigenvectors themselves say which point belongs where. The bandwidth
//! is picked automatically from a cross-validated variance curve.
//!
//! ```
//! use heatclust::{cluster, datasets::generate_blobs, ClusterConfig};
//!
//! let data = generate_blobs(90, 3, 2.0, 0.0, 1).unwrap();
//! let result = cluster(&data.cloud, &ClusterConfig::default()).unwrap();
//! assert_eq!(result.beta0, 3);
//! ```
//!
//! Module map:
//!
//! * [`geometry`]: point clouds, distances, subsamples
//! * [`datasets`]: synthetic labeled clouds
//! * [`kernel`]: ball kernels and their weight matrices
//! * [`laplacian`]: subsample Laplacians and heat operators
//! * [`linalg`]: matrix exponential and Hilbert–Schmidt norms
//! * [`bandwidth`]: variance curve and elbow rule
//! * [`spectral`]: unit eigenspace, elimination, assignment
//! * [`components`]: union-find oracle and label comparison
//! * [`pipeline`]: the end-to-end run
//! * [`io`]: CSV formats

pub mod bandwidth;
pub mod components;
pub mod datasets;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod laplacian;
pub mod linalg;
pub mod pipeline;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{diameter, pairwise_distances, DistanceMatrix, PointCloud, SubsampleSet};
pub use kernel::{KernelFamily, KernelSpec};
pub use pipeline::{cluster, BandwidthMode, ClusterConfig, ClusteringResult, Warning};

// The guide's code blocks run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/heat-operator.md")]
    mod heat_operator {}
    #[doc = include_str!("../../../book/src/bandwidth.md")]
    mod bandwidth {}
    #[doc = include_str!("../../../book/src/elimination.md")]
    mod elimination {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
