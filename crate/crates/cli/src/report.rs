//! JSON run report. Field order is fixed by the struct definitions; only
//! `timings_ms` varies between otherwise identical runs.

use serde::Serialize;

use heatclust::{ClusterConfig, ClusteringResult};

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub dim: usize,
    pub beta0: usize,
    pub r_hat: f64,
    /// 0-based grid index of `r_hat`; absent for a fixed bandwidth.
    pub bandwidth_index: Option<usize>,
    pub elbow_fallback: bool,
    pub cluster_sizes: Vec<usize>,
    pub eigenvalues_near_one: Vec<f64>,
    pub warnings: Vec<String>,
    pub config: ConfigEcho,
    pub timings_ms: Timings,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub header: bool,
    pub kernel: String,
    pub bandwidth: String,
    pub grid: usize,
    pub subsamples: usize,
    pub fraction: f64,
    pub t: f64,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub read: f64,
    pub cluster: f64,
    pub total: f64,
}

impl RunReport {
    pub fn new(
        dim: usize,
        result: &ClusteringResult,
        config: &ClusterConfig,
        input: &str,
        header: bool,
        timings: Timings,
    ) -> Self {
        Self {
            n: result.labels.len(),
            dim,
            beta0: result.beta0,
            r_hat: result.r_hat,
            bandwidth_index: result.bandwidth_index,
            elbow_fallback: result
                .warnings
                .iter()
                .any(|w| matches!(w, heatclust::Warning::NoElbow { .. })),
            cluster_sizes: result.cluster_sizes(),
            eigenvalues_near_one: result.leading_eigenvalues.clone(),
            warnings: result.warnings.iter().map(ToString::to_string).collect(),
            config: ConfigEcho {
                input: input.to_string(),
                header,
                kernel: config.kernel.to_string(),
                bandwidth: config.bandwidth.to_string(),
                grid: config.grid_size,
                subsamples: config.subsamples,
                fraction: config.fraction,
                t: config.time,
                tol: config.tolerance,
                seed: config.seed,
            },
            timings_ms: timings,
        }
    }
}
