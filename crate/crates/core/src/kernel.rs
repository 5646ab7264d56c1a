//! Compactly supported ball kernels `K_r(x, y) = f_r(d(x, y))`.
//!
//! Two normalizations share the same support, the closed `r`-ball minus the
//! point itself:
//!
//! * [`KernelFamily::LebesgueBall`] weights every neighbor by the inverse
//!   volume of the ambient `d`-ball of radius `r`.
//! * [`KernelFamily::RowNormalizedBall`] weights the pair `(i, j)` by
//!   `1 / sqrt(deg_i * deg_j)`, where `deg_i` counts the neighbors of `i`.
//!   This keeps the matrix symmetric while giving rows of order-one mass.
//!
//! Connected components, and therefore the final clustering, depend only on
//! the support.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KernelFamily {
    LebesgueBall,
    #[default]
    RowNormalizedBall,
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::LebesgueBall => "lebesgue-ball",
            KernelFamily::RowNormalizedBall => "row-ball",
        })
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lebesgue-ball" | "lebesgue" => Ok(KernelFamily::LebesgueBall),
            "row-ball" | "row-normalized-ball" => Ok(KernelFamily::RowNormalizedBall),
            other => Err(Error::InvalidArgument(format!(
                "unknown kernel family '{other}' (expected row-ball or lebesgue-ball)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: f64,
    ambient_dim: usize,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64, ambient_dim: usize) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        if ambient_dim == 0 {
            return Err(Error::InvalidArgument(
                "ambient dimension must be positive".into(),
            ));
        }
        Ok(Self {
            family,
            bandwidth,
            ambient_dim,
        })
    }

    /// Spec for the points behind `dist`.
    pub fn for_distances(
        family: KernelFamily,
        bandwidth: f64,
        dist: &DistanceMatrix,
    ) -> Result<Self> {
        Self::new(family, bandwidth, dist.ambient_dim())
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn with_bandwidth(&self, bandwidth: f64) -> Result<Self> {
        Self::new(self.family, bandwidth, self.ambient_dim)
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = V_{d-2} * 2 pi / d
    let mut even = 1.0;
    let mut odd = 2.0;
    for k in 2..=d {
        if k % 2 == 0 {
            even *= 2.0 * PI / k as f64;
        } else {
            odd *= 2.0 * PI / k as f64;
        }
    }
    if d.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Symmetric nonnegative weight matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    weights: DMatrix<f64>,
    bandwidth: f64,
}

impl KernelMatrix {
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.nrows() == 0
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.weights.row(i).iter().sum())
            .collect()
    }
}

#[inline]
fn in_support(d: f64, r: f64) -> bool {
    d > 0.0 && d <= r
}

/// Neighbor counts `|{j != i : 0 < d(i, j) <= r}|`.
pub fn neighbor_counts(dist: &DistanceMatrix, r: f64) -> Vec<usize> {
    let n = dist.len();
    (0..n)
        .map(|i| (0..n).filter(|&j| in_support(dist.get(i, j), r)).count())
        .collect()
}

pub fn evaluate_kernel_matrix(spec: &KernelSpec, dist: &DistanceMatrix) -> KernelMatrix {
    let n = dist.len();
    let r = spec.bandwidth;
    let mut weights = DMatrix::zeros(n, n);
    match spec.family {
        KernelFamily::LebesgueBall => {
            let w = 1.0 / (unit_ball_volume(spec.ambient_dim) * r.powi(spec.ambient_dim as i32));
            for j in 0..n {
                for i in 0..n {
                    if in_support(dist.get(i, j), r) {
                        weights[(i, j)] = w;
                    }
                }
            }
        }
        KernelFamily::RowNormalizedBall => {
            let scale: Vec<f64> = neighbor_counts(dist, r)
                .into_iter()
                .map(|deg| {
                    if deg == 0 {
                        0.0
                    } else {
                        1.0 / (deg as f64).sqrt()
                    }
                })
                .collect();
            for j in 0..n {
                for i in 0..n {
                    if in_support(dist.get(i, j), r) {
                        weights[(i, j)] = scale[i] * scale[j];
                    }
                }
            }
        }
    }
    KernelMatrix {
        weights,
        bandwidth: r,
    }
}

/// Outcome of [`check_kernel_axioms`].
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    /// Pairs at equal distance with equal normalization context carry equal weight.
    pub depends_only_on_distance: bool,
    /// Support at every smaller probe radius is contained in the support at `r`.
    pub support_monotone: bool,
    /// Row sums of the weight matrix; unit sums are reported, not required.
    pub row_sums: Vec<f64>,
    /// Largest `|row_sum - 1|` over rows with at least one neighbor.
    pub max_unit_sum_deviation: f64,
    pub diagnostics: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.depends_only_on_distance && self.support_monotone
    }
}

const PROBE_FRACTIONS: [f64; 4] = [0.9, 0.75, 0.5, 0.25];

/// Checks discrete analogues of the kernel conditions on a concrete sample.
pub fn check_kernel_axioms(spec: &KernelSpec, dist: &DistanceMatrix) -> AxiomReport {
    let n = dist.len();
    let kernel = evaluate_kernel_matrix(spec, dist);
    let w = kernel.weights();
    let mut diagnostics = Vec::new();

    // Normalization context: nothing for the Lebesgue ball, the unordered
    // degree pair for the row-normalized ball.
    let degrees = neighbor_counts(dist, spec.bandwidth);
    let context = |i: usize, j: usize| match spec.family {
        KernelFamily::LebesgueBall => (0, 0),
        KernelFamily::RowNormalizedBall => (degrees[i].min(degrees[j]), degrees[i].max(degrees[j])),
    };
    let mut seen: HashMap<(u64, (usize, usize)), f64> = HashMap::new();
    let mut depends_only_on_distance = true;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let key = (dist.get(i, j).to_bits(), context(i, j));
            let value = w[(i, j)];
            match seen.get(&key) {
                Some(&prev) if prev != value => {
                    depends_only_on_distance = false;
                    diagnostics.push(format!(
                        "pair ({i}, {j}) at distance {} has weight {value}, expected {prev}",
                        dist.get(i, j)
                    ));
                }
                Some(_) => {}
                None => {
                    seen.insert(key, value);
                }
            }
        }
    }

    let mut support_monotone = true;
    for fraction in PROBE_FRACTIONS {
        let smaller = spec
            .with_bandwidth(spec.bandwidth * fraction)
            .expect("positive fraction of a valid bandwidth");
        let ws = evaluate_kernel_matrix(&smaller, dist);
        let escaped = ws
            .weights()
            .iter()
            .zip(w.iter())
            .filter(|(&small, &big)| small > 0.0 && big == 0.0)
            .count();
        if escaped > 0 {
            support_monotone = false;
            diagnostics.push(format!(
                "{escaped} entries supported at r = {} but not at r = {}",
                smaller.bandwidth, spec.bandwidth
            ));
        }
    }

    let row_sums = kernel.row_sums();
    let max_unit_sum_deviation = row_sums
        .iter()
        .zip(&degrees)
        .filter(|(_, &deg)| deg > 0)
        .map(|(s, _)| (s - 1.0).abs())
        .fold(0.0, f64::max);

    AxiomReport {
        depends_only_on_distance,
        support_monotone,
        row_sums,
        max_unit_sum_deviation,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pairwise_distances, PointCloud};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dist(n: usize, d: usize, seed: u64) -> DistanceMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cloud =
            PointCloud::new(DMatrix::from_fn(n, d, |_, _| rng.random_range(0.0..1.0))).unwrap();
        pairwise_distances(&cloud)
    }

    fn line(xs: &[f64]) -> DistanceMatrix {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        pairwise_distances(&PointCloud::from_rows(&rows).unwrap())
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn empty_support_gives_zero_matrix() {
        let dist = line(&[0.0, 1.0, 3.0]);
        for family in [KernelFamily::LebesgueBall, KernelFamily::RowNormalizedBall] {
            let spec = KernelSpec::for_distances(family, 0.5, &dist).unwrap();
            assert!(evaluate_kernel_matrix(&spec, &dist)
                .weights()
                .iter()
                .all(|&w| w == 0.0));
        }
    }

    #[test]
    fn lebesgue_weight_in_one_dimension() {
        let dist = line(&[0.0, 1.0]);
        let spec = KernelSpec::new(KernelFamily::LebesgueBall, 2.0, 1).unwrap();
        let w = evaluate_kernel_matrix(&spec, &dist);
        assert_eq!(w.weights()[(0, 1)], 0.25);
        assert_eq!(w.weights()[(1, 0)], 0.25);
        assert_eq!(w.weights()[(0, 0)], 0.0);
    }

    #[test]
    fn row_normalized_weights() {
        // 0 - 1 - 2 path at r = 1: degrees 1, 2, 1
        let dist = line(&[0.0, 1.0, 2.0]);
        let spec = KernelSpec::for_distances(KernelFamily::RowNormalizedBall, 1.0, &dist).unwrap();
        let w = evaluate_kernel_matrix(&spec, &dist);
        let expected = 1.0 / 2f64.sqrt();
        assert!((w.weights()[(0, 1)] - expected).abs() < 1e-15);
        assert_eq!(w.weights()[(0, 2)], 0.0);
    }

    #[test]
    fn rejects_bad_bandwidth() {
        assert!(KernelSpec::new(KernelFamily::LebesgueBall, 0.0, 2).is_err());
        assert!(KernelSpec::new(KernelFamily::LebesgueBall, f64::NAN, 2).is_err());
        assert!(KernelSpec::new(KernelFamily::LebesgueBall, 1.0, 0).is_err());
        assert!("gaussian".parse::<KernelFamily>().is_err());
        assert_eq!(
            "row-ball".parse::<KernelFamily>().unwrap(),
            KernelFamily::RowNormalizedBall
        );
    }

    #[test]
    fn duplicate_distance_pairs_share_weights() {
        let dist = line(&[0.0, 1.0, 2.0, 3.5]);
        let spec = KernelSpec::for_distances(KernelFamily::LebesgueBall, 1.2, &dist).unwrap();
        let w = evaluate_kernel_matrix(&spec, &dist);
        assert_eq!(w.weights()[(0, 1)], w.weights()[(1, 2)]);
        assert!(check_kernel_axioms(&spec, &dist).passed());
    }

    #[test]
    fn row_sum_report_matches_direct_summation() {
        let dist = random_dist(20, 2, 8);
        let spec = KernelSpec::for_distances(KernelFamily::RowNormalizedBall, 0.4, &dist).unwrap();
        let report = check_kernel_axioms(&spec, &dist);
        assert!(report.passed(), "{:?}", report.diagnostics);
        let w = evaluate_kernel_matrix(&spec, &dist);
        for i in 0..20 {
            let mut direct = 0.0;
            for j in 0..20 {
                direct += w.weights()[(i, j)];
            }
            assert!((report.row_sums[i] - direct).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn support_is_exactly_the_ball_graph(seed in any::<u64>(), n in 1usize..25, d in 1usize..4, r in 0.05f64..1.5, lebesgue in any::<bool>()) {
            let dist = random_dist(n, d, seed);
            let family = if lebesgue { KernelFamily::LebesgueBall } else { KernelFamily::RowNormalizedBall };
            let spec = KernelSpec::for_distances(family, r, &dist).unwrap();
            let w = evaluate_kernel_matrix(&spec, &dist);
            for i in 0..n {
                for j in 0..n {
                    let threshold = dist.get(i, j) > 0.0 && dist.get(i, j) <= r;
                    prop_assert_eq!(w.weights()[(i, j)] > 0.0, threshold);
                    prop_assert_eq!(w.weights()[(i, j)], w.weights()[(j, i)]);
                }
            }
        }

        #[test]
        fn support_shrinks_with_radius(seed in any::<u64>(), r1 in 0.05f64..1.0, extra in 0.0f64..1.0) {
            let dist = random_dist(15, 2, seed);
            let small = evaluate_kernel_matrix(&KernelSpec::for_distances(KernelFamily::RowNormalizedBall, r1, &dist).unwrap(), &dist);
            let big = evaluate_kernel_matrix(&KernelSpec::for_distances(KernelFamily::RowNormalizedBall, r1 + extra, &dist).unwrap(), &dist);
            for (s, b) in small.weights().iter().zip(big.weights().iter()) {
                prop_assert!(!(*s > 0.0 && *b == 0.0));
            }
        }

        #[test]
        fn lebesgue_weights_constant_on_support(seed in any::<u64>(), r in 0.1f64..1.5) {
            let dist = random_dist(15, 3, seed);
            let w = evaluate_kernel_matrix(&KernelSpec::for_distances(KernelFamily::LebesgueBall, r, &dist).unwrap(), &dist);
            let expected = 1.0 / (unit_ball_volume(3) * r.powi(3));
            prop_assert!(w.weights().iter().all(|&v| v == 0.0 || v == expected));
        }
    }
}
