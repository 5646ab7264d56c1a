//! Synthetic labeled point clouds.
//!
//! All generators are deterministic functions of their seed and draw every
//! random number from a single ChaCha8 stream.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Radius of the horizontal circle in [`generate_three_circles`].
pub const BIG_RADIUS: f64 = 1.0;
/// Radius of the two linked circles in [`generate_three_circles`].
pub const SMALL_RADIUS: f64 = 0.5;
/// Minimum separation enforced between the two small circles.
pub const SMALL_CIRCLE_SEPARATION: f64 = 0.3;

/// A point cloud with ground-truth class labels in `0..classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPointCloud {
    pub cloud: PointCloud,
    pub labels: Vec<usize>,
}

impl LabeledPointCloud {
    pub fn new(cloud: PointCloud, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != cloud.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} points",
                labels.len(),
                cloud.len()
            )));
        }
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; classes];
        labels.iter().for_each(|&l| seen[l] = true);
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "label class {empty} is empty"
            )));
        }
        Ok(Self { cloud, labels })
    }

    pub fn classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

/// Splits `n` points over `parts` groups as evenly as possible; the remainder
/// goes to the first group.
fn split_counts(n: usize, parts: usize) -> Vec<usize> {
    let mut counts = vec![n / parts; parts];
    counts[0] += n % parts;
    counts
}

/// Point at angle `theta` on the small circle whose center sits at angle
/// `phi` on the big circle. The circle lies in the vertical plane through the
/// z-axis and its center, so it links the big circle like a chain.
pub fn small_circle_point(phi: f64, theta: f64) -> Vector3<f64> {
    let radial = Vector3::new(phi.cos(), phi.sin(), 0.0);
    let center = radial * BIG_RADIUS;
    center + SMALL_RADIUS * (theta.cos() * radial + theta.sin() * Vector3::z())
}

pub fn big_circle_point(theta: f64) -> Vector3<f64> {
    Vector3::new(BIG_RADIUS * theta.cos(), BIG_RADIUS * theta.sin(), 0.0)
}

/// Distance from `p` to the big (horizontal, unit) circle.
pub fn distance_to_big_circle(p: &Vector3<f64>) -> f64 {
    let rho = (p.x * p.x + p.y * p.y).sqrt();
    ((rho - BIG_RADIUS).powi(2) + p.z * p.z).sqrt()
}

/// Brute-force minimum distance between the small circles centered at angles
/// `phi_a` and `phi_b`.
pub fn small_circle_gap(phi_a: f64, phi_b: f64) -> f64 {
    const SAMPLES: usize = 360;
    let a: Vec<_> = (0..SAMPLES)
        .map(|k| small_circle_point(phi_a, TAU * k as f64 / SAMPLES as f64))
        .collect();
    let b: Vec<_> = (0..SAMPLES)
        .map(|k| small_circle_point(phi_b, TAU * k as f64 / SAMPLES as f64))
        .collect();
    a.iter()
        .flat_map(|p| b.iter().map(move |q| (p - q).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Parameters of a three-circles draw, for inspection and plotting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeCirclesLayout {
    /// Angles on the big circle of the two small-circle centers.
    pub centers: [f64; 2],
}

/// Samples `n` points from a unit circle in the `z = 0` plane and two circles
/// of radius 0.5 linked through it, with isotropic Gaussian noise of standard
/// deviation `sigma`. Labels: 0 for the big circle, 1 and 2 for the small ones.
pub fn generate_three_circles(n: usize, sigma: f64, seed: u64) -> Result<LabeledPointCloud> {
    generate_three_circles_with_layout(n, sigma, seed).map(|(cloud, _)| cloud)
}

pub fn generate_three_circles_with_layout(
    n: usize,
    sigma: f64,
    seed: u64,
) -> Result<(LabeledPointCloud, ThreeCirclesLayout)> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "three circles need n >= 3, got {n}"
        )));
    }
    check_sigma(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let centers = loop {
        let a = rng.random_range(0.0..TAU);
        let b = rng.random_range(0.0..TAU);
        if small_circle_gap(a, b) >= SMALL_CIRCLE_SEPARATION {
            break [a, b];
        }
    };

    let counts = split_counts(n, 3);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (label, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let theta = rng.random_range(0.0..TAU);
            let p = match label {
                0 => big_circle_point(theta),
                _ => small_circle_point(centers[label - 1], theta),
            };
            points.push(add_noise(&mut rng, p.as_slice(), sigma));
            labels.push(label);
        }
    }
    let cloud = PointCloud::from_rows(&points)?;
    Ok((
        LabeledPointCloud::new(cloud, labels)?,
        ThreeCirclesLayout { centers },
    ))
}

/// Planar blobs: `k` discs of radius 0.5 (diameter 1) centered at
/// `(spacing * i, 0)`, sampled uniformly, with Gaussian noise `sigma`.
pub fn generate_blobs(
    n: usize,
    k: usize,
    spacing: f64,
    sigma: f64,
    seed: u64,
) -> Result<LabeledPointCloud> {
    if k == 0 || n < k {
        return Err(Error::InvalidArgument(format!(
            "blobs need n >= k >= 1, got n={n}, k={k}"
        )));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    check_sigma(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (label, &count) in split_counts(n, k).iter().enumerate() {
        for _ in 0..count {
            let radius = 0.5 * rng.random::<f64>().sqrt();
            let angle = rng.random_range(0.0..TAU);
            let p = [
                spacing * label as f64 + radius * angle.cos(),
                radius * angle.sin(),
            ];
            points.push(add_noise(&mut rng, &p, sigma));
            labels.push(label);
        }
    }
    LabeledPointCloud::new(PointCloud::from_rows(&points)?, labels)
}

/// Two concentric planar circles of radii 1 and 2.
pub fn generate_two_circles(n: usize, sigma: f64, seed: u64) -> Result<LabeledPointCloud> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "two circles need n >= 2, got {n}"
        )));
    }
    check_sigma(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (label, &count) in split_counts(n, 2).iter().enumerate() {
        let radius = (label + 1) as f64;
        for _ in 0..count {
            let angle = rng.random_range(0.0..TAU);
            let p = [radius * angle.cos(), radius * angle.sin()];
            points.push(add_noise(&mut rng, &p, sigma));
            labels.push(label);
        }
    }
    LabeledPointCloud::new(PointCloud::from_rows(&points)?, labels)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "sigma must be >= 0, got {sigma}"
        )))
    }
}

fn add_noise(rng: &mut ChaCha8Rng, p: &[f64], sigma: f64) -> Vec<f64> {
    p.iter()
        .map(|&x| {
            let z: f64 = rng.sample(StandardNormal);
            x + sigma * z
        })
        .collect()
}

/// Copies a cloud into a dense `n x d` matrix of rows; convenience for callers
/// that want raw coordinates.
pub fn to_rows(cloud: &PointCloud) -> Vec<Vec<f64>> {
    let m: &DMatrix<f64> = cloud.coords();
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}
