//! Cross-validated choice of the kernel bandwidth.
//!
//! For each radius on a grid, the variance proxy `V̂(r)` is the mean
//! Hilbert–Schmidt distance between the heat operator restricted to each of
//! `N` random subsamples and the heat operator on the whole sample. The same
//! subsamples are reused at every radius.
//!
//! The bandwidth is then read off the curve with an elbow rule: the largest
//! interior grid index whose centered slope is still steeper than the chord
//! from the first to the last grid point.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{diameter, draw_subsamples, DistanceMatrix, SubsampleSet};
use crate::kernel::{evaluate_kernel_matrix, KernelFamily, KernelSpec};
use crate::laplacian::{build_laplacian, heat_operator};
use crate::linalg::hs_distance;

/// Strictly increasing radii ending at the data diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusGrid {
    radii: Vec<f64>,
}

impl RadiusGrid {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "radius grid needs at least 3 points, got {}",
                radii.len()
            )));
        }
        if radii[0] <= 0.0
            || !radii.windows(2).all(|w| w[0] < w[1])
            || !radii.iter().all(|r| r.is_finite())
        {
            return Err(Error::InvalidArgument(
                "radii must be positive, finite and strictly increasing".into(),
            ));
        }
        Ok(Self { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// `count` evenly spaced radii from `diameter / count` to `diameter`.
pub fn radius_grid(dist: &DistanceMatrix, count: usize) -> Result<RadiusGrid> {
    if count < 3 {
        return Err(Error::InvalidArgument(format!(
            "radius grid needs at least 3 points, got {count}"
        )));
    }
    let diam = diameter(dist);
    if diam <= 0.0 {
        return Err(Error::ZeroDiameter(dist.len()));
    }
    let step = diam / count as f64;
    let mut radii: Vec<f64> = (1..=count).map(|k| step * k as f64).collect();
    radii[count - 1] = diam;
    RadiusGrid::new(radii)
}

/// `V̂(r)`: mean over `subsamples` of `‖exp(-t L_{r,S_i}) - exp(-t L_{r,S})‖_HS`.
///
/// Terms are accumulated in subsample order so the result is reproducible.
pub fn variance_estimate(
    dist: &DistanceMatrix,
    family: KernelFamily,
    r: f64,
    t: f64,
    subsamples: &[SubsampleSet],
) -> Result<f64> {
    if subsamples.is_empty() {
        return Err(Error::InvalidArgument(
            "variance estimate needs at least one subsample".into(),
        ));
    }
    let spec = KernelSpec::for_distances(family, r, dist)?;
    let weights = evaluate_kernel_matrix(&spec, dist);
    let full = heat_operator(
        &build_laplacian(&weights, &SubsampleSet::full(dist.len()))?,
        t,
    )?;
    let mut sum = 0.0;
    for s in subsamples {
        let sub = if s.is_full() {
            full.matrix().clone()
        } else {
            heat_operator(&build_laplacian(&weights, s)?, t)?.into_matrix()
        };
        sum += hs_distance(&sub, full.matrix())?;
    }
    Ok(sum / subsamples.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCurve {
    pub grid: RadiusGrid,
    pub values: Vec<f64>,
    pub subsample_count: usize,
    pub fraction: f64,
    pub seed: u64,
}

impl VarianceCurve {
    pub fn radii(&self) -> &[f64] {
        self.grid.radii()
    }

    /// `r,v_hat` CSV with a header row and shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,v_hat\n");
        for (r, v) in self.grid.radii().iter().zip(&self.values) {
            out.push_str(&format!("{r},{v}\n"));
        }
        out
    }
}

/// `V̂` at every grid radius, sharing one draw of `count` subsamples.
///
/// Radii are evaluated in parallel on the current rayon pool.
pub fn variance_curve(
    dist: &DistanceMatrix,
    family: KernelFamily,
    grid: &RadiusGrid,
    t: f64,
    count: usize,
    fraction: f64,
    seed: u64,
) -> Result<VarianceCurve> {
    let subsamples = draw_subsamples(dist.len(), count, fraction, seed)?;
    let values = variance_values(dist, family, grid, t, &subsamples)?;
    Ok(VarianceCurve {
        grid: grid.clone(),
        values,
        subsample_count: count,
        fraction,
        seed,
    })
}

/// `V̂` at every grid radius for explicitly given subsamples.
pub fn variance_values(
    dist: &DistanceMatrix,
    family: KernelFamily,
    grid: &RadiusGrid,
    t: f64,
    subsamples: &[SubsampleSet],
) -> Result<Vec<f64>> {
    grid.radii()
        .par_iter()
        .map(|&r| variance_estimate(dist, family, r, t, subsamples))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionRule {
    /// Largest interior index whose centered slope is below the chord slope.
    #[default]
    Elbow,
    /// Argmax of the curve, smallest index on ties.
    Max,
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionRule::Elbow => "elbow",
            SelectionRule::Max => "max",
        })
    }
}

impl FromStr for SelectionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elbow" | "auto" => Ok(SelectionRule::Elbow),
            "max" => Ok(SelectionRule::Max),
            other => Err(Error::InvalidArgument(format!(
                "unknown selection rule '{other}'"
            ))),
        }
    }
}

/// Index chosen on a curve; `index` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    /// The elbow rule found no qualifying index and fell back to the first
    /// interior point.
    pub fallback: bool,
}

/// Applies `rule` to raw curve values.
pub fn select_index(values: &[f64], rule: SelectionRule) -> Result<Selection> {
    let len = values.len();
    if len < 3 {
        return Err(Error::InvalidArgument(format!(
            "bandwidth selection needs at least 3 curve points, got {len}"
        )));
    }
    match rule {
        SelectionRule::Elbow => {
            let chord = (values[len - 1] - values[0]) / (len - 1) as f64;
            let found = (1..len - 1)
                .rev()
                .find(|&i| (values[i + 1] - values[i - 1]) / 2.0 < chord);
            Ok(match found {
                Some(index) => Selection {
                    index,
                    fallback: false,
                },
                None => Selection {
                    index: 1,
                    fallback: true,
                },
            })
        }
        SelectionRule::Max => {
            let mut index = 0;
            for (i, &v) in values.iter().enumerate() {
                if v > values[index] {
                    index = i;
                }
            }
            Ok(Selection {
                index,
                fallback: false,
            })
        }
    }
}

/// Selected bandwidth on a variance curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthChoice {
    pub radius: f64,
    pub index: usize,
    pub fallback: bool,
}

pub fn select_bandwidth(curve: &VarianceCurve, rule: SelectionRule) -> Result<BandwidthChoice> {
    let selection = select_index(&curve.values, rule)?;
    Ok(BandwidthChoice {
        radius: curve.grid.radii()[selection.index],
        index: selection.index,
        fallback: selection.fallback,
    })
}

/// Heat operator on the whole sample, for callers that need it at one radius.
pub fn full_heat_matrix(
    dist: &DistanceMatrix,
    family: KernelFamily,
    r: f64,
    t: f64,
) -> Result<DMatrix<f64>> {
    let spec = KernelSpec::for_distances(family, r, dist)?;
    let weights = evaluate_kernel_matrix(&spec, dist);
    Ok(heat_operator(
        &build_laplacian(&weights, &SubsampleSet::full(dist.len()))?,
        t,
    )?
    .into_matrix())
}
