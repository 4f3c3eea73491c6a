//! Gauss-Weierstrass kernel, bridge densities and moments, and the block
//! factorization identities the rest of the crate leans on.
//!
//! All kernels are evaluated in log space internally and exponentiated at the
//! boundary; ratios of far-apart Gaussians appear everywhere downstream.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of R^d with runtime dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacePoint(pub Vec<f64>);

impl SpacePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Dimension("point must have dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("point coordinates must be finite".into()));
        }
        Ok(SpacePoint(coords))
    }

    pub fn origin(dim: usize) -> Self {
        SpacePoint(vec![0.0; dim])
    }

    /// Point r * e1 in R^dim.
    pub fn axis(dim: usize, r: f64) -> Self {
        let mut c = vec![0.0; dim];
        c[0] = r;
        SpacePoint(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist_sq(&self, other: &SpacePoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Slice out the coordinate block [offset, offset + len).
    pub fn block(&self, offset: usize, len: usize) -> SpacePoint {
        SpacePoint(self.0[offset..offset + len].to_vec())
    }
}

/// Dimensions of the two factor blocks of a tensor split d = d1 + d2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSplit {
    pub d1: usize,
    pub d2: usize,
}

impl BlockSplit {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::Dimension("block dimensions must be positive".into()));
        }
        Ok(BlockSplit { d1, d2 })
    }

    pub fn total(&self) -> usize {
        self.d1 + self.d2
    }
}

/// A bridge measure: paths pinned at `x` at time 0 and `y` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeSpec {
    pub t: f64,
    pub x: SpacePoint,
    pub y: SpacePoint,
}

impl BridgeSpec {
    pub fn new(t: f64, x: SpacePoint, y: SpacePoint) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("bridge horizon t must be positive, got {t}")));
        }
        if x.dim() != y.dim() {
            return Err(Error::Dimension(format!(
                "bridge endpoints have dimensions {} and {}",
                x.dim(),
                y.dim()
            )));
        }
        Ok(BridgeSpec { t, x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    fn check_interior(&self, s: f64) -> Result<()> {
        if !(s > 0.0 && s < self.t) {
            return Err(Error::Domain(format!(
                "bridge time s = {s} outside (0, {})",
                self.t
            )));
        }
        Ok(())
    }
}

/// log of the Gauss-Weierstrass kernel on R^dim.
pub fn log_heat_kernel_dist_sq(t: f64, dist_sq: f64, dim: usize) -> f64 {
    -(dim as f64 / 2.0) * (4.0 * PI * t).ln() - dist_sq / (4.0 * t)
}

pub fn log_heat_kernel(t: f64, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("heat kernel time must be positive, got {t}")));
    }
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "heat kernel points have dimensions {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(log_heat_kernel_dist_sq(t, x.dist_sq(y), x.dim()))
}

/// g(t, x, y) = (4 pi t)^{-d/2} exp(-|y-x|^2 / (4t)).
pub fn heat_kernel(t: f64, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    Ok(log_heat_kernel(t, x, y)?.exp())
}

/// log of the bridge kernel g(s,x,z) g(t-s,z,y) / g(t,x,y).
pub fn log_bridge_density(s: f64, spec: &BridgeSpec, z: &SpacePoint) -> Result<f64> {
    spec.check_interior(s)?;
    if z.dim() != spec.dim() {
        return Err(Error::Dimension(format!(
            "bridge evaluation point has dimension {}, spec has {}",
            z.dim(),
            spec.dim()
        )));
    }
    Ok(log_heat_kernel(s, &spec.x, z)? + log_heat_kernel(spec.t - s, z, &spec.y)?
        - log_heat_kernel(spec.t, &spec.x, &spec.y)?)
}

/// Density at `z` of the bridge marginal at time `s`; integrates to 1 over z.
pub fn bridge_density(s: f64, spec: &BridgeSpec, z: &SpacePoint) -> Result<f64> {
    Ok(log_bridge_density(s, spec, z)?.exp())
}

/// Mean and per-coordinate variance of the bridge marginal at time `s`:
/// mean = ((t-s) x + s y)/t, variance = 2 s (t-s)/t.
pub fn bridge_moments(s: f64, spec: &BridgeSpec) -> Result<(SpacePoint, f64)> {
    spec.check_interior(s)?;
    let t = spec.t;
    let mean = SpacePoint(
        spec.x
            .0
            .iter()
            .zip(&spec.y.0)
            .map(|(xi, yi)| ((t - s) * xi + s * yi) / t)
            .collect(),
    );
    Ok((mean, 2.0 * s * (t - s) / t))
}

/// Bridge density as the product of the two block bridge densities of `split`.
/// Algebraically identical to `bridge_density`; exercised as a consistency
/// check of the tensor factorization.
pub fn factorized_bridge_density(
    s: f64,
    spec: &BridgeSpec,
    split: BlockSplit,
    z: &SpacePoint,
) -> Result<f64> {
    if split.total() != spec.dim() {
        return Err(Error::Dimension(format!(
            "split {}+{} inconsistent with dimension {}",
            split.d1,
            split.d2,
            spec.dim()
        )));
    }
    let spec1 = BridgeSpec::new(
        spec.t,
        spec.x.block(0, split.d1),
        spec.y.block(0, split.d1),
    )?;
    let spec2 = BridgeSpec::new(
        spec.t,
        spec.x.block(split.d1, split.d2),
        spec.y.block(split.d1, split.d2),
    )?;
    let l1 = log_bridge_density(s, &spec1, &z.block(0, split.d1))?;
    let l2 = log_bridge_density(s, &spec2, &z.block(split.d1, split.d2))?;
    Ok((l1 + l2).exp())
}

/// Sup of the bridge kernel from the exponent inequality:
/// (4 pi)^{-d/2} [(t-s)s/t]^{-d/2}.
pub fn bridge_density_sup(s: f64, t: f64, dim: usize) -> f64 {
    (4.0 * PI).powf(-(dim as f64) / 2.0) * ((t - s) * s / t).powf(-(dim as f64) / 2.0)
}
