//! Finite search grids for supremum estimates.
//!
//! Suprema over all of R^d are estimated on small structured grids and always
//! reported as lower bounds; the grids exploit that every potential here is
//! radial per tensor block, so axis points along each block's first coordinate
//! cover the orbit of the symmetry group.

use serde::{Deserialize, Serialize};

use crate::kernel::SpacePoint;
use crate::potential::Potential;

/// A spatial/time search grid for supremum estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Axis radii placed along the first coordinate of each tensor block.
    pub radii: Vec<f64>,
    /// Number of time subdivisions used by running-sup scans over (0, t].
    pub time_subdivisions: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radii: vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0],
            time_subdivisions: 6,
        }
    }
}

impl GridSpec {
    pub fn with_radii(radii: Vec<f64>) -> Self {
        GridSpec {
            radii,
            ..GridSpec::default()
        }
    }

    /// One-line description embedded in supremum reports.
    pub fn describe(&self) -> String {
        format!(
            "axis radii {:?} per block; pairs (p,p), (p,-p), (p,0); {} time subdivisions",
            self.radii, self.time_subdivisions
        )
    }

    /// Distinct (offset, len) coordinate blocks appearing across the terms.
    pub fn block_layout(v: &Potential) -> Vec<(usize, usize)> {
        let mut blocks = Vec::new();
        for term in &v.terms {
            let mut offset = 0;
            for f in &term.factors {
                if !blocks.contains(&(offset, f.dim)) {
                    blocks.push((offset, f.dim));
                }
                offset += f.dim;
            }
        }
        blocks.sort();
        blocks
    }

    /// Endpoint pairs (x, y) to scan: the origin pair, and for each block and
    /// each nonzero radius the coincident, antipodal, and to-origin pairs.
    pub fn pairs(&self, v: &Potential) -> Vec<(SpacePoint, SpacePoint)> {
        let d = v.dim;
        let origin = SpacePoint::origin(d);
        let mut out = vec![(origin.clone(), origin.clone())];
        for (offset, _) in Self::block_layout(v) {
            for &r in &self.radii {
                if r == 0.0 {
                    continue;
                }
                let mut c = vec![0.0; d];
                c[offset] = r;
                let p = SpacePoint(c.clone());
                c[offset] = -r;
                let q = SpacePoint(c);
                out.push((p.clone(), p.clone()));
                out.push((p.clone(), q));
                out.push((p, origin.clone()));
            }
        }
        out
    }

    /// Single evaluation points: the origin plus the positive axis points of
    /// every block (the potentials here are radial per block, so signs are
    /// redundant for single-point scans).
    pub fn points(&self, v: &Potential) -> Vec<SpacePoint> {
        let d = v.dim;
        let mut out = vec![SpacePoint::origin(d)];
        for (offset, _) in Self::block_layout(v) {
            for &r in &self.radii {
                if r == 0.0 {
                    continue;
                }
                let mut c = vec![0.0; d];
                c[offset] = r;
                out.push(SpacePoint(c));
            }
        }
        out
    }

    /// Time grid t k / n, k = 1..n.
    pub fn times(&self, t: f64) -> Vec<f64> {
        let n = self.time_subdivisions.max(1);
        (1..=n).map(|k| t * k as f64 / n as f64).collect()
    }
}
