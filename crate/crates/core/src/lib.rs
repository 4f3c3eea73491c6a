//! Numerical toolkit for Schrodinger perturbations of the Gauss-Weierstrass
//! kernel: bridge potential functionals, tensor-product potentials, Newtonian
//! potentials, a perturbation-series solver for the perturbed kernel ratio
//! G/g, and a Brownian-bridge Monte Carlo cross-check.

pub mod bridge;
pub mod error;
pub mod examples;
pub mod feynman_kac;
pub mod grid;
pub mod kernel;
pub mod newtonian;
pub mod potential;
pub mod quad;
pub mod radial;
pub mod schrodinger;
pub mod special;

pub use bridge::{DivergencePolicy, SValue, SupEstimate};
pub use error::{Error, Result};
pub use feynman_kac::{McConfig, McEstimate};
pub use grid::GridSpec;
pub use kernel::{BlockSplit, BridgeSpec, SpacePoint};
pub use potential::{FactorProfile, Potential, ProfileKind};
pub use quad::QuadConfig;
