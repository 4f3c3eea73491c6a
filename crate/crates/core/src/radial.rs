//! Integrals of radial profiles against isotropic Gaussians.
//!
//! Every spatial integral in the bridge functionals reduces to
//! int_{R^m} profile(|z|) N(z; mu, v I) dz with only |mu| entering. For m = 1
//! this is a line integral with panel splitting at the profile's singular and
//! jump radii; for m >= 2 it reduces to a radial integral against the
//! noncentral radial law, whose angular factor is closed-form for m = 3 and a
//! smooth one-dimensional quadrature otherwise. Nothing here exceeds two
//! nested one-dimensional quadratures.

use std::f64::consts::PI;

use crate::error::Result;
use crate::potential::{FactorProfile, ProfileKind};
use crate::quad::{self, QuadConfig, QuadResult};
use crate::special::{beta, unit_sphere_area};

/// Mean over the unit sphere of R^m of exp(kappa (u . e - 1)) for a unit
/// vector e, i.e. the (exponentially scaled) angular factor of the noncentral
/// radial law. kappa >= 0.
pub fn angular_average(kappa: f64, m: usize, cfg: &QuadConfig) -> f64 {
    debug_assert!(m >= 2);
    if kappa == 0.0 {
        return 1.0;
    }
    if m == 3 {
        // int_0^pi e^{kappa(cos phi - 1)} sin phi dphi / 2 = (1 - e^{-2 kappa})/(2 kappa)
        return (-(-2.0 * kappa).exp_m1()) / (2.0 * kappa);
    }
    if m == 2 {
        // (1/pi) int_0^pi e^{kappa(cos phi - 1)} dphi = e^{-kappa} I_0(kappa);
        // the polynomial I_0 approximation is good to ~2e-7 relative, which is
        // well inside the tolerances any 2-D block evaluation feeds into.
        return crate::special::i0_scaled(kappa);
    }
    let weight_norm = PI.sqrt() * crate::special::gamma((m as f64 - 1.0) / 2.0)
        / crate::special::gamma(m as f64 / 2.0);
    let exponent = (m - 2) as i32;
    let r = quad::gauss_kronrod(
        &|phi: f64| (kappa * (phi.cos() - 1.0)).exp() * phi.sin().powi(exponent),
        0.0,
        PI,
        cfg,
    );
    r.value / weight_norm
}

/// Integration breakpoints for the radial variable on [0, upper].
fn radial_breakpoints(factor: &FactorProfile, b: f64, sigma: f64, upper: f64, k: f64) -> Vec<f64> {
    let mut pts = vec![0.0, upper];
    for r in factor.break_radii() {
        pts.push(r);
    }
    for off in [-k, -3.0, -1.0, 0.0, 1.0, 3.0, k] {
        pts.push(b + off * sigma);
    }
    pts.retain(|&p| p.is_finite() && p >= 0.0 && p <= upper);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// int_{R^m} profile(|z|) N(z; mu, v I) dz with b = |mu| and v > 0.
pub fn gauss_profile_integral(
    factor: &FactorProfile,
    b: f64,
    v: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let m = factor.dim;
    if let ProfileKind::Constant { value } = factor.profile {
        // The Gaussian has unit mass; no quadrature, no error.
        return Ok(QuadResult {
            value,
            abs_err: 0.0,
            converged: true,
        });
    }
    if v < 1e-250 {
        // Delta-measure limit: the Gaussian normalization would overflow, and
        // the integral is profile(b) to far beyond any working tolerance
        // (infinite when b sits on the singular set, which callers treat as a
        // vanishing-weight endpoint value).
        return Ok(QuadResult {
            value: factor.value_at_radius(b),
            abs_err: 0.0,
            converged: true,
        });
    }
    let sigma = v.sqrt();
    let k = cfg.tail_k;
    let singular = if factor.singular_exponent() > 0.0 {
        vec![0.0]
    } else {
        vec![]
    };

    if m == 1 {
        // Line integral; the profile is even in z.
        let dens = |z: f64| (-(z - b) * (z - b) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
        let f = |z: f64| factor.value_at_radius(z.abs()) * dens(z);
        let upper = match factor.support_radius() {
            Some(r) => r.min(b + k * sigma),
            None => b + k * sigma,
        };
        let lower = match factor.support_radius() {
            Some(r) => (-r).max(b - k * sigma),
            None => b - k * sigma,
        };
        if upper <= lower {
            return Ok(QuadResult {
                value: 0.0,
                abs_err: 0.0,
                converged: true,
            });
        }
        let mut pts = vec![lower, upper];
        for r in factor.break_radii() {
            for s in [-r, r] {
                pts.push(s);
            }
        }
        for off in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            pts.push(b + off * sigma);
        }
        pts.retain(|&p| p >= lower && p <= upper && p.is_finite());
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        return Ok(quad::integrate_panels(&f, &pts, &singular, cfg));
    }

    // Radial reduction for m >= 2.
    let area = unit_sphere_area(m);
    let md = m as f64;
    let norm = area * (2.0 * PI * v).powf(-md / 2.0);
    let inner_cfg = cfg.inner();
    let f = |r: f64| {
        let kappa = r * b / v;
        let gauss = (-(r - b) * (r - b) / (2.0 * v)).exp();
        factor.value_at_radius(r)
            * norm
            * r.powf(md - 1.0)
            * gauss
            * angular_average(kappa, m, &inner_cfg)
    };
    let upper = match factor.support_radius() {
        Some(r) => r.min(b + k * sigma),
        None => b + k * sigma,
    };
    if upper <= 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            converged: true,
        });
    }
    let pts = radial_breakpoints(factor, b, sigma, upper, k);
    Ok(quad::integrate_panels(&f, &pts, &singular, cfg))
}

/// B(m) = int_0^pi sin^{m-2} phi dphi, the angular weight normalizer.
#[allow(dead_code)]
fn angular_weight_norm(m: usize) -> f64 {
    beta((m as f64 - 1.0) / 2.0, 0.5)
}
