//! Small special-function layer: gamma/beta wrappers, sphere constants,
//! and the exponentially scaled Bessel I0 used in off-axis radial reduction.

use std::f64::consts::PI;

pub use statrs::function::gamma::{gamma, ln_gamma};

/// B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b), computed through log-gamma.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Surface area of the unit sphere in R^m (m >= 1): 2 pi^{m/2} / Gamma(m/2).
pub fn unit_sphere_area(m: usize) -> f64 {
    2.0 * PI.powf(m as f64 / 2.0) / gamma(m as f64 / 2.0)
}

/// Volume of the unit ball in R^m.
pub fn unit_ball_volume(m: usize) -> f64 {
    unit_sphere_area(m) / m as f64
}

/// Exponentially scaled modified Bessel function e^{-|x|} I_0(x).
///
/// Abramowitz & Stegun 9.8.1 (|x| < 3.75) and 9.8.2 (|x| >= 3.75);
/// absolute error below 2e-7, which is ample for the Gaussian angular
/// averages it feeds (they carry their own quadrature tolerance).
pub fn i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 3.75 {
        let t = x / 3.75;
        let t2 = t * t;
        let i0 = 1.0
            + t2 * (3.515_622_9
                + t2 * (3.089_942_4
                    + t2 * (1.206_749_2
                        + t2 * (0.265_973_2 + t2 * (0.036_076_8 + t2 * 0.004_581_3)))));
        i0 * (-ax).exp()
    } else {
        let t = 3.75 / ax;
        let p = 0.398_942_28
            + t * (0.013_285_92
                + t * (0.002_253_19
                    + t * (-0.001_575_65
                        + t * (0.009_162_81
                            + t * (-0.020_577_06
                                + t * (0.026_355_37 + t * (-0.016_476_33 + t * 0.003_923_77)))))));
        p / ax.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_half_half_is_pi() {
        assert!((beta(0.5, 0.5) - PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-12);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-12);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn i0_scaled_small_and_large() {
        // I0(0) = 1.
        assert!((i0_scaled(0.0) - 1.0).abs() < 1e-7);
        // I0(1) = 1.2660658..., scaled by e^{-1}.
        assert!((i0_scaled(1.0) - 1.266_065_877_752_008 * (-1.0f64).exp()).abs() < 1e-7);
        // Asymptotic regime: e^{-x} I0(x) ~ 1/sqrt(2 pi x).
        let x = 50.0;
        let asym = 1.0 / (2.0 * PI * x).sqrt();
        assert!((i0_scaled(x) - asym).abs() / asym < 5e-3);
        // Even function.
        assert_eq!(i0_scaled(-2.0), i0_scaled(2.0));
    }
}
