//! One-dimensional quadrature: adaptive Gauss-Kronrod for smooth panels and
//! tanh-sinh (double exponential) for panels with endpoint singularities.
//!
//! Everything higher-dimensional in this crate reduces to chains of these two
//! routines, so they carry the error accounting for the whole library.

use serde::{Deserialize, Serialize};

/// Tolerances and truncation controls shared by all quadrature in the crate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Relative tolerance per integral.
    pub rel_tol: f64,
    /// Absolute tolerance floor.
    pub abs_tol: f64,
    /// Maximum bisection depth (Gauss-Kronrod) or refinement level budget.
    pub max_depth: u32,
    /// Domain truncation multiplier: integrate Gaussians over mean +- tail_k stddevs.
    pub tail_k: f64,
    /// Largest endpoint exponent alpha in [0,1) that a plain panel is trusted
    /// with; at or above it the tanh-sinh substitution is used.
    pub time_singularity_exponent_cap: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 40,
            tail_k: 10.0,
            time_singularity_exponent_cap: 0.0,
        }
    }
}

impl QuadConfig {
    /// A slightly loosened copy for inner integrals of nested quadrature.
    pub fn inner(&self) -> Self {
        QuadConfig {
            rel_tol: (self.rel_tol * 0.1).max(1e-13),
            ..*self
        }
    }
}

/// Outcome of a single integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub converged: bool,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult {
            value: 0.0,
            abs_err: 0.0,
            converged: true,
        }
    }

    fn merge(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            abs_err: self.abs_err + other.abs_err,
            converged: self.converged && other.converged,
        }
    }
}

// 15-point Kronrod abscissae on [-1,1] (positive half) and weights,
// with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fl, fr) = if x == 0.0 {
            let v = f(c);
            (v, 0.0)
        } else {
            (f(c - h * x), f(c + h * x))
        };
        let s = fl + fr;
        kronrod += wk * s;
        // Odd Kronrod indices are the embedded 7-point Gauss nodes
        // (the centre lands at index 7).
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (h * kronrod, (h * (kronrod - gauss)).abs())
}

/// Adaptive Gauss-Kronrod on [a, b]. Panics never; a non-converged result is
/// reported through `converged: false` with the best available estimate.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult {
    if a == b {
        return QuadResult::zero();
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
        cfg: &QuadConfig,
    ) -> QuadResult {
        let (v, e) = gk15(f, a, b);
        if !v.is_finite() || !e.is_finite() {
            // Non-finite integrand values; bisection cannot repair this, and
            // recursing on NaN error estimates never terminates.
            return QuadResult {
                value: v,
                abs_err: f64::INFINITY,
                converged: false,
            };
        }
        if e <= tol || e <= cfg.abs_tol {
            return QuadResult {
                value: v,
                abs_err: e,
                converged: true,
            };
        }
        if depth == 0 {
            return QuadResult {
                value: v,
                abs_err: e,
                converged: false,
            };
        }
        let m = 0.5 * (a + b);
        let left = rec(f, a, m, 0.5 * tol, depth - 1, cfg);
        let right = rec(f, m, b, 0.5 * tol, depth - 1, cfg);
        left.merge(right)
    }
    let (coarse, _) = gk15(f, a, b);
    let tol = (cfg.rel_tol * coarse.abs()).max(cfg.abs_tol);
    rec(f, a, b, tol, cfg.max_depth, cfg)
}

/// Tanh-sinh quadrature on the finite interval [a, b], integrand receiving
/// (x, d) with d the distance from x to the nearer endpoint.
///
/// Handles integrable endpoint singularities (x-a)^{-alpha}, alpha < 1. Nodes
/// crowd the endpoints double-exponentially; near an endpoint x itself rounds
/// to the endpoint while the true offset d stays exact, so singular integrands
/// must be written in terms of d (forming b - x by subtraction would lose the
/// contributions that matter most). Non-finite integrand values are dropped
/// (they can only occur once the weight has collapsed past any tolerance in
/// use here).
pub fn tanh_sinh_signed<F: Fn(f64, f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> QuadResult {
    if a == b {
        return QuadResult::zero();
    }
    let len = b - a;
    // Truncation of the doubly infinite trapezoid sum: at u = 5.3 the node
    // offset from the endpoint is ~e^{-320}, so even a (1-sigma)^{-alpha}
    // singularity with alpha near 1 contributes nothing representable beyond.
    let u_max = 5.3_f64;
    let eval = |u: f64| -> f64 {
        let w = std::f64::consts::FRAC_PI_2 * u.sinh();
        // sigma = (1 + tanh w)/2 and 1 - sigma, both to full precision.
        let (sigma, comp) = if w >= 0.0 {
            let e = (-2.0 * w).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = (2.0 * w).exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        let weight = len * std::f64::consts::FRAC_PI_2 * u.cosh() * 2.0 * sigma * comp;
        if weight == 0.0 {
            return 0.0;
        }
        let (x, d) = if sigma <= 0.5 {
            (a + len * sigma, len * sigma)
        } else {
            (b - len * comp, len * comp)
        };
        let v = f(x, d);
        if v.is_finite() {
            weight * v
        } else {
            0.0
        }
    };

    let mut h = 1.0_f64;
    let mut n = (u_max / h).ceil() as i64;
    let mut sum = 0.0;
    for k in -n..=n {
        sum += eval(k as f64 * h);
    }
    let mut value = h * sum;
    let mut abs_err = f64::INFINITY;
    let mut converged = false;
    let max_level = cfg.max_depth.min(12);
    for _level in 0..max_level {
        h *= 0.5;
        n = (u_max / h).ceil() as i64;
        let mut odd = 0.0;
        // New points at this level are the odd multiples of the halved step.
        let mut k = if n % 2 == 0 { -n + 1 } else { -n };
        while k <= n {
            odd += eval(k as f64 * h);
            k += 2;
        }
        let new_value = 0.5 * value + h * odd;
        abs_err = (new_value - value).abs();
        value = new_value;
        let tol = (cfg.rel_tol * value.abs()).max(cfg.abs_tol);
        if abs_err <= tol {
            converged = true;
            break;
        }
    }
    QuadResult {
        value,
        abs_err,
        converged,
    }
}

/// Tanh-sinh quadrature with a plain f(x) integrand. Accurate only when the
/// integrand's own arithmetic keeps precision near singular endpoints (e.g.
/// the singularity sits at x = 0); otherwise use [`tanh_sinh_signed`].
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult {
    tanh_sinh_signed(&|x, _| f(x), a, b, cfg)
}

/// Integrate over [points[0], points[last]] splitting at every interior point.
/// Endpoints listed in `singular` get the tanh-sinh rule on adjacent panels;
/// all other panels use adaptive Gauss-Kronrod.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    singular: &[f64],
    cfg: &QuadConfig,
) -> QuadResult {
    let mut total = QuadResult::zero();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let is_sing = |x: f64| singular.iter().any(|&s| s == x);
        let part = if is_sing(a) || is_sing(b) {
            tanh_sinh(f, a, b, cfg)
        } else {
            gauss_kronrod(f, a, b, cfg)
        };
        total = total.merge(part);
    }
    total
}
