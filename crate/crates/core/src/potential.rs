//! Potentials as finite sums of tensor-product terms over dimension blocks,
//! with closed-form L^p norms where the radial integral is elementary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::SpacePoint;
use crate::quad::{self, QuadConfig};
use crate::special::{unit_ball_volume, unit_sphere_area};

/// Radial profile of one tensor factor. Profiles are nonnegative; the sign of
/// a term lives on its coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileKind {
    /// |u|^{-beta} on |u| < radius, zero outside.
    PowerIndicator { beta: f64, radius: f64 },
    /// Indicator of the centred ball.
    IndicatorBall { radius: f64 },
    /// (|u| + shift)^{-exponent}.
    SmoothDecay { exponent: f64, shift: f64 },
    /// Constant value on the whole block.
    Constant { value: f64 },
}

/// One tensor factor: a radial profile on a block of `dim` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorProfile {
    pub dim: usize,
    pub profile: ProfileKind,
}

impl FactorProfile {
    pub fn new(dim: usize, profile: ProfileKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("factor block dimension must be >= 1".into()));
        }
        match &profile {
            ProfileKind::PowerIndicator { beta, radius } => {
                if *beta < 0.0 || !(*radius > 0.0) {
                    return Err(Error::Domain(
                        "power_indicator needs beta >= 0 and radius > 0".into(),
                    ));
                }
            }
            ProfileKind::IndicatorBall { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Domain("indicator_ball needs radius > 0".into()));
                }
            }
            ProfileKind::SmoothDecay { exponent, shift } => {
                if !(*exponent > 0.0) || !(*shift > 0.0) {
                    return Err(Error::Domain(
                        "smooth_decay needs exponent > 0 and shift > 0".into(),
                    ));
                }
            }
            ProfileKind::Constant { value } => {
                if *value < 0.0 {
                    return Err(Error::Domain(
                        "constant profile must be nonnegative; put the sign on the coefficient"
                            .into(),
                    ));
                }
            }
        }
        Ok(FactorProfile { dim, profile })
    }

    /// Profile value at radius r >= 0. Returns +inf on the singular set.
    pub fn value_at_radius(&self, r: f64) -> f64 {
        match &self.profile {
            ProfileKind::PowerIndicator { beta, radius } => {
                if r < *radius {
                    if r == 0.0 && *beta > 0.0 {
                        f64::INFINITY
                    } else {
                        r.powf(-beta)
                    }
                } else {
                    0.0
                }
            }
            ProfileKind::IndicatorBall { radius } => {
                if r < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileKind::SmoothDecay { exponent, shift } => (r + shift).powf(-exponent),
            ProfileKind::Constant { value } => *value,
        }
    }

    /// Radius beyond which the profile vanishes identically, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.profile {
            ProfileKind::PowerIndicator { radius, .. } => Some(*radius),
            ProfileKind::IndicatorBall { radius } => Some(*radius),
            ProfileKind::SmoothDecay { .. } => None,
            ProfileKind::Constant { value } => {
                if *value == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
        }
    }

    /// Power of the singularity at the origin (0 when bounded there).
    pub fn singular_exponent(&self) -> f64 {
        match &self.profile {
            ProfileKind::PowerIndicator { beta, .. } => *beta,
            _ => 0.0,
        }
    }

    /// Radii at which quadrature panels must break: the origin when singular
    /// and any jump of the indicator boundary.
    pub fn break_radii(&self) -> Vec<f64> {
        match &self.profile {
            ProfileKind::PowerIndicator { beta, radius } => {
                if *beta > 0.0 {
                    vec![0.0, *radius]
                } else {
                    vec![*radius]
                }
            }
            ProfileKind::IndicatorBall { radius } => vec![*radius],
            _ => vec![],
        }
    }

    /// Exact L^p norm on R^dim, infinity when divergent.
    ///
    /// power_indicator, indicator_ball and constant are closed-form; for
    /// smooth_decay the radial integral is done numerically at 1e-10 relative
    /// tolerance (norms feed bound constants, so they must not carry
    /// full-dimensional quadrature error).
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
        }
        let m = self.dim as f64;
        if p.is_infinite() {
            return Ok(match &self.profile {
                ProfileKind::PowerIndicator { beta, .. } => {
                    if *beta > 0.0 {
                        f64::INFINITY
                    } else {
                        1.0
                    }
                }
                ProfileKind::IndicatorBall { .. } => 1.0,
                ProfileKind::SmoothDecay { exponent, shift } => shift.powf(-exponent),
                ProfileKind::Constant { value } => *value,
            });
        }
        let area = unit_sphere_area(self.dim);
        match &self.profile {
            ProfileKind::PowerIndicator { beta, radius } => {
                let expo = m - beta * p;
                if expo <= 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok((area * radius.powf(expo) / expo).powf(1.0 / p))
                }
            }
            ProfileKind::IndicatorBall { radius } => {
                Ok((unit_ball_volume(self.dim) * radius.powf(m)).powf(1.0 / p))
            }
            ProfileKind::SmoothDecay { exponent, shift } => {
                let gp = exponent * p;
                if gp <= m {
                    return Ok(f64::INFINITY);
                }
                let cfg = QuadConfig {
                    rel_tol: 1e-10,
                    ..QuadConfig::default()
                };
                // Split at r = shift; map the tail to u = 1/r.
                let head =
                    quad::gauss_kronrod(&|r: f64| r.powf(m - 1.0) * (r + shift).powf(-gp), 0.0, *shift, &cfg);
                let tail = quad::tanh_sinh(
                    &|u: f64| u.powf(gp - m - 1.0) * (1.0 + shift * u).powf(-gp),
                    0.0,
                    1.0 / shift,
                    &cfg,
                );
                Ok((area * (head.value + tail.value)).powf(1.0 / p))
            }
            ProfileKind::Constant { value } => {
                if *value == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(f64::INFINITY)
                }
            }
        }
    }
}

/// Reproducibility note attached to constructed example potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialMeta {
    pub example: String,
    pub params: String,
    /// Grid/estimation provenance for data baked into the potential
    /// (e.g. grid-estimated suprema), never silently treated as exact.
    pub estimation_note: Option<String>,
}

/// One tensor-product term: coeff * prod_k profile_k(x_block_k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub factors: Vec<FactorProfile>,
}

impl Term {
    pub fn block_dim_sum(&self) -> usize {
        self.factors.iter().map(|f| f.dim).sum()
    }
}

/// A potential V as a finite sum of tensor-product terms on R^dim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub dim: usize,
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<PotentialMeta>,
}

impl Potential {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("potential dimension must be >= 1".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.block_dim_sum() != dim {
                return Err(Error::Dimension(format!(
                    "term {i}: factor block dimensions sum to {}, expected {dim}",
                    t.block_dim_sum()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Domain(format!("term {i}: coefficient must be finite")));
            }
        }
        Ok(Potential {
            dim,
            terms,
            meta: None,
        })
    }

    /// The zero potential on R^dim.
    pub fn zero(dim: usize) -> Self {
        Potential {
            dim,
            terms: Vec::new(),
            meta: None,
        }
    }

    /// Constant potential V = value on R^dim.
    pub fn constant(dim: usize, value: f64) -> Self {
        Potential::new(
            dim,
            vec![Term {
                coeff: value,
                factors: vec![FactorProfile::new(dim, ProfileKind::Constant { value: 1.0 }).unwrap()],
            }],
        )
        .unwrap()
    }

    /// coeff * 1_{|x| < radius} on R^dim.
    pub fn ball_indicator(dim: usize, radius: f64, coeff: f64) -> Result<Self> {
        Potential::new(
            dim,
            vec![Term {
                coeff,
                factors: vec![FactorProfile::new(dim, ProfileKind::IndicatorBall { radius })?],
            }],
        )
    }

    /// Pointwise value; +-inf only on the (measure-zero) singular set.
    pub fn eval(&self, x: &SpacePoint) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "point has dimension {}, potential has {}",
                x.dim(),
                self.dim
            )));
        }
        let mut total = 0.0;
        for term in &self.terms {
            let mut prod = term.coeff;
            let mut offset = 0;
            for factor in &term.factors {
                let r = x.0[offset..offset + factor.dim]
                    .iter()
                    .map(|c| c * c)
                    .sum::<f64>()
                    .sqrt();
                let v = factor.value_at_radius(r);
                if v == 0.0 {
                    prod = 0.0;
                    break;
                }
                prod *= v;
                offset += factor.dim;
            }
            total += prod;
        }
        Ok(total)
    }

    /// max(V, 0) pointwise.
    pub fn eval_pos(&self, x: &SpacePoint) -> Result<f64> {
        Ok(self.eval(x)?.max(0.0))
    }

    /// max(-V, 0) pointwise.
    pub fn eval_neg(&self, x: &SpacePoint) -> Result<f64> {
        Ok((-self.eval(x)?).max(0.0))
    }

    fn has_sign_mix(&self) -> bool {
        let pos = self.terms.iter().any(|t| t.coeff > 0.0);
        let neg = self.terms.iter().any(|t| t.coeff < 0.0);
        pos && neg
    }

    /// |V| as a tensor-sum potential: per-term absolute coefficients.
    ///
    /// Exact when the terms do not mix signs (all examples here); refused for
    /// sign-mixed sums, where |sum| is not itself a tensor sum.
    pub fn abs(&self) -> Result<Potential> {
        if self.has_sign_mix() {
            return Err(Error::Unsupported(
                "|V| of a sign-mixed tensor sum is not representable term by term".into(),
            ));
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = t.coeff.abs();
        }
        Ok(out)
    }

    /// V^+ as a potential (terms with positive coefficients).
    pub fn positive_part(&self) -> Result<Potential> {
        if self.has_sign_mix() {
            return Err(Error::Unsupported(
                "V^+ of a sign-mixed tensor sum is not representable term by term".into(),
            ));
        }
        let mut out = self.clone();
        out.terms.retain(|t| t.coeff > 0.0);
        Ok(out)
    }

    /// V^- as a potential (negated terms with negative coefficients).
    pub fn negative_part(&self) -> Result<Potential> {
        if self.has_sign_mix() {
            return Err(Error::Unsupported(
                "V^- of a sign-mixed tensor sum is not representable term by term".into(),
            ));
        }
        let mut out = self.clone();
        out.terms.retain(|t| t.coeff < 0.0);
        for t in &mut out.terms {
            t.coeff = -t.coeff;
        }
        Ok(out)
    }

    /// c * |V| as a potential.
    pub fn scale_shift(&self, c: f64) -> Result<Potential> {
        let mut out = self.abs()?;
        for t in &mut out.terms {
            t.coeff *= c;
        }
        if c == 0.0 {
            out.terms.clear();
        }
        Ok(out)
    }

    /// Upper bound on ||V||_p: sum over terms of |coeff| prod ||profile||_p.
    /// Exact for a single term (tensor multiplicativity of L^p norms);
    /// a triangle-inequality bound otherwise. The flag reports exactness.
    pub fn lp_norm_bound(&self, p: f64) -> Result<(f64, bool)> {
        let mut total = 0.0;
        for term in &self.terms {
            let mut prod = term.coeff.abs();
            for f in &term.factors {
                prod *= f.lp_norm(p)?;
                if prod.is_infinite() {
                    return Ok((f64::INFINITY, self.terms.len() == 1));
                }
            }
            total += prod;
        }
        Ok((total, self.terms.len() <= 1))
    }
}

// ---------------------------------------------------------------------------
// Named example potentials (the constructions that need only profile algebra;
// the series-weighted one lives in `examples` because it consumes bridge
// functionals for its weights).
// ---------------------------------------------------------------------------

/// -|x_1|^{-1/p} 1_{|x_1|<1} 1_{|x_2|<1} on R^d with a 1 + (d-1) split.
pub fn ld2_potential(p: f64, d: usize) -> Result<Potential> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("ld2 needs 1 < p < inf, got {p}")));
    }
    if d < 3 {
        return Err(Error::Domain(format!("ld2 needs d >= 3, got {d}")));
    }
    let mut pot = Potential::new(
        d,
        vec![Term {
            coeff: -1.0,
            factors: vec![
                FactorProfile::new(
                    1,
                    ProfileKind::PowerIndicator {
                        beta: 1.0 / p,
                        radius: 1.0,
                    },
                )?,
                FactorProfile::new(d - 1, ProfileKind::IndicatorBall { radius: 1.0 })?,
            ],
        }],
    )?;
    pot.meta = Some(PotentialMeta {
        example: "ld2".into(),
        params: format!("p={p}, d={d}"),
        estimation_note: None,
    });
    Ok(pot)
}

/// -(|x_2|+1)^{-3} on R^d with the radial factor on a 3-dimensional block and
/// an inert block of dimension d-3; at d = 3 the inert block is absent.
pub fn czwarty_potential(d: usize) -> Result<Potential> {
    if d < 3 {
        return Err(Error::Domain(format!("czwarty needs d >= 3, got {d}")));
    }
    let mut factors = Vec::new();
    if d > 3 {
        factors.push(FactorProfile::new(d - 3, ProfileKind::Constant { value: 1.0 })?);
    }
    factors.push(FactorProfile::new(
        3,
        ProfileKind::SmoothDecay {
            exponent: 3.0,
            shift: 1.0,
        },
    )?);
    let mut pot = Potential::new(d, vec![Term { coeff: -1.0, factors }])?;
    pot.meta = Some(PotentialMeta {
        example: "czwarty".into(),
        params: format!("d={d}"),
        estimation_note: None,
    });
    Ok(pot)
}

/// One 3-dimensional factor of the nfs2 construction:
/// -(1-eps)/2 |x|^{-1-eps} 1_{|x|<1}.
pub fn nfs2_factor(epsilon: f64) -> Result<Potential> {
    check_eps(epsilon)?;
    let mut pot = Potential::new(
        3,
        vec![Term {
            coeff: -(1.0 - epsilon) / 2.0,
            factors: vec![FactorProfile::new(
                3,
                ProfileKind::PowerIndicator {
                    beta: 1.0 + epsilon,
                    radius: 1.0,
                },
            )?],
        }],
    )?;
    pot.meta = Some(PotentialMeta {
        example: "nfs2_factor".into(),
        params: format!("epsilon={epsilon}"),
        estimation_note: None,
    });
    Ok(pot)
}

/// The full tensor product V(x_1, x_2) = V_1(x_1) V_2(x_2) on R^6; the two
/// negative factors make the product nonnegative.
pub fn nfs2_product(epsilon: f64) -> Result<Potential> {
    check_eps(epsilon)?;
    let half = (1.0 - epsilon) / 2.0;
    let factor = || {
        FactorProfile::new(
            3,
            ProfileKind::PowerIndicator {
                beta: 1.0 + epsilon,
                radius: 1.0,
            },
        )
    };
    let mut pot = Potential::new(
        6,
        vec![Term {
            coeff: half * half,
            factors: vec![factor()?, factor()?],
        }],
    )?;
    pot.meta = Some(PotentialMeta {
        example: "nfs2".into(),
        params: format!("epsilon={epsilon}"),
        estimation_note: None,
    });
    Ok(pot)
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("nfs2 needs epsilon in [0,1), got {epsilon}")));
    }
    Ok(())
}
