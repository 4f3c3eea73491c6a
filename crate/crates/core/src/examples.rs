//! Composite example potentials whose construction consumes bridge
//! functionals: the weighted series of sharpening power singularities, its sum
//! with the heavy-tailed radial example, and the nonnegative rescaling of that
//! sum.  The plain tensor examples (`ld2`, `czwarty`, `nfs2`) live in
//! [`crate::potential`] because they need only profile algebra.
//!
//! The weights and rescalings here depend on supremum estimates of the bridge
//! functional S over finite grids.  Those estimates are lower bounds of the
//! true suprema, so the resulting weights are biased slightly high; every
//! constructor records the grid it used in the potential's metadata rather
//! than presenting the numbers as exact.

use crate::bridge::{big_f_sup, SupEstimate};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::potential::{
    czwarty_potential, FactorProfile, Potential, PotentialMeta, ProfileKind, Term,
};
use crate::quad::QuadConfig;

/// Time horizon used when a weight needs sup_{t>0} S: the components are
/// compactly supported or decaying, so S(.,t,x,y) is close to its t -> inf
/// limit well before this horizon, and the grid scan stays cheap.
const WEIGHT_HORIZON: f64 = 6.0;

/// One unweighted component |x_1|^{-1+1/n} 1_{|x_1|<1} 1_{|x_2|<1} of the
/// weighted series, as a nonnegative potential on R^d (signs are applied by
/// the series weights).
pub fn series_component(n: usize, d: usize) -> Result<Potential> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "series component index must be >= 2, got {n}"
        )));
    }
    if d < 3 {
        return Err(Error::Domain(format!(
            "series component needs d >= 3, got {d}"
        )));
    }
    Potential::new(
        d,
        vec![Term {
            coeff: 1.0,
            factors: vec![
                FactorProfile::new(
                    1,
                    ProfileKind::PowerIndicator {
                        beta: 1.0 - 1.0 / n as f64,
                        radius: 1.0,
                    },
                )?,
                FactorProfile::new(d - 1, ProfileKind::IndicatorBall { radius: 1.0 })?,
            ],
        }],
    )
}

/// The truncated weighted series
/// V = -sum_{n=2}^{n_last} (1 / (n^2 a_n)) |x_1|^{-1+1/n} 1_{|x_1|<1} 1_{|x_2|<1}
/// with a_n the grid-estimated supremum of S for the n-th component.
///
/// Each singular exponent -1 + 1/n keeps the component barely integrable on
/// its 1-D block, but the n-th power of the n-th component is not: the sum
/// leaves every local L^p space with p > 1 once n_last >= ceil(p/(p-1)),
/// while the weights keep sup S(V) below sum 1/n^2.  The a_n are lower-bound
/// grid estimates, so the weights (and hence sup S of the result) are biased
/// slightly high; the grid is recorded in the metadata.
pub fn drugi_potential(
    d: usize,
    n_last: usize,
    grid: &GridSpec,
    cfg: &QuadConfig,
) -> Result<Potential> {
    if n_last < 2 {
        return Err(Error::Domain(format!(
            "weighted series needs n_last >= 2, got {n_last}"
        )));
    }
    let mut terms = Vec::new();
    let mut notes = Vec::new();
    for n in 2..=n_last {
        let component = series_component(n, d)?;
        let a_n = component_weight_sup(&component, grid, cfg)?;
        let weight = 1.0 / ((n * n) as f64 * a_n.value);
        let mut term = component.terms.into_iter().next().expect("one term");
        term.coeff = -weight;
        terms.push(term);
        notes.push(format!("a_{n}={:.6e}", a_n.value));
    }
    let mut pot = Potential::new(d, terms)?;
    pot.meta = Some(PotentialMeta {
        example: "drugi".into(),
        params: format!("d={d}, n_last={n_last}"),
        estimation_note: Some(format!(
            "weights 1/(n^2 a_n) use grid-estimated suprema (lower bounds, horizon t={WEIGHT_HORIZON}): {}; grid: {}",
            notes.join(", "),
            grid.describe()
        )),
    });
    Ok(pot)
}

fn component_weight_sup(
    component: &Potential,
    grid: &GridSpec,
    cfg: &QuadConfig,
) -> Result<SupEstimate> {
    let est = big_f_sup(component, WEIGHT_HORIZON, grid, cfg)?;
    if est.divergent || !(est.value > 0.0) || !est.value.is_finite() {
        return Err(Error::Hypothesis(format!(
            "component supremum estimate unusable as a weight: value {}, divergent {}",
            est.value, est.divergent
        )));
    }
    Ok(est)
}

/// Sum of the truncated weighted series and the heavy-tailed radial example:
/// a single nonpositive potential that is neither in L^1(R^d) (the decaying
/// tail) nor in any local L^p, p > 1 (the sharpening singularities), yet has
/// finite sup S.
pub fn ce_potential(d: usize, n_last: usize, grid: &GridSpec, cfg: &QuadConfig) -> Result<Potential> {
    let series = drugi_potential(d, n_last, grid, cfg)?;
    let tail = czwarty_potential(d)?;
    let series_note = series
        .meta
        .as_ref()
        .and_then(|m| m.estimation_note.clone());
    let mut terms = series.terms;
    terms.extend(tail.terms);
    let mut pot = Potential::new(d, terms)?;
    pot.meta = Some(PotentialMeta {
        example: "ce".into(),
        params: format!("d={d}, n_last={n_last}"),
        estimation_note: series_note,
    });
    Ok(pot)
}

/// The nonnegative rescaling |V|/(M+1) of a nonpositive potential V together
/// with the estimate M of sup S(|V|) used to build it.
#[derive(Debug, Clone)]
pub struct NonnegRescaling {
    pub potential: Potential,
    /// Grid estimate of M = sup_{t>0,x,y} S(|V|,t,x,y) (a lower bound).
    pub m_estimate: f64,
    /// The summability certificate M/(M+1) < 1 of the rescaled potential.
    pub eta: f64,
}

/// Nonnegative variant of [`ce_potential`]: with M the grid-estimated
/// supremum of S(|V|), the rescaling |V|/(M+1) is nonnegative, inherits the
/// divergent norms of V, and has sup S = M/(M+1) < 1, so the series
/// certificate applies with any horizon.
pub fn ce_nonneg_potential(
    d: usize,
    n_last: usize,
    grid: &GridSpec,
    cfg: &QuadConfig,
) -> Result<NonnegRescaling> {
    let base = ce_potential(d, n_last, grid, cfg)?;
    let m_est = big_f_sup(&base.abs()?, WEIGHT_HORIZON, grid, cfg)?;
    if m_est.divergent || !m_est.value.is_finite() {
        return Err(Error::Hypothesis(format!(
            "supremum estimate for the rescaling is unusable: value {}, divergent {}",
            m_est.value, m_est.divergent
        )));
    }
    let m = m_est.value;
    let mut pot = base.scale_shift(1.0 / (m + 1.0))?;
    let base_note = base.meta.as_ref().and_then(|x| x.estimation_note.clone());
    pot.meta = Some(PotentialMeta {
        example: "ce_nonneg".into(),
        params: format!("d={d}, n_last={n_last}"),
        estimation_note: Some(format!(
            "M={m:.6e} grid-estimated (lower bound, horizon t={WEIGHT_HORIZON}); {}",
            base_note.unwrap_or_default()
        )),
    });
    Ok(NonnegRescaling {
        potential: pot,
        m_estimate: m,
        eta: m / (m + 1.0),
    })
}
