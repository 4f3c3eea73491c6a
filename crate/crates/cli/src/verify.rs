//! The `verify-example` harness: every named example potential carries a
//! checklist (norm finiteness or divergence, supremum behaviour of S,
//! Newtonian values, certificates), reproduced here with pass/fail verdicts.

use anyhow::{anyhow, bail, Result};
use serde_json::Value;

use bridgegauss::bridge::{big_f_sup, extended_bound_a, f_sup, s_value, s_value_partial};
use bridgegauss::examples::{ce_nonneg_potential, ce_potential, drugi_potential};
use bridgegauss::kernel::BridgeSpec;
use bridgegauss::newtonian::{newtonian, potential_bound_sup};
use bridgegauss::potential::{czwarty_potential, ld2_potential, nfs2_factor, nfs2_product};
use bridgegauss::{BlockSplit, Potential, SpacePoint};

use crate::report::{num, to_clean_value};
use crate::{CmdOutput, Ctx};

struct Checklist {
    checks: Vec<Value>,
    extras: serde_json::Map<String, Value>,
}

impl Checklist {
    fn new() -> Self {
        Checklist {
            checks: Vec::new(),
            extras: serde_json::Map::new(),
        }
    }

    fn add(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(serde_json::json!({
            "name": name,
            "pass": pass,
            "detail": detail,
        }));
    }

    fn extra(&mut self, key: &str, value: Value) {
        self.extras.insert(key.into(), value);
    }

    fn finish(self) -> CmdOutput {
        let mut flags = Vec::new();
        for c in &self.checks {
            if c["pass"] != Value::Bool(true) {
                flags.push(format!("error: check failed: {}", c["name"].as_str().unwrap_or("?")));
            }
        }
        let all = flags.is_empty();
        let mut results = self.extras;
        results.insert("checks".into(), Value::Array(self.checks));
        results.insert("all_passed".into(), Value::Bool(all));
        (Value::Object(results), flags, None)
    }
}

pub fn cmd_verify_example(ctx: &Ctx, name: &str) -> Result<CmdOutput> {
    match name {
        "nfs2" => verify_nfs2(ctx),
        "ld2" => verify_ld2(ctx),
        "czwarty" => verify_czwarty(ctx),
        "drugi" => verify_drugi(ctx),
        "ce" => verify_ce(ctx),
        "ce_nonneg" => verify_ce_nonneg(ctx),
        other => bail!(
            "unknown example \"{other}\"; expected one of ld2, drugi, czwarty, nfs2, ce, ce_nonneg"
        ),
    }
}

fn origin_spec(t: f64, dim: usize) -> Result<BridgeSpec> {
    BridgeSpec::new(t, SpacePoint::origin(dim), SpacePoint::origin(dim)).map_err(|e| anyhow!("{e}"))
}

/// Two bounded 3-D factors whose product defies both scalar criteria: each
/// factor has a finite Newtonian potential (value 1/2 at the origin), but S
/// of the 6-D product diverges.
fn verify_nfs2(ctx: &Ctx) -> Result<CmdOutput> {
    let mut list = Checklist::new();
    let factor = nfs2_factor(0.0).map_err(|e| anyhow!("{e}"))?;
    let product = nfs2_product(0.0).map_err(|e| anyhow!("{e}"))?;

    let newt = newtonian(&factor, &SpacePoint::origin(3), &ctx.quad).map_err(|e| anyhow!("{e}"))?;
    list.add(
        "factor_newtonian_at_origin_is_half",
        (newt.value - 0.5).abs() <= 1e-6,
        format!("-Delta^-1|V1|(0) = {}", crate::fmt_f64(newt.value)),
    );

    let sup = big_f_sup(&factor, ctx.defaults.sup_horizon, &ctx.weight_grid, &ctx.quad)
        .map_err(|e| anyhow!("{e}"))?;
    list.add(
        "factor_sup_s_finite",
        sup.value.is_finite() && !sup.divergent,
        format!("sup S over the grid = {}", crate::fmt_f64(sup.value)),
    );

    let spec = origin_spec(1.0, 6)?;
    let sv = s_value(&product, &spec, &ctx.quad).map_err(|e| anyhow!("{e}"))?;
    list.add(
        "product_s_divergent",
        sv.divergent,
        format!("divergent flag = {}", sv.divergent),
    );

    let mut partials = Vec::new();
    let mut prev = 0.0;
    let mut monotone = true;
    for &delta in &ctx.defaults.cutoffs {
        let p = s_value_partial(&product, &spec, delta, &ctx.quad).map_err(|e| anyhow!("{e}"))?;
        monotone &= p > prev;
        prev = p;
        partials.push(serde_json::json!({"delta": delta, "value": num(p)}));
    }
    list.add(
        "product_partials_grow_without_bound",
        monotone,
        "partial values increase as the inner cutoff shrinks".into(),
    );
    list.extra("partials", Value::Array(partials));
    list.extra("newtonian_at_origin", num(newt.value));
    Ok(list.finish())
}

/// The borderline-integrability example: locally L^q only for q below the
/// singular exponent's conjugate, yet with finite sup S certified by the
/// split bound chain.
fn verify_ld2(ctx: &Ctx) -> Result<CmdOutput> {
    let mut list = Checklist::new();
    let p = 2.0;
    let v = ld2_potential(p, 3).map_err(|e| anyhow!("{e}"))?;

    let (below, _) = v.lp_norm_bound(1.5).map_err(|e| anyhow!("{e}"))?;
    let (at, _) = v.lp_norm_bound(p).map_err(|e| anyhow!("{e}"))?;
    list.add(
        "norm_finite_below_p_infinite_at_p",
        below.is_finite() && at.is_infinite(),
        format!("||V||_1.5 = {}, ||V||_2 = inf", crate::fmt_f64(below)),
    );

    // Admissible split exponents: p2 fixes p1 by the balance relation and r
    // must sit strictly between p1 and the singular exponent p.
    let (r, p2) = (1.5, 1.8);
    let split = BlockSplit::new(1, 2).map_err(|e| anyhow!("{e}"))?;
    let mut bounded = true;
    let mut rows = Vec::new();
    for t in [0.1, 1.0, 10.0] {
        let f_hat = f_sup(&v, t, &ctx.grid, &ctx.quad).map_err(|e| anyhow!("{e}"))?;
        let bound = extended_bound_a(&v, r, p2, t, split).map_err(|e| anyhow!("{e}"))?;
        bounded &= f_hat.value <= bound;
        rows.push(serde_json::json!({
            "t": t,
            "f_hat": num(f_hat.value),
            "bound": num(bound),
        }));
    }
    list.add(
        "f_hat_below_split_bound",
        bounded,
        format!("checked t in {{0.1, 1, 10}} with r = {r}, p2 = {p2}"),
    );
    list.extra("bound_table", Value::Array(rows));

    let chain = crate::diagnose_split_chain(ctx, &v, 1.0, None, None, None)?;
    let certified = chain
        .get("report")
        .and_then(|r| r.get("certified"))
        .and_then(Value::as_bool)
        .unwrap_or(false);
    list.add(
        "exponent_chain_certified",
        certified,
        "admissible 1 <= q < p1 < r found with hypotheses verified".into(),
    );
    list.extra("split_chain", chain);
    Ok(list.finish())
}

/// The integrable-nowhere-in-L1 example: bounded with a fat polynomial tail,
/// so the Newtonian potential is finite but the mass is not.
fn verify_czwarty(ctx: &Ctx) -> Result<CmdOutput> {
    let mut list = Checklist::new();
    let v = czwarty_potential(3).map_err(|e| anyhow!("{e}"))?;

    let newt = potential_bound_sup(&v, &ctx.grid, &ctx.quad).map_err(|e| anyhow!("{e}"))?;
    list.add(
        "newtonian_sup_finite",
        newt.value.is_finite(),
        format!(
            "sup -Delta^-1|V| = {} (certified at origin: {})",
            crate::fmt_f64(newt.value),
            newt.certified_at_origin
        ),
    );

    let sup = big_f_sup(&v, ctx.defaults.sup_horizon, &ctx.weight_grid, &ctx.quad)
        .map_err(|e| anyhow!("{e}"))?;
    list.add(
        "sup_s_finite",
        sup.value.is_finite() && !sup.divergent,
        format!("sup S over the grid = {}", crate::fmt_f64(sup.value)),
    );

    let (l1, _) = v.lp_norm_bound(1.0).map_err(|e| anyhow!("{e}"))?;
    list.add("l1_norm_infinite", l1.is_infinite(), "||V||_1 = inf".into());
    Ok(list.finish())
}

/// Lower-bound quadrature of the local p-th power mass of |V| on the slab
/// |x_1| in (delta, 1), |x_2| < 1: geometric midpoint cells, valid for the
/// decreasing integrand.
fn slab_power_mass(v: &Potential, p: f64, delta: f64) -> Result<f64> {
    let cells = 4000;
    let ratio = (1.0 / delta).powf(1.0 / cells as f64);
    let mut sum = 0.0;
    let mut left = delta;
    for _ in 0..cells {
        let right = left * ratio;
        let mut coords = vec![0.0; v.dim];
        coords[0] = 0.5 * (left + right);
        let val = v.eval(&SpacePoint(coords)).map_err(|e| anyhow!("{e}"))?;
        sum += val.abs().powf(p) * (right - left);
        left = right;
    }
    Ok(2.0 * sum)
}

fn add_lp_loc_divergence_check(list: &mut Checklist, v: &Potential) -> Result<()> {
    // p = 2: the squared singular terms are non-integrable at x_1 = 0
    // (exponents -1 and below), so the cutoff partial masses must keep
    // growing by non-shrinking increments -- the quadrature witness that the
    // local square mass is infinite.
    let vals = [1e-2, 1e-4, 1e-6]
        .iter()
        .map(|&d| slab_power_mass(v, 2.0, d))
        .collect::<Result<Vec<_>>>()?;
    let inc1 = vals[1] - vals[0];
    let inc2 = vals[2] - vals[1];
    let divergent = vals[0] < vals[1] && vals[1] < vals[2] && inc1 > 0.0 && inc2 >= 0.8 * inc1;
    list.add(
        "square_mass_diverges",
        divergent,
        format!(
            "partial masses {}, {}, {} grow without bound as the inner cutoff shrinks",
            crate::fmt_f64(vals[0]),
            crate::fmt_f64(vals[1]),
            crate::fmt_f64(vals[2])
        ),
    );
    Ok(())
}

/// The weighted series of sharpening singularities: finite sup S by the
/// summable weights, yet outside every local L^p with p > 1.
fn verify_drugi(ctx: &Ctx) -> Result<CmdOutput> {
    let mut list = Checklist::new();
    let v = drugi_potential(
        3,
        ctx.defaults.n_terms_weighted_series,
        &ctx.weight_grid,
        &ctx.quad,
    )
    .map_err(|e| anyhow!("{e}"))?;

    list.add(
        "weights_recorded",
        v.meta.as_ref().is_some_and(|m| m.estimation_note.is_some()),
        "grid-estimated weights are recorded in the metadata".into(),
    );

    let sup = big_f_sup(
        &v.abs().map_err(|e| anyhow!("{e}"))?,
        ctx.defaults.sup_horizon,
        &ctx.weight_grid,
        &ctx.quad,
    )
    .map_err(|e| anyhow!("{e}"))?;
    // The exact weights give sup S <= sum 1/n^2 < pi^2/6 - 1; grid-estimated
    // weights are biased high, so allow slack but demand finiteness well
    // below the series certificate threshold.
    list.add(
        "sup_s_small_and_finite",
        sup.value.is_finite() && !sup.divergent && sup.value < 1.5,
        format!("sup S over the grid = {}", crate::fmt_f64(sup.value)),
    );

    add_lp_loc_divergence_check(&mut list, &v)?;
    list.extra("potential", to_clean_value(&v));
    Ok(list.finish())
}

/// The combined example: weighted series plus fat tail, leaving both L^1 and
/// every local L^p with p > 1 while keeping sup S finite.
fn verify_ce(ctx: &Ctx) -> Result<CmdOutput> {
    let mut list = Checklist::new();
    let v = ce_potential(
        3,
        ctx.defaults.n_terms_combined,
        &ctx.weight_grid,
        &ctx.quad,
    )
    .map_err(|e| anyhow!("{e}"))?;

    let (l1, _) = v.lp_norm_bound(1.0).map_err(|e| anyhow!("{e}"))?;
    list.add("l1_norm_infinite", l1.is_infinite(), "||V||_1 = inf".into());

    add_lp_loc_divergence_check(&mut list, &v)?;

    let mut nonpositive = true;
    for coords in [[0.3, 0.2, 0.0], [0.0, 5.0, 1.0], [2.0, 0.0, 0.0]] {
        nonpositive &= v.eval(&SpacePoint(coords.to_vec())).map_err(|e| anyhow!("{e}"))? <= 0.0;
    }
    list.add("nonpositive_at_samples", nonpositive, "V <= 0 at sample points".into());

    let sup = big_f_sup(
        &v.abs().map_err(|e| anyhow!("{e}"))?,
        ctx.defaults.sup_horizon,
        &ctx.weight_grid,
        &ctx.quad,
    )
    .map_err(|e| anyhow!("{e}"))?;
    list.add(
        "sup_s_finite",
        sup.value.is_finite() && !sup.divergent,
        format!("sup S over the grid = {}", crate::fmt_f64(sup.value)),
    );
    list.extra("potential", to_clean_value(&v));
    Ok(list.finish())
}

/// Nonnegative rescaling of the combined example: same divergent norms, with
/// sup S pushed to M/(M+1) < 1 so the series certificate applies.
fn verify_ce_nonneg(ctx: &Ctx) -> Result<CmdOutput> {
    let mut list = Checklist::new();
    let out = ce_nonneg_potential(
        3,
        ctx.defaults.n_terms_combined,
        &ctx.weight_grid,
        &ctx.quad,
    )
    .map_err(|e| anyhow!("{e}"))?;

    list.add(
        "eta_below_one",
        out.eta < 1.0 && out.eta > 0.0,
        format!(
            "eta = M/(M+1) = {} with M = {}",
            crate::fmt_f64(out.eta),
            crate::fmt_f64(out.m_estimate)
        ),
    );

    let mut nonneg = true;
    for coords in [[0.3, 0.2, 0.0], [0.0, 5.0, 1.0], [2.0, 0.0, 0.0]] {
        nonneg &= out
            .potential
            .eval(&SpacePoint(coords.to_vec()))
            .map_err(|e| anyhow!("{e}"))?
            >= 0.0;
    }
    list.add("nonnegative_at_samples", nonneg, "V~ >= 0 at sample points".into());

    // Linearity spot-check: S of the rescaled potential at one bridge spec
    // must be exactly 1/(M+1) times S of |V|.
    let base = ce_potential(
        3,
        ctx.defaults.n_terms_combined,
        &ctx.weight_grid,
        &ctx.quad,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let spec = BridgeSpec::new(
        1.0,
        SpacePoint::origin(3),
        SpacePoint(vec![0.5, 0.0, 0.0]),
    )
    .map_err(|e| anyhow!("{e}"))?;
    let a = s_value(&base.abs().map_err(|e| anyhow!("{e}"))?, &spec, &ctx.quad)
        .map_err(|e| anyhow!("{e}"))?;
    let b = s_value(&out.potential, &spec, &ctx.quad).map_err(|e| anyhow!("{e}"))?;
    let expected = a.value / (out.m_estimate + 1.0);
    list.add(
        "rescaled_s_value_is_linear",
        (b.value - expected).abs() <= 1e-8 * expected.max(1.0),
        format!(
            "S(V~) = {} vs S(|V|)/(M+1) = {}",
            crate::fmt_f64(b.value),
            crate::fmt_f64(expected)
        ),
    );
    list.extra("eta", num(out.eta));
    list.extra("m_estimate", num(out.m_estimate));
    Ok(list.finish())
}
