//! Parsing of CLI inputs: potentials (inline JSON, files, or named
//! examples), coordinate lists, and grid specs.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

use bridgegauss::examples::{ce_nonneg_potential, ce_potential, drugi_potential};
use bridgegauss::potential::{czwarty_potential, ld2_potential, nfs2_factor, nfs2_product};
use bridgegauss::{GridSpec, Potential, QuadConfig, SpacePoint};

/// Construction-time knobs needed by the example potentials whose weights
/// come from grid-estimated suprema.
pub struct ExampleParams {
    pub weight_grid: GridSpec,
    pub n_terms_weighted_series: usize,
    pub n_terms_combined: usize,
    pub quad: QuadConfig,
}

/// `--potential` accepts a literal JSON object or a path to a file holding
/// one. The object is either the full schema
/// `{"dim": d, "terms": [{"coeff": c, "factors": [{"dim": m, "profile": {"type": ...}}]}]}`
/// or a named example reference like `{"example": "nfs2", "epsilon": 0.0}`.
pub fn load_potential(arg: &str, params: &ExampleParams) -> Result<Potential> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading potential file {arg}"))?
    };
    let value: Value = serde_json::from_str(&text).context("potential JSON is malformed")?;
    if let Some(name) = value.get("example") {
        let name = name
            .as_str()
            .ok_or_else(|| anyhow!("\"example\" must be a string"))?;
        return example_potential(name, &value, params);
    }
    let raw: Potential = serde_json::from_value(value).context("potential schema mismatch")?;
    // Re-validate: deserialization bypasses the constructor's invariants.
    let mut pot = Potential::new(raw.dim, raw.terms).map_err(|e| anyhow!("{e}"))?;
    pot.meta = raw.meta;
    Ok(pot)
}

fn example_potential(name: &str, value: &Value, params: &ExampleParams) -> Result<Potential> {
    let get_f64 = |key: &str, default: f64| -> Result<f64> {
        match value.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| anyhow!("\"{key}\" must be a number")),
        }
    };
    let get_usize = |key: &str, default: usize| -> Result<usize> {
        match value.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| anyhow!("\"{key}\" must be a nonnegative integer")),
        }
    };
    let d = get_usize("d", 3)?;
    let pot = match name {
        "ld2" => ld2_potential(get_f64("p", 2.0)?, d),
        "czwarty" => czwarty_potential(d),
        "nfs2" => nfs2_product(get_f64("epsilon", 0.0)?),
        "nfs2_factor" => nfs2_factor(get_f64("epsilon", 0.0)?),
        "drugi" => drugi_potential(
            d,
            get_usize("n_terms", params.n_terms_weighted_series)?,
            &params.weight_grid,
            &params.quad,
        ),
        "ce" => ce_potential(
            d,
            get_usize("n_terms", params.n_terms_combined)?,
            &params.weight_grid,
            &params.quad,
        ),
        "ce_nonneg" => ce_nonneg_potential(
            d,
            get_usize("n_terms", params.n_terms_combined)?,
            &params.weight_grid,
            &params.quad,
        )
        .map(|r| r.potential),
        other => bail!(
            "unknown example \"{other}\"; expected one of ld2, drugi, czwarty, nfs2, nfs2_factor, ce, ce_nonneg"
        ),
    };
    pot.map_err(|e| anyhow!("{e}"))
}

/// Comma-separated coordinates, e.g. "0.5,0,0".
pub fn parse_point(s: &str) -> Result<SpacePoint> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| anyhow!("bad coordinate {c:?}: {e}")))
        .collect::<Result<_>>()?;
    SpacePoint::new(coords).map_err(|e| anyhow!("{e}"))
}

/// Grid spec "r1,r2,...;k": axis radii and the number of time subdivisions.
/// The trailing ";k" may be omitted to keep the default subdivision count.
pub fn parse_grid(s: &str, default_subdivisions: usize) -> Result<GridSpec> {
    let (radii_part, subdiv) = match s.split_once(';') {
        Some((r, k)) => (
            r,
            k.trim()
                .parse::<usize>()
                .map_err(|e| anyhow!("bad subdivision count {k:?}: {e}"))?,
        ),
        None => (s, default_subdivisions),
    };
    let radii: Vec<f64> = radii_part
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| anyhow!("bad radius {c:?}: {e}")))
        .collect::<Result<_>>()?;
    if radii.is_empty() || radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
        bail!("grid radii must be finite and nonnegative");
    }
    if subdiv == 0 {
        bail!("time subdivision count must be >= 1");
    }
    Ok(GridSpec {
        radii,
        time_subdivisions: subdiv,
    })
}
