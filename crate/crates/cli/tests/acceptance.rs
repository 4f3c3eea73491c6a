//! End-to-end acceptance suite. Each criterion prints one pass/fail line and
//! carries a wall-clock budget; the suite fails if any criterion fails or
//! overruns its budget. Fixed seeds everywhere: repeated runs must produce
//! byte-identical reports, which the final criterion checks directly.

use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bridgegauss::bridge::{
    beta_time_factor, bridge_apply, c_dp, extended_bound_a, f_sup, s_value,
};
use bridgegauss::examples::series_component;
use bridgegauss::feynman_kac::g_ratio_mc;
use bridgegauss::kernel::BridgeSpec;
use bridgegauss::newtonian::{newtonian, nfs2_inner_closed, nfs2_inner_integral};
use bridgegauss::potential::{ld2_potential, nfs2_factor};
use bridgegauss::quad;
use bridgegauss::schrodinger::{envelope_check, g_series, lower_exp_constants, Verdict};
use bridgegauss::{BlockSplit, GridSpec, McConfig, Potential, QuadConfig, SpacePoint};

struct Outcome {
    label: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
    limit: f64,
}

/// Formatted artifacts kept for the reproducibility criterion.
#[derive(Default)]
struct Artifacts {
    library_reports: Vec<(&'static str, String)>,
    cli_reports: Vec<(Vec<String>, String)>,
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn indicator(dim: usize, coeff: f64) -> Potential {
    Potential::ball_indicator(dim, 1.0, coeff).expect("valid indicator")
}

fn run_cli(args: &[&str]) -> (String, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_bridgegauss"))
        .args(args)
        .output()
        .expect("CLI binary runs");
    (
        String::from_utf8(out.stdout).expect("utf8 report"),
        out.status.success(),
    )
}

#[test]
fn acceptance_criteria() {
    let mut outcomes: Vec<Outcome> = Vec::new();
    let mut artifacts = Artifacts::default();
    let criteria: Vec<(&'static str, f64, fn(&mut Artifacts) -> (bool, String))> = vec![
        ("newtonian value of the singular factor", 1.0, crit_01),
        ("inner-integral closed form", 5.0, crit_02),
        ("divergence verdict via the CLI", 60.0, crit_03),
        ("sharp-bound positive case", 120.0, crit_04),
        ("constant-potential exactness", 10.0, crit_05),
        ("series vs Monte Carlo", 60.0, crit_06),
        ("two-sided envelope suite", 120.0, crit_07),
        ("bridge L^p bound", 60.0, crit_08),
        ("beta-constant identity", 1.0, crit_09),
        ("growth lemma, lower-exp constants, sub-additivity", 60.0, crit_10),
        ("byte-identical reproducibility", 600.0, crit_11),
    ];
    for (label, limit, body) in criteria {
        let started = Instant::now();
        let (pass, detail) = body(&mut artifacts);
        let secs = started.elapsed().as_secs_f64();
        outcomes.push(Outcome {
            label,
            pass,
            detail,
            secs,
            limit,
        });
    }
    let mut failures = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let within = o.secs <= o.limit;
        let verdict = if o.pass && within { "pass" } else { "FAIL" };
        println!(
            "criterion {:>2} [{verdict}] {} ({:.1}s / {:.0}s) {}",
            i + 1,
            o.label,
            o.secs,
            o.limit,
            o.detail
        );
        if !(o.pass && within) {
            failures.push(format!(
                "criterion {} ({}): pass={} time={:.1}s/{:.0}s: {}",
                i + 1,
                o.label,
                o.pass,
                o.secs,
                o.limit,
                o.detail
            ));
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}

/// Newtonian potential of the singular 3-D factor at the origin is exactly
/// one half.
fn crit_01(art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let v = nfs2_factor(0.0).unwrap();
    let r = newtonian(&v, &SpacePoint::origin(3), &cfg).unwrap();
    let pass = (r.value - 0.5).abs() <= 1e-6;
    let report = f(r.value);
    art.library_reports.push(("newtonian_factor_origin", report.clone()));
    (pass, format!("value {report}"))
}

/// The radially reduced inner integral matches its closed form
/// pi T / (a^2 (T/2 + a^2)) to 1e-8 relative.
fn crit_02(art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let mut pass = true;
    let mut report = String::new();
    for (t, a) in [(1.0, 0.1), (1.0, 0.5), (0.5, 0.3)] {
        let got = nfs2_inner_integral(t, a, &cfg).unwrap().value;
        let want = nfs2_inner_closed(t, a);
        pass &= ((got - want) / want).abs() <= 1e-8;
        report.push_str(&format!("({t},{a})->{};", f(got)));
    }
    art.library_reports.push(("inner_integral", report));
    (pass, "three (T,a) pairs at 1e-8 relative".into())
}

fn crit_03_args() -> Vec<String> {
    [
        "eval-s",
        "--potential",
        r#"{"example": "nfs2", "epsilon": 0.0}"#,
        "--t",
        "1",
        "--x",
        "0,0,0,0,0,0",
        "--y",
        "0,0,0,0,0,0",
    ]
    .map(String::from)
    .to_vec()
}

/// `eval-s` on the 6-D product potential: divergence flagged, cutoff partials
/// increase with near-constant increments per cutoff decade.
fn crit_03(art: &mut Artifacts) -> (bool, String) {
    let args = crit_03_args();
    let argrefs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (stdout, status_ok) = run_cli(&argrefs);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("valid report JSON");
    let divergent = report["results"]["divergent"] == serde_json::Value::Bool(true);
    let flags_has = report["flags"]
        .as_array()
        .is_some_and(|a| a.iter().any(|v| v == "divergent"));
    let partials: Vec<f64> = report["results"]["partials"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|p| p["value"].as_f64())
                .collect::<Vec<_>>()
        })
        .unwrap_or_default();
    let mut pass = status_ok && divergent && flags_has && partials.len() == 3;
    let mut detail = format!("divergent={divergent}");
    if partials.len() == 3 {
        let inc1 = partials[1] - partials[0];
        let inc2 = partials[2] - partials[1];
        let log_like =
            partials[0] < partials[1] && partials[1] < partials[2] && (inc2 / inc1 - 1.0).abs() <= 0.2;
        pass &= log_like;
        detail.push_str(&format!(
            ", increments {} / {} (ratio {:.3})",
            f(inc1),
            f(inc2),
            inc2 / inc1
        ));
    }
    art.cli_reports.push((args, stdout));
    (pass, detail)
}

fn crit_04_args() -> Vec<String> {
    [
        "diagnose",
        "--potential",
        r#"{"example": "ld2", "p": 2, "d": 3}"#,
        "--t",
        "1",
    ]
    .map(String::from)
    .to_vec()
}

/// The borderline example: measured f(t) stays under the split-form bound at
/// three times, and `diagnose` certifies an admissible exponent chain.
fn crit_04(art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let grid = GridSpec::default();
    let v = ld2_potential(2.0, 3).unwrap();
    let split = BlockSplit::new(1, 2).unwrap();
    let (r, p2) = (1.5, 1.8);
    let mut pass = true;
    let mut detail = String::new();
    for t in [0.1, 1.0, 10.0] {
        let f_hat = f_sup(&v, t, &grid, &cfg).unwrap();
        let bound = extended_bound_a(&v, r, p2, t, split).unwrap();
        pass &= f_hat.value <= bound;
        detail.push_str(&format!("t={t}: {} <= {}; ", f(f_hat.value), f(bound)));
    }
    let args = crit_04_args();
    let argrefs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (stdout, status_ok) = run_cli(&argrefs);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("valid report JSON");
    let chain = &report["results"]["split_chain"];
    let certified = chain["report"]["certified"] == serde_json::Value::Bool(true);
    let (q, p1, rr) = (
        chain["exponents"]["q"].as_f64().unwrap_or(f64::NAN),
        chain["exponents"]["p1"].as_f64().unwrap_or(f64::NAN),
        chain["exponents"]["r"].as_f64().unwrap_or(f64::NAN),
    );
    let chain_ok = certified && 1.0 <= q && q < p1 && p1 < rr;
    pass &= status_ok && chain_ok;
    detail.push_str(&format!("chain certified={certified} with q={q} < p1={p1} < r={rr}"));
    art.cli_reports.push((args, stdout));
    (pass, detail)
}

/// Constant potentials are exact: S = ct, the series sums the exponential
/// within its truncation bound, and Monte Carlo has zero variance.
fn crit_05(art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let mut pass = true;
    let mut report = String::new();
    for (c, t) in [(1.0, 2.0), (0.5, 1.0), (2.0, 0.25)] {
        let v = Potential::constant(1, -c);
        let spec = BridgeSpec::new(t, SpacePoint::origin(1), SpacePoint::origin(1)).unwrap();
        let s = s_value(&v, &spec, &cfg).unwrap();
        pass &= ((s.value - c * t) / (c * t)).abs() <= 1e-10;
        report.push_str(&format!("S({c},{t})={};", f(s.value)));
    }
    for ct in [-1.0, -0.5, 0.25, 0.5] {
        let v = Potential::constant(1, ct);
        let spec = BridgeSpec::new(1.0, SpacePoint::origin(1), SpacePoint::origin(1)).unwrap();
        let est = g_series(&v, &spec, &cfg, None).unwrap();
        let ratio = est.value / est.gauss;
        pass &= (ratio - ct.exp()).abs() <= est.truncation_bound / est.gauss + 1e-14;
        let mc = g_ratio_mc(
            &v,
            &spec,
            &McConfig {
                paths: 1000,
                steps: 16,
                seed: 7,
                antithetic: true,
            },
        )
        .unwrap();
        pass &= mc.std_error == 0.0 && (mc.mean - ct.exp()).abs() <= 1e-12;
        report.push_str(&format!("ct={ct}:{},{};", f(ratio), f(mc.mean)));
    }
    art.library_reports.push(("constant_exactness", report));
    (pass, "S = ct, series = e^{ct}, MC exact with zero variance".into())
}

/// The series and the Monte Carlo estimator agree within three standard
/// errors on the shallow well in one and three dimensions.
fn crit_06(art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let mc_cfg = McConfig {
        paths: 100_000,
        steps: 256,
        seed: 7,
        antithetic: true,
    };
    let mut pass = true;
    let mut detail = String::new();
    let mut report = String::new();
    for d in [1usize, 3] {
        let v = indicator(d, -0.5);
        let spec = BridgeSpec::new(1.0, SpacePoint::origin(d), SpacePoint::origin(d)).unwrap();
        let est = g_series(&v, &spec, &cfg, None).unwrap();
        let ratio = est.value / est.gauss;
        let mc = g_ratio_mc(&v, &spec, &mc_cfg).unwrap();
        let gap = (ratio - mc.mean).abs();
        let ok = gap <= 3.0 * mc.std_error + est.truncation_bound / est.gauss;
        pass &= ok;
        detail.push_str(&format!(
            "d={d}: gap {} vs 3se {}; ",
            f(gap),
            f(3.0 * mc.std_error)
        ));
        report.push_str(&format!("d={d}:{},{},{};", f(ratio), f(mc.mean), f(mc.std_error)));
    }
    art.library_reports.push(("series_vs_mc", report));
    (pass, detail)
}

/// The two-sided envelope holds at twenty sampled (t,x,y) for each suite
/// potential: a negative well, the singular negative factor, and a small
/// positive indicator.
fn crit_07(_art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let grid = GridSpec::default();
    let suite: Vec<Potential> = vec![
        indicator(3, -1.0),
        nfs2_factor(0.0).unwrap(),
        indicator(1, 0.2),
    ];
    let mut pass = true;
    let mut checked = 0usize;
    for v in &suite {
        for t in [0.25, 0.5, 1.0, 2.0] {
            for r in [0.0, 0.3, 0.6, 1.2, 2.0] {
                let spec = BridgeSpec::new(
                    t,
                    SpacePoint::axis(v.dim, r),
                    SpacePoint::origin(v.dim),
                )
                .unwrap();
                let rep = envelope_check(v, &spec, None, &grid, &cfg).unwrap();
                let bounds_ok = rep.lower - 1e-6 <= rep.ratio && rep.ratio <= rep.upper + 1e-6;
                pass &= bounds_ok && rep.pass == Verdict::Pass;
                checked += 1;
            }
        }
    }
    (pass, format!("{checked} samples, zero violations"))
}

/// The bridge operator bound: for indicator profiles and random (s,t,x,y),
/// T f never exceeds C(d,p) [(t-s)s/t]^{-d/(2p)} ||f||_p.
fn crit_08(_art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut pass = true;
    let mut worst: f64 = f64::NEG_INFINITY;
    for d in [1usize, 2, 3] {
        let v = indicator(d, 1.0);
        let (norm_1, _) = v.lp_norm_bound(1.0).unwrap();
        let (norm_2, _) = v.lp_norm_bound(2.0).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            let norm_p = if p == 1.0 {
                norm_1
            } else if p == 2.0 {
                norm_2
            } else {
                1.0
            };
            let c = c_dp(d, p).unwrap();
            for _ in 0..200 {
                let t: f64 = rng.gen_range(0.1..4.0);
                let s: f64 = t * rng.gen_range(0.05..0.95);
                let coords = |rng: &mut ChaCha8Rng| {
                    SpacePoint((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
                };
                let x = coords(&mut rng);
                let y = coords(&mut rng);
                let spec = BridgeSpec::new(t, x.clone(), y).unwrap();
                let applied = bridge_apply(&v, s, &spec, &cfg).unwrap();
                let bound = c * ((t - s) * s / t).powf(-(d as f64) / (2.0 * p)) * norm_p;
                let slack = applied.value - bound;
                worst = worst.max(slack);
                pass &= slack <= applied.abs_err + 1e-10;
            }
        }
    }
    (pass, format!("1800 samples, worst slack {}", f(worst)))
}

/// The exact time-profile constant: int_0^1 [s(1-s)]^{-alpha} ds equals
/// Gamma(1-alpha)^2 / Gamma(2-2alpha), and is pi at alpha = 1/2.
fn crit_09(art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let mut pass = true;
    let mut report = String::new();
    for alpha in [0.25, 0.5, 0.75] {
        // The integrand is symmetric about 1/2, so writing it in terms of the
        // distance to the nearer endpoint keeps full precision at both ends.
        let numeric = quad::tanh_sinh_signed(
            &|_s: f64, d: f64| (d * (1.0 - d)).powf(-alpha),
            0.0,
            1.0,
            &cfg,
        )
        .value;
        let exact = beta_time_factor(alpha).unwrap();
        pass &= ((numeric - exact) / exact).abs() <= 1e-8;
        report.push_str(&format!("a={alpha}:{};", f(numeric)));
    }
    let half = beta_time_factor(0.5).unwrap();
    pass &= (half - std::f64::consts::PI).abs() <= 1e-12;
    art.library_reports.push(("beta_identity", report));
    (pass, format!("alpha=1/2 gives {}", f(half)))
}

/// Appendix structure: the growth lemma f(t) <= F(h) + t f(h)/h on grid
/// estimates, exact lower-exp constants for a unit well, and operator-level
/// sub-additivity on a segment-containing grid.
fn crit_10(art: &mut Artifacts) -> (bool, String) {
    let cfg = QuadConfig::default();
    let grid = GridSpec::default();
    let mut pass = true;
    let mut detail = String::new();

    // Growth lemma on a radial well (grid estimates on both sides; the shared
    // grid makes the argmaxes line up, so only quadrature noise needs slack).
    let v = indicator(1, -1.0);
    for h in [0.5, 1.0] {
        let f_h = f_sup(&v, h, &grid, &cfg).unwrap().value;
        let big_f_h = bridgegauss::bridge::big_f_sup(&v, h, &grid, &cfg).unwrap().value;
        for t in [0.5, 1.0, 2.0, 3.0] {
            let f_t = f_sup(&v, t, &grid, &cfg).unwrap().value;
            pass &= f_t <= big_f_h + t * f_h / h + 1e-6;
        }
    }
    detail.push_str("growth lemma ok; ");

    // Exact constants for the unit well.
    let rep = lower_exp_constants(&Potential::constant(1, -1.0), 1.0, &grid, &cfg).unwrap();
    let c_ok = (rep.big_c - (-1.0f64).exp()).abs() <= 1e-10 && (rep.rate - 1.0).abs() <= 1e-10;
    pass &= c_ok;
    detail.push_str(&format!("C={}, c={}; ", f(rep.big_c), f(rep.rate)));
    art.library_reports
        .push(("lower_exp_constants", format!("{},{}", f(rep.big_c), f(rep.rate))));

    // Operator-level sub-additivity: S(t,x,y) <= f(t1) + f(t2) when the grid
    // contains the segment between the radial endpoints.
    let seg_grid = GridSpec::with_radii(vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0]);
    for (t1, t2) in [(0.5, 0.5), (0.25, 0.75), (1.0, 1.0)] {
        let t = t1 + t2;
        for (xr, yr) in [(0.0, 0.0), (1.0, 0.0), (0.5, 0.25)] {
            let spec =
                BridgeSpec::new(t, SpacePoint::axis(1, xr), SpacePoint::axis(1, yr)).unwrap();
            let s = s_value(&v, &spec, &cfg).unwrap().value;
            let lhs_1 = f_sup(&v, t1, &seg_grid, &cfg).unwrap().value;
            let lhs_2 = f_sup(&v, t2, &seg_grid, &cfg).unwrap().value;
            pass &= s <= lhs_1 + lhs_2 + 1e-6;
        }
    }
    detail.push_str("sub-additivity ok");
    (pass, detail)
}

/// Everything above is seeded and deterministic: re-running the library
/// computations and the CLI commands must reproduce the recorded artifacts
/// byte for byte.
fn crit_11(art: &mut Artifacts) -> (bool, String) {
    let mut pass = true;
    let mut repeats = Artifacts::default();
    let _ = crit_01(&mut repeats);
    let _ = crit_02(&mut repeats);
    let _ = crit_05(&mut repeats);
    let _ = crit_09(&mut repeats);
    for (name, b) in &repeats.library_reports {
        let first = art.library_reports.iter().find(|(n, _)| n == name);
        pass &= first.is_some_and(|(_, a)| a == b);
    }
    // Monte Carlo determinism: same seed, same estimate to the last bit.
    let spec = BridgeSpec::new(1.0, SpacePoint::origin(1), SpacePoint::origin(1)).unwrap();
    let v = indicator(1, -0.5);
    let mc_cfg = McConfig {
        paths: 20_000,
        steps: 64,
        seed: 7,
        antithetic: true,
    };
    let a = g_ratio_mc(&v, &spec, &mc_cfg).unwrap();
    let b = g_ratio_mc(&v, &spec, &mc_cfg).unwrap();
    pass &= a.mean.to_bits() == b.mean.to_bits() && a.std_error.to_bits() == b.std_error.to_bits();
    // CLI reports byte for byte.
    let mut compared = 0usize;
    for (args, stdout) in &art.cli_reports {
        let argrefs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (again, _) = run_cli(&argrefs);
        pass &= &again == stdout;
        compared += 1;
    }
    // A weighted-series construction is also deterministic end to end.
    let comp = series_component(2, 3).unwrap();
    let s1 = format!("{comp:?}");
    let s2 = format!("{:?}", series_component(2, 3).unwrap());
    pass &= s1 == s2;
    (
        pass,
        format!(
            "{} library reports, {compared} CLI reports, Monte Carlo bitwise stable",
            art.library_reports.len()
        ),
    )
}
