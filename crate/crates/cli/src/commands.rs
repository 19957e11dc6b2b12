//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use simpalg_core::audit::{rational_check, serre_audit, AuditMode, AuditOutcome, AuditParams, EnvelopeProfile, PiBound};
use simpalg_core::barcof::{a_rs_tables, cofiber_homotopy, cofiber_inequality, representing_map, AlgebraMap};
use simpalg_core::sample::random_object;
use simpalg_core::series::{asymptotic_check, sphere_series_char0, sphere_series_charp};
use simpalg_core::simplicial::homotopy_dims_unnormalized;
use simpalg_core::symalg::{sphere_algebra, sphere_cells};
use simpalg_core::{
    eilenberg_maclane, homotopy_dims, sphere_homotopy, Field, FieldSpec, GradedDims, PrimeField, Rationals,
    SimplicialVectorSpace,
};

use crate::config::RunConfig;
use crate::output::{graded_rows, strings, Report, Status};

/// Runs `$body` with `$f` bound to the configured field.
macro_rules! with_field {
    ($spec:expr, $f:ident => $body:expr) => {{
        match $spec {
            0 => {
                let $f = &Rationals;
                $body
            }
            p => {
                let $f = &PrimeField::new(p)?;
                $body
            }
        }
    }};
}

fn default_top(cfg: &RunConfig, fallback: usize) -> usize {
    cfg.truncation.unwrap_or(fallback)
}

fn dims_json(d: &GradedDims) -> serde_json::Value {
    json!(d.0)
}

pub fn pi_sphere(cfg: &RunConfig, q: usize, n: usize) -> Result<Report> {
    let top = default_top(cfg, 2 * n + 2);
    let w = cfg.weight.unwrap_or((top / n.max(1)).max(1));
    let report = with_field!(cfg.characteristic, f => sphere_homotopy(f, q, n, top + 1, w)?);
    let status = if report.stable_flags.iter().all(|&x| x) { Status::Ok } else { Status::Inconclusive };
    let rows = graded_rows(&[&strings(&report.dims.0), &strings(&report.stable_flags)]);
    Ok(Report::new(report.to_json(), &["degree", "dim", "stable"], rows, status))
}

pub fn hq_sphere(cfg: &RunConfig, q: usize, n: usize) -> Result<Report> {
    let top = default_top(cfg, 2 * n + 2);
    let (linear, via_q) = with_field!(cfg.characteristic, f => {
        let alg = sphere_cells(f, q, n)?;
        let (_, lin) = alg.linear_complex(None, top + 1)?;
        let qa = alg.indecomposables(top + 1)?;
        (lin.homology_dims().truncated(top + 1), homotopy_dims(&qa)?)
    });
    let status = if linear == via_q { Status::Ok } else { Status::Violation };
    let json = json!({
        "field": cfg.characteristic,
        "q": q,
        "n": n,
        "T": top,
        "hq": dims_json(&via_q),
        "hq_cellular": dims_json(&linear),
    });
    let rows = graded_rows(&[&strings(&via_q.0), &strings(&linear.0)]);
    Ok(Report::new(json, &["degree", "hq", "hq_cellular"], rows, status))
}

pub fn em(cfg: &RunConfig, q: usize, n: usize) -> Result<Report> {
    let top = default_top(cfg, n + 4);
    let (norm, unnorm, levels) = with_field!(cfg.characteristic, f => {
        let k = eilenberg_maclane(f, q, n, top + 1)?;
        (homotopy_dims(&k)?, homotopy_dims_unnormalized(&k)?, k.level_dims().to_vec())
    });
    let status = if norm == unnorm { Status::Ok } else { Status::Violation };
    let json = json!({
        "field": cfg.characteristic,
        "q": q,
        "n": n,
        "T": top,
        "level_dims": levels,
        "dims": dims_json(&norm),
        "dims_unnormalized": dims_json(&unnorm),
    });
    let rows = graded_rows(&[&strings(&norm.0), &strings(&unnorm.0)]);
    Ok(Report::new(json, &["degree", "dim", "dim_unnormalized"], rows, status))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    Identity,
    Zero,
    Power,
}

fn require_rational(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.characteristic != 0 {
        bail!("{what} is implemented in characteristic 0 only");
    }
    Ok(())
}

/// Cofiber of `S(m) → S(n)`, with the Poincaré series inequality checked on the triple.
pub fn cofiber(cfg: &RunConfig, kind: MapKind, n: usize, source: Option<usize>, s: usize) -> Result<Report> {
    require_rational(cfg, "the cofiber")?;
    let (m, weight) = match kind {
        MapKind::Identity => (n, 1),
        MapKind::Zero => (source.context("--source is required for the zero map")?, 1),
        MapKind::Power => (n * s, s),
    };
    if m == 0 || n == 0 {
        bail!("sphere degrees must be positive");
    }
    let top = default_top(cfg, m + 2);
    let levels = top + 1;
    let w = cfg.weight.unwrap_or(weight.max(2));
    let nb = cfg.bar.unwrap_or(w);
    let target = Arc::new(sphere_algebra(&Rationals, 1, n, levels, weight)?);
    let f = match kind {
        MapKind::Identity => representing_map(&target, n, 1, vec![(0, Rationals.one())])?,
        MapKind::Zero => AlgebraMap::zero(&target, m, 1)?,
        MapKind::Power => {
            let x = simpalg_core::barcof::generator_power(&target, n, s)?;
            representing_map(&target, m, s, x)?
        }
    };
    let c = cofiber_homotopy(&f, nb, w)?;
    let a = sphere_homotopy(&Rationals, 1, m, levels, w)?;
    let b = sphere_homotopy(&Rationals, 1, n, levels, w)?;
    let stable = (0..top)
        .take_while(|&k| c.flags[k] && a.stable_flags[k] && b.stable_flags[k])
        .count();
    let violation = if stable == 0 { None } else { cofiber_inequality(&a.dims, &b.dims, &c.dims, stable - 1) };
    let mut status = if stable < top { Status::Inconclusive } else { Status::Ok };
    if violation.is_some() {
        status = Status::Violation;
    }
    let json = json!({
        "map": format!("{kind:?}").to_lowercase(),
        "source_degree": m,
        "target_degree": n,
        "bounds": {"T": top, "W": w, "N": nb},
        "pi": dims_json(&c.dims),
        "pi_flags": c.flags,
        "certified_degree": c.certified_degree,
        "triple": {
            "a": dims_json(&a.dims),
            "b": dims_json(&b.dims),
            "c": dims_json(&c.dims),
            "checked_through": stable.checked_sub(1),
            "inequality_holds": violation.is_none(),
            "first_violation": violation,
        },
    });
    let rows = graded_rows(&[&strings(&c.dims.0), &strings(&c.flags), &strings(&a.dims.0), &strings(&b.dims.0)]);
    Ok(Report::new(json, &["degree", "pi", "stable", "pi_source", "pi_target"], rows, status))
}

pub fn rational_example(cfg: &RunConfig, r: usize, s: usize) -> Result<Report> {
    require_rational(cfg, "the A<r,s> example")?;
    let top = default_top(cfg, 2 * r * s + 1);
    let w = cfg.weight.unwrap_or(s.max(2));
    let nb = cfg.bar.unwrap_or(w);
    let report = a_rs_tables(r, s, top + 1, w, nb)?;
    let mut dims = BTreeMap::new();
    dims.insert(2 * r, 1);
    dims.insert(2 * r * s + 1, 1);
    let profile = EnvelopeProfile::new(FieldSpec::RATIONALS, dims, PiBound::Unbounded)?;
    let check = rational_check(&profile, true)?;
    let status = if !report.mismatches().is_empty() {
        Status::Violation
    } else if report.pi.flags.iter().all(|&x| x) {
        Status::Ok
    } else {
        Status::Inconclusive
    };
    let mut json = report.to_json();
    json["rational_check"] = check.to_json();
    let hq_table: Vec<String> = (0..=top)
        .map(|k| report.hq_table.iter().filter(|e| e.0 == k).map(|e| e.1).sum::<usize>().to_string())
        .collect();
    let pi_table = report.pi_table_dims();
    let rows = graded_rows(&[
        &strings(&report.pi.dims.0),
        &strings(&report.pi.flags),
        &strings(&pi_table.0),
        &hq_table,
        &strings(&report.hq_computed.truncated(top + 1).0),
    ]);
    Ok(Report::new(json, &["degree", "pi", "stable", "pi_table", "hq", "hq_computed"], rows, status))
}

pub fn series(cfg: &RunConfig, q: usize, n: usize, asymptotic: bool, base: Option<u64>, t: &[f64]) -> Result<Report> {
    let m = cfg.series_truncation;
    let (s, short) = if cfg.characteristic == 0 {
        (sphere_series_char0(q, n, m)?, false)
    } else {
        let w = cfg.weight.unwrap_or((m / n.max(1)).max(1));
        let c = sphere_series_charp(q, n, cfg.characteristic, m, w)?;
        let short = c.is_short();
        (c.series, short)
    };
    let mut status = if short { Status::Inconclusive } else { Status::Ok };
    if !asymptotic {
        let mut json = s.to_json();
        json["requested_truncation"] = json!(m);
        let rows = graded_rows(&[&strings(s.coeffs())]);
        return Ok(Report::new(json, &["degree", "coefficient"], rows, status));
    }
    let p = match (cfg.characteristic, base) {
        (0, Some(p)) => p,
        (0, None) => bail!("--base is required for the transform in characteristic 0"),
        (p, _) => p,
    };
    let report = asymptotic_check(&s, q, n, p, t)?;
    if report.inconclusive() {
        status = Status::Inconclusive;
    }
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.t.to_string(),
                format!("{:.9}", r.phi),
                format!("{:.9}", r.reference),
                format!("{:.9}", r.ratio),
                r.stabilized.to_string(),
            ]
        })
        .collect();
    let mut json = report.to_json();
    json["series"] = s.to_json();
    Ok(Report::new(json, &["t", "phi", "reference", "ratio", "stabilized"], rows, status))
}

pub fn parse_pi_bound(s: &str) -> Result<PiBound> {
    if s.eq_ignore_ascii_case("unbounded") {
        return Ok(PiBound::Unbounded);
    }
    Ok(PiBound::Finite(s.parse().with_context(|| format!("invalid bound {s:?}"))?))
}

pub fn audit(cfg: &RunConfig, profile: &str, pi_bound: &str, mode: AuditMode, t: Option<&[f64]>) -> Result<Report> {
    let spec = FieldSpec::new(cfg.characteristic)?;
    let profile = EnvelopeProfile::parse(spec, profile, parse_pi_bound(pi_bound)?)?;
    let mut params = AuditParams::default();
    if let Some(t) = t {
        params.t_samples = t.to_vec();
    }
    params.truncation = cfg.series_truncation;
    if let Some(w) = cfg.weight {
        params.weight = w;
    }
    let v = serre_audit(&profile, mode, &params)?;
    let status = match v.outcome {
        AuditOutcome::Inconclusive => Status::Inconclusive,
        AuditOutcome::Contradiction { .. } if !v.verify_witness() => Status::Violation,
        _ => Status::Ok,
    };
    let mut json = v.to_json();
    json["profile"] = profile.to_json();
    let outcome = v.outcome.to_string();
    let mut rows: Vec<Vec<String>> = v
        .evaluations
        .iter()
        .map(|e| {
            vec![
                outcome.clone(),
                e.t.to_string(),
                format!("{:.9}", e.lhs),
                format!("{:.9}", e.rhs),
                e.reliable.to_string(),
            ]
        })
        .collect();
    if rows.is_empty() {
        rows.push(vec![outcome, String::new(), String::new(), String::new(), String::new()]);
    }
    Ok(Report::new(json, &["outcome", "t", "lhs", "rhs", "reliable"], rows, status))
}

pub fn rational(cfg: &RunConfig, profile: &str, pi_finite: bool) -> Result<Report> {
    require_rational(cfg, "the rational check")?;
    let profile = EnvelopeProfile::parse(FieldSpec::RATIONALS, profile, PiBound::Unbounded)?;
    let r = rational_check(&profile, pi_finite)?;
    let mut json = r.to_json();
    json["profile"] = profile.to_json();
    json["pi_finite"] = json!(pi_finite);
    let verdict = json["verdict"].as_str().unwrap_or_default().to_string();
    let rows = r.justification.iter().map(|j| vec![verdict.clone(), j.clone()]).collect();
    Ok(Report::new(json, &["verdict", "justification"], rows, Status::Ok))
}

pub fn homotopy(cfg: &RunConfig, input: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
    let ch = value.get("field").and_then(|v| v.as_u64()).context("missing integer key \"field\"")?;
    let (norm, unnorm, t) = with_field!(ch, f => {
        let v = SimplicialVectorSpace::from_json(f, &value)?;
        (homotopy_dims(&v)?, homotopy_dims_unnormalized(&v)?, v.truncation())
    });
    let _ = cfg;
    let status = if norm == unnorm { Status::Ok } else { Status::Violation };
    let json = json!({
        "field": ch,
        "truncation": t,
        "certified_degree": t.checked_sub(1),
        "dims": dims_json(&norm),
        "dims_unnormalized": dims_json(&unnorm),
    });
    let rows = graded_rows(&[&strings(&norm.0), &strings(&unnorm.0)]);
    Ok(Report::new(json, &["degree", "dim", "dim_unnormalized"], rows, status))
}

/// Random objects with known homotopy, checked by both chain functors.
pub fn check(cfg: &RunConfig, count: usize) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let top = cfg.truncation.unwrap_or(3);
    let mut rows = Vec::with_capacity(count);
    let mut failures = 0;
    for i in 0..count {
        let (levels, expected, norm, unnorm) = with_field!(cfg.characteristic, f => {
            let obj = random_object(f, top.saturating_sub(1), top, &mut rng)?;
            obj.space.validate()?;
            (obj.space.level_dims().to_vec(), obj.expected.truncated(top), homotopy_dims(&obj.space)?, homotopy_dims_unnormalized(&obj.space)?)
        });
        let ok = norm == expected && unnorm == expected;
        if !ok {
            failures += 1;
        }
        rows.push((i, levels, expected, norm, unnorm, ok));
    }
    let status = if failures == 0 { Status::Ok } else { Status::Violation };
    let objects: Vec<_> = rows
        .iter()
        .map(|(i, l, e, n, u, ok)| json!({"index": i, "level_dims": l, "expected": e.0, "normalized": n.0, "unnormalized": u.0, "ok": ok}))
        .collect();
    let json = json!({
        "field": cfg.characteristic,
        "seed": cfg.seed,
        "count": count,
        "failures": failures,
        "objects": objects,
    });
    let table = rows
        .iter()
        .map(|(i, l, e, n, u, ok)| {
            let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            vec![i.to_string(), join(l), join(&e.0), join(&n.0), join(&u.0), ok.to_string()]
        })
        .collect();
    Ok(Report::new(json, &["index", "level_dims", "expected", "normalized", "unnormalized", "ok"], table, status))
}
