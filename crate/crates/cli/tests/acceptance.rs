//! Acceptance checks. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{ensure, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use simpalg_core::audit::{
    rational_check, serre_audit, AuditMode, AuditOutcome, AuditParams, EnvelopeProfile, PiBound, RationalVerdict,
};
use simpalg_core::barcof::{a_rs_tables, cofiber_homotopy, cofiber_inequality, representing_map, AlgebraMap};
use simpalg_core::sample::random_object;
use simpalg_core::series::{asymptotic_check, sphere_series_char0, sphere_series_charp, STABILIZATION_TOL};
use simpalg_core::simplicial::homotopy_dims_unnormalized;
use simpalg_core::symalg::homotopy::weight_homotopy;
use simpalg_core::symalg::{
    hurewicz, sphere_algebra, sphere_cells, sphere_with_acyclic_cells, symmetric_power, CellAlgebra,
};
use simpalg_core::{
    eilenberg_maclane, homotopy_dims, sphere_homotopy, Field, FieldSpec, GradedDims, PrimeField, Rationals,
    SimplicialVectorSpace,
};

type Check = (&'static str, fn() -> Result<String>);

/// Slack in the monotonicity comparison of the growth ratios.
const MONOTONE_SLACK: f64 = 1e-12;

fn fields() -> (Rationals, PrimeField) {
    (Rationals, PrimeField::new(2).unwrap())
}

fn dual_agree<F: Field>(v: &SimplicialVectorSpace<F>) -> Result<GradedDims> {
    let a = homotopy_dims(v)?;
    let b = homotopy_dims_unnormalized(v)?;
    ensure!(a == b, "normalized {:?} vs unnormalized {:?}", a.0, b.0);
    Ok(a)
}

fn em_case<F: Field>(f: &F) -> Result<usize> {
    let mut count = 0;
    for q in [1, 2] {
        for n in [1, 2, 3] {
            let top = n + 4;
            let k = eilenberg_maclane(f, q, n, top + 1)?;
            let dims = homotopy_dims(&k)?;
            ensure!(dims == GradedDims::concentrated(top + 1, n, q), "K(q={q}, n={n}): {:?}", dims.0);
            count += 1;
        }
    }
    Ok(count)
}

fn c1() -> Result<String> {
    let (q, f2) = fields();
    let n = em_case(&q)? + em_case(&f2)?;
    Ok(format!("{n} instances, exact"))
}

fn dual_instances<F: Field>(f: &F, seed: u64) -> Result<usize> {
    let mut count = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..50 {
        let obj = random_object(f, 3, 4, &mut rng)?;
        obj.space.validate()?;
        let h = dual_agree(&obj.space)?;
        ensure!(h == obj.expected.truncated(4), "random object: {:?} vs {:?}", h.0, obj.expected.0);
        count += 1;
    }
    for q in [1, 2] {
        for n in [1, 2, 3] {
            let k = eilenberg_maclane(f, q, n, n + 5)?;
            dual_agree(&k)?;
            count += 1;
            let levels = if q * n <= 2 { n + 3 } else { n + 2 };
            let small = k.truncate(levels)?;
            for d in 2..=3 {
                dual_agree(&symmetric_power(&small, d))?;
                count += 1;
            }
        }
    }
    Ok(count)
}

fn c2() -> Result<String> {
    let (q, f2) = fields();
    let f3 = PrimeField::new(3)?;
    let n = dual_instances(&q, 1)? + dual_instances(&f2, 2)? + dual_instances(&f3, 3)?;
    Ok(format!("{n} objects, exact"))
}

fn c3() -> Result<String> {
    let mut count = 0;
    for q in 1..=2 {
        for n in 1..=4 {
            let r = sphere_homotopy(&Rationals, q, n, 9, 8 / n)?;
            let closed = sphere_series_char0(q, n, 8)?;
            let got: Vec<u64> = r.dims.0.iter().map(|&d| d as u64).collect();
            ensure!(got == closed.coeffs(), "q={q} n={n}: {got:?} vs {:?}", closed.coeffs());
            ensure!(r.stable_flags.iter().all(|&x| x), "q={q} n={n}: not certified");
            count += 1;
        }
    }
    Ok(format!("{count} spheres through degree 8, exact"))
}

/// Sum of weights `0..=w` and the stable prefix length set by weight `w + 1`.
fn weight_truncated<F: Field>(alg: &CellAlgebra<F>, t: usize, w: u32) -> Result<(GradedDims, usize)> {
    let mut total = GradedDims::zeros(t);
    for d in 0..=w {
        total = total.add(&weight_homotopy(alg, d, t, false)?);
    }
    let next = weight_homotopy(alg, w + 1, t, false)?;
    let stable = (0..t).take_while(|&k| next.get(k) == 0).count();
    Ok((total, stable))
}

fn dold_case<F: Field>(f: &F) -> Result<usize> {
    let mut checked = 0;
    for n in 1..=2 {
        let t = 6;
        let w = 4;
        let (cells, s1) = weight_truncated(&sphere_cells(f, 1, n)?, t, w)?;
        let explicit = sphere_algebra(f, 1, n, t, w as usize)?.homotopy_dims()?;
        for k in n + 1..=n + 2 {
            let (acyclic, s2) = weight_truncated(&sphere_with_acyclic_cells(f, n, k)?, t, w)?;
            let stable = s1.min(s2);
            ensure!(stable > n + 1, "n={n}: only {stable} stable degrees");
            ensure!(
                cells.truncated(stable) == acyclic.truncated(stable),
                "n={n} k={k}: {:?} vs {:?}",
                cells.0,
                acyclic.0
            );
            ensure!(
                explicit.truncated(stable) == cells.truncated(stable),
                "n={n}: explicit {:?} vs cells {:?}",
                explicit.0,
                cells.0
            );
            checked += 1;
        }
    }
    Ok(checked)
}

fn c4() -> Result<String> {
    let (q, f2) = fields();
    let n = dold_case(&q)? + dold_case(&f2)?;
    Ok(format!("{n} model pairs agree in stable degrees"))
}

fn hurewicz_case<F: Field>(f: &F) -> Result<usize> {
    let mut count = 0;
    for n in 1..=3 {
        let alg = sphere_cells(f, 1, n)?;
        ensure!(hurewicz(&alg, n, 2)?.is_isomorphism(), "n={n}: not an isomorphism in degree n");
        ensure!(hurewicz(&alg, n + 1, 2)?.is_surjective(), "n={n}: not onto in degree n+1");
        let explicit = sphere_algebra(f, 1, n, n + 3, 3)?;
        ensure!(explicit.hurewicz(n)?.is_isomorphism(), "n={n}: explicit model, degree n");
        ensure!(explicit.hurewicz(n + 1)?.is_surjective(), "n={n}: explicit model, degree n+1");
        count += 1;
    }
    Ok(count)
}

fn c5() -> Result<String> {
    let (q, f2) = fields();
    let n = hurewicz_case(&q)? + hurewicz_case(&f2)?;
    Ok(format!("{n} spheres, exact"))
}

fn hq_case<F: Field>(f: &F) -> Result<usize> {
    let mut count = 0;
    for q in 1..=2 {
        for n in 1..=3 {
            let t = n + 3;
            let alg = sphere_cells(f, q, n)?;
            let expected = GradedDims::concentrated(t, n, q);
            let via_q = homotopy_dims(&alg.indecomposables(t)?)?.truncated(t);
            let (_, lin) = alg.linear_complex(None, t)?;
            ensure!(via_q == expected, "q={q} n={n}: {:?}", via_q.0);
            ensure!(lin.homology_dims().truncated(t) == expected, "q={q} n={n}: cellular {:?}", lin.homology_dims().0);
            count += 1;
        }
    }
    Ok(count)
}

fn c6() -> Result<String> {
    let (q, f2) = fields();
    let n = hq_case(&q)? + hq_case(&f2)?;
    Ok(format!("{n} spheres, exact"))
}

fn c7() -> Result<String> {
    let mut parts = Vec::new();
    for (s, levels, w) in [(2, 6, 2), (3, 7, 3)] {
        let started = Instant::now();
        let report = a_rs_tables(1, s, levels, w, w)?;
        ensure!(report.pi.flags.iter().all(|&x| x), "(1,{s}): flags {:?}", report.pi.flags);
        ensure!(report.pi.certified_degree + 1 == levels, "(1,{s}): certified through {}", report.pi.certified_degree);
        ensure!(report.mismatches().is_empty(), "(1,{s}): mismatches at {:?}", report.mismatches());
        ensure!(report.pi.dims == report.pi_table_dims(), "(1,{s}): {:?}", report.pi.dims.0);
        ensure!(report.pi_cell_model == report.pi.dims, "(1,{s}): cell model {:?}", report.pi_cell_model.0);
        let mut table = vec![0; levels];
        for &(d, q) in &report.hq_table {
            if d < levels {
                table[d] = q;
            }
        }
        ensure!(report.hq_computed.truncated(levels).0 == table, "(1,{s}): H^Q {:?}", report.hq_computed.0);
        parts.push(format!("(1,{s}) through degree {} in {:.2}s", levels - 1, started.elapsed().as_secs_f64()));
    }
    Ok(parts.join(", "))
}

fn triple(name: &str, m: usize, n: usize, levels: usize, c: &GradedDims, c_flags: &[bool]) -> Result<usize> {
    let wa = (levels / m).max(1);
    let wb = (levels / n).max(1);
    let a = sphere_homotopy(&Rationals, 1, m, levels, wa)?;
    let b = sphere_homotopy(&Rationals, 1, n, levels, wb)?;
    let stable = (0..levels).take_while(|&k| c_flags[k] && a.stable_flags[k] && b.stable_flags[k]).count();
    ensure!(stable > 0, "{name}: nothing certified");
    if let Some(k) = cofiber_inequality(&a.dims, &b.dims, c, stable - 1) {
        anyhow::bail!("{name}: inequality fails in degree {k}");
    }
    Ok(stable)
}

fn c8() -> Result<String> {
    let q = Rationals;
    let mut parts = Vec::new();
    let levels = 5;
    let b = Arc::new(sphere_algebra(&q, 1, 2, levels, 1)?);
    let id = representing_map(&b, 2, 1, vec![(0, q.one())])?;
    let h = cofiber_homotopy(&id, 2, 2)?;
    parts.push(("identity", triple("identity", 2, 2, levels, &h.dims, &h.flags)?));
    let zero = AlgebraMap::zero(&b, 2, 1)?;
    let h = cofiber_homotopy(&zero, 2, 2)?;
    parts.push(("zero", triple("zero", 2, 2, levels, &h.dims, &h.flags)?));
    for (s, levels, w) in [(1, 5, 2), (2, 6, 2), (3, 7, 3)] {
        let r = a_rs_tables(1, s, levels, w, w)?;
        let name = match s {
            1 => "A<1,1>",
            2 => "A<1,2>",
            _ => "A<1,3>",
        };
        parts.push((name, triple(name, 2 * s, 2, levels, &r.pi.dims, &r.pi.flags)?));
    }
    let summary: Vec<String> = parts.iter().map(|(n, k)| format!("{n} ≤ {}", k - 1)).collect();
    Ok(format!("holds on {}", summary.join(", ")))
}

fn profiles(n: usize) -> Vec<BTreeMap<usize, usize>> {
    let mut out = vec![BTreeMap::new()];
    for s in 1..=n {
        let choices: &[usize] = if s == n { &[1, 2] } else { &[0, 1, 2] };
        out = out
            .into_iter()
            .flat_map(|m| {
                choices.iter().map(move |&q| {
                    let mut m = m.clone();
                    if q > 0 {
                        m.insert(s, q);
                    }
                    m
                })
            })
            .collect();
    }
    out
}

fn c9() -> Result<String> {
    let params = AuditParams::default();
    let mut contradictions = 0;
    let mut consistent = 0;
    for n in 1..=4 {
        for dims in profiles(n) {
            for p in [2u64, 3] {
                for d in [p + 1, 100] {
                    let profile = EnvelopeProfile::new(FieldSpec::new(p)?, dims.clone(), PiBound::Finite(d))?;
                    let v = serre_audit(&profile, AuditMode::Asymptotic, &params)?;
                    if n == 1 {
                        ensure!(v.outcome == AuditOutcome::Consistent, "{dims:?} p={p} D={d}: {}", v.outcome);
                        consistent += 1;
                    } else {
                        ensure!(
                            matches!(v.outcome, AuditOutcome::Contradiction { .. }),
                            "{dims:?} p={p} D={d}: {}",
                            v.outcome
                        );
                        ensure!(v.verify_witness(), "{dims:?} p={p} D={d}: witness does not verify");
                        contradictions += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{contradictions} verified contradictions, {consistent} consistent"))
}

fn c10() -> Result<String> {
    let (q, n, p, m, w) = (1, 2, 2, 8, 4);
    let c = sphere_series_charp(q, n, p, m, w)?;
    ensure!(!c.is_short(), "series certified only through {}", c.series.truncation());
    let grid: Vec<f64> = (1..=16).map(|k| 0.25 * k as f64).collect();
    let r = asymptotic_check(&c.series, q, n, p, &grid)?;
    let prefix = r.stabilized_prefix();
    ensure!(prefix.len() >= 2, "only {} stabilized samples", prefix.len());
    ensure!(r.monotone_toward_one(), "ratios {:?}", prefix.iter().map(|x| x.ratio).collect::<Vec<_>>());
    ensure!(
        prefix.windows(2).all(|w| (w[1].ratio - 1.0).abs() <= (w[0].ratio - 1.0).abs() + MONOTONE_SLACK),
        "trend is not monotone"
    );
    ensure!(r.inconclusive(), "run not flagged inconclusive");
    let last = prefix.last().unwrap();
    Ok(format!(
        "monotone on t ≤ {} (ratio {:.3}), inconclusive beyond; tol {STABILIZATION_TOL:e}, slack {MONOTONE_SLACK:e}",
        last.t, last.ratio
    ))
}

fn c11() -> Result<String> {
    let m = 12;
    let closed = sphere_series_char0(1, 3, m)?;
    let mut bounded = vec![0u64; m + 1];
    bounded[0] = 1;
    bounded[3] = 1;
    ensure!(closed.coeffs() == bounded.as_slice(), "closed form {:?}", closed.coeffs());
    let brute = sphere_homotopy(&Rationals, 1, 3, 9, 2)?;
    ensure!(brute.stable_flags.iter().all(|&x| x), "brute force not certified");
    ensure!(brute.dims.0 == [1, 0, 0, 1, 0, 0, 0, 0, 0], "brute force {:?}", brute.dims.0);
    let a12 = EnvelopeProfile::parse(FieldSpec::RATIONALS, "2:1,5:1", PiBound::Unbounded)?;
    let v = rational_check(&a12, true)?;
    ensure!(v.verdict == RationalVerdict::NotApplicable, "A<1,2> profile: {:?}", v.verdict);
    for even in ["2:1", "2:1,4:2", "4:1,6:1,8:2"] {
        let profile = EnvelopeProfile::parse(FieldSpec::RATIONALS, even, PiBound::Unbounded)?;
        let v = rational_check(&profile, true)?;
        ensure!(v.verdict == RationalVerdict::ForcedEmpty, "{even}: {:?}", v.verdict);
    }
    Ok("series of S(ℓ,3) is 1 + t^3; verdicts as expected".into())
}

fn c12() -> Result<String> {
    let bin = env!("CARGO_BIN_EXE_simpalg");
    let runs: &[&[&str]] = &[
        &["--char", "2", "pi-sphere", "-q", "1", "-n", "1", "-T", "4"],
        &["--char", "0", "rational-example", "-r", "1", "-s", "2", "-T", "5"],
        &["--char", "2", "audit", "--profile", "2:1,3:1", "--pi-bound", "3"],
        &["--char", "2", "--output", "csv", "series", "-q", "1", "-n", "2", "-M", "6", "--asymptotic"],
        &["--char", "3", "--seed", "11", "check", "--count", "10"],
        &["--char", "0", "--output", "table", "em", "-q", "2", "-n", "2"],
    ];
    for args in runs {
        let first = Command::new(bin).args(*args).output()?;
        let second = Command::new(bin).args(*args).output()?;
        ensure!(!first.stdout.is_empty(), "{args:?}: empty output");
        ensure!(first.stdout == second.stdout, "{args:?}: stdout differs");
        ensure!(first.status.code() == second.status.code(), "{args:?}: exit codes differ");
    }
    Ok(format!("{} commands byte-identical", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [Check; 12] = [
        ("Eilenberg–MacLane homotopy", c1),
        ("normalized and unnormalized chains agree", c2),
        ("rational sphere homotopy matches closed forms", c3),
        ("weakly equivalent models give equal homotopy", c4),
        ("Hurewicz map in degrees n and n+1", c5),
        ("André–Quillen homology of spheres", c6),
        ("A<r,s> cofiber tables", c7),
        ("cofiber Poincaré series inequality", c8),
        ("Serre growth audit verdicts", c9),
        ("growth ratio trend with honest flagging", c10),
        ("rational bounded series and vanishing check", c11),
        ("deterministic CLI output", c12),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(anyhow::anyhow!("panic: {msg}"))
            }
        };
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {e:#} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
