//! Envelope bookkeeping on Poincaré series and the growth contradiction for
//! connected algebras with finite André–Quillen homology and bounded homotopy.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::series::{phi_eval, sphere_series_char0, sphere_series_charp, TruncatedSeries};

/// Bound `D` on `ϑ(A, t)` over `0 ≤ t < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PiBound {
    Finite(u64),
    Unbounded,
}

/// The dimensions `q_s = dim H^Q_s(A)` of a connected algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeProfile {
    field: FieldSpec,
    dims: BTreeMap<usize, usize>,
    pi_bound: PiBound,
}

impl EnvelopeProfile {
    /// Zero entries are allowed below the top degree only; `D > p` is
    /// required when `D` is finite and the characteristic is `p > 0`.
    pub fn new(field: FieldSpec, dims: BTreeMap<usize, usize>, pi_bound: PiBound) -> Result<Self> {
        if dims.contains_key(&0) {
            return Err(Error::Profile("degrees start at 1 for a connected algebra".into()));
        }
        if let Some((&s, &q)) = dims.iter().next_back() {
            if q == 0 {
                return Err(Error::Profile(format!("top recorded degree {s} has q = 0")));
            }
        }
        match pi_bound {
            PiBound::Finite(0) => return Err(Error::Profile("the bound D must be positive".into())),
            PiBound::Finite(d) if !field.is_rational() && d <= field.characteristic() => {
                return Err(Error::Profile(format!("the bound D = {d} must exceed p = {}", field.characteristic())))
            }
            _ => {}
        }
        Ok(EnvelopeProfile { field, dims, pi_bound })
    }

    /// Parses `s:q` pairs separated by commas, e.g. `2:1,5:1`; empty means no classes.
    pub fn parse(field: FieldSpec, spec: &str, pi_bound: PiBound) -> Result<Self> {
        let mut dims = BTreeMap::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (s, q) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected degree:dim, got {part:?}")))?;
            let s: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad degree in {part:?}")))?;
            let q: usize = q.trim().parse().map_err(|_| Error::Parse(format!("bad dimension in {part:?}")))?;
            if dims.insert(s, q).is_some() {
                return Err(Error::Parse(format!("degree {s} given twice")));
            }
        }
        EnvelopeProfile::new(field, dims, pi_bound)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn pi_bound(&self) -> PiBound {
        self.pi_bound
    }

    /// `q_s`, zero when unrecorded.
    pub fn q(&self, s: usize) -> usize {
        self.dims.get(&s).copied().unwrap_or(0)
    }

    /// `n = max{s | q_s ≠ 0}`; `None` for the empty profile.
    pub fn top_degree(&self) -> Option<usize> {
        self.dims.iter().rev().find(|(_, &q)| q > 0).map(|(&s, _)| s)
    }

    /// Degrees with `q_s > 0`.
    pub fn support(&self) -> Vec<usize> {
        self.dims.iter().filter(|(_, &q)| q > 0).map(|(&s, _)| s).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dims: BTreeMap<String, usize> = self.dims.iter().map(|(s, q)| (s.to_string(), *q)).collect();
        json!({
            "field": self.field.characteristic(),
            "dims": dims,
            "top_degree": self.top_degree(),
            "pi_bound": match self.pi_bound { PiBound::Finite(d) => json!(d), PiBound::Unbounded => json!("unbounded") },
        })
    }
}

/// Series source for sphere factors `ϑ(q, n, ·)`.
pub trait SeriesSource {
    fn sphere(&self, q: usize, n: usize, m: usize) -> Result<TruncatedSeries>;
}

/// Closed forms over the rationals; brute force with weight bound `weight` over `𝔽_p`.
#[derive(Clone, Copy, Debug)]
pub struct DefaultSeries {
    pub field: FieldSpec,
    pub weight: usize,
}

impl SeriesSource for DefaultSeries {
    fn sphere(&self, q: usize, n: usize, m: usize) -> Result<TruncatedSeries> {
        if self.field.is_rational() {
            sphere_series_char0(q, n, m)
        } else {
            Ok(sphere_series_charp(q, n, self.field.characteristic(), m, self.weight)?.series)
        }
    }
}

/// One coefficientwise inequality `lhs ≤ rhs`, evaluated on the split
/// realization `⊗_s S(H^Q_s, s)` of the profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStage {
    pub stage: usize,
    pub lhs_label: String,
    pub rhs_label: String,
    pub lhs: TruncatedSeries,
    pub rhs: TruncatedSeries,
    pub first_violation: Option<usize>,
}

impl ChainStage {
    fn new(stage: usize, lhs_label: String, rhs_label: String, lhs: TruncatedSeries, rhs: TruncatedSeries) -> Self {
        let first_violation = lhs.first_violation(&rhs);
        ChainStage { stage, lhs_label, rhs_label, lhs, rhs, first_violation }
    }

    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "stage": self.stage,
            "lhs_label": self.lhs_label,
            "rhs_label": self.rhs_label,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "holds": self.holds(),
            "first_violation": self.first_violation,
        })
    }
}

/// The envelope inequalities for stages `1..=n-2` and their iterate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeChain {
    pub stages: Vec<ChainStage>,
    /// `ϑ(A(n-2)) ≤ ϑ(A)·∏_{s=1}^{n-2} ϑ(H^Q_s, s+1)`; absent when `n < 2`.
    pub iterated: Option<ChainStage>,
}

impl EnvelopeChain {
    pub fn all_hold(&self) -> bool {
        self.stages.iter().chain(self.iterated.iter()).all(ChainStage::holds)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "stages": self.stages.iter().map(ChainStage::to_json).collect::<Vec<_>>(),
            "iterated": self.iterated.as_ref().map(ChainStage::to_json),
        })
    }
}

/// `ϑ` of the stage `A(s) = ⊗_{j>s} S(H^Q_j, j)` of the split realization.
fn stage_series(profile: &EnvelopeProfile, src: &dyn SeriesSource, s: usize, m: usize) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::one(m);
    for j in profile.support().into_iter().filter(|&j| j > s) {
        acc = acc.mul(&src.sphere(profile.q(j), j, m)?)?;
    }
    Ok(acc)
}

/// The inequalities `ϑ(A(s)) ≤ ϑ(A(s-1))·ϑ(H^Q_s(A), s+1)`, `s = 1..=n-2`,
/// and their iterate, instantiated on the split realization of the profile
/// through `t^m`.
pub fn envelope_chain(profile: &EnvelopeProfile, m: usize) -> Result<EnvelopeChain> {
    envelope_chain_with(profile, &DefaultSeries { field: profile.field, weight: m.max(1) }, m)
}

/// [`envelope_chain`] with an explicit series source.
pub fn envelope_chain_with(profile: &EnvelopeProfile, src: &dyn SeriesSource, m: usize) -> Result<EnvelopeChain> {
    let n = match profile.top_degree() {
        Some(n) if n >= 2 => n,
        _ => return Ok(EnvelopeChain { stages: Vec::new(), iterated: None }),
    };
    let mut stages = Vec::with_capacity(n - 2);
    let mut factors = TruncatedSeries::one(m);
    for s in 1..=n - 2 {
        let sphere = src.sphere(profile.q(s), s + 1, m)?;
        let lhs = stage_series(profile, src, s, m)?;
        let rhs = stage_series(profile, src, s - 1, m)?.mul(&sphere)?;
        factors = factors.mul(&sphere)?;
        stages.push(ChainStage::new(
            s,
            format!("ϑ(A({s}))"),
            format!("ϑ(A({}))·ϑ(H^Q_{s}, {})", s - 1, s + 1),
            lhs,
            rhs,
        ));
    }
    let lhs = stage_series(profile, src, n - 2, m)?;
    let rhs = stage_series(profile, src, 0, m)?.mul(&factors)?;
    if lhs.truncation() == 0 && m > 0 {
        return Err(Error::Truncation("no certified coefficients beyond degree 0".into()));
    }
    let iterated = ChainStage::new(
        n - 2,
        format!("ϑ(A({}))", n - 2),
        if n == 2 { "ϑ(A)".to_string() } else { format!("ϑ(A)·∏_{{s=1}}^{{{}}} ϑ(H^Q_s, s+1)", n - 2) },
        lhs,
        rhs,
    );
    Ok(EnvelopeChain { stages, iterated: Some(iterated) })
}

/// `ϑ(H^Q_{n-1}, n-1)·ϑ(H^Q_n, n)`, the series of the two-stage algebra `A(n-2)`.
pub fn splitting_series(profile: &EnvelopeProfile, m: usize) -> Result<TruncatedSeries> {
    splitting_series_with(profile, &DefaultSeries { field: profile.field, weight: m.max(1) }, m)
}

/// [`splitting_series`] with an explicit series source.
pub fn splitting_series_with(profile: &EnvelopeProfile, src: &dyn SeriesSource, m: usize) -> Result<TruncatedSeries> {
    let n = profile.top_degree().filter(|&n| n >= 2).ok_or_else(|| Error::Profile("splitting needs n ≥ 2".into()))?;
    src.sphere(profile.q(n - 1), n - 1, m)?.mul(&src.sphere(profile.q(n), n, m)?)
}

/// Audit mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    /// Both sides replaced by their leading polynomials.
    Asymptotic,
    /// `φ` values from truncated series.
    Empirical,
}

/// Outcome of [`serre_audit`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum AuditOutcome {
    Consistent,
    Contradiction { witness: f64 },
    Inconclusive,
}

impl fmt::Display for AuditOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditOutcome::Consistent => write!(f, "consistent"),
            AuditOutcome::Contradiction { witness } => write!(f, "contradiction at t = {witness}"),
            AuditOutcome::Inconclusive => write!(f, "inconclusive at current truncation"),
        }
    }
}

/// A polynomial `Σ c_k t^k` with real coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }
}

/// Both sides of the final inequality at one `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// In empirical mode, whether every partial sum had stabilized.
    pub reliable: bool,
}

/// Verdict of [`serre_audit`] with its trace.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditVerdict {
    pub outcome: AuditOutcome,
    pub mode: AuditMode,
    pub top_degree: Option<usize>,
    /// `d = log_p D`.
    pub d: f64,
    /// `a = q_{n-1}/(n-2)!`, coefficient of `t^{n-2}` on the left.
    pub a: f64,
    /// `b = q_n/(n-1)!`, coefficient of `t^{n-1}` on the left.
    pub b: f64,
    /// `a t^{n-2} + b t^{n-1}` (asymptotic mode).
    pub lhs: Option<Polynomial>,
    /// `d + Σ_{s=1}^{n-2} q_s t^s/s!` (asymptotic mode).
    pub rhs: Option<Polynomial>,
    pub chain: Vec<String>,
    pub evaluations: Vec<Evaluation>,
    pub note: String,
}

impl AuditVerdict {
    /// Re-evaluates both sides at the witness.
    pub fn verify_witness(&self) -> bool {
        match (self.outcome, &self.lhs, &self.rhs) {
            (AuditOutcome::Contradiction { witness }, Some(l), Some(r)) => l.eval(witness) > r.eval(witness),
            (AuditOutcome::Contradiction { witness }, _, _) => {
                self.evaluations.iter().any(|e| e.t == witness && e.reliable && e.lhs > e.rhs)
            }
            _ => false,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut outcome = serde_json::to_value(self.outcome).expect("serializable");
        outcome["verified"] = json!(self.verify_witness());
        json!({
            "verdict": outcome,
            "mode": self.mode,
            "top_degree": self.top_degree,
            "d": self.d,
            "a": self.a,
            "b": self.b,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "chain": self.chain,
            "evaluations": self.evaluations,
            "note": self.note,
        })
    }
}

/// Witness search and empirical-mode parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditParams {
    /// First grid point and ratio of the geometric grid.
    pub grid_start: f64,
    pub grid_ratio: f64,
    pub grid_steps: usize,
    pub bisection_steps: usize,
    /// Sample points for the evaluation table (and empirical mode).
    pub t_samples: Vec<f64>,
    /// Series truncation and weight bound for empirical mode.
    pub truncation: usize,
    pub weight: usize,
}

impl Default for AuditParams {
    fn default() -> Self {
        AuditParams {
            grid_start: 0.5,
            grid_ratio: 2.0,
            grid_steps: 64,
            bisection_steps: 40,
            t_samples: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            truncation: 8,
            weight: 4,
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Decides whether the profile is compatible with `ϑ(A, t) ≤ D`.
pub fn serre_audit(profile: &EnvelopeProfile, mode: AuditMode, params: &AuditParams) -> Result<AuditVerdict> {
    if profile.field.is_rational() {
        return Err(Error::Unsupported("the audit needs positive characteristic; use the rational check".into()));
    }
    let p = profile.field.characteristic();
    let big_d = match profile.pi_bound {
        PiBound::Finite(d) => d,
        PiBound::Unbounded => return Err(Error::Profile("the audit needs a finite bound D".into())),
    };
    let d = (big_d as f64).ln() / (p as f64).ln();
    let n = match profile.top_degree() {
        Some(n) if n >= 2 => n,
        other => {
            let note = match other {
                None => "empty profile: the trivial algebra",
                Some(_) => "n = 1: no envelope stages, no growth term",
            };
            return Ok(AuditVerdict {
                outcome: AuditOutcome::Consistent,
                mode,
                top_degree: other,
                d,
                a: 0.0,
                b: 0.0,
                lhs: None,
                rhs: None,
                chain: Vec::new(),
                evaluations: Vec::new(),
                note: note.into(),
            });
        }
    };
    let a = profile.q(n - 1) as f64 / factorial(n - 2);
    let b = profile.q(n) as f64 / factorial(n - 1);
    let mut chain: Vec<String> = (1..=n - 2)
        .map(|s| format!("ϑ(A({s}),t) ≤ ϑ(A({}),t)·ϑ(H^Q_{s}(A),{},t)", s - 1, s + 1))
        .collect();
    chain.push(format!("ϑ(A({}),t) = ϑ(H^Q_{}(A),{},t)·ϑ(H^Q_{n}(A),{n},t)", n - 2, n - 1, n - 1));
    chain.push(format!("ϑ(A,t) ≤ D = {big_d}"));
    chain.push(format!(
        "φ(H^Q_{}(A),{},t) + φ(H^Q_{n}(A),{n},t) ≤ d + Σ_{{s=1}}^{{{}}} φ(H^Q_s(A),s+1,t)",
        n - 1,
        n - 1,
        n - 2
    ));
    match mode {
        AuditMode::Asymptotic => {
            let mut lc = vec![0.0; n];
            lc[n - 2] += a;
            lc[n - 1] += b;
            let mut rc = vec![0.0; n - 1];
            rc[0] = d;
            for (s, c) in rc.iter_mut().enumerate().skip(1) {
                *c += profile.q(s) as f64 / factorial(s);
            }
            let lhs = Polynomial { coeffs: lc };
            let rhs = Polynomial { coeffs: rc };
            chain.push("a t^{n-2} + b t^{n-1} ≤ d + f(t) for t ≫ 0".into());
            let gap = |t: f64| lhs.eval(t) - rhs.eval(t);
            let witness = find_witness(&gap, params);
            let evaluations =
                params.t_samples.iter().map(|&t| Evaluation { t, lhs: lhs.eval(t), rhs: rhs.eval(t), reliable: true }).collect();
            let outcome = match witness {
                Some(w) => AuditOutcome::Contradiction { witness: w },
                None => AuditOutcome::Inconclusive,
            };
            Ok(AuditVerdict {
                outcome,
                mode,
                top_degree: Some(n),
                d,
                a,
                b,
                lhs: Some(lhs),
                rhs: Some(rhs),
                chain,
                evaluations,
                note: "a = q_{n-1}/(n-2)!, b = q_n/(n-1)!, f(t) = Σ_{s=1}^{n-2} q_s t^s/s!".into(),
            })
        }
        AuditMode::Empirical => {
            let src = DefaultSeries { field: profile.field, weight: params.weight };
            let m = params.truncation;
            let left = splitting_series_with(profile, &src, m)?;
            let right: Vec<TruncatedSeries> =
                (1..=n - 2).map(|s| src.sphere(profile.q(s), s + 1, m)).collect::<Result<_>>()?;
            let mut evaluations = Vec::with_capacity(params.t_samples.len());
            for &t in &params.t_samples {
                let l = phi_eval(&left, p, t)?;
                let mut r = d;
                let mut reliable = true;
                for s in &right {
                    let v = phi_eval(s, p, t)?;
                    r += v.value;
                    reliable &= v.stabilized;
                }
                evaluations.push(Evaluation { t, lhs: l.value, rhs: r, reliable });
            }
            let witness = evaluations.iter().find(|e| e.reliable && e.lhs > e.rhs).map(|e| e.t);
            let outcome = match witness {
                Some(w) => AuditOutcome::Contradiction { witness: w },
                None => AuditOutcome::Inconclusive,
            };
            Ok(AuditVerdict {
                outcome,
                mode,
                top_degree: Some(n),
                d,
                a,
                b,
                lhs: None,
                rhs: None,
                chain,
                evaluations,
                note: format!(
                    "left side: lower bound from {} coefficients; right side: partial sums, used only when stabilized",
                    left.truncation() + 1
                ),
            })
        }
    }
}

/// Smallest grid point with a positive gap, refined by bisection toward the
/// crossing while keeping the gap positive.
fn find_witness(gap: &dyn Fn(f64) -> f64, params: &AuditParams) -> Option<f64> {
    let mut prev = None;
    let mut t = params.grid_start;
    for _ in 0..params.grid_steps {
        if gap(t) > 0.0 {
            let (mut lo, mut hi) = match prev {
                Some(p) => (p, t),
                None => return Some(t),
            };
            for _ in 0..params.bisection_steps {
                let mid = 0.5 * (lo + hi);
                if gap(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        prev = Some(t);
        t *= params.grid_ratio;
    }
    None
}

/// Outcome of [`rational_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RationalVerdict {
    /// The empty profile: `A = ℓ`.
    TrivialAlgebra,
    /// Even-only support with finite homotopy: the profile must be empty.
    ForcedEmpty,
    /// Some odd degree carries a class.
    NotApplicable,
    /// Even-only support, homotopy not asserted finite.
    NoConstraint,
}

/// Rational verdict with its justification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalReport {
    pub verdict: RationalVerdict,
    pub justification: Vec<String>,
}

impl RationalReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({"verdict": self.verdict, "justification": self.justification})
    }
}

/// Over the rationals, `H^Q_{odd} = 0` with finite support forces `Iπ_*A = 0`.
pub fn rational_check(profile: &EnvelopeProfile, pi_finite: bool) -> Result<RationalReport> {
    if !profile.field.is_rational() {
        return Err(Error::Unsupported("the rational check needs characteristic 0".into()));
    }
    let support = profile.support();
    if support.is_empty() {
        return Ok(RationalReport {
            verdict: RationalVerdict::TrivialAlgebra,
            justification: vec!["no André–Quillen homology: A ≃ ℓ".into()],
        });
    }
    let odd: Vec<usize> = support.iter().copied().filter(|s| s % 2 == 1).collect();
    if !odd.is_empty() {
        return Ok(RationalReport {
            verdict: RationalVerdict::NotApplicable,
            justification: vec![
                format!("odd degrees carry classes: {odd:?}"),
                "the vanishing argument needs H^Q_odd = 0; A⟨r,s⟩ shows finite homotopy is possible".into(),
            ],
        });
    }
    let mut justification: Vec<String> = support
        .iter()
        .map(|&s| format!("S(ℓ^{}, {s}) has π = polynomial on degree {s} classes, nonzero in every degree {s}k", profile.q(s)))
        .collect();
    justification.push(format!("the bottom class sits in degree {} with x^k ≠ 0 for all k", support[0]));
    let verdict = if pi_finite {
        justification.push("finite homotopy forces Iπ_*A = 0, so the profile must be empty".into());
        RationalVerdict::ForcedEmpty
    } else {
        justification.push("homotopy not asserted finite: no constraint".into());
        RationalVerdict::NoConstraint
    };
    Ok(RationalReport { verdict, justification })
}
