//! Truncated Poincaré series, closed forms over the rationals, the `φ`
//! transform and the growth comparison `φ(V, n, t) ∼ q t^{n-1}/(n-1)!`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::simplicial::GradedDims;
use crate::symalg::sphere_homotopy;

/// A product of factors `(1 - t^n)^{-q}` and `(1 + t^n)^q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedForm {
    /// Pairs `(n, q)` for factors `(1 - t^n)^{-q}`.
    pub polynomial: Vec<(usize, usize)>,
    /// Pairs `(n, q)` for factors `(1 + t^n)^q`.
    pub exterior: Vec<(usize, usize)>,
}

impl ClosedForm {
    pub fn one() -> Self {
        ClosedForm::default()
    }

    /// Power series expansion through `t^m`.
    pub fn expand(&self, m: usize) -> Result<Vec<u64>> {
        let mut c = vec![0u64; m + 1];
        c[0] = 1;
        let overflow = || Error::Bounds("series coefficient exceeds 64 bits".into());
        for &(n, q) in &self.exterior {
            for _ in 0..q {
                for i in (n..=m).rev() {
                    c[i] = c[i].checked_add(c[i - n]).ok_or_else(overflow)?;
                }
            }
        }
        for &(n, q) in &self.polynomial {
            for _ in 0..q {
                for i in n..=m {
                    c[i] = c[i].checked_add(c[i - n]).ok_or_else(overflow)?;
                }
            }
        }
        Ok(c)
    }

    pub fn product(&self, other: &ClosedForm) -> ClosedForm {
        let merge = |a: &[(usize, usize)], b: &[(usize, usize)]| {
            let mut v: Vec<(usize, usize)> = Vec::new();
            for &(n, q) in a.iter().chain(b) {
                match v.iter_mut().find(|e| e.0 == n) {
                    Some(e) => e.1 += q,
                    None => v.push((n, q)),
                }
            }
            v.retain(|e| e.1 > 0);
            v.sort_unstable();
            v
        };
        ClosedForm { polynomial: merge(&self.polynomial, &other.polynomial), exterior: merge(&self.exterior, &other.exterior) }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factor = |sign: char, n: usize, q: usize| {
            let base = if n == 1 { format!("(1{sign}t)") } else { format!("(1{sign}t^{n})") };
            if q == 1 {
                base
            } else {
                format!("{base}^{q}")
            }
        };
        let num: Vec<String> = self.exterior.iter().map(|&(n, q)| factor('+', n, q)).collect();
        let den: Vec<String> = self.polynomial.iter().map(|&(n, q)| factor('-', n, q)).collect();
        let num = if num.is_empty() { "1".to_string() } else { num.join("") };
        if den.is_empty() {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{}", den.join(""))
        }
    }
}

/// Power series with nonnegative integer coefficients known through `t^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<u64>,
    closed_form: Option<ClosedForm>,
}

impl TruncatedSeries {
    /// Coefficients `a_0..a_M`; at least one is required.
    pub fn new(coeffs: Vec<u64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least the constant term");
        TruncatedSeries { coeffs, closed_form: None }
    }

    pub fn from_dims(dims: &GradedDims) -> Self {
        TruncatedSeries::new(dims.0.iter().map(|&d| d as u64).collect())
    }

    /// The expansion of a closed form through `t^m`, tagged with it.
    pub fn from_closed_form(form: ClosedForm, m: usize) -> Result<Self> {
        Ok(TruncatedSeries { coeffs: form.expand(m)?, closed_form: Some(form) })
    }

    /// The constant series `1` through `t^m`.
    pub fn one(m: usize) -> Self {
        TruncatedSeries::from_closed_form(ClosedForm::one(), m).expect("no overflow")
    }

    /// The constant series `c` through `t^m`.
    pub fn constant(c: u64, m: usize) -> Self {
        let mut coeffs = vec![0; m + 1];
        coeffs[0] = c;
        TruncatedSeries::new(coeffs)
    }

    /// Truncation order `M`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs[i]
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    /// Checks that the closed form, if any, reproduces the coefficients.
    pub fn check(&self) -> Result<()> {
        if let Some(form) = &self.closed_form {
            if form.expand(self.truncation())? != self.coeffs {
                return Err(Error::Mismatch(format!("coefficients disagree with {form}")));
            }
        }
        Ok(())
    }

    pub fn truncate(&self, m: usize) -> Self {
        let m = m.min(self.truncation());
        TruncatedSeries { coeffs: self.coeffs[..=m].to_vec(), closed_form: self.closed_form.clone() }
    }

    /// Cauchy product through the smaller truncation.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        let m = self.truncation().min(other.truncation());
        let mut coeffs = vec![0u64; m + 1];
        for (i, c) in coeffs.iter_mut().enumerate() {
            for j in 0..=i {
                let term = self.coeffs[j]
                    .checked_mul(other.coeffs[i - j])
                    .and_then(|x| c.checked_add(x))
                    .ok_or_else(|| Error::Bounds("series coefficient exceeds 64 bits".into()))?;
                *c = term;
            }
        }
        let closed_form = match (&self.closed_form, &other.closed_form) {
            (Some(a), Some(b)) => Some(a.product(b)),
            _ => None,
        };
        Ok(TruncatedSeries { coeffs, closed_form })
    }

    /// First index of the common range where `self ≤ other` fails.
    pub fn first_violation(&self, other: &TruncatedSeries) -> Option<usize> {
        self.coeffs.iter().zip(&other.coeffs).position(|(a, b)| a > b)
    }

    /// Coefficientwise `≤` on the common range.
    pub fn leq(&self, other: &TruncatedSeries) -> bool {
        self.first_violation(other).is_none()
    }

    /// `Σ a_i x^i` over the stored coefficients.
    pub fn partial_sum(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a as f64)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({"coeffs": self.coeffs, "truncation": self.truncation()});
        if let Some(form) = &self.closed_form {
            v["closed_form"] = json!(form.to_string());
        }
        v
    }
}

/// `ϑ(V, n, t)` over the rationals: `(1 - t^n)^{-q}` for even `n`,
/// `(1 + t^n)^q` for odd `n`, through `t^m`.
pub fn sphere_series_char0(q: usize, n: usize, m: usize) -> Result<TruncatedSeries> {
    if n == 0 {
        return Err(Error::Bounds("sphere degree must be at least 1".into()));
    }
    let mut form = ClosedForm::one();
    if q > 0 {
        if n.is_multiple_of(2) {
            form.polynomial.push((n, q));
        } else {
            form.exterior.push((n, q));
        }
    }
    TruncatedSeries::from_closed_form(form, m)
}

/// A computed series with the truncation that was asked for.
#[derive(Clone, Debug)]
pub struct CertifiedSeries {
    pub series: TruncatedSeries,
    pub requested: usize,
}

impl CertifiedSeries {
    /// Whether fewer coefficients were certified than requested.
    pub fn is_short(&self) -> bool {
        self.series.truncation() < self.requested
    }
}

/// `ϑ(V, n, t)` over `𝔽_p` by brute force, weights `0..=w`. Only degrees
/// certified and stable under raising the weight bound are kept.
pub fn sphere_series_charp(q: usize, n: usize, p: u64, m: usize, w: usize) -> Result<CertifiedSeries> {
    let field = PrimeField::new(p)?;
    if q == 0 {
        return Ok(CertifiedSeries { series: TruncatedSeries::one(m), requested: m });
    }
    let report = sphere_homotopy(&field, q, n, (m + 1).max(n), w)?;
    let top = report.stable_degree().unwrap_or(0).min(m);
    let series = TruncatedSeries::new((0..=top).map(|k| report.dims.get(k) as u64).collect());
    Ok(CertifiedSeries { series, requested: m })
}

/// Default relative tolerance for partial-sum stabilization in `φ`.
pub const STABILIZATION_TOL: f64 = 1e-3;

/// A value of `φ` from a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiValue {
    pub t: f64,
    /// `log_p` of the partial sum; a lower bound for the true value.
    pub value: f64,
    pub lower_bound: bool,
    /// The last quarter of the stored terms moves `φ` by less than the tolerance.
    pub stabilized: bool,
}

/// `φ(t) = log_p Σ a_i (1 - p^{-t})^i` from the stored coefficients.
pub fn phi_eval(series: &TruncatedSeries, p: u64, t: f64) -> Result<PhiValue> {
    phi_eval_with(series, p, t, STABILIZATION_TOL)
}

/// [`phi_eval`] with an explicit stabilization tolerance.
pub fn phi_eval_with(series: &TruncatedSeries, p: u64, t: f64, tol: f64) -> Result<PhiValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Bounds(format!("φ needs t > 0, got {t}")));
    }
    if p < 2 {
        return Err(Error::Bounds(format!("φ needs a prime base, got {p}")));
    }
    let x = 1.0 - (p as f64).powf(-t);
    let lp = (p as f64).ln();
    let m = series.truncation();
    let early = series.truncate(m - m.div_ceil(4));
    let full = series.partial_sum(x);
    let value = full.ln() / lp;
    let before = early.partial_sum(x).ln() / lp;
    let stabilized = (value - before).abs() <= tol * value.abs().max(1.0);
    Ok(PhiValue { t, value, lower_bound: true, stabilized })
}

/// One row of [`asymptotic_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub t: f64,
    pub phi: f64,
    pub reference: f64,
    pub ratio: f64,
    pub stabilized: bool,
}

/// Ratios `φ / (q t^{n-1}/(n-1)!)` at the sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub q: usize,
    pub n: usize,
    pub p: u64,
    pub truncation: usize,
    pub rows: Vec<AsymptoticRow>,
}

impl AsymptoticReport {
    /// Rows before the first unstabilized sample.
    pub fn stabilized_prefix(&self) -> &[AsymptoticRow] {
        let k = self.rows.iter().position(|r| !r.stabilized).unwrap_or(self.rows.len());
        &self.rows[..k]
    }

    /// True when some sample was truncation-limited.
    pub fn inconclusive(&self) -> bool {
        self.stabilized_prefix().len() < self.rows.len()
    }

    /// `|ratio - 1|` is nonincreasing over the stabilized prefix.
    pub fn monotone_toward_one(&self) -> bool {
        self.stabilized_prefix().windows(2).all(|w| (w[1].ratio - 1.0).abs() <= (w[0].ratio - 1.0).abs() + 1e-12)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,phi,reference,ratio,stabilized\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.9},{:.9},{:.9},{}\n", r.t, r.phi, r.reference, r.ratio, r.stabilized));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "q": self.q,
            "n": self.n,
            "p": self.p,
            "truncation": self.truncation,
            "rows": self.rows,
            "stabilized_samples": self.stabilized_prefix().len(),
            "monotone_toward_one": self.monotone_toward_one(),
            "inconclusive": self.inconclusive(),
        })
    }
}

/// `q t^{n-1}/(n-1)!`.
pub fn leading_term(q: usize, n: usize, t: f64) -> f64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    q as f64 * t.powi(n as i32 - 1) / fact
}

/// Tabulates `φ(V, n, t)` from `series` against its predicted leading term.
pub fn asymptotic_check(series: &TruncatedSeries, q: usize, n: usize, p: u64, t_samples: &[f64]) -> Result<AsymptoticReport> {
    if n == 0 || q == 0 {
        return Err(Error::Bounds("need q ≥ 1 and n ≥ 1".into()));
    }
    let rows = t_samples
        .iter()
        .map(|&t| {
            let phi = phi_eval(series, p, t)?;
            let reference = leading_term(q, n, t);
            Ok(AsymptoticRow { t, phi: phi.value, reference, ratio: phi.value / reference, stabilized: phi.stabilized })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticReport { q, n, p, truncation: series.truncation(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(sphere_series_char0(1, 2, 6).unwrap().coeffs(), &[1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(sphere_series_char0(1, 3, 6).unwrap().coeffs(), &[1, 0, 0, 1, 0, 0, 0]);
        assert_eq!(sphere_series_char0(2, 2, 6).unwrap().coeffs(), &[1, 0, 2, 0, 3, 0, 4]);
        assert_eq!(sphere_series_char0(0, 5, 3).unwrap().coeffs(), &[1, 0, 0, 0]);
        let prod = sphere_series_char0(1, 2, 7).unwrap().mul(&sphere_series_char0(1, 3, 7).unwrap()).unwrap();
        assert_eq!(prod.coeffs(), &[1, 0, 1, 1, 1, 1, 1, 1]);
        assert_eq!(prod.closed_form().unwrap().to_string(), "(1+t^3)/(1-t^2)");
        prod.check().unwrap();
    }

    #[test]
    fn order_and_product() {
        let a = TruncatedSeries::new(vec![1, 1]);
        assert_eq!(a.mul(&a).unwrap().coeffs(), &[1, 2]);
        let b = TruncatedSeries::new(vec![1, 1, 0]);
        assert_eq!(b.mul(&b).unwrap().coeffs(), &[1, 2, 1]);
        let geo = TruncatedSeries::new(vec![1; 5]);
        assert!(TruncatedSeries::one(4).leq(&geo));
        assert_eq!(geo.first_violation(&TruncatedSeries::one(4)), Some(1));
    }

    #[test]
    fn phi_of_constant_and_polynomial() {
        let one = TruncatedSeries::one(10);
        for t in [0.5, 1.0, 7.0] {
            assert_eq!(phi_eval(&one, 3, t).unwrap().value, 0.0);
        }
        assert!(phi_eval(&one, 2, 0.0).is_err());
        let s = sphere_series_char0(1, 2, 400).unwrap();
        let t: f64 = 2.0;
        let x = 1.0 - 2f64.powf(-t);
        let exact = -(1.0 - x * x).log2();
        let v = phi_eval(&s, 2, t).unwrap();
        assert!(v.stabilized);
        assert!(v.value <= exact && exact - v.value < 1e-9);
    }
}
