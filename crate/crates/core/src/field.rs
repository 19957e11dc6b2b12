//! Ground fields: prime fields and the rationals, with exact arithmetic.
//!
//! Every computation in the crate is generic over [`Field`]. A field value is
//! a small descriptor (the prime for 𝔽_p, nothing for ℚ) and carries the
//! arithmetic; elements are plain data.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime accepted for 𝔽_p so that products of two residues fit in a `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// Runtime description of the ground field: characteristic 0 or a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec { characteristic: 0 };

    /// Checks primality; `0` means ℚ.
    pub fn new(characteristic: u64) -> Result<Self> {
        if characteristic == 0 || (characteristic <= MAX_PRIME && is_prime(characteristic)) {
            Ok(FieldSpec { characteristic })
        } else {
            Err(Error::InvalidCharacteristic(characteristic))
        }
    }

    pub fn characteristic(self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(self) -> bool {
        self.characteristic == 0
    }
}

impl TryFrom<u64> for FieldSpec {
    type Error = Error;
    fn try_from(value: u64) -> Result<Self> {
        FieldSpec::new(value)
    }
}

impl From<FieldSpec> for u64 {
    fn from(value: FieldSpec) -> u64 {
        value.characteristic
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "Q"),
            p => write!(f, "F_{p}"),
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact field arithmetic.
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Whether `a` is a canonical element of this field.
    fn contains(&self, a: &Self::Elem) -> bool;
    fn to_json(&self, a: &Self::Elem) -> serde_json::Value;
    fn from_json(&self, v: &serde_json::Value) -> Result<Self::Elem>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `(-1)^i`
    fn sign(&self, i: usize) -> Self::Elem {
        if i.is_multiple_of(2) {
            self.one()
        } else {
            self.neg(&self.one())
        }
    }

    /// `acc += a * b`
    fn add_mul_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let prod = self.mul(a, b);
        *acc = self.add(acc, &prod);
    }
}

/// 𝔽_p with residues stored canonically in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidCharacteristic(0));
        }
        FieldSpec::new(p)?;
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec { characteristic: self.p }
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn contains(&self, a: &u64) -> bool {
        *a < self.p
    }
    fn to_json(&self, a: &u64) -> serde_json::Value {
        serde_json::Value::from(*a)
    }
    fn from_json(&self, v: &serde_json::Value) -> Result<u64> {
        match v.as_i64() {
            Some(x) => Ok(self.from_i64(x)),
            None => Err(Error::Parse(format!("expected an integer entry, found {v}"))),
        }
    }
    fn add_mul_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = (*acc + a * b % self.p) % self.p;
    }
}

/// An exact rational. Values that fit in `i64/i64` stay on the small path;
/// anything larger falls back to big integers. The representation is
/// canonical, so derived equality and hashing are value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rat {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Rat {
    pub fn integer(v: i64) -> Self {
        Rat::Small(Ratio::from_integer(v))
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Rat::Small(Ratio::new_raw(n, d)),
            _ => Rat::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Rat::Big(r) => r.clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_integer(),
            Rat::Big(r) => r.is_integer(),
        }
    }

    pub fn numer_denom_strings(&self) -> (String, String) {
        match self {
            Rat::Small(r) => (r.numer().to_string(), r.denom().to_string()),
            Rat::Big(r) => (r.numer().to_string(), r.denom().to_string()),
        }
    }

    fn binop(
        a: &Rat,
        b: &Rat,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Rat {
        if let (Rat::Small(x), Rat::Small(y)) = (a, b) {
            if let Some(r) = small(x, y) {
                if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                    return Rat::Small(r);
                }
            }
        }
        Rat::from_big(big(&a.to_big(), &b.to_big()))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(r) => write!(f, "{r}"),
            Rat::Big(r) => write!(f, "{r}"),
        }
    }
}

/// The field ℚ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rat;

    fn spec(&self) -> FieldSpec {
        FieldSpec::RATIONALS
    }
    fn zero(&self) -> Rat {
        Rat::integer(0)
    }
    fn one(&self) -> Rat {
        Rat::integer(1)
    }
    fn from_i64(&self, v: i64) -> Rat {
        if v == i64::MIN {
            Rat::Big(BigRational::from_integer(BigInt::from(v)))
        } else {
            Rat::integer(v)
        }
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        Rat::binop(a, b, |x, y| x.checked_add(y), |x, y| x + y)
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        Rat::binop(a, b, |x, y| x.checked_sub(y), |x, y| x - y)
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        Rat::binop(a, b, |x, y| x.checked_mul(y), |x, y| x * y)
    }
    fn neg(&self, a: &Rat) -> Rat {
        match a {
            Rat::Small(r) => Rat::Small(-r),
            Rat::Big(r) => Rat::from_big(-r),
        }
    }
    fn inv(&self, a: &Rat) -> Option<Rat> {
        if self.is_zero(a) {
            return None;
        }
        Some(match a {
            Rat::Small(r) => Rat::Small(r.recip()),
            Rat::Big(r) => Rat::from_big(r.recip()),
        })
    }
    fn is_zero(&self, a: &Rat) -> bool {
        match a {
            Rat::Small(r) => r.is_zero(),
            Rat::Big(r) => r.is_zero(),
        }
    }
    fn is_one(&self, a: &Rat) -> bool {
        match a {
            Rat::Small(r) => r.is_one(),
            Rat::Big(r) => r.is_one(),
        }
    }
    fn contains(&self, a: &Rat) -> bool {
        match a {
            Rat::Small(r) => *r.denom() > 0 && r.numer().gcd(r.denom()) == 1,
            Rat::Big(r) => {
                r.denom().is_positive()
                    && r.numer().gcd(r.denom()).is_one()
                    && (r.numer().to_i64().is_none() || r.denom().to_i64().is_none())
            }
        }
    }
    fn to_json(&self, a: &Rat) -> serde_json::Value {
        match a {
            Rat::Small(r) if r.is_integer() => serde_json::Value::from(*r.numer()),
            other => serde_json::Value::from(other.to_string()),
        }
    }
    fn from_json(&self, v: &serde_json::Value) -> Result<Rat> {
        if let Some(x) = v.as_i64() {
            return Ok(self.from_i64(x));
        }
        let s = v
            .as_str()
            .ok_or_else(|| Error::Parse(format!("expected an integer or \"a/b\" entry, found {v}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (parse(n)?, parse(d)?),
            None => (parse(s)?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rat::from_big(BigRational::new(n, d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_rejects_composites() {
        assert!(FieldSpec::new(0).is_ok());
        assert!(FieldSpec::new(2).is_ok());
        assert!(FieldSpec::new(7919).is_ok());
        assert!(matches!(FieldSpec::new(1), Err(Error::InvalidCharacteristic(1))));
        assert!(FieldSpec::new(9).is_err());
        assert!(FieldSpec::new(MAX_PRIME + 2).is_err());
        assert!(PrimeField::new(0).is_err());
    }

    #[test]
    fn prime_field_inverses() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.sign(3), 6);
    }

    #[test]
    fn rationals_overflow_falls_back_to_big() {
        let q = Rationals;
        let big = q.from_i64(i64::MAX);
        let sq = q.mul(&big, &big);
        assert!(matches!(sq, Rat::Big(_)));
        let back = q.mul(&sq, &q.inv(&big).unwrap());
        assert_eq!(back, big);
        assert!(matches!(back, Rat::Small(_)));
    }

    #[test]
    fn rational_json_round_trip() {
        let q = Rationals;
        let half = q.inv(&q.from_i64(-2)).unwrap();
        let v = q.to_json(&half);
        assert_eq!(v, serde_json::Value::from("-1/2"));
        assert_eq!(q.from_json(&v).unwrap(), half);
        assert_eq!(q.from_json(&serde_json::json!(5)).unwrap(), q.from_i64(5));
        assert!(q.from_json(&serde_json::json!("1/0")).is_err());
    }
}
