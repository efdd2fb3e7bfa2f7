//! Scalar types and arithmetic contexts.
//!
//! Kernels are written once against [`Arith`], an arithmetic context that
//! receives every add/sub/neg/shift/mul explicitly. Plain evaluation,
//! operation counting and program tracing are all just different contexts.

use std::fmt::Debug;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational number used for proofs and exact-mode products.
pub type Rational = BigRational;

/// Numeric coefficient type of an [`Octo`](crate::Octo).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// `self * 2^k`, exact for both scalar modes.
    fn mul_pow2(&self, k: i32) -> Self;

    fn is_finite(&self) -> bool;

    fn parse_text(text: &str) -> Result<Self, Error>;

    fn to_text(&self) -> String;

    /// Equality up to the representation's rounding: exact for rationals,
    /// relative `1e-12` for floats.
    fn near(&self, other: &Self) -> bool;

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn mul_pow2(&self, k: i32) -> Self {
        self * 2f64.powi(k)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn parse_text(text: &str) -> Result<Self, Error> {
        let t = text.trim();
        let v: f64 = t.parse().map_err(|_| Error::Coefficient {
            text: t.to_string(),
            reason: "not a decimal number".into(),
        })?;
        if !v.is_finite() {
            return Err(Error::Coefficient {
                text: t.to_string(),
                reason: "not finite".into(),
            });
        }
        Ok(v)
    }

    fn to_text(&self) -> String {
        // -0 prints as 0
        if *self == 0.0 {
            "0".to_string()
        } else {
            format!("{self}")
        }
    }

    fn near(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12 * (1.0 + self.abs().max(other.abs()))
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn mul_pow2(&self, k: i32) -> Self {
        if let Some(e) = dyadic_exp(self) {
            let e = e as i64 - i64::from(k);
            return match e >= 0 {
                true => from_dyadic(self.numer().clone(), e as u64),
                false => from_dyadic(self.numer() << e.unsigned_abs(), 0),
            };
        }
        let p = BigInt::one() << k.unsigned_abs();
        if k >= 0 {
            self * Rational::from_integer(p)
        } else {
            self / Rational::from_integer(p)
        }
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn parse_text(text: &str) -> Result<Self, Error> {
        parse_rational(text)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn add_ref(&self, other: &Self) -> Self {
        match (dyadic_exp(self), dyadic_exp(other)) {
            (Some(p), Some(q)) => {
                let m = p.max(q);
                from_dyadic((self.numer() << (m - p)) + (other.numer() << (m - q)), m)
            }
            _ => self + other,
        }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        match (dyadic_exp(self), dyadic_exp(other)) {
            (Some(p), Some(q)) => {
                let m = p.max(q);
                from_dyadic((self.numer() << (m - p)) - (other.numer() << (m - q)), m)
            }
            _ => self - other,
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        match (dyadic_exp(self), dyadic_exp(other)) {
            (Some(p), Some(q)) => from_dyadic(self.numer() * other.numer(), p + q),
            _ => self * other,
        }
    }
}

/// `e` such that the denominator of `r` is `2^e`.
fn dyadic_exp(r: &Rational) -> Option<u64> {
    let d = r.denom();
    let tz = d.trailing_zeros()?;
    (tz + 1 == d.bits()).then_some(tz)
}

/// `n / 2^e` in lowest terms, without a gcd.
fn from_dyadic(n: BigInt, e: u64) -> Rational {
    let Some(tz) = n.trailing_zeros() else {
        return Rational::zero();
    };
    let s = tz.min(e);
    Rational::new_raw(n >> s, BigInt::one() << (e - s))
}

/// Parses `p/q`, a plain integer, or a finite decimal such as `-1.25`.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let t = text.trim();
    let bad = |reason: &str| Error::Coefficient {
        text: t.to_string(),
        reason: reason.to_string(),
    };
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad("bad numerator"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad("bad fractional part"));
        }
        let negative = int.starts_with('-');
        let int_part = match int.trim_start_matches(['+', '-']) {
            "" => BigInt::zero(),
            s => BigInt::from_str(s).map_err(|_| bad("bad integer part"))?,
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part = BigInt::from_str(frac).map_err(|_| bad("bad fractional part"))?;
        let magnitude = Rational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    BigInt::from_str(t)
        .map(Rational::from_integer)
        .map_err(|_| bad("not an integer, decimal, or p/q"))
}

/// A signed power of two, `±2^exp`. The only non-unit constants a stage may
/// carry, so applying one never costs a real multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pow2 {
    pub negative: bool,
    pub exp: i32,
}

impl Pow2 {
    pub const ONE: Pow2 = Pow2 {
        negative: false,
        exp: 0,
    };
    pub const MINUS_ONE: Pow2 = Pow2 { negative: true, exp: 0 };

    pub fn new(negative: bool, exp: i32) -> Self {
        Pow2 { negative, exp }
    }

    pub fn negated(self) -> Self {
        Pow2 {
            negative: !self.negative,
            ..self
        }
    }

    pub fn to_rational(self) -> Rational {
        let v = Rational::one().mul_pow2(self.exp);
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// Recognises `±2^k`; anything else (including zero) is `None`.
    pub fn from_rational(r: &Rational) -> Option<Self> {
        if r.is_zero() {
            return None;
        }
        let n = r.numer().abs();
        let d = r.denom().abs();
        let is_pow2 = |v: &BigInt| (v & (v - BigInt::one())).is_zero();
        if !is_pow2(&n) || !is_pow2(&d) || (!n.is_one() && !d.is_one()) {
            return None;
        }
        let exp = if d.is_one() {
            n.bits() as i32 - 1
        } else {
            -(d.bits() as i32 - 1)
        };
        Some(Pow2 {
            negative: r.is_negative(),
            exp,
        })
    }
}

/// An arithmetic context. Every kernel in this crate is expressed as a
/// sequence of calls on one of these.
pub trait Arith {
    type Value: Clone;

    fn zero(&mut self) -> Self::Value;
    fn add(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&mut self, a: &Self::Value) -> Self::Value;
    /// Multiplication by `2^k`.
    fn shift(&mut self, a: &Self::Value, k: i32) -> Self::Value;
    /// General (variable by variable) multiplication.
    fn mul(&mut self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    fn scale(&mut self, a: &Self::Value, factor: Pow2) -> Self::Value {
        let shifted = if factor.exp == 0 {
            a.clone()
        } else {
            self.shift(a, factor.exp)
        };
        if factor.negative {
            self.neg(&shifted)
        } else {
            shifted
        }
    }

    /// `acc + factor * term`, folding the sign into add/sub.
    fn accumulate(&mut self, acc: &Self::Value, term: &Self::Value, factor: Pow2) -> Self::Value {
        let magnitude = self.scale(
            term,
            Pow2 {
                negative: false,
                ..factor
            },
        );
        if factor.negative {
            self.sub(acc, &magnitude)
        } else {
            self.add(acc, &magnitude)
        }
    }
}

/// Direct evaluation over a [`Scalar`].
#[derive(Debug)]
pub struct Plain<T>(PhantomData<T>);

impl<T> Plain<T> {
    pub fn new() -> Self {
        Plain(PhantomData)
    }
}

impl<T> Default for Plain<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Arith for Plain<T> {
    type Value = T;

    fn zero(&mut self) -> T {
        T::zero()
    }

    fn add(&mut self, a: &T, b: &T) -> T {
        a.add_ref(b)
    }

    fn sub(&mut self, a: &T, b: &T) -> T {
        a.sub_ref(b)
    }

    fn neg(&mut self, a: &T) -> T {
        -a.clone()
    }

    fn shift(&mut self, a: &T, k: i32) -> T {
        a.mul_pow2(k)
    }

    fn mul(&mut self, a: &T, b: &T) -> T {
        a.mul_ref(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational(" -7 ").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn float_parse_rejects_non_finite() {
        assert!(f64::parse_text("inf").is_err());
        assert!(f64::parse_text("NaN").is_err());
        assert_eq!(f64::parse_text("2.5").unwrap(), 2.5);
        assert_eq!((-0.0f64).to_text(), "0");
    }

    #[test]
    fn pow2_round_trip() {
        for exp in -6..6 {
            for negative in [false, true] {
                let p = Pow2::new(negative, exp);
                assert_eq!(Pow2::from_rational(&p.to_rational()), Some(p));
            }
        }
        assert_eq!(Pow2::from_rational(&q(3, 1)), None);
        assert_eq!(Pow2::from_rational(&q(3, 4)), None);
        assert_eq!(Pow2::from_rational(&q(0, 1)), None);
    }

    proptest::proptest! {
        #[test]
        fn dyadic_paths_match_generic_ops(
            a in -5000i64..5000, ea in 0u32..12, c in -5000i64..5000, eb in 0u32..12, k in -9i32..9, odd in 0i64..3,
        ) {
            let x = q(a, (1i64 << ea) * (2 * odd + 1));
            let y = q(c, 1i64 << eb);
            proptest::prop_assert_eq!(x.add_ref(&y), &x + &y);
            proptest::prop_assert_eq!(x.sub_ref(&y), &x - &y);
            proptest::prop_assert_eq!(x.mul_ref(&y), &x * &y);
            let factor = if k >= 0 { q(1 << k, 1) } else { q(1, 1 << -k) };
            proptest::prop_assert_eq!(x.mul_pow2(k), &x * &factor);
        }
    }

    #[test]
    fn shifts_are_exact() {
        assert_eq!(q(3, 1).mul_pow2(-3), q(3, 8));
        assert_eq!(q(3, 8).mul_pow2(3), q(3, 1));
        assert_eq!(3.0f64.mul_pow2(-3), 0.375);
    }
}
