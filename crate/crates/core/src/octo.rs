//! Hyperbolic-octonion values.
//!
//! Coefficients are ordered `(1, e1, e2, e3, ε4, ε5, ε6, ε7)`. The units e1..e3
//! square to -1, the counterimaginary units ε4..ε7 square to +1.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Number of coefficients of an octonion.
pub const DIM: usize = 8;

/// Display names of the basis units in coefficient order.
pub const UNIT_NAMES: [&str; DIM] = ["1", "e1", "e2", "e3", "ε4", "ε5", "ε6", "ε7"];

#[derive(Clone, Debug, PartialEq)]
pub struct Octo<T> {
    c: [T; DIM],
}

pub type ExactOcto = Octo<Rational>;
pub type FloatOcto = Octo<f64>;

impl<T: Scalar> Octo<T> {
    /// Fails if any coefficient is not finite (float mode only).
    pub fn try_new(c: [T; DIM]) -> Result<Self> {
        if let Some(index) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Octo { c })
    }

    /// # Panics
    ///
    /// Panics on a non-finite coefficient.
    pub fn new(c: [T; DIM]) -> Self {
        Self::try_new(c).expect("octonion coefficients must be finite")
    }

    pub fn from_ints(c: [i64; DIM]) -> Self {
        Octo { c: c.map(T::from_i64) }
    }

    pub fn zero() -> Self {
        Octo {
            c: std::array::from_fn(|_| T::zero()),
        }
    }

    pub fn one() -> Self {
        Self::unit(0)
    }

    /// The basis unit with coefficient index `i` (0 is the scalar unit).
    pub fn unit(i: usize) -> Self {
        assert!(i < DIM, "basis index {i} out of range");
        let mut o = Self::zero();
        o.c[i] = T::one();
        o
    }

    pub fn coeffs(&self) -> &[T; DIM] {
        &self.c
    }

    pub fn into_coeffs(self) -> [T; DIM] {
        self.c
    }

    pub fn scale(&self, alpha: &T) -> Self {
        Octo {
            c: std::array::from_fn(|i| alpha.clone() * self.c[i].clone()),
        }
    }

    /// The split-signature form `x0²+x1²+x2²+x3² − x4²−x5²−x6²−x7²`.
    ///
    /// Not multiplicative under this algebra's product; see the
    /// `quadratic_form_is_not_multiplicative` test.
    pub fn quadratic_form(&self) -> T {
        self.c.iter().enumerate().fold(T::zero(), |acc, (i, v)| {
            let sq = v.clone() * v.clone();
            if i < 4 {
                acc + sq
            } else {
                acc - sq
            }
        })
    }

    /// Parses 8 comma-separated coefficients.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != DIM {
            return Err(Error::Arity(parts.len()));
        }
        let mut c: [T; DIM] = std::array::from_fn(|_| T::zero());
        for (slot, part) in c.iter_mut().zip(parts) {
            *slot = T::parse_text(part)?;
        }
        Self::try_new(c)
    }
}

impl<T: Scalar> fmt::Display for Octo<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.c.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&v.to_text())?;
        }
        Ok(())
    }
}

impl<T: Scalar> Add for Octo<T> {
    type Output = Octo<T>;

    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<T: Scalar> Add for &Octo<T> {
    type Output = Octo<T>;

    fn add(self, rhs: Self) -> Octo<T> {
        Octo {
            c: std::array::from_fn(|i| self.c[i].clone() + rhs.c[i].clone()),
        }
    }
}

impl<T: Scalar> Sub for Octo<T> {
    type Output = Octo<T>;

    fn sub(self, rhs: Self) -> Self {
        &self + &(-rhs)
    }
}

impl<T: Scalar> Neg for Octo<T> {
    type Output = Octo<T>;

    fn neg(self) -> Self {
        Octo { c: self.c.map(|v| -v) }
    }
}

impl<T: Scalar> Neg for &Octo<T> {
    type Output = Octo<T>;

    fn neg(self) -> Octo<T> {
        -self.clone()
    }
}
