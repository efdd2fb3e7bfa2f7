//! Exact linear forms in the right operand's coefficients `b0..b7`, and the
//! dense symbolic / rational matrices built from them.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::octo::DIM;
use crate::scalar::{Arith, Rational, Scalar};

/// `Σ q_i · b_i` with exact rational `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinForm {
    q: [Rational; DIM],
}

impl LinForm {
    pub fn zero() -> Self {
        LinForm {
            q: std::array::from_fn(|_| Rational::zero()),
        }
    }

    /// The form `b_i`.
    pub fn coef(i: usize) -> Self {
        let mut f = Self::zero();
        f.q[i] = Rational::one();
        f
    }

    pub fn from_ints(q: [i64; DIM]) -> Self {
        LinForm {
            q: q.map(Rational::from_i64),
        }
    }

    pub fn from_coeffs(q: [Rational; DIM]) -> Self {
        LinForm { q }
    }

    pub fn coeffs(&self) -> &[Rational; DIM] {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().all(Zero::is_zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.q.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        LinForm {
            q: std::array::from_fn(|i| &self.q[i] * k),
        }
    }

    pub fn eval<T: Scalar>(&self, b: &[T; DIM]) -> T {
        self.q
            .iter()
            .zip(b)
            .filter(|(q, _)| !q.is_zero())
            .fold(T::zero(), |acc, (q, v)| acc + T::from_rational(q) * v.clone())
    }
}

impl Add for &LinForm {
    type Output = LinForm;

    fn add(self, rhs: &LinForm) -> LinForm {
        LinForm {
            q: std::array::from_fn(|i| &self.q[i] + &rhs.q[i]),
        }
    }
}

impl Add for LinForm {
    type Output = LinForm;

    fn add(self, rhs: LinForm) -> LinForm {
        &self + &rhs
    }
}

impl Sub for &LinForm {
    type Output = LinForm;

    fn sub(self, rhs: &LinForm) -> LinForm {
        LinForm {
            q: std::array::from_fn(|i| &self.q[i] - &rhs.q[i]),
        }
    }
}

impl Sub for LinForm {
    type Output = LinForm;

    fn sub(self, rhs: LinForm) -> LinForm {
        &self - &rhs
    }
}

impl Neg for &LinForm {
    type Output = LinForm;

    fn neg(self) -> LinForm {
        LinForm {
            q: std::array::from_fn(|i| -&self.q[i]),
        }
    }
}

impl Neg for LinForm {
    type Output = LinForm;

    fn neg(self) -> LinForm {
        -&self
    }
}

/// Renders as e.g. `-b0 + 1/2 b3`, or `0`.
impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, q) in self.q.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let sign = if q.is_negative() { "-" } else { "+" };
            match (first, sign) {
                (true, "-") => f.write_str("-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            let mag = q.abs();
            if mag.is_one() {
                write!(f, "b{i}")?;
            } else {
                write!(f, "{mag} b{i}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        RatMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let cur = &out.entries[r * out.cols + c] + a * b;
                        out.entries[r * out.cols + c] = cur;
                    }
                }
            }
        }
        out
    }
}

/// Dense matrix of [`LinForm`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LinForm>,
}

impl SymMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymMatrix {
            rows,
            cols,
            entries: vec![LinForm::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> LinForm) -> Self {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        SymMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &LinForm {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LinForm) {
        self.entries[r * self.cols + c] = v;
    }

    /// `self · rhs`
    pub fn mul_const(&self, rhs: &RatMatrix) -> SymMatrix {
        assert_eq!(self.cols, rhs.rows(), "matrix product dimension mismatch");
        SymMatrix::from_fn(self.rows, rhs.cols(), |r, c| {
            (0..self.cols).fold(LinForm::zero(), |acc, k| {
                let w = rhs.get(k, c);
                if w.is_zero() {
                    acc
                } else {
                    &acc + &self.get(r, k).scale(w)
                }
            })
        })
    }

    /// `lhs · self`
    pub fn premul_const(&self, lhs: &RatMatrix) -> SymMatrix {
        assert_eq!(lhs.cols(), self.rows, "matrix product dimension mismatch");
        SymMatrix::from_fn(lhs.rows(), self.cols, |r, c| {
            (0..self.rows).fold(LinForm::zero(), |acc, k| {
                let w = lhs.get(r, k);
                if w.is_zero() {
                    acc
                } else {
                    &acc + &self.get(k, c).scale(w)
                }
            })
        })
    }

    /// Numeric matrix at a concrete right operand.
    pub fn eval<T: Scalar>(&self, b: &[T; DIM]) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).eval(b)).collect())
            .collect()
    }
}

/// Arithmetic over linear forms. Only the linear operations are defined;
/// `mul` of two forms would leave degree 1 and panics.
#[derive(Debug, Default)]
pub struct Symbolic;

impl Arith for Symbolic {
    type Value = LinForm;

    fn zero(&mut self) -> LinForm {
        LinForm::zero()
    }

    fn add(&mut self, a: &LinForm, b: &LinForm) -> LinForm {
        a + b
    }

    fn sub(&mut self, a: &LinForm, b: &LinForm) -> LinForm {
        a - b
    }

    fn neg(&mut self, a: &LinForm) -> LinForm {
        -a
    }

    fn shift(&mut self, a: &LinForm, k: i32) -> LinForm {
        a.scale(&Rational::one().mul_pow2(k))
    }

    fn mul(&mut self, _: &LinForm, _: &LinForm) -> LinForm {
        panic!("product of two linear forms is not linear")
    }
}

/// The symbolic right operand `(b0, .., b7)`.
pub fn symbolic_operand() -> [LinForm; DIM] {
    std::array::from_fn(LinForm::coef)
}
