//! The direct (schoolbook) product, the ground truth for every other kernel.

use crate::linform::{LinForm, SymMatrix};
use crate::octo::{Octo, DIM};
use crate::scalar::{Arith, Plain, Pow2, Scalar};

/// `SCHOOLBOOK[r][c] = (sign, k)`: output coordinate `y_r` contains the term
/// `sign · x_c · b_k`.
pub const SCHOOLBOOK: [[(i8, usize); DIM]; DIM] = [
    [(1, 0), (-1, 1), (-1, 2), (-1, 3), (1, 4), (1, 5), (1, 6), (1, 7)],
    [(1, 1), (1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4), (1, 7), (-1, 6)],
    [(1, 2), (-1, 3), (1, 0), (1, 1), (1, 6), (-1, 7), (-1, 4), (1, 5)],
    [(1, 3), (1, 2), (-1, 1), (1, 0), (1, 7), (1, 6), (-1, 5), (-1, 4)],
    [(1, 4), (1, 5), (1, 6), (1, 7), (1, 0), (-1, 1), (-1, 2), (-1, 3)],
    [(1, 5), (1, 4), (-1, 7), (1, 6), (-1, 1), (1, 0), (-1, 3), (1, 2)],
    [(1, 6), (1, 7), (1, 4), (-1, 5), (-1, 2), (1, 3), (1, 0), (-1, 1)],
    [(1, 7), (-1, 6), (1, 5), (1, 4), (-1, 3), (-1, 2), (1, 1), (1, 0)],
];

/// Schoolbook product in an arbitrary arithmetic context: 64 multiplications,
/// 56 additions/subtractions.
pub fn naive_product<A: Arith>(arith: &mut A, x: &[A::Value], b: &[A::Value]) -> Vec<A::Value> {
    assert!(x.len() == DIM && b.len() == DIM, "operands must have 8 coefficients");
    SCHOOLBOOK
        .iter()
        .map(|row| {
            let terms: Vec<_> = row
                .iter()
                .enumerate()
                .map(|(c, &(sign, k))| (sign, arith.mul(&x[c], &b[k])))
                .collect();
            let (first_sign, first) = &terms[0];
            let mut acc = if *first_sign < 0 {
                arith.neg(first)
            } else {
                first.clone()
            };
            for (sign, term) in &terms[1..] {
                let factor = if *sign < 0 { Pow2::MINUS_ONE } else { Pow2::ONE };
                acc = arith.accumulate(&acc, term, factor);
            }
            acc
        })
        .collect()
}

/// `x · b` by the schoolbook formulas.
pub fn mul_naive<T: Scalar>(x: &Octo<T>, b: &Octo<T>) -> Octo<T> {
    let y = naive_product(&mut Plain::<T>::new(), x.coeffs(), b.coeffs());
    Octo::new(y.try_into().expect("8 outputs"))
}

/// The 8×8 matrix `B` with `y = B(b) · x`.
pub fn schoolbook_matrix() -> SymMatrix {
    SymMatrix::from_fn(DIM, DIM, |r, c| {
        let (sign, k) = SCHOOLBOOK[r][c];
        let f = LinForm::coef(k);
        if sign < 0 {
            -f
        } else {
            f
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::basis_mul;
    use crate::octo::{ExactOcto, FloatOcto};
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn exact() -> impl Strategy<Value = ExactOcto> {
        proptest::array::uniform8(-1000i64..=1000).prop_map(ExactOcto::from_ints)
    }

    #[test]
    fn agrees_with_basis_table() {
        for i in 0..DIM {
            for j in 0..DIM {
                let got = mul_naive(&ExactOcto::unit(i), &ExactOcto::unit(j));
                assert_eq!(got, basis_mul(i, j).to_octo(), "unit {i} * unit {j}");
            }
        }
    }

    #[test]
    fn spot_values() {
        assert_eq!(mul_naive(&FloatOcto::unit(1), &FloatOcto::unit(4)), FloatOcto::unit(5));
        let ones = FloatOcto::from_ints([1; 8]);
        assert_eq!(mul_naive(&ones, &ones), FloatOcto::from_ints([2; 8]));
    }

    #[test]
    fn each_row_uses_every_coefficient_once() {
        for row in SCHOOLBOOK {
            let mut seen = [false; DIM];
            for (_, k) in row {
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
    }

    #[test]
    fn matrix_entries() {
        let m = schoolbook_matrix();
        assert_eq!(*m.get(0, 0), LinForm::coef(0));
        assert_eq!(*m.get(0, 1), -LinForm::coef(1));
        assert_eq!(*m.get(4, 0), LinForm::coef(4));
    }

    // The split-signature form is not a composition form for this product.
    #[test]
    fn quadratic_form_is_not_multiplicative() {
        let x = ExactOcto::from_ints([0, -3, 2, -3, 3, 0, 2, 0]);
        let b = ExactOcto::from_ints([-3, -2, 3, 1, 0, -3, -3, 3]);
        assert_eq!(mul_naive(&x, &b).quadratic_form(), Rational::from_i64(-1152));
        assert_eq!(x.quadratic_form() * b.quadratic_form(), Rational::from_i64(-36));
    }

    proptest! {
        #[test]
        fn two_sided_identity(x in exact()) {
            prop_assert_eq!(mul_naive(&ExactOcto::one(), &x), x.clone());
            prop_assert_eq!(mul_naive(&x, &ExactOcto::one()), x);
        }

        #[test]
        fn bilinear(x in exact(), x2 in exact(), b in exact(), alpha in -20i64..20) {
            let a = Rational::from_i64(alpha);
            let lhs = mul_naive(&(x.scale(&a) + x2.clone()), &b);
            prop_assert_eq!(lhs, mul_naive(&x, &b).scale(&a) + mul_naive(&x2, &b));
            let rhs = mul_naive(&b, &(x.scale(&a) + x2.clone()));
            prop_assert_eq!(rhs, mul_naive(&b, &x).scale(&a) + mul_naive(&b, &x2));
        }

        #[test]
        fn matrix_matches_product(x in exact(), b in exact()) {
            let m = schoolbook_matrix().eval(b.coeffs());
            let y: Vec<Rational> = m
                .iter()
                .map(|row| row.iter().zip(x.coeffs()).fold(Rational::from_i64(0), |acc, (a, v)| acc + a * v))
                .collect();
            let expected = mul_naive(&x, &b);
            prop_assert_eq!(y.as_slice(), expected.coeffs().as_slice());
        }
    }
}
