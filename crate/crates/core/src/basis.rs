//! Products of basis units.

use crate::octo::{Octo, DIM};
use crate::scalar::Scalar;

/// A signed basis unit, the result of multiplying two basis units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisProduct {
    /// `+1` or `-1`.
    pub sign: i8,
    /// Unit index, 0 being the scalar unit.
    pub index: usize,
}

impl BasisProduct {
    pub fn to_octo<T: Scalar>(self) -> Octo<T> {
        let u = Octo::unit(self.index);
        if self.sign < 0 {
            -u
        } else {
            u
        }
    }
}

const fn p(sign: i8, index: usize) -> BasisProduct {
    BasisProduct { sign, index }
}

/// Products of the imaginary units: row `i`, column `j` holds
/// `unit(i+1) * unit(j+1)`; indices 4..7 are the units `ε4..ε7`.
const IMAGINARY: [[BasisProduct; 7]; 7] = [
    // e1
    [p(-1, 0), p(1, 3), p(-1, 2), p(1, 5), p(1, 4), p(-1, 7), p(1, 6)],
    // e2
    [p(-1, 3), p(-1, 0), p(1, 1), p(1, 6), p(1, 7), p(1, 4), p(-1, 5)],
    // e3
    [p(1, 2), p(-1, 1), p(-1, 0), p(1, 7), p(-1, 6), p(1, 5), p(1, 4)],
    // ε4
    [p(-1, 5), p(-1, 6), p(-1, 7), p(1, 0), p(1, 1), p(1, 2), p(1, 3)],
    // ε5
    [p(-1, 4), p(-1, 7), p(1, 6), p(-1, 1), p(1, 0), p(1, 3), p(-1, 2)],
    // ε6
    [p(1, 7), p(-1, 4), p(-1, 5), p(-1, 2), p(-1, 3), p(1, 0), p(1, 1)],
    // ε7
    [p(-1, 6), p(1, 5), p(-1, 4), p(-1, 3), p(1, 2), p(-1, 1), p(1, 0)],
];

/// `unit(i) * unit(j)`. The scalar unit (index 0) is a two-sided identity.
///
/// # Panics
///
/// Panics if either index exceeds 7.
pub fn basis_mul(i: usize, j: usize) -> BasisProduct {
    assert!(i < DIM && j < DIM, "basis index out of range: ({i}, {j})");
    match (i, j) {
        (0, j) => p(1, j),
        (i, 0) => p(1, i),
        (i, j) => IMAGINARY[i - 1][j - 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_spot_values() {
        assert_eq!(basis_mul(1, 2), p(1, 3));
        assert_eq!(basis_mul(4, 4), p(1, 0));
        assert_eq!(basis_mul(0, 5), p(1, 5));
        assert_eq!(basis_mul(1, 1), p(-1, 0));
        assert_eq!(basis_mul(1, 4), p(1, 5));
    }

    #[test]
    fn squares() {
        for i in 1..4 {
            assert_eq!(basis_mul(i, i), p(-1, 0));
        }
        for i in 4..8 {
            assert_eq!(basis_mul(i, i), p(1, 0));
        }
    }

    #[test]
    fn distinct_imaginary_units_anticommute() {
        for i in 1..8 {
            for j in 1..8 {
                if i != j {
                    let (a, b) = (basis_mul(i, j), basis_mul(j, i));
                    assert_eq!(a.index, b.index);
                    assert_eq!(a.sign, -b.sign, "({i},{j})");
                }
            }
        }
    }

    #[test]
    #[should_panic]
    fn out_of_range() {
        basis_mul(8, 0);
    }
}
