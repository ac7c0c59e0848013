//! Coefficient fields and sparse column elimination over them.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::primes::{inv_mod, mul_mod_p, require_prime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Rationals,
    PrimeField { p: u64 },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        require_prime(p).map(|p| FieldSpec::PrimeField { p })
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            FieldSpec::PrimeField { p } => FieldSpec::prime(p),
            FieldSpec::Rationals => Ok(self),
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField { p } => p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField { p } => write!(f, "Z/{p}"),
        }
    }
}

/// Arithmetic needed by column reduction.
pub trait Coefficients {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn embed(&self, x: i64) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    /// `a - f * b`
    fn sub_mul(&self, a: &Self::Elem, f: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        require_prime(p).map(|p| PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Coefficients for PrimeField {
    type Elem = u64;

    fn embed(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.p as i128) as u64
    }

    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }

    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> u64 {
        let fb = mul_mod_p(*f, *b, self.p);
        if *a >= fb {
            a - fb
        } else {
            self.p - (fb - a)
        }
    }

    fn div(&self, a: &u64, b: &u64) -> u64 {
        mul_mod_p(*a, inv_mod(*b, self.p), self.p)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Coefficients for Rationals {
    type Elem = BigRational;

    fn embed(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn is_zero(&self, x: &BigRational) -> bool {
        x.is_zero()
    }

    fn sub_mul(&self, a: &BigRational, f: &BigRational, b: &BigRational) -> BigRational {
        a - f * b
    }

    fn div(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a / b
    }
}

/// Sparse column: `(row, coefficient)` pairs with strictly increasing rows.
pub type Column<E> = Vec<(usize, E)>;

/// Left-to-right column reduction: each pushed column is reduced against the
/// earlier columns until its lowest row is not another column's pivot.
pub struct ColumnReducer<F: Coefficients> {
    field: F,
    columns: Vec<Column<F::Elem>>,
    pivot_of_row: HashMap<usize, usize>,
}

impl<F: Coefficients> ColumnReducer<F> {
    pub fn new(field: F) -> Self {
        ColumnReducer { field, columns: Vec::new(), pivot_of_row: HashMap::new() }
    }

    /// Reduces and stores the column; returns its pivot row, if it is nonzero.
    pub fn push(&mut self, mut column: Column<F::Elem>) -> Option<usize> {
        column.retain(|(_, x)| !self.field.is_zero(x));
        while let Some((low, coeff)) = column.last().cloned() {
            let Some(&other) = self.pivot_of_row.get(&low) else { break };
            let other_col = &self.columns[other];
            let f = self.field.div(&coeff, &other_col.last().expect("pivot column is nonzero").1);
            column = self.axpy(&column, &f, other_col);
        }
        let low = column.last().map(|(r, _)| *r);
        if let Some(r) = low {
            self.pivot_of_row.insert(r, self.columns.len());
        }
        self.columns.push(column);
        low
    }

    /// `a - f * b`, dropping zeros.
    fn axpy(&self, a: &Column<F::Elem>, f: &F::Elem, b: &Column<F::Elem>) -> Column<F::Elem> {
        let zero = self.field.embed(0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i].clone());
                i += 1;
            } else if take_b {
                let v = self.field.sub_mul(&zero, f, &b[j].1);
                if !self.field.is_zero(&v) {
                    out.push((b[j].0, v));
                }
                j += 1;
            } else {
                let v = self.field.sub_mul(&a[i].1, f, &b[j].1);
                if !self.field.is_zero(&v) {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn columns(&self) -> &[Column<F::Elem>] {
        &self.columns
    }

    pub fn rank(&self) -> usize {
        self.pivot_of_row.len()
    }
}

/// Rank of a matrix given by integer columns, over the field.
pub fn rank_over(field: FieldSpec, columns: &[Column<i64>]) -> Result<usize> {
    fn run<F: Coefficients>(f: F, columns: &[Column<i64>]) -> usize {
        let convert: Vec<Column<F::Elem>> =
            columns.iter().map(|c| c.iter().map(|(r, x)| (*r, f.embed(*x))).collect()).collect();
        let mut reducer = ColumnReducer::new(f);
        for c in convert {
            reducer.push(c);
        }
        reducer.rank()
    }
    Ok(match field.validate()? {
        FieldSpec::Rationals => run(Rationals, columns),
        FieldSpec::PrimeField { p } => run(PrimeField::new(p)?, columns),
    })
}

/// Convenience for tests and callers holding rational values.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.embed(-1), 6);
        assert_eq!(f.sub_mul(&2, &3, &4), (2 + 7 * 2 - 12));
        assert_eq!(f.div(&1, &3), 5);
        assert!(PrimeField::new(8).is_err());
    }

    #[test]
    fn field_spec_validation() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::PrimeField { p: 15 }.validate().is_err());
        assert_eq!(FieldSpec::prime(3).unwrap().characteristic(), 3);
        let json = serde_json::to_string(&FieldSpec::PrimeField { p: 5 }).unwrap();
        assert_eq!(json, r#"{"kind":"prime_field","p":5}"#);
    }

    #[test]
    fn rank_depends_on_characteristic() {
        // columns of [[1, 1], [1, -1]]: determinant -2
        let cols = vec![vec![(0, 1), (1, 1)], vec![(0, 1), (1, -1)]];
        assert_eq!(rank_over(FieldSpec::Rationals, &cols).unwrap(), 2);
        assert_eq!(rank_over(FieldSpec::PrimeField { p: 3 }, &cols).unwrap(), 2);
        assert_eq!(rank_over(FieldSpec::PrimeField { p: 2 }, &cols).unwrap(), 1);
    }

    #[test]
    fn rational_reduction_keeps_fractions() {
        let mut r = ColumnReducer::new(Rationals);
        assert_eq!(r.push(vec![(0, rational(2, 1)), (1, rational(3, 1))]), Some(1));
        assert_eq!(r.push(vec![(0, rational(1, 1)), (1, rational(1, 1))]), Some(0));
        assert_eq!(r.columns()[1], vec![(0, rational(1, 3))]);
        assert_eq!(r.rank(), 2);
    }
}
