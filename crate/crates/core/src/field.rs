//! Exact arithmetic and linear algebra over a prime field `F_d`.
//!
//! Everything here is integer arithmetic modulo an odd prime; no floating
//! point is involved. Moduli are limited to `d < 2^31` so that products of two
//! reduced values always fit in a `u64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};

/// An odd prime modulus `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    /// Largest accepted modulus (exclusive).
    pub const LIMIT: u64 = 1 << 31;

    pub fn new(d: u64) -> Result<Self> {
        if !(3..Self::LIMIT).contains(&d) || !is_odd_prime(d) {
            return Err(QssError::NotPrime(d));
        }
        Ok(Self(d))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduces an arbitrary integer into the field.
    pub fn element(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.0,
            modulus: self,
        }
    }

    /// Reduces a signed integer into the field.
    pub fn element_i64(self, value: i64) -> FieldElement {
        let d = self.0 as i64;
        self.element(value.rem_euclid(d) as u64)
    }

    pub fn zero(self) -> FieldElement {
        self.element(0)
    }

    pub fn one(self) -> FieldElement {
        self.element(1)
    }

    /// All elements `0, 1, .., d-1` in order.
    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.0).map(move |v| self.element(v))
    }
}

impl<'de> Deserialize<'de> for PrimeModulus {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let d = u64::deserialize(deserializer)?;
        PrimeModulus::new(d).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_odd_prime(d: u64) -> bool {
    if d.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// An element of `F_d`, always reduced into `[0, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    /// Builds an element, rejecting values outside `[0, d)`.
    pub fn new(value: u64, modulus: PrimeModulus) -> Result<Self> {
        if value >= modulus.get() {
            return Err(QssError::OutOfRange {
                value,
                modulus: modulus.get(),
            });
        }
        Ok(Self { value, modulus })
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let d = self.modulus.get();
        let mut base = self.value;
        let mut acc = 1 % d;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % d;
            }
            base = base * base % d;
            exp >>= 1;
        }
        self.modulus.element(acc)
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(QssError::NoInverse);
        }
        Ok(self.pow(self.modulus.get() - 2))
    }

    fn check(self, other: Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(QssError::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.value)
    }
}

// The operator impls panic on a modulus mismatch; use `field_arith` for a
// checked variant.
impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "field modulus mismatch");
        let d = self.modulus.get();
        let s = self.value + rhs.value;
        Self {
            value: if s >= d { s - d } else { s },
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        let d = self.modulus.get();
        Self {
            value: (d - self.value) % d,
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "field modulus mismatch");
        Self {
            value: self.value * rhs.value % self.modulus.get(),
            modulus: self.modulus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic.
pub fn field_arith(a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement> {
    a.check(b)?;
    Ok(match op {
        FieldOp::Add => a + b,
        FieldOp::Sub => a - b,
        FieldOp::Mul => a * b,
    })
}

pub fn field_inv(a: FieldElement) -> Result<FieldElement> {
    a.inv()
}

/// A column vector over `F_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    modulus: PrimeModulus,
    values: Vec<u64>,
}

impl FieldVector {
    pub fn new(modulus: PrimeModulus, values: Vec<u64>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v >= modulus.get()) {
            return Err(QssError::OutOfRange {
                value: v,
                modulus: modulus.get(),
            });
        }
        Ok(Self { modulus, values })
    }

    pub fn from_elements(modulus: PrimeModulus, elements: &[FieldElement]) -> Result<Self> {
        let mut values = Vec::with_capacity(elements.len());
        for e in elements {
            if e.modulus() != modulus {
                return Err(QssError::ModulusMismatch {
                    left: modulus.get(),
                    right: e.modulus().get(),
                });
            }
            values.push(e.value());
        }
        Ok(Self { modulus, values })
    }

    pub fn zeros(modulus: PrimeModulus, len: usize) -> Self {
        Self {
            modulus,
            values: vec![0; len],
        }
    }

    /// The standard basis vector `e_index`.
    pub fn unit(modulus: PrimeModulus, len: usize, index: usize) -> Self {
        let mut v = Self::zeros(modulus, len);
        v.values[index] = 1;
        v
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> FieldElement {
        self.modulus.element(self.values[index])
    }

    pub fn set(&mut self, index: usize, value: FieldElement) {
        assert_eq!(value.modulus(), self.modulus, "field modulus mismatch");
        self.values[index] = value.value();
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.values.iter().map(move |&v| self.modulus.element(v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn dot(&self, other: &FieldVector) -> Result<FieldElement> {
        if self.modulus != other.modulus {
            return Err(QssError::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        if self.len() != other.len() {
            return Err(QssError::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let d = self.modulus.get();
        let acc = self
            .values
            .iter()
            .zip(&other.values)
            .fold(0u64, |acc, (a, b)| (acc + a * b) % d);
        Ok(self.modulus.element(acc))
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for FieldVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(serializer)
    }
}

/// A dense row-major matrix over `F_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    modulus: PrimeModulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FieldMatrix {
    /// Builds a matrix from integer rows, rejecting ragged input, empty input,
    /// or out-of-range entries.
    pub fn new(modulus: PrimeModulus, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(QssError::DimensionMismatch { expected: 1, actual: 0 });
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(QssError::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            for &v in row {
                if v >= modulus.get() {
                    return Err(QssError::OutOfRange {
                        value: v,
                        modulus: modulus.get(),
                    });
                }
                data.push(v);
            }
        }
        Ok(Self {
            modulus,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn identity(modulus: PrimeModulus, n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self {
            modulus,
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        self.modulus.element(self.data[row * self.cols + col])
    }

    pub fn row(&self, row: usize) -> FieldVector {
        FieldVector {
            modulus: self.modulus,
            values: self.data[row * self.cols..(row + 1) * self.cols].to_vec(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.cols).map(<[u64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        Self {
            modulus: self.modulus,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Sub-matrix made of the given rows, in the given order. An empty index
    /// list yields a `0 x cols` matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &r in indices {
            data.extend_from_slice(&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        Self {
            modulus: self.modulus,
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Sub-matrix made of the given columns.
    pub fn select_cols(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.rows);
        for r in 0..self.rows {
            for &c in indices {
                data.push(self.data[r * self.cols + c]);
            }
        }
        Self {
            modulus: self.modulus,
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    pub fn mul_vec(&self, v: &FieldVector) -> Result<FieldVector> {
        if v.modulus != self.modulus {
            return Err(QssError::ModulusMismatch {
                left: self.modulus.get(),
                right: v.modulus.get(),
            });
        }
        if v.len() != self.cols {
            return Err(QssError::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        let d = self.modulus.get();
        let values = self
            .data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().zip(&v.values).fold(0, |acc, (a, b)| (acc + a * b) % d))
            .collect();
        Ok(FieldVector {
            modulus: self.modulus,
            values,
        })
    }

    /// Row-reduces `[self | rhs]` in place and returns the pivot columns.
    ///
    /// Pivot search takes the first row (from the current one down) with a
    /// nonzero entry in the column.
    fn reduce(&self, rhs: Option<&[u64]>) -> (Vec<Vec<u64>>, Vec<usize>) {
        let d = self.modulus.get();
        let mut m: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| {
                let mut row = self.data[r * self.cols..(r + 1) * self.cols].to_vec();
                if let Some(b) = rhs {
                    row.push(b[r]);
                }
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(lead, p);
            let inv = self
                .modulus
                .element(m[lead][col])
                .inv()
                .expect("pivot is nonzero")
                .value();
            for x in m[lead].iter_mut() {
                *x = *x * inv % d;
            }
            for r in 0..self.rows {
                if r == lead || m[r][col] == 0 {
                    continue;
                }
                let factor = m[r][col];
                let pivot_row = m[lead].clone();
                for (x, &p) in m[r].iter_mut().zip(&pivot_row) {
                    *x = (*x + d - factor * p % d) % d;
                }
            }
            pivots.push(col);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.reduce(None).1.len()
    }

    /// Solves `self * x = b`, returning the particular solution with every
    /// free variable set to zero, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &FieldVector) -> Result<Option<FieldVector>> {
        if b.modulus != self.modulus {
            return Err(QssError::ModulusMismatch {
                left: self.modulus.get(),
                right: b.modulus.get(),
            });
        }
        if b.len() != self.rows {
            return Err(QssError::DimensionMismatch {
                expected: self.rows,
                actual: b.len(),
            });
        }
        let (m, pivots) = self.reduce(Some(&b.values));
        let rank = pivots.len();
        if m[rank..].iter().any(|row| row[self.cols] != 0) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (r, &col) in pivots.iter().enumerate() {
            x[col] = m[r][self.cols];
        }
        Ok(Some(FieldVector {
            modulus: self.modulus,
            values: x,
        }))
    }

    /// Whether `target` is a linear combination of the rows, decided by
    /// comparing ranks with and without `target` appended as an extra row.
    pub fn row_span_contains(&self, target: &FieldVector) -> Result<bool> {
        if target.modulus != self.modulus {
            return Err(QssError::ModulusMismatch {
                left: self.modulus.get(),
                right: target.modulus.get(),
            });
        }
        if target.len() != self.cols {
            return Err(QssError::DimensionMismatch {
                expected: self.cols,
                actual: target.len(),
            });
        }
        if target.is_zero() {
            return Ok(true);
        }
        let mut extended = self.clone();
        extended.data.extend_from_slice(&target.values);
        extended.rows += 1;
        Ok(extended.rank() == self.rank())
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.cols) {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

pub fn mat_vec_mul(m: &FieldMatrix, v: &FieldVector) -> Result<FieldVector> {
    m.mul_vec(v)
}

pub fn solve_linear(a: &FieldMatrix, b: &FieldVector) -> Result<Option<FieldVector>> {
    a.solve(b)
}

pub fn row_span_contains(m: &FieldMatrix, target: &FieldVector) -> Result<bool> {
    m.row_span_contains(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> PrimeModulus {
        PrimeModulus::new(7).unwrap()
    }

    fn example_matrix() -> FieldMatrix {
        FieldMatrix::new(
            f7(),
            &[vec![0, 0, 1, 1], vec![0, 1, 0, 6], vec![2, 1, 1, 0], vec![3, 1, 2, 1]],
        )
        .unwrap()
    }

    fn vec7(v: &[u64]) -> FieldVector {
        FieldVector::new(f7(), v.to_vec()).unwrap()
    }

    /// Brute force: does any coefficient vector combine the rows into `target`?
    fn brute_span(m: &FieldMatrix, target: &FieldVector) -> bool {
        let d = m.modulus().get();
        let k = m.rows();
        let total = d.pow(k as u32);
        (0..total).any(|mut code| {
            let mut acc = vec![0u64; m.cols()];
            for r in 0..k {
                let c = code % d;
                code /= d;
                for (col, a) in acc.iter_mut().enumerate() {
                    *a = (*a + c * m.get(r, col).value()) % d;
                }
            }
            acc == target.as_slice()
        })
    }

    #[test]
    fn rejects_non_primes() {
        for d in [0, 1, 2, 4, 6, 9, 15, 21, 25, 49] {
            assert_eq!(PrimeModulus::new(d), Err(QssError::NotPrime(d)));
        }
        for d in [3, 5, 7, 11, 13, 101, 7919] {
            assert!(PrimeModulus::new(d).is_ok());
        }
    }

    #[test]
    fn arithmetic_examples() {
        let p = f7();
        let e = |v| p.element(v);
        assert_eq!(field_arith(e(6), e(5), FieldOp::Add).unwrap(), e(4));
        assert_eq!(field_arith(e(3), e(3), FieldOp::Mul).unwrap(), e(2));
        assert_eq!(field_arith(e(0), e(4), FieldOp::Sub).unwrap(), e(3));
        let other = PrimeModulus::new(5).unwrap().element(1);
        assert!(matches!(
            field_arith(e(1), other, FieldOp::Add),
            Err(QssError::ModulusMismatch { left: 7, right: 5 })
        ));
    }

    #[test]
    fn inverse_examples() {
        let p = f7();
        assert_eq!(field_inv(p.element(3)).unwrap(), p.element(5));
        assert_eq!(field_inv(p.element(1)).unwrap(), p.element(1));
        assert_eq!(field_inv(p.element(0)), Err(QssError::NoInverse));
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        for d in [3, 5, 7, 11, 13] {
            let p = PrimeModulus::new(d).unwrap();
            for a in p.elements().skip(1) {
                assert_eq!(a * a.inv().unwrap(), p.one(), "d={d} a={a}");
            }
        }
    }

    #[test]
    fn element_range_is_checked() {
        assert!(FieldElement::new(7, f7()).is_err());
        assert_eq!(f7().element_i64(-4), f7().element(3));
    }

    #[test]
    fn mat_vec_examples() {
        let m = example_matrix();
        assert_eq!(mat_vec_mul(&m, &vec7(&[2, 1, 0, 5])).unwrap(), vec7(&[5, 3, 5, 5]));
        assert_eq!(mat_vec_mul(&m, &vec7(&[4, 3, 5, 1])).unwrap(), vec7(&[6, 2, 2, 5]));
        let v = vec7(&[1, 6, 3, 0]);
        assert_eq!(mat_vec_mul(&FieldMatrix::identity(f7(), 4), &v).unwrap(), v);
        assert!(matches!(
            mat_vec_mul(&m, &vec7(&[1, 2])),
            Err(QssError::DimensionMismatch { expected: 4, actual: 2 })
        ));
    }

    #[test]
    fn solve_examples() {
        let m = example_matrix();
        let xi = FieldVector::unit(f7(), 4, 0);
        let lambda = solve_linear(&m.transpose(), &xi).unwrap().unwrap();
        assert_eq!(lambda, vec7(&[3, 3, 4, 0]));

        let b = vec7(&[4, 0, 2, 6]);
        assert_eq!(solve_linear(&FieldMatrix::identity(f7(), 4), &b).unwrap().unwrap(), b);

        let rows_2_4 = m.select_rows(&[1, 3]);
        assert_eq!(solve_linear(&rows_2_4.transpose(), &xi).unwrap(), None);
    }

    #[test]
    fn span_examples() {
        let m = example_matrix();
        let xi = FieldVector::unit(f7(), 4, 0);
        assert!(row_span_contains(&m.select_rows(&[0, 1, 2]), &xi).unwrap());
        assert!(!row_span_contains(&m.select_rows(&[1, 3]), &xi).unwrap());
        assert!(row_span_contains(&m, &FieldVector::zeros(f7(), 4)).unwrap());
        // brute-force agreement on the same cases
        assert!(brute_span(&m.select_rows(&[0, 1, 2]), &xi));
        assert!(!brute_span(&m.select_rows(&[1, 3]), &xi));
    }

    #[test]
    fn rank_of_example_is_three() {
        assert_eq!(example_matrix().rank(), 3);
        assert_eq!(FieldMatrix::identity(f7(), 5).rank(), 5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn system() -> impl Strategy<Value = (u64, Vec<Vec<u64>>, Vec<u64>)> {
            (prop::sample::select(vec![3u64, 5, 7, 11]), 1usize..5, 1usize..5).prop_flat_map(|(d, rows, cols)| {
                (
                    Just(d),
                    prop::collection::vec(prop::collection::vec(0..d, cols), rows),
                    prop::collection::vec(0..d, rows),
                )
            })
        }

        fn small_span_case() -> impl Strategy<Value = (u64, Vec<Vec<u64>>, Vec<u64>)> {
            (prop::sample::select(vec![3u64, 5, 7]), 1usize..4, 1usize..5).prop_flat_map(|(d, rows, cols)| {
                (
                    Just(d),
                    prop::collection::vec(prop::collection::vec(0..d, cols), rows),
                    prop::collection::vec(0..d, cols),
                )
            })
        }

        proptest! {
            #[test]
            fn solutions_satisfy_system((d, rows, b) in system()) {
                let p = PrimeModulus::new(d).unwrap();
                let a = FieldMatrix::new(p, &rows).unwrap();
                let b = FieldVector::new(p, b).unwrap();
                if let Some(x) = a.solve(&b).unwrap() {
                    prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
                }
            }

            #[test]
            fn span_matches_enumeration((d, rows, target) in small_span_case()) {
                let p = PrimeModulus::new(d).unwrap();
                let m = FieldMatrix::new(p, &rows).unwrap();
                let t = FieldVector::new(p, target).unwrap();
                prop_assert_eq!(m.row_span_contains(&t).unwrap(), brute_span(&m, &t));
                // solve on the transpose is a second route to the same answer
                prop_assert_eq!(m.transpose().solve(&t).unwrap().is_some(), brute_span(&m, &t));
            }
        }
    }
}
