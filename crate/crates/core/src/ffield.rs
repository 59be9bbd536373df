//! Exact arithmetic and linear algebra over a prime field `F_d`.
//!
//! Residues are stored as `u32` in `[0, d)`. Vectors and matrices are
//! positional; the vertex labels that give positions a meaning live in
//! [`crate::graph::CodingGraph`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field order {0} is not prime")]
    NotPrime(u32),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
}

/// The prime field of order `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    d: u32,
}

impl Field {
    pub fn new(d: u32) -> Result<Self, FieldError> {
        if d < 2
            || (2..d)
                .take_while(|k| k * k <= d)
                .any(|k| d.is_multiple_of(k))
        {
            return Err(FieldError::NotPrime(d));
        }
        Ok(Self { d })
    }

    #[inline]
    pub fn order(self) -> u32 {
        self.d
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.d as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.d as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + (self.d - b % self.d) as u64) % self.d as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.d as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.d - a % self.d) % self.d
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.d;
        base %= self.d;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.d) {
            return Err(FieldError::InverseOfZero);
        }
        // Fermat: a^(d-2)
        Ok(self.pow(a, self.d as u64 - 2))
    }

    pub fn scalar(self, value: u32) -> FScalar {
        FScalar {
            value: value % self.d,
            field: self,
        }
    }

    /// Number of points of `F_d^n`.
    pub fn space_size(self, n: usize) -> usize {
        (self.d as usize).pow(n as u32)
    }
}

/// A single field element that remembers its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FScalar {
    value: u32,
    field: Field,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

impl FScalar {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> Field {
        self.field
    }

    fn same_field(self, other: FScalar) -> Result<Field, FieldError> {
        if self.field != other.field {
            return Err(FieldError::ModulusMismatch(
                self.field.order(),
                other.field.order(),
            ));
        }
        Ok(self.field)
    }

    pub fn checked_add(self, other: FScalar) -> Result<FScalar, FieldError> {
        let f = self.same_field(other)?;
        Ok(f.scalar(f.add(self.value, other.value)))
    }

    pub fn checked_mul(self, other: FScalar) -> Result<FScalar, FieldError> {
        let f = self.same_field(other)?;
        Ok(f.scalar(f.mul(self.value, other.value)))
    }

    pub fn inv(self) -> Result<FScalar, FieldError> {
        Ok(self.field.scalar(self.field.inv(self.value)?))
    }
}

impl core::ops::Neg for FScalar {
    type Output = FScalar;

    fn neg(self) -> FScalar {
        self.field.scalar(self.field.neg(self.value))
    }
}

/// Apply a binary or unary field operation. Unary operations ignore `b` but
/// still require a matching modulus.
pub fn field_arith(a: FScalar, b: FScalar, op: ArithOp) -> Result<FScalar, FieldError> {
    a.same_field(b)?;
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Neg => Ok(-a),
        ArithOp::Inv => a.inv(),
    }
}

impl fmt::Display for FScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.order())
    }
}

/// A vector in `F_d^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVec {
    field: Field,
    entries: Vec<u32>,
}

impl FVec {
    pub fn zeros(field: Field, n: usize) -> Self {
        Self {
            field,
            entries: vec![0; n],
        }
    }

    /// Builds a vector, reducing every entry modulo `d`.
    pub fn new(field: Field, entries: Vec<u32>) -> Self {
        let entries = entries.into_iter().map(|x| x % field.order()).collect();
        Self { field, entries }
    }

    pub fn from_signed(field: Field, entries: &[i64]) -> Self {
        Self {
            field,
            entries: entries.iter().map(|&x| field.reduce(x)).collect(),
        }
    }

    /// The `index`-th point of `F_d^n` in lexicographic order, first entry
    /// most significant.
    pub fn from_index(field: Field, n: usize, mut index: usize) -> Self {
        let d = field.order() as usize;
        let mut entries = vec![0; n];
        for slot in entries.iter_mut().rev() {
            *slot = (index % d) as u32;
            index /= d;
        }
        Self { field, entries }
    }

    /// Inverse of [`FVec::from_index`].
    pub fn to_index(&self) -> usize {
        let d = self.field.order() as usize;
        self.entries.iter().fold(0, |acc, &x| acc * d + x as usize)
    }

    /// Iterates over all of `F_d^n` in lexicographic order.
    pub fn all(field: Field, n: usize) -> impl Iterator<Item = FVec> {
        (0..field.space_size(n)).map(move |i| FVec::from_index(field, n, i))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: u32) {
        self.entries[i] = value % self.field.order();
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    fn check_len(&self, other: &FVec) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::ModulusMismatch(
                self.field.order(),
                other.field.order(),
            ));
        }
        if self.len() != other.len() {
            return Err(FieldError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FVec) -> Result<FVec, FieldError> {
        self.check_len(other)?;
        let f = self.field;
        Ok(FVec {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &FVec) -> Result<FVec, FieldError> {
        self.check_len(other)?;
        let f = self.field;
        Ok(FVec {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        })
    }

    pub fn neg(&self) -> FVec {
        let f = self.field;
        FVec {
            field: f,
            entries: self.entries.iter().map(|&a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, c: u32) -> FVec {
        let f = self.field;
        FVec {
            field: f,
            entries: self.entries.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn dot(&self, other: &FVec) -> Result<u32, FieldError> {
        self.check_len(other)?;
        let f = self.field;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &FVec) -> FVec {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        FVec {
            field: self.field,
            entries,
        }
    }

    /// Sub-vector at the given positions.
    pub fn select(&self, positions: &[usize]) -> FVec {
        FVec {
            field: self.field,
            entries: positions.iter().map(|&i| self.entries[i]).collect(),
        }
    }

    /// The slice `[start, end)` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> FVec {
        FVec {
            field: self.field,
            entries: self.entries[start..end].to_vec(),
        }
    }
}

/// A dense matrix over `F_d`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FMat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FMat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.order();
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u32>]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(FieldError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| x % field.order()));
        }
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_signed_rows(field: Field, rows: &[&[i64]]) -> Result<Self, FieldError> {
        let rows: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.reduce(x)).collect())
            .collect();
        Self::from_rows(field, &rows)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.data[r * self.cols + c] = value % self.field.order();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn transpose(&self) -> FMat {
        let mut t = FMat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn neg(&self) -> FMat {
        let f = self.field;
        FMat {
            data: self.data.iter().map(|&x| f.neg(x)).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &FMat) -> Result<FMat, FieldError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(FieldError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let f = self.field;
        Ok(FMat {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
            ..self.clone()
        })
    }

    /// Sub-block with the given row and column positions, in that order.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> FMat {
        let mut b = FMat::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                b.data[i * cols.len() + j] = self.get(r, c);
            }
        }
        b
    }

    /// Horizontal stack `[self | other]`.
    pub fn hstack(&self, other: &FMat) -> Result<FMat, FieldError> {
        if self.rows != other.rows {
            return Err(FieldError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut m = FMat::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &FVec) -> Result<FVec, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let f = self.field;
        let entries = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v.entries())
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect();
        Ok(FVec { field: f, entries })
    }

    pub fn mul(&self, other: &FMat) -> Result<FMat, FieldError> {
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let f = self.field;
        let mut m = FMat::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    m.data[idx] = f.add(m.data[idx], f.mul(a, other.get(k, c)));
                }
            }
        }
        Ok(m)
    }

    /// Reduced row echelon form with first-nonzero pivoting. Returns the
    /// reduced matrix and its pivot columns.
    pub fn rref(&self) -> (FMat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in 0..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.data[row * m.cols + c] = v;
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r == row || factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.data[r * m.cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A particular solution of `self · x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &FVec) -> Result<Option<FVec>, FieldError> {
        if b.len() != self.rows {
            return Err(FieldError::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let rhs = FMat {
            field: self.field,
            rows: self.rows,
            cols: 1,
            data: b.entries().to_vec(),
        };
        let aug = self.hstack(&rhs)?;
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = FVec::zeros(self.field, self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            x.set(c, red.get(r, self.cols));
        }
        Ok(Some(x))
    }

    /// A basis of `{x : self · x = 0}`, one vector per free column in
    /// increasing column order. Empty when the kernel is trivial.
    pub fn kernel_basis(&self) -> Vec<FVec> {
        let f = self.field;
        let (red, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut x = FVec::zeros(f, self.cols);
            x.set(free, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                x.set(pc, f.neg(red.get(r, free)));
            }
            basis.push(x);
        }
        basis
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<FMat, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let aug = self.hstack(&FMat::identity(self.field, n))?;
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(FieldError::Singular);
        }
        Ok(red.block(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }
}

/// Inverse of a square block; an error signals a singular (non-admissible)
/// block.
pub fn invert_block(m: &FMat) -> Result<FMat, FieldError> {
    m.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(d: u32) -> Field {
        Field::new(d).unwrap()
    }

    #[test]
    fn rejects_composite_order() {
        assert_eq!(Field::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(Field::new(1), Err(FieldError::NotPrime(1)));
        assert!(Field::new(7).is_ok());
    }

    #[test]
    fn inverse_scan_f5() {
        let f5 = f(5);
        // exhaustive scan for the element b with 2b = 1
        let scanned = (1..5).find(|&b| f5.mul(2, b) == 1).unwrap();
        assert_eq!(scanned, 3);
        let two = f5.scalar(2);
        assert_eq!(field_arith(two, two, ArithOp::Inv).unwrap().value(), 3);
    }

    #[test]
    fn small_arith_examples() {
        let one = f(2).scalar(1);
        assert_eq!(field_arith(one, one, ArithOp::Neg).unwrap().value(), 1);
        let two = f(3).scalar(2);
        assert_eq!(field_arith(two, two, ArithOp::Mul).unwrap().value(), 1);
    }

    #[test]
    fn arith_errors() {
        let z = f(5).scalar(0);
        assert_eq!(z.inv(), Err(FieldError::InverseOfZero));
        let a = f(3).scalar(1);
        let b = f(5).scalar(1);
        assert_eq!(
            field_arith(a, b, ArithOp::Add),
            Err(FieldError::ModulusMismatch(3, 5))
        );
    }

    #[test]
    fn every_nonzero_element_has_inverse() {
        for d in [2, 3, 5, 7, 11, 13] {
            let fd = f(d);
            for a in 1..d {
                assert_eq!(fd.mul(a, fd.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn zero_matrix_kernel_is_full() {
        let m = FMat::zeros(f(2), 2, 2);
        assert_eq!(m.kernel_basis().len(), 2);
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let f3 = f(3);
        let b = FVec::new(f3, vec![2, 0, 1]);
        assert_eq!(FMat::identity(f3, 3).solve(&b).unwrap(), Some(b));
    }

    #[test]
    fn inconsistent_system() {
        let f2 = f(2);
        let m = FMat::from_rows(f2, &[vec![1, 1], vec![1, 1]]).unwrap();
        let b = FVec::new(f2, vec![0, 1]);
        assert_eq!(m.solve(&b).unwrap(), None);
    }

    #[test]
    fn invert_block_examples() {
        let f2 = f(2);
        let id = FMat::identity(f2, 3);
        assert_eq!(invert_block(&id).unwrap(), id);
        let m = FMat::from_rows(f2, &[vec![1, 1], vec![0, 1]]).unwrap();
        // brute force over all 16 binary 2x2 matrices
        let brute = (0..16u32)
            .map(|bits| {
                FMat::from_rows(
                    f2,
                    &[
                        vec![bits & 1, (bits >> 1) & 1],
                        vec![(bits >> 2) & 1, (bits >> 3) & 1],
                    ],
                )
                .unwrap()
            })
            .find(|cand| m.mul(cand).unwrap() == FMat::identity(f2, 2))
            .unwrap();
        assert_eq!(invert_block(&m).unwrap(), brute);
        assert_eq!(brute, m);
        assert_eq!(
            invert_block(&FMat::zeros(f2, 2, 2)),
            Err(FieldError::Singular)
        );
        assert!(matches!(
            invert_block(&FMat::zeros(f2, 2, 3)),
            Err(FieldError::NotSquare { .. })
        ));
    }

    #[test]
    fn index_roundtrip() {
        let f3 = f(3);
        for i in 0..27 {
            assert_eq!(FVec::from_index(f3, 3, i).to_index(), i);
        }
        assert_eq!(FVec::from_index(f3, 2, 5).entries(), &[1, 2]);
    }
}
