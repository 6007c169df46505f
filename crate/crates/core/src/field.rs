//! Arithmetic in prime fields F_p and dense linear algebra over them.
//!
//! Elimination always pivots on the first nonzero entry of the leftmost
//! remaining column, so every derived quantity (kernel bases, particular
//! solutions, inverses) is a deterministic function of the input.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("operands live in different fields (p = {0} and p = {1})")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("evaluation point {0} appears more than once")]
    RepeatedPoint(u32),
    #[error("{needed} distinct evaluation points requested but F_{p} has only {p}")]
    TooFewPoints { needed: usize, p: u32 },
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("matrix is singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, FieldError>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime_at_least(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// A validated prime modulus together with raw `u32` arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a % self.p == 0 {
            return Err(FieldError::DivisionByZero(self.p));
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    pub fn dot(self, a: &[u32], b: &[u32]) -> u32 {
        let p = self.p as u64;
        let mut acc = 0u64;
        for (x, y) in a.iter().zip(b) {
            acc = (acc + *x as u64 * *y as u64) % p;
        }
        acc as u32
    }

    /// `acc += c * v`, entrywise.
    pub fn axpy(self, acc: &mut [u32], c: u32, v: &[u32]) {
        if c == 0 {
            return;
        }
        for (a, x) in acc.iter_mut().zip(v) {
            *a = self.add(*a, self.mul(c, *x));
        }
    }

    pub fn scale(self, v: &mut [u32], c: u32) {
        for a in v.iter_mut() {
            *a = self.mul(*a, c);
        }
    }

    pub fn element(self, v: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            modulus: self.p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        Ok(PrimeField::new(modulus)?.element(value))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn field(self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<PrimeField> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.field())
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        let f = self.same_field(other)?;
        Ok(FieldElement { value: f.add(self.value, other.value), modulus: self.modulus })
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        let f = self.same_field(other)?;
        Ok(FieldElement { value: f.sub(self.value, other.value), modulus: self.modulus })
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        let f = self.same_field(other)?;
        Ok(FieldElement { value: f.mul(self.value, other.value), modulus: self.modulus })
    }

    pub fn checked_div(self, other: Self) -> Result<Self> {
        let f = self.same_field(other)?;
        let inv = f.inv(other.value)?;
        Ok(FieldElement { value: f.mul(self.value, inv), modulus: self.modulus })
    }

    pub fn inv(self) -> Result<Self> {
        Ok(FieldElement { value: self.field().inv(self.value)?, modulus: self.modulus })
    }

    pub fn pow(self, e: u64) -> Self {
        FieldElement { value: self.field().pow(self.value, e), modulus: self.modulus }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { value: self.field().neg(self.value), modulus: self.modulus }
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Outcome of [`FieldMatrix::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// The solution with every free variable set to zero, if the system is consistent.
    pub particular: Option<Vec<u32>>,
    /// Basis of the null space, one vector per free column in column order.
    pub kernel: Vec<Vec<u32>>,
}

/// Reduced row echelon form plus the pivot column of each nonzero row.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: FieldMatrix,
    pub pivots: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Builds a matrix from signed rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Ok(FieldMatrix { field, rows: rows.len(), cols, data })
    }

    /// Builds a matrix from already-reduced rows of equal length.
    pub fn from_reduced_rows(field: PrimeField, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&v| v % field.p));
        }
        Ok(FieldMatrix { field, rows: rows.len(), cols, data })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    fn check_field(&self, other: &FieldMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(FieldError::ModulusMismatch(self.field.p, other.field.p));
        }
        Ok(())
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect())
    }

    pub fn select_rows(&self, idx: &[usize]) -> FieldMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FieldMatrix { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> FieldMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        FieldMatrix { field: self.field, rows: self.rows, cols: idx.len(), data }
    }

    pub fn vstack(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(FieldError::DimensionMismatch(format!(
                "stacking {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FieldMatrix { field: self.field, rows: self.rows + other.rows, cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Gauss-Jordan elimination to reduced row echelon form.
    pub fn rref(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = f.mul(m.data[idx], inv);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let sub = f.mul(factor, m.data[r * m.cols + j]);
                    let idx = i * m.cols + j;
                    m.data[idx] = f.sub(m.data[idx], sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Null space basis: one vector per free column, with that free variable set to 1.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let e = self.rref();
        kernel_from_echelon(&e, self.cols)
    }

    /// Solves `self * x = b`.
    pub fn solve(&self, b: &[u32]) -> Result<Solution> {
        if b.len() != self.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let f = self.field;
        let mut aug = FieldMatrix::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.data[i * (self.cols + 1) + j] = self.get(i, j);
            }
            aug.data[i * (self.cols + 1) + self.cols] = b[i] % f.p;
        }
        let e = aug.rref();
        let consistent = !e.pivots.contains(&self.cols);
        let particular = consistent.then(|| {
            let mut x = vec![0u32; self.cols];
            for (row, &c) in e.pivots.iter().enumerate() {
                x[c] = e.reduced.get(row, self.cols);
            }
            x
        });
        let coeff_pivots: Vec<usize> = e.pivots.iter().copied().filter(|&c| c < self.cols).collect();
        let kernel = kernel_from_pivots(&e.reduced, &coeff_pivots, self.cols);
        Ok(Solution { particular, kernel })
    }

    pub fn inverse(&self) -> Result<FieldMatrix> {
        if self.rows != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = FieldMatrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1 % self.field.p;
        }
        let e = aug.rref();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return Err(FieldError::Singular);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Ok(e.reduced.select_columns(&cols))
    }
}

fn kernel_from_echelon(e: &Echelon, cols: usize) -> Vec<Vec<u32>> {
    kernel_from_pivots(&e.reduced, &e.pivots, cols)
}

fn kernel_from_pivots(reduced: &FieldMatrix, pivots: &[usize], cols: usize) -> Vec<Vec<u32>> {
    let f = reduced.field;
    let mut is_pivot = vec![false; cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; cols];
        v[free] = 1 % f.p;
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = f.neg(reduced.get(row, free));
        }
        basis.push(v);
    }
    basis
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Row space maintained in reduced echelon form as rows arrive one at a time.
///
/// Useful when a linear system has far more (mostly redundant) constraints
/// than unknowns.
#[derive(Clone, Debug)]
pub struct RowReducer {
    field: PrimeField,
    cols: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl RowReducer {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        RowReducer { field, cols, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Residual of `row` after reduction against the current basis.
    pub fn reduce(&self, row: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut r: Vec<u32> = row.iter().map(|&v| v % f.p).collect();
        for (b, &c) in self.basis.iter().zip(&self.pivots) {
            let factor = r[c];
            if factor != 0 {
                f.axpy(&mut r, f.neg(factor), b);
            }
        }
        r
    }

    pub fn contains(&self, row: &[u32]) -> bool {
        self.reduce(row).iter().all(|&v| v == 0)
    }

    /// Adds `row`; returns the new pivot column, or `None` if it was dependent.
    pub fn insert(&mut self, row: &[u32]) -> Option<usize> {
        assert_eq!(row.len(), self.cols, "row length");
        let f = self.field;
        let mut r = self.reduce(row);
        let c = r.iter().position(|&v| v != 0)?;
        let inv = f.inv(r[c]).expect("nonzero");
        f.scale(&mut r, inv);
        for b in self.basis.iter_mut() {
            let factor = b[c];
            if factor != 0 {
                f.axpy(b, f.neg(factor), &r);
            }
        }
        self.basis.push(r);
        self.pivots.push(c);
        Some(c)
    }
}

/// Vandermonde matrix with entry `(i, j) = points[j]^i`.
pub fn vandermonde(points: &[FieldElement]) -> Result<FieldMatrix> {
    let Some(first) = points.first() else {
        return Err(FieldError::DimensionMismatch("no evaluation points".into()));
    };
    let field = first.field();
    let mut seen = std::collections::BTreeSet::new();
    for pt in points {
        if pt.modulus() != field.p {
            return Err(FieldError::ModulusMismatch(field.p, pt.modulus()));
        }
        if !seen.insert(pt.value()) {
            return Err(FieldError::RepeatedPoint(pt.value()));
        }
    }
    let n = points.len();
    let mut v = FieldMatrix::zeros(field, n, n);
    for (j, pt) in points.iter().enumerate() {
        let mut acc = 1 % field.p;
        for i in 0..n {
            v.data[i * n + j] = acc;
            acc = field.mul(acc, pt.value());
        }
    }
    Ok(v)
}

/// The matrix `W = (V^{-1})^T`, so that `V W^T = I`.
pub fn dual_vandermonde(v: &FieldMatrix) -> Result<FieldMatrix> {
    Ok(v.inverse()?.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Size of the row span, by enumerating every coefficient vector.
    fn span_size(m: &FieldMatrix) -> usize {
        let p = m.field().modulus() as usize;
        let mut seen = HashSet::new();
        let total = p.pow(m.rows() as u32);
        for code in 0..total {
            let mut c = code;
            let mut v = vec![0u64; m.cols()];
            for i in 0..m.rows() {
                let coeff = (c % p) as u64;
                c /= p;
                for j in 0..m.cols() {
                    v[j] = (v[j] + coeff * m.get(i, j) as u64) % p as u64;
                }
            }
            seen.insert(v);
        }
        seen.len()
    }

    #[test]
    fn composite_moduli_rejected() {
        for n in [0u64, 1, 4, 6, 9, 15, 21, 25] {
            assert_eq!(PrimeField::new(n), Err(FieldError::NotPrime(n)));
        }
        for n in [2u64, 3, 5, 7, 11, 13, 31, 97] {
            assert!(PrimeField::new(n).is_ok());
        }
    }

    #[test]
    fn inverses_exist_for_all_units() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = gf(p);
            for a in 1..p as u32 {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), 1);
            }
            assert!(f.inv(0).is_err());
        }
    }

    #[test]
    fn element_ops_and_mismatch() {
        let a = FieldElement::new(3, 5).unwrap();
        let b = FieldElement::new(4, 5).unwrap();
        assert_eq!((a + b).value(), 2);
        assert_eq!((a - b).value(), 4);
        assert_eq!((a * b).value(), 2);
        assert_eq!((-a).value(), 2);
        assert_eq!(a.checked_div(b).unwrap().value(), 2);
        let c = FieldElement::new(1, 7).unwrap();
        assert_eq!(a.checked_add(c), Err(FieldError::ModulusMismatch(5, 7)));
        assert_eq!(FieldElement::new(-1, 7).unwrap().value(), 6);
    }

    #[test]
    fn vandermonde_example_and_dual() {
        let pts: Vec<_> = (0..3).map(|v| FieldElement::new(v, 5).unwrap()).collect();
        let v = vandermonde(&pts).unwrap();
        let expected = FieldMatrix::from_rows(gf(5), &[[1, 1, 1], [0, 1, 2], [0, 1, 4]]).unwrap();
        assert_eq!(v, expected);
        let w = dual_vandermonde(&v).unwrap();
        assert_eq!(v.mul(&w.transpose()).unwrap(), FieldMatrix::identity(gf(5), 3));
    }

    #[test]
    fn vandermonde_rejects_repeats() {
        let pts: Vec<_> = [1, 2, 1].iter().map(|&v| FieldElement::new(v, 5).unwrap()).collect();
        assert_eq!(vandermonde(&pts), Err(FieldError::RepeatedPoint(1)));
    }

    #[test]
    fn solve_reports_inconsistency() {
        let m = FieldMatrix::from_rows(gf(3), &[[1, 1], [2, 2]]).unwrap();
        let s = m.solve(&[1, 1]).unwrap();
        assert!(s.particular.is_none());
        assert_eq!(s.kernel, vec![vec![2, 1]]);
    }

    #[test]
    fn singular_inverse_rejected() {
        let m = FieldMatrix::from_rows(gf(7), &[[1, 2], [2, 4]]).unwrap();
        assert_eq!(m.inverse(), Err(FieldError::Singular));
    }

    fn small_matrix() -> impl Strategy<Value = FieldMatrix> {
        (prop::sample::select(vec![2u64, 3, 5]), 1usize..4, 1usize..5).prop_flat_map(|(p, r, c)| {
            prop::collection::vec(0..p as i64, r * c).prop_map(move |d| {
                let rows: Vec<Vec<i64>> = d.chunks(c).map(|ch| ch.to_vec()).collect();
                FieldMatrix::from_rows(gf(p), &rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_matches_span_enumeration(m in small_matrix()) {
            let p = m.field().modulus() as usize;
            prop_assert_eq!(span_size(&m), p.pow(m.rank() as u32));
        }

        #[test]
        fn rank_is_transpose_invariant(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn kernel_vectors_annihilate(m in small_matrix()) {
            let k = m.kernel();
            prop_assert_eq!(k.len(), m.cols() - m.rank());
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(|&x| x == 0));
            }
            let km = FieldMatrix::from_reduced_rows(m.field(), m.cols(), &k).unwrap();
            prop_assert_eq!(km.rank(), k.len());
        }

        #[test]
        fn solve_finds_planted_solutions(m in small_matrix(), seed in any::<u64>()) {
            let p = m.field().modulus() as u64;
            let x: Vec<u32> = (0..m.cols()).map(|j| ((seed >> (j * 3)) % p) as u32).collect();
            let b = m.mul_vec(&x).unwrap();
            let s = m.solve(&b).unwrap();
            let y = s.particular.expect("planted system is consistent");
            prop_assert_eq!(m.mul_vec(&y).unwrap(), b);
            prop_assert_eq!(s.kernel, m.kernel());
        }

        #[test]
        fn row_reducer_agrees_with_rank(m in small_matrix()) {
            let mut rr = RowReducer::new(m.field(), m.cols());
            for i in 0..m.rows() {
                rr.insert(m.row(i));
            }
            prop_assert_eq!(rr.rank(), m.rank());
            for i in 0..m.rows() {
                prop_assert!(rr.contains(m.row(i)));
            }
        }

        #[test]
        fn vandermonde_inverse_identity(p in prop::sample::select(vec![5u64, 7, 11]), n in 1usize..5, shift in 0i64..11) {
            let pts: Vec<_> = (0..n as i64).map(|v| FieldElement::new(v + shift, p).unwrap()).collect();
            prop_assume!(pts.iter().map(|x| x.value()).collect::<HashSet<_>>().len() == n);
            let v = vandermonde(&pts).unwrap();
            let w = dual_vandermonde(&v).unwrap();
            prop_assert_eq!(v.mul(&w.transpose()).unwrap(), FieldMatrix::identity(gf(p), n));
        }
    }
}
