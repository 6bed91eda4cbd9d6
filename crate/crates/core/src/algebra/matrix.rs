use std::fmt;

use super::field::{FieldElement, FieldSpec};
use crate::error::{Error, Result};

/// Dense row-major matrix over a finite field.
///
/// Vectors are treated as rows when they multiply from the left
/// (`S·C`) and as columns when a matrix acts on node contents (`C·W`).
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for (c, x) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

/// Result of reduced row-echelon reduction.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// The RREF matrix, same shape as the input (zero rows at the bottom).
    pub matrix: Matrix,
    /// Pivot column of each nonzero row, strictly increasing.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduce `data` (rows x cols, row-major) in place to RREF, pivoting only in
/// columns `< pivot_limit`. Returns the pivot columns.
fn reduce_in_place(
    field: &FieldSpec,
    data: &mut [FieldElement],
    rows: usize,
    cols: usize,
    pivot_limit: usize,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..pivot_limit.min(cols) {
        if next == rows {
            break;
        }
        let Some(p) = (next..rows).find(|&r| !data[r * cols + c].is_zero()) else {
            continue;
        };
        if p != next {
            for j in 0..cols {
                data.swap(p * cols + j, next * cols + j);
            }
        }
        let inv = field.inv(data[next * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            data[next * cols + j] = field.mul(data[next * cols + j], inv);
        }
        for r in 0..rows {
            if r == next {
                continue;
            }
            let factor = data[r * cols + c];
            if factor.is_zero() {
                continue;
            }
            let neg = field.neg(factor);
            for j in c..cols {
                let t = field.mul(neg, data[next * cols + j]);
                data[r * cols + j] = field.add(data[r * cols + j], t);
            }
        }
        pivots.push(c);
        next += 1;
    }
    pivots
}

impl Matrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElement::ONE;
        }
        m
    }

    /// Build from raw element values; every value must be a canonical representative.
    pub fn from_values(field: &FieldSpec, rows: usize, cols: usize, values: &[u64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::shape(format!("{} values given for a {rows}x{cols} matrix", values.len())));
        }
        let data = values.iter().map(|&v| field.elem(v)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// Build from nested rows of raw values.
    pub fn from_rows<R: AsRef<[u64]>>(field: &FieldSpec, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::shape("ragged rows"));
        }
        let flat: Vec<u64> = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_values(field, rows.len(), cols, &flat)
    }

    pub fn from_elements(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        data: Vec<FieldElement>,
    ) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!("{} entries given for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|x| x.0 >= field.order()) {
            return Err(Error::Field(format!("{bad} is not an element of {field}")));
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// A 1×n row vector.
    pub fn row_vector(field: &FieldSpec, v: &[FieldElement]) -> Self {
        Matrix { field: field.clone(), rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        assert!(v.0 < self.field.order(), "element outside field");
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Field(format!("operands over {} and {}", self.field, other.field)));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: impl Fn(FieldElement, FieldElement) -> FieldElement,
    ) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, s: FieldElement) -> Matrix {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| self.field.mul(s, x)).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.data[i * self.cols + t];
                if a.is_zero() {
                    continue;
                }
                let orow = &other.data[t * other.cols..(t + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = f.add(*d, f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// `self · v` with `v` read as a column vector.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::shape(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(FieldElement::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// Stack matrices vertically.
    pub fn vstack(field: &FieldSpec, parts: &[&Matrix]) -> Result<Matrix> {
        let cols = parts.first().map_or(0, |m| m.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            if &m.field != field {
                return Err(Error::Field("vstack over mixed fields".into()));
            }
            if m.cols != cols {
                return Err(Error::shape("vstack of differing widths"));
            }
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// Concatenate matrices horizontally.
    pub fn hstack(field: &FieldSpec, parts: &[&Matrix]) -> Result<Matrix> {
        let rows = parts.first().map_or(0, |m| m.rows);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::shape("hstack of differing heights"));
        }
        if parts.iter().any(|m| &m.field != field) {
            return Err(Error::Field("hstack over mixed fields".into()));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for m in parts {
                data.extend_from_slice(m.row(r));
            }
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// Row-major flattening into a 1×(rows·cols) matrix.
    pub fn vectorize(&self) -> Matrix {
        Matrix { field: self.field.clone(), rows: 1, cols: self.rows * self.cols, data: self.data.clone() }
    }

    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let pivots = reduce_in_place(&self.field, &mut m.data, m.rows, m.cols, m.cols);
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        reduce_in_place(&self.field, &mut data, self.rows, self.cols, self.cols).len()
    }

    /// The RREF with zero rows removed.
    pub fn row_basis(&self) -> Matrix {
        let e = self.rref();
        let r = e.rank();
        let cols = self.cols;
        let mut m = e.matrix;
        m.data.truncate(r * cols);
        m.rows = r;
        m
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::shape(format!("inverse of non-square {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let aug = Matrix::hstack(&self.field, &[self, &Matrix::identity(&self.field, n)])?;
        let mut data = aug.data;
        let pivots = reduce_in_place(&self.field, &mut data, n, 2 * n, n);
        if pivots.len() < n {
            return Err(Error::Singular);
        }
        let mut out = Matrix::zeros(&self.field, n, n);
        for r in 0..n {
            out.data[r * n..(r + 1) * n].copy_from_slice(&data[r * 2 * n + n..(r + 1) * 2 * n]);
        }
        Ok(out)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Some `x` with `self · x = rhs`, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &Matrix) -> Result<Option<Matrix>> {
        self.check_field(rhs)?;
        if rhs.rows != self.rows {
            return Err(Error::shape("right-hand side height mismatch"));
        }
        let width = self.cols + rhs.cols;
        let aug = Matrix::hstack(&self.field, &[self, rhs])?;
        let mut data = aug.data;
        let pivots = reduce_in_place(&self.field, &mut data, self.rows, width, self.cols);
        // inconsistent iff a zero row on the left carries a nonzero right part
        for r in pivots.len()..self.rows {
            if data[r * width + self.cols..(r + 1) * width].iter().any(|x| !x.is_zero()) {
                return Ok(None);
            }
        }
        let mut x = Matrix::zeros(&self.field, self.cols, rhs.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            x.data[pc * rhs.cols..(pc + 1) * rhs.cols]
                .copy_from_slice(&data[r * width + self.cols..(r + 1) * width]);
        }
        Ok(Some(x))
    }

    /// Rows span the right kernel `{x : self · x = 0}`.
    pub fn right_kernel(&self) -> Matrix {
        let e = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        let mut out = Matrix::zeros(&self.field, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.data[k * self.cols + fc] = FieldElement::ONE;
            for (r, &pc) in e.pivots.iter().enumerate() {
                out.data[k * self.cols + pc] = self.field.neg(e.matrix.get(r, fc));
            }
        }
        out
    }

    /// Submatrix with the chosen rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c));
            }
        }
        Matrix { field: self.field.clone(), rows: rows.len(), cols: cols.len(), data }
    }
}

/// Standard matrix product `a · b`.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.mul(b)
}

pub fn mat_rank(a: &Matrix) -> usize {
    a.rank()
}

pub fn mat_inverse(a: &Matrix) -> Result<Matrix> {
    a.inverse()
}

pub fn vectorize(a: &Matrix) -> Matrix {
    a.vectorize()
}

/// Echelon basis that grows one vector at a time.
///
/// Rows are kept in insertion order; each stored row is zero at the pivots of
/// every earlier row, so a single forward sweep reduces a candidate.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    field: FieldSpec,
    width: usize,
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl IncrementalBasis {
    pub fn new(field: &FieldSpec, width: usize) -> Self {
        IncrementalBasis { field: field.clone(), width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [FieldElement]) {
        let f = &self.field;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c.is_zero() {
                continue;
            }
            let neg = f.neg(c);
            for (x, &y) in v.iter_mut().zip(row) {
                *x = f.add(*x, f.mul(neg, y));
            }
        }
    }

    /// True if `v` lies in the current span.
    pub fn contains(&self, v: &[FieldElement]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Add `v`; returns false (and leaves the basis unchanged) if it was dependent.
    pub fn insert(&mut self, v: &[FieldElement]) -> bool {
        assert_eq!(v.len(), self.width, "vector width");
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = self.field.inv(w[p]).expect("nonzero pivot");
        for x in w.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }
}
