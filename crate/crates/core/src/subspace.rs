//! Row spaces in canonical form and the subspace calculus used by repair
//! conditions: sum, intersection, inclusion, direct sums and images under an
//! operator.
//!
//! A [`Subspace`] stores its basis in reduced row-echelon form with no zero
//! rows. That basis is unique, so two subspaces are identical exactly when
//! their bases compare equal.

use serde::Serialize;

use crate::algebra::{FieldElement, FieldSpec, Matrix};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

/// Inclusion relation between two subspaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AInB,
    BInA,
    Incomparable,
}

impl Subspace {
    /// Row space of `m`.
    pub fn span(m: &Matrix) -> Subspace {
        Subspace { ambient: m.cols(), basis: m.row_basis() }
    }

    pub fn zero(field: &FieldSpec, ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::zeros(field, 0, ambient) }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::identity(field, ambient) }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn field(&self) -> &FieldSpec {
        self.basis.field()
    }

    /// Canonical basis (RREF, no zero rows).
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Pivot columns of the canonical basis.
    fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim())
            .map(|r| self.basis.row(r).iter().position(|x| !x.is_zero()).expect("basis rows are nonzero"))
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::shape(format!("ambient dimensions {} and {}", self.ambient, other.ambient)));
        }
        if self.field() != other.field() {
            return Err(Error::shape(format!("subspaces over {} and {}", self.field(), other.field())));
        }
        Ok(())
    }

    /// Smallest subspace containing both.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let stacked = Matrix::vstack(self.field(), &[&self.basis, &other.basis])?;
        Ok(Subspace::span(&stacked))
    }

    /// Intersection by the Zassenhaus construction: reduce `[[A, A], [B, 0]]`
    /// and keep the right halves of rows whose left half vanished.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let f = self.field();
        let l = self.ambient;
        let top = Matrix::hstack(f, &[&self.basis, &self.basis])?;
        let bottom = Matrix::hstack(f, &[&other.basis, &Matrix::zeros(f, other.dim(), l)])?;
        let e = Matrix::vstack(f, &[&top, &bottom])?.rref();
        let right: Vec<usize> = (l..2 * l).collect();
        let rows: Vec<usize> =
            e.pivots.iter().enumerate().filter(|&(_, &p)| p >= l).map(|(r, _)| r).collect();
        Ok(Subspace::span(&e.matrix.select(&rows, &right)))
    }

    pub fn compare(&self, other: &Subspace) -> Result<Relation> {
        self.check_compatible(other)?;
        if self.basis == other.basis {
            return Ok(Relation::Equal);
        }
        let s = self.sum(other)?.dim();
        Ok(if s == other.dim() {
            Relation::AInB
        } else if s == self.dim() {
            Relation::BInA
        } else {
            Relation::Incomparable
        })
    }

    /// `self ⪯ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        Ok(matches!(self.compare(other)?, Relation::Equal | Relation::AInB))
    }

    /// Row space of `basis · c`.
    pub fn apply(&self, c: &Matrix) -> Result<Subspace> {
        if c.rows() != self.ambient || c.cols() != self.ambient {
            return Err(Error::shape(format!(
                "operator {}x{} on ambient dimension {}",
                c.rows(),
                c.cols(),
                self.ambient
            )));
        }
        if c.field() != self.field() {
            return Err(Error::shape("operator over a different field"));
        }
        Ok(Subspace::span(&self.basis.mul(c)?))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
        let f = self.field();
        let coeffs: Vec<FieldElement> = self.pivots().map(|p| v[p]).collect();
        let mut recon = vec![FieldElement::ZERO; self.ambient];
        for (r, &a) in coeffs.iter().enumerate() {
            for (x, &b) in recon.iter_mut().zip(self.basis.row(r)) {
                *x = f.add(*x, f.mul(a, b));
            }
        }
        (recon == v).then_some(coeffs)
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        v.len() == self.ambient && self.coordinates(v).is_some()
    }

    /// The matrix `P` with `basis · c = P · basis`.
    ///
    /// Exists iff `apply(c) ⪯ self`; `P` is invertible iff `apply(c) = self`.
    pub fn invariance_witness(&self, c: &Matrix) -> Result<Matrix> {
        let image = self.basis.mul(c).map_err(|_| {
            Error::shape(format!("operator {}x{} on ambient dimension {}", c.rows(), c.cols(), self.ambient))
        })?;
        if !c.is_square() {
            return Err(Error::shape("operator must be square"));
        }
        let d = self.dim();
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            let coeffs = self.coordinates(image.row(r)).ok_or(Error::NotInvariant)?;
            data.extend(coeffs);
        }
        Matrix::from_elements(self.field(), d, d, data)
    }

    /// Canonical key usable for hashing and ordering.
    pub fn key(&self) -> Vec<u32> {
        self.basis.entries().iter().map(|x| x.value()).collect()
    }

    /// Every subspace of dimension `dim` in `F^ambient`, sorted by canonical key.
    pub fn enumerate(field: &FieldSpec, ambient: usize, dim: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        if dim > ambient {
            return out;
        }
        let q = field.order() as u64;
        for pivots in combinations(ambient, dim) {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &p)| {
                    let pivots = &pivots;
                    (p + 1..ambient).filter(move |c| !pivots.contains(c)).map(move |c| (r, c))
                })
                .collect();
            let total = q.pow(free.len() as u32);
            for code in 0..total {
                let mut m = Matrix::zeros(field, dim, ambient);
                for (r, &p) in pivots.iter().enumerate() {
                    m.set(r, p, FieldElement::ONE);
                }
                let mut c = code;
                for &(r, col) in &free {
                    m.set(r, col, field.reduce(c % q));
                    c /= q;
                }
                out.push(Subspace { ambient, basis: m });
            }
        }
        out.sort_by_key(Subspace::key);
        out
    }
}

/// Ascending `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn span(m: &Matrix) -> Subspace {
    Subspace::span(m)
}

/// True iff the dimension of the iterated sum equals the sum of dimensions.
pub fn is_direct_sum(parts: &[Subspace]) -> Result<bool> {
    let first = parts.first().ok_or_else(|| Error::shape("direct-sum test needs at least one part"))?;
    let mut total = first.clone();
    let mut dims = first.dim();
    for p in &parts[1..] {
        total = total.sum(p)?;
        dims += p.dim();
    }
    Ok(total.dim() == dims)
}
