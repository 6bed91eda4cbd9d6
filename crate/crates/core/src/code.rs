//! Systematic `{n = k + r, k, l}` array codes.
//!
//! Parity node `u` stores `W_{k+u} = Σ_j C_{u,j} W_j`, where every `C_{u,j}` is
//! an invertible `l x l` matrix. Indices in the API are 0-based; reports use
//! 1-based node numbers.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{FieldElement, FieldSpec, Matrix};
use crate::error::{Error, Result};
use crate::subspace::combinations;

/// Code parameters and the derived MSR quantities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub l: usize,
    pub field: FieldSpec,
}

impl CodeParams {
    pub fn new(field: &FieldSpec, k: usize, r: usize, l: usize) -> Result<Self> {
        if k == 0 || r == 0 || l == 0 {
            return Err(Error::Param(format!("k={k}, r={r}, l={l} must be positive")));
        }
        if !l.is_multiple_of(r) {
            return Err(Error::Param(format!("r={r} does not divide l={l}")));
        }
        Ok(CodeParams { n: k + r, k, r, l, field: field.clone() })
    }

    /// Symbols each helper sends during repair, `l / r`.
    pub fn beta(&self) -> usize {
        self.l / self.r
    }

    /// Symbols stored per node.
    pub fn alpha(&self) -> usize {
        self.l
    }

    /// File size `B = k·l`.
    pub fn file_size(&self) -> usize {
        self.k * self.l
    }

    /// Number of helpers, `n - 1`.
    pub fn d(&self) -> usize {
        self.n - 1
    }
}

/// A failing square block selection (1-based parity rows and systematic columns).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockWitness {
    pub parity_rows: Vec<usize>,
    pub systematic_cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MdsReport {
    pub ok: bool,
    pub blocks_checked: usize,
    pub witness: Option<BlockWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    params: CodeParams,
    // row-major r x k grid, enc[u * k + j]
    enc: Vec<Matrix>,
}

/// Assemble the `(s·l) x (s·l)` block matrix `(C_{u,j})_{u ∈ rows, j ∈ cols}`.
pub(crate) fn assemble_block<'a>(
    field: &FieldSpec,
    l: usize,
    rows: &[usize],
    cols: &[usize],
    get: impl Fn(usize, usize) -> &'a Matrix,
) -> Matrix {
    let (h, w) = (rows.len() * l, cols.len() * l);
    let mut data = Vec::with_capacity(h * w);
    for &u in rows {
        for i in 0..l {
            for &j in cols {
                data.extend_from_slice(get(u, j).row(i));
            }
        }
    }
    Matrix::from_elements(field, h, w, data).expect("block entries come from the field")
}

/// All square selections `(U, J)` ordered by size, then `U`, then `J`.
pub(crate) fn block_selections(r: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for s in 1..=r.min(k) {
        let us = combinations(r, s);
        let js = combinations(k, s);
        for u in &us {
            for j in &js {
                out.push((u.clone(), j.clone()));
            }
        }
    }
    out
}

impl Code {
    /// Build a code from its `r x k` encoding grid in row-major order.
    pub fn new(params: CodeParams, enc: Vec<Matrix>) -> Result<Self> {
        let (r, k, l) = (params.r, params.k, params.l);
        if enc.len() != r * k {
            return Err(Error::shape(format!(
                "{} encoding matrices given, expected r*k = {}",
                enc.len(),
                r * k
            )));
        }
        for (idx, c) in enc.iter().enumerate() {
            let (u, j) = (idx / k + 1, idx % k + 1);
            if c.rows() != l || c.cols() != l {
                return Err(Error::shape(format!(
                    "C u={u} j={j} is {}x{}, expected {l}x{l}",
                    c.rows(),
                    c.cols()
                )));
            }
            if c.field() != &params.field {
                return Err(Error::Field(format!("C u={u} j={j} over {}", c.field())));
            }
            if !c.is_invertible() {
                return Err(Error::Param(format!("encoding matrix C u={u} j={j} is singular")));
            }
        }
        Ok(Code { params, enc })
    }

    /// Like [`Code::new`] but tolerates singular encoding matrices, so that a
    /// corrupted file can still be checked and its MDS witness reported.
    pub(crate) fn new_unchecked(params: CodeParams, enc: Vec<Matrix>) -> Result<Self> {
        let l = params.l;
        if enc.len() != params.r * params.k || enc.iter().any(|c| c.rows() != l || c.cols() != l) {
            return Err(Error::shape("encoding grid must be r x k matrices of size l x l"));
        }
        Ok(Code { params, enc })
    }

    /// Build from a grid indexed `grid[u][j]`.
    pub fn from_grid(params: CodeParams, grid: Vec<Vec<Matrix>>) -> Result<Self> {
        if grid.len() != params.r || grid.iter().any(|row| row.len() != params.k) {
            return Err(Error::shape("encoding grid must be r x k"));
        }
        Self::new(params, grid.into_iter().flatten().collect())
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        &self.params.field
    }

    /// `C_{u,j}` with 0-based `u ∈ [0, r)`, `j ∈ [0, k)`.
    pub fn matrix(&self, u: usize, j: usize) -> &Matrix {
        &self.enc[u * self.params.k + j]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.enc
    }

    /// True iff the first parity row is all identities.
    pub fn is_normalized(&self) -> bool {
        let id = Matrix::identity(self.field(), self.params.l);
        (0..self.params.k).all(|j| self.matrix(0, j) == &id)
    }

    /// Equivalent code with `C'_{1,j} = I` and `C'_{u,j} = C_{u,j} C_{1,j}^{-1}`,
    /// corresponding to the data change of basis `W'_j = C_{1,j} W_j`.
    pub fn normalize(&self) -> Code {
        if self.is_normalized() {
            return self.clone();
        }
        let k = self.params.k;
        let inverses: Vec<Matrix> =
            (0..k).map(|j| self.matrix(0, j).inverse().expect("encoding matrices are invertible")).collect();
        let enc = (0..self.params.r)
            .flat_map(|u| (0..k).map(move |j| (u, j)))
            .map(|(u, j)| self.matrix(u, j).mul(&inverses[j]).expect("square l x l"))
            .collect();
        Code { params: self.params.clone(), enc }
    }

    fn check_data(&self, data: &[Vec<FieldElement>]) -> Result<()> {
        if data.len() != self.params.k || data.iter().any(|w| w.len() != self.params.l) {
            return Err(Error::shape(format!(
                "data must be {} vectors of length {}",
                self.params.k, self.params.l
            )));
        }
        let q = self.field().order();
        if data.iter().flatten().any(|x| x.value() >= q) {
            return Err(Error::shape(format!("data element outside {}", self.field())));
        }
        Ok(())
    }

    /// Parity contents `W_{k+u} = Σ_j C_{u,j} W_j` for every `u`.
    pub fn encode(&self, data: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
        self.check_data(data)?;
        let f = self.field();
        let (k, l) = (self.params.k, self.params.l);
        Ok((0..self.params.r)
            .map(|u| {
                let mut acc = vec![FieldElement::ZERO; l];
                for (j, w) in data.iter().enumerate().take(k) {
                    let part = self.matrix(u, j).mul_vec(w).expect("shapes checked");
                    for (a, b) in acc.iter_mut().zip(part) {
                        *a = f.add(*a, b);
                    }
                }
                acc
            })
            .collect())
    }

    /// Contents of all `n` nodes: the data followed by the parities.
    pub fn node_contents(&self, data: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
        let mut all = data.to_vec();
        all.extend(self.encode(data)?);
        Ok(all)
    }

    /// The block matrix for 0-based parity rows and systematic columns.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        assemble_block(self.field(), self.params.l, rows, cols, |u, j| self.matrix(u, j))
    }

    /// Check every square block selection for invertibility. The witness is the
    /// first failure ordered by block size, then parity rows, then columns.
    pub fn mds_check(&self) -> MdsReport {
        let selections = block_selections(self.params.r, self.params.k);
        let failure = selections.par_iter().find_first(|(u, j)| !self.block(u, j).is_invertible());
        MdsReport {
            ok: failure.is_none(),
            blocks_checked: selections.len(),
            witness: failure.map(|(u, j)| BlockWitness {
                parity_rows: u.iter().map(|x| x + 1).collect(),
                systematic_cols: j.iter().map(|x| x + 1).collect(),
            }),
        }
    }

    /// Recover `W_1..W_k` from exactly `k` surviving nodes (0-based indices in `[0, n)`).
    pub fn erasure_decode(&self, survivors: &[(usize, Vec<FieldElement>)]) -> Result<Vec<Vec<FieldElement>>> {
        let CodeParams { n, k, l, .. } = self.params;
        let f = self.field();
        if survivors.len() != k {
            return Err(Error::shape(format!("{} survivors given, need exactly k = {k}", survivors.len())));
        }
        let mut seen = vec![false; n];
        for (idx, content) in survivors {
            if *idx >= n || std::mem::replace(&mut seen[*idx], true) {
                return Err(Error::shape(format!("bad or duplicate survivor index {idx}")));
            }
            if content.len() != l {
                return Err(Error::shape(format!("survivor {idx} content length")));
            }
        }
        let zero = Matrix::zeros(f, l, l);
        let id = Matrix::identity(f, l);
        let mut blocks = Vec::with_capacity(k);
        let mut rhs = Vec::with_capacity(k * l);
        for (idx, content) in survivors {
            let row: Vec<&Matrix> = (0..k)
                .map(|j| {
                    if *idx < k {
                        if j == *idx {
                            &id
                        } else {
                            &zero
                        }
                    } else {
                        self.matrix(idx - k, j)
                    }
                })
                .collect();
            blocks.push(Matrix::hstack(f, &row)?);
            rhs.extend_from_slice(content);
        }
        let refs: Vec<&Matrix> = blocks.iter().collect();
        let system = Matrix::vstack(f, &refs)?;
        let inv = system.inverse().map_err(|_| Error::SingularSystem)?;
        let flat = inv.mul_vec(&rhs)?;
        Ok(flat.chunks(l).map(<[FieldElement]>::to_vec).collect())
    }
}

pub fn encode(code: &Code, data: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    code.encode(data)
}

pub fn mds_check(code: &Code) -> MdsReport {
    code.mds_check()
}

pub fn erasure_decode(
    code: &Code,
    survivors: &[(usize, Vec<FieldElement>)],
) -> Result<Vec<Vec<FieldElement>>> {
    code.erasure_decode(survivors)
}

pub fn normalize(code: &Code) -> Code {
    code.normalize()
}
