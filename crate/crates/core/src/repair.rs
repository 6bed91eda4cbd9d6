//! Repair schemes for systematic nodes and the interference-alignment checks.
//!
//! When systematic node `i` fails, every helper `ν` sends `S_{i,ν} W_ν`
//! (`l/r` symbols). Parity `u` carries interference `S_{i,k+u} C_{u,j} W_j` from
//! every other systematic node `j`; alignment makes that interference a known
//! linear image of what node `j` itself sent, so it can be subtracted. The
//! cleaned parity projections then stack into an invertible `l x l` system.

use serde::Serialize;

use crate::algebra::{FieldElement, Matrix};
use crate::code::{Code, CodeParams};
use crate::error::{Error, Result};
use crate::subspace::{is_direct_sum, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepairScheme {
    /// `S_i` per systematic node, shared by every helper.
    Constant(Vec<Matrix>),
    /// `S_{i,ν}` per systematic node; `per_helper[i]` lists the `n - 1`
    /// helpers in ascending node order with `i` itself skipped.
    PerHelper(Vec<Vec<Matrix>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeMode {
    Constant,
    PerHelper,
}

/// A failed repair condition; node numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Interference from systematic node `other` through parity `parity` is not aligned.
    Alignment { node: usize, parity: usize, other: usize },
    /// The cleaned parity projections of `node` do not form a direct sum equal to `F^l`.
    Span { node: usize, dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairReport {
    pub ok: bool,
    pub mode: SchemeMode,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairOutcome {
    pub reconstructed: Vec<FieldElement>,
    pub downloaded_symbols: usize,
}

impl RepairScheme {
    pub fn mode(&self) -> SchemeMode {
        match self {
            RepairScheme::Constant(_) => SchemeMode::Constant,
            RepairScheme::PerHelper(_) => SchemeMode::PerHelper,
        }
    }

    /// Repair matrix used by helper `nu` (0-based, `nu != i`) for node `i`.
    pub fn helper_matrix(&self, i: usize, nu: usize) -> &Matrix {
        match self {
            RepairScheme::Constant(s) => &s[i],
            RepairScheme::PerHelper(h) => &h[i][if nu < i { nu } else { nu - 1 }],
        }
    }

    /// Constant-mode repair matrices, if this is a constant scheme.
    pub fn constant_matrices(&self) -> Option<&[Matrix]> {
        match self {
            RepairScheme::Constant(s) => Some(s),
            RepairScheme::PerHelper(_) => None,
        }
    }

    /// The per-helper view of a constant scheme (`S_{i,ν} := S_i`).
    pub fn to_per_helper(&self, n: usize) -> RepairScheme {
        match self {
            RepairScheme::Constant(s) => {
                RepairScheme::PerHelper(s.iter().map(|m| vec![m.clone(); n - 1]).collect())
            }
            other => other.clone(),
        }
    }

    /// Check shapes, field and full row rank against the code parameters.
    pub fn validate(&self, params: &CodeParams) -> Result<()> {
        let (beta, l) = (params.beta(), params.l);
        let check = |m: &Matrix, what: String| -> Result<()> {
            if m.rows() != beta || m.cols() != l {
                return Err(Error::shape(format!(
                    "{what} is {}x{}, expected {beta}x{l}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.field() != &params.field {
                return Err(Error::shape(format!("{what} over {}", m.field())));
            }
            if m.rank() != beta {
                return Err(Error::SchemeInvalid(format!("{what} does not have full row rank")));
            }
            Ok(())
        };
        match self {
            RepairScheme::Constant(s) => {
                if s.len() != params.k {
                    return Err(Error::shape(format!("{} repair matrices for k = {}", s.len(), params.k)));
                }
                for (i, m) in s.iter().enumerate() {
                    check(m, format!("S i={}", i + 1))?;
                }
            }
            RepairScheme::PerHelper(h) => {
                if h.len() != params.k || h.iter().any(|v| v.len() != params.n - 1) {
                    return Err(Error::shape("per-helper scheme must list n-1 helpers per node"));
                }
                for (i, row) in h.iter().enumerate() {
                    for (pos, m) in row.iter().enumerate() {
                        let nu = if pos < i { pos } else { pos + 1 };
                        check(m, format!("S i={} v={}", i + 1, nu + 1))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Check the alignment and direct-sum conditions for every systematic node.
///
/// Constant mode: `span(S_i C_{u,j}) = span(S_i)` for `j != i` and
/// `⊕_u S_i C_{u,i} = F^l`. Parity row 1 is skipped on normalized codes,
/// where `C_{1,j} = I` makes it vacuous.
/// Per-helper mode: `span(S_{i,k+u} C_{u,j}) = span(S_{i,j})` and
/// `⊕_u S_{i,k+u} C_{u,i} = F^l`.
pub fn verify_scheme(code: &Code, scheme: &RepairScheme) -> Result<RepairReport> {
    let params = code.params();
    scheme.validate(params)?;
    let CodeParams { k, r, l, .. } = *params;
    let first_parity = match scheme {
        RepairScheme::Constant(_) if code.is_normalized() => 1,
        _ => 0,
    };
    let mut violations = Vec::new();
    for i in 0..k {
        let target = |j: usize| Subspace::span(scheme.helper_matrix(i, j));
        for u in first_parity..r {
            let sender = scheme.helper_matrix(i, k + u);
            for j in (0..k).filter(|&j| j != i) {
                let image = Subspace::span(&sender.mul(code.matrix(u, j))?);
                if image != target(j) {
                    violations.push(Violation::Alignment { node: i + 1, parity: u + 1, other: j + 1 });
                }
            }
        }
        let parts = (0..r)
            .map(|u| Ok(Subspace::span(&scheme.helper_matrix(i, k + u).mul(code.matrix(u, i))?)))
            .collect::<Result<Vec<_>>>()?;
        let total = parts.iter().map(Subspace::dim).sum::<usize>();
        let sum_dim = parts.iter().skip(1).try_fold(parts[0].clone(), |acc, p| acc.sum(p))?.dim();
        if !(is_direct_sum(&parts)? && total == l) {
            violations.push(Violation::Span { node: i + 1, dim: sum_dim });
        }
    }
    Ok(RepairReport { ok: violations.is_empty(), mode: scheme.mode(), violations })
}

/// Precomputed repair of one systematic node: helper projections, the
/// interference witnesses and the inverse of the stacked parity system.
#[derive(Clone, Debug)]
pub struct RepairPlan {
    node: usize,
    k: usize,
    // helper node index and the matrix it projects with, ascending by node
    helpers: Vec<(usize, Matrix)>,
    // witnesses[u][j]: P with S_{i,k+u} C_{u,j} = P S_{i,j} (None at j == i)
    witnesses: Vec<Vec<Option<Matrix>>>,
    stacked_inverse: Matrix,
}

impl RepairPlan {
    pub fn new(code: &Code, scheme: &RepairScheme, node: usize) -> Result<Self> {
        let params = code.params();
        let CodeParams { n, k, r, .. } = *params;
        if node >= k {
            return Err(Error::Range(format!("node {} is not systematic", node + 1)));
        }
        scheme.validate(params)?;
        let f = code.field();
        let helpers: Vec<(usize, Matrix)> =
            (0..n).filter(|&nu| nu != node).map(|nu| (nu, scheme.helper_matrix(node, nu).clone())).collect();
        let mut witnesses = Vec::with_capacity(r);
        let mut stacked = Vec::with_capacity(r);
        for u in 0..r {
            let sender = scheme.helper_matrix(node, k + u);
            let mut row = Vec::with_capacity(k);
            for j in 0..k {
                if j == node {
                    row.push(None);
                    continue;
                }
                let interference = sender.mul(code.matrix(u, j))?;
                let basis = scheme.helper_matrix(node, j);
                // P · basis = interference  <=>  basis^T · P^T = interference^T
                let pt = basis.transpose().solve(&interference.transpose())?.ok_or_else(|| {
                    Error::SchemeInvalid(format!(
                        "interference from node {} via parity {} is not aligned for node {}",
                        j + 1,
                        u + 1,
                        node + 1
                    ))
                })?;
                row.push(Some(pt.transpose()));
            }
            witnesses.push(row);
            stacked.push(sender.mul(code.matrix(u, node))?);
        }
        let refs: Vec<&Matrix> = stacked.iter().collect();
        let stacked_inverse = Matrix::vstack(f, &refs)?.inverse().map_err(|_| Error::SingularStack)?;
        Ok(RepairPlan { node, k, helpers, witnesses, stacked_inverse })
    }

    /// Reconstruct the node from all node contents (the failed node's slot is ignored).
    pub fn execute(&self, contents: &[Vec<FieldElement>]) -> Result<RepairOutcome> {
        if contents.len() != self.helpers.len() + 1 {
            return Err(Error::shape(format!(
                "{} node contents given, expected n = {}",
                contents.len(),
                self.helpers.len() + 1
            )));
        }
        let f = self.stacked_inverse.field();
        let mut downloads: Vec<Option<Vec<FieldElement>>> = vec![None; contents.len()];
        let mut downloaded_symbols = 0;
        for (nu, s) in &self.helpers {
            let sent = s.mul_vec(&contents[*nu])?;
            downloaded_symbols += sent.len();
            downloads[*nu] = Some(sent);
        }
        let mut rhs = Vec::with_capacity(self.stacked_inverse.rows());
        for (u, row) in self.witnesses.iter().enumerate() {
            let mut cleaned = downloads[self.k + u].clone().expect("parity is a helper");
            for (j, p) in row.iter().enumerate() {
                let Some(p) = p else { continue };
                let own = downloads[j].as_ref().expect("systematic helper");
                for (c, x) in cleaned.iter_mut().zip(p.mul_vec(own)?) {
                    *c = f.sub(*c, x);
                }
            }
            rhs.extend(cleaned);
        }
        Ok(RepairOutcome { reconstructed: self.stacked_inverse.mul_vec(&rhs)?, downloaded_symbols })
    }

    pub fn node(&self) -> usize {
        self.node
    }
}

/// Repair systematic node `i` (0-based) from the contents of all nodes.
pub fn repair_node(
    code: &Code,
    scheme: &RepairScheme,
    i: usize,
    contents: &[Vec<FieldElement>],
) -> Result<RepairOutcome> {
    RepairPlan::new(code, scheme, i)?.execute(contents)
}
