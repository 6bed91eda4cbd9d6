//! Executable linear-independence certificates for concrete (code, scheme)
//! pairs.
//!
//! * [`encoding_independence`]: `{I} ∪ {C_{u,i} : u ≥ 2}` is linearly independent
//!   in the `l²`-dimensional matrix space, so `k(r-1) + 1 ≤ l²`.
//! * [`delta_family_certificate`]: for a partition `X_1, …, X_p` of the
//!   systematic nodes, the `r^p` products `Δ_w = Γ_{1,w_1} ⋯ Γ_{p,w_p}` of the
//!   block sums `Γ_{s,u} = Σ_{j ∈ X_s} C_{u,j}` are nonzero and independent,
//!   so `r^p ≤ l²`.
//! * [`dim_profile`]: the dimension of a sum of repair subspaces against its
//!   exact lower bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{FieldElement, IncrementalBasis, Matrix};
use crate::bounds::{ceil_u64, dim_lower_bound, t_param};
use crate::code::Code;
use crate::error::{Error, Result};
use crate::repair::RepairScheme;
use crate::subspace::{combinations, Subspace};

/// Largest Δ family the certificate will enumerate.
pub const DEFAULT_FAMILY_CAP: u64 = 1_000_000;

/// Disjoint blocks covering the systematic nodes (0-based indices).
///
/// At most one block is non-standard (its repair subspaces do not span `F^l`)
/// and, if present, it comes first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
    pub standard: Vec<bool>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, standard: Vec<bool>, k: usize) -> Result<Self> {
        if blocks.len() != standard.len() {
            return Err(Error::shape("one standard flag per block"));
        }
        let mut seen = vec![false; k];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::shape("empty block"));
            }
            for &i in b {
                if i >= k || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::shape(format!("index {i} repeated or outside [0, {k})")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::shape("blocks do not cover every systematic node"));
        }
        if standard.iter().skip(1).any(|s| !s) {
            return Err(Error::shape("only the first block may be non-standard"));
        }
        Ok(Partition { blocks, standard })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn all_standard(&self) -> bool {
        self.standard.iter().all(|&s| s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub rank: usize,
    pub expected: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaCertificate {
    pub count: u64,
    pub nonzero_ok: bool,
    pub rank: usize,
    pub independent_ok: bool,
    /// `r^p ≤ l²`, which must hold whenever the family is independent.
    pub fits_ambient: bool,
    /// 1-based word of the first zero product.
    pub first_zero_word: Option<Vec<usize>>,
    /// 1-based word of the first product dependent on its predecessors.
    pub first_dependent_word: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningReport {
    pub lambda_every: Option<usize>,
    pub lambda_exists: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimProfile {
    /// 1-based node numbers.
    pub subset: Vec<usize>,
    pub m: usize,
    pub dim: usize,
    pub bound_thm3: String,
    pub bound_eq29: String,
    pub ok: bool,
}

fn constant_matrices(scheme: &RepairScheme) -> Result<&[Matrix]> {
    scheme
        .constant_matrices()
        .ok_or_else(|| Error::SchemeInvalid("certificate needs a constant-subspace scheme".into()))
}

fn spans(mats: &[Matrix], idx: &[usize], l: usize) -> Result<usize> {
    let Some((&first, rest)) = idx.split_first() else {
        return Ok(0);
    };
    let mut acc = Subspace::span(&mats[first]);
    for &i in rest {
        acc = acc.sum(&Subspace::span(&mats[i]))?;
        if acc.dim() == l {
            break;
        }
    }
    Ok(acc.dim())
}

/// Rank of the vectorized family `{I} ∪ {C_{u,i} : u ∈ [2, r], i ∈ [1, k]}`.
pub fn encoding_independence(code: &Code) -> IndependenceReport {
    let p = code.params();
    let f = code.field();
    let mut family = vec![Matrix::identity(f, p.l).vectorize()];
    for u in 1..p.r {
        for i in 0..p.k {
            family.push(code.matrix(u, i).vectorize());
        }
    }
    let refs: Vec<&Matrix> = family.iter().collect();
    let rank = Matrix::vstack(f, &refs).expect("equal widths").rank();
    let expected = p.k * (p.r - 1) + 1;
    IndependenceReport { rank, expected, ok: rank == expected }
}

/// `Γ(block, u)`: the identity for the first parity row (`u = 0`), otherwise
/// `Σ_{j ∈ block} C_{u,j}`.
pub fn gamma(code: &Code, block: &[usize], u: usize) -> Result<Matrix> {
    let p = code.params();
    if u >= p.r {
        return Err(Error::Range(format!("parity row {} outside [1, {}]", u + 1, p.r)));
    }
    if let Some(&bad) = block.iter().find(|&&j| j >= p.k) {
        return Err(Error::Range(format!("node {} outside [1, {}]", bad + 1, p.k)));
    }
    if u == 0 {
        return Ok(Matrix::identity(code.field(), p.l));
    }
    let mut acc = Matrix::zeros(code.field(), p.l, p.l);
    for &j in block {
        acc = acc.add(code.matrix(u, j))?;
    }
    Ok(acc)
}

fn gamma_table(code: &Code, partition: &Partition) -> Result<Vec<Vec<Matrix>>> {
    partition.blocks.iter().map(|b| (0..code.params().r).map(|u| gamma(code, b, u)).collect()).collect()
}

fn product(table: &[Vec<Matrix>], word: &[usize]) -> Matrix {
    let mut it = word.iter().zip(table);
    let (&u, g) = it.next().expect("nonempty word");
    it.fold(g[u].clone(), |acc, (&u, g)| acc.mul(&g[u]).expect("square l x l"))
}

/// Ordered product `Γ(block_1, w_1) ⋯ Γ(block_p, w_p)` (0-based word entries).
pub fn delta(code: &Code, partition: &Partition, word: &[usize]) -> Result<Matrix> {
    if word.len() != partition.len() {
        return Err(Error::shape(format!("word of length {} for {} blocks", word.len(), partition.len())));
    }
    let mut acc = Matrix::identity(code.field(), code.params().l);
    for (b, &u) in partition.blocks.iter().zip(word) {
        acc = acc.mul(&gamma(code, b, u)?)?;
    }
    Ok(acc)
}

fn word_at(mut index: u64, r: usize, p: usize) -> Vec<usize> {
    let mut w = vec![0; p];
    for slot in w.iter_mut().rev() {
        *slot = (index % r as u64) as usize;
        index /= r as u64;
    }
    w
}

pub fn delta_family_certificate(
    code: &Code,
    scheme: &RepairScheme,
    partition: &Partition,
) -> Result<DeltaCertificate> {
    delta_family_certificate_with_cap(code, scheme, partition, DEFAULT_FAMILY_CAP)
}

/// Enumerate all `r^p` Δ products in lexicographic word order and check that
/// none vanishes and that they are linearly independent.
pub fn delta_family_certificate_with_cap(
    code: &Code,
    scheme: &RepairScheme,
    partition: &Partition,
    cap: u64,
) -> Result<DeltaCertificate> {
    let params = code.params();
    let (r, l) = (params.r, params.l);
    let mats = constant_matrices(scheme)?;
    if mats.len() != params.k {
        return Err(Error::shape("scheme does not match the code"));
    }
    let p = partition.len();
    if p == 0 {
        return Err(Error::shape("empty partition"));
    }
    let count = (r as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if count > u128::from(cap) {
        return Err(Error::FamilyTooLarge { count, cap });
    }
    let count = count as u64;
    for (s, (block, &standard)) in partition.blocks.iter().zip(&partition.standard).enumerate() {
        if standard && spans(mats, block, l)? != l {
            return Err(Error::NonSpanningBlock { block: s + 1 });
        }
    }

    let table = gamma_table(code, partition)?;
    let mut basis = IncrementalBasis::new(code.field(), l * l);
    let mut first_zero = None;
    let mut first_dependent = None;
    const CHUNK: u64 = 4096;
    let mut start = 0;
    while start < count {
        let end = (start + CHUNK).min(count);
        let batch: Vec<Matrix> =
            (start..end).into_par_iter().map(|idx| product(&table, &word_at(idx, r, p))).collect();
        for (off, d) in batch.iter().enumerate() {
            let idx = start + off as u64;
            let one_based = || word_at(idx, r, p).iter().map(|u| u + 1).collect::<Vec<_>>();
            if first_zero.is_none() && d.is_zero() {
                first_zero = Some(one_based());
            }
            if !basis.insert(d.entries()) && first_dependent.is_none() {
                first_dependent = Some(one_based());
            }
        }
        start = end;
    }
    Ok(DeltaCertificate {
        count,
        nonzero_ok: first_zero.is_none(),
        rank: basis.rank(),
        independent_ok: first_dependent.is_none(),
        fits_ambient: count <= (l * l) as u64,
        first_zero_word: first_zero,
        first_dependent_word: first_dependent,
    })
}

/// Smallest `m` such that some (resp. every) `m`-subset of repair subspaces spans `F^l`.
pub fn min_spanning_size(scheme: &RepairScheme, l: usize) -> Result<SpanningReport> {
    let mats = constant_matrices(scheme)?;
    let k = mats.len();
    let mut exists = None;
    let mut every = None;
    for m in 1..=k {
        let mut any = false;
        let mut all = true;
        for subset in combinations(k, m) {
            if spans(mats, &subset, l)? == l {
                any = true;
            } else {
                all = false;
            }
            if any && !all {
                break;
            }
        }
        if any && exists.is_none() {
            exists = Some(m);
        }
        if all {
            every = Some(m);
            break;
        }
    }
    Ok(SpanningReport { lambda_every: every, lambda_exists: exists })
}

/// Partition the systematic nodes into spanning blocks, packing from the
/// highest index down so that a leftover non-spanning block holds the lowest
/// indices and comes first. `None` when no block spans at all.
pub fn find_partition(scheme: &RepairScheme, l: usize) -> Result<Option<Partition>> {
    let mats = constant_matrices(scheme)?;
    let k = mats.len();
    let mut closed: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut acc: Option<Subspace> = None;
    for i in (0..k).rev() {
        current.push(i);
        let s = Subspace::span(&mats[i]);
        let sum = match acc.take() {
            Some(a) => a.sum(&s)?,
            None => s,
        };
        if sum.dim() == l {
            current.reverse();
            closed.push(std::mem::take(&mut current));
        } else {
            acc = Some(sum);
        }
    }
    if closed.is_empty() {
        return Ok(None);
    }
    closed.reverse();
    let mut standard = vec![true; closed.len()];
    if !current.is_empty() {
        current.reverse();
        closed.insert(0, current);
        standard.insert(0, false);
    }
    Partition::new(closed, standard, k).map(Some)
}

/// Dimension of `⊎_{i ∈ subset} S_i` checked against the exact lower bounds.
pub fn dim_profile(scheme: &RepairScheme, subset: &[usize], l: usize, r: usize) -> Result<DimProfile> {
    let mats = constant_matrices(scheme)?;
    if subset.is_empty() {
        return Err(Error::Param("subset must be nonempty".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= mats.len()) {
        return Err(Error::Range(format!("node {} outside [1, {}]", bad + 1, mats.len())));
    }
    let (l64, r64, m) = (l as u64, r as u64, subset.len());
    let t = t_param(l64, r64)?;
    let bounds = dim_lower_bound(m as u64, l64, r64)?;
    let dim = spans(mats, subset, l)?;
    let thm3_ok = if (m as u64) <= t {
        bounds.thm3 == num_rational::BigRational::from_integer((dim as u64).into())
    } else {
        dim as u64 >= ceil_u64(&bounds.thm3)
    };
    let eq29_ok = dim as u64 >= ceil_u64(&bounds.eq29);
    Ok(DimProfile {
        subset: subset.iter().map(|i| i + 1).collect(),
        m,
        dim,
        bound_thm3: bounds.thm3.to_string(),
        bound_eq29: bounds.eq29.to_string(),
        ok: thm3_ok && eq29_ok,
    })
}

/// Everything `certify` reports for one (code, scheme) pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub encoding_independence: IndependenceReport,
    pub spanning: SpanningReport,
    pub partition: Option<Partition>,
    pub delta_family: Option<DeltaCertificate>,
    pub dim_profiles: Vec<DimProfile>,
    pub dim_profiles_ok: bool,
    pub ok: bool,
}

/// Largest `k` for which every subset is profiled.
pub const MAX_PROFILED_K: usize = 16;

pub fn certify(code: &Code, scheme: &RepairScheme) -> Result<CertificateReport> {
    let p = code.params();
    let encoding_independence = encoding_independence(code);
    let spanning = min_spanning_size(scheme, p.l)?;
    let partition = find_partition(scheme, p.l)?;
    let delta_family = match &partition {
        Some(part) => match delta_family_certificate(code, scheme, part) {
            Ok(c) => Some(c),
            Err(Error::FamilyTooLarge { .. }) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    let mut dim_profiles = Vec::new();
    if p.k <= MAX_PROFILED_K {
        for m in 1..=p.k {
            for subset in combinations(p.k, m) {
                dim_profiles.push(dim_profile(scheme, &subset, p.l, p.r)?);
            }
        }
    }
    let dim_profiles_ok = dim_profiles.iter().all(|d| d.ok);
    let delta_ok = delta_family.as_ref().is_none_or(|d| d.nonzero_ok && d.independent_ok && d.fits_ambient);
    let ok = encoding_independence.ok && delta_ok && dim_profiles_ok;
    Ok(CertificateReport {
        encoding_independence,
        spanning,
        partition,
        delta_family,
        dim_profiles,
        dim_profiles_ok,
        ok,
    })
}

/// Zero vector helper used by callers building families by hand.
pub fn is_zero_vector(v: &[FieldElement]) -> bool {
    v.iter().all(|x| x.is_zero())
}
