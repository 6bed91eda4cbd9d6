//! Exhaustive and randomized search for (code, scheme) pairs at tiny
//! parameters.
//!
//! Everything is canonical: codes are normalized (`C_{1,j} = I`) and repair
//! subspaces are stored in reduced echelon form. Residual symmetries (node
//! permutations, simultaneous conjugation) are not quotiented out, so counts
//! are over ordered tuples.
//!
//! Exhaustive search runs in two phases. Phase 1 lists every per-node
//! candidate `(C_{2,i}, …, C_{r,i}, S_i)` satisfying the direct-sum condition
//! `⊕_u S_i C_{u,i} = F^l`. Phase 2 grows ordered tuples of candidates in
//! which every pair is compatible: each repair subspace is invariant under the
//! other node's matrices and the `2 x 2` block submatrices are invertible.
//! Larger blocks are checked as tuples grow when `r ≥ 3`.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{FieldElement, FieldSpec, Matrix};
use crate::bounds::evaluate_bounds;
use crate::code::{assemble_block, Code, CodeParams};
use crate::error::{Error, Result};
use crate::repair::{verify_scheme, RepairScheme};

// per shard: keyed results and the number of tuples visited
type ShardOutput = (Vec<(Vec<u32>, Code, RepairScheme)>, u64);
use crate::subspace::{combinations, Subspace};

/// Cap on the estimated number of phase-2 tuples for exhaustive search.
pub const EXHAUSTIVE_CAP: u128 = 1_000_000_000;
/// Cap on the raw phase-1 enumeration `|GL(l, q)|^(r-1) · |Gr(l/r, l)|`.
pub const PHASE1_CAP: u128 = 10_000_000;
/// Cap on the number of `l/r`-dimensional subspaces the random sampler lists.
pub const GRASSMANNIAN_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    /// `budget` independent constructive attempts.
    Random {
        budget: u64,
    },
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub field: FieldSpec,
    pub l: usize,
    pub r: usize,
    pub k: usize,
    pub mode: SearchMode,
    pub seed: u64,
    pub shards: usize,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Valid pairs sorted by their canonical encoding.
    pub found: Vec<(Code, RepairScheme)>,
    /// Tuples visited (exhaustive) or attempts made (random).
    pub examined: u64,
    /// Phase-2 estimate for exhaustive runs.
    pub estimate: Option<u128>,
    /// Phase-1 candidate count for exhaustive runs.
    pub candidates: Option<usize>,
}

/// `∏_{i<l} (q^l - q^i)`, saturating.
pub fn gl_order(q: u128, l: u32) -> u128 {
    let ql = q.saturating_pow(l);
    (0..l).fold(1u128, |acc, i| acc.saturating_mul(ql - q.pow(i)))
}

/// Number of `d`-dimensional subspaces of `F_q^l` (Gaussian binomial), saturating.
pub fn grassmannian_size(q: u128, l: u32, d: u32) -> u128 {
    if d > l {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..d {
        num = num.saturating_mul(q.saturating_pow(l - i) - 1);
        den = den.saturating_mul(q.saturating_pow(i + 1) - 1);
    }
    if num == u128::MAX {
        u128::MAX
    } else {
        num / den
    }
}

/// Concatenated entries in file order: the encoding grid row-major, then the
/// repair matrices.
pub fn encoding_key(code: &Code, scheme: &RepairScheme) -> Vec<u32> {
    let mut key: Vec<u32> =
        code.matrices().iter().flat_map(|m| m.entries().iter().map(|x| x.value())).collect();
    let push = |key: &mut Vec<u32>, m: &Matrix| key.extend(m.entries().iter().map(|x| x.value()));
    match scheme {
        RepairScheme::Constant(ss) => ss.iter().for_each(|m| push(&mut key, m)),
        RepairScheme::PerHelper(per) => per.iter().flatten().for_each(|m| push(&mut key, m)),
    }
    key
}

fn check_shape(field: &FieldSpec, l: usize, r: usize, k: usize) -> Result<CodeParams> {
    if l == 0 || r == 0 || k == 0 {
        return Err(Error::Param("l, r and k must be positive".into()));
    }
    CodeParams::new(field, k, r, l)
}

#[derive(Clone, Debug)]
struct Candidate {
    // indices into `gl` for C_{2..r}
    cs: Vec<u32>,
    // index into `grass`
    s: u32,
}

/// Phase-1 tables for one `(field, l, r)`, reusable across `k`.
pub struct SearchSpace {
    field: FieldSpec,
    l: usize,
    r: usize,
    gl: Vec<Matrix>,
    grass: Vec<Subspace>,
    // act[g * |grass| + v] = index of grass[v] · gl[g]
    act: Vec<u32>,
    cands: Vec<Candidate>,
    // candidates whose matrices all stabilize each subspace
    stab: Vec<Vec<u32>>,
    adj: std::sync::OnceLock<Vec<Vec<u32>>>,
}

impl SearchSpace {
    /// Estimated size of the raw phase-1 enumeration.
    pub fn phase1_estimate(field: &FieldSpec, l: usize, r: usize) -> u128 {
        let q = field.order() as u128;
        gl_order(q, l as u32).saturating_pow((r - 1) as u32).saturating_mul(grassmannian_size(
            q,
            l as u32,
            (l / r) as u32,
        ))
    }

    pub fn build(field: &FieldSpec, l: usize, r: usize) -> Result<Self> {
        check_shape(field, l, r, 1)?;
        let estimate = Self::phase1_estimate(field, l, r);
        if estimate > PHASE1_CAP {
            return Err(Error::TooLarge { estimate, cap: PHASE1_CAP });
        }
        let beta = l / r;
        let gl = general_linear(field, l);
        let grass = Subspace::enumerate(field, l, beta);
        let index: HashMap<Vec<u32>, u32> =
            grass.iter().enumerate().map(|(i, s)| (s.key(), i as u32)).collect();
        let act: Vec<u32> = gl
            .par_iter()
            .flat_map_iter(|g| {
                grass.iter().map(|v| {
                    let img = v.apply(g).expect("square l x l");
                    index[&img.key()]
                })
            })
            .collect();
        let ng = grass.len();

        // C-tuples in lexicographic order, then S ascending
        let tuples = (gl.len() as u64).pow((r - 1) as u32);
        let cands: Vec<Candidate> = (0..tuples)
            .into_par_iter()
            .flat_map_iter(|t| {
                let mut cs = vec![0u32; r - 1];
                let mut rest = t;
                for slot in cs.iter_mut().rev() {
                    *slot = (rest % gl.len() as u64) as u32;
                    rest /= gl.len() as u64;
                }
                let gl = &gl;
                let grass = &grass;
                let act = &act;
                (0..ng as u32).filter_map(move |s| {
                    let mut parts = vec![grass[s as usize].basis()];
                    parts.extend(
                        cs.iter().map(|&g| grass[act[g as usize * ng + s as usize] as usize].basis()),
                    );
                    let stacked = Matrix::vstack(gl[0].field(), &parts).expect("equal widths");
                    (stacked.rank() == l).then(|| Candidate { cs: cs.clone(), s })
                })
            })
            .collect();

        let mut stab = vec![Vec::new(); ng];
        for (a, c) in cands.iter().enumerate() {
            for (v, list) in stab.iter_mut().enumerate() {
                if c.cs.iter().all(|&g| act[g as usize * ng + v] as usize == v) {
                    list.push(a as u32);
                }
            }
        }
        Ok(SearchSpace {
            field: field.clone(),
            l,
            r,
            gl,
            grass,
            act,
            cands,
            stab,
            adj: std::sync::OnceLock::new(),
        })
    }

    /// Number of phase-1 candidates.
    pub fn candidates(&self) -> usize {
        self.cands.len()
    }

    /// Largest number of candidates stabilizing one subspace.
    pub fn max_degree(&self) -> usize {
        self.stab.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest number of compatible partners of one candidate.
    pub fn max_compat_degree(&self) -> usize {
        self.adjacency().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Upper bound on phase-2 tuples for length `k`: `P · D^(k-1)`.
    pub fn estimate(&self, k: usize) -> u128 {
        (self.candidates() as u128).saturating_mul((self.max_degree() as u128).saturating_pow(k as u32 - 1))
    }

    fn c(&self, a: u32, u: usize) -> &Matrix {
        &self.gl[self.cands[a as usize].cs[u - 1] as usize]
    }

    fn stabilizes(&self, a: u32, v: u32) -> bool {
        let ng = self.grass.len();
        self.cands[a as usize].cs.iter().all(|&g| self.act[g as usize * ng + v as usize] == v)
    }

    fn pair_mds(&self, a: u32, b: u32) -> bool {
        let id = Matrix::identity(&self.field, self.l);
        let get = |u: usize, x: u32| if u == 0 { &id } else { self.c(x, u) };
        combinations(self.r, 2).iter().all(|rows| {
            let (u1, u2) = (rows[0], rows[1]);
            if u1 == 0 {
                // det [[I, I], [A, B]] = det(B - A)
                get(u2, b).sub(get(u2, a)).expect("square").is_invertible()
            } else {
                assemble_block(&self.field, self.l, rows, &[0, 1], |u, j| get(u, if j == 0 { a } else { b }))
                    .is_invertible()
            }
        })
    }

    fn adjacency(&self) -> &[Vec<u32>] {
        self.adj.get_or_init(|| {
            (0..self.cands.len() as u32)
                .into_par_iter()
                .map(|a| {
                    let sa = self.cands[a as usize].s;
                    self.stab[sa as usize]
                        .iter()
                        .copied()
                        .filter(|&b| {
                            b != a && self.stabilizes(a, self.cands[b as usize].s) && self.pair_mds(a, b)
                        })
                        .collect()
                })
                .collect()
        })
    }

    fn higher_blocks_ok(&self, prefix: &[u32], b: u32) -> bool {
        let d = prefix.len();
        let id = Matrix::identity(&self.field, self.l);
        let col = |j: usize| if j == d { b } else { prefix[j] };
        let get = |u: usize, j: usize| if u == 0 { &id } else { self.c(col(j), u) };
        for s in 3..=self.r.min(d + 1) {
            for others in combinations(d, s - 1) {
                let mut cols = others;
                cols.push(d);
                for rows in combinations(self.r, s) {
                    if !assemble_block(&self.field, self.l, &rows, &cols, get).is_invertible() {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn build_pair(&self, tuple: &[u32]) -> (Code, RepairScheme) {
        let k = tuple.len();
        let params = CodeParams::new(&self.field, k, self.r, self.l).expect("checked");
        let id = Matrix::identity(&self.field, self.l);
        let enc = (0..self.r)
            .flat_map(|u| tuple.iter().map(move |&a| (u, a)))
            .map(|(u, a)| if u == 0 { id.clone() } else { self.c(a, u).clone() })
            .collect();
        let code = Code::new(params, enc).expect("candidates use invertible matrices");
        let scheme = RepairScheme::Constant(
            tuple.iter().map(|&a| self.grass[self.cands[a as usize].s as usize].basis().clone()).collect(),
        );
        (code, scheme)
    }

    /// Exhaustive phase 2 for length `k`, split into `shards` work units by
    /// leading candidate.
    pub fn exhaustive(&self, k: usize, shards: usize) -> Result<SearchResult> {
        check_shape(&self.field, self.l, self.r, k)?;
        let estimate = self.estimate(k);
        if estimate > EXHAUSTIVE_CAP {
            return Err(Error::TooLarge { estimate, cap: EXHAUSTIVE_CAP });
        }
        let p = self.cands.len() as u32;
        let adj: &[Vec<u32>] = if k >= 2 { self.adjacency() } else { &[] };
        let shards = shards.max(1) as u32;
        let per_shard: Vec<Result<ShardOutput>> = (0..shards)
            .into_par_iter()
            .map(|sh| {
                let lo = (p as u64 * sh as u64 / shards as u64) as u32;
                let hi = (p as u64 * (sh as u64 + 1) / shards as u64) as u32;
                let mut out = Vec::new();
                let mut examined = 0u64;
                let mut prefix = Vec::with_capacity(k);
                for a in lo..hi {
                    prefix.push(a);
                    let next = if k >= 2 { adj[a as usize].clone() } else { Vec::new() };
                    self.extend(k, adj, &mut prefix, &next, &mut out, &mut examined)?;
                    prefix.pop();
                }
                Ok((out, examined))
            })
            .collect();
        let mut found = Vec::new();
        let mut examined = 0;
        for res in per_shard {
            let (part, e) = res?;
            found.extend(part);
            examined += e;
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(SearchResult {
            found: found.into_iter().map(|(_, c, s)| (c, s)).collect(),
            examined,
            estimate: Some(estimate),
            candidates: Some(self.cands.len()),
        })
    }

    fn extend(
        &self,
        k: usize,
        adj: &[Vec<u32>],
        prefix: &mut Vec<u32>,
        cand: &[u32],
        out: &mut Vec<(Vec<u32>, Code, RepairScheme)>,
        examined: &mut u64,
    ) -> Result<()> {
        *examined += 1;
        if prefix.len() == k {
            let (code, scheme) = self.build_pair(prefix);
            if !verify_scheme(&code, &scheme)?.ok || !code.mds_check().ok {
                return Err(Error::SchemeInvalid(format!(
                    "search emitted an invalid pair for tuple {prefix:?}"
                )));
            }
            out.push((encoding_key(&code, &scheme), code, scheme));
            return Ok(());
        }
        for &b in cand {
            if self.r >= 3 && prefix.len() >= 2 && !self.higher_blocks_ok(prefix, b) {
                continue;
            }
            let next =
                if prefix.len() + 1 < k { intersect_sorted(cand, &adj[b as usize]) } else { Vec::new() };
            prefix.push(b);
            self.extend(k, adj, prefix, &next, out, examined)?;
            prefix.pop();
        }
        Ok(())
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Every invertible `l x l` matrix, in lexicographic order of entries.
fn general_linear(field: &FieldSpec, l: usize) -> Vec<Matrix> {
    let q = field.order() as u64;
    let total = q.pow((l * l) as u32);
    (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut vals = vec![0u64; l * l];
            for slot in vals.iter_mut().rev() {
                *slot = code % q;
                code /= q;
            }
            let m = Matrix::from_values(field, l, l, &vals).expect("values below q");
            m.is_invertible().then_some(m)
        })
        .collect()
}

/// Constraint rows on `vec(X)` expressing `S X ⊆ span(S)`.
fn stabilizer_constraints(s: &Matrix) -> Vec<Vec<FieldElement>> {
    let f = s.field();
    let l = s.cols();
    let kernel = s.right_kernel();
    let mut rows = Vec::new();
    for a in 0..s.rows() {
        for y in 0..kernel.rows() {
            let mut row = vec![FieldElement::ZERO; l * l];
            for i in 0..l {
                for j in 0..l {
                    row[i * l + j] = f.mul(s.get(a, i), kernel.get(y, j));
                }
            }
            rows.push(row);
        }
    }
    rows
}

struct Sampler {
    field: FieldSpec,
    l: usize,
    r: usize,
    k: usize,
    grass: Vec<Subspace>,
}

impl Sampler {
    fn new(field: &FieldSpec, l: usize, r: usize, k: usize) -> Result<Self> {
        let size = grassmannian_size(field.order() as u128, l as u32, (l / r) as u32);
        if size > GRASSMANNIAN_CAP {
            return Err(Error::TooLarge { estimate: size, cap: GRASSMANNIAN_CAP });
        }
        Ok(Sampler { field: field.clone(), l, r, k, grass: Subspace::enumerate(field, l, l / r) })
    }

    fn random_in_span(&self, basis: &Matrix, rng: &mut ChaCha8Rng) -> Matrix {
        let f = &self.field;
        let q = f.order() as u64;
        let l = self.l;
        let mut vals = vec![FieldElement::ZERO; l * l];
        for b in 0..basis.rows() {
            let c = f.reduce(rng.gen_range(0..q));
            for (v, &x) in vals.iter_mut().zip(basis.row(b)) {
                *v = f.add(*v, f.mul(c, x));
            }
        }
        Matrix::from_elements(f, l, l, vals).expect("l*l entries")
    }

    /// One constructive attempt: draw every repair subspace first, then draw
    /// each `C_{u,j}` from the linear space of matrices preserving all
    /// `S_i` with `i ≠ j`, so alignment holds by construction. Every valid
    /// pair arises this way.
    fn attempt(&self, rng: &mut ChaCha8Rng) -> Option<(Code, RepairScheme)> {
        let (f, l, r, k) = (&self.field, self.l, self.r, self.k);
        let id = Matrix::identity(f, l);
        let subspaces: Vec<&Subspace> =
            (0..k).map(|_| &self.grass[rng.gen_range(0..self.grass.len())]).collect();
        let per_node: Vec<Vec<Vec<FieldElement>>> =
            subspaces.iter().map(|s| stabilizer_constraints(s.basis())).collect();
        // grid[u][j], u ≥ 1
        let mut grid: Vec<Vec<Matrix>> = vec![Vec::with_capacity(k); r];
        for j in 0..k {
            let rows: Vec<FieldElement> =
                (0..k).filter(|&i| i != j).flat_map(|i| per_node[i].iter().flatten().copied()).collect();
            let space = if rows.is_empty() {
                Matrix::identity(f, l * l)
            } else {
                Matrix::from_elements(f, rows.len() / (l * l), l * l, rows).ok()?.right_kernel()
            };
            if space.rows() == 0 {
                return None;
            }
            let s = subspaces[j].basis();
            let mut parts = vec![s.clone()];
            for u in 1..r {
                let c = self.random_in_span(&space, rng);
                if !c.is_invertible() {
                    return None;
                }
                parts.push(s.mul(&c).expect("l columns"));
                grid[u].push(c);
            }
            let refs: Vec<&Matrix> = parts.iter().collect();
            if Matrix::vstack(f, &refs).expect("equal widths").rank() != l {
                return None;
            }
            let get = |u: usize, j: usize| if u == 0 { &id } else { &grid[u][j] };
            for size in 2..=r.min(j + 1) {
                for others in combinations(j, size - 1) {
                    let mut cols = others;
                    cols.push(j);
                    for rows in combinations(r, size) {
                        if !assemble_block(f, l, &rows, &cols, get).is_invertible() {
                            return None;
                        }
                    }
                }
            }
        }
        let params = CodeParams::new(f, k, r, l).ok()?;
        let enc = (0..r)
            .flat_map(|u| (0..k).map(move |j| (u, j)))
            .map(|(u, j)| if u == 0 { id.clone() } else { grid[u][j].clone() })
            .collect();
        let code = Code::new(params, enc).ok()?;
        let scheme = RepairScheme::Constant(subspaces.iter().map(|s| s.basis().clone()).collect());
        Some((code, scheme))
    }
}

fn random_search(cfg: &SearchConfig, budget: u64) -> Result<SearchResult> {
    let sampler = Sampler::new(&cfg.field, cfg.l, cfg.r, cfg.k)?;
    let shards = cfg.shards.max(1) as u64;
    let parts: Vec<Vec<(Code, RepairScheme)>> = (0..shards)
        .into_par_iter()
        .map(|sh| {
            let lo = budget * sh / shards;
            let hi = budget * (sh + 1) / shards;
            (lo..hi)
                .filter_map(|attempt| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(attempt);
                    sampler.attempt(&mut rng)
                })
                .collect()
        })
        .collect();
    let mut unique = BTreeMap::new();
    for (code, scheme) in parts.into_iter().flatten() {
        if !verify_scheme(&code, &scheme)?.ok || !code.mds_check().ok {
            return Err(Error::SchemeInvalid("sampler produced an invalid pair".into()));
        }
        unique.entry(encoding_key(&code, &scheme)).or_insert((code, scheme));
    }
    Ok(SearchResult {
        found: unique.into_values().collect(),
        examined: budget,
        estimate: None,
        candidates: None,
    })
}

/// Run one search.
pub fn search_codes(cfg: &SearchConfig) -> Result<SearchResult> {
    check_shape(&cfg.field, cfg.l, cfg.r, cfg.k)?;
    match cfg.mode {
        SearchMode::Exhaustive => SearchSpace::build(&cfg.field, cfg.l, cfg.r)?.exhaustive(cfg.k, cfg.shards),
        SearchMode::Random { budget } => random_search(cfg, budget),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KReport {
    pub k: usize,
    /// Only exhaustive runs support a nonexistence claim.
    pub exhaustive: bool,
    pub found: usize,
    pub examined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    /// Largest `k` with a found instance; a lower bound on the true maximum
    /// over this field.
    pub k_star: Option<usize>,
    pub per_k: Vec<KReport>,
    pub note: &'static str,
}

pub const FEASIBILITY_NOTE: &str =
    "empirical evidence over this field only; exhaustive rows with zero found rule out that k here";

/// Search every `k ∈ [1, k_cap]`, exhaustively where the estimate allows and
/// with `budget` random attempts otherwise.
pub fn max_feasible_k(
    field: &FieldSpec,
    l: usize,
    r: usize,
    k_cap: usize,
    budget: u64,
    seed: u64,
) -> Result<FeasibilityReport> {
    check_shape(field, l, r, 1)?;
    let cap_limit = evaluate_bounds(l as u64, r as u64)?.prior_goparaju_quadratic;
    if k_cap == 0 || k_cap as u64 > cap_limit {
        return Err(Error::Param(format!("k_cap must lie in [1, l² = {cap_limit}]")));
    }
    let space = match SearchSpace::build(field, l, r) {
        Ok(s) => Some(s),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut per_k = Vec::with_capacity(k_cap);
    for k in 1..=k_cap {
        let exhaustive = space.as_ref().filter(|s| s.estimate(k) <= EXHAUSTIVE_CAP);
        let (res, exhaustive) = match exhaustive {
            Some(s) => (s.exhaustive(k, rayon::current_num_threads())?, true),
            None => {
                let cfg = SearchConfig {
                    field: field.clone(),
                    l,
                    r,
                    k,
                    mode: SearchMode::Random { budget },
                    seed,
                    shards: rayon::current_num_threads(),
                };
                (random_search(&cfg, budget)?, false)
            }
        };
        per_k.push(KReport { k, exhaustive, found: res.found.len(), examined: res.examined });
    }
    let k_star = per_k.iter().filter(|p| p.found > 0).map(|p| p.k).max();
    Ok(FeasibilityReport { k_star, per_k, note: FEASIBILITY_NOTE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repair::tests::{gf5_fixture, m};

    fn exhaustive(q: u32, k: usize, shards: usize) -> SearchResult {
        let f = FieldSpec::prime(q).unwrap();
        search_codes(&SearchConfig { field: f, l: 2, r: 2, k, mode: SearchMode::Exhaustive, seed: 0, shards })
            .unwrap()
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(5, 2), 480);
        assert_eq!(gl_order(2, 4), 20160);
        assert_eq!(grassmannian_size(2, 4, 2), 35);
        assert_eq!(grassmannian_size(7, 4, 2), 2850);
        assert_eq!(grassmannian_size(3, 2, 1), 4);
        assert_eq!(grassmannian_size(3, 2, 3), 0);
    }

    #[test]
    fn gf2_phase1_and_counts() {
        let f = FieldSpec::prime(2).unwrap();
        let space = SearchSpace::build(&f, 2, 2).unwrap();
        assert_eq!(space.candidates(), 12);
        assert_eq!(space.max_compat_degree(), 1);
        let counts: Vec<usize> = (1..=4).map(|k| space.exhaustive(k, 1).unwrap().found.len()).collect();
        assert_eq!(counts, vec![12, 6, 0, 0]);
    }

    #[test]
    fn swap_witness_is_found() {
        let res = exhaustive(2, 1, 1);
        let f = FieldSpec::prime(2).unwrap();
        let swap = m(&f, &[&[0, 1], &[1, 0]]);
        let s = m(&f, &[&[1, 0]]);
        assert!(res
            .found
            .iter()
            .any(|(c, sc)| c.matrix(1, 0) == &swap && sc.constant_matrices().unwrap()[0] == s));
    }

    #[test]
    fn gf3_counts_and_shard_independence() {
        let one = exhaustive(3, 2, 1);
        assert_eq!(one.found.len(), 672);
        let many = exhaustive(3, 2, 7);
        let keys = |r: &SearchResult| r.found.iter().map(|(c, s)| encoding_key(c, s)).collect::<Vec<_>>();
        assert_eq!(keys(&one), keys(&many));
        assert!(keys(&one).windows(2).all(|w| w[0] < w[1]));
        for (code, scheme) in &one.found {
            assert!(verify_scheme(code, scheme).unwrap().ok);
            assert!(code.mds_check().ok);
        }
        assert_eq!(exhaustive(3, 3, 2).found.len(), 48);
    }

    #[test]
    fn gf5_fixture_is_in_exhaustive_output() {
        let res = exhaustive(5, 2, 3);
        assert_eq!(res.found.len(), 105600);
        let (code, scheme) = gf5_fixture();
        let want = encoding_key(&code, &scheme);
        assert!(res.found.iter().any(|(c, s)| encoding_key(c, s) == want));
    }

    #[test]
    fn random_mode_is_sound_and_deterministic() {
        let cfg = |shards| SearchConfig {
            field: FieldSpec::prime(3).unwrap(),
            l: 2,
            r: 2,
            k: 2,
            mode: SearchMode::Random { budget: 400 },
            seed: 11,
            shards,
        };
        let a = search_codes(&cfg(1)).unwrap();
        let b = search_codes(&cfg(5)).unwrap();
        assert!(!a.found.is_empty());
        let keys = |r: &SearchResult| r.found.iter().map(|(c, s)| encoding_key(c, s)).collect::<Vec<_>>();
        assert_eq!(keys(&a), keys(&b));
        let all: Vec<_> = keys(&exhaustive(3, 2, 1));
        assert!(keys(&a).iter().all(|k| all.binary_search(k).is_ok()));
    }

    #[test]
    fn random_mode_reaches_vector_codes() {
        let res = search_codes(&SearchConfig {
            field: FieldSpec::prime(2).unwrap(),
            l: 4,
            r: 2,
            k: 2,
            mode: SearchMode::Random { budget: 300 },
            seed: 1,
            shards: 2,
        })
        .unwrap();
        assert!(!res.found.is_empty());
        for (code, scheme) in &res.found {
            assert!(verify_scheme(code, scheme).unwrap().ok && code.mds_check().ok);
        }
    }

    #[test]
    fn canonicalization_keeps_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = FieldSpec::prime(3).unwrap();
        let res = exhaustive(3, 2, 1);
        let random_inv = |rng: &mut ChaCha8Rng, n: usize| loop {
            let vals: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..3)).collect();
            let m = Matrix::from_values(&f, n, n, &vals).unwrap();
            if m.is_invertible() {
                break m;
            }
        };
        for (code, scheme) in res.found.iter().step_by(37) {
            let p = code.params().clone();
            let ss = scheme.constant_matrices().unwrap();
            // another row basis per S_i
            let rebased: Vec<Matrix> =
                ss.iter().map(|s| random_inv(&mut rng, s.rows()).mul(s).unwrap()).collect();
            assert!(verify_scheme(code, &RepairScheme::Constant(rebased.clone())).unwrap().ok);

            // un-normalized: column j multiplied by G_j; systematic helpers
            // then project through S_i G_j
            let g: Vec<Matrix> = (0..p.k).map(|_| random_inv(&mut rng, p.l)).collect();
            let enc = (0..p.r * p.k).map(|idx| code.matrices()[idx].mul(&g[idx % p.k]).unwrap()).collect();
            let twisted = Code::new(p.clone(), enc).unwrap();
            let per = (0..p.k)
                .map(|i| {
                    (0..p.n)
                        .filter(|&nu| nu != i)
                        .map(|nu| if nu < p.k { rebased[i].mul(&g[nu]).unwrap() } else { rebased[i].clone() })
                        .collect()
                })
                .collect();
            let twisted_scheme = RepairScheme::PerHelper(per);
            assert!(verify_scheme(&twisted, &twisted_scheme).unwrap().ok);
            assert!(twisted.mds_check().ok);

            let canon = twisted.normalize();
            let canon_scheme = RepairScheme::Constant(
                (0..p.k).map(|i| twisted_scheme.helper_matrix(i, p.k).row_basis()).collect(),
            );
            assert_eq!(canon_scheme, *scheme);
            assert!(verify_scheme(&canon, &canon_scheme).unwrap().ok);
            assert!(canon.mds_check().ok);
        }
    }

    #[test]
    fn too_large_and_param_errors() {
        let f = FieldSpec::prime(3).unwrap();
        assert!(matches!(SearchSpace::build(&f, 4, 2), Err(Error::TooLarge { .. })));
        assert!(matches!(SearchSpace::build(&f, 3, 2), Err(Error::Param(_))));
        let f5 = FieldSpec::prime(5).unwrap();
        let space = SearchSpace::build(&f5, 2, 2).unwrap();
        assert_eq!(space.candidates(), 2400);
        assert_eq!(space.max_compat_degree(), 110);
        assert!(space.max_degree() >= 110);
        assert!(matches!(space.exhaustive(5, 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn feasibility_report() {
        let f = FieldSpec::prime(2).unwrap();
        let rep = max_feasible_k(&f, 2, 2, 4, 50, 0).unwrap();
        assert_eq!(rep.k_star, Some(2));
        assert!(rep.per_k.iter().all(|p| p.exhaustive));
        assert_eq!(rep.per_k.iter().map(|p| p.found).collect::<Vec<_>>(), vec![12, 6, 0, 0]);
        assert!(matches!(max_feasible_k(&f, 2, 2, 5, 50, 0), Err(Error::Param(_))));
        assert!(matches!(max_feasible_k(&f, 3, 2, 1, 50, 0), Err(Error::Param(_))));
        assert_eq!(max_feasible_k(&FieldSpec::prime(3).unwrap(), 2, 2, 1, 50, 0).unwrap().k_star, Some(1));
    }
}
