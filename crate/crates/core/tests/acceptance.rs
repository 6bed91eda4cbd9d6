// Acceptance suite. Runs as a plain binary (harness = false) so that every
// criterion prints exactly one PASS/FAIL line even when output is captured.
//
// Pass criterion numbers as arguments to run a subset: `cargo test --test acceptance -- 3 8`.

#![allow(clippy::needless_range_loop)]
use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use msrlab::bounds::{self, LambdaEstimate};
use msrlab::certificates::{self, Partition};
use msrlab::format::CodeFile;
use msrlab::repair::RepairPlan;
use msrlab::search::{SearchConfig, SearchMode, SearchSpace};
use msrlab::{Code, CodeParams, Error, FieldElement, FieldSpec, Matrix, RepairScheme, Subspace};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

struct Fixture {
    label: String,
    code: Code,
    scheme: RepairScheme,
}

fn gf(q: u32) -> FieldSpec {
    FieldSpec::with_order(q).unwrap()
}

/// Every pair emitted by exhaustive search over GF(2), GF(3), GF(5) at
/// l = r = 2, k ≤ 3, followed by the frozen files under tests/fixtures.
fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for q in [2, 3, 5] {
            let space = SearchSpace::build(&gf(q), 2, 2).unwrap();
            for k in 1..=3 {
                let res = space.exhaustive(k, 4).unwrap();
                for (idx, (code, scheme)) in res.found.into_iter().enumerate() {
                    out.push(Fixture { label: format!("GF({q}) k={k} #{idx}"), code, scheme });
                }
            }
        }
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
        let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        for path in files {
            let text = std::fs::read_to_string(&path).unwrap();
            let (code, scheme) = CodeFile::parse(&text).unwrap().into_code().unwrap();
            out.push(Fixture {
                label: path.file_name().unwrap().to_string_lossy().into_owned(),
                code,
                scheme: scheme.expect("fixture carries a scheme"),
            });
        }
        out
    })
}

fn is_prime_field(f: &FieldSpec) -> bool {
    f.degree() == 1
}

// ---------------------------------------------------------------------------
// Test-local prime-field arithmetic, kept independent of the library kernels.

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] + p * p - f * rows[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn raw(m: &Matrix) -> Vec<Vec<u64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| u64::from(x.value())).collect()).collect()
}

fn mul_mod_p(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let (n, inner, m) = (a.len(), b.len(), b[0].len());
    (0..n).map(|i| (0..m).map(|j| (0..inner).map(|t| a[i][t] * b[t][j]).sum::<u64>() % p).collect()).collect()
}

fn identity_raw(l: usize) -> Vec<Vec<u64>> {
    (0..l).map(|i| (0..l).map(|j| u64::from(i == j)).collect()).collect()
}

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, m, &mut Vec::new(), &mut out);
    out
}

fn random_data(f: &FieldSpec, k: usize, l: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<FieldElement>> {
    let q = u64::from(f.order());
    (0..k).map(|_| (0..l).map(|_| f.reduce(rng.gen_range(0..q))).collect()).collect()
}

fn random_matrix(f: &FieldSpec, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let q = u64::from(f.order());
    let vals: Vec<u64> = (0..rows * cols).map(|_| rng.gen_range(0..q)).collect();
    Matrix::from_values(f, rows, cols, &vals).unwrap()
}

fn random_invertible(f: &FieldSpec, l: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = random_matrix(f, l, l, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_msrlab");
    let start = Instant::now();
    let out = Command::new(bin)
        .args(["bounds", "--l", "256", "--r", "16", "--compare", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("exit status {:?}", out.status.code()));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let prior = v["prior_goparaju_log_real"].as_f64().ok_or("missing prior bound")?;
    let new = v["rlog_real"].as_f64().ok_or("missing new bound")?;
    let t = v["t"].as_u64().ok_or("missing t")?;
    let detail = format!("prior {prior:.1}, new {new:.1}, t = {t}, {:.3}s", elapsed.as_secs_f64());
    let ok = (prior - 1390.7).abs() <= 0.5
        && (new - 347.7).abs() <= 0.5
        && t == 1
        && elapsed < Duration::from_secs(1);
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Outcome {
    for r in 2..=16u64 {
        let b = bounds::evaluate_bounds(r, r).map_err(|e| e.to_string())?;
        let checks = [
            ("quadratic", b.quadratic == BigRational::from_integer((r + 1).into())),
            ("quadratic_floor", b.quadratic_floor == r + 1),
            ("rlog_real", b.rlog_real == (2 * r) as f64),
            ("rlog_floor", b.rlog_floor == 2 * r),
            ("t", b.t == r),
            ("lambda", b.lambda == LambdaEstimate::Exact(r)),
        ];
        if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(format!("r = {r}: {name} off ({b:?})"));
        }
    }
    Ok("r = 2..16 all exact".into())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let fx = fixtures();
    let failures: Vec<String> = fx
        .par_iter()
        .filter_map(|f| {
            let p = f.code.params();
            let rep = certificates::encoding_independence(&f.code);
            let expected = p.k * (p.r - 1) + 1;
            let mut bad = !rep.ok || rep.rank != expected || rep.expected != expected;
            if is_prime_field(f.code.field()) {
                let mut rows = vec![identity_raw(p.l).concat()];
                for u in 1..p.r {
                    for j in 0..p.k {
                        rows.push(raw(f.code.matrix(u, j)).concat());
                    }
                }
                bad |= rank_mod_p(rows, u64::from(f.code.field().order())) != expected;
            }
            bad.then(|| f.label.clone())
        })
        .collect();
    let elapsed = start.elapsed();
    let detail = format!("{} fixtures, {} failures, {:.1}s", fx.len(), failures.len(), elapsed.as_secs_f64());
    if failures.is_empty() && elapsed < Duration::from_secs(300) {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", failures.first()))
    }
}

fn criterion_4() -> Outcome {
    let fx = fixtures();
    let results: Vec<Option<Result<(), String>>> = fx
        .par_iter()
        .map(|f| {
            let p = f.code.params();
            let part: Partition = certificates::find_partition(&f.scheme, p.l).ok()??;
            if !part.all_standard() {
                return None;
            }
            Some(check_delta(f, &part))
        })
        .collect();
    let applicable = results.iter().flatten().count();
    let failures: Vec<&String> = results.iter().flatten().filter_map(|r| r.as_ref().err()).collect();
    let detail = format!("{applicable} fixtures with a full standard partition, {} failures", failures.len());
    if failures.is_empty() && applicable > 0 {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", failures.first()))
    }
}

fn check_delta(f: &Fixture, part: &Partition) -> Result<(), String> {
    let p = f.code.params();
    let cert = certificates::delta_family_certificate(&f.code, &f.scheme, part).map_err(|e| e.to_string())?;
    let count = (p.r as u64).pow(part.len() as u32);
    if cert.count != count || !cert.nonzero_ok || cert.rank as u64 != count || !cert.independent_ok {
        return Err(format!("{}: {cert:?}", f.label));
    }
    if !cert.fits_ambient || count > (p.l * p.l) as u64 {
        return Err(format!("{}: r^p = {count} exceeds l^2", f.label));
    }
    if !is_prime_field(f.code.field()) {
        return Ok(());
    }
    // Rebuild every product from the raw encoding matrices.
    let q = u64::from(f.code.field().order());
    let gammas: Vec<Vec<Vec<Vec<u64>>>> = part
        .blocks
        .iter()
        .map(|block| {
            (0..p.r)
                .map(|u| {
                    if u == 0 {
                        return identity_raw(p.l);
                    }
                    let mut acc = vec![vec![0u64; p.l]; p.l];
                    for &j in block {
                        for (a, row) in acc.iter_mut().zip(raw(f.code.matrix(u, j))) {
                            for (x, y) in a.iter_mut().zip(row) {
                                *x = (*x + y) % q;
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut family = Vec::new();
    for idx in 0..count {
        let mut word = vec![0usize; part.len()];
        let mut rest = idx;
        for slot in word.iter_mut().rev() {
            *slot = (rest % p.r as u64) as usize;
            rest /= p.r as u64;
        }
        let prod = word.iter().zip(&gammas).fold(identity_raw(p.l), |acc, (&u, g)| mul_mod_p(&acc, &g[u], q));
        let lib = certificates::delta(&f.code, part, &word).map_err(|e| e.to_string())?;
        if raw(&lib) != prod {
            return Err(format!("{}: product mismatch at word {word:?}", f.label));
        }
        if prod.iter().flatten().all(|&x| x == 0) {
            return Err(format!("{}: zero product at word {word:?}", f.label));
        }
        family.push(prod.concat());
    }
    if rank_mod_p(family, q) as u64 != count {
        return Err(format!("{}: oracle rank below r^p", f.label));
    }
    Ok(())
}

/// `dim` against both lower bounds, in exact integer arithmetic.
fn dim_bounds_hold(dim: u64, m: u64, l: u64, r: u64) -> bool {
    let t = (r * r).div_ceil(l);
    let thm3 = if m <= t {
        dim * r == m * l
    } else {
        let e = (m - t) as u32;
        let scale = u128::from(r).pow(e + 1);
        let rhs = u128::from(l) * scale - u128::from(l) * u128::from(r - t) * u128::from(r - 1).pow(e);
        u128::from(dim) * scale >= rhs
    };
    let rm = u128::from(r).pow(m as u32);
    let eq29 = u128::from(dim) * rm >= u128::from(l) * (rm - u128::from(r - 1).pow(m as u32));
    thm3 && eq29
}

fn criterion_5() -> Outcome {
    let fx = fixtures();
    let checked = std::sync::atomic::AtomicUsize::new(0);
    let failures: Vec<String> = fx
        .par_iter()
        .flat_map_iter(|f| {
            let p = f.code.params();
            let mats = f.scheme.constant_matrices().expect("constant scheme").to_vec();
            let mut bad = Vec::new();
            for m in 1..=p.k {
                for subset in combinations(p.k, m) {
                    checked.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    let prof = match certificates::dim_profile(&f.scheme, &subset, p.l, p.r) {
                        Ok(prof) => prof,
                        Err(e) => {
                            bad.push(format!("{}: {e}", f.label));
                            continue;
                        }
                    };
                    let mut ok =
                        prof.ok && dim_bounds_hold(prof.dim as u64, m as u64, p.l as u64, p.r as u64);
                    if is_prime_field(f.code.field()) {
                        let rows: Vec<Vec<u64>> = subset.iter().flat_map(|&i| raw(&mats[i])).collect();
                        ok &= rank_mod_p(rows, u64::from(f.code.field().order())) == prof.dim;
                    }
                    if !ok {
                        bad.push(format!("{} subset {:?}: {prof:?}", f.label, prof.subset));
                    }
                }
            }
            bad
        })
        .collect();
    let detail =
        format!("{} subsets over {} fixtures, {} failures", checked.into_inner(), fx.len(), failures.len());
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", failures.first()))
    }
}

/// Bitmask over `F_q^l` (vectors indexed base q) of the span of `basis`.
fn span_mask(basis: &[Vec<u64>], q: u64, l: usize) -> u128 {
    let d = basis.len();
    let mut mask = 0u128;
    for coeffs in 0..q.pow(d as u32) {
        let mut c = coeffs;
        let mut v = vec![0u64; l];
        for row in basis {
            let a = c % q;
            c /= q;
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x + a * y) % q;
            }
        }
        let idx = v.iter().fold(0u64, |acc, &x| acc * q + x);
        mask |= 1u128 << idx;
    }
    mask
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let configs = [
        FieldSpec::prime(2).unwrap(),
        FieldSpec::prime(3).unwrap(),
        FieldSpec::prime(7).unwrap(),
        FieldSpec::prime(65_521).unwrap(),
        FieldSpec::binary_default(2).unwrap(),
        FieldSpec::binary_default(8).unwrap(),
    ];
    let mut random_pairs = 0;
    for f in &configs {
        for _ in 0..1000 {
            let l = rng.gen_range(1..=6);
            let (da, db) = (rng.gen_range(0..=l), rng.gen_range(0..=l));
            let a = Subspace::span(&random_matrix(f, da, l, &mut rng));
            let b = Subspace::span(&random_matrix(f, db, l, &mut rng));
            let sum = a.sum(&b).map_err(|e| e.to_string())?;
            let cap = a.intersect(&b).map_err(|e| e.to_string())?;
            if a.dim() + b.dim() != sum.dim() + cap.dim() {
                return Err(format!("modular identity fails over {f}: {a:?} {b:?}"));
            }
            let nested = cap.is_subspace_of(&a).unwrap()
                && cap.is_subspace_of(&b).unwrap()
                && a.is_subspace_of(&sum).unwrap()
                && b.is_subspace_of(&sum).unwrap();
            if !nested {
                return Err(format!("containment fails over {f}"));
            }
            random_pairs += 1;
        }
    }

    let mut exhaustive_pairs = 0usize;
    for q in [2u32, 3] {
        let f = FieldSpec::prime(q).unwrap();
        for l in 1..=4 {
            let subs: Vec<(Subspace, u128)> = (0..=l)
                .flat_map(|d| Subspace::enumerate(&f, l, d))
                .map(|s| {
                    let m = span_mask(&raw(s.basis()), u64::from(q), l);
                    (s, m)
                })
                .collect();
            let masks: HashSet<u128> = subs.iter().map(|(_, m)| *m).collect();
            if masks.len() != subs.len() {
                return Err(format!("GF({q})^{l}: duplicate subspaces in enumeration"));
            }
            let bad = subs
                .par_iter()
                .map(|(a, ma)| {
                    subs.iter()
                        .filter(|(b, mb)| {
                            let cap = a.intersect(b).unwrap();
                            span_mask(&raw(cap.basis()), u64::from(q), l) != (ma & mb)
                        })
                        .count()
                })
                .sum::<usize>();
            if bad > 0 {
                return Err(format!("GF({q})^{l}: {bad} intersections disagree with enumeration"));
            }
            exhaustive_pairs += subs.len() * subs.len();
        }
    }
    Ok(format!(
        "{random_pairs} random pairs over {} fields, {exhaustive_pairs} exhaustive pairs",
        configs.len()
    ))
}

/// MDS by decoding from every k-subset of nodes.
fn decode_oracle(code: &Code, rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let p = code.params();
    let data = random_data(code.field(), p.k, p.l, rng);
    let contents = code.node_contents(&data).map_err(|e| e.to_string())?;
    for subset in combinations(p.n, p.k) {
        let surv: Vec<_> = subset.iter().map(|&i| (i, contents[i].clone())).collect();
        match code.erasure_decode(&surv) {
            Ok(d) if d == data => {}
            Ok(_) => return Err(format!("decode from {subset:?} returned wrong data")),
            Err(Error::SingularSystem) => return Ok(false),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(true)
}

/// MDS by brute force: no nonzero data vector vanishes on any k nodes.
fn injectivity_oracle(code: &Code) -> bool {
    let p = code.params();
    let f = code.field();
    let q = u64::from(f.order());
    let subsets = combinations(p.n, p.k);
    let mut dead = vec![false; subsets.len()];
    for idx in 1..q.pow((p.k * p.l) as u32) {
        let mut rest = idx;
        let data: Vec<Vec<FieldElement>> = (0..p.k)
            .map(|_| {
                (0..p.l)
                    .map(|_| {
                        let x = rest % q;
                        rest /= q;
                        f.reduce(x)
                    })
                    .collect()
            })
            .collect();
        let contents = code.node_contents(&data).unwrap();
        for (s, d) in subsets.iter().zip(dead.iter_mut()) {
            if s.iter().all(|&i| contents[i].iter().all(|x| x.is_zero())) {
                *d = true;
            }
        }
    }
    !dead.iter().any(|&d| d)
}

fn all_invertible(f: &FieldSpec, l: usize) -> Vec<Matrix> {
    let q = u64::from(f.order());
    (0..q.pow((l * l) as u32))
        .filter_map(|mut idx| {
            let vals: Vec<u64> = (0..l * l)
                .map(|_| {
                    let x = idx % q;
                    idx /= q;
                    x
                })
                .collect();
            let m = Matrix::from_values(f, l, l, &vals).unwrap();
            m.is_invertible().then_some(m)
        })
        .collect()
}

fn criterion_7() -> Outcome {
    // (q, l, r, max k): every cell keeps the grid at or below ~50k codes.
    let grid: [(u32, usize, usize, usize); 9] = [
        (2, 1, 1, 5),
        (2, 2, 1, 5),
        (2, 2, 2, 3),
        (3, 1, 1, 5),
        (3, 2, 1, 2),
        (3, 2, 2, 1),
        (4, 1, 1, 5),
        (5, 1, 1, 5),
        (7, 1, 1, 4),
    ];
    let mut codes = 0usize;
    let mut mds_count = 0usize;
    let mut brute = 0usize;
    let mut disagreements: Vec<String> = Vec::new();
    for (q, l, r, kmax) in grid {
        let f = gf(q);
        let mats = all_invertible(&f, l);
        for k in 1..=kmax {
            if k + r > 6 {
                continue;
            }
            let params = CodeParams::new(&f, k, r, l).unwrap();
            let cells = r * k;
            let total = mats.len().pow(cells as u32);
            let stats: Vec<(bool, bool, Option<String>)> = (0..total)
                .into_par_iter()
                .map(|mut idx| {
                    let enc: Vec<Matrix> = (0..cells)
                        .map(|_| {
                            let m = mats[idx % mats.len()].clone();
                            idx /= mats.len();
                            m
                        })
                        .collect();
                    let code = Code::new(params.clone(), enc).unwrap();
                    let mut rng = ChaCha8Rng::seed_from_u64(idx as u64);
                    let claimed = code.mds_check().ok;
                    let mut err = None;
                    match decode_oracle(&code, &mut rng) {
                        Ok(v) if v == claimed => {}
                        Ok(v) => {
                            err = Some(format!("GF({q}) l={l} r={r} k={k}: criterion {claimed}, decode {v}"))
                        }
                        Err(e) => err = Some(e),
                    }
                    let small = u64::from(q).pow((k * l) as u32) <= 64;
                    if small && err.is_none() && injectivity_oracle(&code) != claimed {
                        err = Some(format!("GF({q}) l={l} r={r} k={k}: brute-force injectivity disagrees"));
                    }
                    (claimed, small, err)
                })
                .collect();
            codes += stats.len();
            mds_count += stats.iter().filter(|s| s.0).count();
            brute += stats.iter().filter(|s| s.1).count();
            disagreements.extend(stats.into_iter().filter_map(|s| s.2));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fields = [gf(2), gf(3), gf(4), gf(5), gf(7), gf(8)];
    for _ in 0..1000 {
        let f = &fields[rng.gen_range(0..fields.len())];
        let (l, r) = [(1, 1), (2, 1), (2, 2)][rng.gen_range(0..3)];
        let k = rng.gen_range(1..=6 - r);
        let enc: Vec<Matrix> = (0..r * k).map(|_| random_invertible(f, l, &mut rng)).collect();
        let code = Code::new(CodeParams::new(f, k, r, l).unwrap(), enc).unwrap();
        let claimed = code.mds_check().ok;
        codes += 1;
        mds_count += usize::from(claimed);
        match decode_oracle(&code, &mut rng) {
            Ok(v) if v == claimed => {}
            Ok(v) => {
                disagreements.push(format!("random {f} l={l} r={r} k={k}: criterion {claimed}, decode {v}"))
            }
            Err(e) => disagreements.push(e),
        }
    }

    let detail = format!(
        "{codes} codes ({mds_count} MDS, {brute} also brute-forced), {} disagreements",
        disagreements.len()
    );
    if disagreements.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", disagreements.first()))
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let fx = fixtures();
    let failures: Vec<String> =
        fx.par_iter().enumerate().filter_map(|(idx, f)| repair_fixture(f, idx as u64).err()).collect();
    let repairs: usize = fx.iter().map(|f| 100 * f.code.params().k).sum();
    let detail = format!(
        "{repairs} repairs over {} fixtures, {} failures, {:.1}s",
        fx.len(),
        failures.len(),
        start.elapsed().as_secs_f64()
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", failures.first()))
    }
}

fn repair_fixture(f: &Fixture, seed: u64) -> Result<(), String> {
    let p = f.code.params();
    let want = (p.n - 1) * p.l / p.r;
    let plans: Vec<RepairPlan> = (0..p.k)
        .map(|i| RepairPlan::new(&f.code, &f.scheme, i))
        .collect::<msrlab::Result<_>>()
        .map_err(|e| format!("{}: {e}", f.label))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let data = random_data(f.code.field(), p.k, p.l, &mut rng);
        let contents = f.code.node_contents(&data).map_err(|e| e.to_string())?;
        for (i, plan) in plans.iter().enumerate() {
            // the erased node's own content must not matter
            let mut erased = contents.clone();
            erased[i] = vec![f.code.field().zero(); p.l];
            let out = plan.execute(&erased).map_err(|e| format!("{}: {e}", f.label))?;
            if out.reconstructed != data[i] {
                return Err(format!("{}: node {} reconstructed wrongly", f.label, i + 1));
            }
            if out.downloaded_symbols != want {
                return Err(format!(
                    "{}: downloaded {} symbols, expected {want}",
                    f.label, out.downloaded_symbols
                ));
            }
        }
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut parts = Vec::new();
    for q in [2, 3] {
        let cfg =
            SearchConfig { field: gf(q), l: 2, r: 2, k: 4, mode: SearchMode::Exhaustive, seed: 0, shards: 4 };
        let res = pool.install(|| msrlab::search::search_codes(&cfg)).map_err(|e| e.to_string())?;
        if !res.found.is_empty() {
            return Err(format!("GF({q}) k=4 found {} instances", res.found.len()));
        }
        parts.push(format!("GF({q}): 0 of {} tuples", res.examined));
    }
    let elapsed = start.elapsed();
    let detail = format!("{}, {:.1}s", parts.join(", "), elapsed.as_secs_f64());
    if elapsed < Duration::from_secs(600) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10() -> Outcome {
    let cells = bounds::table(1..=4096, 2..=16);
    let expected: u64 = (2..=16).map(|r| 4096 / r).sum();
    if cells.len() as u64 != expected {
        return Err(format!("{} cells, expected {expected}", cells.len()));
    }
    let bad: Vec<_> = cells.iter().filter(|c| c.rlog_real > c.prior_goparaju_log_real).collect();
    if bad.is_empty() {
        Ok(format!("{} cells, 0 violations", cells.len()))
    } else {
        Err(format!(
            "{} violations; first l={} r={}: {} > {}",
            bad.len(),
            bad[0].l,
            bad[0].r,
            bad[0].rlog_real,
            bad[0].prior_goparaju_log_real
        ))
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (idx, run) in criteria.iter().enumerate() {
        let n = idx + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
