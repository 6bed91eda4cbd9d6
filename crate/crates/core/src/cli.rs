//! Command-line front end. [`dispatch`] returns the process exit code:
//! 0 success, 1 property violation, 2 malformed input or flags, 3 internal
//! consistency failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{FieldElement, FieldSpec};
use crate::bounds::{evaluate_bounds, table, BoundReport, LambdaEstimate};
use crate::certificates::certify;
use crate::code::Code;
use crate::error::Error;
use crate::format::{parse_data_file, write_code_file, CodeFile};
use crate::repair::{verify_scheme, RepairPlan, RepairReport, RepairScheme, Violation};
use crate::search::{max_feasible_k, search_codes, SearchConfig, SearchMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "msrlab", version, about = "Linear MSR code laboratory")]
struct Cli {
    /// Emit a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// MDS check and repair-scheme verification.
    Verify { file: PathBuf },
    /// Erase one systematic node and rebuild it from helper downloads.
    Repair {
        file: PathBuf,
        /// Systematic node to repair (1-based).
        #[arg(long)]
        node: usize,
        /// Data file, or `random`.
        #[arg(long)]
        data: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Linear-independence and dimension certificates.
    Certify { file: PathBuf },
    /// Upper bounds on the systematic length.
    Bounds {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        r: u64,
        /// Include the prior bounds.
        #[arg(long)]
        compare: bool,
    },
    /// Bounds over a grid of parameters.
    Table {
        /// `a:b:step`, inclusive.
        #[arg(long, value_parser = parse_range)]
        l: Range,
        /// `a:b`, inclusive.
        #[arg(long, value_parser = parse_range)]
        r: Range,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Search for valid (code, scheme) pairs.
    Search(SearchArgs),
    /// Largest k with a found instance, for k = 1..k-cap.
    Feasible {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k_cap: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Field order, or the characteristic when `--m` is given.
    #[arg(long)]
    q: u32,
    #[arg(long)]
    m: Option<u32>,
    /// Reduction polynomial, hex.
    #[arg(long, value_parser = parse_hex)]
    modulus: Option<u32>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    k: usize,
    /// Enumerate everything (the default).
    #[arg(long, conflicts_with = "budget")]
    exhaustive: bool,
    /// Random constructive attempts instead of exhaustive search.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    shards: usize,
    /// Directory for found pairs, one code file each.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Emit at most this many files.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
struct Range {
    start: u64,
    end: u64,
    step: u64,
}

impl Range {
    fn values(self) -> impl Iterator<Item = u64> + Clone {
        (self.start..=self.end).step_by(self.step as usize)
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.parse::<u64>().map_err(|_| format!("bad number {t:?} in range"));
    let range = match parts.as_slice() {
        [a] => Range { start: num(a)?, end: num(a)?, step: 1 },
        [a, b] => Range { start: num(a)?, end: num(b)?, step: 1 },
        [a, b, c] => Range { start: num(a)?, end: num(b)?, step: num(c)? },
        _ => return Err("expected a:b or a:b:step".into()),
    };
    if range.step == 0 || range.start > range.end || range.start == 0 {
        return Err("range needs 0 < a ≤ b and step ≥ 1".into());
    }
    Ok(range)
}

fn parse_hex(s: &str) -> Result<u32, String> {
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    u32::from_str_radix(digits, 16).map_err(|_| format!("bad hex value {s:?}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Md,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

/// Outcome of a subcommand: an exit code, or an input error message.
type Outcome = std::result::Result<i32, Failure>;

struct Failure {
    code: i32,
    msg: String,
}

fn input(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INPUT, msg: msg.to_string() }
}

fn internal(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INTERNAL, msg: msg.to_string() }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        input(e)
    }
}

/// Run the CLI on `argv` (program name first) with the process streams.
pub fn dispatch<S: AsRef<str>>(argv: &[S]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`dispatch`] with explicit output streams.
pub fn run<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if shown {
                let _ = write!(out, "{text}");
                return EXIT_OK;
            }
            let _ = write!(err, "{text}");
            return EXIT_INPUT;
        }
    };
    let threads = match std::env::var("MSRLAB_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                let _ = writeln!(err, "error: MSRLAB_THREADS must be a positive integer, got {v:?}");
                return EXIT_INPUT;
            }
        },
        Err(_) => None,
    };
    // commands write to buffers so the work can move onto a sized pool
    let json = cli.json;
    let work = move || {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let mut io = Io { out: &mut o, err: &mut e, json };
        let code = match execute(cli.command, &mut io) {
            Ok(code) => code,
            Err(f) => {
                let _ = writeln!(io.err, "error: {}", f.msg);
                f.code
            }
        };
        (code, o, e)
    };
    let (code, o, e) = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INTERNAL;
            }
        },
        None => work(),
    };
    let _ = out.write_all(&o);
    let _ = err.write_all(&e);
    code
}

fn execute(cmd: Command, io: &mut Io) -> Outcome {
    match cmd {
        Command::Verify { file } => verify_cmd(&file, io),
        Command::Repair { file, node, data, seed } => repair_cmd(&file, node, &data, seed, io),
        Command::Certify { file } => certify_cmd(&file, io),
        Command::Bounds { l, r, compare } => bounds_cmd(l, r, compare, io),
        Command::Table { l, r, format } => table_cmd(l, r, format, io),
        Command::Search(args) => search_cmd(args, io),
        Command::Feasible { field, l, r, k_cap, budget, seed } => {
            feasible_cmd(&build_field(&field)?, l, r, k_cap, budget, seed, io)
        }
    }
}

fn emit_json(io: &mut Io, value: &Value) -> std::io::Result<()> {
    writeln!(io.out, "{}", serde_json::to_string_pretty(value).expect("serializable"))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn load(path: &Path) -> std::result::Result<CodeFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    CodeFile::parse(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// A code and its scheme, tolerating singular encoding matrices.
fn load_for_check(path: &Path) -> std::result::Result<(Code, Option<RepairScheme>), Failure> {
    let file = load(path)?;
    if let Some(s) = &file.scheme {
        // shapes are fixed by the parser; only rank can fail here
        if let Err(e) = s.validate(&file.params) {
            if !matches!(e, Error::SchemeInvalid(_)) {
                return Err(input(e));
            }
        }
    }
    let code = Code::new_unchecked(file.params, file.matrices).map_err(input)?;
    Ok((code, file.scheme))
}

fn describe_violation(v: &Violation) -> String {
    match v {
        Violation::Alignment { node, parity, other } => {
            format!("alignment: node {node}, parity {parity}, interference from node {other} (i={node} u={parity} j={other})")
        }
        Violation::Span { node, dim } => {
            format!("span: node {node}, parity projections span dimension {dim}")
        }
    }
}

fn set_list(xs: &[usize]) -> String {
    let inner: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn verify_cmd(path: &Path, io: &mut Io) -> Outcome {
    let (code, scheme) = load_for_check(path)?;
    let mds = code.mds_check();
    let repair: Option<Result<RepairReport, String>> =
        scheme.as_ref().map(|s| match verify_scheme(&code, s) {
            Ok(r) => Ok(r),
            Err(Error::SchemeInvalid(msg)) => Err(msg),
            Err(e) => Err(e.to_string()),
        });
    let repair_ok = match &repair {
        None => true,
        Some(Ok(r)) => r.ok,
        Some(Err(_)) => false,
    };
    let ok = mds.ok && repair_ok;
    if io.json {
        let repair_value = match &repair {
            None => Value::Null,
            Some(Ok(r)) => to_value(r),
            Some(Err(msg)) => json!({ "ok": false, "error": msg }),
        };
        emit_json(
            io,
            &json!({ "command": "verify", "ok": ok, "mds": to_value(&mds), "repair": repair_value }),
        )?;
    } else {
        let p = code.params();
        writeln!(io.out, "code: n={} k={} r={} l={} over {}", p.n, p.k, p.r, p.l, p.field)?;
        match &mds.witness {
            None => writeln!(io.out, "mds: ok ({} block selections)", mds.blocks_checked)?,
            Some(w) => writeln!(
                io.out,
                "mds: FAIL singular block U={} J={}",
                set_list(&w.parity_rows),
                set_list(&w.systematic_cols)
            )?,
        }
        match &repair {
            None => writeln!(io.out, "repair: no scheme in file")?,
            Some(Ok(r)) if r.ok => writeln!(io.out, "repair: ok ({} scheme)", mode_name(r))?,
            Some(Ok(r)) => {
                writeln!(io.out, "repair: FAIL ({} violations)", r.violations.len())?;
                for v in &r.violations {
                    writeln!(io.out, "  {}", describe_violation(v))?;
                }
            }
            Some(Err(msg)) => writeln!(io.out, "repair: FAIL {msg}")?,
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn mode_name(r: &RepairReport) -> &'static str {
    match r.mode {
        crate::repair::SchemeMode::Constant => "constant",
        crate::repair::SchemeMode::PerHelper => "per-helper",
    }
}

fn random_data(code: &Code, seed: u64) -> Vec<Vec<FieldElement>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = code.field();
    let p = code.params();
    (0..p.k).map(|_| (0..p.l).map(|_| f.reduce(rng.gen_range(0..f.order() as u64))).collect()).collect()
}

fn fmt_vec(v: &[FieldElement]) -> String {
    v.iter().map(|x| x.value().to_string()).collect::<Vec<_>>().join(" ")
}

fn repair_cmd(path: &Path, node: usize, data: &str, seed: Option<u64>, io: &mut Io) -> Outcome {
    let (code, scheme) = load_for_check(path)?;
    let scheme = scheme.ok_or_else(|| input("repair needs a scheme (S blocks) in the code file"))?;
    let p = code.params().clone();
    if node == 0 || node > p.k {
        return Err(input(format!("--node must be a systematic node in [1, {}]", p.k)));
    }
    let data = if data == "random" {
        let seed = seed.ok_or_else(|| input("--data random requires --seed"))?;
        random_data(&code, seed)
    } else {
        let text = std::fs::read_to_string(data).map_err(|e| input(format!("{data}: {e}")))?;
        parse_data_file(&text, &p).map_err(|e| input(format!("{data}: {e}")))?
    };
    let report = match verify_scheme(&code, &scheme) {
        Ok(r) => r,
        Err(e) => return Err(input(e)),
    };
    if !report.ok || !code.mds_check().ok {
        if io.json {
            emit_json(io, &json!({ "command": "repair", "ok": false, "repair": to_value(&report) }))?;
        } else {
            writeln!(io.out, "repair: scheme or code fails verification; run `verify` for details")?;
        }
        return Ok(EXIT_VIOLATION);
    }
    let plan = RepairPlan::new(&code, &scheme, node - 1)
        .map_err(|e| internal(format!("after a passing verify: {e}")))?;
    let contents = code.node_contents(&data).map_err(input)?;
    let mut erased = contents.clone();
    erased[node - 1] = vec![FieldElement::ZERO; p.l];
    let outcome = plan.execute(&erased).map_err(internal)?;
    let expected = (p.n - 1) * p.beta();
    let exact = outcome.reconstructed == contents[node - 1];
    if io.json {
        emit_json(
            io,
            &json!({
                "command": "repair",
                "ok": exact && outcome.downloaded_symbols == expected,
                "node": node,
                "reconstructed": outcome.reconstructed.iter().map(|x| x.value()).collect::<Vec<_>>(),
                "original": contents[node - 1].iter().map(|x| x.value()).collect::<Vec<_>>(),
                "downloaded_symbols": outcome.downloaded_symbols,
                "optimal_symbols": expected,
                "exact": exact,
            }),
        )?;
    } else {
        writeln!(io.out, "node {node} reconstructed: {}", fmt_vec(&outcome.reconstructed))?;
        writeln!(io.out, "original:              {}", fmt_vec(&contents[node - 1]))?;
        writeln!(
            io.out,
            "downloaded symbols: {} (optimal (n-1)*l/r = {expected})",
            outcome.downloaded_symbols
        )?;
    }
    if !exact || outcome.downloaded_symbols != expected {
        return Err(internal("repair did not reproduce the erased node"));
    }
    Ok(EXIT_OK)
}

fn certify_cmd(path: &Path, io: &mut Io) -> Outcome {
    let file = load(path)?;
    if let Some((u, j)) = file.singular_matrix() {
        writeln!(io.err, "C u={} j={} is singular; the code is not MDS", u + 1, j + 1)?;
        if io.json {
            emit_json(io, &json!({ "command": "certify", "ok": false, "singular": [u + 1, j + 1] }))?;
        }
        return Ok(EXIT_VIOLATION);
    }
    let (code, scheme) = file.into_code().map_err(input)?;
    let scheme = match scheme {
        Some(s @ RepairScheme::Constant(_)) => s,
        Some(_) => return Err(input("certify needs a constant-subspace scheme")),
        None => return Err(input("certify needs a scheme (S blocks) in the code file")),
    };
    let code = if code.is_normalized() {
        code
    } else {
        writeln!(io.err, "note: normalizing the code so that C_(1,j) = I")?;
        code.normalize()
    };
    let rep = certify(&code, &scheme).map_err(input)?;
    if io.json {
        let mut v = to_value(&rep);
        v["command"] = json!("certify");
        emit_json(io, &v)?;
    } else {
        let e = &rep.encoding_independence;
        writeln!(
            io.out,
            "encoding independence: rank {} of expected {} ({})",
            e.rank,
            e.expected,
            verdict(e.ok)
        )?;
        let show = |x: Option<usize>| x.map_or("none".to_string(), |m| m.to_string());
        writeln!(
            io.out,
            "spanning: some {}-subset spans, every {}-subset spans",
            show(rep.spanning.lambda_exists),
            show(rep.spanning.lambda_every)
        )?;
        match &rep.partition {
            None => writeln!(io.out, "partition: none (no block of repair subspaces spans)")?,
            Some(part) => {
                let blocks: Vec<String> = part
                    .blocks
                    .iter()
                    .zip(&part.standard)
                    .map(|(b, &s)| {
                        let one: Vec<usize> = b.iter().map(|i| i + 1).collect();
                        format!("{}{}", set_list(&one), if s { "" } else { "*" })
                    })
                    .collect();
                writeln!(io.out, "partition: {} (* = non-spanning)", blocks.join(" "))?;
            }
        }
        match &rep.delta_family {
            None => writeln!(io.out, "delta family: not evaluated")?,
            Some(d) => writeln!(
                io.out,
                "delta family: {} products, rank {}, nonzero {}, independent {}, fits l^2 {}",
                d.count,
                d.rank,
                verdict(d.nonzero_ok),
                verdict(d.independent_ok),
                verdict(d.fits_ambient)
            )?,
        }
        writeln!(
            io.out,
            "dimension profiles: {} subsets ({})",
            rep.dim_profiles.len(),
            verdict(rep.dim_profiles_ok)
        )?;
        for d in rep.dim_profiles.iter().filter(|d| !d.ok) {
            writeln!(
                io.out,
                "  subset {} dim {} below bound {} / {}",
                set_list(&d.subset),
                d.dim,
                d.bound_thm3,
                d.bound_eq29
            )?;
        }
    }
    Ok(if rep.ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn lambda_text(l: LambdaEstimate) -> String {
    match l {
        LambdaEstimate::Exact(v) => format!("{v} (exact)"),
        LambdaEstimate::UpperBound(v) => format!("≤ {v}"),
    }
}

const PRIOR_KEYS: [&str; 5] = [
    "prior_tamo",
    "prior_goparaju_quadratic",
    "prior_goparaju_lambda",
    "prior_goparaju_log_real",
    "prior_goparaju_log_floor",
];

fn bounds_value(b: &BoundReport, compare: bool) -> Value {
    let mut v = to_value(b);
    if !compare {
        let map = v.as_object_mut().expect("struct");
        for key in PRIOR_KEYS {
            map.remove(key);
        }
    }
    v
}

fn bounds_cmd(l: u64, r: u64, compare: bool, io: &mut Io) -> Outcome {
    let b = evaluate_bounds(l, r).map_err(input)?;
    if io.json {
        let mut v = bounds_value(&b, compare);
        v["command"] = json!("bounds");
        emit_json(io, &v)?;
        return Ok(EXIT_OK);
    }
    writeln!(io.out, "l = {l}, r = {r}, t = {}", b.t)?;
    writeln!(io.out, "lambda {} (un-floored {:.3})", lambda_text(b.lambda), b.lambda_real)?;
    writeln!(io.out, "quadratic bound: k ≤ {} ((l^2-1)/(r-1) = {})", b.quadratic_floor, b.quadratic)?;
    writeln!(io.out, "new log bound:   k ≤ {:.1} (integer lambda: {})", b.rlog_real, b.rlog_floor)?;
    if compare {
        writeln!(
            io.out,
            "prior log bound: k ≤ {:.1} (integer lambda {}: {})",
            b.prior_goparaju_log_real, b.prior_goparaju_lambda, b.prior_goparaju_log_floor
        )?;
        writeln!(io.out, "prior quadratic: k ≤ {}", b.prior_goparaju_quadratic)?;
        writeln!(io.out, "prior binomial:  k ≤ {}", b.prior_tamo)?;
        writeln!(io.out, "improvement:     {:.2}x", b.prior_goparaju_log_real / b.rlog_real)?;
    }
    Ok(EXIT_OK)
}

fn table_cmd(l: Range, r: Range, format: TableFormat, io: &mut Io) -> Outcome {
    let rows = table(l.values(), r.values());
    if io.json {
        let v: Vec<Value> = rows.iter().map(|b| bounds_value(b, true)).collect();
        emit_json(io, &json!({ "command": "table", "rows": v }))?;
        return Ok(EXIT_OK);
    }
    let header = [
        "l",
        "r",
        "t",
        "lambda",
        "lambda_exact",
        "quadratic",
        "rlog_real",
        "rlog_floor",
        "prior_log_real",
        "prior_log_floor",
    ];
    let cells = |b: &BoundReport| {
        vec![
            b.l.to_string(),
            b.r.to_string(),
            b.t.to_string(),
            b.lambda.value().to_string(),
            matches!(b.lambda, LambdaEstimate::Exact(_)).to_string(),
            b.quadratic_floor.to_string(),
            format!("{:.3}", b.rlog_real),
            b.rlog_floor.to_string(),
            format!("{:.3}", b.prior_goparaju_log_real),
            b.prior_goparaju_log_floor.to_string(),
        ]
    };
    match format {
        TableFormat::Csv => {
            writeln!(io.out, "{}", header.join(","))?;
            for b in &rows {
                writeln!(io.out, "{}", cells(b).join(","))?;
            }
        }
        TableFormat::Md => {
            writeln!(io.out, "| {} |", header.join(" | "))?;
            writeln!(io.out, "|{}", "---|".repeat(header.len()))?;
            for b in &rows {
                writeln!(io.out, "| {} |", cells(b).join(" | "))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn build_field(a: &FieldArgs) -> std::result::Result<FieldSpec, Failure> {
    let f = match (a.m, a.modulus) {
        (None, None) => FieldSpec::with_order(a.q),
        (Some(m), modulus) if m > 1 && a.q == 2 => match modulus {
            Some(x) => FieldSpec::binary_extension(m, x),
            None => FieldSpec::binary_default(m),
        },
        (Some(m), modulus) => FieldSpec::new(a.q, m, modulus),
        (None, Some(_)) => return Err(input("--modulus needs --m")),
    };
    f.map_err(input)
}

fn search_cmd(a: SearchArgs, io: &mut Io) -> Outcome {
    let field = build_field(&a.field)?;
    let mode = match a.budget {
        Some(budget) => SearchMode::Random { budget },
        None => SearchMode::Exhaustive,
    };
    let cfg =
        SearchConfig { field: field.clone(), l: a.l, r: a.r, k: a.k, mode, seed: a.seed, shards: a.shards };
    writeln!(
        io.err,
        "searching {} l={} r={} k={} ({})",
        field,
        a.l,
        a.r,
        a.k,
        match mode {
            SearchMode::Exhaustive => "exhaustive".to_string(),
            SearchMode::Random { budget } => format!("random, {budget} attempts, seed {}", a.seed),
        }
    )?;
    let res = match search_codes(&cfg) {
        Ok(r) => r,
        Err(e @ Error::SchemeInvalid(_)) => return Err(internal(e)),
        Err(e) => return Err(input(e)),
    };
    if let Some(c) = res.candidates {
        writeln!(io.err, "phase 1: {c} node candidates")?;
    }
    writeln!(io.err, "phase 2: {} tuples examined, {} found", res.examined, res.found.len())?;

    // independent re-check of every emitted pair
    for (code, scheme) in &res.found {
        let ok = verify_scheme(code, scheme).map(|r| r.ok).unwrap_or(false) && code.mds_check().ok;
        if !ok {
            return Err(internal("search emitted a pair that fails verification"));
        }
    }

    let mut emitted = Vec::new();
    if let Some(dir) = &a.emit {
        std::fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
        let limit = a.limit.unwrap_or(usize::MAX);
        let width = res.found.len().min(limit).to_string().len().max(4);
        for (idx, (code, scheme)) in res.found.iter().take(limit).enumerate() {
            let path = dir.join(format!("code-{:0width$}.msr", idx + 1));
            std::fs::write(&path, write_code_file(code, Some(scheme)))
                .map_err(|e| input(format!("{}: {e}", path.display())))?;
            emitted.push(path.display().to_string());
        }
    }
    if io.json {
        emit_json(
            io,
            &json!({
                "command": "search",
                "mode": to_value(&mode),
                "found": res.found.len(),
                "examined": res.examined,
                "candidates": res.candidates,
                "estimate": res.estimate.map(|e| e.to_string()),
                "emitted": emitted,
            }),
        )?;
    } else {
        writeln!(io.out, "found {} valid pairs ({} examined)", res.found.len(), res.examined)?;
        if !emitted.is_empty() {
            writeln!(io.out, "wrote {} files", emitted.len())?;
        }
    }
    Ok(EXIT_OK)
}

fn feasible_cmd(
    field: &FieldSpec,
    l: usize,
    r: usize,
    k_cap: usize,
    budget: u64,
    seed: u64,
    io: &mut Io,
) -> Outcome {
    let rep = match max_feasible_k(field, l, r, k_cap, budget, seed) {
        Ok(r) => r,
        Err(e @ Error::SchemeInvalid(_)) => return Err(internal(e)),
        Err(e) => return Err(input(e)),
    };
    if io.json {
        let mut v = to_value(&rep);
        v["command"] = json!("feasible");
        emit_json(io, &v)?;
    } else {
        for p in &rep.per_k {
            writeln!(
                io.out,
                "k={}: {} found ({}, {} examined)",
                p.k,
                p.found,
                if p.exhaustive { "exhaustive" } else { "random" },
                p.examined
            )?;
        }
        writeln!(
            io.out,
            "k* = {} over {field}; {}",
            rep.k_star.map_or("none".into(), |k| k.to_string()),
            rep.note
        )?;
    }
    Ok(EXIT_OK)
}
