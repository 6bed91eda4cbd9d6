//! The `msrcode v1` text format for codes and repair schemes, plus the data
//! files consumed by `repair`.
//!
//! ```text
//! msrcode v1
//! field p=5 m=1
//! params n=4 k=2 l=2
//! C u=1 j=1
//! 1 0
//! 0 1
//! ...
//! S i=1
//! 1 0
//! ```
//!
//! `#` starts a comment and blank lines are ignored. Matrices appear in the
//! fixed order `u = 1..r`, `j = 1..k`. Repair subspaces are optional; a
//! scheme is either one `S i=<i>` block per systematic node or, for
//! per-helper schemes, one `S i=<i> v=<ν>` block per (node, helper) pair with
//! helpers ascending and `ν ≠ i`. Element literals are decimal or `0x` hex;
//! for extension fields the value is the polynomial packing.

use std::fmt::Write as _;

use crate::algebra::{FieldElement, FieldSpec, Matrix};
use crate::code::{Code, CodeParams};
use crate::error::{Error, Result};
use crate::repair::RepairScheme;

pub const HEADER: &str = "msrcode v1";

/// A parsed code file. The encoding matrices are kept as written so that a
/// singular entry can be reported as an MDS violation rather than a parse
/// failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeFile {
    pub params: CodeParams,
    /// Row-major `r x k` grid.
    pub matrices: Vec<Matrix>,
    pub scheme: Option<RepairScheme>,
}

impl CodeFile {
    pub fn from_code(code: &Code, scheme: Option<&RepairScheme>) -> Self {
        CodeFile {
            params: code.params().clone(),
            matrices: code.matrices().to_vec(),
            scheme: scheme.cloned(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).file()
    }

    /// First singular `C_{u,j}` in `(u, j)` order, 0-based.
    pub fn singular_matrix(&self) -> Option<(usize, usize)> {
        let k = self.params.k;
        self.matrices.iter().position(|c| !c.is_invertible()).map(|idx| (idx / k, idx % k))
    }

    pub fn into_code(self) -> Result<(Code, Option<RepairScheme>)> {
        let code = Code::new(self.params, self.matrices)?;
        if let Some(s) = &self.scheme {
            s.validate(code.params())?;
        }
        Ok((code, self.scheme))
    }

    /// Canonical text: no comments, single spaces, decimal literals.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let f = &p.field;
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        match f.modulus() {
            Some(m) => writeln!(out, "field p={} m={} modulus={:#x}", f.characteristic(), f.degree(), m),
            None => writeln!(out, "field p={} m={}", f.characteristic(), f.degree()),
        }
        .unwrap();
        writeln!(out, "params n={} k={} l={}", p.n, p.k, p.l).unwrap();
        for (idx, c) in self.matrices.iter().enumerate() {
            writeln!(out, "C u={} j={}", idx / p.k + 1, idx % p.k + 1).unwrap();
            write_matrix(&mut out, c);
        }
        match &self.scheme {
            None => {}
            Some(RepairScheme::Constant(ss)) => {
                for (i, s) in ss.iter().enumerate() {
                    writeln!(out, "S i={}", i + 1).unwrap();
                    write_matrix(&mut out, s);
                }
            }
            Some(RepairScheme::PerHelper(per)) => {
                for (i, helpers) in per.iter().enumerate() {
                    let nus = (0..p.n).filter(|&nu| nu != i);
                    for (nu, s) in nus.zip(helpers) {
                        writeln!(out, "S i={} v={}", i + 1, nu + 1).unwrap();
                        write_matrix(&mut out, s);
                    }
                }
            }
        }
        out
    }
}

pub fn write_code_file(code: &Code, scheme: Option<&RepairScheme>) -> String {
    CodeFile::from_code(code, scheme).to_text()
}

pub fn parse_code_file(text: &str) -> Result<CodeFile> {
    CodeFile::parse(text)
}

fn write_matrix(out: &mut String, m: &Matrix) {
    for i in 0..m.rows() {
        write_row(out, m.row(i));
    }
}

fn write_row(out: &mut String, row: &[FieldElement]) {
    let mut first = true;
    for x in row {
        if !first {
            out.push(' ');
        }
        first = false;
        write!(out, "{}", x.value()).unwrap();
    }
    out.push('\n');
}

/// Parse an unsigned literal: decimal or `0x` hex.
pub fn parse_literal(tok: &str) -> Option<u64> {
    match tok.strip_prefix("0x").or_else(|| tok.strip_prefix("0X")) {
        Some(hex) if !hex.is_empty() => u64::from_str_radix(hex, 16).ok(),
        Some(_) => None,
        None if !tok.is_empty() && tok.bytes().all(|b| b.is_ascii_digit()) => tok.parse().ok(),
        None => None,
    }
}

/// Meaningful lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_element(f: &FieldSpec, tok: &str, line: usize) -> Result<FieldElement> {
    let v = parse_literal(tok).ok_or_else(|| Error::parse(line, format!("bad element literal {tok:?}")))?;
    f.elem(v).map_err(|_| Error::parse(line, format!("element {tok} outside {f}")))
}

fn parse_row(f: &FieldSpec, text: &str, width: usize, line: usize) -> Result<Vec<FieldElement>> {
    let row = text.split_whitespace().map(|t| parse_element(f, t, line)).collect::<Result<Vec<_>>>()?;
    if row.len() != width {
        return Err(Error::parse(line, format!("expected {width} elements, found {}", row.len())));
    }
    Ok(row)
}

struct Parser<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(content_lines(text));
        Parser { lines: it.peekable(), last: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.lines.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(Error::parse(self.last + 1, format!("unexpected end of file, expected {what}"))),
        }
    }

    /// `keyword a=1 b=2 ...` with exactly the given keys in order; the keys
    /// listed in `optional` may be omitted from the tail.
    fn directive(
        &mut self,
        keyword: &str,
        keys: &[&str],
        optional: usize,
    ) -> Result<(usize, Vec<Option<u64>>)> {
        let (n, line) = self.next(keyword)?;
        let mut toks = line.split_whitespace();
        if toks.next() != Some(keyword) {
            return Err(Error::parse(n, format!("expected `{keyword}` line")));
        }
        let toks: Vec<&str> = toks.collect();
        if toks.len() > keys.len() || toks.len() < keys.len() - optional {
            return Err(Error::parse(n, format!("`{keyword}` takes {}", keys.join(", "))));
        }
        let mut vals = vec![None; keys.len()];
        for (slot, (tok, key)) in vals.iter_mut().zip(toks.iter().zip(keys)) {
            let v = tok
                .strip_prefix(key)
                .and_then(|t| t.strip_prefix('='))
                .ok_or_else(|| Error::parse(n, format!("expected {key}=<value>, found {tok:?}")))?;
            *slot =
                Some(parse_literal(v).ok_or_else(|| Error::parse(n, format!("bad value for {key}: {v:?}")))?);
        }
        Ok((n, vals))
    }

    fn matrix(&mut self, f: &FieldSpec, rows: usize, cols: usize) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (n, line) = self.next("matrix row")?;
            data.extend(parse_row(f, line, cols, n)?);
        }
        Matrix::from_elements(f, rows, cols, data)
    }

    fn file(mut self) -> Result<CodeFile> {
        let (n, header) = self.next("header")?;
        if header.split_whitespace().collect::<Vec<_>>() != HEADER.split(' ').collect::<Vec<_>>() {
            return Err(Error::parse(n, format!("expected `{HEADER}`")));
        }

        let (n, v) = self.directive("field", &["p", "m", "modulus"], 1)?;
        let (p, m) = (v[0].unwrap(), v[1].unwrap());
        let to_u32 =
            |x: u64, what: &str| u32::try_from(x).map_err(|_| Error::parse(n, format!("{what} too large")));
        let (p, m) = (to_u32(p, "p")?, to_u32(m, "m")?);
        let modulus = v[2].map(|x| to_u32(x, "modulus")).transpose()?;
        if m > 1 && modulus.is_none() {
            return Err(Error::parse(n, "modulus is required when m > 1"));
        }
        if m <= 1 && modulus.is_some() {
            return Err(Error::parse(n, "modulus is only allowed when m > 1"));
        }
        let field = FieldSpec::new(p, m, modulus).map_err(|e| Error::parse(n, e.to_string()))?;

        let (n, v) = self.directive("params", &["n", "k", "l"], 0)?;
        let [nn, k, l] = [v[0].unwrap(), v[1].unwrap(), v[2].unwrap()].map(|x| x as usize);
        if k == 0 || l == 0 || nn <= k {
            return Err(Error::parse(n, "need k ≥ 1, l ≥ 1 and n > k"));
        }
        let params = CodeParams::new(&field, k, nn - k, l).map_err(|e| Error::parse(n, e.to_string()))?;
        let r = params.r;

        let mut matrices = Vec::with_capacity(r * k);
        for u in 1..=r {
            for j in 1..=k {
                let (n, v) = self.directive("C", &["u", "j"], 0)?;
                if v != [Some(u as u64), Some(j as u64)] {
                    return Err(Error::parse(n, format!("expected block C u={u} j={j}")));
                }
                matrices.push(self.matrix(&field, l, l)?);
            }
        }

        let beta = params.beta();
        let scheme = if self.lines.peek().is_none() {
            None
        } else {
            let (n0, v) = self.directive("S", &["i", "v"], 1)?;
            if v[0] != Some(1) {
                return Err(Error::parse(n0, "expected block S i=1"));
            }
            match v[1] {
                None => {
                    let mut ss = vec![self.matrix(&field, beta, l)?];
                    for i in 2..=k {
                        let (n, v) = self.directive("S", &["i", "v"], 1)?;
                        if v != [Some(i as u64), None] {
                            return Err(Error::parse(n, format!("expected block S i={i}")));
                        }
                        ss.push(self.matrix(&field, beta, l)?);
                    }
                    Some(RepairScheme::Constant(ss))
                }
                Some(first) => {
                    let mut per = Vec::with_capacity(k);
                    let mut pending = Some((n0, first));
                    for i in 1..=k {
                        let mut helpers = Vec::with_capacity(nn - 1);
                        for nu in (1..=nn).filter(|&nu| nu != i) {
                            let (n, got_i, got_nu) = match pending.take() {
                                Some((n, first)) => (n, 1, first),
                                None => {
                                    let (n, v) = self.directive("S", &["i", "v"], 0)?;
                                    (n, v[0].unwrap(), v[1].unwrap())
                                }
                            };
                            if (got_i, got_nu) != (i as u64, nu as u64) {
                                return Err(Error::parse(n, format!("expected block S i={i} v={nu}")));
                            }
                            helpers.push(self.matrix(&field, beta, l)?);
                        }
                        per.push(helpers);
                    }
                    Some(RepairScheme::PerHelper(per))
                }
            }
        };
        if let Some((n, _)) = self.lines.next() {
            return Err(Error::parse(n, "trailing content"));
        }
        Ok(CodeFile { params, matrices, scheme })
    }
}

/// Data file: one line of `l` literals per systematic node.
pub fn parse_data_file(text: &str, params: &CodeParams) -> Result<Vec<Vec<FieldElement>>> {
    let mut rows = Vec::with_capacity(params.k);
    let mut last = 0;
    for (n, line) in content_lines(text) {
        last = n;
        if rows.len() == params.k {
            return Err(Error::parse(n, format!("more than k = {} data lines", params.k)));
        }
        rows.push(parse_row(&params.field, line, params.l, n)?);
    }
    if rows.len() != params.k {
        return Err(Error::parse(
            last + 1,
            format!("expected {} data lines, found {}", params.k, rows.len()),
        ));
    }
    Ok(rows)
}

pub fn write_data_file(data: &[Vec<FieldElement>]) -> String {
    let mut out = String::new();
    for row in data {
        write_row(&mut out, row);
    }
    out
}
