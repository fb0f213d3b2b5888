//! CPLEX LP text format.
//!
//! The writer emits one row per line (wrapped when long), coefficients in
//! shortest round-trip exponent form with the sign as its own token. The
//! reader accepts the subset of the format produced here plus the usual
//! spellings of section keywords and comparison operators.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::model::{Constraint, LpModel, VarRole};
use crate::error::{Error, Result};

const WRAP: usize = 200;

struct LineBuf {
    out: String,
    line_len: usize,
}

impl LineBuf {
    fn push_token(&mut self, tok: &str) {
        if self.line_len + tok.len() + 1 > WRAP {
            self.out.push('\n');
            self.out.push_str("   ");
            self.line_len = 3;
        }
        self.out.push(' ');
        self.out.push_str(tok);
        self.line_len += tok.len() + 1;
    }

    fn start(&mut self, head: &str) {
        self.out.push_str(head);
        self.line_len = head.len();
    }

    fn end_line(&mut self) {
        self.out.push('\n');
        self.line_len = 0;
    }

    fn terms(&mut self, names: &[String], coeffs: impl Iterator<Item = (usize, f64)>) {
        let mut any = false;
        for (k, c) in coeffs {
            self.push_token(if c < 0.0 { "-" } else { "+" });
            self.push_token(&format!("{:e}", c.abs()));
            self.push_token(&names[k]);
            any = true;
        }
        if !any {
            // a row without terms still needs a left-hand side
            self.push_token("0");
            self.push_token(&names[0]);
        }
    }
}

/// Renders `model` as LP text.
pub fn write_lp_string(model: &LpModel) -> Result<String> {
    if model.objective.iter().all(|&c| c == 0.0) {
        return Err(Error::InvalidArgument(format!("model '{}' has an empty objective", model.name)));
    }
    if model.num_vars == 0 || model.var_map.len() != model.num_vars {
        return Err(Error::InvalidArgument("variable map does not cover every column".into()));
    }
    let names = model.var_names();
    let mut buf = LineBuf {
        out: String::new(),
        line_len: 0,
    };
    let _ = writeln!(buf.out, "\\ {}", model.name);
    buf.out.push_str("Minimize\n");
    buf.start(" obj:");
    buf.terms(
        &names,
        model.objective.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(k, c)| (k, *c)),
    );
    buf.end_line();
    buf.out.push_str("Subject To\n");
    let rows = model.eq_rows.iter().map(|r| (r, "=")).chain(model.ineq_rows.iter().map(|r| (r, ">=")));
    for (row, op) in rows {
        buf.start(&format!(" {}:", row.name));
        buf.terms(&names, row.coeffs.iter().copied());
        buf.push_token(op);
        buf.push_token(&format!("{:e}", row.rhs));
        buf.end_line();
    }
    let free: Vec<&String> = names
        .iter()
        .zip(&model.var_lower_bounds)
        .filter(|(_, lb)| **lb == f64::NEG_INFINITY)
        .map(|(n, _)| n)
        .collect();
    if !free.is_empty() {
        buf.out.push_str("Bounds\n");
        for name in free {
            let _ = writeln!(buf.out, " {name} free");
        }
    }
    buf.out.push_str("End\n");
    Ok(buf.out)
}

pub fn write_lp_file(model: &LpModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_lp_string(model)?)?;
    Ok(())
}

pub fn read_lp_file(path: impl AsRef<Path>) -> Result<LpModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_lp(&text, path)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cmp {
    Le,
    Ge,
    Eq,
}

struct Tok<'a> {
    text: &'a str,
    line: usize,
}

/// A parsed row before variables are numbered.
struct RawRow {
    name: Option<String>,
    terms: Vec<(String, f64)>,
    cmp: Cmp,
    rhs: f64,
    line: usize,
}

/// Parses LP text; `path` is only used in error messages.
pub fn parse_lp(text: &str, path: &Path) -> Result<LpModel> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut name = String::from("lp");
    let mut toks = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        if ln == 0 {
            if let Some(rest) = raw.trim_start().strip_prefix('\\') {
                let rest = rest.trim();
                let rest = rest.strip_prefix("Problem name:").map(str::trim).unwrap_or(rest);
                if !rest.is_empty() {
                    name = rest.to_string();
                }
            }
        }
        let body = raw.split('\\').next().unwrap_or("");
        toks.extend(split_tokens(body).into_iter().map(|text| Tok { text, line: ln + 1 }));
    }

    let mut section: Option<Section> = None;
    let mut sense_max = false;
    let mut objective: Vec<(String, f64)> = Vec::new();
    let mut rows: Vec<RawRow> = Vec::new();
    let mut free: BTreeSet<String> = BTreeSet::new();
    let mut seen_end = false;

    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        let lower = t.text.to_ascii_lowercase();
        let next_lower = toks.get(i + 1).map(|t| t.text.to_ascii_lowercase());
        match lower.as_str() {
            "minimize" | "minimise" | "minimum" | "min" => {
                section = Some(Section::Objective);
                i += 1;
                continue;
            }
            "maximize" | "maximise" | "maximum" | "max" => {
                section = Some(Section::Objective);
                sense_max = true;
                i += 1;
                continue;
            }
            "subject" | "such" if next_lower.as_deref() == Some("to") || next_lower.as_deref() == Some("that") => {
                section = Some(Section::Constraints);
                i += 2;
                continue;
            }
            "st" | "s.t." | "st." => {
                section = Some(Section::Constraints);
                i += 1;
                continue;
            }
            "bounds" | "bound" => {
                section = Some(Section::Bounds);
                i += 1;
                continue;
            }
            "general" | "generals" | "gen" | "binary" | "binaries" | "bin" | "semi-continuous" | "sos" => {
                return Err(err(t.line, format!("section '{}' is not supported", t.text)));
            }
            "end" => {
                seen_end = true;
                break;
            }
            _ => {}
        }
        let Some(sec) = section else {
            return Err(err(t.line, format!("unexpected token '{}' before the objective", t.text)));
        };
        // each item runs until the next section keyword or the next label
        let start = i;
        let end = if sec == Section::Constraints {
            row_end(&toks, i)
        } else {
            let mut end = i + 1;
            while end < toks.len() && !ends_item(&toks, end, sec) {
                end += 1;
            }
            end
        };
        let item = &toks[start..end];
        match sec {
            Section::Objective => {
                let (_, body) = split_label(item);
                objective.extend(parse_terms(body, &err)?);
            }
            Section::Constraints => rows.push(parse_row(item, &err)?),
            Section::Bounds => parse_bound(item, &mut free, &err)?,
        }
        i = end;
    }
    if !seen_end {
        return Err(err(text.lines().count().max(1), "missing 'End'".into()));
    }
    if objective.is_empty() {
        return Err(err(1, "empty objective".into()));
    }

    let mut all_names: BTreeSet<VarRole> = BTreeSet::new();
    let mut role_of: HashMap<String, VarRole> = HashMap::new();
    let mut register = |n: &str, line: usize| -> Result<()> {
        if !role_of.contains_key(n) {
            let role: VarRole = n.parse().map_err(|e: Error| err(line, e.to_string()))?;
            role_of.insert(n.to_string(), role);
            all_names.insert(role);
        }
        Ok(())
    };
    for (n, _) in &objective {
        register(n, 1)?;
    }
    for r in &rows {
        for (n, _) in &r.terms {
            register(n, r.line)?;
        }
    }
    for n in &free {
        register(n, 1)?;
    }
    let var_map: Vec<VarRole> = all_names.into_iter().collect();
    let index: HashMap<VarRole, usize> = var_map.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let col = |n: &str| index[&role_of[n]];

    let num_vars = var_map.len();
    let mut obj = vec![0.0; num_vars];
    for (n, c) in &objective {
        obj[col(n)] += if sense_max { -c } else { *c };
    }
    let mut lower = vec![0.0; num_vars];
    for n in &free {
        lower[col(n)] = f64::NEG_INFINITY;
    }

    let mut eq_rows = Vec::new();
    let mut ineq_rows = Vec::new();
    for (k, r) in rows.into_iter().enumerate() {
        let mut acc: Vec<(usize, f64)> = Vec::with_capacity(r.terms.len());
        for (n, c) in &r.terms {
            let j = col(n);
            match acc.iter_mut().find(|(jj, _)| *jj == j) {
                Some(e) => e.1 += c,
                None => acc.push((j, *c)),
            }
        }
        acc.retain(|(_, c)| *c != 0.0);
        acc.sort_by_key(|(j, _)| *j);
        let name = r.name.unwrap_or_else(|| format!("r{k}"));
        match r.cmp {
            Cmp::Eq => eq_rows.push(Constraint { name, coeffs: acc, rhs: r.rhs }),
            Cmp::Ge => ineq_rows.push(Constraint { name, coeffs: acc, rhs: r.rhs }),
            Cmp::Le => ineq_rows.push(Constraint {
                name,
                coeffs: acc.into_iter().map(|(j, c)| (j, -c)).collect(),
                rhs: -r.rhs,
            }),
        }
    }

    Ok(LpModel {
        name,
        num_vars,
        objective: obj,
        eq_rows,
        ineq_rows,
        var_lower_bounds: lower,
        var_map,
    })
}

/// Splits on whitespace and isolates `:` and comparison operators.
fn split_tokens(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for word in line.split_whitespace() {
        let mut rest = word;
        while !rest.is_empty() {
            let cut = rest
                .char_indices()
                .find(|(_, c)| matches!(c, ':' | '<' | '>' | '='))
                .map(|(p, _)| p);
            match cut {
                None => {
                    out.push(rest);
                    rest = "";
                }
                Some(0) => {
                    let len = rest
                        .char_indices()
                        .take_while(|(_, c)| matches!(c, '<' | '>' | '='))
                        .count()
                        .max(1);
                    out.push(&rest[..len]);
                    rest = &rest[len..];
                }
                Some(p) => {
                    out.push(&rest[..p]);
                    rest = &rest[p..];
                }
            }
        }
    }
    out
}

fn is_keyword(toks: &[Tok<'_>], k: usize) -> bool {
    let lower = toks[k].text.to_ascii_lowercase();
    let next = toks.get(k + 1).map(|t| t.text.to_ascii_lowercase());
    matches!(
        lower.as_str(),
        "minimize" | "minimise" | "minimum" | "min" | "maximize" | "maximise" | "maximum" | "max" | "st" | "s.t."
            | "st." | "bounds" | "bound" | "general" | "generals" | "gen" | "binary" | "binaries" | "bin" | "end"
    ) || (matches!(lower.as_str(), "subject" | "such") && matches!(next.as_deref(), Some("to") | Some("that")))
}

fn ends_item(toks: &[Tok<'_>], k: usize, sec: Section) -> bool {
    if is_keyword(toks, k) {
        return true;
    }
    match sec {
        Section::Objective | Section::Constraints => toks.get(k + 1).is_some_and(|t| t.text == ":"),
        // one bound per line
        Section::Bounds => toks[k].line != toks[k - 1].line,
    }
}

/// End of the constraint starting at `start`: just past the right-hand side.
fn row_end(toks: &[Tok<'_>], start: usize) -> usize {
    let mut k = start;
    while k < toks.len() && parse_cmp(toks[k].text).is_none() {
        if k > start && ends_item(toks, k, Section::Constraints) {
            return k;
        }
        k += 1;
    }
    k += 1;
    while k < toks.len() && matches!(toks[k].text, "+" | "-") {
        k += 1;
    }
    (k + 1).min(toks.len())
}

fn split_label<'t, 'a>(item: &'t [Tok<'a>]) -> (Option<&'a str>, &'t [Tok<'a>]) {
    if item.len() >= 2 && item[1].text == ":" {
        (Some(item[0].text), &item[2..])
    } else {
        (None, item)
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let lower = s.to_ascii_lowercase();
    match lower.as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

fn parse_terms<E>(toks: &[Tok<'_>], err: &E) -> Result<Vec<(String, f64)>>
where
    E: Fn(usize, String) -> Error,
{
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for t in toks {
        match t.text {
            "+" => {}
            "-" => sign = -sign,
            s => {
                if let Some(v) = parse_number(s).filter(|v| v.is_finite()) {
                    if coef.is_some() {
                        return Err(err(t.line, format!("two numbers in a row near '{s}'")));
                    }
                    coef = Some(v);
                } else if s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
                    out.push((s.to_string(), sign * coef.unwrap_or(1.0)));
                    sign = 1.0;
                    coef = None;
                } else {
                    return Err(err(t.line, format!("unexpected token '{s}'")));
                }
            }
        }
    }
    if let Some(t) = toks.last().filter(|_| coef.is_some()) {
        return Err(err(t.line, "constant terms on the left-hand side are not supported".into()));
    }
    Ok(out)
}

fn parse_cmp(s: &str) -> Option<Cmp> {
    match s {
        "<=" | "=<" | "<" => Some(Cmp::Le),
        ">=" | "=>" | ">" => Some(Cmp::Ge),
        "=" => Some(Cmp::Eq),
        _ => None,
    }
}

/// Reads an optionally signed number starting at `toks[0]`.
fn parse_signed<E>(toks: &[Tok<'_>], err: &E) -> Result<(f64, usize)>
where
    E: Fn(usize, String) -> Error,
{
    let mut sign = 1.0;
    for (k, t) in toks.iter().enumerate() {
        match t.text {
            "+" => {}
            "-" => sign = -sign,
            s => {
                let v = parse_number(s).ok_or_else(|| err(t.line, format!("expected a number, found '{s}'")))?;
                return Ok((sign * v, k + 1));
            }
        }
    }
    let line = toks.last().map_or(0, |t| t.line);
    Err(err(line, "expected a number".into()))
}

fn parse_row<E>(item: &[Tok<'_>], err: &E) -> Result<RawRow>
where
    E: Fn(usize, String) -> Error,
{
    let line = item[0].line;
    let (label, body) = split_label(item);
    let pos = body
        .iter()
        .position(|t| parse_cmp(t.text).is_some())
        .ok_or_else(|| err(line, "constraint without a comparison operator".into()))?;
    let cmp = parse_cmp(body[pos].text).unwrap();
    let terms = parse_terms(&body[..pos], err)?;
    let (rhs, used) = parse_signed(&body[pos + 1..], err)?;
    if pos + 1 + used != body.len() {
        return Err(err(body[pos + 1 + used].line, "trailing tokens after right-hand side".into()));
    }
    if !rhs.is_finite() {
        return Err(err(line, "infinite right-hand side".into()));
    }
    Ok(RawRow {
        name: label.map(str::to_string),
        terms,
        cmp,
        rhs,
        line,
    })
}

fn parse_bound<E>(item: &[Tok<'_>], free: &mut BTreeSet<String>, err: &E) -> Result<()>
where
    E: Fn(usize, String) -> Error,
{
    let line = item[0].line;
    let texts: Vec<String> = item.iter().map(|t| t.text.to_ascii_lowercase()).collect();
    let unsupported = || err(line, "only 'free' and lower bounds of 0 or -inf are supported".into());
    let lower_ok = |v: f64| v == 0.0 || v == f64::NEG_INFINITY;
    let mark = |free: &mut BTreeSet<String>, name: &str, v: f64| {
        if v == f64::NEG_INFINITY {
            free.insert(name.to_string());
        } else {
            free.remove(name);
        }
    };

    match texts.as_slice() {
        [_, f] if f == "free" => {
            free.insert(item[0].text.to_string());
            Ok(())
        }
        _ => {
            // `x >= l`, `l <= x`, or `l <= x <= inf`
            if let Some(pos) = item.iter().position(|t| parse_cmp(t.text).is_some()) {
                let name_first = parse_number(item[0].text).is_none() && !matches!(item[0].text, "+" | "-");
                if pos == 1 && name_first {
                    let (v, used) = parse_signed(&item[2..], err)?;
                    if item.len() != 2 + used {
                        return Err(unsupported());
                    }
                    return match parse_cmp(item[1].text) {
                        Some(Cmp::Ge) if lower_ok(v) => {
                            mark(free, item[0].text, v);
                            Ok(())
                        }
                        Some(Cmp::Le) if v == f64::INFINITY => Ok(()),
                        _ => Err(unsupported()),
                    };
                }
                let (v, used) = parse_signed(&item[..pos], err)?;
                if used != pos || parse_cmp(item[pos].text) != Some(Cmp::Le) || !lower_ok(v) {
                    return Err(unsupported());
                }
                let name = item.get(pos + 1).ok_or_else(unsupported)?.text;
                match &item[pos + 2..] {
                    [] => {}
                    [op, rest @ ..] if parse_cmp(op.text) == Some(Cmp::Le) => {
                        let (u, used) = parse_signed(rest, err)?;
                        if u != f64::INFINITY || used != rest.len() {
                            return Err(unsupported());
                        }
                    }
                    _ => return Err(unsupported()),
                }
                mark(free, name, v);
                Ok(())
            } else {
                Err(unsupported())
            }
        }
    }
}
