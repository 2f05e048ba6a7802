//! The TDE1 text formats for systems and solutions.
//!
//! System files: a header `TDE1 (linear|nonlinear) n=<INT> r=<INT>`, then one
//! equation per line. Linear terms are `COEF x<i>^<j>` joined by " ; " with an
//! optional `free COEF`; nonlinear monomials are `COEF(*x<i>^<j>)*`, a bare
//! `COEF` being a free monomial. `COEF` is a decimal or `inf`; `#` starts a
//! comment. Solution files carry one line per variable:
//! `x<i>: empty` or `x<i>: fin <elements...> tail (<INT>|none)`.
//!
//! Serialization is canonical (sorted slots, single spaces, trailing
//! newline); canonical files round-trip byte-identically.

use std::fmt;

use tropdiff_core::{
    ExtNat, LinearEquation, LinearSystem, Monomial, NonlinearEquation, NonlinearSystem, Slot,
    Support,
};

/// A syntax or range error, with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> FormatError {
        FormatError { line, col, message: message.into() }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for FormatError {}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ParsedSystem {
    Linear(LinearSystem),
    Nonlinear(NonlinearSystem),
}

impl ParsedSystem {
    pub fn n(&self) -> usize {
        match self {
            ParsedSystem::Linear(s) => s.n(),
            ParsedSystem::Nonlinear(s) => s.n(),
        }
    }

    pub fn r(&self) -> u64 {
        match self {
            ParsedSystem::Linear(s) => s.r(),
            ParsedSystem::Nonlinear(s) => s.r(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            ParsedSystem::Linear(s) => s.k(),
            ParsedSystem::Nonlinear(s) => s.k(),
        }
    }
}

/// The comment-stripped content of each line, keeping 1-based line numbers
/// and the original text for column reporting.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if content.trim().is_empty() {
            None
        } else {
            Some((idx + 1, content))
        }
    })
}

/// Whitespace-separated tokens of a line with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| {
        let col = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
        (col, tok)
    })
}

fn parse_coef(line: usize, col: usize, token: &str) -> Result<ExtNat, FormatError> {
    token
        .parse::<ExtNat>()
        .map_err(|_| FormatError::new(line, col, format!("expected a coefficient or \"inf\", got {token:?}")))
}

/// Parses `x<i>^<j>` and validates it against the declared dimensions.
fn parse_slot(line: usize, col: usize, token: &str, n: usize, r: u64) -> Result<Slot, FormatError> {
    let bad = || FormatError::new(line, col, format!("expected a slot like \"x1^0\", got {token:?}"));
    let rest = token.strip_prefix('x').ok_or_else(bad)?;
    let (var_text, order_text) = rest.split_once('^').ok_or_else(bad)?;
    let var: usize = var_text.parse().map_err(|_| bad())?;
    let order: u64 = order_text.parse().map_err(|_| bad())?;
    if var == 0 || var > n {
        return Err(FormatError::new(
            line,
            col,
            format!("variable x{var} out of range (n={n})"),
        ));
    }
    if order > r {
        return Err(FormatError::new(line, col, format!("order {order} > r={r}")));
    }
    Ok(Slot::new(var - 1, order))
}

struct Header {
    linear: bool,
    n: usize,
    r: u64,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header, FormatError> {
    let toks: Vec<(usize, &str)> = tokens(line).collect();
    let expect = |idx: usize| -> Result<(usize, &str), FormatError> {
        toks.get(idx).copied().ok_or_else(|| {
            FormatError::new(line_no, line.len() + 1, "incomplete header; expected \"TDE1 (linear|nonlinear) n=<INT> r=<INT>\"")
        })
    };
    let (col, magic) = expect(0)?;
    if magic != "TDE1" {
        return Err(FormatError::new(line_no, col, format!("expected \"TDE1\", got {magic:?}")));
    }
    let (col, kind) = expect(1)?;
    let linear = match kind {
        "linear" => true,
        "nonlinear" => false,
        other => {
            return Err(FormatError::new(
                line_no,
                col,
                format!("expected \"linear\" or \"nonlinear\", got {other:?}"),
            ))
        }
    };
    let (col, n_tok) = expect(2)?;
    let n: usize = n_tok
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| FormatError::new(line_no, col, format!("expected \"n=<INT>\", got {n_tok:?}")))?;
    let (col, r_tok) = expect(3)?;
    let r: u64 = r_tok
        .strip_prefix("r=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| FormatError::new(line_no, col, format!("expected \"r=<INT>\", got {r_tok:?}")))?;
    if let Some(&(col, extra)) = toks.get(4) {
        return Err(FormatError::new(line_no, col, format!("unexpected token {extra:?} after the header")));
    }
    Ok(Header { linear, n, r })
}

fn parse_linear_equation(
    line_no: usize,
    line: &str,
    n: usize,
    r: u64,
) -> Result<LinearEquation, FormatError> {
    let mut terms: Vec<(Slot, ExtNat)> = Vec::new();
    let mut free = ExtNat::Inf;
    for segment in split_segments(line) {
        let toks: Vec<(usize, &str)> = tokens(segment).collect();
        match toks.as_slice() {
            [(col, "free"), (coef_col, coef)] => {
                let _ = col;
                free = free.min(parse_coef(line_no, *coef_col, coef)?);
            }
            [(coef_col, coef), (slot_col, slot_tok)] => {
                let coef = parse_coef(line_no, *coef_col, coef)?;
                let slot = parse_slot(line_no, *slot_col, slot_tok, n, r)?;
                terms.push((slot, coef));
            }
            [] => {
                return Err(FormatError::new(line_no, 1, "empty term between separators"));
            }
            [(col, tok), ..] => {
                return Err(FormatError::new(
                    line_no,
                    *col,
                    format!("expected \"COEF x<i>^<j>\" or \"free COEF\", got a term starting with {tok:?}"),
                ));
            }
        }
    }
    Ok(LinearEquation::new(terms, free))
}

fn parse_nonlinear_equation(
    line_no: usize,
    line: &str,
    n: usize,
    r: u64,
) -> Result<NonlinearEquation, FormatError> {
    let mut monomials: Vec<Monomial> = Vec::new();
    for segment in split_segments(line) {
        let toks: Vec<(usize, &str)> = tokens(segment).collect();
        match toks.as_slice() {
            // "free COEF" is accepted as an alias for a bare coefficient.
            [(_, "free"), (coef_col, coef)] => {
                if let ExtNat::Fin(c) = parse_coef(line_no, *coef_col, coef)? {
                    monomials.push(Monomial::new(c, []));
                }
            }
            [(col, tok)] => {
                let mut parts = tok.split('*');
                let coef_text = parts.next().expect("split yields at least one part");
                let coef = parse_coef(line_no, *col, coef_text)?;
                let mut factors = Vec::new();
                for part in parts {
                    let part_col = col + (part.as_ptr() as usize - tok.as_ptr() as usize);
                    factors.push(parse_slot(line_no, part_col, part, n, r)?);
                }
                if let ExtNat::Fin(c) = coef {
                    monomials.push(Monomial::new(c, factors));
                }
            }
            [] => {
                return Err(FormatError::new(line_no, 1, "empty monomial between separators"));
            }
            [(col, tok), ..] => {
                return Err(FormatError::new(
                    line_no,
                    *col,
                    format!("expected one monomial token, got extra input after {tok:?}"),
                ));
            }
        }
    }
    Ok(NonlinearEquation::new(monomials))
}

/// Semicolon-separated segments; the canonical separator is " ; ".
fn split_segments(line: &str) -> impl Iterator<Item = &str> {
    line.split(';')
}

pub fn parse_system_str(text: &str) -> Result<ParsedSystem, FormatError> {
    let mut lines = significant_lines(text);
    let (line_no, header_line) = lines
        .next()
        .ok_or_else(|| FormatError::new(1, 1, "missing header line"))?;
    let header = parse_header(line_no, header_line)?;

    if header.linear {
        let mut equations = Vec::new();
        for (line_no, line) in lines {
            equations.push(parse_linear_equation(line_no, line, header.n, header.r)?);
        }
        let system = LinearSystem::new(header.n, header.r, equations)
            .expect("slots validated during parsing");
        Ok(ParsedSystem::Linear(system))
    } else {
        let mut equations = Vec::new();
        for (line_no, line) in lines {
            equations.push(parse_nonlinear_equation(line_no, line, header.n, header.r)?);
        }
        let system = NonlinearSystem::new(header.n, header.r, equations)
            .expect("slots validated during parsing");
        Ok(ParsedSystem::Nonlinear(system))
    }
}

pub fn serialize_linear(system: &LinearSystem) -> String {
    let mut out = format!("TDE1 linear n={} r={}\n", system.n(), system.r());
    for eq in system.equations() {
        let mut parts: Vec<String> = eq
            .terms()
            .map(|(slot, coeff)| format!("{coeff} {slot}"))
            .collect();
        if let ExtNat::Fin(free) = eq.free() {
            parts.push(format!("free {free}"));
        }
        if parts.is_empty() {
            // An equation with no finite term at all.
            parts.push("free inf".to_string());
        }
        out.push_str(&parts.join(" ; "));
        out.push('\n');
    }
    out
}

pub fn serialize_nonlinear(system: &NonlinearSystem) -> String {
    let mut out = format!("TDE1 nonlinear n={} r={}\n", system.n(), system.r());
    for eq in system.equations() {
        if eq.monomials().is_empty() {
            out.push_str("inf\n");
            continue;
        }
        let parts: Vec<String> = eq.monomials().iter().map(|m| m.to_string()).collect();
        out.push_str(&parts.join(" ; "));
        out.push('\n');
    }
    out
}

pub fn serialize_system(system: &ParsedSystem) -> String {
    match system {
        ParsedSystem::Linear(s) => serialize_linear(s),
        ParsedSystem::Nonlinear(s) => serialize_nonlinear(s),
    }
}

pub fn parse_solution_str(text: &str) -> Result<Vec<Support>, FormatError> {
    let mut supports = Vec::new();
    for (line_no, line) in significant_lines(text) {
        let toks: Vec<(usize, &str)> = tokens(line).collect();
        let (col, head) = *toks
            .first()
            .ok_or_else(|| FormatError::new(line_no, 1, "empty solution line"))?;
        let var: usize = head
            .strip_prefix('x')
            .and_then(|v| v.strip_suffix(':'))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                FormatError::new(line_no, col, format!("expected \"x<i>:\", got {head:?}"))
            })?;
        if var != supports.len() + 1 {
            return Err(FormatError::new(
                line_no,
                col,
                format!("expected x{}, got x{var} (lines must be consecutive from x1)", supports.len() + 1),
            ));
        }
        let body = &toks[1..];
        match body {
            [(_, "empty")] => supports.push(Support::empty()),
            [(_, "fin"), rest @ ..] => {
                let mut elements: Vec<u64> = Vec::new();
                let mut iter = rest.iter();
                let mut tail_token: Option<(usize, &str)> = None;
                for &(col, tok) in iter.by_ref() {
                    if tok == "tail" {
                        tail_token = iter.next().copied();
                        if tail_token.is_none() {
                            return Err(FormatError::new(
                                line_no,
                                col,
                                "expected an integer or \"none\" after \"tail\"",
                            ));
                        }
                        if let Some(&(extra_col, extra)) = iter.next() {
                            return Err(FormatError::new(
                                line_no,
                                extra_col,
                                format!("unexpected token {extra:?} after the tail"),
                            ));
                        }
                        break;
                    }
                    let element: u64 = tok.parse().map_err(|_| {
                        FormatError::new(line_no, col, format!("expected an element or \"tail\", got {tok:?}"))
                    })?;
                    elements.push(element);
                }
                let (tail_col, tail_tok) = tail_token.ok_or_else(|| {
                    FormatError::new(line_no, line.len() + 1, "missing \"tail\" marker")
                })?;
                let tail = match tail_tok {
                    "none" => None,
                    value => Some(value.parse::<u64>().map_err(|_| {
                        FormatError::new(line_no, tail_col, format!("expected an integer or \"none\", got {value:?}"))
                    })?),
                };
                supports.push(Support::new(elements, tail));
            }
            [] => return Err(FormatError::new(line_no, col, "expected \"empty\" or \"fin ...\"")),
            [(col, tok), ..] => {
                return Err(FormatError::new(
                    line_no,
                    *col,
                    format!("expected \"empty\" or \"fin\", got {tok:?}"),
                ))
            }
        }
    }
    Ok(supports)
}

pub fn serialize_solution(supports: &[Support]) -> String {
    let mut out = String::new();
    for (idx, support) in supports.iter().enumerate() {
        out.push_str(&format!("x{}: ", idx + 1));
        if support.is_empty() {
            out.push_str("empty");
        } else {
            out.push_str("fin");
            for element in support.finite_part() {
                out.push_str(&format!(" {element}"));
            }
            match support.tail() {
                Some(m) => out.push_str(&format!(" tail {m}")),
                None => out.push_str(" tail none"),
            }
        }
        out.push('\n');
    }
    out
}
