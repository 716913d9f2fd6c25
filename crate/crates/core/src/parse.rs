//! Text formats for coefficients, ring elements, matrices, derivations and
//! ring specifications.
//!
//! Expressions are read by recursive descent:
//!
//! ```text
//! sum     := signed (('+' | '-') signed)*
//! signed  := ('+' | '-')* product
//! product := power (('*' | '/' | <juxtaposition>) power)*
//! power   := atom ('^' uint)?
//! atom    := uint | 'x' uint | 'w' | 'i' | '(' sum ')'
//! ```
//!
//! A leading minus applies to the whole product that follows, so `-x1^2`
//! reads as `-(x1^2)`, matching the printed form. Division is only by
//! nonzero constants, which covers rationals like `2/5`. Every error carries
//! the byte offset and the line and column where it was detected.

use std::fmt;
use std::sync::Arc;

use num::BigInt;
use thiserror::Error;

use crate::exactla::Matrix;
use crate::field::{CycloNum, FieldSpec, Rational};
use crate::ring::{RingElem, RingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    /// Variable index outside `1..=n`, or a list of the wrong length.
    Arity,
    /// Well-formed token with no meaning here, such as `i` when 4 ∤ k.
    InvalidLiteral,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Syntax => "syntax error",
            Self::Arity => "arity error",
            Self::InvalidLiteral => "invalid literal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at line {line}, column {column} (byte {offset}): {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(text: &str, offset: usize, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |p| p + 1);
        let column = before[line_start..].chars().count() + 1;
        Self {
            kind,
            offset,
            line,
            column,
            message: message.into(),
        }
    }
}

const MAX_EXPONENT: u32 = 4096;

type Result<T> = std::result::Result<T, ParseError>;

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    end: usize,
    spec: &'a Arc<RingSpec>,
    allow_vars: bool,
}

impl<'a> Parser<'a> {
    fn new(
        text: &'a str,
        start: usize,
        end: usize,
        spec: &'a Arc<RingSpec>,
        allow_vars: bool,
    ) -> Self {
        Self {
            text,
            pos: start,
            end,
            spec,
            allow_vars,
        }
    }

    fn err(&self, offset: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError::at(self.text, offset, kind, message)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.end && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        (self.pos < self.end).then(|| self.text.as_bytes()[self.pos])
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn describe_next(&mut self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(_) => {
                let ch = self.text[self.pos..].chars().next().unwrap_or('?');
                format!("'{ch}'")
            }
        }
    }

    fn digits(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.end && self.text.as_bytes()[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| (start, &self.text[start..self.pos]))
    }

    fn finish(mut self) -> Result<()> {
        if self.peek().is_some() {
            let what = self.describe_next();
            return Err(self.err(
                self.pos,
                ParseErrorKind::Syntax,
                format!("unexpected {what}"),
            ));
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<RingElem> {
        let mut acc = self.signed()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.signed()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.signed()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn signed(&mut self) -> Result<RingElem> {
        let mut negate = false;
        loop {
            if self.eat(b'-') {
                negate = !negate;
            } else if !self.eat(b'+') {
                break;
            }
        }
        let p = self.product()?;
        Ok(if negate { -p } else { p })
    }

    fn starts_atom(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || matches!(c, b'x' | b'w' | b'i' | b'('))
    }

    fn product(&mut self) -> Result<RingElem> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.power()?;
            } else if self.peek() == Some(b'/') {
                self.pos += 1;
                let at = {
                    self.skip_ws();
                    self.pos
                };
                let divisor = self.power()?;
                if !divisor.is_constant() || divisor.is_zero() {
                    return Err(self.err(
                        at,
                        ParseErrorKind::InvalidLiteral,
                        "divisor must be a nonzero constant",
                    ));
                }
                let c = divisor.coefficient_or_zero(&crate::ring::Monomial::one(self.spec.n()));
                let inv = c
                    .inv()
                    .map_err(|e| self.err(at, ParseErrorKind::InvalidLiteral, e.to_string()))?;
                acc = acc.scale(&inv);
            } else if self.starts_atom() {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<RingElem> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let (start, digits) = self.digits().ok_or_else(|| {
                self.err(
                    self.pos,
                    ParseErrorKind::Syntax,
                    "expected an exponent after '^'",
                )
            })?;
            let e: u32 = digits
                .parse()
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| {
                    self.err(
                        start,
                        ParseErrorKind::InvalidLiteral,
                        format!("exponent above {MAX_EXPONENT}"),
                    )
                })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RingElem> {
        let field = self.spec.field();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let (_, digits) = self.digits().expect("digit present");
                let n: BigInt = digits.parse().expect("ascii digits");
                Ok(RingElem::constant(
                    self.spec,
                    CycloNum::from_rational(field, Rational::from_integer(n)),
                ))
            }
            Some(b'x') => {
                let at = self.pos;
                self.pos += 1;
                let (start, digits) = self.digits().ok_or_else(|| {
                    self.err(
                        self.pos,
                        ParseErrorKind::Syntax,
                        "expected a variable index after 'x'",
                    )
                })?;
                if !self.allow_vars {
                    return Err(self.err(
                        at,
                        ParseErrorKind::Syntax,
                        "variables are not allowed here",
                    ));
                }
                let n = self.spec.n();
                match digits.parse::<usize>() {
                    Ok(idx) if (1..=n).contains(&idx) => Ok(RingElem::var(self.spec, idx - 1)),
                    _ => Err(self.err(
                        start,
                        ParseErrorKind::Arity,
                        format!("variable x{digits} outside x1..x{n}"),
                    )),
                }
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(RingElem::constant(self.spec, CycloNum::zeta(field)))
            }
            Some(b'i') => {
                let at = self.pos;
                self.pos += 1;
                let i = CycloNum::imaginary_unit(field).map_err(|_| {
                    self.err(
                        at,
                        ParseErrorKind::InvalidLiteral,
                        format!(
                            "'i' needs a conductor divisible by 4, field has {}",
                            field.conductor()
                        ),
                    )
                })?;
                Ok(RingElem::constant(self.spec, i))
            }
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    let what = self.describe_next();
                    return Err(self.err(
                        self.pos,
                        ParseErrorKind::Syntax,
                        format!("expected ')' to close '(' at byte {open}, found {what}"),
                    ));
                }
                Ok(inner)
            }
            _ => {
                let what = self.describe_next();
                Err(self.err(
                    self.pos,
                    ParseErrorKind::Syntax,
                    format!("expected a term, found {what}"),
                ))
            }
        }
    }
}

fn parse_range(
    text: &str,
    start: usize,
    end: usize,
    spec: &Arc<RingSpec>,
    allow_vars: bool,
) -> Result<RingElem> {
    let mut p = Parser::new(text, start, end, spec, allow_vars);
    let value = p.sum()?;
    p.finish()?;
    Ok(value)
}

/// Parses a ring element and returns it in normal form.
pub fn parse_expression(text: &str, spec: &Arc<RingSpec>) -> Result<RingElem> {
    parse_range(text, 0, text.len(), spec, true)
}

fn scratch_ring(field: &Arc<FieldSpec>) -> Arc<RingSpec> {
    RingSpec::uniform(3, 2, Arc::clone(field)).expect("valid ring")
}

fn coefficient_range(
    text: &str,
    start: usize,
    end: usize,
    ring: &Arc<RingSpec>,
) -> Result<CycloNum> {
    let value = parse_range(text, start, end, ring, false)?;
    Ok(value.coefficient_or_zero(&crate::ring::Monomial::one(ring.n())))
}

/// Parses a field literal such as `2/3*w^2 - 1` or `i`.
pub fn parse_coefficient(text: &str, field: &Arc<FieldSpec>) -> Result<CycloNum> {
    coefficient_range(text, 0, text.len(), &scratch_ring(field))
}

/// Splits `text[start..end]` on `sep`, returning trimmed-free byte ranges.
fn split_ranges(text: &str, start: usize, end: usize, sep: u8) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut from = start;
    for (i, &b) in text.as_bytes()[start..end].iter().enumerate() {
        if b == sep {
            out.push((from, start + i));
            from = start + i + 1;
        }
    }
    out.push((from, end));
    out
}

fn is_blank(text: &str, (a, b): (usize, usize)) -> bool {
    text[a..b].trim().is_empty()
}

fn matrix_range(text: &str, start: usize, end: usize, field: &Arc<FieldSpec>) -> Result<Matrix> {
    let ring = scratch_ring(field);
    let mut rows = split_ranges(text, start, end, b';');
    if rows.len() > 1 && is_blank(text, *rows.last().expect("nonempty")) {
        rows.pop();
    }
    let mut entries = Vec::with_capacity(rows.len());
    for &(a, b) in &rows {
        let row = split_ranges(text, a, b, b',')
            .into_iter()
            .map(|(s, e)| coefficient_range(text, s, e, &ring))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = entries.first().map(Vec::len) {
            if row.len() != first {
                return Err(ParseError::at(
                    text,
                    a,
                    ParseErrorKind::Arity,
                    format!("row has {} entries, expected {first}", row.len()),
                ));
            }
        }
        entries.push(row);
    }
    Ok(Matrix::from_rows(field, entries).expect("rows have equal length"))
}

/// Parses `a, b; c, d` (rows separated by `;`, entries by `,`).
pub fn parse_matrix(text: &str, field: &Arc<FieldSpec>) -> Result<Matrix> {
    matrix_range(text, 0, text.len(), field)
}

fn images_range(
    text: &str,
    start: usize,
    end: usize,
    spec: &Arc<RingSpec>,
) -> Result<Vec<RingElem>> {
    let n = spec.n();
    let mut images: Vec<Option<RingElem>> = vec![None; n];
    for (a, b) in split_ranges(text, start, end, b';') {
        if is_blank(text, (a, b)) {
            continue;
        }
        let mut p = Parser::new(text, a, b, spec, true);
        let expect = |p: &mut Parser<'_>, c: u8| -> Result<()> {
            if p.eat(c) {
                Ok(())
            } else {
                let what = p.describe_next();
                Err(p.err(
                    p.pos,
                    ParseErrorKind::Syntax,
                    format!("expected '{}', found {what}", c as char),
                ))
            }
        };
        expect(&mut p, b'd')?;
        expect(&mut p, b'(')?;
        expect(&mut p, b'x')?;
        let (idx_at, digits) = p
            .digits()
            .ok_or_else(|| p.err(p.pos, ParseErrorKind::Syntax, "expected a variable index"))?;
        let idx = match digits.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => i - 1,
            _ => {
                return Err(p.err(
                    idx_at,
                    ParseErrorKind::Arity,
                    format!("variable x{digits} outside x1..x{n}"),
                ));
            }
        };
        expect(&mut p, b')')?;
        expect(&mut p, b'=')?;
        let value = p.sum()?;
        p.finish()?;
        if images[idx].is_some() {
            return Err(ParseError::at(
                text,
                a,
                ParseErrorKind::Syntax,
                format!("d(x{}) given twice", idx + 1),
            ));
        }
        images[idx] = Some(value);
    }
    Ok(images
        .into_iter()
        .map(|v| v.unwrap_or_else(|| RingElem::zero(spec)))
        .collect())
}

/// Parses `d(x1)=<expr>; ...`; generators not mentioned map to zero.
pub fn parse_images(text: &str, spec: &Arc<RingSpec>) -> Result<Vec<RingElem>> {
    images_range(text, 0, text.len(), spec)
}

/// A derivation as written, before any well-definedness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationText {
    Matrix(Matrix),
    Images(Vec<RingElem>),
}

/// Parses `matrix: <rows>` or `images: <list>`.
pub fn parse_derivation(text: &str, spec: &Arc<RingSpec>) -> Result<DerivationText> {
    let lead = text.len() - text.trim_start().len();
    let rest = &text[lead..];
    for (prefix, is_matrix) in [("matrix:", true), ("images:", false)] {
        if rest.starts_with(prefix) {
            let start = lead + prefix.len();
            return if is_matrix {
                matrix_range(text, start, text.len(), spec.field()).map(DerivationText::Matrix)
            } else {
                images_range(text, start, text.len(), spec).map(DerivationText::Images)
            };
        }
    }
    Err(ParseError::at(
        text,
        lead,
        ParseErrorKind::Syntax,
        "expected 'matrix:' or 'images:'",
    ))
}

/// Parses `n=<n>;m=<m1,..,mn>;field=<k>`; `field` defaults to 4.
pub fn parse_ring_spec(text: &str) -> Result<Arc<RingSpec>> {
    let mut n: Option<(usize, usize)> = None;
    let mut m: Option<(usize, Vec<u32>)> = None;
    let mut field: Option<(usize, u32)> = None;
    for (a, b) in split_ranges(text, 0, text.len(), b';') {
        if is_blank(text, (a, b)) {
            continue;
        }
        let part = &text[a..b];
        let Some(eq) = part.find('=') else {
            return Err(ParseError::at(
                text,
                a,
                ParseErrorKind::Syntax,
                "expected key=value",
            ));
        };
        let key = part[..eq].trim();
        let value_at = a + eq + 1;
        let number = |s: &str, at: usize| -> Result<u64> {
            s.trim().parse::<u64>().map_err(|_| {
                ParseError::at(
                    text,
                    at,
                    ParseErrorKind::Syntax,
                    format!("expected a positive integer, found '{}'", s.trim()),
                )
            })
        };
        let duplicate = || {
            ParseError::at(
                text,
                a,
                ParseErrorKind::Syntax,
                format!("key '{key}' given twice"),
            )
        };
        match key {
            "n" => {
                if n.is_some() {
                    return Err(duplicate());
                }
                let v = number(&text[value_at..b], value_at)?;
                n = Some((a, usize::try_from(v).unwrap_or(usize::MAX)));
            }
            "m" => {
                if m.is_some() {
                    return Err(duplicate());
                }
                let list = split_ranges(text, value_at, b, b',')
                    .into_iter()
                    .map(|(s, e)| {
                        let v = number(&text[s..e], s)?;
                        u32::try_from(v).map_err(|_| {
                            ParseError::at(
                                text,
                                s,
                                ParseErrorKind::InvalidLiteral,
                                "exponent too large",
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                m = Some((a, list));
            }
            "field" => {
                if field.is_some() {
                    return Err(duplicate());
                }
                let v = number(&text[value_at..b], value_at)?;
                let k = u32::try_from(v).map_err(|_| {
                    ParseError::at(
                        text,
                        value_at,
                        ParseErrorKind::InvalidLiteral,
                        "conductor too large",
                    )
                })?;
                field = Some((value_at, k));
            }
            _ => {
                return Err(ParseError::at(
                    text,
                    a,
                    ParseErrorKind::Syntax,
                    format!("unknown key '{key}', expected n, m or field"),
                ))
            }
        }
    }
    let (m_at, exponents) =
        m.ok_or_else(|| ParseError::at(text, text.len(), ParseErrorKind::Syntax, "missing m=..."))?;
    if let Some((n_at, n)) = n {
        if n != exponents.len() {
            return Err(ParseError::at(
                text,
                n_at.max(m_at).min(text.len()),
                ParseErrorKind::Arity,
                format!("n={n} but m lists {} exponents", exponents.len()),
            ));
        }
    }
    let (field_at, k) = field.unwrap_or((text.len(), 4));
    let field = FieldSpec::new(k).map_err(|e| {
        ParseError::at(
            text,
            field_at,
            ParseErrorKind::InvalidLiteral,
            e.to_string(),
        )
    })?;
    RingSpec::new(exponents, field)
        .map_err(|e| ParseError::at(text, m_at, ParseErrorKind::InvalidLiteral, e.to_string()))
}
