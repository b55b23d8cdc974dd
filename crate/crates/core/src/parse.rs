//! Text syntax for field expressions and generator table files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := [scalar '*'] factor
//! factor := atom | ':' atom atom ':'
//! atom   := e<k> | e*<k> | b | b* | c | c* | H(c1,..,cr) | X(c1,..,cr) | K
//! ```
//!
//! `b` is `eps_1 - cbar` and `c` is `cbar`. Scalars are Gaussian rationals such as
//! `1/2`, `i`, `-3`, `(1/2+1/2 i)`.

use std::fmt;

use thiserror::Error;

use crate::field::FieldExpr;
use crate::roots::{CVector, LatticeVector};
use crate::scalar::GaussRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    rank: usize,
    base_line: usize,
    base_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let before = &self.src[..pos];
        let line = before.matches('\n').count();
        let column = match before.rfind('\n') {
            Some(nl) => before[nl + 1..].chars().count() + 1,
            None => before.chars().count() + self.base_col,
        };
        ParseError { line: self.base_line + line, column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(self.error("expected an index"));
        }
        self.src[start..self.pos].parse().map_err(|_| self.error_at(start, "index too large"))
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.bump();
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error_at(start, "expected an integer coordinate"))
    }

    fn expr(&mut self) -> Result<FieldExpr, ParseError> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negate = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            terms.push(if negate { negated(t) } else { t });
            self.skip_ws();
            match self.peek() {
                Some('+') => negate = false,
                Some('-') => negate = true,
                None => break,
                Some(_) => return Err(self.error("expected '+', '-' or end of expression")),
            }
            self.bump();
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { FieldExpr::Sum(terms) })
    }

    fn term(&mut self) -> Result<FieldExpr, ParseError> {
        self.skip_ws();
        let scalar = match self.peek() {
            Some('(') => {
                let start = self.pos + 1;
                while !matches!(self.peek(), Some(')') | None) {
                    self.bump();
                }
                let text = &self.src[start..self.pos];
                self.expect(')')?;
                let c: GaussRational = text.trim().parse().map_err(|_| self.error_at(start, "invalid scalar"))?;
                self.expect('*')?;
                Some(c)
            }
            Some(c) if c.is_ascii_digit() || c == 'i' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || "/+- i".contains(c)) {
                    self.bump();
                }
                let text = &self.src[start..self.pos];
                let c: GaussRational = text.trim().parse().map_err(|_| self.error_at(start, "invalid scalar"))?;
                self.expect('*')?;
                Some(c)
            }
            _ => None,
        };
        let f = self.factor()?;
        Ok(match scalar {
            Some(c) => FieldExpr::ScalarMul(c, Box::new(f)),
            None => f,
        })
    }

    fn factor(&mut self) -> Result<FieldExpr, ParseError> {
        self.skip_ws();
        if self.peek() == Some(':') {
            self.bump();
            let a = self.atom()?;
            let b = self.atom()?;
            self.skip_ws();
            if self.peek() != Some(':') {
                return Err(self.error("a normal product takes exactly two atoms"));
            }
            self.bump();
            return Ok(FieldExpr::quad(a, b));
        }
        self.atom()
    }

    fn star(&mut self) -> bool {
        if self.peek() == Some('*') {
            self.bump();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<FieldExpr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rank = self.rank;
        match self.bump() {
            Some('e') => {
                let star = self.star();
                let k = self.number()?;
                if k == 0 || k > rank {
                    return Err(self.error_at(start, format!("index e{k} out of range 1..{rank}")));
                }
                Ok(FieldExpr::WeylAtom(CVector::basis(rank, k, star)))
            }
            Some('b') => {
                let star = self.star();
                Ok(FieldExpr::WeylAtom(CVector::beta(rank, star)))
            }
            Some('c') => {
                let star = self.star();
                Ok(FieldExpr::WeylAtom(CVector::basis(rank, 0, star)))
            }
            Some('K') => Ok(FieldExpr::CentralK),
            Some(c @ ('H' | 'X')) => {
                self.expect('(')?;
                let mut coords = Vec::new();
                loop {
                    coords.push(self.integer()?);
                    self.skip_ws();
                    match self.bump() {
                        Some(',') => continue,
                        Some(')') => break,
                        _ => return Err(self.error("expected ',' or ')'")),
                    }
                }
                if coords.len() != rank {
                    return Err(self.error_at(start, format!("{c}(...) needs {rank} coordinates, got {}", coords.len())));
                }
                let v = LatticeVector(coords.into());
                Ok(if c == 'H' { FieldExpr::HeisCurrent(v) } else { FieldExpr::Vertex(v) })
            }
            Some(_) => Err(self.error_at(start, "expected an atom")),
            None => Err(self.error_at(start, "unexpected end of expression")),
        }
    }
}

fn negated(e: FieldExpr) -> FieldExpr {
    match e {
        FieldExpr::ScalarMul(c, inner) => FieldExpr::ScalarMul(-c, inner),
        other => FieldExpr::ScalarMul(GaussRational::from_int(-1), Box::new(other)),
    }
}

/// Parses an expression for a lattice of the given rank (`m + n`).
pub fn parse_expr(text: &str, rank: usize) -> Result<FieldExpr, ParseError> {
    parse_expr_at(text, rank, 1, 1)
}

fn parse_expr_at(text: &str, rank: usize, line: usize, column: usize) -> Result<FieldExpr, ParseError> {
    let mut cur = Cursor { src: text, pos: 0, rank, base_line: line, base_col: column };
    cur.skip_ws();
    if cur.peek().is_none() {
        return Err(cur.error("empty expression"));
    }
    cur.expr()
}

fn render_cvector(u: &CVector) -> String {
    let star = if u.star { "*" } else { "" };
    let support: Vec<(usize, &GaussRational)> = u.support().collect();
    match support.as_slice() {
        [(0, c)] if c.is_one() => format!("c{star}"),
        [(a, c)] if c.is_one() => format!("e{star}{a}"),
        [(0, c0), (1, c1)] if *c0 == &GaussRational::from_int(-1) && c1.is_one() => format!("b{star}"),
        _ => "<unrepresentable>".into(),
    }
}

fn render_coords(v: &LatticeVector) -> String {
    v.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn render_scalar(c: &GaussRational) -> String {
    if !c.re.is_zero() && !c.im.is_zero() {
        format!("({c})")
    } else {
        c.to_string()
    }
}

fn is_negative(c: &GaussRational) -> bool {
    c.re.is_negative() || (c.re.is_zero() && c.im.is_negative())
}

fn render_term(e: &FieldExpr, first: bool) -> String {
    let (neg, body) = match e {
        FieldExpr::ScalarMul(c, inner) if is_negative(c) => {
            let pos = -c.clone();
            let body = if pos.is_one() { render_factor(inner) } else { format!("{} * {}", render_scalar(&pos), render_factor(inner)) };
            (true, body)
        }
        FieldExpr::ScalarMul(c, inner) => (false, format!("{} * {}", render_scalar(c), render_factor(inner))),
        other => (false, render_factor(other)),
    };
    match (first, neg) {
        (true, true) => format!("-{body}"),
        (true, false) => body,
        (false, true) => format!(" - {body}"),
        (false, false) => format!(" + {body}"),
    }
}

fn render_factor(e: &FieldExpr) -> String {
    match e {
        FieldExpr::WeylAtom(u) => render_cvector(u),
        FieldExpr::HeisCurrent(v) => format!("H({})", render_coords(v)),
        FieldExpr::Vertex(v) => format!("X({})", render_coords(v)),
        FieldExpr::CentralK => "K".into(),
        FieldExpr::NormalQuad(a, b) => format!(":{} {}:", render_factor(a), render_factor(b)),
        // nested scalars and sums are not part of the grammar's factor rule
        other => format!("<{}>", render_expr(other)),
    }
}

/// Canonical text of an expression.
pub fn render_expr(e: &FieldExpr) -> String {
    match e {
        FieldExpr::Sum(parts) if !parts.is_empty() => {
            parts.iter().enumerate().map(|(k, p)| render_term(p, k == 0)).collect()
        }
        FieldExpr::Sum(_) => "0".into(),
        other => render_term(other, true),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Plus,
    Minus,
    Cartan,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Plus, Role::Minus, Role::Cartan];

    pub fn name(self) -> &'static str {
        match self {
            Role::Plus => "plus",
            Role::Minus => "minus",
            Role::Cartan => "cartan",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One `role index = expr` line.
#[derive(Debug, Clone, PartialEq)]
pub struct TableLine {
    pub index: usize,
    pub role: Role,
    pub expr: FieldExpr,
    /// Marked with a leading `!`: kept verbatim even though the pairing lint rejects it.
    pub literal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableFile {
    pub m: usize,
    pub n: usize,
    pub variant: String,
    pub central: GaussRational,
    pub lines: Vec<TableLine>,
}

impl TableFile {
    pub fn get(&self, index: usize, role: Role) -> Option<&TableLine> {
        self.lines.iter().find(|l| l.index == index && l.role == role)
    }
}

/// A Weyl normal product in a Cartan entry must pair a field with a dual field.
fn pairing_lint(e: &FieldExpr) -> Option<String> {
    for (_, t) in e.summands() {
        if let FieldExpr::NormalQuad(a, b) = t {
            if let (FieldExpr::WeylAtom(u), FieldExpr::WeylAtom(v)) = (a.as_ref(), b.as_ref()) {
                if u.star == v.star {
                    return Some(format!("normal product {} pairs two atoms of the same kind", render_factor(t)));
                }
            }
        }
    }
    None
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(key)?.trim_start();
    rest.strip_prefix('=').map(str::trim)
}

/// Parses a generator table file.
pub fn parse_table(text: &str) -> Result<TableFile, ParseError> {
    let mut m = None;
    let mut n = None;
    let mut variant = String::from("user-file");
    let mut central = GaussRational::from_int(-1);
    let mut lines = Vec::new();
    let err = |line: usize, column: usize, message: String| ParseError { line, column, message };
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len() + 1;
        if let Some(v) = header_value(trimmed, "m") {
            m = Some(v.parse::<usize>().map_err(|_| err(line_no, indent, format!("invalid m '{v}'")))?);
            continue;
        }
        if let Some(v) = header_value(trimmed, "n") {
            n = Some(v.parse::<usize>().map_err(|_| err(line_no, indent, format!("invalid n '{v}'")))?);
            continue;
        }
        if let Some(v) = header_value(trimmed, "variant") {
            variant = v.to_string();
            continue;
        }
        if let Some(v) = header_value(trimmed, "central") {
            central = v.parse().map_err(|_| err(line_no, indent, format!("invalid central value '{v}'")))?;
            continue;
        }
        let (literal, body) = match trimmed.strip_prefix('!') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, trimmed),
        };
        let (lhs, rhs) = body
            .split_once('=')
            .ok_or_else(|| err(line_no, indent, "expected 'role index = expression'".into()))?;
        let mut words = lhs.split_whitespace();
        let role = match words.next() {
            Some("plus") => Role::Plus,
            Some("minus") => Role::Minus,
            Some("cartan") => Role::Cartan,
            other => return Err(err(line_no, indent, format!("unknown role '{}'", other.unwrap_or("")))),
        };
        let index: usize = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| err(line_no, indent, "missing generator index".into()))?;
        let (m, n) = match (m, n) {
            (Some(m), Some(n)) => (m, n),
            _ => return Err(err(line_no, indent, "m and n must be declared before entries".into())),
        };
        if index > m + n {
            return Err(err(line_no, indent, format!("generator index {index} out of range 0..{}", m + n)));
        }
        let rhs_col = raw.find('=').map_or(1, |p| raw[..p + 1].chars().count() + 1);
        let expr = parse_expr_at(rhs, m + n, line_no, rhs_col)?;
        if !literal && role == Role::Cartan {
            if let Some(msg) = pairing_lint(&expr) {
                return Err(err(line_no, rhs_col, format!("{msg}; mark the line with '!' to keep it verbatim")));
            }
        }
        if lines.iter().any(|l: &TableLine| l.index == index && l.role == role) {
            return Err(err(line_no, indent, format!("duplicate entry {role} {index}")));
        }
        lines.push(TableLine { index, role, expr, literal });
    }
    let (m, n) = match (m, n) {
        (Some(m), Some(n)) => (m, n),
        _ => return Err(err(1, 1, "missing m or n header".into())),
    };
    for index in 0..=m + n {
        for role in Role::ALL {
            if !lines.iter().any(|l| l.index == index && l.role == role) {
                return Err(err(text.lines().count().max(1), 1, format!("missing entry {role} {index}")));
            }
        }
    }
    lines.sort_by_key(|l| (l.index, l.role));
    Ok(TableFile { m, n, variant, central, lines })
}

/// Canonical text of a table file.
pub fn render_table(t: &TableFile) -> String {
    let mut out = format!("m = {}\nn = {}\nvariant = {}\ncentral = {}\n", t.m, t.n, t.variant, t.central);
    let mut lines: Vec<&TableLine> = t.lines.iter().collect();
    lines.sort_by_key(|l| (l.index, l.role));
    for l in lines {
        let mark = if l.literal { "! " } else { "" };
        out.push_str(&format!("{mark}{} {} = {}\n", l.role, l.index, render_expr(&l.expr)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(rank: usize, a: usize) -> LatticeVector {
        LatticeVector::eps(rank, a)
    }

    #[test]
    fn half_beta_quad() {
        let e = parse_expr("1/2 * :b* e*1:", 3).unwrap();
        let expect = FieldExpr::ScalarMul(
            GaussRational::ratio(1, 2),
            Box::new(FieldExpr::quad(
                FieldExpr::WeylAtom(CVector::beta(3, true)),
                FieldExpr::WeylAtom(CVector::basis(3, 1, true)),
            )),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn vertex_coordinates() {
        let e = parse_expr("X(0,0,1,-1)", 4).unwrap();
        assert_eq!(e, FieldExpr::Vertex(eps(4, 3).sub(&eps(4, 4))));
    }

    #[test]
    fn imaginary_scalar() {
        let e = parse_expr("i * :e1 e*2:", 4).unwrap();
        let expect = FieldExpr::ScalarMul(
            GaussRational::i(),
            Box::new(FieldExpr::quad(
                FieldExpr::WeylAtom(CVector::basis(4, 1, false)),
                FieldExpr::WeylAtom(CVector::basis(4, 2, true)),
            )),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn sums_and_signs() {
        let e = parse_expr(":e1 e*1: - :e2 e*2:", 3).unwrap();
        match &e {
            FieldExpr::Sum(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(&parts[1], FieldExpr::ScalarMul(c, _) if *c == GaussRational::from_int(-1)));
            }
            _ => panic!("expected a sum"),
        }
        assert_eq!(render_expr(&e), ":e1 e*1: - :e2 e*2:");
        let e = parse_expr("-H(1,-1,0) + (1/2+1/2 i) * K", 3).unwrap();
        assert_eq!(render_expr(&e), "-H(1,-1,0) + (1/2+1/2 i) * K");
    }

    #[test]
    fn round_trip() {
        for text in [
            "1/2 * :b* e*1:",
            "-2 * :e1 e*1:",
            ":X(0,-1,0) e1:",
            "-:X(0,1,0) e*1:",
            "H(0,1,0) + :e1 e*1:",
            "-1/2 * :e1 e*1: - 1/2 * :e1 b*: - 1/2 * :b e*1: - 1/2 * :b b*:",
            "-i * :c c*:",
            "X(0,1,1)",
        ] {
            let e = parse_expr(text, 3).unwrap();
            assert_eq!(render_expr(&e), text);
            assert_eq!(parse_expr(&render_expr(&e), 3).unwrap(), e);
        }
    }

    #[test]
    fn diagnostics() {
        let err = parse_expr(":e1 e2 e3:", 3).unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));
        assert!(err.message.contains("exactly two atoms"));
        let err = parse_expr("e4", 3).unwrap_err();
        assert!(err.message.contains("out of range"));
        let err = parse_expr("X(1,0)", 3).unwrap_err();
        assert!(err.message.contains("3 coordinates"));
        let err = parse_expr("e1 +", 3).unwrap_err();
        assert!(err.message.contains("expected an atom") || err.message.contains("end"));
        assert!(parse_expr("", 3).is_err());
        assert!(parse_expr("1/2 :e1 e1:", 3).is_err());
        assert!(parse_expr("q", 3).is_err());
    }

    #[test]
    fn table_errors_carry_lines() {
        let text = "m = 2\nn = 1\nplus 0 = :e1 e9:\n";
        let err = parse_table(text).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.column, 14);
        let err = parse_table("m = 2\nn = 1\ncartan 1 = :e1 e1:\n").unwrap_err();
        assert!(err.message.contains("same kind"));
        let err = parse_table("m = 2\nn = 1\nplus 0 = e1\n").unwrap_err();
        assert!(err.message.contains("missing entry"));
    }
}
