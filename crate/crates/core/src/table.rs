//! Generator tables: the field assigned to each `x^+_i`, `x^-_i` and `alpha_i`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldExpr;
use crate::parse::{parse_expr, parse_table, render_table, ParseError, Role, TableFile, TableLine};
use crate::roots::RootSystem;
use crate::scalar::GaussRational;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("unknown table variant '{0}' (expected as-printed, corrected or file=PATH)")]
    UnknownVariant(String),
    #[error("table file {path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("cannot read table file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("table is for D({0},{1}) but D({2},{3}) was requested")]
    RankMismatch(usize, usize, usize, usize),
    #[error("entry {role} {index} has the wrong parity")]
    Parity { index: usize, role: Role },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variant {
    AsPrinted,
    Corrected,
    UserFile(PathBuf),
}

impl FromStr for Variant {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-printed" => Ok(Variant::AsPrinted),
            "corrected" => Ok(Variant::Corrected),
            other => match other.strip_prefix("file=") {
                Some(path) if !path.is_empty() => Ok(Variant::UserFile(PathBuf::from(path))),
                _ => Err(TableError::UnknownVariant(other.to_string())),
            },
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::AsPrinted => f.write_str("as-printed"),
            Variant::Corrected => f.write_str("corrected"),
            Variant::UserFile(p) => write!(f, "file={}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorTable {
    pub m: usize,
    pub n: usize,
    pub variant: String,
    pub central_value: GaussRational,
    pub plus: Vec<FieldExpr>,
    pub minus: Vec<FieldExpr>,
    pub cartan: Vec<FieldExpr>,
    /// Entries kept verbatim despite failing the pairing lint.
    pub literal: Vec<(usize, Role)>,
}

impl GeneratorTable {
    pub fn nodes(&self) -> usize {
        self.plus.len()
    }

    pub fn entry(&self, index: usize, role: Role) -> &FieldExpr {
        match role {
            Role::Plus => &self.plus[index],
            Role::Minus => &self.minus[index],
            Role::Cartan => &self.cartan[index],
        }
    }

    pub fn set_entry(&mut self, index: usize, role: Role, e: FieldExpr) {
        let slot = match role {
            Role::Plus => &mut self.plus[index],
            Role::Minus => &mut self.minus[index],
            Role::Cartan => &mut self.cartan[index],
        };
        *slot = e;
    }

    pub fn to_file(&self) -> TableFile {
        let mut lines = Vec::new();
        for index in 0..self.nodes() {
            for role in Role::ALL {
                lines.push(TableLine {
                    index,
                    role,
                    expr: self.entry(index, role).clone(),
                    literal: self.literal.contains(&(index, role)),
                });
            }
        }
        TableFile { m: self.m, n: self.n, variant: self.variant.clone(), central: self.central_value.clone(), lines }
    }

    pub fn render(&self) -> String {
        render_table(&self.to_file())
    }

    /// Builds a table from a parsed file, checking ranks and parities.
    pub fn from_file(file: &TableFile, sys: &RootSystem) -> Result<Self, TableError> {
        if file.m != sys.m || file.n != sys.n {
            return Err(TableError::RankMismatch(file.m, file.n, sys.m, sys.n));
        }
        let pick = |role: Role| -> Vec<FieldExpr> {
            (0..sys.nodes()).map(|i| file.get(i, role).expect("validated by the parser").expr.clone()).collect()
        };
        let table = GeneratorTable {
            m: file.m,
            n: file.n,
            variant: file.variant.clone(),
            central_value: file.central.clone(),
            plus: pick(Role::Plus),
            minus: pick(Role::Minus),
            cartan: pick(Role::Cartan),
            literal: file.lines.iter().filter(|l| l.literal).map(|l| (l.index, l.role)).collect(),
        };
        for i in 0..sys.nodes() {
            for role in Role::ALL {
                let want = if role == Role::Cartan { crate::roots::Parity::Even } else { sys.parity[i] };
                if table.entry(i, role).parity() != want {
                    return Err(TableError::Parity { index: i, role });
                }
            }
        }
        Ok(table)
    }
}

fn coords(rank: usize, terms: &[(usize, i64)]) -> String {
    let mut v = vec![0i64; rank];
    for &(a, c) in terms {
        v[a - 1] += c;
    }
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Text of every entry, as `(index, role, expression, literal)`.
fn table_text(m: usize, n: usize, variant: &Variant) -> Vec<(usize, Role, String, bool)> {
    let r = m + n;
    let x = |terms: &[(usize, i64)]| format!("X({})", coords(r, terms));
    let h = |terms: &[(usize, i64)]| format!("H({})", coords(r, terms));
    let printed = *variant == Variant::AsPrinted;
    let mut out = Vec::new();
    let mut push = |i: usize, plus: String, minus: String, cartan: String, literal: bool| {
        out.push((i, Role::Plus, plus, false));
        out.push((i, Role::Minus, minus, false));
        out.push((i, Role::Cartan, cartan, literal));
    };
    if printed {
        push(
            0,
            "1/2 * :b* e*1:".into(),
            "1/2 * :b e1:".into(),
            "-1/2 * :e1 e*1: - 1/2 * :e1 b*: - 1/2 * :b e*1: - 1/2 * :b b*:".into(),
            false,
        );
    } else {
        push(0, "1/2 * :e*1 e*1:".into(), "1/2 * :e1 e1:".into(), "-2 * :e1 e*1:".into(), false);
    }
    for i in 1..n {
        let j = i + 1;
        let cartan = if printed { format!(":e{i} e{i}: - :e{j} e{j}:") } else { format!(":e{i} e*{i}: - :e{j} e*{j}:") };
        push(i, format!("i * :e{i} e*{j}:"), format!("i * :e*{i} e{j}:"), cartan, printed);
    }
    let f = n + 1;
    if printed {
        push(
            n,
            format!(":{} e*{n}:", x(&[(f, 1)])),
            format!(":{} e{n}:", x(&[(f, -1)])),
            format!("-{} - :e{n} e*{n}:", h(&[(f, 1)])),
            false,
        );
    } else {
        push(
            n,
            format!(":{} e{n}:", x(&[(f, -1)])),
            format!("-:{} e*{n}:", x(&[(f, 1)])),
            format!("{} + :e{n} e*{n}:", h(&[(f, 1)])),
            false,
        );
    }
    for i in n + 1..n + m {
        let root = [(i, 1), (i + 1, -1)];
        let cartan = if printed { h(&root) } else { format!("-{}", h(&root)) };
        push(i, x(&root), x(&[(i + 1, 1), (i, -1)]), cartan, false);
    }
    let last = [(r - 1, 1), (r, 1)];
    let cartan = if printed { h(&[(n, 1), (r, 1)]) } else { format!("-{}", h(&last)) };
    push(r, x(&last), x(&[(r - 1, -1), (r, -1)]), cartan, false);
    out
}

/// The generator table of a shipped variant, or of a user file.
pub fn generator_table(sys: &RootSystem, variant: &Variant) -> Result<GeneratorTable, TableError> {
    if let Variant::UserFile(path) = variant {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| TableError::Io { path: shown.clone(), source })?;
        let file = parse_table(&text).map_err(|source| TableError::Parse { path: shown, source })?;
        return GeneratorTable::from_file(&file, sys);
    }
    let r = sys.rank();
    let lines = table_text(sys.m, sys.n, variant)
        .into_iter()
        .map(|(index, role, text, literal)| {
            let expr = parse_expr(&text, r).unwrap_or_else(|e| panic!("shipped table entry {role} {index} '{text}': {e}"));
            TableLine { index, role, expr, literal }
        })
        .collect();
    let file = TableFile { m: sys.m, n: sys.n, variant: variant.to_string(), central: GaussRational::from_int(-1), lines };
    GeneratorTable::from_file(&file, sys)
}

/// The forcing instance recorded for a corrected entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingInstance {
    pub relation: String,
    pub i: usize,
    pub j: usize,
    pub modes: Vec<i64>,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub role: String,
    pub as_printed: String,
    pub corrected: String,
    pub forcing: ForcingInstance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<ManifestEntry>,
}

/// Entries where the two shipped variants differ, in table order.
pub fn differing_entries(printed: &GeneratorTable, corrected: &GeneratorTable) -> Vec<(usize, Role)> {
    let mut out = Vec::new();
    for i in 0..printed.nodes() {
        for role in Role::ALL {
            if printed.entry(i, role) != corrected.entry(i, role) {
                out.push((i, role));
            }
        }
    }
    out
}
