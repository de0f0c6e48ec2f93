//! Fixed/free MPS reader and writer.
//!
//! The reader tokenizes data lines on whitespace first. When a line does not
//! have a token count that fits its section (names containing blanks, for
//! instance), it falls back to the classic fixed column layout:
//!
//! ```text
//! field:    1      2          3            4          5           6
//! columns:  2-3    5-12       15-22        25-36      40-47       50-61
//! ```
//!
//! Sections must appear in the order `NAME`, `ROWS`, `COLUMNS`, `RHS`,
//! `RANGES`, `BOUNDS`, `ENDATA`; `RHS`, `RANGES` and `BOUNDS` may be omitted.
//! Only one RHS / RANGES / BOUNDS set is read: entries belonging to a second
//! set name are skipped.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Free row; the first one is the objective.
    N,
    L,
    G,
    E,
}

impl RowKind {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "N" => Some(Self::N),
            "L" => Some(Self::L),
            "G" => Some(Self::G),
            "E" => Some(Self::E),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::N => "N",
            Self::L => "L",
            Self::G => "G",
            Self::E => "E",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Up,
    Lo,
    Fx,
    Fr,
    Mi,
    Pl,
}

impl BoundKind {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "UP" => Some(Self::Up),
            "LO" => Some(Self::Lo),
            "FX" => Some(Self::Fx),
            "FR" => Some(Self::Fr),
            "MI" => Some(Self::Mi),
            "PL" => Some(Self::Pl),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Up => "UP",
            Self::Lo => "LO",
            Self::Fx => "FX",
            Self::Fr => "FR",
            Self::Mi => "MI",
            Self::Pl => "PL",
        }
    }

    /// Whether a bound line of this kind carries a numeric value.
    pub fn has_value(self) -> bool {
        matches!(self, Self::Up | Self::Lo | Self::Fx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub column: String,
    pub row: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub column: String,
    pub value: Option<f64>,
}

/// An MPS file as written, before any reformulation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawMps {
    pub name: String,
    /// Every row in declaration order, the objective included.
    pub rows: Vec<(String, RowKind)>,
    pub objective: String,
    pub columns: Vec<Coefficient>,
    pub rhs_set: Option<String>,
    pub rhs: Vec<(String, f64)>,
    pub range_set: Option<String>,
    pub ranges: Vec<(String, f64)>,
    pub bound_set: Option<String>,
    pub bounds: Vec<BoundEntry>,
}

impl RawMps {
    /// Column names in order of first appearance.
    pub fn column_names(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.columns
            .iter()
            .filter(|c| seen.insert(c.column.as_str()))
            .map(|c| c.column.as_str())
            .collect()
    }

    pub fn row_kind(&self, name: &str) -> Option<RowKind> {
        self.rows.iter().find(|(n, _)| n == name).map(|(_, k)| *k)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsError {
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: section `{name}` is out of order")]
    SectionOrder { line: usize, name: String },
    #[error("line {line}: unknown row kind `{kind}`")]
    UnknownRowKind { line: usize, kind: String },
    #[error(
        "line {line}: unsupported bound kind `{kind}` (only UP, LO, FX, FR, MI, PL are accepted)"
    )]
    UnknownBoundKind { line: usize, kind: String },
    #[error("line {line}: `{name}` was never declared")]
    UndeclaredName { line: usize, name: String },
    #[error("line {line}: duplicate {what}")]
    DuplicateEntry { line: usize, what: String },
    #[error("line {line}: missing ENDATA")]
    MissingEndata { line: usize },
    #[error("line {line}: malformed number `{token}`")]
    MalformedNumber { line: usize, token: String },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: no objective (N) row declared")]
    MissingObjective { line: usize },
    #[error("read error: {0}")]
    Io(String),
}

impl MpsError {
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::UnknownSection { line, .. }
            | Self::SectionOrder { line, .. }
            | Self::UnknownRowKind { line, .. }
            | Self::UnknownBoundKind { line, .. }
            | Self::UndeclaredName { line, .. }
            | Self::DuplicateEntry { line, .. }
            | Self::MissingEndata { line }
            | Self::MalformedNumber { line, .. }
            | Self::MalformedLine { line, .. }
            | Self::MissingObjective { line } => Some(*line),
            Self::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Start,
    Name,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

impl Section {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "NAME" => Some(Self::Name),
            "ROWS" => Some(Self::Rows),
            "COLUMNS" => Some(Self::Columns),
            "RHS" => Some(Self::Rhs),
            "RANGES" => Some(Self::Ranges),
            "BOUNDS" => Some(Self::Bounds),
            "ENDATA" => Some(Self::End),
            _ => None,
        }
    }
}

/// Column spans (0-based, end exclusive) of the six fixed-format fields.
const FIXED_FIELDS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];

fn fixed_fields(line: &str) -> Vec<String> {
    let chars: Vec<char> = line.chars().collect();
    FIXED_FIELDS
        .iter()
        .map(|&(lo, hi)| {
            if lo >= chars.len() {
                String::new()
            } else {
                chars[lo..hi.min(chars.len())]
                    .iter()
                    .collect::<String>()
                    .trim()
                    .to_owned()
            }
        })
        .collect()
}

fn parse_number(token: &str, line: usize) -> Result<f64, MpsError> {
    match token.parse::<f64>() {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => Err(MpsError::MalformedNumber {
            line,
            token: token.to_owned(),
        }),
    }
}

struct Parser {
    mps: RawMps,
    row_index: HashMap<String, RowKind>,
    columns_seen: HashSet<String>,
    coefficient_seen: HashSet<(String, String)>,
    rhs_seen: HashSet<String>,
    range_seen: HashSet<String>,
    bound_seen: HashSet<(BoundKind, String)>,
    last_column: Option<String>,
}

impl Parser {
    fn new() -> Self {
        Self {
            mps: RawMps::default(),
            row_index: HashMap::new(),
            columns_seen: HashSet::new(),
            coefficient_seen: HashSet::new(),
            rhs_seen: HashSet::new(),
            range_seen: HashSet::new(),
            bound_seen: HashSet::new(),
            last_column: None,
        }
    }

    fn require_row(&self, name: &str, line: usize) -> Result<(), MpsError> {
        if self.row_index.contains_key(name) {
            Ok(())
        } else {
            Err(MpsError::UndeclaredName {
                line,
                name: name.to_owned(),
            })
        }
    }

    fn row(&mut self, tokens: &[&str], raw: &str, line: usize) -> Result<(), MpsError> {
        let (kind, name) = if tokens.len() == 2 {
            (tokens[0].to_owned(), tokens[1].to_owned())
        } else {
            let f = fixed_fields(raw);
            if f[0].is_empty() || f[1].is_empty() {
                return Err(MpsError::MalformedLine {
                    line,
                    reason: "ROWS entry needs a kind and a name".into(),
                });
            }
            (f[0].clone(), f[1].clone())
        };
        let kind = RowKind::parse(&kind).ok_or(MpsError::UnknownRowKind { line, kind })?;
        if self.row_index.contains_key(&name) {
            return Err(MpsError::DuplicateEntry {
                line,
                what: format!("row `{name}`"),
            });
        }
        if kind == RowKind::N && self.mps.objective.is_empty() {
            self.mps.objective = name.clone();
        }
        self.row_index.insert(name.clone(), kind);
        self.mps.rows.push((name, kind));
        Ok(())
    }

    fn column(&mut self, tokens: &[&str], raw: &str, line: usize) -> Result<(), MpsError> {
        if tokens.iter().any(|t| t.contains("MARKER")) {
            return Err(MpsError::MalformedLine {
                line,
                reason: "integer MARKER lines are not supported".into(),
            });
        }
        let pairs = self.pairs(tokens, raw, line, true)?;
        let (column, entries) = match pairs {
            (Some(c), e) => (c, e),
            (None, _) => unreachable!("COLUMNS lines always carry a column name"),
        };
        if self.last_column.as_deref() != Some(column.as_str()) {
            if self.columns_seen.contains(&column) {
                return Err(MpsError::DuplicateEntry {
                    line,
                    what: format!("column `{column}` (entries must be contiguous)"),
                });
            }
            self.columns_seen.insert(column.clone());
            self.last_column = Some(column.clone());
        }
        for (row, value) in entries {
            self.require_row(&row, line)?;
            if !self.coefficient_seen.insert((column.clone(), row.clone())) {
                return Err(MpsError::DuplicateEntry {
                    line,
                    what: format!("coefficient ({column}, {row})"),
                });
            }
            self.mps.columns.push(Coefficient {
                column: column.clone(),
                row,
                value,
            });
        }
        Ok(())
    }

    /// Splits a `[name] row value [row value]` line. `name_required` is set for
    /// COLUMNS, where the leading name is the column rather than a set name.
    #[allow(clippy::type_complexity)]
    fn pairs(
        &self,
        tokens: &[&str],
        raw: &str,
        line: usize,
        name_required: bool,
    ) -> Result<(Option<String>, Vec<(String, f64)>), MpsError> {
        let free = |toks: &[&str]| -> Option<Result<Vec<(String, f64)>, MpsError>> {
            if toks.len() != 2 && toks.len() != 4 {
                return None;
            }
            let mut out = Vec::new();
            for pair in toks.chunks(2) {
                match parse_number(pair[1], line) {
                    Ok(v) => out.push((pair[0].to_owned(), v)),
                    Err(e) => return Some(Err(e)),
                }
            }
            Some(Ok(out))
        };
        let attempt = if name_required {
            tokens
                .split_first()
                .and_then(|(head, rest)| free(rest).map(|r| (Some(head.to_string()), r)))
        } else if tokens.len() % 2 == 1 {
            tokens
                .split_first()
                .and_then(|(head, rest)| free(rest).map(|r| (Some(head.to_string()), r)))
        } else {
            free(tokens).map(|r| (None, r))
        };
        // Free-form success short-circuits; otherwise try the fixed layout and,
        // if that fails too, prefer the free-form diagnosis.
        let free_error = match attempt {
            Some((name, Ok(entries))) => return Ok((name, entries)),
            Some((_, Err(e))) => Some(e),
            None => None,
        };
        self.fixed_pairs(raw, line, name_required)
            .map_err(|fixed_error| free_error.unwrap_or(fixed_error))
    }

    #[allow(clippy::type_complexity)]
    fn fixed_pairs(
        &self,
        raw: &str,
        line: usize,
        name_required: bool,
    ) -> Result<(Option<String>, Vec<(String, f64)>), MpsError> {
        let f = fixed_fields(raw);
        if f[2].is_empty() || f[3].is_empty() {
            return Err(MpsError::MalformedLine {
                line,
                reason: format!("cannot split `{}` into name/value pairs", raw.trim()),
            });
        }
        let name = if f[1].is_empty() {
            None
        } else {
            Some(f[1].clone())
        };
        if name_required && name.is_none() {
            return Err(MpsError::MalformedLine {
                line,
                reason: "missing column name".into(),
            });
        }
        let mut entries = vec![(f[2].clone(), parse_number(&f[3], line)?)];
        if !f[4].is_empty() {
            entries.push((f[4].clone(), parse_number(&f[5], line)?));
        }
        Ok((name, entries))
    }

    fn set_matches(current: &mut Option<String>, started: bool, name: Option<String>) -> bool {
        if !started {
            *current = name;
            return true;
        }
        *current == name
    }

    fn rhs(&mut self, tokens: &[&str], raw: &str, line: usize) -> Result<(), MpsError> {
        let (set, entries) = self.pairs(tokens, raw, line, false)?;
        let started = !self.rhs_seen.is_empty();
        if !Self::set_matches(&mut self.mps.rhs_set, started, set) {
            return Ok(());
        }
        for (row, value) in entries {
            self.require_row(&row, line)?;
            if !self.rhs_seen.insert(row.clone()) {
                return Err(MpsError::DuplicateEntry {
                    line,
                    what: format!("RHS for row `{row}`"),
                });
            }
            self.mps.rhs.push((row, value));
        }
        Ok(())
    }

    fn range(&mut self, tokens: &[&str], raw: &str, line: usize) -> Result<(), MpsError> {
        let (set, entries) = self.pairs(tokens, raw, line, false)?;
        let started = !self.range_seen.is_empty();
        if !Self::set_matches(&mut self.mps.range_set, started, set) {
            return Ok(());
        }
        for (row, value) in entries {
            self.require_row(&row, line)?;
            if !self.range_seen.insert(row.clone()) {
                return Err(MpsError::DuplicateEntry {
                    line,
                    what: format!("RANGES entry for row `{row}`"),
                });
            }
            self.mps.ranges.push((row, value));
        }
        Ok(())
    }

    fn bound(&mut self, tokens: &[&str], raw: &str, line: usize) -> Result<(), MpsError> {
        let kind_token = tokens.first().copied().unwrap_or("");
        let kind = BoundKind::parse(kind_token).ok_or_else(|| MpsError::UnknownBoundKind {
            line,
            kind: kind_token.to_owned(),
        })?;
        // (set, column, value) from free tokens, if the count fits the kind.
        let free: Option<(Option<&str>, &str, Option<&str>)> =
            match (kind.has_value(), tokens.len()) {
                (true, 4) => Some((Some(tokens[1]), tokens[2], Some(tokens[3]))),
                (true, 3) => Some((None, tokens[1], Some(tokens[2]))),
                (false, 3) => Some((Some(tokens[1]), tokens[2], None)),
                (false, 2) => Some((None, tokens[1], None)),
                // Some writers emit a dummy value on FR/MI/PL lines.
                (false, 4) => Some((Some(tokens[1]), tokens[2], None)),
                _ => None,
            };
        let (set, column, value) = match free {
            Some((set, column, value)) => (
                set.map(str::to_owned),
                column.to_owned(),
                value.map(|v| parse_number(v, line)).transpose()?,
            ),
            None => {
                let f = fixed_fields(raw);
                if f[2].is_empty() {
                    return Err(MpsError::MalformedLine {
                        line,
                        reason: "BOUNDS entry needs a column name".into(),
                    });
                }
                let value = if kind.has_value() {
                    Some(parse_number(&f[3], line)?)
                } else {
                    None
                };
                let set = if f[1].is_empty() {
                    None
                } else {
                    Some(f[1].clone())
                };
                (set, f[2].clone(), value)
            }
        };
        let started = !self.bound_seen.is_empty();
        if !Self::set_matches(&mut self.mps.bound_set, started, set) {
            return Ok(());
        }
        if !self.columns_seen.contains(&column) {
            return Err(MpsError::UndeclaredName { line, name: column });
        }
        if !self.bound_seen.insert((kind, column.clone())) {
            return Err(MpsError::DuplicateEntry {
                line,
                what: format!("{} bound on `{column}`", kind.as_str()),
            });
        }
        self.mps.bounds.push(BoundEntry {
            kind,
            column,
            value,
        });
        Ok(())
    }
}

/// Parses an MPS stream.
pub fn parse_mps<R: BufRead>(reader: R) -> Result<RawMps, MpsError> {
    let mut parser = Parser::new();
    let mut section = Section::Start;
    let mut line_no = 0;

    for line in reader.lines() {
        let raw = line.map_err(|e| MpsError::Io(e.to_string()))?;
        line_no += 1;
        let raw = raw.trim_end_matches(['\r', '\n']);
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();

        if !raw.starts_with([' ', '\t']) {
            let head = tokens[0];
            let next = Section::parse(head).ok_or_else(|| MpsError::UnknownSection {
                line: line_no,
                name: head.to_owned(),
            })?;
            // NAME, ROWS and COLUMNS are mandatory and consecutive; the rest
            // only has to keep increasing.
            let in_order = next > section
                && (next > Section::Columns || next as u8 == section as u8 + 1)
                && !(next > Section::Columns && section < Section::Columns);
            if !in_order {
                return Err(MpsError::SectionOrder {
                    line: line_no,
                    name: head.to_owned(),
                });
            }
            if next >= Section::Columns && parser.mps.objective.is_empty() {
                return Err(MpsError::MissingObjective { line: line_no });
            }
            if next == Section::Name {
                parser.mps.name = tokens.get(1).copied().unwrap_or("").to_owned();
            }
            section = next;
            if section == Section::End {
                return Ok(parser.mps);
            }
            continue;
        }

        match section {
            Section::Rows => parser.row(&tokens, raw, line_no)?,
            Section::Columns => parser.column(&tokens, raw, line_no)?,
            Section::Rhs => parser.rhs(&tokens, raw, line_no)?,
            Section::Ranges => parser.range(&tokens, raw, line_no)?,
            Section::Bounds => parser.bound(&tokens, raw, line_no)?,
            Section::Start | Section::Name | Section::End => {
                return Err(MpsError::MalformedLine {
                    line: line_no,
                    reason: "data line outside of a data section".into(),
                })
            }
        }
    }
    Err(MpsError::MissingEndata { line: line_no + 1 })
}

pub fn parse_mps_str(text: &str) -> Result<RawMps, MpsError> {
    parse_mps(text.as_bytes())
}

struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if self.0 == 0.0 || (1e-4..1e15).contains(&a) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

/// Serializes in free layout. Names must not contain whitespace.
pub fn write_mps(mps: &RawMps) -> String {
    let mut out = String::new();
    let set = |s: &Option<String>| {
        s.as_deref()
            .map(|s| format!("{s:<8}  "))
            .unwrap_or_default()
    };

    let _ = writeln!(out, "NAME          {}", mps.name);
    out.push_str("ROWS\n");
    for (name, kind) in &mps.rows {
        let _ = writeln!(out, " {}  {}", kind.as_str(), name);
    }
    out.push_str("COLUMNS\n");
    for c in &mps.columns {
        let _ = writeln!(out, "    {:<8}  {:<8}  {}", c.column, c.row, Num(c.value));
    }
    if !mps.rhs.is_empty() {
        out.push_str("RHS\n");
        for (row, v) in &mps.rhs {
            let _ = writeln!(out, "    {}{:<8}  {}", set(&mps.rhs_set), row, Num(*v));
        }
    }
    if !mps.ranges.is_empty() {
        out.push_str("RANGES\n");
        for (row, v) in &mps.ranges {
            let _ = writeln!(out, "    {}{:<8}  {}", set(&mps.range_set), row, Num(*v));
        }
    }
    if !mps.bounds.is_empty() {
        out.push_str("BOUNDS\n");
        for b in &mps.bounds {
            let _ = write!(
                out,
                " {} {}{:<8}",
                b.kind.as_str(),
                set(&mps.bound_set),
                b.column
            );
            if let Some(v) = b.value {
                let _ = write!(out, "  {}", Num(v));
            }
            out.push('\n');
        }
    }
    out.push_str("ENDATA\n");
    out
}
