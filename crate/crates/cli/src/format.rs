//! Structure files.
//!
//! The text form is the order on the first line followed by one row per
//! line, entries separated by whitespace. `#` starts a comment; the full-line
//! comments `# name: …` and `# source: …` carry metadata. The JSON form is
//! `{"order": n, "table": [[…], …], "name": …, "source": …}`.
//!
//! Entry `table[x][y]` is `x·y`. Tables exported with the opposite
//! convention are read with `transpose`.

use std::fs;
use std::path::Path;

use lquasi::LeftQuasigroup;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, ParseError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl StructureFile {
    pub fn from_algebra(q: &LeftQuasigroup) -> Self {
        StructureFile {
            order: q.order(),
            table: q.rows(),
            name: None,
            source: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// JSON when the first significant character is `{`, text otherwise.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    pub fn parse_json(text: &str) -> Result<Self, ParseError> {
        let file: StructureFile =
            serde_json::from_str(text).map_err(|e| ParseError::new(e.line(), e.column(), e.to_string()))?;
        if file.table.len() != file.order {
            return Err(ParseError::new(
                1,
                1,
                format!("order is {} but the table has {} rows", file.order, file.table.len()),
            ));
        }
        Ok(file)
    }

    pub fn parse_text(text: &str) -> Result<Self, ParseError> {
        let mut name = None;
        let mut source = None;
        let mut order: Option<usize> = None;
        let mut table: Vec<Vec<usize>> = Vec::new();
        let mut last_line = 1;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let trimmed = raw.trim_start();
            if let Some(comment) = trimmed.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("name:") {
                    name = Some(v.trim().to_string());
                } else if let Some(v) = comment.strip_prefix("source:") {
                    source = Some(v.trim().to_string());
                }
                continue;
            }
            let content = raw.split('#').next().unwrap_or("");
            let tokens = tokens(content);
            if tokens.is_empty() {
                continue;
            }
            let Some(n) = order else {
                if tokens.len() != 1 {
                    return Err(ParseError::new(line_no, tokens[1].0, "the first line must hold only the order"));
                }
                let n = number(line_no, tokens[0])?;
                if n == 0 || n > 255 {
                    return Err(ParseError::new(line_no, tokens[0].0, format!("order {n} is outside 1..=255")));
                }
                order = Some(n);
                continue;
            };
            if table.len() == n {
                return Err(ParseError::new(line_no, tokens[0].0, format!("extra row after {n} rows")));
            }
            if tokens.len() != n {
                let column = tokens.get(n).map_or(content.trim_end().len() + 1, |t| t.0);
                return Err(ParseError::new(
                    line_no,
                    column,
                    format!("row has {} entries, expected {n}", tokens.len()),
                ));
            }
            let mut row = Vec::with_capacity(n);
            for &tok in &tokens {
                let v = number(line_no, tok)?;
                if v >= n {
                    return Err(ParseError::new(line_no, tok.0, format!("entry {v} is not below the order {n}")));
                }
                row.push(v);
            }
            table.push(row);
        }
        let Some(order) = order else {
            return Err(ParseError::new(last_line, 1, "missing order"));
        };
        if table.len() != order {
            return Err(ParseError::new(
                last_line + 1,
                1,
                format!("expected {order} rows, found {}", table.len()),
            ));
        }
        Ok(StructureFile {
            order,
            table,
            name,
            source,
        })
    }

    pub fn to_algebra(&self, transpose: bool) -> Result<LeftQuasigroup> {
        let rows = if transpose {
            LeftQuasigroup::transposed_rows(&self.table)
        } else {
            self.table.clone()
        };
        LeftQuasigroup::validate(&rows).map_err(CliError::stage("table"))
    }

    /// Both conventions, each validated on its own.
    pub fn readings(&self) -> [Result<LeftQuasigroup>; 2] {
        [self.to_algebra(false), self.to_algebra(true)]
    }

    /// The normalized text form; `emit_text ∘ parse_text` is the identity on
    /// its own output.
    pub fn emit_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!("# name: {name}\n"));
        }
        if let Some(source) = &self.source {
            out.push_str(&format!("# source: {source}\n"));
        }
        out.push_str(&format!("{}\n", self.order));
        for row in &self.table {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn emit_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("structure files always serialize");
        s.push('\n');
        s
    }
}

/// Input of `extend`: `Aff(base, Z_m1 × … × Z_mk, g, f, θ)`.
///
/// `g` and `f` are integer matrices acting on coordinate column vectors.
/// `theta[x][y]` is a coordinate vector; an omitted `theta` is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSpec {
    pub base: Vec<Vec<usize>>,
    pub moduli: Vec<usize>,
    pub g: Vec<Vec<i64>>,
    pub f: Vec<Vec<i64>>,
    #[serde(default)]
    pub theta: Option<Vec<Vec<Vec<usize>>>>,
}

impl ExtensionSpec {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::new(e.line(), e.column(), e.to_string()))
    }

    pub fn build(&self) -> Result<lquasi::ext::Extension> {
        use lquasi::ext::{build_extension, AbelianGroup, Cocycle, EndoMap};
        let stage = CliError::stage("extension");
        let base = LeftQuasigroup::validate(&self.base).map_err(CliError::stage("base table"))?;
        let group = AbelianGroup::new(&self.moduli).map_err(stage)?;
        let g = EndoMap::new(&group, &self.g).map_err(CliError::stage("g"))?;
        let f = EndoMap::new(&group, &self.f).map_err(CliError::stage("f"))?;
        let n = base.order();
        let theta = match &self.theta {
            None => Cocycle::zero(n),
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Input(format!("theta must be {n}×{n}")));
                }
                let mut values = Vec::with_capacity(n * n);
                for v in rows.iter().flatten() {
                    if v.len() != self.moduli.len() || v.iter().zip(&self.moduli).any(|(c, m)| c >= m) {
                        return Err(CliError::Input(format!("theta entry {v:?} is not an element of the group")));
                    }
                    values.push(group.index(v));
                }
                Cocycle::new(n, values, &group).map_err(CliError::stage("theta"))?
            }
        };
        build_extension(&base, &group, &g, &f, &theta).map_err(CliError::stage("extension"))
    }
}

pub fn read_extension_spec(path: &Path) -> Result<ExtensionSpec> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExtensionSpec::parse(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn tokens(content: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &content[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &content[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (content[..byte].chars().count() + 1, tok))
        .collect()
}

fn number(line: usize, (column, tok): (usize, &str)) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(line, column, format!("expected a non-negative integer, found `{tok}`")))
}

pub fn read_file(path: &Path) -> Result<StructureFile> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    StructureFile::parse(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse(path: &Path, transpose: bool) -> Result<LeftQuasigroup> {
    read_file(path)?.to_algebra(transpose)
}

/// Writes the text form, or JSON when the path ends in `.json`.
pub fn emit(q: &LeftQuasigroup, path: &Path) -> Result<()> {
    let file = StructureFile::from_algebra(q);
    let text = if path.extension().is_some_and(|e| e == "json") {
        file.emit_json()
    } else {
        file.emit_text()
    };
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_of_order_two() {
        let f = StructureFile::parse("2\n0 1\n0 1\n").unwrap();
        assert_eq!(f.to_algebra(false).unwrap(), LeftQuasigroup::projection(2));
    }

    #[test]
    fn dihedral_three_is_accepted() {
        let q = StructureFile::parse("3\n0 2 1\n2 1 0\n1 0 2\n").unwrap().to_algebra(false).unwrap();
        assert_eq!(q, LeftQuasigroup::dihedral(3));
    }

    #[test]
    fn comments_and_metadata() {
        let text = "# name: R3\n# a remark\n3 # order\n\n0 2 1\n2 1 0 # row one\n1 0 2\n";
        let f = StructureFile::parse(text).unwrap();
        assert_eq!(f.name.as_deref(), Some("R3"));
        assert_eq!(f.emit_text(), "# name: R3\n3\n0 2 1\n2 1 0\n1 0 2\n");
    }

    #[test]
    fn errors_are_located() {
        let e = StructureFile::parse("2\n0 1\n1 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        let f = StructureFile::parse("3\n0 1 2\n0 0 1\n2 1 0\n").unwrap();
        assert!(f.to_algebra(false).unwrap_err().to_string().contains("row 1"));
        let e = StructureFile::parse("2\n0 1 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        let e = StructureFile::parse("2\n0 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = StructureFile::parse("# nothing\n").unwrap_err();
        assert!(e.message.contains("missing order"));
        let e = StructureFile::parse("2\n0 5\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn json_wrapper() {
        let text = r#"{"order": 2, "table": [[1, 0], [1, 0]], "name": "Aff(Z2,0,1,1)", "source": "hand"}"#;
        let f = StructureFile::parse(text).unwrap();
        assert_eq!(f.source.as_deref(), Some("hand"));
        let again = StructureFile::parse(&f.emit_json()).unwrap();
        assert_eq!(again, f);
        assert!(StructureFile::parse(r#"{"order": 3, "table": [[0]]}"#).is_err());
    }

    #[test]
    fn extension_spec() {
        let text = r#"{"base": [[0, 2, 1], [2, 1, 0], [1, 0, 2]], "moduli": [2], "g": [[0]], "f": [[1]],
                       "theta": [[[0], [1], [0]], [[0], [0], [1]], [[1], [0], [0]]]}"#;
        let e = ExtensionSpec::parse(text).unwrap().build().unwrap();
        assert_eq!(e.algebra.order(), 6);
        assert!(e.algebra.is_idempotent());
        let bad = r#"{"base": [[0]], "moduli": [3], "g": [[1]], "f": [[0]]}"#;
        assert!(ExtensionSpec::parse(bad).unwrap().build().is_err());
    }

    #[test]
    fn transposed_reading() {
        let f = StructureFile::parse("2\n1 1\n0 0\n").unwrap();
        let [plain, transposed] = f.readings();
        assert!(plain.is_err());
        assert_eq!(transposed.unwrap().rows(), vec![vec![1, 0], vec![1, 0]]);
    }
}
