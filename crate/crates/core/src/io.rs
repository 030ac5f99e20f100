//! Text formats: edge lists, dense CSV matrices and a GML subset.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::sampling::Adjacency;

const NODES_HEADER: &str = "# nodes";

/// Parses `u v` lines with 0-based ids. Blank lines and `#` comments are
/// skipped; an optional `# nodes N` line fixes the node count so trailing
/// isolated nodes survive a round trip.
pub fn parse_edge_list(text: &str) -> Result<Adjacency> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix(NODES_HEADER) {
            let n = rest.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad node count `{}`", rest.trim()),
            })?;
            declared = Some(n);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut id = |what: &str| -> Result<usize> {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("missing {what} node"),
            })?;
            tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("`{tok}` is not a node id"),
            })
        };
        let (u, v) = (id("first")?, id("second")?);
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected exactly two node ids".into(),
            });
        }
        if u == v {
            return Err(Error::Invalid(format!("self-loop on node {u} at line {line_no}")));
        }
        edges.push((u, v));
    }
    let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max();
    let n = match (declared, inferred) {
        (Some(d), Some(i)) if i > d => {
            return Err(Error::Invalid(format!("edge endpoint {} exceeds declared {d} nodes", i - 1)))
        }
        (Some(d), _) => d,
        (None, Some(i)) => i,
        (None, None) => return Err(Error::Invalid("edge list defines no nodes".into())),
    };
    if n == 0 {
        return Err(Error::Invalid("edge list defines no nodes".into()));
    }
    Adjacency::from_edges(n, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Adjacency> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(a: &Adjacency) -> String {
    let mut out = format!("{NODES_HEADER} {}\n", a.n());
    for (u, v) in a.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Dense 0/1 rows, comma separated, no header.
pub fn write_adjacency_csv(a: &Adjacency) -> String {
    let mut out = String::new();
    for i in 0..a.n() {
        let row: Vec<String> = a.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_adjacency_csv(text: &str) -> Result<Adjacency> {
    let rows = parse_csv_rows(text, |tok| tok.parse::<u8>().ok())?;
    Adjacency::from_matrix(SquareMatrix::from_rows(rows)?)
}

fn parse_csv_rows<T>(text: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<Vec<T>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|tok| {
                parse(tok).ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("bad matrix entry `{tok}`"),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Invalid("matrix file is empty".into()));
    }
    Ok(rows)
}

/// Rounds to 6 significant digits and prints the shortest decimal that
/// reads back as the rounded value.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("scientific output parses");
    rounded.to_string()
}

pub fn write_matrix_csv(m: &SquareMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.n() {
        let row: Vec<String> = m.row(i).iter().map(|&v| format_sig6(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<SquareMatrix<f64>> {
    let rows = parse_csv_rows(text, |tok| tok.parse::<f64>().ok())?;
    SquareMatrix::from_rows(rows)
}

pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<SquareMatrix<f64>> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

/// A graph read from GML.
#[derive(Clone, Debug, PartialEq)]
pub struct GmlGraph {
    pub adjacency: Adjacency,
    /// Node labels in dense order; falls back to the original id.
    pub labels: Vec<String>,
    /// Original GML id of each dense node index.
    pub ids: Vec<i64>,
    /// Edges seen more than once (either direction) and collapsed.
    pub duplicate_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Str(String),
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '[' => {
                out.push((Token::Open, line));
                chars.next();
            }
            ']' => {
                out.push((Token::Close, line));
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                        None => {
                            return Err(Error::Parse {
                                line: start,
                                msg: "unterminated string".into(),
                            })
                        }
                    }
                }
                out.push((Token::Str(s), start));
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '[' || ch == ']' || ch == '"' {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                out.push((Token::Word(s), line));
            }
        }
    }
    Ok(out)
}

#[derive(Debug)]
enum GmlValue {
    Scalar(String, usize),
    List(Vec<(String, GmlValue)>),
}

fn parse_list(tokens: &[(Token, usize)], pos: &mut usize, nested: bool) -> Result<Vec<(String, GmlValue)>> {
    let mut items = Vec::new();
    loop {
        let Some((tok, line)) = tokens.get(*pos) else {
            if nested {
                let line = tokens.last().map_or(1, |t| t.1);
                return Err(Error::Parse { line, msg: "unclosed `[`".into() });
            }
            return Ok(items);
        };
        let line = *line;
        *pos += 1;
        let key = match tok {
            Token::Close if nested => return Ok(items),
            Token::Word(w) => w.clone(),
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected a key, found {other:?}"),
                })
            }
        };
        let value = match tokens.get(*pos) {
            Some((Token::Open, _)) => {
                *pos += 1;
                GmlValue::List(parse_list(tokens, pos, true)?)
            }
            Some((Token::Str(s), l)) | Some((Token::Word(s), l)) => {
                *pos += 1;
                GmlValue::Scalar(s.clone(), *l)
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("key `{key}` has no value"),
                })
            }
        };
        items.push((key, value));
    }
}

fn int_field(items: &[(String, GmlValue)], key: &str, line: usize) -> Result<i64> {
    match items.iter().find(|(k, _)| k == key) {
        Some((_, GmlValue::Scalar(s, l))) => s.parse().map_err(|_| Error::Parse {
            line: *l,
            msg: format!("`{key}` must be an integer, got `{s}`"),
        }),
        _ => Err(Error::Parse {
            line,
            msg: format!("record is missing `{key}`"),
        }),
    }
}

fn first_line(items: &[(String, GmlValue)], fallback: usize) -> usize {
    items
        .iter()
        .find_map(|(_, v)| match v {
            GmlValue::Scalar(_, l) => Some(*l),
            _ => None,
        })
        .unwrap_or(fallback)
}

/// Reads the `graph [ node [ id .. label .. ] edge [ source .. target .. ] ]`
/// subset of GML. Node ids are remapped to `0..n` in order of appearance;
/// edges are undirected.
pub fn parse_gml(text: &str) -> Result<GmlGraph> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let top = parse_list(&tokens, &mut pos, false)?;
    let graph = top
        .iter()
        .find_map(|(k, v)| match (k.as_str(), v) {
            ("graph", GmlValue::List(items)) => Some(items),
            _ => None,
        })
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "no `graph [ ... ]` record".into(),
        })?;

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut dense: HashMap<i64, usize> = HashMap::new();
    for (key, value) in graph {
        if let ("node", GmlValue::List(items)) = (key.as_str(), value) {
            let line = first_line(items, 1);
            let id = int_field(items, "id", line)?;
            if dense.insert(id, ids.len()).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate node id {id}"),
                });
            }
            let label = items.iter().find_map(|(k, v)| match (k.as_str(), v) {
                ("label", GmlValue::Scalar(s, _)) => Some(s.clone()),
                _ => None,
            });
            ids.push(id);
            labels.push(label.unwrap_or_else(|| id.to_string()));
        }
    }
    if ids.is_empty() {
        return Err(Error::Invalid("GML graph has no nodes".into()));
    }

    let mut adjacency = Adjacency::empty(ids.len());
    let mut edges = Vec::new();
    let mut duplicate_edges = 0;
    let mut seen = std::collections::HashSet::new();
    for (key, value) in graph {
        if let ("edge", GmlValue::List(items)) = (key.as_str(), value) {
            let line = first_line(items, 1);
            let lookup = |field: &str| -> Result<usize> {
                let id = int_field(items, field, line)?;
                dense.get(&id).copied().ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("edge refers to unknown node {id}"),
                })
            };
            let (u, v) = (lookup("source")?, lookup("target")?);
            if u == v {
                return Err(Error::Invalid(format!("self-loop on node {} at line {line}", ids[u])));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                duplicate_edges += 1;
                continue;
            }
            edges.push((u, v));
        }
    }
    if !edges.is_empty() {
        adjacency = Adjacency::from_edges(ids.len(), edges)?;
    }
    Ok(GmlGraph {
        adjacency,
        labels,
        ids,
        duplicate_edges,
    })
}

pub fn load_gml_subset(path: impl AsRef<Path>) -> Result<GmlGraph> {
    parse_gml(&std::fs::read_to_string(path)?)
}
