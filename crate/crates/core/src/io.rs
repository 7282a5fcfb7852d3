//! Edge-list text format.
//!
//! ```text
//! # comment
//! t <nV> <nE>
//! v <id> <label>
//! e <src> <dst> <label>
//! ```
//!
//! Vertex ids must be declared densely as `0..nV`; labels are arbitrary
//! whitespace-free strings interned into the caller's [`LabelDict`].

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, LabelDict, VertexId};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("no header (expected `t <nV> <nE>`)")]
    NoHeader,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: vertex {id} declared twice")]
    DuplicateVertex { line: usize, id: VertexId },
    #[error("line {line}: edge references undeclared vertex {id}")]
    UndeclaredVertex { line: usize, id: VertexId },
    #[error("header promised {expected} {what}, found {found}")]
    CountMismatch { what: &'static str, expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn parse_num(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_graph(text: &str, dict: &mut LabelDict) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut labels: Vec<Option<u32>> = Vec::new();
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let kind = toks.next().unwrap();
        match (kind, header) {
            ("t", None) => {
                let nv = parse_num(toks.next(), line, "vertex count")?;
                let ne = parse_num(toks.next(), line, "edge count")?;
                header = Some((nv, ne));
                labels = vec![None; nv];
            }
            ("t", Some(_)) => return Err(syntax(line, "second header")),
            (_, None) => return Err(ParseError::NoHeader),
            ("v", Some(_)) => {
                let id = parse_num(toks.next(), line, "vertex id")?;
                let name = toks.next().ok_or_else(|| syntax(line, "missing vertex label"))?;
                let slot = labels
                    .get_mut(id)
                    .ok_or_else(|| syntax(line, format!("vertex id {id} exceeds header count")))?;
                if slot.is_some() {
                    return Err(ParseError::DuplicateVertex { line, id });
                }
                *slot = Some(dict.intern(name));
            }
            ("e", Some(_)) => {
                let src = parse_num(toks.next(), line, "source")?;
                let dst = parse_num(toks.next(), line, "target")?;
                let name = toks.next().ok_or_else(|| syntax(line, "missing edge label"))?;
                for id in [src, dst] {
                    if labels.get(id).is_none_or(Option::is_none) {
                        return Err(ParseError::UndeclaredVertex { line, id });
                    }
                }
                edges.push((src, dict.intern(name), dst));
            }
            (other, Some(_)) => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
    }

    let (nv, ne) = header.ok_or(ParseError::NoHeader)?;
    let declared = labels.iter().filter(|l| l.is_some()).count();
    if declared != nv {
        return Err(ParseError::CountMismatch { what: "vertices", expected: nv, found: declared });
    }
    let mut b = GraphBuilder::with_vertices(labels.into_iter().map(Option::unwrap));
    for (s, r, d) in edges {
        b.add_edge(s, r, d).expect("endpoints validated");
    }
    let g = b.build();
    if g.edge_count() != ne {
        return Err(ParseError::CountMismatch { what: "edges", expected: ne, found: g.edge_count() });
    }
    Ok(g)
}

pub fn load_graph(path: impl AsRef<Path>, dict: &mut LabelDict) -> Result<Graph, ParseError> {
    parse_graph(&fs::read_to_string(path)?, dict)
}

/// Serializes vertices in id order and edges in (src, label, dst) order.
///
/// Panics if a label id is missing from `dict`.
pub fn format_graph(g: &Graph, dict: &LabelDict) -> String {
    let name = |l| dict.name(l).expect("label not in dictionary");
    let mut out = String::new();
    writeln!(out, "t {} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (v, &l) in g.labels().iter().enumerate() {
        writeln!(out, "v {v} {}", name(l)).unwrap();
    }
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.src, e.dst, name(e.label)).unwrap();
    }
    out
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph, dict: &LabelDict) -> std::io::Result<()> {
    fs::write(path, format_graph(g, dict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Direction;

    #[test]
    fn parses_minimal_file() {
        let mut dict = LabelDict::new();
        let g = parse_graph("# tiny\nt 2 1\nv 0 a\nv 1 b\ne 0 1 r\n", &mut dict).unwrap();
        let r = dict.get("r").unwrap();
        assert_eq!(g.neighbors_with_label(0, r, Direction::Out), &[(r, 1)]);
        assert_eq!(dict.get("a"), Some(0));
        assert_eq!(dict.get("b"), Some(1));
    }

    #[test]
    fn empty_file_has_no_header() {
        let err = parse_graph("", &mut LabelDict::new()).unwrap_err();
        assert_eq!(err.to_string(), "no header (expected `t <nV> <nE>`)");
    }

    #[test]
    fn error_cases_carry_line_numbers() {
        let mut d = LabelDict::new();
        assert!(matches!(
            parse_graph("t 2 0\nv 0 a\nv 0 b\n", &mut d),
            Err(ParseError::DuplicateVertex { line: 3, id: 0 })
        ));
        assert!(matches!(
            parse_graph("t 2 1\nv 0 a\nv 1 a\ne 0 5 r\n", &mut d),
            Err(ParseError::UndeclaredVertex { line: 4, id: 5 })
        ));
        assert!(matches!(
            parse_graph("t 1 0\nv x a\n", &mut d),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(parse_graph("v 0 a\n", &mut d), Err(ParseError::NoHeader)));
    }

    #[test]
    fn roundtrip_is_line_normalized() {
        let text = "t 3 3\nv 0 a\nv 1 b\nv 2 a\ne 2 0 q\ne 0 1 r\ne 0 1 q\n";
        let mut d = LabelDict::new();
        let g = parse_graph(text, &mut d).unwrap();
        let out = format_graph(&g, &d);
        let mut expected: Vec<&str> = text.lines().collect();
        let mut got: Vec<&str> = out.lines().collect();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
        assert_eq!(parse_graph(&out, &mut d).unwrap(), g);
    }
}
