//! Plain-text serialization.
//!
//! Hypergraph format (".h3"): header `h3 <n> <m>`, then m lines `a b c`
//! with 0-based vertices sorted increasingly within each line. Graph format
//! (".g2"): header `g2 <n> <m>`, then m lines `a b` with a < b. Cycle or
//! path files hold a single line of space-separated vertices. All files are
//! LF-terminated. Parse errors carry 1-based line numbers.

use crate::hgraph::{Graph, Hypergraph3};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: vertex {v} out of range (n = {n})")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("line {line}: vertices not sorted increasingly")]
    Unsorted { line: usize },
    #[error("line {line}: duplicate edge")]
    Duplicate { line: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

fn bad(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Malformed { line, msg: msg.into() }
}

fn parse_header<'a>(text: &'a str, magic: &str) -> Result<(usize, usize, std::str::Lines<'a>), ParseError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let mut parts = header.split_whitespace();
    match parts.next() {
        Some(tag) if tag == magic => {}
        Some(tag) => return Err(bad(1, format!("expected header '{magic}', found '{tag}'"))),
        None => return Err(bad(1, "empty header line")),
    }
    let n: usize = parts
        .next()
        .ok_or_else(|| bad(1, "missing vertex count"))?
        .parse()
        .map_err(|_| bad(1, "vertex count is not a number"))?;
    let m: usize = parts
        .next()
        .ok_or_else(|| bad(1, "missing edge count"))?
        .parse()
        .map_err(|_| bad(1, "edge count is not a number"))?;
    if parts.next().is_some() {
        return Err(bad(1, "trailing tokens after header"));
    }
    Ok((n, m, lines))
}

fn parse_row(line_no: usize, line: &str, k: usize, n: usize) -> Result<Vec<usize>, ParseError> {
    let mut vs = Vec::with_capacity(k);
    for tok in line.split_whitespace() {
        let v: usize = tok
            .parse()
            .map_err(|_| bad(line_no, format!("'{tok}' is not a vertex")))?;
        vs.push(v);
    }
    if vs.len() != k {
        return Err(bad(line_no, format!("expected {k} vertices, found {}", vs.len())));
    }
    for &v in &vs {
        if v >= n {
            return Err(ParseError::VertexOutOfRange { line: line_no, v, n });
        }
    }
    if !vs.windows(2).all(|w| w[0] < w[1]) {
        return Err(ParseError::Unsorted { line: line_no });
    }
    Ok(vs)
}

/// Parses the ".h3" hypergraph format.
pub fn parse_h3(text: &str) -> Result<Hypergraph3, ParseError> {
    let (n, m, lines) = parse_header(text, "h3")?;
    let mut triples: Vec<[usize; 3]> = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut line_no = 1;
    for line in lines {
        line_no += 1;
        if line.trim().is_empty() {
            continue;
        }
        let vs = parse_row(line_no, line, 3, n)?;
        let e = [vs[0], vs[1], vs[2]];
        if !seen.insert(e) {
            return Err(ParseError::Duplicate { line: line_no });
        }
        triples.push(e);
    }
    if triples.len() != m {
        return Err(ParseError::EdgeCountMismatch { expected: m, found: triples.len() });
    }
    Ok(Hypergraph3::new(n, triples).expect("rows were validated"))
}

/// Serializes to the ".h3" format (edges in sorted order, LF endings).
pub fn write_h3(h: &Hypergraph3) -> String {
    let mut out = String::new();
    writeln!(out, "h3 {} {}", h.n(), h.edge_count()).unwrap();
    for &[a, b, c] in h.edges() {
        writeln!(out, "{a} {b} {c}").unwrap();
    }
    out
}

/// Parses the ".g2" graph format. The vertex set is all of 0..n.
pub fn parse_g2(text: &str) -> Result<Graph, ParseError> {
    let (n, m, lines) = parse_header(text, "g2")?;
    let mut g = Graph::full_vertex_set(n);
    let mut found = 0;
    let mut line_no = 1;
    for line in lines {
        line_no += 1;
        if line.trim().is_empty() {
            continue;
        }
        let vs = parse_row(line_no, line, 2, n)?;
        if g.has_edge(vs[0], vs[1]) {
            return Err(ParseError::Duplicate { line: line_no });
        }
        g.add_edge(vs[0], vs[1]);
        found += 1;
    }
    if found != m {
        return Err(ParseError::EdgeCountMismatch { expected: m, found });
    }
    Ok(g)
}

/// Serializes to the ".g2" format.
pub fn write_g2(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "g2 {} {}", g.ambient_n(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Parses a vertex sequence file: one line of space-separated vertices.
pub fn parse_seq(text: &str) -> Result<Vec<usize>, ParseError> {
    let line = text.lines().next().unwrap_or("");
    let mut vs = Vec::new();
    for tok in line.split_whitespace() {
        let v: usize = tok
            .parse()
            .map_err(|_| bad(1, format!("'{tok}' is not a vertex")))?;
        vs.push(v);
    }
    if vs.is_empty() {
        return Err(bad(1, "empty vertex sequence"));
    }
    Ok(vs)
}

/// Serializes a vertex sequence to a single LF-terminated line.
pub fn write_seq(seq: &[usize]) -> String {
    let mut out = String::new();
    for (i, v) in seq.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
    out
}
