//! Plain-text graph files.
//!
//! ```text
//! # optional comment lines
//! graph 4
//! junctions 2
//! 0 2
//! 1 3
//! ```
//!
//! A `long_edge_graph N` header takes `u v length` lines instead. Edges are
//! written with `u < v` in sorted order, so output is byte-stable. The
//! optional `junctions J` line marks vertices `0..J` as the junctions of a
//! subdivision, junction `i` at vertex `i`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, LongEdgeGraph, VertexTag};

/// Either kind of graph file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphFile {
    Unit(Graph),
    LongEdge(LongEdgeGraph),
}

impl GraphFile {
    /// Unit graph, subdividing long edges under `cap`.
    pub fn into_graph(self, cap: usize) -> Result<Graph> {
        match self {
            GraphFile::Unit(g) => Ok(g),
            GraphFile::LongEdge(g) => g.subdivide(cap),
        }
    }
}

pub fn write_graph(g: &Graph, comments: &[String]) -> String {
    let mut out = header(comments);
    writeln!(out, "graph {}", g.vertex_count()).unwrap();
    if let Some(tags) = g.tags() {
        let junctions = tags.iter().filter(|t| matches!(t, VertexTag::Junction(_))).count();
        writeln!(out, "junctions {junctions}").unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_long_edge_graph(g: &LongEdgeGraph, comments: &[String]) -> String {
    let mut out = header(comments);
    writeln!(out, "long_edge_graph {}", g.junction_count()).unwrap();
    for &(u, v, len) in g.edges() {
        writeln!(out, "{u} {v} {len}").unwrap();
    }
    out
}

fn header(comments: &[String]) -> String {
    comments.iter().map(|c| format!("# {c}\n")).collect()
}

pub fn read_graph_file(text: &str) -> Result<GraphFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, head) = lines.next().ok_or_else(|| Error::Malformed("empty graph file".into()))?;
    let mut parts = head.split_whitespace();
    let kind = parts.next().unwrap_or_default();
    let n: usize = parse_field(parts.next(), 1, "vertex count")?;
    let long = match kind {
        "graph" => false,
        "long_edge_graph" => true,
        other => return Err(Error::Malformed(format!("unknown graph header {other:?}"))),
    };
    let mut junctions = None;
    let mut unit = Vec::new();
    let mut weighted = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.first() == Some(&"junctions") && !long {
            junctions = Some(parse_field::<usize>(fields.get(1).copied(), line_no, "junction count")?);
            continue;
        }
        let want = if long { 3 } else { 2 };
        if fields.len() != want {
            return Err(Error::Malformed(format!("line {line_no}: expected {want} fields, got {}", fields.len())));
        }
        let u = parse_field(Some(fields[0]), line_no, "endpoint")?;
        let v = parse_field(Some(fields[1]), line_no, "endpoint")?;
        if long {
            weighted.push((u, v, parse_field(Some(fields[2]), line_no, "length")?));
        } else {
            unit.push((u, v));
        }
    }
    if long {
        return Ok(GraphFile::LongEdge(LongEdgeGraph::new(n, &weighted)?));
    }
    let mut g = Graph::from_edges(n, &unit)?;
    if let Some(j) = junctions {
        if j > n {
            return Err(Error::Malformed(format!("{j} junctions in a {n}-vertex graph")));
        }
        let tags = (0..n).map(|v| if v < j { VertexTag::Junction(v) } else { VertexTag::Interior }).collect();
        g = g.with_tags(tags)?;
    }
    Ok(GraphFile::Unit(g))
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| Error::Malformed(format!("line {line}: bad {what}")))
}
