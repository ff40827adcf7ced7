//! Readers and writers for the supported text formats.
//!
//! Edge lists: one edge per line as two whitespace-separated vertex tokens;
//! `#` starts a comment. Vertices are numbered in order of first
//! appearance, which also fixes the vertex order used elsewhere.
//!
//! Bigraphs: two edge-list blocks separated by a line containing `---`; the
//! k-th edge of each block forms one biedge.
//!
//! graph6: the standard printable encoding of simple graphs on labeled
//! vertices `0..n`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Bigraph, MultiGraph, VertexId};

/// A graph together with the vertex tokens it was parsed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedGraph {
    pub graph: MultiGraph,
    /// `names[i]` is the token of `VertexId(i)`.
    pub names: Vec<String>,
}

impl NamedGraph {
    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0 as usize]
    }

    pub fn vertex(&self, token: &str) -> Option<VertexId> {
        self.names
            .iter()
            .position(|n| n == token)
            .map(|i| VertexId(i as u32))
    }
}

/// A parsed bigraph with the token tables of both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedBigraph {
    pub bigraph: Bigraph,
    pub g_names: Vec<String>,
    pub h_names: Vec<String>,
}

struct EdgeListBuilder {
    graph: MultiGraph,
    names: Vec<String>,
    ids: BTreeMap<String, VertexId>,
}

impl EdgeListBuilder {
    fn new() -> Self {
        EdgeListBuilder {
            graph: MultiGraph::new(),
            names: Vec::new(),
            ids: BTreeMap::new(),
        }
    }

    fn vertex(&mut self, token: &str) -> VertexId {
        if let Some(&v) = self.ids.get(token) {
            return v;
        }
        let v = VertexId(self.names.len() as u32);
        self.names.push(token.to_string());
        self.ids.insert(token.to_string(), v);
        self.graph.add_vertex(v);
        v
    }

    fn line(&mut self, line_no: usize, line: &str) -> Result<()> {
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] => Ok(()),
            [u, v] => {
                let a = self.vertex(u);
                let b = self.vertex(v);
                self.graph.add_edge(a, b);
                Ok(())
            }
            _ => Err(Error::Parse {
                line: line_no,
                message: format!(
                    "expected two vertex tokens, found {}: {:?}",
                    tokens.len(),
                    tokens
                ),
            }),
        }
    }

    fn finish(self) -> NamedGraph {
        NamedGraph {
            graph: self.graph,
            names: self.names,
        }
    }
}

/// Parses a single edge-list block. An empty input yields the empty graph.
pub fn parse_edge_list(text: &str) -> Result<NamedGraph> {
    let mut builder = EdgeListBuilder::new();
    for (i, line) in text.lines().enumerate() {
        builder.line(i + 1, line)?;
    }
    Ok(builder.finish())
}

fn is_separator(line: &str) -> bool {
    line.split('#').next().unwrap_or("").trim() == "---"
}

/// True when the text contains a bigraph block separator.
pub fn looks_like_bigraph(text: &str) -> bool {
    text.lines().any(is_separator)
}

/// Parses two edge-list blocks separated by `---` and pairs their edges in
/// order of appearance.
pub fn parse_bigraph(text: &str) -> Result<NamedBigraph> {
    let mut first = EdgeListBuilder::new();
    let mut second = EdgeListBuilder::new();
    let mut separator_line = None;
    for (i, line) in text.lines().enumerate() {
        if is_separator(line) {
            if separator_line.is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "more than one --- separator".into(),
                });
            }
            separator_line = Some(i + 1);
            continue;
        }
        if separator_line.is_none() {
            first.line(i + 1, line)?;
        } else {
            second.line(i + 1, line)?;
        }
    }
    let Some(separator) = separator_line else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing --- separator between the two sides".into(),
        });
    };
    let g = first.finish();
    let h = second.finish();
    if g.graph.edge_count() != h.graph.edge_count() {
        return Err(Error::Parse {
            line: separator,
            message: format!(
                "the two sides must have the same number of edges ({} vs {})",
                g.graph.edge_count(),
                h.graph.edge_count()
            ),
        });
    }
    Ok(NamedBigraph {
        bigraph: Bigraph::new(g.graph, h.graph)?,
        g_names: g.names,
        h_names: h.names,
    })
}

/// Writes an edge list, one `u v` line per edge in identifier order. With
/// `names`, vertices print as their tokens, otherwise as bare numbers.
pub fn write_edge_list(g: &MultiGraph, names: Option<&[String]>) -> String {
    let mut out = String::new();
    for (_, e) in g.edges() {
        let (a, b) = e.pair();
        let token = |v: VertexId| match names {
            Some(n) => n[v.0 as usize].clone(),
            None => v.0.to_string(),
        };
        out.push_str(&token(a));
        out.push(' ');
        out.push_str(&token(b));
        out.push('\n');
    }
    out
}

const GRAPH6_OFFSET: u32 = 63;

fn push_bits(bits: &mut Vec<bool>, value: u64, width: usize) {
    for k in (0..width).rev() {
        bits.push(value & (1 << k) != 0);
    }
}

fn bits_to_chars(bits: &[bool]) -> String {
    let mut out = String::new();
    for chunk in bits.chunks(6) {
        let mut v = 0u32;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                v |= 1 << (5 - i);
            }
        }
        out.push(char::from_u32(v + GRAPH6_OFFSET).unwrap());
    }
    out
}

/// Encodes a simple graph in graph6. Vertices are relabeled `0..n` in
/// ascending identifier order.
pub fn write_graph6(g: &MultiGraph) -> Result<String> {
    if !g.is_simple() {
        return Err(Error::NotSimple(
            "graph6 encodes simple graphs only".into(),
        ));
    }
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut header = String::new();
    match n {
        0..=62 => header.push(char::from_u32(n as u32 + GRAPH6_OFFSET).unwrap()),
        63..=258047 => {
            header.push('~');
            let mut bits = Vec::new();
            push_bits(&mut bits, n as u64, 18);
            header.push_str(&bits_to_chars(&bits));
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "graph6 writer supports up to 258047 vertices (got {n})"
            )))
        }
    }
    let mut adj = vec![false; n * n];
    for (_, e) in g.edges() {
        let (a, b) = e.pair();
        let (i, j) = (index[&a], index[&b]);
        adj[i * n + j] = true;
        adj[j * n + i] = true;
    }
    let mut bits = Vec::with_capacity(n * (n - 1) / 2 + 6);
    for j in 1..n {
        for i in 0..j {
            bits.push(adj[i * n + j]);
        }
    }
    while bits.len() % 6 != 0 {
        bits.push(false);
    }
    Ok(format!("{header}{}", bits_to_chars(&bits)))
}

/// Decodes one graph6 line into a simple graph on vertices `0..n`.
pub fn parse_graph6(line: &str) -> Result<MultiGraph> {
    let parse_err = |message: String| Error::Parse { line: 1, message };
    let bytes: Vec<u32> = line.trim().chars().map(|c| c as u32).collect();
    if bytes.is_empty() {
        return Err(parse_err("empty graph6 string".into()));
    }
    for &b in &bytes {
        if !(GRAPH6_OFFSET..=126).contains(&b) {
            return Err(parse_err(format!("invalid graph6 character code {b}")));
        }
    }
    let (n, mut pos) = if bytes[0] == 126 {
        if bytes.len() >= 2 && bytes[1] == 126 {
            return Err(parse_err("graph6 inputs beyond 258047 vertices are not supported".into()));
        }
        if bytes.len() < 4 {
            return Err(parse_err("truncated graph6 size field".into()));
        }
        let mut n = 0usize;
        for &b in &bytes[1..4] {
            n = (n << 6) | (b - GRAPH6_OFFSET) as usize;
        }
        (n, 4)
    } else {
        ((bytes[0] - GRAPH6_OFFSET) as usize, 1)
    };
    let needed = n * n.saturating_sub(1) / 2;
    let available = (bytes.len() - pos) * 6;
    if available < needed {
        return Err(parse_err(format!(
            "graph6 body too short: {available} bits for {needed} adjacency entries"
        )));
    }
    let mut g = MultiGraph::new();
    for v in 0..n {
        g.add_vertex(VertexId(v as u32));
    }
    let mut bit_in_char = 0usize;
    for j in 1..n {
        for i in 0..j {
            let word = bytes[pos] - GRAPH6_OFFSET;
            if word & (1 << (5 - bit_in_char)) != 0 {
                g.add_edge(VertexId(i as u32), VertexId(j as u32));
            }
            bit_in_char += 1;
            if bit_in_char == 6 {
                bit_in_char = 0;
                pos += 1;
            }
        }
    }
    Ok(g)
}
