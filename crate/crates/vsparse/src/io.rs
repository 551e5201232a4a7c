//! Graph file format.
//!
//! ```text
//! graph <directed|undirected> <cut|length|none>
//! vertices <n>
//! terminals <id> [<id> ...]
//! e <tail> <head> <weight>
//! ```
//!
//! Weights are `num` or `num/den`. Lines starting with `#` and blank lines
//! are comments. Vertex ids in a file are implicitly `0..n-1`.
//!
//! Canonical form: no plain comments, vertices ascending (serialization
//! relabels sparse ids densely, preserving order), undirected edges with the
//! lower endpoint first, edges sorted by (tail, head, weight), and vertex grid
//! coordinates, when present, appended as machine-readable
//! `# coord <id> <row> <col>` comment lines that conforming readers may skip.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::graph::{ParseError, TerminalGraph, VertexId, WeightMode};
use crate::weight::Weight;

pub fn parse_graph(text: &str) -> Result<TerminalGraph, ParseError> {
    let mut g: Option<TerminalGraph> = None;
    let mut n: Option<usize> = None;
    let mut saw_terminals = false;
    let mut coords: Vec<(usize, VertexId, u32, u32)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            // `# coord <id> <row> <col>` carries optional grid coordinates.
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() == 4 && toks[0] == "coord" {
                let id = parse_num(toks[1], no)?;
                let r = parse_num(toks[2], no)?;
                let c = parse_num(toks[3], no)?;
                coords.push((no, VertexId(id), r, c));
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "graph" => {
                if g.is_some() {
                    return Err(ParseError::at(no, "duplicate header"));
                }
                if toks.len() != 3 {
                    return Err(ParseError::at(no, "header needs direction and mode"));
                }
                let directed = match toks[1] {
                    "directed" => true,
                    "undirected" => false,
                    other => {
                        return Err(ParseError::at(no, format!("bad direction {other:?}")));
                    }
                };
                let mode = match toks[2] {
                    "cut" => WeightMode::Cut,
                    "length" => WeightMode::Length,
                    "none" => WeightMode::None,
                    other => return Err(ParseError::at(no, format!("bad mode {other:?}"))),
                };
                g = Some(TerminalGraph::new(directed, mode));
            }
            "vertices" => {
                let graph = g
                    .as_mut()
                    .ok_or_else(|| ParseError::at(no, "vertices before header"))?;
                if n.is_some() {
                    return Err(ParseError::at(no, "duplicate vertices line"));
                }
                if toks.len() != 2 {
                    return Err(ParseError::at(no, "vertices needs a count"));
                }
                let count = parse_num(toks[1], no)? as usize;
                for _ in 0..count {
                    graph.add_vertex();
                }
                n = Some(count);
            }
            "terminals" => {
                let graph = g
                    .as_mut()
                    .ok_or_else(|| ParseError::at(no, "terminals before header"))?;
                let count = n.ok_or_else(|| ParseError::at(no, "terminals before vertices"))?;
                if saw_terminals {
                    return Err(ParseError::at(no, "duplicate terminals line"));
                }
                if toks.len() < 2 {
                    return Err(ParseError::at(no, "at least one terminal is required"));
                }
                for t in &toks[1..] {
                    let id = parse_num(t, no)?;
                    if id as usize >= count {
                        return Err(ParseError::at(no, format!("terminal {id} out of range")));
                    }
                    if graph.is_terminal(VertexId(id)) {
                        return Err(ParseError::at(no, format!("terminal {id} repeated")));
                    }
                    graph.make_terminal(VertexId(id));
                }
                saw_terminals = true;
            }
            "e" => {
                let graph = g
                    .as_mut()
                    .ok_or_else(|| ParseError::at(no, "edge before header"))?;
                let count = n.ok_or_else(|| ParseError::at(no, "edge before vertices"))?;
                if !saw_terminals {
                    return Err(ParseError::at(no, "edge before terminals"));
                }
                if toks.len() != 4 {
                    return Err(ParseError::at(no, "edge needs tail, head, weight"));
                }
                let u = parse_num(toks[1], no)?;
                let v = parse_num(toks[2], no)?;
                if u as usize >= count || v as usize >= count {
                    return Err(ParseError::at(no, "edge endpoint out of range"));
                }
                if u == v {
                    return Err(ParseError::at(no, "self-loops are not allowed"));
                }
                let w: Weight = match graph.mode() {
                    // Reachability instances ignore weights; normalize to 1.
                    WeightMode::None => {
                        toks[3]
                            .parse::<Weight>()
                            .map_err(|e| ParseError::at(no, e.to_string()))?;
                        Weight::one()
                    }
                    _ => toks[3]
                        .parse()
                        .map_err(|e: crate::weight::ParseWeightError| {
                            ParseError::at(no, e.to_string())
                        })?,
                };
                graph.add_edge(VertexId(u), VertexId(v), w);
            }
            other => return Err(ParseError::at(no, format!("unknown line kind {other:?}"))),
        }
    }

    let graph = g.ok_or_else(|| ParseError::at(1, "missing header"))?;
    if n.is_none() {
        return Err(ParseError::at(1, "missing vertices line"));
    }
    if !saw_terminals {
        return Err(ParseError::at(1, "missing terminals line"));
    }
    let mut graph = graph;
    for (no, v, r, c) in coords {
        if !graph.has_vertex(v) {
            return Err(ParseError::at(no, format!("coord for unknown vertex {v}")));
        }
        graph.set_coord(v, Some((r, c)));
    }
    Ok(graph)
}

fn parse_num(s: &str, no: usize) -> Result<u32, ParseError> {
    s.parse::<u32>()
        .map_err(|_| ParseError::at(no, format!("bad number {s:?}")))
}

/// Canonical serialization. Vertex ids are relabeled densely to `0..n-1`
/// preserving ascending order, so `parse(serialize(g))` is the identity on
/// already-canonical graphs and a pure relabeling otherwise.
pub fn serialize_graph(g: &TerminalGraph) -> String {
    let relabel: BTreeMap<VertexId, u32> = g
        .vertices()
        .enumerate()
        .map(|(i, v)| (v, i as u32))
        .collect();
    let direction = if g.directed() { "directed" } else { "undirected" };
    let mut out = String::new();
    writeln!(out, "graph {} {}", direction, g.mode().as_str()).unwrap();
    writeln!(out, "vertices {}", g.n()).unwrap();
    let mut terms: Vec<u32> = g.terminals().map(|t| relabel[&t]).collect();
    terms.sort_unstable();
    out.push_str("terminals");
    for t in terms {
        write!(out, " {t}").unwrap();
    }
    out.push('\n');

    let mut rows: Vec<(u32, u32, Weight)> = g
        .edge_ids()
        .map(|id| {
            let e = g.edge(id);
            let (mut a, mut b) = (relabel[&e.u], relabel[&e.v]);
            if !g.directed() && a > b {
                std::mem::swap(&mut a, &mut b);
            }
            let w = match g.mode() {
                WeightMode::None => Weight::one(),
                _ => e.w.clone(),
            };
            (a, b, w)
        })
        .collect();
    rows.sort();
    for (a, b, w) in rows {
        writeln!(out, "e {a} {b} {w}").unwrap();
    }

    for (&v, &dense) in &relabel {
        if let Some((r, c)) = g.coord(v) {
            writeln!(out, "# coord {dense} {r} {c}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demand graph
graph directed none
vertices 4
terminals 0 3
e 0 1 1
e 1 3 1
e 0 2 1
e 2 3 1
";

    #[test]
    fn parse_then_serialize_is_canonical_fixpoint() {
        let g = parse_graph(SAMPLE).unwrap();
        let once = serialize_graph(&g);
        let twice = serialize_graph(&parse_graph(&once).unwrap());
        assert_eq!(once, twice);
        assert_eq!(g.n(), 4);
        assert_eq!(g.k(), 2);
        assert_eq!(g.m(), 4);
    }

    #[test]
    fn sparse_ids_relabel_densely() {
        let mut g = parse_graph(SAMPLE).unwrap();
        g.apply_minor_op_mut(crate::graph::MinorOp::DeleteVertex(VertexId(1)))
            .unwrap();
        let text = serialize_graph(&g);
        // Vertex 2 becomes 1, vertex 3 becomes 2.
        assert!(text.contains("vertices 3"));
        assert!(text.contains("terminals 0 2"));
        assert!(text.contains("e 0 1 1"));
        assert!(text.contains("e 1 2 1"));
    }

    #[test]
    fn weights_and_modes_round_trip() {
        let text = "\
graph undirected cut
vertices 3
terminals 0 1
e 0 1 5/2
e 1 2 3
";
        let g = parse_graph(text).unwrap();
        assert_eq!(serialize_graph(&g), text);
    }

    #[test]
    fn coord_comments_round_trip() {
        let text = "\
graph undirected cut
vertices 2
terminals 0
e 0 1 1
# coord 0 1 1
# coord 1 1 2
";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.coord(VertexId(1)), Some((1, 2)));
        assert_eq!(serialize_graph(&g), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "graph directed none\nvertices 2\nterminals 0\ne 0 5 1\n";
        let err = parse_graph(bad).unwrap_err();
        assert_eq!(err.line, 4);

        let bad2 = "graph sideways none\n";
        assert_eq!(parse_graph(bad2).unwrap_err().line, 1);

        let bad3 = "graph directed none\nvertices 2\nterminals\n";
        assert_eq!(parse_graph(bad3).unwrap_err().line, 3);
    }

    #[test]
    fn mode_none_normalizes_weights() {
        let text = "graph directed none\nvertices 2\nterminals 0\ne 0 1 7/3\n";
        let g = parse_graph(text).unwrap();
        let e = g.edge(crate::graph::EdgeId(0));
        assert_eq!(e.w, Weight::one());
    }
}
