//! Terminal-labeled graphs, minor operations and replayable minor witnesses.
//!
//! A `TerminalGraph` is a directed or undirected multigraph with exact
//! rational edge weights, a distinguished terminal set, and stable vertex and
//! edge ids. Ids are never reused after deletion, and every edge keeps its id
//! across contractions, which lets later pipeline stages map edges of a minor
//! back to edges of the original graph.
//!
//! Minor construction is logged as a `MinorTrace`, an ordered list of
//! delete-vertex / delete-edge / contract-edge operations. Replaying a trace
//! on the input reproduces the claimed output and yields the branch-set
//! mapping, so any consumer can check a sparsifier witness independently of
//! the code that produced it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::weight::Weight;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What the edge weights mean. Mirrors the file-format mode field.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WeightMode {
    /// Capacities of an undirected flow network.
    Cut,
    /// Lengths of a metric network.
    Length,
    /// Weights carry no meaning (reachability instances).
    None,
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::Cut => "cut",
            WeightMode::Length => "length",
            WeightMode::None => "none",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    /// Tail for directed graphs; first endpoint for undirected ones.
    pub u: VertexId,
    /// Head for directed graphs; second endpoint for undirected ones.
    pub v: VertexId,
    pub w: Weight,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VertexInfo {
    /// Optional planar grid coordinate (row, col), carried by generators.
    pub coord: Option<(u32, u32)>,
}

/// Distinct ordered terminal pairs, the demand set of reachability
/// sparsification.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PairSet(Vec<(VertexId, VertexId)>);

impl PairSet {
    /// Validates: entries distinct, s != t, both endpoints terminals of `g`.
    pub fn new(pairs: Vec<(VertexId, VertexId)>, g: &TerminalGraph) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &(s, t) in &pairs {
            if s == t {
                return Err(GraphError::BadPair(s, t));
            }
            if !g.is_terminal(s) || !g.is_terminal(t) {
                return Err(GraphError::BadPair(s, t));
            }
            if !seen.insert((s, t)) {
                return Err(GraphError::BadPair(s, t));
            }
        }
        Ok(PairSet(pairs))
    }

    /// Validates: entries distinct, s != t, both endpoints vertices of `g`.
    /// Endpoints need not be terminals; composite constructions route
    /// reachability through intermediate waypoint vertices.
    pub fn waypoints(pairs: Vec<(VertexId, VertexId)>, g: &TerminalGraph) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &(s, t) in &pairs {
            if s == t || !g.has_vertex(s) || !g.has_vertex(t) {
                return Err(GraphError::BadPair(s, t));
            }
            if !seen.insert((s, t)) {
                return Err(GraphError::BadPair(s, t));
            }
        }
        Ok(PairSet(pairs))
    }

    /// All ordered pairs of distinct terminals of `g`.
    pub fn complete(g: &TerminalGraph) -> Self {
        let ks: Vec<_> = g.terminals().collect();
        let mut pairs = Vec::new();
        for &s in &ks {
            for &t in &ks {
                if s != t {
                    pairs.push((s, t));
                }
            }
        }
        PairSet(pairs)
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    NoVertex(VertexId),
    #[error("edge {0} does not exist")]
    NoEdge(EdgeId),
    #[error("vertex {0} is a terminal and cannot be deleted")]
    DeleteTerminal(VertexId),
    #[error("contracting edge {0} would merge two terminals")]
    MergeTerminals(EdgeId),
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("invalid terminal pair ({0}, {1})")]
    BadPair(VertexId, VertexId),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TerminalGraph {
    directed: bool,
    mode: WeightMode,
    vertices: BTreeMap<VertexId, VertexInfo>,
    terminals: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
    // Incident edge ids per vertex; kept in sync with `edges` by every
    // mutating method.
    incidence: BTreeMap<VertexId, BTreeSet<EdgeId>>,
    next_vertex: u32,
    next_edge: u32,
}

impl TerminalGraph {
    pub fn new(directed: bool, mode: WeightMode) -> Self {
        TerminalGraph {
            directed,
            mode,
            vertices: BTreeMap::new(),
            terminals: BTreeSet::new(),
            edges: BTreeMap::new(),
            incidence: BTreeMap::new(),
            next_vertex: 0,
            next_edge: 0,
        }
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: WeightMode) {
        self.mode = mode;
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn nonterminal_count(&self) -> usize {
        self.n() - self.k()
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.insert(id, VertexInfo::default());
        self.incidence.insert(id, BTreeSet::new());
        id
    }

    /// Inserts a vertex with a caller-chosen id. Panics if taken or if it
    /// would break id monotonicity guarantees.
    pub fn add_vertex_with_id(&mut self, id: VertexId) {
        assert!(
            !self.vertices.contains_key(&id),
            "vertex id {id} already in use"
        );
        self.vertices.insert(id, VertexInfo::default());
        self.incidence.insert(id, BTreeSet::new());
        self.next_vertex = self.next_vertex.max(id.0 + 1);
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn set_coord(&mut self, v: VertexId, coord: Option<(u32, u32)>) {
        self.vertices.get_mut(&v).expect("no such vertex").coord = coord;
    }

    pub fn coord(&self, v: VertexId) -> Option<(u32, u32)> {
        self.vertices.get(&v).and_then(|i| i.coord)
    }

    pub fn make_terminal(&mut self, v: VertexId) {
        assert!(self.vertices.contains_key(&v), "no such vertex {v}");
        self.terminals.insert(v);
    }

    pub fn clear_terminal(&mut self, v: VertexId) {
        self.terminals.remove(&v);
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminals.contains(&v)
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.terminals.iter().copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .keys()
            .copied()
            .filter(|v| !self.terminals.contains(v))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        self.edges.get(&e).expect("no such edge")
    }

    pub fn try_edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(&e)
    }

    pub fn set_weight(&mut self, e: EdgeId, w: Weight) {
        self.edges.get_mut(&e).expect("no such edge").w = w;
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: Weight) -> EdgeId {
        assert!(u != v, "self-loops are not allowed");
        assert!(self.vertices.contains_key(&u), "no such vertex {u}");
        assert!(self.vertices.contains_key(&v), "no such vertex {v}");
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(id, Edge { u, v, w });
        self.index_edge(id, u, v);
        id
    }

    /// Inserts an edge with a caller-chosen id. Panics if the id is taken.
    /// Used by derived graphs that must share edge ids with their origin.
    pub fn add_edge_with_id(&mut self, id: EdgeId, u: VertexId, v: VertexId, w: Weight) {
        assert!(u != v, "self-loops are not allowed");
        assert!(self.vertices.contains_key(&u), "no such vertex {u}");
        assert!(self.vertices.contains_key(&v), "no such vertex {v}");
        assert!(!self.edges.contains_key(&id), "edge id {id} already in use");
        self.edges.insert(id, Edge { u, v, w });
        self.index_edge(id, u, v);
        self.next_edge = self.next_edge.max(id.0 + 1);
    }

    fn index_edge(&mut self, id: EdgeId, u: VertexId, v: VertexId) {
        self.incidence.get_mut(&u).unwrap().insert(id);
        self.incidence.get_mut(&v).unwrap().insert(id);
    }

    fn unindex_edge(&mut self, id: EdgeId, u: VertexId, v: VertexId) {
        self.incidence.get_mut(&u).unwrap().remove(&id);
        self.incidence.get_mut(&v).unwrap().remove(&id);
    }

    /// Edges incident to `v` in either direction, ascending by id.
    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        self.incidence
            .get(&v)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    /// Undirected degree: number of incident edges (parallels counted).
    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence.get(&v).map_or(0, |s| s.len())
    }

    /// Distinct neighbors of `v` in the underlying undirected graph.
    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.incidence
            .get(&v)
            .map(|s| s.iter().map(|id| self.edges[id].other(v)).collect())
            .unwrap_or_default()
    }

    /// Out-adjacency for directed graphs: (edge id, head), ascending.
    pub fn out_edges(&self, v: VertexId) -> Vec<(EdgeId, VertexId)> {
        assert!(self.directed);
        self.incidence
            .get(&v)
            .map(|s| {
                s.iter()
                    .filter(|id| self.edges[id].u == v)
                    .map(|id| (*id, self.edges[id].v))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn in_edges(&self, v: VertexId) -> Vec<(EdgeId, VertexId)> {
        assert!(self.directed);
        self.incidence
            .get(&v)
            .map(|s| {
                s.iter()
                    .filter(|id| self.edges[id].v == v)
                    .map(|id| (*id, self.edges[id].u))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_edges(v).len()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges(v).len()
    }

    /// Adjacency index: per vertex, incident (edge, other endpoint) pairs,
    /// both directions. One O(m) pass; use for traversal-heavy code.
    pub fn adjacency(&self) -> BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> {
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> =
            self.vertices.keys().map(|&v| (v, Vec::new())).collect();
        for (&id, e) in &self.edges {
            adj.get_mut(&e.u).unwrap().push((id, e.v));
            adj.get_mut(&e.v).unwrap().push((id, e.u));
        }
        adj
    }

    /// Directed out-adjacency index.
    pub fn out_adjacency(&self) -> BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> {
        assert!(self.directed);
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> =
            self.vertices.keys().map(|&v| (v, Vec::new())).collect();
        for (&id, e) in &self.edges {
            adj.get_mut(&e.u).unwrap().push((id, e.v));
        }
        adj
    }

    /// Directed in-adjacency index.
    pub fn in_adjacency(&self) -> BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> {
        assert!(self.directed);
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> =
            self.vertices.keys().map(|&v| (v, Vec::new())).collect();
        for (&id, e) in &self.edges {
            adj.get_mut(&e.v).unwrap().push((id, e.u));
        }
        adj
    }

    /// Induced subgraph on `keep`, preserving ids, weights, coordinates and
    /// terminal status. A derived value, not a minor-traced operation.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> TerminalGraph {
        let mut g = TerminalGraph::new(self.directed, self.mode);
        g.next_vertex = self.next_vertex;
        g.next_edge = self.next_edge;
        for (&v, info) in &self.vertices {
            if keep.contains(&v) {
                g.vertices.insert(v, info.clone());
                g.incidence.insert(v, BTreeSet::new());
                if self.terminals.contains(&v) {
                    g.terminals.insert(v);
                }
            }
        }
        for (&id, e) in &self.edges {
            if keep.contains(&e.u) && keep.contains(&e.v) {
                g.edges.insert(id, e.clone());
                g.index_edge(id, e.u, e.v);
            }
        }
        g
    }

    /// Vertices of the weakly connected component containing `start`.
    pub fn component_of(&self, start: VertexId) -> BTreeSet<VertexId> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(_, u) in &adj[&v] {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// All weakly connected components, each sorted, ordered by minimum id.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut left: BTreeSet<VertexId> = self.vertices().collect();
        let mut out = Vec::new();
        while let Some(&start) = left.iter().next() {
            let comp = self.component_of(start);
            for v in &comp {
                left.remove(v);
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Applies one minor operation in place. Returns the event for tracing.
    pub fn apply_minor_op_mut(&mut self, op: MinorOp) -> Result<(), GraphError> {
        match op {
            MinorOp::DeleteVertex(v) => {
                if !self.vertices.contains_key(&v) {
                    return Err(GraphError::NoVertex(v));
                }
                if self.terminals.contains(&v) {
                    return Err(GraphError::DeleteTerminal(v));
                }
                let ids: Vec<EdgeId> = self.incident_edges(v);
                for id in ids {
                    let e = self.edges.remove(&id).unwrap();
                    let other = e.other(v);
                    self.incidence.get_mut(&other).unwrap().remove(&id);
                }
                self.incidence.remove(&v);
                self.vertices.remove(&v);
                Ok(())
            }
            MinorOp::DeleteEdge(e) => {
                let Some(edge) = self.edges.remove(&e) else {
                    return Err(GraphError::NoEdge(e));
                };
                self.unindex_edge(e, edge.u, edge.v);
                Ok(())
            }
            MinorOp::ContractEdge(eid, survivor) => {
                let e = self.edges.get(&eid).ok_or(GraphError::NoEdge(eid))?.clone();
                if e.u == e.v {
                    return Err(GraphError::SelfLoop(eid));
                }
                if self.terminals.contains(&e.u) && self.terminals.contains(&e.v) {
                    return Err(GraphError::MergeTerminals(eid));
                }
                let expect = self.contraction_survivor(e.u, e.v);
                if survivor != expect {
                    // Survivor is determined by the endpoint rule; a trace
                    // claiming otherwise is invalid.
                    return Err(GraphError::NoVertex(survivor));
                }
                let loser = if expect == e.u { e.v } else { e.u };
                self.edges.remove(&eid);
                self.unindex_edge(eid, e.u, e.v);
                let loser_ids: Vec<EdgeId> = self.incident_edges(loser);
                for id in loser_ids {
                    let edge = self.edges.get_mut(&id).unwrap();
                    if edge.u == loser {
                        edge.u = expect;
                    }
                    if edge.v == loser {
                        edge.v = expect;
                    }
                    if edge.u == edge.v {
                        self.edges.remove(&id);
                        self.incidence.get_mut(&expect).unwrap().remove(&id);
                    } else {
                        self.incidence.get_mut(&expect).unwrap().insert(id);
                    }
                }
                self.incidence.remove(&loser);
                self.vertices.remove(&loser);
                Ok(())
            }
        }
    }

    /// Contraction direction rule: the terminal survives when exactly one
    /// endpoint is a terminal, otherwise the lower id survives.
    pub fn contraction_survivor(&self, u: VertexId, v: VertexId) -> VertexId {
        let (tu, tv) = (self.terminals.contains(&u), self.terminals.contains(&v));
        match (tu, tv) {
            (true, false) => u,
            (false, true) => v,
            _ => u.min(v),
        }
    }

    /// Canonical statistics record.
    pub fn stats(&self) -> GraphStats {
        GraphStats {
            n: self.n(),
            m: self.m(),
            k: self.k(),
            nonterminals: self.nonterminal_count(),
            mode: self.mode.as_str(),
            directed: self.directed,
        }
    }
}

/// Canonical JSON statistics. Field order is part of the format.
#[derive(Serialize, Debug, PartialEq, Eq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub nonterminals: usize,
    pub mode: &'static str,
    pub directed: bool,
}

/// One step of a minor construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MinorOp {
    DeleteVertex(VertexId),
    DeleteEdge(EdgeId),
    /// Contract this edge; the recorded survivor must match the direction
    /// rule, making replays unambiguous.
    ContractEdge(EdgeId, VertexId),
}

/// Ordered, replayable log of minor operations.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MinorTrace {
    pub ops: Vec<MinorOp>,
}

impl MinorTrace {
    pub fn push(&mut self, op: MinorOp) {
        self.ops.push(op);
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Line format: `dv <id>` / `de <id>` / `ce <edge> <survivor>`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for op in &self.ops {
            match op {
                MinorOp::DeleteVertex(v) => s.push_str(&format!("dv {v}\n")),
                MinorOp::DeleteEdge(e) => s.push_str(&format!("de {e}\n")),
                MinorOp::ContractEdge(e, v) => s.push_str(&format!("ce {e} {v}\n")),
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut ops = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = || ParseError::at(no + 1, format!("bad trace line {line:?}"));
            let num = |s: &str| s.parse::<u32>().map_err(|_| bad());
            let op = match (toks.first(), toks.len()) {
                (Some(&"dv"), 2) => MinorOp::DeleteVertex(VertexId(num(toks[1])?)),
                (Some(&"de"), 2) => MinorOp::DeleteEdge(EdgeId(num(toks[1])?)),
                (Some(&"ce"), 3) => {
                    MinorOp::ContractEdge(EdgeId(num(toks[1])?), VertexId(num(toks[2])?))
                }
                _ => return Err(bad()),
            };
            ops.push(op);
        }
        Ok(MinorTrace { ops })
    }
}

/// Replays `trace` on a copy of `input`. Returns the resulting graph and the
/// branch-set map: each surviving vertex to the set of input vertices merged
/// into it.
pub fn replay_minor_trace(
    input: &TerminalGraph,
    trace: &MinorTrace,
) -> Result<(TerminalGraph, BTreeMap<VertexId, BTreeSet<VertexId>>), GraphError> {
    let mut g = input.clone();
    let mut branch: BTreeMap<VertexId, BTreeSet<VertexId>> =
        input.vertices().map(|v| (v, BTreeSet::from([v]))).collect();
    for &op in &trace.ops {
        match op {
            MinorOp::DeleteVertex(v) => {
                g.apply_minor_op_mut(op)?;
                branch.remove(&v);
            }
            MinorOp::DeleteEdge(_) => {
                g.apply_minor_op_mut(op)?;
            }
            MinorOp::ContractEdge(eid, survivor) => {
                let e = g.try_edge(eid).ok_or(GraphError::NoEdge(eid))?.clone();
                g.apply_minor_op_mut(op)?;
                let loser = if survivor == e.u { e.v } else { e.u };
                let merged = branch.remove(&loser).ok_or(GraphError::NoVertex(loser))?;
                branch.get_mut(&survivor).unwrap().extend(merged);
            }
        }
    }
    Ok((g, branch))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("trace replay failed: {0}")]
    Replay(#[from] GraphError),
    #[error("replayed graph does not match claimed output")]
    Mismatch,
    #[error("branch set of {0} does not induce a connected subgraph")]
    DisconnectedBranch(VertexId),
    #[error("terminal {0} is not represented by any output vertex")]
    LostTerminal(VertexId),
    #[error("output vertex {0} represents more than one terminal")]
    MergedTerminals(VertexId),
}

/// Checks that (`output`, `trace`) is a valid minor witness for `input`:
/// the replayed trace reproduces `output` exactly up to order-preserving
/// relabeling (compared via canonical serialization), branch sets are
/// disjoint by construction and each induces a connected subgraph of the
/// input, and terminals map one-to-one into branch sets.
pub fn check_minor_witness(
    input: &TerminalGraph,
    output: &TerminalGraph,
    trace: &MinorTrace,
) -> Result<(), WitnessError> {
    let (replayed, branch) = replay_minor_trace(input, trace)?;
    if crate::io::serialize_graph(&replayed) != crate::io::serialize_graph(output) {
        return Err(WitnessError::Mismatch);
    }
    let adj = input.adjacency();
    for (&v, set) in &branch {
        // BFS inside the branch set; contraction only merges adjacent
        // vertices but external traces get the full check.
        let start = *set.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &(_, y) in &adj[&x] {
                if set.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != set.len() {
            return Err(WitnessError::DisconnectedBranch(v));
        }
        let terms_inside: Vec<_> = set.iter().filter(|t| input.is_terminal(**t)).collect();
        if terms_inside.len() > 1 {
            return Err(WitnessError::MergedTerminals(v));
        }
    }
    let represented: BTreeSet<VertexId> = branch
        .values()
        .flat_map(|s| s.iter().copied())
        .filter(|t| input.is_terminal(*t))
        .collect();
    for t in input.terminals() {
        if !represented.contains(&t) {
            return Err(WitnessError::LostTerminal(t));
        }
    }
    Ok(())
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub fn at(line: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            msg: msg.into(),
        }
    }
}
