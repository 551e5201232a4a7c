//! Reachability sparsification of planar digraphs. The graph is cut into
//! members by alternating reachability layers so that every directed path
//! stays inside two consecutive layers, then each member is summarized by
//! projecting terminals onto a short list of separator dipaths and
//! recursing on the remaining sides. The resulting waypoint pair set
//! drives the generic minor sparsifier.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, MinorOp, MinorTrace, PairSet, TerminalGraph, VertexId};
use crate::planar::is_planar;
use crate::reach_minor;

#[derive(Debug, Clone)]
pub struct PlanarReachConfig {
    /// Most dipaths a region separator may use before the candidate is
    /// discarded.
    pub separator_paths: usize,
    /// Regions at most this large take the exhaustive pair base case.
    pub base_n: usize,
    /// Recursion depth cap; deeper regions fall back to exhaustive pairs.
    pub max_depth: usize,
    /// Constant in the reported pair budget `C * k * ceil(log2 k)`.
    pub pair_constant: u64,
}

impl Default for PlanarReachConfig {
    fn default() -> Self {
        PlanarReachConfig {
            separator_paths: 6,
            base_n: 12,
            max_depth: 64,
            pair_constant: 64,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanarReachError {
    #[error("input graph is not directed")]
    NotDirected,
    #[error("input graph is not planar")]
    NotPlanar,
}

/// Construction summary; sizes refer to the graph after terminal pruning.
#[derive(Debug, Clone, Serialize)]
pub struct PlanarReachReport {
    pub input_n: usize,
    pub input_m: usize,
    pub k: usize,
    pub minor_n: usize,
    pub minor_m: usize,
    pub pair_count: usize,
    pub pair_budget: u64,
    pub within_budget: bool,
    pub waypoint_count: usize,
    pub degraded_regions: usize,
    pub deepest_region: usize,
}

#[derive(Debug)]
pub struct PlanarReachResult {
    pub minor: TerminalGraph,
    pub trace: MinorTrace,
    /// Waypoint pairs handed to the minor sparsifier.
    pub pairs: Vec<(VertexId, VertexId)>,
    pub report: PlanarReachReport,
}

type Adj = BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>;

fn reach_set(adj: &Adj, from: VertexId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if let Some(step) = adj.get(&x) {
            for &(_, y) in step {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen
}

/// Alternating reachability layers, grouped into members. Within a phase,
/// even layers are forward closed and odd layers backward closed, so every
/// directed path stays inside two consecutive layers of one phase. Members
/// are the unions of consecutive layer pairs (the layer itself for a
/// single-layer phase); a vertex lands in at most two members.
fn alternating_members(g: &TerminalGraph) -> Vec<BTreeSet<VertexId>> {
    let out = g.out_adjacency();
    let inn = g.in_adjacency();
    let mut residual: BTreeSet<VertexId> = g.vertices().collect();
    let mut phases: Vec<Vec<BTreeSet<VertexId>>> = Vec::new();
    let mut open = false;
    while !residual.is_empty() {
        let mut forward = true;
        let mut seeds: BTreeSet<VertexId> = BTreeSet::new();
        if open {
            let phase = phases.last().unwrap();
            forward = phase.len() % 2 == 0;
            // The next backward layer seeds on in-neighbors of the last
            // forward layer, and vice versa.
            let frontier = if forward { &out } else { &inn };
            for u in phase.last().unwrap() {
                if let Some(step) = frontier.get(u) {
                    for &(_, v) in step {
                        if residual.contains(&v) {
                            seeds.insert(v);
                        }
                    }
                }
            }
            if seeds.is_empty() {
                open = false;
                continue;
            }
        } else {
            seeds.insert(*residual.iter().next().unwrap());
            phases.push(Vec::new());
            open = true;
        }
        let step = if forward { &out } else { &inn };
        let mut layer = seeds.clone();
        let mut queue: VecDeque<VertexId> = seeds.into_iter().collect();
        while let Some(x) = queue.pop_front() {
            if let Some(next) = step.get(&x) {
                for &(_, y) in next {
                    if residual.contains(&y) && layer.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
        }
        for v in &layer {
            residual.remove(v);
        }
        phases.last_mut().unwrap().push(layer);
    }
    let mut members = Vec::new();
    for phase in &phases {
        if phase.len() == 1 {
            members.push(phase[0].clone());
        } else {
            for pair in phase.windows(2) {
                members.push(&pair[0] | &pair[1]);
            }
        }
    }
    members
}

/// Weakly connected components of the subgraph induced by `keep`.
fn weak_components_within(g: &TerminalGraph, keep: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
    let mut both: Adj = BTreeMap::new();
    for e in g.edge_ids() {
        let edge = g.edge(e);
        if keep.contains(&edge.u) && keep.contains(&edge.v) {
            both.entry(edge.u).or_default().push((e, edge.v));
            both.entry(edge.v).or_default().push((e, edge.u));
        }
    }
    let mut unseen = keep.clone();
    let mut parts = Vec::new();
    while let Some(&start) = unseen.iter().next() {
        let comp = reach_set(&both, start);
        for v in &comp {
            unseen.remove(v);
        }
        parts.push(comp);
    }
    parts
}

struct Candidate {
    paths: Vec<Vec<VertexId>>,
    max_side: usize,
}

/// A vertex cut covered by few dipaths: the best fundamental cycle or tree
/// root path of a direction-aware spanning tree, judged by the largest
/// remaining component. `balanced` reports whether the winner leaves every
/// side at most two thirds of the region.
fn path_separator(g: &TerminalGraph, max_paths: usize) -> (Vec<Vec<VertexId>>, bool) {
    let max_paths = max_paths.max(1);
    let n = g.n();
    let root = g.vertices().min().expect("separator needs a vertex");
    // Undirected adjacency; the flag remembers whether the stored edge
    // leaves the keyed vertex.
    let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId, bool)>> = BTreeMap::new();
    for e in g.edge_ids() {
        let edge = g.edge(e);
        adj.entry(edge.u).or_default().push((e, edge.v, true));
        adj.entry(edge.v).or_default().push((e, edge.u, false));
    }
    let mut dist: BTreeMap<VertexId, usize> = BTreeMap::from([(root, 0)]);
    let mut order: Vec<VertexId> = vec![root];
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        if let Some(step) = adj.get(&x) {
            for &(_, y, _) in step {
                if !dist.contains_key(&y) {
                    dist.insert(y, dist[&x] + 1);
                    order.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    // Parent choice prefers continuing the parent's arrival direction,
    // keeping root paths close to dipaths.
    let mut parent: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
    let mut arrival: BTreeMap<VertexId, Option<bool>> = BTreeMap::from([(root, None)]);
    for &v in order.iter().skip(1) {
        let mut best: Option<(bool, VertexId, EdgeId, bool)> = None;
        for &(e, u, v_is_tail) in &adj[&v] {
            if dist.get(&u) != Some(&(dist[&v] - 1)) {
                continue;
            }
            let dir = !v_is_tail;
            let change = arrival[&u].map_or(false, |a| a != dir);
            let key = (change, u, e, dir);
            if best.map_or(true, |b| (key.0, key.1, key.2) < (b.0, b.1, b.2)) {
                best = Some(key);
            }
        }
        let (_, u, e, dir) = best.expect("bfs order guarantees a parent");
        parent.insert(v, (u, e));
        arrival.insert(v, Some(dir));
    }
    let root_path = |v: VertexId| -> Vec<VertexId> {
        let mut path = vec![v];
        let mut x = v;
        while let Some(&(p, _)) = parent.get(&x) {
            path.push(p);
            x = p;
        }
        path.reverse();
        path
    };
    let arr = |v: VertexId| arrival[&v].expect("non-root vertices have an arrival direction");

    let mut best: Option<Candidate> = None;
    let mut consider = |seq: Vec<VertexId>, dirs: Vec<bool>, cyclic: bool| {
        let paths = split_runs(&seq, &dirs, cyclic);
        if paths.len() > max_paths {
            return;
        }
        let cut: BTreeSet<VertexId> = seq.iter().copied().collect();
        let rest: BTreeSet<VertexId> = g.vertices().filter(|v| !cut.contains(v)).collect();
        let max_side = weak_components_within(g, &rest)
            .iter()
            .map(|c| c.len())
            .max()
            .unwrap_or(0);
        let better = best.as_ref().map_or(true, |b| {
            (max_side, paths.len()) < (b.max_side, b.paths.len())
        });
        if better {
            best = Some(Candidate { paths, max_side });
        }
    };

    let tree_edges: BTreeSet<EdgeId> = parent.values().map(|&(_, e)| e).collect();
    for e in g.edge_ids().filter(|e| !tree_edges.contains(e)) {
        let edge = g.edge(e);
        let (u, v) = (edge.u, edge.v);
        let pu = root_path(u);
        let pv = root_path(v);
        let mut l = 0;
        while l + 1 < pu.len().min(pv.len()) && pu[l + 1] == pv[l + 1] {
            l += 1;
        }
        let mut seq = Vec::new();
        let mut dirs = Vec::new();
        for i in l..pu.len() {
            if i > l {
                dirs.push(arr(pu[i]));
            }
            seq.push(pu[i]);
        }
        // The non-tree edge is crossed tail to head by construction.
        dirs.push(true);
        let mut i = pv.len() - 1;
        while i > l {
            seq.push(pv[i]);
            dirs.push(!arr(pv[i]));
            i -= 1;
        }
        consider(seq, dirs, true);
    }
    for &v in &order {
        let seq = root_path(v);
        let dirs: Vec<bool> = seq.iter().skip(1).map(|&x| arr(x)).collect();
        consider(seq, dirs, false);
    }

    let won = best.expect("the root alone is always a candidate");
    let balanced = won.max_side * 3 <= n * 2;
    (won.paths, balanced)
}

/// Splits a vertex sequence into dipaths along its maximal constant
/// direction runs. Each returned path is listed tail to head.
fn split_runs(seq: &[VertexId], dirs: &[bool], cyclic: bool) -> Vec<Vec<VertexId>> {
    if seq.len() == 1 {
        return vec![vec![seq[0]]];
    }
    let oriented = |list: Vec<VertexId>, dir: bool| -> Vec<VertexId> {
        if dir {
            list
        } else {
            list.into_iter().rev().collect()
        }
    };
    if cyclic && dirs.iter().all(|&d| d == dirs[0]) {
        // A directed cycle has no linear order; two halves do.
        let h = seq.len() / 2;
        return vec![
            oriented(seq[..h].to_vec(), dirs[0]),
            oriented(seq[h..].to_vec(), dirs[0]),
        ];
    }
    let (seq, dirs): (Vec<VertexId>, Vec<bool>) = if cyclic {
        // Rotate so position zero starts a run.
        let m = dirs.len();
        let j = (0..m)
            .find(|&j| dirs[(j + m - 1) % m] != dirs[j])
            .expect("a mixed cycle has a boundary");
        (
            (0..m).map(|i| seq[(j + i) % m]).collect(),
            (0..m).map(|i| dirs[(j + i) % m]).collect(),
        )
    } else {
        (seq.to_vec(), dirs.to_vec())
    };
    let mut blocks: Vec<(usize, usize, bool)> = Vec::new();
    for (i, &d) in dirs.iter().enumerate() {
        match blocks.last_mut() {
            Some(&mut (_, ref mut b, bd)) if bd == d => *b = i,
            _ => blocks.push((i, i, d)),
        }
    }
    let mut paths = Vec::new();
    for (idx, &(a, b, d)) in blocks.iter().enumerate() {
        // Boundary vertices belong to the earlier run; a cyclic sequence
        // additionally gives its wrap vertex to the first run.
        let lo = if idx == 0 { a } else { a + 1 };
        let hi = if cyclic { (b + 1).min(seq.len() - 1) } else { b + 1 };
        if lo > hi {
            continue;
        }
        paths.push(oriented(seq[lo..=hi].to_vec(), d));
    }
    paths
}

struct ReduceCx<'a> {
    cfg: &'a PlanarReachConfig,
    pairs: BTreeSet<(VertexId, VertexId)>,
    waypoints: BTreeSet<VertexId>,
    degraded: usize,
    deepest: usize,
}

fn exhaustive_pairs(g: &TerminalGraph, terms: &BTreeSet<VertexId>, cx: &mut ReduceCx) {
    let out = g.out_adjacency();
    for &s in terms {
        let r = reach_set(&out, s);
        for &t in terms {
            if t != s && r.contains(&t) {
                cx.pairs.insert((s, t));
            }
        }
    }
}

/// Projects every terminal onto each separator dipath: the first vertex it
/// reaches and the last vertex reaching it become waypoints, and waypoints
/// are chained along the path. Any terminal walk through the cut is then
/// recoverable from the recorded pairs alone.
fn project_onto_paths(
    g: &TerminalGraph,
    terms: &BTreeSet<VertexId>,
    paths: &[Vec<VertexId>],
    cx: &mut ReduceCx,
) {
    let out = g.out_adjacency();
    let inn = g.in_adjacency();
    let fwd: BTreeMap<VertexId, BTreeSet<VertexId>> =
        terms.iter().map(|&s| (s, reach_set(&out, s))).collect();
    let bwd: BTreeMap<VertexId, BTreeSet<VertexId>> =
        terms.iter().map(|&s| (s, reach_set(&inn, s))).collect();
    for q in paths {
        let mut marked: BTreeSet<usize> = BTreeSet::new();
        for (i, v) in q.iter().enumerate() {
            if terms.contains(v) {
                marked.insert(i);
            }
        }
        for &x in terms {
            if let Some(i) = q.iter().position(|v| fwd[&x].contains(v)) {
                marked.insert(i);
                if q[i] != x {
                    cx.pairs.insert((x, q[i]));
                    if !terms.contains(&q[i]) {
                        cx.waypoints.insert(q[i]);
                    }
                }
            }
            if let Some(i) = q.iter().rposition(|v| bwd[&x].contains(v)) {
                marked.insert(i);
                if q[i] != x {
                    cx.pairs.insert((q[i], x));
                    if !terms.contains(&q[i]) {
                        cx.waypoints.insert(q[i]);
                    }
                }
            }
        }
        let marked: Vec<usize> = marked.into_iter().collect();
        for w in marked.windows(2) {
            cx.pairs.insert((q[w[0]], q[w[1]]));
        }
    }
}

fn reduce(g: &TerminalGraph, terms: &BTreeSet<VertexId>, depth: usize, cx: &mut ReduceCx) {
    cx.deepest = cx.deepest.max(depth);
    if terms.len() <= 1 {
        return;
    }
    if terms.len() == 2 || g.n() <= cx.cfg.base_n {
        exhaustive_pairs(g, terms, cx);
        return;
    }
    if depth >= cx.cfg.max_depth {
        cx.degraded += 1;
        exhaustive_pairs(g, terms, cx);
        return;
    }
    let members = alternating_members(g);
    if members.len() > 1 {
        // Every directed path stays inside one member, so unreachable
        // cross-member pairs need no summary at all.
        for mv in members {
            let mt: BTreeSet<VertexId> = terms.intersection(&mv).copied().collect();
            if mt.len() >= 2 {
                reduce(&g.induced(&mv), &mt, depth + 1, cx);
            }
        }
        return;
    }
    let (paths, balanced) = path_separator(g, cx.cfg.separator_paths);
    if !balanced {
        cx.degraded += 1;
    }
    project_onto_paths(g, terms, &paths, cx);
    let cut: BTreeSet<VertexId> = paths.iter().flatten().copied().collect();
    let rest: BTreeSet<VertexId> = g.vertices().filter(|v| !cut.contains(v)).collect();
    for side in weak_components_within(g, &rest) {
        let st: BTreeSet<VertexId> = terms.intersection(&side).copied().collect();
        if st.len() >= 2 {
            reduce(&g.induced(&side), &st, depth + 1, cx);
        }
    }
}

/// Drops edges and vertices that no terminal-to-terminal walk can use.
fn prune_outside_terminal_flow(w: &mut TerminalGraph, trace: &mut MinorTrace) {
    let out = w.out_adjacency();
    let inn = w.in_adjacency();
    let mut fwd = BTreeSet::new();
    let mut bwd = BTreeSet::new();
    for t in w.terminals() {
        fwd.extend(reach_set(&out, t));
        bwd.extend(reach_set(&inn, t));
    }
    let dead_edges: Vec<EdgeId> = w
        .edge_ids()
        .filter(|&e| {
            let edge = w.edge(e);
            !(fwd.contains(&edge.u) && bwd.contains(&edge.v))
        })
        .collect();
    for e in dead_edges {
        let op = MinorOp::DeleteEdge(e);
        w.apply_minor_op_mut(op).unwrap();
        trace.push(op);
    }
    let dead_vertices: Vec<VertexId> = w
        .vertices()
        .filter(|v| !(fwd.contains(v) && bwd.contains(v)))
        .collect();
    for v in dead_vertices {
        let op = MinorOp::DeleteVertex(v);
        w.apply_minor_op_mut(op).unwrap();
        trace.push(op);
    }
}

/// Reachability-preserving minor of a planar digraph, built from waypoint
/// pairs instead of the full terminal pair square. Exact for every
/// terminal pair; the trace replays to the returned minor.
pub fn sparsify_planar_reach(
    g: &TerminalGraph,
    cfg: &PlanarReachConfig,
) -> Result<PlanarReachResult, PlanarReachError> {
    if !g.directed() {
        return Err(PlanarReachError::NotDirected);
    }
    if !is_planar(g) {
        return Err(PlanarReachError::NotPlanar);
    }
    let mut w = g.clone();
    let mut trace = MinorTrace::default();
    prune_outside_terminal_flow(&mut w, &mut trace);
    let terms: BTreeSet<VertexId> = w.terminals().collect();
    let mut cx = ReduceCx {
        cfg,
        pairs: BTreeSet::new(),
        waypoints: BTreeSet::new(),
        degraded: 0,
        deepest: 0,
    };
    reduce(&w, &terms, 0, &mut cx);
    let pair_vec: Vec<(VertexId, VertexId)> = cx.pairs.iter().copied().collect();
    let pairs = PairSet::waypoints(pair_vec.clone(), &w).expect("reduction emits valid pairs");
    let rpm = reach_minor::sparsify(&w, &pairs);
    for op in rpm.trace.ops {
        trace.push(op);
    }
    let k = g.k();
    let log2_ceil = k.max(2).next_power_of_two().trailing_zeros() as u64;
    let pair_budget = cfg.pair_constant * k as u64 * log2_ceil;
    let report = PlanarReachReport {
        input_n: g.n(),
        input_m: g.m(),
        k,
        minor_n: rpm.minor.n(),
        minor_m: rpm.minor.m(),
        pair_count: pair_vec.len(),
        pair_budget,
        within_budget: (pair_vec.len() as u64) <= pair_budget,
        waypoint_count: cx.waypoints.len(),
        degraded_regions: cx.degraded,
        deepest_region: cx.deepest,
    };
    Ok(PlanarReachResult {
        minor: rpm.minor,
        trace,
        pairs: pair_vec,
        report,
    })
}
