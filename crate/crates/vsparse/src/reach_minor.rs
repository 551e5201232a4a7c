//! Reachability-preserving minors of digraphs.
//!
//! Three constructions, all emitting replayable minor traces:
//!
//! * `sparsify_dag`: keeps a union of consistently tie-broken shortest
//!   paths for the requested pairs, then contracts unbranched entries.
//!   Branching in the result is bounded by pairs of requested pairs.
//! * `sparsify`: arbitrary digraphs; strongly connected pieces collapse
//!   onto their terminals, the condensation is handled like a DAG, and
//!   every decision lifts back through stable edge ids.
//! * `sparsest_preserver`: exact minimum edge count by bounded exhaustive
//!   search, for small inputs only.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{EdgeId, MinorOp, MinorTrace, PairSet, TerminalGraph, VertexId};

/// A constructed minor together with the operation log that produces it.
pub struct RpmResult {
    pub minor: TerminalGraph,
    pub trace: MinorTrace,
}

/// Per-source shortest-path forest with deterministic tie-breaking: the
/// parent of `v` is the minimum-id predecessor on a shortest path, and the
/// minimum-id edge among parallels. Paths extracted from the same forest
/// agree on shared subpaths, and so do forests of different sources, which
/// keeps path unions branch-light.
pub struct TieBrokenPaths {
    pub source: VertexId,
    dist: BTreeMap<VertexId, u32>,
    parent: BTreeMap<VertexId, (VertexId, EdgeId)>,
}

pub fn tie_broken_paths(g: &TerminalGraph, source: VertexId) -> TieBrokenPaths {
    assert!(g.directed());
    let out = g.out_adjacency();
    let mut dist = BTreeMap::from([(source, 0u32)]);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for &(_, u) in &out[&v] {
            if !dist.contains_key(&u) {
                dist.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    let inn = g.in_adjacency();
    let mut parent = BTreeMap::new();
    for (&v, &d) in &dist {
        if d == 0 {
            continue;
        }
        let best = inn[&v]
            .iter()
            .filter(|(_, u)| dist.get(u) == Some(&(d - 1)))
            .map(|&(e, u)| (u, e))
            .min()
            .expect("positive distance implies a predecessor");
        parent.insert(v, best);
    }
    TieBrokenPaths {
        source,
        dist,
        parent,
    }
}

impl TieBrokenPaths {
    pub fn distance(&self, t: VertexId) -> Option<u32> {
        self.dist.get(&t).copied()
    }

    /// Edge ids from the source to `t`, in path order; empty for the source
    /// itself, None when unreachable.
    pub fn path_edges(&self, t: VertexId) -> Option<Vec<EdgeId>> {
        self.dist.get(&t)?;
        let mut edges = Vec::new();
        let mut v = t;
        while v != self.source {
            let (p, e) = self.parent[&v];
            edges.push(e);
            v = p;
        }
        edges.reverse();
        Some(edges)
    }
}

/// True when the digraph has no directed cycle (Kahn peeling).
pub fn is_acyclic(g: &TerminalGraph) -> bool {
    assert!(g.directed());
    let mut indeg: BTreeMap<VertexId, usize> = g.vertices().map(|v| (v, 0)).collect();
    for e in g.edge_ids() {
        *indeg.get_mut(&g.edge(e).v).unwrap() += 1;
    }
    let mut queue: Vec<VertexId> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut seen = 0usize;
    while let Some(v) = queue.pop() {
        seen += 1;
        for (_, u) in g.out_edges(v) {
            let d = indeg.get_mut(&u).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push(u);
            }
        }
    }
    seen == g.n()
}

/// Union of tie-broken path edges over all reachable requested pairs.
fn path_union(g: &TerminalGraph, pairs: &PairSet) -> BTreeSet<EdgeId> {
    let mut by_source: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(s, t) in pairs.pairs() {
        by_source.entry(s).or_default().push(t);
    }
    let mut keep = BTreeSet::new();
    for (s, ts) in by_source {
        let forest = tie_broken_paths(g, s);
        for t in ts {
            if let Some(es) = forest.path_edges(t) {
                keep.extend(es);
            }
        }
    }
    keep
}

/// Deletes every edge outside `keep`, then every isolated non-terminal,
/// recording the operations.
fn delete_outside(w: &mut TerminalGraph, trace: &mut MinorTrace, keep: &BTreeSet<EdgeId>) {
    let drop: Vec<EdgeId> = w.edge_ids().filter(|e| !keep.contains(e)).collect();
    for e in drop {
        w.apply_minor_op_mut(MinorOp::DeleteEdge(e)).unwrap();
        trace.push(MinorOp::DeleteEdge(e));
    }
    let iso: Vec<VertexId> = w
        .vertices()
        .filter(|&v| !w.is_terminal(v) && w.degree(v) == 0)
        .collect();
    for v in iso {
        w.apply_minor_op_mut(MinorOp::DeleteVertex(v)).unwrap();
        trace.push(MinorOp::DeleteVertex(v));
    }
}

/// Contracts the unique in-edge of every in-degree-1 non-terminal, lowest
/// vertex id first, to a fixed point. Exactly reachability-preserving in
/// any digraph: every path entering such a vertex arrives over that edge.
fn contract_unbranched(w: &mut TerminalGraph, trace: &mut MinorTrace) {
    loop {
        let inn = w.in_adjacency();
        let next = inn
            .iter()
            .find(|(&v, es)| !w.is_terminal(v) && es.len() == 1)
            .map(|(&v, es)| (v, es[0]));
        let Some((v, (e, x))) = next else { break };
        let survivor = w.contraction_survivor(x, v);
        let op = MinorOp::ContractEdge(e, survivor);
        w.apply_minor_op_mut(op).unwrap();
        trace.push(op);
    }
}

/// Reachability-preserving minor of an acyclic digraph: the union of
/// tie-broken shortest paths for `pairs`, with unbranched entries
/// contracted away. Terminals always survive.
pub fn sparsify_dag(g: &TerminalGraph, pairs: &PairSet) -> RpmResult {
    assert!(g.directed());
    assert!(is_acyclic(g), "sparsify_dag needs an acyclic input");
    let keep = path_union(g, pairs);
    let mut minor = g.clone();
    let mut trace = MinorTrace::default();
    delete_outside(&mut minor, &mut trace, &keep);
    contract_unbranched(&mut minor, &mut trace);
    RpmResult { minor, trace }
}

/// Strongly connected components, ascending by minimum vertex id.
/// Iterative Tarjan with neighbors visited in ascending order.
pub fn strongly_connected_components(g: &TerminalGraph) -> Vec<BTreeSet<VertexId>> {
    assert!(g.directed());
    let verts: Vec<VertexId> = g.vertices().collect();
    let pos: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj_map = g.out_adjacency();
    let out: Vec<Vec<usize>> = verts
        .iter()
        .map(|v| adj_map[v].iter().map(|(_, u)| pos[u]).collect())
        .collect();
    let n = verts.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut comps: Vec<BTreeSet<VertexId>> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < out[v].len() {
                let u = out[v][*child];
                *child += 1;
                if index[u] == usize::MAX {
                    frames.push((u, 0));
                } else if on_stack[u] {
                    low[v] = low[v].min(index[u]);
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = BTreeSet::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.insert(verts[w]);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
                frames.pop();
                if let Some(&mut (p, _)) = frames.last_mut() {
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }
    comps.sort_by_key(|c| *c.iter().next().unwrap());
    comps
}

/// Contracts every strongly connected component onto its terminals (or onto
/// its lowest-id vertex when it has none), recording the contractions.
/// Returns the component index of every input vertex, contracted or not.
fn collapse_components(
    w: &mut TerminalGraph,
    trace: &mut MinorTrace,
) -> BTreeMap<VertexId, usize> {
    let comps = strongly_connected_components(w);
    let mut origin: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            origin.insert(v, ci);
        }
    }
    for (ci, comp) in comps.iter().enumerate() {
        let mut live: BTreeSet<VertexId> = comp.clone();
        loop {
            // Keep contracting while a non-terminal remains, or until a
            // terminal-free component is a single vertex.
            let victim = live.iter().copied().find(|&v| !w.is_terminal(v));
            let Some(v) = victim else { break };
            if live.len() == 1 {
                break;
            }
            // An internal out-edge exists while the piece is strongly
            // connected; take the lowest head, then the lowest edge id.
            let (u, e) = w
                .out_edges(v)
                .into_iter()
                .filter(|(_, u)| live.contains(u))
                .map(|(e, u)| (u, e))
                .min()
                .expect("strongly connected piece has an internal out-edge");
            let survivor = w.contraction_survivor(v, u);
            let op = MinorOp::ContractEdge(e, survivor);
            w.apply_minor_op_mut(op).unwrap();
            trace.push(op);
            let loser = if survivor == v { u } else { v };
            live.remove(&loser);
            debug_assert_eq!(origin[&survivor], ci);
        }
    }
    origin
}

/// Condensation with stable edge ids: one vertex per component (the lowest
/// terminal id, or the collapsed vertex), every surviving inter-component
/// edge carried over under its own id.
fn condensation(
    w: &TerminalGraph,
    origin: &BTreeMap<VertexId, usize>,
    comp_count: usize,
) -> (TerminalGraph, Vec<VertexId>) {
    // The representative is the lowest terminal when one exists, otherwise
    // the lowest surviving vertex (the collapsed singleton).
    let mut rep: Vec<Option<VertexId>> = vec![None; comp_count];
    for (&v, &ci) in origin {
        if !w.has_vertex(v) {
            continue;
        }
        let replace = match rep[ci] {
            None => true,
            Some(r) => match (w.is_terminal(v), w.is_terminal(r)) {
                (true, false) => true,
                (false, true) => false,
                _ => v < r,
            },
        };
        if replace {
            rep[ci] = Some(v);
        }
    }
    let rep: Vec<VertexId> = rep
        .into_iter()
        .map(|r| r.expect("every component keeps a vertex"))
        .collect();
    let mut d = TerminalGraph::new(true, w.mode());
    for &r in &rep {
        d.add_vertex_with_id(r);
        if w.is_terminal(r) {
            d.make_terminal(r);
        }
    }
    for e in w.edge_ids() {
        let edge = w.edge(e);
        let (cu, cv) = (origin[&edge.u], origin[&edge.v]);
        if cu != cv {
            d.add_edge_with_id(e, rep[cu], rep[cv], edge.w.clone());
        }
    }
    (d, rep)
}

/// Reachability-preserving minor of an arbitrary digraph. Exact for every
/// requested pair; terminals always survive; the trace replays to the
/// returned minor.
pub fn sparsify(g: &TerminalGraph, pairs: &PairSet) -> RpmResult {
    assert!(g.directed());
    let mut minor = g.clone();
    let mut trace = MinorTrace::default();
    let origin = collapse_components(&mut minor, &mut trace);
    let comp_count = origin.values().copied().max().map_or(0, |m| m + 1);
    let (derived, rep) = condensation(&minor, &origin, comp_count);

    // Requested pairs, mapped onto component representatives.
    let mut seen = BTreeSet::new();
    let mut dpairs = Vec::new();
    for &(s, t) in pairs.pairs() {
        let (ds, dt) = (rep[origin[&s]], rep[origin[&t]]);
        if ds != dt && seen.insert((ds, dt)) {
            dpairs.push((ds, dt));
        }
    }
    let dpairs = PairSet::waypoints(dpairs, &derived).expect("representatives are vertices");

    // Sparsify the condensation, then lift: keep the chosen inter-component
    // edges plus everything inside terminal components.
    let mut keep = path_union(&derived, &dpairs);
    for e in minor.edge_ids() {
        let edge = minor.edge(e);
        if origin[&edge.u] == origin[&edge.v] {
            keep.insert(e);
        }
    }
    delete_outside(&mut minor, &mut trace, &keep);
    contract_unbranched(&mut minor, &mut trace);
    RpmResult { minor, trace }
}

/// Sum over non-terminals of (in-degree choose 2), parallel edges distinct.
/// The branching budget that path-union minors are measured against.
pub fn nonterminal_branching_events(g: &TerminalGraph) -> u128 {
    assert!(g.directed());
    let inn = g.in_adjacency();
    inn.iter()
        .filter(|(&v, _)| !g.is_terminal(v))
        .map(|(_, es)| {
            let d = es.len() as u128;
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct PreserverConfig {
    /// Upper bound on candidate edges before the exact search refuses.
    pub relevant_guard: usize,
}

impl Default for PreserverConfig {
    fn default() -> Self {
        PreserverConfig { relevant_guard: 25 }
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum PreserverError {
    #[error("{relevant} candidate edges exceed the exact-search guard {guard}")]
    TooManyRelevant { relevant: usize, guard: usize },
}

/// Exact sparsest preserver of the requested pairs: the minimum-cardinality
/// edge set (lexicographically least by edge id among minima) through which
/// every reachable pair stays reachable, found by iterative-deepening
/// search over candidate edges, then reduced like the other minors.
pub fn sparsest_preserver(
    g: &TerminalGraph,
    pairs: &PairSet,
    cfg: &PreserverConfig,
) -> Result<RpmResult, PreserverError> {
    assert!(g.directed());
    let out = g.out_adjacency();
    let reach_from = |s: VertexId| -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(_, u) in &out[&v] {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen
    };
    let inn = g.in_adjacency();
    let reach_to = |t: VertexId| -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([t]);
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &(_, u) in &inn[&v] {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen
    };
    let fwd: BTreeMap<VertexId, BTreeSet<VertexId>> = pairs
        .pairs()
        .iter()
        .map(|&(s, _)| s)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|s| (s, reach_from(s)))
        .collect();
    let bwd: BTreeMap<VertexId, BTreeSet<VertexId>> = pairs
        .pairs()
        .iter()
        .map(|&(_, t)| t)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|t| (t, reach_to(t)))
        .collect();
    let live: Vec<(VertexId, VertexId)> = pairs
        .pairs()
        .iter()
        .copied()
        .filter(|&(s, t)| fwd[&s].contains(&t))
        .collect();

    // An edge is a candidate when it can sit on a path of some live pair.
    let relevant: Vec<EdgeId> = g
        .edge_ids()
        .filter(|&e| {
            let edge = g.edge(e);
            live.iter()
                .any(|(s, t)| fwd[s].contains(&edge.u) && bwd[t].contains(&edge.v))
        })
        .collect();
    if relevant.len() > cfg.relevant_guard {
        return Err(PreserverError::TooManyRelevant {
            relevant: relevant.len(),
            guard: cfg.relevant_guard,
        });
    }

    let feasible = |kept: &BTreeSet<EdgeId>| -> bool {
        live.iter().all(|&(s, t)| {
            let mut seen = BTreeSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                if v == t {
                    return true;
                }
                for &(e, u) in &out[&v] {
                    if kept.contains(&e) && seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            false
        })
    };

    // Edges whose removal from the full candidate set breaks a pair are in
    // every preserver.
    let all: BTreeSet<EdgeId> = relevant.iter().copied().collect();
    debug_assert!(feasible(&all));
    let mandatory: BTreeSet<EdgeId> = relevant
        .iter()
        .copied()
        .filter(|&e| {
            let mut without = all.clone();
            without.remove(&e);
            !feasible(&without)
        })
        .collect();
    let optional: Vec<EdgeId> = relevant
        .iter()
        .copied()
        .filter(|e| !mandatory.contains(e))
        .collect();

    // Smallest extension size first; within a size, combinations in edge-id
    // order, so the first hit is the lexicographically least minimum.
    let mut chosen = mandatory.clone();
    if !feasible(&chosen) {
        'sizes: for d in 1..=optional.len() {
            let mut picked: Vec<usize> = Vec::new();
            if search(&optional, &mandatory, &feasible, d, 0, &mut picked) {
                chosen.extend(picked.iter().map(|&i| optional[i]));
                break 'sizes;
            }
        }
    }
    debug_assert!(feasible(&chosen));

    let mut minor = g.clone();
    let mut trace = MinorTrace::default();
    delete_outside(&mut minor, &mut trace, &chosen);
    contract_unbranched(&mut minor, &mut trace);
    Ok(RpmResult { minor, trace })
}

/// Depth-limited combination search; true when a feasible extension of
/// exactly `want` optional edges exists, returned through `picked`.
fn search(
    optional: &[EdgeId],
    mandatory: &BTreeSet<EdgeId>,
    feasible: &dyn Fn(&BTreeSet<EdgeId>) -> bool,
    want: usize,
    from: usize,
    picked: &mut Vec<usize>,
) -> bool {
    if picked.len() == want {
        let kept: BTreeSet<EdgeId> = mandatory
            .iter()
            .copied()
            .chain(picked.iter().map(|&i| optional[i]))
            .collect();
        return feasible(&kept);
    }
    // Even taking everything from here on cannot reach the target size.
    let remaining = optional.len() - from;
    if remaining < want - picked.len() {
        return false;
    }
    // Prune: the whole suffix plus current picks must at least be feasible.
    let ceiling: BTreeSet<EdgeId> = mandatory
        .iter()
        .copied()
        .chain(picked.iter().map(|&i| optional[i]))
        .chain(optional[from..].iter().copied())
        .collect();
    if !feasible(&ceiling) {
        return false;
    }
    for i in from..optional.len() {
        picked.push(i);
        if search(optional, mandatory, feasible, want, i + 1, picked) {
            return true;
        }
        picked.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_minor_witness, WeightMode};
    use crate::oracles::terminal_reach_matrix;
    use crate::weight::Weight;

    fn digraph(n: u32, terms: &[u32], edges: &[(u32, u32)]) -> TerminalGraph {
        let mut g = TerminalGraph::new(true, WeightMode::None);
        for _ in 0..n {
            g.add_vertex();
        }
        for &t in terms {
            g.make_terminal(VertexId(t));
        }
        for &(a, b) in edges {
            g.add_edge(VertexId(a), VertexId(b), Weight::one());
        }
        g
    }

    #[test]
    fn tie_breaking_prefers_lower_predecessor() {
        // Two shortest 0 -> 3 routes, via 1 and via 2; the path must use 1.
        let g = digraph(4, &[0, 3], &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let forest = tie_broken_paths(&g, VertexId(0));
        let path = forest.path_edges(VertexId(3)).unwrap();
        assert_eq!(path, vec![EdgeId(0), EdgeId(2)]);
    }

    #[test]
    fn consistency_on_shared_subpaths() {
        // Sources 0 and 1 both reach 5 through the middle; their paths must
        // agree on every shared suffix.
        let g = digraph(
            6,
            &[0, 1, 5],
            &[(0, 2), (1, 2), (2, 3), (2, 4), (3, 5), (4, 5)],
        );
        let f0 = tie_broken_paths(&g, VertexId(0));
        let f1 = tie_broken_paths(&g, VertexId(1));
        let p0 = f0.path_edges(VertexId(5)).unwrap();
        let p1 = f1.path_edges(VertexId(5)).unwrap();
        assert_eq!(p0[1..], p1[1..]);
    }

    #[test]
    fn dag_minor_is_exact_and_replayable() {
        let g = digraph(
            7,
            &[0, 1, 6],
            &[(0, 2), (1, 2), (2, 3), (3, 6), (0, 4), (4, 5), (5, 6)],
        );
        let pairs = PairSet::complete(&g);
        let r = sparsify_dag(&g, &pairs);
        assert_eq!(check_minor_witness(&g, &r.minor, &r.trace), Ok(()));
        assert_eq!(
            terminal_reach_matrix(&g).reach,
            terminal_reach_matrix(&r.minor).reach
        );
        assert!(r.minor.n() <= g.n());
    }

    #[test]
    fn cycle_collapses_onto_terminals() {
        // 4-cycle with one terminal inside, one outside feeding it.
        let g = digraph(5, &[0, 1], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 1)]);
        let pairs = PairSet::complete(&g);
        let r = sparsify(&g, &pairs);
        assert_eq!(check_minor_witness(&g, &r.minor, &r.trace), Ok(()));
        assert_eq!(
            terminal_reach_matrix(&g).reach,
            terminal_reach_matrix(&r.minor).reach
        );
        // The terminal-bearing cycle keeps the terminal, drops the rest.
        assert_eq!(r.minor.n(), 2);
    }

    #[test]
    fn two_terminals_in_one_component_stay_mutually_reachable() {
        let g = digraph(4, &[0, 2], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let pairs = PairSet::complete(&g);
        let r = sparsify(&g, &pairs);
        assert_eq!(check_minor_witness(&g, &r.minor, &r.trace), Ok(()));
        let m = terminal_reach_matrix(&r.minor);
        assert!(m.reach[0][1] && m.reach[1][0]);
    }

    #[test]
    fn preserver_finds_the_single_shared_path() {
        // Pairs (0,3) and (1,3) share edge (2,3); minimum is 3 edges.
        let g = digraph(4, &[0, 1, 3], &[(0, 2), (1, 2), (2, 3)]);
        let pairs = PairSet::new(
            vec![
                (VertexId(0), VertexId(3)),
                (VertexId(1), VertexId(3)),
            ],
            &g,
        )
        .unwrap();
        let r = sparsest_preserver(&g, &pairs, &PreserverConfig::default()).unwrap();
        assert_eq!(check_minor_witness(&g, &r.minor, &r.trace), Ok(()));
        let m = terminal_reach_matrix(&r.minor);
        assert!(m.reach[0][2] && m.reach[1][2]);
    }

    #[test]
    fn preserver_guard_refuses_large_searches() {
        let g = digraph(
            5,
            &[0, 4],
            &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (1, 4), (2, 4)],
        );
        let pairs = PairSet::complete(&g);
        let err = sparsest_preserver(&g, &pairs, &PreserverConfig { relevant_guard: 3 });
        assert!(matches!(err, Err(PreserverError::TooManyRelevant { .. })));
    }

    #[test]
    fn branching_events_count_parallel_in_edges() {
        let mut g = digraph(3, &[0], &[(0, 2), (1, 2)]);
        g.add_edge(VertexId(0), VertexId(2), Weight::one());
        // Vertex 2 has three in-edges: 3 events.
        assert_eq!(nonterminal_branching_events(&g), 3);
    }
}
