//! Ground-truth oracles.
//!
//! Everything here is deliberately simple and independent of the reduction
//! pipelines it is used to check: reachability by plain searches (twice, via
//! two different algorithms), minimum cuts by exact rational augmenting-path
//! max-flow plus an exhaustive-enumeration cross-check, distances by exact
//! Dijkstra, and sparsity by brute force over all vertex subsets.
//!
//! Tables and matrices are indexed by position in the ascending terminal
//! list, so comparing a graph against its sparsifier is stable under the
//! order-preserving relabeling done by serialization.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::graph::{TerminalGraph, VertexId, WeightMode};
use crate::weight::Weight;

/// Reachability between terminals; `reach[i][j]` for the i-th and j-th
/// terminal in ascending id order. Diagonal is true.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReachMatrix {
    pub terms: Vec<VertexId>,
    pub reach: Vec<Vec<bool>>,
}

/// Computes terminal reachability by one BFS per terminal.
pub fn terminal_reach_matrix(g: &TerminalGraph) -> ReachMatrix {
    let terms: Vec<VertexId> = g.terminals().collect();
    let adj = if g.directed() {
        g.out_adjacency()
    } else {
        g.adjacency()
    };
    let reach = terms
        .iter()
        .map(|&s| {
            let mut seen = BTreeSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(_, u) in &adj[&v] {
                    if seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            terms.iter().map(|t| seen.contains(t)).collect()
        })
        .collect();
    ReachMatrix { terms, reach }
}

/// Second, independent reachability implementation: transitive closure over
/// all vertices with bitset rows, then restricted to terminals.
pub fn terminal_reach_matrix_closure(g: &TerminalGraph) -> ReachMatrix {
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let words = n.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i / 64] |= 1 << (i % 64);
    }
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let (iu, iv) = (index[&edge.u], index[&edge.v]);
        rows[iu][iv / 64] |= 1 << (iv % 64);
        if !g.directed() {
            rows[iv][iu / 64] |= 1 << (iu % 64);
        }
    }
    // Warshall: route everything through each pivot in turn.
    for p in 0..n {
        let pivot_row = rows[p].clone();
        for i in 0..n {
            if rows[i][p / 64] >> (p % 64) & 1 == 1 {
                for w in 0..words {
                    rows[i][w] |= pivot_row[w];
                }
            }
        }
    }
    let terms: Vec<VertexId> = g.terminals().collect();
    let reach = terms
        .iter()
        .map(|s| {
            let row = &rows[index[s]];
            terms
                .iter()
                .map(|t| {
                    let j = index[t];
                    row[j / 64] >> (j % 64) & 1 == 1
                })
                .collect()
        })
        .collect();
    ReachMatrix { terms, reach }
}

/// Exact minimum cut separating the terminal set `s_side` from the rest of
/// the terminals, over an undirected capacitated graph. Edmonds-Karp on
/// exact rationals; the value is exact.
pub fn terminal_mincut(g: &TerminalGraph, s_side: &BTreeSet<VertexId>) -> Weight {
    assert!(!g.directed(), "minimum cuts are defined on undirected graphs");
    let all: BTreeSet<VertexId> = g.terminals().collect();
    assert!(
        !s_side.is_empty() && s_side.is_subset(&all) && s_side != &all,
        "s_side must be a proper nonempty terminal subset"
    );

    // Arc list with paired reverse arcs; an undirected edge of capacity c
    // becomes two opposing arcs of capacity c sharing residual space the
    // standard way (each arc gets its own capacity).
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let source = n;
    let sink = n + 1;
    let mut heads: Vec<usize> = Vec::new();
    let mut caps: Vec<Weight> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let push_arc = |from: usize,
                        to: usize,
                        cap: Weight,
                        heads: &mut Vec<usize>,
                        caps: &mut Vec<Weight>,
                        adj: &mut Vec<Vec<usize>>| {
        adj[from].push(heads.len());
        heads.push(to);
        caps.push(cap);
        adj[to].push(heads.len());
        heads.push(from);
        caps.push(Weight::zero());
    };
    for e in g.edge_ids() {
        let edge = g.edge(e);
        if edge.w.is_zero() {
            continue;
        }
        let (iu, iv) = (index[&edge.u], index[&edge.v]);
        push_arc(iu, iv, edge.w.clone(), &mut heads, &mut caps, &mut adj);
        push_arc(iv, iu, edge.w.clone(), &mut heads, &mut caps, &mut adj);
    }
    // Terminal attachment capacity exceeding any possible cut acts as
    // infinity.
    let mut inf = Weight::one();
    for e in g.edge_ids() {
        inf += &g.edge(e).w;
    }
    for t in &all {
        if s_side.contains(t) {
            push_arc(source, index[t], inf.clone(), &mut heads, &mut caps, &mut adj);
        } else {
            push_arc(index[t], sink, inf.clone(), &mut heads, &mut caps, &mut adj);
        }
    }

    let mut flow = Weight::zero();
    loop {
        // Shortest augmenting path by arc count.
        let mut pred: Vec<Option<usize>> = vec![None; n + 2];
        let mut seen = vec![false; n + 2];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            if v == sink {
                break;
            }
            for &a in &adj[v] {
                let to = heads[a];
                if !seen[to] && !caps[a].is_zero() {
                    seen[to] = true;
                    pred[to] = Some(a);
                    queue.push_back(to);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        let mut bottleneck: Option<Weight> = None;
        let mut v = sink;
        while v != source {
            let a = pred[v].unwrap();
            bottleneck = Some(match bottleneck {
                None => caps[a].clone(),
                Some(b) => Weight::min_of(&b, &caps[a]),
            });
            v = heads[a ^ 1];
        }
        let push = bottleneck.unwrap();
        let mut v = sink;
        while v != source {
            let a = pred[v].unwrap();
            caps[a] = caps[a].checked_sub(&push);
            caps[a ^ 1] += &push;
            v = heads[a ^ 1];
        }
        flow += &push;
    }
    flow
}

/// Exhaustive minimum-cut enumeration: minimum over all vertex bipartitions
/// consistent with the terminal split. Exponential; for cross-checking the
/// max-flow oracle on small graphs.
pub fn terminal_mincut_exhaustive(g: &TerminalGraph, s_side: &BTreeSet<VertexId>) -> Weight {
    assert!(!g.directed());
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    assert!(n <= 24, "exhaustive cut enumeration needs n <= 24");
    let free: Vec<VertexId> = verts
        .iter()
        .copied()
        .filter(|v| !g.is_terminal(*v))
        .collect();
    let t_side: BTreeSet<VertexId> = g.terminals().filter(|t| !s_side.contains(t)).collect();
    let mut best: Option<Weight> = None;
    for mask in 0u64..(1u64 << free.len()) {
        let mut side: BTreeMap<VertexId, bool> = BTreeMap::new();
        for t in s_side {
            side.insert(*t, true);
        }
        for t in &t_side {
            side.insert(*t, false);
        }
        for (i, v) in free.iter().enumerate() {
            side.insert(*v, mask >> i & 1 == 1);
        }
        let mut cut = Weight::zero();
        for e in g.edge_ids() {
            let edge = g.edge(e);
            if side[&edge.u] != side[&edge.v] {
                cut += &edge.w;
            }
        }
        best = Some(match best {
            None => cut,
            Some(b) => Weight::min_of(&b, &cut),
        });
    }
    best.expect("at least one bipartition")
}

/// All terminal bipartitions as bitmasks over the ascending terminal list.
/// Canonical: bit 0 set, not the full set. There are 2^(k-1) - 1 of them.
pub fn bipartition_masks(k: usize) -> Vec<u32> {
    assert!(k >= 2, "bipartitions need at least two terminals");
    assert!(k <= 20, "bipartition enumeration capped");
    let full = (1u32 << k) - 1;
    (0..1u32 << k)
        .filter(|m| m & 1 == 1 && *m != full)
        .collect()
}

/// Exact min-cut table over every terminal bipartition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CutTable {
    pub terms: Vec<VertexId>,
    /// (mask over terminal positions, exact cut value), ascending by mask.
    pub entries: Vec<(u32, Weight)>,
}

/// Builds the full table; `cap` guards the 2^(k-1) - 1 blowup.
pub fn terminal_mincut_table(g: &TerminalGraph, cap: usize) -> CutTable {
    let terms: Vec<VertexId> = g.terminals().collect();
    assert!(
        terms.len() <= cap,
        "terminal count {} exceeds table cap {}",
        terms.len(),
        cap
    );
    let entries = bipartition_masks(terms.len())
        .into_iter()
        .map(|mask| {
            let s_side: BTreeSet<VertexId> = terms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &t)| t)
                .collect();
            (mask, terminal_mincut(g, &s_side))
        })
        .collect();
    CutTable { terms, entries }
}

/// Exact terminal distance matrix; `None` marks unreachable, never a
/// sentinel number. `dist[i][j]` for ascending terminals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistMatrix {
    pub terms: Vec<VertexId>,
    pub dist: Vec<Vec<Option<Weight>>>,
}

pub fn terminal_distance_matrix(g: &TerminalGraph) -> DistMatrix {
    let terms: Vec<VertexId> = g.terminals().collect();
    let adj = if g.directed() {
        g.out_adjacency()
    } else {
        g.adjacency()
    };
    let dist = terms
        .iter()
        .map(|&s| {
            // Dijkstra with exact keys; linear extraction, n is small.
            let mut dist: BTreeMap<VertexId, Weight> = BTreeMap::from([(s, Weight::zero())]);
            let mut done: BTreeSet<VertexId> = BTreeSet::new();
            loop {
                let next = dist
                    .iter()
                    .filter(|(v, _)| !done.contains(v))
                    .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
                    .map(|(&v, d)| (v, d.clone()));
                let Some((v, d)) = next else { break };
                done.insert(v);
                for &(e, u) in &adj[&v] {
                    let cand = &d + &g.edge(e).w;
                    let better = match dist.get(&u) {
                        None => true,
                        Some(old) => cand < *old,
                    };
                    if better {
                        dist.insert(u, cand);
                    }
                }
            }
            terms.iter().map(|t| dist.get(t).cloned()).collect()
        })
        .collect();
    DistMatrix { terms, dist }
}

/// Demand on terminal pairs for sparsity computations.
#[derive(Clone, Debug, Default)]
pub struct DemandFunction {
    pub demands: Vec<(VertexId, VertexId, Weight)>,
}

/// Sparsity of `g` under `d`: minimum over vertex subsets U of
/// cut(U) / demand separated by U, skipping subsets separating no demand.
/// Returns the exact ratio and the lexicographically least witness subset,
/// or None if no subset separates any demand. Brute force; n <= 20.
pub fn sparsest_cut_bruteforce(
    g: &TerminalGraph,
    d: &DemandFunction,
) -> Option<(Weight, BTreeSet<VertexId>)> {
    assert!(!g.directed());
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    assert!(n <= 20, "sparsest-cut brute force needs n <= 20");
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Clear denominators once so subset scans run on integers.
    let mut ws: Vec<&Weight> = g.edge_ids().map(|e| &g.edge(e).w).collect();
    for (_, _, w) in &d.demands {
        ws.push(w);
    }
    let lcm = Weight::denominator_lcm(&ws);
    let edges: Vec<(usize, usize, BigInt)> = g
        .edge_ids()
        .map(|e| {
            let edge = g.edge(e);
            (index[&edge.u], index[&edge.v], edge.w.scaled_int(&lcm))
        })
        .collect();
    let demands: Vec<(usize, usize, BigInt)> = d
        .demands
        .iter()
        .map(|(a, b, w)| (index[a], index[b], w.scaled_int(&lcm)))
        .collect();

    let mut best: Option<(BigInt, BigInt, u32)> = None; // (cut, demand, mask)
    for mask in 0u32..(1u32 << n) {
        let inside = |i: usize| mask >> i & 1 == 1;
        let mut dem = BigInt::zero();
        for (a, b, w) in &demands {
            if inside(*a) != inside(*b) {
                dem += w;
            }
        }
        if dem.is_zero() {
            continue;
        }
        let mut cut = BigInt::zero();
        for (a, b, w) in &edges {
            if inside(*a) != inside(*b) {
                cut += w;
            }
        }
        let better = match &best {
            None => true,
            // cut/dem < best.cut/best.dem by cross multiplication; on ties
            // the lexicographically smaller vertex set wins.
            Some((bc, bd, bm)) => {
                let lhs = &cut * bd;
                let rhs = bc * &dem;
                lhs < rhs || (lhs == rhs && lex_less(mask, *bm, &verts))
            }
        };
        if better {
            best = Some((cut, dem, mask));
        }
    }
    best.map(|(cut, dem, mask)| {
        let ratio = Weight::from_rational(num_rational::BigRational::new(cut, dem));
        let set = verts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        (ratio, set)
    })
}

fn lex_less(a: u32, b: u32, verts: &[VertexId]) -> bool {
    let set = |m: u32| -> Vec<VertexId> {
        verts
            .iter()
            .enumerate()
            .filter(|(i, _)| m >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    };
    set(a) < set(b)
}

/// What to compare in `equivalence_report`.
pub enum EquivalenceCheck {
    Reach,
    Cut { table_cap: usize },
    Distance,
    Flow { demands: Vec<DemandFunction> },
}

#[derive(Serialize, Debug)]
pub struct Mismatch {
    pub key: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Serialize, Debug)]
pub struct EquivalenceReport {
    pub mode: String,
    pub equivalent: bool,
    pub entries_compared: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Compares `g` and `h` terminal-for-terminal (by position in ascending
/// order) under the requested check and reports every mismatch.
pub fn equivalence_report(
    g: &TerminalGraph,
    h: &TerminalGraph,
    check: &EquivalenceCheck,
) -> EquivalenceReport {
    let mut mismatches = Vec::new();
    let mut compared = 0usize;
    let mode;
    if g.k() != h.k() {
        return EquivalenceReport {
            mode: "structure".into(),
            equivalent: false,
            entries_compared: 0,
            mismatches: vec![Mismatch {
                key: "terminal count".into(),
                lhs: g.k().to_string(),
                rhs: h.k().to_string(),
            }],
        };
    }
    match check {
        EquivalenceCheck::Reach => {
            mode = "reach";
            let a = terminal_reach_matrix(g);
            let b = terminal_reach_matrix(h);
            for i in 0..a.terms.len() {
                for j in 0..a.terms.len() {
                    compared += 1;
                    if a.reach[i][j] != b.reach[i][j] {
                        mismatches.push(Mismatch {
                            key: format!("reach {} -> {}", a.terms[i], a.terms[j]),
                            lhs: a.reach[i][j].to_string(),
                            rhs: b.reach[i][j].to_string(),
                        });
                    }
                }
            }
        }
        EquivalenceCheck::Cut { table_cap } => {
            mode = "cut";
            let a = terminal_mincut_table(g, *table_cap);
            let b = terminal_mincut_table(h, *table_cap);
            for ((mask, va), (_, vb)) in a.entries.iter().zip(&b.entries) {
                compared += 1;
                if va != vb {
                    mismatches.push(Mismatch {
                        key: format!("cut mask {mask:#b}"),
                        lhs: va.to_string(),
                        rhs: vb.to_string(),
                    });
                }
            }
        }
        EquivalenceCheck::Distance => {
            mode = "distance";
            let a = terminal_distance_matrix(g);
            let b = terminal_distance_matrix(h);
            for i in 0..a.terms.len() {
                for j in 0..a.terms.len() {
                    compared += 1;
                    if a.dist[i][j] != b.dist[i][j] {
                        let show = |x: &Option<Weight>| match x {
                            None => "unreachable".to_string(),
                            Some(w) => w.to_string(),
                        };
                        mismatches.push(Mismatch {
                            key: format!("dist {} -> {}", a.terms[i], a.terms[j]),
                            lhs: show(&a.dist[i][j]),
                            rhs: show(&b.dist[i][j]),
                        });
                    }
                }
            }
        }
        EquivalenceCheck::Flow { demands } => {
            mode = "flow";
            for (i, d) in demands.iter().enumerate() {
                compared += 1;
                // Map each demand onto h's terminals by position.
                let d_h = remap_demand(g, h, d);
                let a = sparsest_cut_bruteforce(g, d);
                let b = sparsest_cut_bruteforce(h, &d_h);
                let show = |x: &Option<(Weight, BTreeSet<VertexId>)>| match x {
                    None => "no separated demand".to_string(),
                    Some((w, _)) => w.to_string(),
                };
                if a.as_ref().map(|(w, _)| w) != b.as_ref().map(|(w, _)| w) {
                    mismatches.push(Mismatch {
                        key: format!("sparsity, demand {i}"),
                        lhs: show(&a),
                        rhs: show(&b),
                    });
                }
            }
        }
    }
    EquivalenceReport {
        mode: mode.into(),
        equivalent: mismatches.is_empty(),
        entries_compared: compared,
        mismatches,
    }
}

/// Rewrites demand endpoints from `g`'s terminals to `h`'s by position in
/// the ascending terminal lists.
pub fn remap_demand(g: &TerminalGraph, h: &TerminalGraph, d: &DemandFunction) -> DemandFunction {
    let from: Vec<VertexId> = g.terminals().collect();
    let to: Vec<VertexId> = h.terminals().collect();
    assert_eq!(from.len(), to.len());
    let map: BTreeMap<VertexId, VertexId> = from.into_iter().zip(to).collect();
    DemandFunction {
        demands: d
            .demands
            .iter()
            .map(|(a, b, w)| (map[a], map[b], w.clone()))
            .collect(),
    }
}

/// Convenience: true when the graph's weights are all usable as capacities
/// or lengths (non-negativity is a construction invariant; this re-asserts
/// the mode).
pub fn expects_mode(g: &TerminalGraph, mode: WeightMode) -> bool {
    g.mode() == mode
}
