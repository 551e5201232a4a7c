//! Instance generators and per-instance property checks. All generators
//! take explicit seeds and are deterministic.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{MinorOp, TerminalGraph, VertexId, WeightMode};
use crate::weight::Weight;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("grid parameter must be a multiple of 4, at least 8")]
    BadLbK,
    #[error("no triple system on {0} points: need 1 or 3 mod 6, at least 3")]
    BadStsK(usize),
    #[error("chosen triples must come from the supplied subset")]
    BadSubset,
    #[error("no terminal path from {0} to {1}")]
    NoPath(VertexId, VertexId),
}

/// Shape of a random digraph instance.
#[derive(Clone, Debug)]
pub struct DigraphConfig {
    pub seed: u64,
    pub n: usize,
    /// Edge target; silently capped at the number of available slots.
    pub m: usize,
    pub k: usize,
    /// Forward edges along a random vertex order only.
    pub acyclic: bool,
    /// Sample from an orthogonal grid instead of all pairs; vertices carry
    /// grid coordinates and terminals sit on the bounding box boundary.
    pub planar: bool,
}

/// Random unweighted digraph with `k` terminals.
pub fn gen_random_digraph(cfg: &DigraphConfig) -> TerminalGraph {
    assert!(cfg.n >= 2 && cfg.k >= 1 && cfg.k <= cfg.n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if cfg.planar {
        return planar_digraph(cfg, &mut rng);
    }
    let mut g = TerminalGraph::new(true, WeightMode::None);
    let ids: Vec<VertexId> = (0..cfg.n).map(|_| g.add_vertex()).collect();
    let mut order: Vec<usize> = (0..cfg.n).collect();
    order.shuffle(&mut rng);
    let rank = {
        let mut r = vec![0usize; cfg.n];
        for (pos, &v) in order.iter().enumerate() {
            r[v] = pos;
        }
        r
    };
    let cap = if cfg.acyclic {
        cfg.n * (cfg.n - 1) / 2
    } else {
        cfg.n * (cfg.n - 1)
    };
    let m = cfg.m.min(cap);
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    while used.len() < m {
        let a = rng.gen_range(0..cfg.n);
        let b = rng.gen_range(0..cfg.n);
        if a == b {
            continue;
        }
        let (a, b) = if cfg.acyclic && rank[a] > rank[b] {
            (b, a)
        } else {
            (a, b)
        };
        if used.insert((a, b)) {
            g.add_edge(ids[a], ids[b], Weight::one());
        }
    }
    let mut picks: Vec<usize> = (0..cfg.n).collect();
    picks.shuffle(&mut rng);
    for &v in picks.iter().take(cfg.k) {
        g.make_terminal(ids[v]);
    }
    g
}

/// Random orientation of a random subgrid; planar by construction.
fn planar_digraph(cfg: &DigraphConfig, rng: &mut ChaCha8Rng) -> TerminalGraph {
    let rows = (cfg.n as f64).sqrt().ceil() as usize;
    let cols = cfg.n.div_ceil(rows);
    let mut g = TerminalGraph::new(true, WeightMode::None);
    let mut ids = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let v = g.add_vertex();
        let (r, c) = (i / cols, i % cols);
        g.set_coord(v, Some((r as u32 + 1, c as u32 + 1)));
        ids.push(v);
    }
    let at = |r: usize, c: usize| -> Option<VertexId> {
        let i = r * cols + c;
        (c < cols && i < cfg.n).then(|| ids[i])
    };
    let mut edges = 0usize;
    for i in 0..cfg.n {
        let (r, c) = (i / cols, i % cols);
        for (nr, nc) in [(r, c + 1), (r + 1, c)] {
            let Some(u) = at(nr, nc) else { continue };
            if edges >= cfg.m || rng.gen_range(0..100) >= 85 {
                continue;
            }
            // Lexicographic orientation keeps acyclic output acyclic.
            if cfg.acyclic || rng.gen_bool(0.5) {
                g.add_edge(ids[i], u, Weight::one());
            } else {
                g.add_edge(u, ids[i], Weight::one());
            }
            edges += 1;
        }
    }
    let mut boundary: Vec<VertexId> = ids
        .iter()
        .copied()
        .filter(|&v| {
            let (r, c) = g.coord(v).unwrap();
            r == 1 || c == 1 || r as usize == rows || c as usize == cols
        })
        .collect();
    boundary.shuffle(rng);
    for &v in boundary.iter().take(cfg.k) {
        g.make_terminal(v);
    }
    // Tiny grids can have fewer boundary cells than k.
    let mut rest: Vec<VertexId> = ids
        .iter()
        .copied()
        .filter(|v| !g.is_terminal(*v))
        .collect();
    rest.shuffle(rng);
    for &v in rest.iter().take(cfg.k.saturating_sub(boundary.len())) {
        g.make_terminal(v);
    }
    g
}

/// Parameters for boundary-terminal grid instances.
#[derive(Clone, Debug)]
pub struct OsInstanceConfig {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub mode: WeightMode,
}

/// Generates a connected partial grid with coordinates, positive rational
/// weights, and `k` terminals spread along the bounding box boundary. Most
/// draws are thin strips; the rest are blocky grids with interior holes.
pub fn gen_os_instance(cfg: &OsInstanceConfig) -> TerminalGraph {
    assert!(cfg.n >= 2, "need at least two vertices");
    assert!(cfg.k >= 2, "need at least two terminals");
    assert!(cfg.mode != WeightMode::None, "pick cut or length weights");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n.min(36);
    let blocky = n >= 9 && rng.gen_range(0..10) >= 7;
    let (rows, cols) = if blocky {
        let r = ((n as f64).sqrt() as usize).clamp(3, 6);
        (r, (n / r).clamp(3, 6))
    } else {
        let r = if n <= 3 { 1 } else { 2 };
        (r, (n / r).clamp(2, 18))
    };
    let mut g = TerminalGraph::new(false, cfg.mode);
    let mut at = BTreeMap::new();
    for i in 1..=rows {
        for j in 1..=cols {
            let v = g.add_vertex();
            g.set_coord(v, Some((i as u32, j as u32)));
            at.insert((i, j), v);
        }
    }
    for (&(i, j), &v) in &at {
        for q in [(i, j + 1), (i + 1, j)] {
            if let Some(&u) = at.get(&q) {
                let w = Weight::ratio(rng.gen_range(1..12), rng.gen_range(1..4));
                g.add_edge(v, u, w);
            }
        }
    }
    if blocky {
        // Punch interior holes, keeping the bounding box and connectivity.
        for i in 2..rows {
            for j in 2..cols {
                if rng.gen_range(0..10) < 2 {
                    let mut trial = g.clone();
                    trial
                        .apply_minor_op_mut(MinorOp::DeleteVertex(at[&(i, j)]))
                        .unwrap();
                    if trial.is_connected() {
                        g = trial;
                    }
                }
            }
        }
    }
    let mut ring = Vec::new();
    for j in 1..=cols {
        ring.push((1, j));
    }
    for i in 2..=rows {
        ring.push((i, cols));
    }
    if rows > 1 {
        for j in (1..cols).rev() {
            ring.push((rows, j));
        }
    }
    for i in (2..rows).rev() {
        ring.push((i, 1));
    }
    assert!(cfg.k <= ring.len(), "more terminals than boundary cells");
    let off = rng.gen_range(0..ring.len());
    for t in 0..cfg.k {
        let p = ring[(off + t * ring.len() / cfg.k) % ring.len()];
        g.make_terminal(at[&p]);
    }
    assert_eq!(g.k(), cfg.k);
    g
}

/// A directed grid gadget whose reachability pattern forces a quadratic
/// number of non-terminals in any reachability-preserving minor.
#[derive(Clone, Debug)]
pub struct LbGrid {
    pub graph: TerminalGraph,
    /// Disjoint witness paths per family; terminals number `4 * paths`.
    pub paths: usize,
    pub left: Vec<VertexId>,
    pub right: Vec<VertexId>,
    pub top: Vec<VertexId>,
    pub bottom: Vec<VertexId>,
}

/// Builds the lower-bound gadget for `k` a multiple of 4, at least 8. With
/// `r = k / 4` it is an `(r+1) x (r+1)` grid with the four corners removed,
/// every edge oriented rightward or downward, boundary edges joining two
/// boundary vertices dropped, and all remaining boundary vertices made
/// terminals (`r - 1` per side).
pub fn gen_lb_grid(k: usize) -> Result<LbGrid, InstanceError> {
    if k < 8 || k % 4 != 0 {
        return Err(InstanceError::BadLbK);
    }
    let n = k / 4 + 1;
    let mut g = TerminalGraph::new(true, WeightMode::None);
    let mut at = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            if (i == 1 || i == n) && (j == 1 || j == n) {
                continue;
            }
            let v = g.add_vertex();
            g.set_coord(v, Some((i as u32, j as u32)));
            at.insert((i, j), v);
        }
    }
    let side = |i: usize, j: usize| i == 1 || i == n || j == 1 || j == n;
    for (&(i, j), &v) in &at {
        for q in [(i, j + 1), (i + 1, j)] {
            if let Some(&u) = at.get(&q) {
                if side(i, j) && side(q.0, q.1) {
                    continue;
                }
                g.add_edge(v, u, Weight::one());
            }
        }
    }
    let left: Vec<_> = (2..n).map(|i| at[&(i, 1)]).collect();
    let right: Vec<_> = (2..n).map(|i| at[&(i, n)]).collect();
    let top: Vec<_> = (2..n).map(|j| at[&(1, j)]).collect();
    let bottom: Vec<_> = (2..n).map(|j| at[&(n, j)]).collect();
    for v in left.iter().chain(&right).chain(&top).chain(&bottom) {
        g.make_terminal(*v);
    }
    Ok(LbGrid {
        graph: g,
        paths: n - 2,
        left,
        right,
        top,
        bottom,
    })
}

/// Outcome of auditing the witness structure of a lower-bound gadget, either
/// on the gadget itself or on a reachability-preserving minor of it.
#[derive(Clone, Debug)]
pub struct LbReport {
    /// Left-to-right and top-to-bottom reachability holds exactly for
    /// same-index or later-index partners.
    pub order_respected: bool,
    pub rows_disjoint: bool,
    pub cols_disjoint: bool,
    pub crossings_complete: bool,
    pub crossings_internal: bool,
    pub distinct_crossings: usize,
    pub ok: bool,
}

fn directed_path(g: &TerminalGraph, s: VertexId, t: VertexId) -> Option<Vec<VertexId>> {
    let mut parent = BTreeMap::from([(s, s)]);
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        if v == t {
            let mut path = vec![t];
            let mut cur = t;
            while cur != s {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for (_, u) in g.out_edges(v) {
            parent.entry(u).or_insert_with(|| {
                queue.push_back(u);
                v
            });
        }
    }
    None
}

/// Checks the path witnesses in `h`, which must carry the gadget's terminals:
/// one directed path per matched pair, vertex-disjoint within each family,
/// every cross pair meeting in a non-terminal, and all meeting points
/// distinct. Any graph passing this has at least `paths * paths`
/// non-terminals.
pub fn verify_lb_grid(lb: &LbGrid, h: &TerminalGraph) -> Result<LbReport, InstanceError> {
    let p = lb.paths;
    let mut order_respected = true;
    for a in 0..p {
        for b in 0..p {
            let lr = directed_path(h, lb.left[a], lb.right[b]).is_some();
            let tb = directed_path(h, lb.top[a], lb.bottom[b]).is_some();
            if lr != (b >= a) || tb != (b >= a) {
                order_respected = false;
            }
        }
    }
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for a in 0..p {
        rows.push(
            directed_path(h, lb.left[a], lb.right[a])
                .ok_or(InstanceError::NoPath(lb.left[a], lb.right[a]))?,
        );
        cols.push(
            directed_path(h, lb.top[a], lb.bottom[a])
                .ok_or(InstanceError::NoPath(lb.top[a], lb.bottom[a]))?,
        );
    }
    let disjoint = |family: &[Vec<VertexId>]| {
        let mut seen = BTreeSet::new();
        family.iter().flatten().all(|v| seen.insert(*v))
    };
    let rows_disjoint = disjoint(&rows);
    let cols_disjoint = disjoint(&cols);
    let mut crossings_complete = true;
    let mut crossings_internal = true;
    let mut meets = BTreeSet::new();
    for row in &rows {
        let on_row: BTreeSet<_> = row.iter().copied().collect();
        for col in &cols {
            match col.iter().find(|v| on_row.contains(v)) {
                None => crossings_complete = false,
                Some(&z) => {
                    if h.is_terminal(z) {
                        crossings_internal = false;
                    }
                    meets.insert(z);
                }
            }
        }
    }
    let distinct_crossings = meets.len();
    let ok = order_respected
        && rows_disjoint
        && cols_disjoint
        && crossings_complete
        && crossings_internal
        && distinct_crossings == p * p;
    Ok(LbReport {
        order_respected,
        rows_disjoint,
        cols_disjoint,
        crossings_complete,
        crossings_internal,
        distinct_crossings,
        ok,
    })
}

/// A Steiner triple system on points `0..k`: every pair of points lies in
/// exactly one triple. Triples are stored sorted, ascending within and
/// across.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTripleSystem {
    pub k: usize,
    pub triples: Vec<[usize; 3]>,
}

impl SteinerTripleSystem {
    /// Index of the unique triple containing both points.
    pub fn triple_of(&self, x: usize, y: usize) -> usize {
        self.triples
            .iter()
            .position(|t| t.contains(&x) && t.contains(&y))
            .expect("pair not covered")
    }
}

/// Builds a Steiner triple system for `k` congruent to 1 or 3 mod 6 by
/// quasigroup constructions over `Z_m x {0,1,2}`. Every emitted system is
/// checked pair by pair before returning.
pub fn gen_sts(k: usize) -> Result<SteinerTripleSystem, InstanceError> {
    if k < 3 || (k % 6 != 1 && k % 6 != 3) {
        return Err(InstanceError::BadStsK(k));
    }
    let mut triples = Vec::new();
    if k % 6 == 3 {
        // Points i + j*m for i in Z_m, column j; m odd, halving is exact.
        let m = k / 3;
        let half = (m + 1) / 2;
        for i in 0..m {
            triples.push([i, i + m, i + 2 * m]);
        }
        for j in 0..3 {
            for x in 0..m {
                for y in x + 1..m {
                    let z = (x + y) * half % m;
                    let mut t = [x + j * m, y + j * m, z + ((j + 1) % 3) * m];
                    t.sort_unstable();
                    triples.push(t);
                }
            }
        }
    } else {
        // Points i + j*m plus one extra point k-1; m even, the half map
        // sends 2a to a and 2a+1 to t+a.
        let t = k / 6;
        let m = 2 * t;
        let inf = k - 1;
        let f = |s: usize| if s % 2 == 0 { s / 2 } else { t + (s - 1) / 2 };
        for i in 0..t {
            triples.push([i, i + m, i + 2 * m]);
        }
        for j in 0..3 {
            for i in 0..t {
                let mut tr = [inf, t + i + j * m, i + ((j + 1) % 3) * m];
                tr.sort_unstable();
                triples.push(tr);
            }
        }
        for j in 0..3 {
            for x in 0..m {
                for y in x + 1..m {
                    let z = f((x + y) % m);
                    let mut tr = [x + j * m, y + j * m, z + ((j + 1) % 3) * m];
                    tr.sort_unstable();
                    triples.push(tr);
                }
            }
        }
    }
    triples.sort_unstable();
    let sts = SteinerTripleSystem { k, triples };
    let mut pairs = BTreeSet::new();
    for t in &sts.triples {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            assert!(a < b && b < k, "triple out of range");
            assert!(pairs.insert((a, b)), "pair covered twice");
        }
    }
    assert_eq!(pairs.len(), k * (k - 1) / 2, "pair left uncovered");
    Ok(sts)
}

/// Adjacency among the chosen triples: an edge joins two triples sharing
/// exactly one point and carries that point as its label.
fn triple_adjacency(sts: &SteinerTripleSystem, subset: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); subset.len()];
    for a in 0..subset.len() {
        for b in a + 1..subset.len() {
            let ta = sts.triples[subset[a]];
            let tb = sts.triples[subset[b]];
            let shared: Vec<_> = ta.iter().filter(|x| tb.contains(x)).collect();
            if let [x] = shared[..] {
                adj[a].push((b, *x));
                adj[b].push((a, *x));
            }
        }
    }
    adj
}

/// Exhaustive search for a cycle of at most `t` chosen triples in which no
/// two cyclically consecutive edges carry the same label. Returns one such
/// cycle as triple indices if present.
pub fn short_detouring_cycle(
    sts: &SteinerTripleSystem,
    subset: &[usize],
    t: usize,
) -> Option<Vec<usize>> {
    fn grow(
        adj: &[Vec<(usize, usize)>],
        start: usize,
        path: &mut Vec<usize>,
        labels: &mut Vec<usize>,
        on_path: &mut [bool],
        t: usize,
    ) -> bool {
        let cur = *path.last().unwrap();
        for &(w, lab) in &adj[cur] {
            if labels.last() == Some(&lab) {
                continue;
            }
            if w == start && path.len() >= 3 && labels[0] != lab {
                return true;
            }
            if w > start && !on_path[w] && path.len() < t {
                path.push(w);
                labels.push(lab);
                on_path[w] = true;
                if grow(adj, start, path, labels, on_path, t) {
                    return true;
                }
                on_path[w] = false;
                labels.pop();
                path.pop();
            }
        }
        false
    }
    let adj = triple_adjacency(sts, subset);
    for s in 0..subset.len() {
        let mut path = vec![s];
        let mut labels = Vec::new();
        let mut on_path = vec![false; subset.len()];
        on_path[s] = true;
        if grow(&adj, s, &mut path, &mut labels, &mut on_path, t) {
            return Some(path.iter().map(|&i| subset[i]).collect());
        }
    }
    None
}

/// Draws a random subset of triples at rate `k^(1/(t-1) - 1) / 4`, then
/// deletes one triple from every surviving short detouring cycle. The result
/// is re-checked to have no detouring cycle of length at most `t` and is
/// never empty; its size is reported, not guaranteed.
pub fn detouring_subset(sts: &SteinerTripleSystem, t: usize, seed: u64) -> Vec<usize> {
    assert!(t >= 3, "cycles have at least three triples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kf = sts.k as f64;
    let p = kf.powf(1.0 / (t as f64 - 1.0) - 1.0) / 4.0;
    let mut subset: Vec<usize> = (0..sts.triples.len())
        .filter(|_| rng.gen::<f64>() < p)
        .collect();
    while let Some(cycle) = short_detouring_cycle(sts, &subset, t) {
        subset.retain(|i| *i != cycle[0]);
    }
    if subset.is_empty() {
        subset.push(0);
    }
    assert!(short_detouring_cycle(sts, &subset, t).is_none());
    subset
}

/// Builds one member of the incompressibility family: one terminal per
/// point, one non-terminal hub per chosen triple, unit length edges from a
/// hub to its three points, except that hubs outside `r_set` drop the edge
/// to their smallest point.
pub fn gen_incompressibility_family(
    sts: &SteinerTripleSystem,
    subset: &[usize],
    r_set: &[usize],
) -> Result<TerminalGraph, InstanceError> {
    if r_set.iter().any(|i| !subset.contains(i)) {
        return Err(InstanceError::BadSubset);
    }
    let mut g = TerminalGraph::new(false, WeightMode::Length);
    let mut pts = Vec::new();
    for _ in 0..sts.k {
        let v = g.add_vertex();
        g.make_terminal(v);
        pts.push(v);
    }
    for &i in subset {
        let [a, b, c] = sts.triples[i];
        let hub = g.add_vertex();
        g.add_edge(hub, pts[b], Weight::one());
        g.add_edge(hub, pts[c], Weight::one());
        if r_set.contains(&i) {
            g.add_edge(hub, pts[a], Weight::one());
        }
    }
    Ok(g)
}

/// Distance audit of one family member.
#[derive(Clone, Debug)]
pub struct IncompReport {
    /// Pairs joined through a hub that kept both of their edges.
    pub covered_pairs: usize,
    pub covered_at_two: bool,
    /// Pairs whose triple was chosen but whose hub lost the pair's edge.
    pub uncovered_pairs: usize,
    pub uncovered_far: bool,
    pub ok: bool,
}

/// Checks the two distance claims behind the family: covered pairs sit at
/// distance exactly 2, and pairs whose chosen triple does not cover them sit
/// at distance at least `2t` or are disconnected.
pub fn verify_incompressibility_claims(
    g: &TerminalGraph,
    sts: &SteinerTripleSystem,
    subset: &[usize],
    r_set: &[usize],
    t: usize,
) -> IncompReport {
    let dm = crate::oracles::terminal_distance_matrix(g);
    assert_eq!(dm.terms.len(), sts.k);
    let two = Weight::from_int(2);
    let far = Weight::from_int(2 * t as u64);
    let mut covered_pairs = 0;
    let mut covered_at_two = true;
    let mut uncovered_pairs = 0;
    let mut uncovered_far = true;
    for x in 0..sts.k {
        for y in x + 1..sts.k {
            let i = sts.triple_of(x, y);
            if !subset.contains(&i) {
                continue;
            }
            let low = sts.triples[i][0];
            let covered = r_set.contains(&i) || (x != low && y != low);
            let d = dm.dist[x][y].clone();
            if covered {
                covered_pairs += 1;
                if d != Some(two.clone()) {
                    covered_at_two = false;
                }
            } else {
                uncovered_pairs += 1;
                if let Some(d) = d {
                    if d < far {
                        uncovered_far = false;
                    }
                }
            }
        }
    }
    let ok = covered_at_two && uncovered_far;
    IncompReport {
        covered_pairs,
        covered_at_two,
        uncovered_pairs,
        uncovered_far,
        ok,
    }
}
