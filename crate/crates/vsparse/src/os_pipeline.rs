//! Exact sparsification of plane graphs whose terminals all sit on the
//! outer boundary, given as partial grids with vertex coordinates. The
//! pipeline caps degrees by vertex splitting, embeds the graph in a full
//! square grid, folds the grid boundary onto the diagonal of a triangular
//! half-grid, and then eliminates every non-terminal grid line with local
//! rewrite rules. Each stage preserves terminal min cuts (capacitated
//! modes) or terminal distances (length mode) exactly, so the output
//! answers the same queries as the input on a vertex count bounded by a
//! function of the terminal count alone.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;
use thiserror::Error;

use crate::graph::{EdgeId, MinorOp, TerminalGraph, VertexId, WeightMode};
use crate::weight::Weight;
use crate::wye_delta::{apply_rule, greedy_reduce, ReduceError, ReductionLog, ReductionStep, Tok};

/// Which terminal quantity the sparsifier must preserve.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OsMode {
    Cut,
    Distance,
    Flow,
}

impl OsMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OsMode::Cut => "cut",
            OsMode::Distance => "distance",
            OsMode::Flow => "flow",
        }
    }

    /// Edge weight interpretation the input graph must carry.
    pub fn weight_mode(self) -> WeightMode {
        match self {
            OsMode::Cut | OsMode::Flow => WeightMode::Cut,
            OsMode::Distance => WeightMode::Length,
        }
    }
}

#[derive(Error, Debug)]
pub enum OsError {
    #[error("pipeline requires an undirected graph")]
    Directed,
    #[error("pipeline requires cut or length weights")]
    NoWeights,
    #[error("{0} mode needs {1} edge weights")]
    WrongWeights(&'static str, &'static str),
    #[error("need at least two terminals")]
    TooFewTerminals,
    #[error("vertex {0} has no coordinate")]
    MissingCoord(VertexId),
    #[error("vertices {0} and {1} share coordinate ({2}, {3})")]
    CoordClash(VertexId, VertexId, u32, u32),
    #[error("edge {0} does not join grid neighbors")]
    NotGridEdge(EdgeId),
    #[error("edges {0} and {1} are parallel")]
    NotSimple(EdgeId, EdgeId),
    #[error("terminal {0} is not on the boundary")]
    TerminalInside(VertexId),
    #[error("distance mode needs a connected graph")]
    Disconnected,
    #[error("embedding routes collide at ({0}, {1})")]
    RouteClash(u32, u32),
    #[error("not a full half-grid: {0}")]
    BadHalfGrid(String),
    #[error("reduction schedule broke: {0}")]
    BadShape(String),
    #[error("rewrite failed at {0}: {1}")]
    Rule(String, ReduceError),
}

/// Checks that every vertex carries a coordinate, coordinates are unique,
/// every edge joins grid neighbors and no two edges are parallel. Returns
/// the coordinates translated so the occupied bounding box starts at
/// (1, 1).
fn validate_partial_grid(g: &TerminalGraph) -> Result<BTreeMap<VertexId, (u32, u32)>, OsError> {
    if g.directed() {
        return Err(OsError::Directed);
    }
    if g.mode() == WeightMode::None {
        return Err(OsError::NoWeights);
    }
    let mut raw = BTreeMap::new();
    for v in g.vertices() {
        let Some(c) = g.coord(v) else {
            return Err(OsError::MissingCoord(v));
        };
        raw.insert(v, c);
    }
    let minr = raw.values().map(|c| c.0).min().unwrap_or(1);
    let minc = raw.values().map(|c| c.1).min().unwrap_or(1);
    let coords: BTreeMap<VertexId, (u32, u32)> = raw
        .into_iter()
        .map(|(v, (r, c))| (v, (r - minr + 1, c - minc + 1)))
        .collect();
    let mut by_pos: BTreeMap<(u32, u32), VertexId> = BTreeMap::new();
    for (&v, &p) in &coords {
        if let Some(&u) = by_pos.get(&p) {
            return Err(OsError::CoordClash(u, v, p.0, p.1));
        }
        by_pos.insert(p, v);
    }
    let mut pairs: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    for e in g.edge_ids() {
        let ed = g.edge(e);
        let (a, b) = (coords[&ed.u], coords[&ed.v]);
        if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) != 1 {
            return Err(OsError::NotGridEdge(e));
        }
        let key = (ed.u.min(ed.v), ed.u.max(ed.v));
        if let Some(&first) = pairs.get(&key) {
            return Err(OsError::NotSimple(first, e));
        }
        pairs.insert(key, e);
    }
    Ok(coords)
}

/// One capped vertex: the original id, its coordinate, and the path of
/// copies in rotation order (north, east, south, west neighbor).
#[derive(Clone, Debug)]
pub struct SplitRecord {
    pub original: VertexId,
    pub coord: (u32, u32),
    pub copies: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub graph: TerminalGraph,
    pub splits: Vec<SplitRecord>,
}

fn compass_rank(from: (u32, u32), to: (u32, u32)) -> u8 {
    if to.0 < from.0 {
        0
    } else if to.1 > from.1 {
        1
    } else if to.0 > from.0 {
        2
    } else {
        3
    }
}

/// Caps every degree above three by replacing the vertex with a path of
/// copies, one per incident edge in rotation order, joined by rungs no
/// optimal cut or path ever crosses: capacity above the graph total, or
/// length zero. A split terminal keeps its status on the first copy.
/// Coordinates are normalized so the occupied bounding box starts at
/// (1, 1); copies carry no coordinate of their own.
pub fn split_vertices(g: &TerminalGraph) -> Result<SplitResult, OsError> {
    let coords = validate_partial_grid(g)?;
    let mut out = g.clone();
    for (&v, &p) in &coords {
        out.set_coord(v, Some(p));
    }
    let rung = match g.mode() {
        WeightMode::Cut => {
            let mut total = Weight::zero();
            for e in g.edge_ids() {
                total += &g.edge(e).w;
            }
            total + Weight::one()
        }
        WeightMode::Length => Weight::zero(),
        WeightMode::None => unreachable!("validated above"),
    };
    let mut splits = Vec::new();
    // Copies of earlier splits keep their original's position for
    // direction ranking.
    let mut homes = coords.clone();
    let verts: Vec<VertexId> = out.vertices().collect();
    for v in verts {
        if out.degree(v) <= 3 {
            continue;
        }
        let p = coords[&v];
        let mut slots: Vec<(u8, VertexId, Weight)> = out
            .incident_edges(v)
            .into_iter()
            .map(|e| {
                let other = out.edge(e).other(v);
                (compass_rank(p, homes[&other]), other, out.edge(e).w.clone())
            })
            .collect();
        slots.sort_by(|a, b| a.0.cmp(&b.0));
        assert!(
            slots.len() == 4 && slots.iter().map(|s| s.0).eq(0..4),
            "grid vertices above degree three have all four neighbors"
        );
        let was_terminal = out.is_terminal(v);
        let copies: Vec<VertexId> = (0..slots.len()).map(|_| out.add_vertex()).collect();
        for &cp in &copies {
            homes.insert(cp, p);
        }
        for w in copies.windows(2) {
            out.add_edge(w[0], w[1], rung.clone());
        }
        for (i, (_, other, wgt)) in slots.iter().enumerate() {
            out.add_edge(*other, copies[i], wgt.clone());
        }
        if was_terminal {
            out.clear_terminal(v);
            out.make_terminal(copies[0]);
        }
        out.apply_minor_op_mut(MinorOp::DeleteVertex(v))
            .expect("split original is a plain vertex");
        splits.push(SplitRecord { original: v, coord: p, copies });
    }
    Ok(SplitResult { graph: out, splits })
}

/// A full square grid: positions (1, 1) through (n, n) all occupied,
/// every unit adjacency present exactly once. Padding edges carry weights
/// no optimal cut or path ever uses.
#[derive(Clone, Debug)]
pub struct GridGraph {
    pub g: TerminalGraph,
    pub n: u32,
}

impl GridGraph {
    /// Checks the full-square invariant.
    pub fn validate(&self) -> Result<(), OsError> {
        let n = self.n as usize;
        let coords = validate_partial_grid(&self.g)?;
        if self.g.n() != n * n {
            return Err(OsError::BadShape(format!(
                "grid has {} vertices, expected {}",
                self.g.n(),
                n * n
            )));
        }
        if self.g.m() != 2 * n * (n - 1) {
            return Err(OsError::BadShape(format!(
                "grid has {} edges, expected {}",
                self.g.m(),
                2 * n * (n - 1)
            )));
        }
        for p in coords.values() {
            if p.0 > self.n || p.1 > self.n {
                return Err(OsError::BadShape(format!("position {p:?} outside the square")));
            }
        }
        for t in self.g.terminals() {
            let p = coords[&t];
            if p.0 != 1 && p.0 != self.n && p.1 != 1 && p.1 != self.n {
                return Err(OsError::TerminalInside(t));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EmbedResult {
    pub grid: GridGraph,
    /// Input vertex to its grid vertex, ascending ids on both sides.
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    /// Input edge to the grid positions of its routed path.
    pub paths: BTreeMap<EdgeId, Vec<(u32, u32)>>,
}

fn pair_key(a: (u32, u32), b: (u32, u32)) -> ((u32, u32), (u32, u32)) {
    (a.min(b), a.max(b))
}

/// Shared materializer: turns routed cell paths into a graph with one
/// vertex per occupied position, rejecting any route collision.
struct Layout {
    g: TerminalGraph,
    at: BTreeMap<(u32, u32), VertexId>,
    used: BTreeSet<((u32, u32), (u32, u32))>,
    interiors: BTreeSet<(u32, u32)>,
}

impl Layout {
    fn new(mode: WeightMode) -> Layout {
        Layout {
            g: TerminalGraph::new(false, mode),
            at: BTreeMap::new(),
            used: BTreeSet::new(),
            interiors: BTreeSet::new(),
        }
    }

    fn ensure(&mut self, p: (u32, u32)) -> VertexId {
        if let Some(&v) = self.at.get(&p) {
            return v;
        }
        let v = self.g.add_vertex();
        self.g.set_coord(v, Some(p));
        self.at.insert(p, v);
        v
    }

    /// Lays one routed edge, weight `piece` per cell pair. Interior cells
    /// must be fresh and must avoid every mapped vertex position.
    fn lay(
        &mut self,
        cells: &[(u32, u32)],
        piece: &Weight,
        mapped: &BTreeSet<(u32, u32)>,
    ) -> Result<(), OsError> {
        for p in &cells[1..cells.len() - 1] {
            if mapped.contains(p) || !self.interiors.insert(*p) {
                return Err(OsError::RouteClash(p.0, p.1));
            }
        }
        for win in cells.windows(2) {
            if !self.used.insert(pair_key(win[0], win[1])) {
                return Err(OsError::RouteClash(win[0].0, win[0].1));
            }
            let a = self.ensure(win[0]);
            let b = self.ensure(win[1]);
            self.g.add_edge(a, b, piece.clone());
        }
        Ok(())
    }

    fn pad_edge(&mut self, a: (u32, u32), b: (u32, u32), w: &Weight) {
        if self.used.insert(pair_key(a, b)) {
            let x = self.ensure(a);
            let y = self.ensure(b);
            self.g.add_edge(x, y, w.clone());
        }
    }
}

/// Expands sparse axis-aligned waypoints into the full inclusive cell
/// list, one unit step at a time.
fn expand(wps: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = vec![wps[0]];
    for win in wps.windows(2) {
        let (a, b) = (win[0], win[1]);
        assert!(a.0 == b.0 || a.1 == b.1, "route hops are axis-aligned");
        let mut cur = a;
        while cur != b {
            if cur.0 < b.0 {
                cur.0 += 1;
            } else if cur.0 > b.0 {
                cur.0 -= 1;
            } else if cur.1 < b.1 {
                cur.1 += 1;
            } else {
                cur.1 -= 1;
            }
            out.push(cur);
        }
    }
    out
}

/// Sum of all edge weights; the base for padding weights that no optimal
/// cut or shortest path ever touches.
fn weight_total(g: &TerminalGraph) -> Weight {
    let mut total = Weight::zero();
    for e in g.edge_ids() {
        total += &g.edge(e).w;
    }
    total
}

/// Embeds a degree-capped partial grid into a full n-by-n grid. Without
/// splits the placement is the identity on coordinates; with splits every
/// original cell becomes a three-by-three block whose center hosts the
/// vertex and whose edge midpoints serve as ports, with copies sitting
/// directly on the ports. Boundary terminals move onto their outward
/// port so they stay on the grid boundary. Subdivided edge weights:
/// capacity is copied per piece, length is divided evenly. Unused
/// positions are padded with zero capacity or with lengths above the
/// total, so answers are unchanged.
pub fn orthogonal_grid_embed(split: &SplitResult) -> Result<EmbedResult, OsError> {
    let g = &split.graph;
    if g.directed() {
        return Err(OsError::Directed);
    }
    let mode = g.mode();
    if mode == WeightMode::None {
        return Err(OsError::NoWeights);
    }
    let mut home: BTreeMap<VertexId, (u32, u32)> = BTreeMap::new();
    let mut copy_slot: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut record_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ri, rec) in split.splits.iter().enumerate() {
        for (ci, &cp) in rec.copies.iter().enumerate() {
            home.insert(cp, rec.coord);
            copy_slot.insert(cp, ci);
            record_of.insert(cp, ri);
        }
    }
    for v in g.vertices() {
        if home.contains_key(&v) {
            continue;
        }
        let Some(c) = g.coord(v) else {
            return Err(OsError::MissingCoord(v));
        };
        home.insert(v, c);
    }
    let rmax = home.values().map(|c| c.0).max().unwrap_or(1);
    let cmax = home.values().map(|c| c.1).max().unwrap_or(1);
    let on_boundary = |p: (u32, u32)| p.0 == 1 || p.0 == rmax || p.1 == 1 || p.1 == cmax;
    for t in g.terminals() {
        if !on_boundary(home[&t]) {
            return Err(OsError::TerminalInside(t));
        }
    }
    let scale: u32 = if split.splits.is_empty() { 1 } else { 3 };
    let center = |p: (u32, u32)| (3 * p.0 - 1, 3 * p.1 - 1);
    let port = |p: (u32, u32), d: usize| -> (u32, u32) {
        let (cr, cc) = center(p);
        match d {
            0 => (cr - 1, cc),
            1 => (cr, cc + 1),
            2 => (cr + 1, cc),
            _ => (cr, cc - 1),
        }
    };
    let corner = |p: (u32, u32), a: usize, b: usize| -> (u32, u32) {
        let (cr, cc) = center(p);
        match (a.min(b), a.max(b)) {
            (0, 1) => (cr - 1, cc + 1),
            (1, 2) => (cr + 1, cc + 1),
            (2, 3) => (cr + 1, cc - 1),
            (0, 3) => (cr - 1, cc - 1),
            _ => unreachable!("opposite ports share no corner"),
        }
    };
    let boundary_side = |p: (u32, u32)| -> usize {
        if p.0 == 1 {
            0
        } else if p.0 == rmax {
            2
        } else if p.1 == 1 {
            3
        } else {
            1
        }
    };
    let mut pos: BTreeMap<VertexId, (u32, u32)> = BTreeMap::new();
    for (&v, &h) in &home {
        let p = if scale == 1 {
            h
        } else if let Some(&slot) = copy_slot.get(&v) {
            port(h, slot)
        } else if g.is_terminal(v) {
            port(h, boundary_side(h))
        } else {
            center(h)
        };
        pos.insert(v, p);
    }
    // Route every edge as sparse waypoints inside the blocks it touches.
    let dir_between = |ha: (u32, u32), hb: (u32, u32)| -> usize {
        if hb.0 < ha.0 {
            0
        } else if hb.1 > ha.1 {
            1
        } else if hb.0 > ha.0 {
            2
        } else {
            3
        }
    };
    let contribution = |x: VertexId, far: (u32, u32)| -> Vec<(u32, u32)> {
        let h = home[&x];
        let d = dir_between(h, far);
        let p = pos[&x];
        if copy_slot.contains_key(&x) {
            // Copies already sit on the port facing their neighbor.
            vec![p]
        } else if p == center(h) {
            vec![p, port(h, d)]
        } else {
            // A terminal parked on its outward boundary port.
            let s = (0..4)
                .find(|&s| port(h, s) == p)
                .expect("parked terminals sit on a port");
            if s == d {
                vec![p]
            } else if (s + 2) % 4 == d {
                vec![p, center(h), port(h, d)]
            } else {
                vec![p, corner(h, s, d), port(h, d)]
            }
        }
    };
    let mut routes: BTreeMap<EdgeId, Vec<(u32, u32)>> = BTreeMap::new();
    for e in g.edge_ids() {
        let ed = g.edge(e);
        let wps = if scale == 1 {
            vec![pos[&ed.u], pos[&ed.v]]
        } else if record_of.get(&ed.u).is_some() && record_of.get(&ed.u) == record_of.get(&ed.v) {
            // A rung between consecutive copies rounds the block corner.
            let (sa, sb) = (copy_slot[&ed.u], copy_slot[&ed.v]);
            vec![pos[&ed.u], corner(home[&ed.u], sa, sb), pos[&ed.v]]
        } else {
            let mut w = contribution(ed.u, home[&ed.v]);
            let far = contribution(ed.v, home[&ed.u]);
            w.extend(far.into_iter().rev());
            w
        };
        routes.insert(e, wps);
    }
    let span_r = scale * rmax;
    let span_c = scale * cmax;
    let n = span_r.max(span_c).max(2);
    let stretch = |p: (u32, u32)| -> (u32, u32) {
        let r = if p.0 == span_r { n } else { p.0 };
        let c = if p.1 == span_c { n } else { p.1 };
        (r, c)
    };
    let mut lay = Layout::new(mode);
    let spos: BTreeMap<VertexId, (u32, u32)> = pos.iter().map(|(&v, &p)| (v, stretch(p))).collect();
    let mapped: BTreeSet<(u32, u32)> = spos.values().copied().collect();
    assert_eq!(mapped.len(), spos.len(), "placement is injective");
    let mut vertex_map = BTreeMap::new();
    for v in g.vertices() {
        let id = lay.ensure(spos[&v]);
        vertex_map.insert(v, id);
        if g.is_terminal(v) {
            lay.g.make_terminal(id);
        }
    }
    let mut paths = BTreeMap::new();
    for (e, wps) in routes {
        let swps: Vec<(u32, u32)> = wps.into_iter().map(stretch).collect();
        let cells = expand(&swps);
        let units = cells.len() - 1;
        let w = &g.edge(e).w;
        let piece = match mode {
            WeightMode::Cut => w.clone(),
            WeightMode::Length => w.clone() / Weight::from_int(units as u64),
            WeightMode::None => unreachable!(),
        };
        lay.lay(&cells, &piece, &mapped)?;
        paths.insert(e, cells);
    }
    let pad = match mode {
        WeightMode::Cut => Weight::zero(),
        WeightMode::Length => weight_total(g) + Weight::one(),
        WeightMode::None => unreachable!(),
    };
    for r in 1..=n {
        for c in 1..=n {
            lay.ensure((r, c));
            if r < n {
                lay.pad_edge((r, c), (r + 1, c), &pad);
            }
            if c < n {
                lay.pad_edge((r, c), (r, c + 1), &pad);
            }
        }
    }
    let grid = GridGraph { g: lay.g, n };
    grid.validate()?;
    Ok(EmbedResult { grid, vertex_map, paths })
}

/// The triangular half of a grid: positions (i, j) with i <= j <= ell,
/// unit adjacencies, plus one diagonal edge per consecutive diagonal
/// pair. Terminals sit on the diagonal.
#[derive(Clone, Debug)]
pub struct HalfGrid {
    pub g: TerminalGraph,
    pub ell: u32,
}

#[derive(Clone, Debug)]
pub struct HalfGridResult {
    pub half: HalfGrid,
    /// Grid vertex to its half-grid vertex, ascending ids on both sides.
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    /// Grid edge to the half-grid positions of its routed path.
    pub paths: BTreeMap<EdgeId, Vec<(u32, u32)>>,
}

/// Image of a grid position in the half-grid of size 4n - 3: the grid
/// boundary cycle winds along the diagonal, the interior lands in the
/// bulk.
fn fold(n: u32, p: (u32, u32)) -> (u32, u32) {
    let (i, j) = p;
    if i == 1 && j >= 2 {
        let d = n - j + 1;
        (d, d)
    } else if j == 1 && i <= n - 1 {
        let d = n + i - 1;
        (d, d)
    } else if i == n {
        let d = 2 * n + j - 2;
        (d, d)
    } else if j == n {
        let d = 4 * n - i - 2;
        (d, d)
    } else {
        (n + i - 1, 2 * n + j - 2)
    }
}

/// Full cell path joining the images of two adjacent grid positions.
/// Boundary pairs map to consecutive diagonal cells except the seam pair
/// ((1, n), (2, n)), which wraps around the top row and last column;
/// interior pairs stay adjacent; boundary-to-interior edges run along a
/// straight or single-turn corridor. Corridors for distinct edges are
/// internally disjoint.
fn fold_route(n: u32, pa: (u32, u32), pb: (u32, u32)) -> Vec<(u32, u32)> {
    let ell = 4 * n - 3;
    let on_boundary = |p: (u32, u32)| p.0 == 1 || p.0 == n || p.1 == 1 || p.1 == n;
    let (fa, fb) = (fold(n, pa), fold(n, pb));
    let mut route = match (on_boundary(pa), on_boundary(pb)) {
        (true, true) => {
            let seam = pa.min(pb) == (1, n) && pa.max(pb) == (2, n);
            if seam {
                let mut r = Vec::new();
                for c in 1..=ell {
                    r.push((1, c));
                }
                for i in 2..ell {
                    r.push((i, ell));
                }
                r.push((ell - 1, ell - 1));
                r
            } else {
                assert!(
                    fa.0.abs_diff(fb.0) == 1 && fa.0 == fa.1 && fb.0 == fb.1,
                    "boundary neighbors fold to consecutive diagonal cells"
                );
                vec![fa, fb]
            }
        }
        (false, false) => vec![fa, fb],
        _ => {
            let (it, bd) = if on_boundary(pa) { (pb, pa) } else { (pa, pb) };
            let (i, j) = it;
            let mut r = Vec::new();
            if bd == (i, 1) {
                for c in (n + i - 1..=2 * n).rev() {
                    r.push((n + i - 1, c));
                }
            } else if bd == (n, j) {
                for x in 2 * n - 2..=2 * n + j - 2 {
                    r.push((x, 2 * n + j - 2));
                }
            } else if bd == (1, j) {
                for x in (n - j + 1..=n + 1).rev() {
                    r.push((x, 2 * n + j - 2));
                }
                for c in (n - j + 1..2 * n + j - 2).rev() {
                    r.push((n - j + 1, c));
                }
            } else if bd == (i, n) {
                for c in 3 * n - 3..=4 * n - i - 2 {
                    r.push((n + i - 1, c));
                }
                for x in n + i..=4 * n - i - 2 {
                    r.push((x, 4 * n - i - 2));
                }
            } else {
                unreachable!("interior cells touch the boundary in one of four ways");
            }
            r
        }
    };
    if route[0] != fa {
        route.reverse();
    }
    assert!(
        route[0] == fa && route[route.len() - 1] == fb,
        "folded route joins the two images"
    );
    route
}

/// Checks the full half-grid invariant and returns its size.
fn validate_half_grid(g: &TerminalGraph) -> Result<u32, OsError> {
    if g.directed() {
        return Err(OsError::Directed);
    }
    if g.mode() == WeightMode::None {
        return Err(OsError::NoWeights);
    }
    let mut by_pos: BTreeMap<(u32, u32), VertexId> = BTreeMap::new();
    let mut ell = 0u32;
    for v in g.vertices() {
        let Some(p) = g.coord(v) else {
            return Err(OsError::BadHalfGrid(format!("vertex {v} has no coordinate")));
        };
        if p.0 < 1 || p.0 > p.1 {
            return Err(OsError::BadHalfGrid(format!("position {p:?} outside the triangle")));
        }
        if by_pos.insert(p, v).is_some() {
            return Err(OsError::BadHalfGrid(format!("position {p:?} occupied twice")));
        }
        ell = ell.max(p.1);
    }
    if ell < 2 {
        return Err(OsError::BadHalfGrid("need size at least two".into()));
    }
    let cells = (ell as usize) * (ell as usize + 1) / 2;
    if g.n() != cells {
        return Err(OsError::BadHalfGrid(format!(
            "{} vertices, expected {cells}",
            g.n()
        )));
    }
    let mut pairs: BTreeSet<((u32, u32), (u32, u32))> = BTreeSet::new();
    for e in g.edge_ids() {
        let ed = g.edge(e);
        let (a, b) = (
            g.coord(ed.u).expect("checked above"),
            g.coord(ed.v).expect("checked above"),
        );
        let (lo, hi) = (a.min(b), a.max(b));
        let unit = lo.0 == hi.0 && hi.1 == lo.1 + 1 || lo.1 == hi.1 && hi.0 == lo.0 + 1;
        let diag = lo.0 == lo.1 && hi.0 == hi.1 && hi.0 == lo.0 + 1;
        if !unit && !diag {
            return Err(OsError::BadHalfGrid(format!("edge {a:?}-{b:?} misplaced")));
        }
        if !pairs.insert((lo, hi)) {
            return Err(OsError::BadHalfGrid(format!("edge {a:?}-{b:?} doubled")));
        }
    }
    let expect = (ell as usize) * (ell as usize) - 1;
    if g.m() != expect {
        return Err(OsError::BadHalfGrid(format!(
            "{} edges, expected {expect}",
            g.m()
        )));
    }
    for t in g.terminals() {
        let p = g.coord(t).expect("checked above");
        if p.0 != p.1 {
            return Err(OsError::BadHalfGrid(format!("terminal off the diagonal at {p:?}")));
        }
    }
    Ok(ell)
}

/// Folds a full square grid into the triangular half-grid of size
/// 4n - 3. Grid edges become corridors of copied capacity or evenly
/// divided length; unused cells and adjacencies are padded with zero
/// capacity or lengths above the total.
pub fn grid_to_halfgrid(grid: &GridGraph) -> Result<HalfGridResult, OsError> {
    grid.validate()?;
    let n = grid.n;
    let g = &grid.g;
    let mode = g.mode();
    let ell = 4 * n - 3;
    let images: BTreeMap<VertexId, (u32, u32)> = g
        .vertices()
        .map(|v| (v, fold(n, g.coord(v).expect("grids carry coordinates"))))
        .collect();
    let mapped: BTreeSet<(u32, u32)> = images.values().copied().collect();
    assert_eq!(mapped.len(), images.len(), "folding is injective");
    let mut lay = Layout::new(mode);
    let mut vertex_map = BTreeMap::new();
    for v in g.vertices() {
        let id = lay.ensure(images[&v]);
        vertex_map.insert(v, id);
        if g.is_terminal(v) {
            lay.g.make_terminal(id);
        }
    }
    let mut paths = BTreeMap::new();
    for e in g.edge_ids() {
        let ed = g.edge(e);
        let (pa, pb) = (
            g.coord(ed.u).expect("grids carry coordinates"),
            g.coord(ed.v).expect("grids carry coordinates"),
        );
        let cells = fold_route(n, pa, pb);
        let units = cells.len() - 1;
        let piece = match mode {
            WeightMode::Cut => ed.w.clone(),
            WeightMode::Length => ed.w.clone() / Weight::from_int(units as u64),
            WeightMode::None => unreachable!(),
        };
        lay.lay(&cells, &piece, &mapped)?;
        paths.insert(e, cells);
    }
    let pad = match mode {
        WeightMode::Cut => Weight::zero(),
        WeightMode::Length => weight_total(g) + Weight::one(),
        WeightMode::None => unreachable!(),
    };
    for i in 1..=ell {
        for j in i..=ell {
            lay.ensure((i, j));
            if j < ell {
                lay.pad_edge((i, j), (i, j + 1), &pad);
            }
            if i < j {
                lay.pad_edge((i, j), (i + 1, j), &pad);
            }
        }
    }
    for m in 1..ell {
        lay.pad_edge((m, m), (m + 1, m + 1), &pad);
    }
    let half = HalfGrid { g: lay.g, ell };
    validate_half_grid(&half.g)?;
    Ok(HalfGridResult { half, vertex_map, paths })
}

/// Result of eliminating every non-terminal line of a half-grid.
#[derive(Clone, Debug)]
pub struct GitlerResult {
    /// The reduced graph: the half-grid on the surviving terminal lines,
    /// without diagonal edges, promoted corners still marked terminal.
    pub graph: TerminalGraph,
    /// Replayable record of every rewrite, in order.
    pub log: ReductionLog,
    /// Corner positions promoted to terminals before reduction.
    pub promoted: Vec<(u32, u32)>,
    /// Number of terminal lines after promotion.
    pub k_prime: u32,
}

/// Which way a diagonal shortcut edge is walked to the boundary: toward
/// the upper row rightward or leftward, or toward the lower row
/// rightward.
#[derive(Clone, Copy, PartialEq, Debug)]
enum Drift {
    UpRight,
    UpLeft,
    DownRight,
}

struct Reducer<'a> {
    g: &'a mut TerminalGraph,
    at: BTreeMap<(u32, u32), VertexId>,
    steps: Vec<ReductionStep>,
}

impl Reducer<'_> {
    fn coord(&self, v: VertexId) -> (u32, u32) {
        self.g.coord(v).expect("reduction vertices carry coordinates")
    }

    fn apply(&mut self, rule: u8, sites: Vec<Tok>) -> Result<usize, OsError> {
        let watch: Vec<(VertexId, (u32, u32))> = sites
            .iter()
            .filter_map(|t| match t {
                Tok::V(v) => Some((*v, self.coord(*v))),
                Tok::E(_) => None,
            })
            .collect();
        let step = apply_rule(self.g, rule, &sites).map_err(|err| {
            let mut ctx = format!("rule {rule}");
            for t in &sites {
                ctx.push(' ');
                ctx.push_str(&t.to_string());
            }
            OsError::Rule(ctx, err)
        })?;
        for (v, p) in watch {
            if !self.g.has_vertex(v) {
                self.at.remove(&p);
            }
        }
        for t in &step.fresh {
            if let Tok::V(w) = t {
                if self.g.has_vertex(*w) {
                    self.at.insert(self.coord(*w), *w);
                }
            }
        }
        self.steps.push(step);
        Ok(self.steps.len() - 1)
    }

    fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.g
            .incident_edges(a)
            .into_iter()
            .find(|&e| self.g.edge(e).other(a) == b)
    }

    /// Fresh edges of a recorded step that survived and sit skew, with
    /// whether the lower endpoint lies right of the upper one.
    fn fresh_skews(&self, si: usize) -> Vec<(EdgeId, bool)> {
        let mut out = Vec::new();
        for t in &self.steps[si].fresh {
            let Tok::E(id) = t else { continue };
            let Some(ed) = self.g.try_edge(*id) else { continue };
            let (ca, cb) = (self.coord(ed.u), self.coord(ed.v));
            if ca.0 != cb.0 && ca.1 != cb.1 {
                let (up, lo) = if ca.0 < cb.0 { (ca, cb) } else { (cb, ca) };
                out.push((*id, lo.1 > up.1));
            }
        }
        out
    }

    /// Walks a skew edge to the boundary of the alive region: at each
    /// stop the corner vertex adjacent to both endpoints on the drift
    /// side is rewritten, replacing the skew by the next one until a
    /// low-degree corner absorbs it.
    fn migrate(&mut self, mut e: EdgeId, drift: Drift) -> Result<(), OsError> {
        let budget = 4 * self.at.len() + 16;
        for _ in 0..budget {
            let ed = self.g.try_edge(e).expect("migrating edge is alive");
            let (a, b) = (ed.u, ed.v);
            let (ca, cb) = (self.coord(a), self.coord(b));
            if ca.0 == cb.0 || ca.1 == cb.1 {
                return Err(OsError::BadShape(format!("skew {ca:?}-{cb:?} went flat")));
            }
            let (hi, lo) = if ca.0 < cb.0 { (a, b) } else { (b, a) };
            let target = match drift {
                Drift::UpRight | Drift::UpLeft => self.coord(hi).0,
                Drift::DownRight => self.coord(lo).0,
            };
            let nh = self.g.neighbors(hi);
            let nl = self.g.neighbors(lo);
            let mut corner = None;
            for &v in nh.intersection(&nl) {
                if self.coord(v).0 != target {
                    continue;
                }
                if corner.replace(v).is_some() {
                    return Err(OsError::BadShape(format!("two corners beside {ca:?}-{cb:?}")));
                }
            }
            let Some(p) = corner else {
                return Err(OsError::BadShape(format!(
                    "no corner for skew {ca:?}-{cb:?} toward row {target}"
                )));
            };
            if self.g.is_terminal(p) {
                return Err(OsError::BadShape(format!(
                    "corner at {:?} is a terminal",
                    self.coord(p)
                )));
            }
            match self.g.degree(p) {
                2 => {
                    self.apply(8, vec![Tok::E(e), Tok::V(p)])?;
                    return Ok(());
                }
                3 => {
                    self.apply(6, vec![Tok::E(e), Tok::V(p)])?;
                    return Ok(());
                }
                4 => {
                    let si = self.apply(7, vec![Tok::E(e), Tok::V(p)])?;
                    let skews = self.fresh_skews(si);
                    if skews.len() != 1 {
                        return Err(OsError::BadShape(format!(
                            "replacement left {} skews",
                            skews.len()
                        )));
                    }
                    e = skews[0].0;
                }
                d => {
                    return Err(OsError::BadShape(format!(
                        "corner degree {d} at {:?}",
                        self.coord(p)
                    )))
                }
            }
        }
        Err(OsError::BadShape("migration exceeded its budget".into()))
    }

    /// Removes every diagonal edge, walking each up-rightward off the
    /// triangle.
    fn phase_diagonals(&mut self, ell: u32) -> Result<(), OsError> {
        for m in 1..ell {
            let a = self
                .at
                .get(&(m, m))
                .copied()
                .ok_or_else(|| OsError::BadShape(format!("diagonal cell {m} missing")))?;
            let b = self
                .at
                .get(&(m + 1, m + 1))
                .copied()
                .ok_or_else(|| OsError::BadShape(format!("diagonal cell {} missing", m + 1)))?;
            let e = self
                .edge_between(a, b)
                .ok_or_else(|| OsError::BadShape(format!("no diagonal edge at {m}")))?;
            self.migrate(e, Drift::UpRight)?;
        }
        Ok(())
    }

    /// Melts the open triangle strictly between consecutive terminal
    /// lines, eating any degree-two cell there and walking the shortcut
    /// it leaves up-rightward. Cells on terminal lines and the region
    /// outside the gaps stay untouched.
    fn phase_erode(&mut self, marks: &[u32]) -> Result<(), OsError> {
        loop {
            let mut site = None;
            for (&(r, c), &v) in &self.at {
                if self.g.is_terminal(v) || !inside_gap(marks, r, c) {
                    continue;
                }
                if self.g.degree(v) <= 2 {
                    site = Some(v);
                    break;
                }
            }
            let Some(v) = site else {
                return Ok(());
            };
            if self.g.degree(v) <= 1 {
                self.apply(1, vec![Tok::V(v)])?;
                continue;
            }
            let si = self.apply(2, vec![Tok::V(v)])?;
            for (e, up_right) in self.fresh_skews(si) {
                if !up_right {
                    return Err(OsError::BadShape("erosion made an up-left skew".into()));
                }
                self.migrate(e, Drift::UpRight)?;
            }
        }
    }

    /// Eliminates one line cell: a degree-three cell is rewritten into
    /// its neighbor triangle and the skew shortcuts walked away, a
    /// degree-two cell is serialized.
    fn eliminate_line_site(&mut self, v: VertexId, row_line: bool) -> Result<(), OsError> {
        let deg = self.g.degree(v);
        let si = match deg {
            3 => self.apply(4, vec![Tok::V(v)])?,
            2 => self.apply(2, vec![Tok::V(v)])?,
            d => {
                return Err(OsError::BadShape(format!(
                    "line cell at {:?} has degree {d}",
                    self.coord(v)
                )))
            }
        };
        for (e, up_right) in self.fresh_skews(si) {
            let drift = if up_right {
                Drift::UpRight
            } else if row_line {
                Drift::DownRight
            } else {
                Drift::UpLeft
            };
            self.migrate(e, drift)?;
        }
        Ok(())
    }

    /// Clears the gap columns above each terminal row, then the gap rows
    /// right of each terminal column, pair by pair in ascending order.
    /// Columns run left to right, each eaten top cell by top cell
    /// downward from the terminal row; rows run bottom to top, eaten left
    /// to right. This keeps every walked shortcut inside untouched or
    /// fully cleared territory.
    fn phase_lines(&mut self, marks: &[u32], ell: u32) -> Result<(), OsError> {
        for s in 0..marks.len() - 1 {
            let (i, j) = (marks[s], marks[s + 1]);
            for k in i + 1..j {
                loop {
                    let mut found = None;
                    for r in (1..=i).rev() {
                        if let Some(&v) = self.at.get(&(r, k)) {
                            found = Some(v);
                            break;
                        }
                    }
                    let Some(v) = found else { break };
                    self.eliminate_line_site(v, false)?;
                }
                for r in 1..=ell {
                    if self.at.contains_key(&(r, k)) {
                        return Err(OsError::BadShape(format!("column {k} survived")));
                    }
                }
            }
            for k in (i + 1..j).rev() {
                loop {
                    let mut found = None;
                    for c in j..=ell {
                        if let Some(&v) = self.at.get(&(k, c)) {
                            found = Some(v);
                            break;
                        }
                    }
                    let Some(v) = found else { break };
                    self.eliminate_line_site(v, true)?;
                }
                for c in 1..=ell {
                    if self.at.contains_key(&(k, c)) {
                        return Err(OsError::BadShape(format!("row {k} survived")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Survivors must be exactly the crossings of terminal lines, joined
    /// as a simple half-grid without diagonal edges.
    fn final_shape(&self, marks: &[u32]) -> Result<(), OsError> {
        let rank: BTreeMap<u32, u32> = marks
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i as u32 + 1))
            .collect();
        for (&(r, c), &v) in &self.at {
            if !rank.contains_key(&r) || !rank.contains_key(&c) {
                return Err(OsError::BadShape(format!("cell ({r}, {c}) survived")));
            }
            if (r == c) != self.g.is_terminal(v) {
                return Err(OsError::BadShape(format!(
                    "terminal marking wrong at ({r}, {c})"
                )));
            }
        }
        let kp = marks.len();
        if self.g.n() != kp * (kp + 1) / 2 {
            return Err(OsError::BadShape(format!(
                "{} survivors, expected {}",
                self.g.n(),
                kp * (kp + 1) / 2
            )));
        }
        let mut pairs = BTreeSet::new();
        for e in self.g.edge_ids() {
            let ed = self.g.edge(e);
            let (ca, cb) = (self.coord(ed.u), self.coord(ed.v));
            let (ra, rb) = ((rank[&ca.0], rank[&ca.1]), (rank[&cb.0], rank[&cb.1]));
            if ra.0.abs_diff(rb.0) + ra.1.abs_diff(rb.1) != 1 {
                return Err(OsError::BadShape(format!(
                    "edge {ca:?}-{cb:?} skips a terminal line"
                )));
            }
            if !pairs.insert((ra.min(rb), ra.max(rb))) {
                return Err(OsError::BadShape(format!("edge {ca:?}-{cb:?} doubled")));
            }
        }
        if self.g.m() != kp * (kp - 1) {
            return Err(OsError::BadShape(format!(
                "{} edges survived, expected {}",
                self.g.m(),
                kp * (kp - 1)
            )));
        }
        Ok(())
    }
}

/// Strictly below a terminal row and strictly left of the terminal
/// column bracketing it: the open triangle that melts away.
fn inside_gap(marks: &[u32], r: u32, c: u32) -> bool {
    let idx = marks.partition_point(|&m| m < r);
    idx > 0 && idx < marks.len() && c < marks[idx]
}

/// Reduces a full half-grid to the half-grid on its terminal lines: the
/// four corner cells nearest the diagonal ends are promoted to
/// terminals, every diagonal edge is walked off the triangle, the open
/// triangles between terminal lines melt, and the remaining non-terminal
/// lines are eliminated column by column and row by row. The output is
/// the half-grid on the terminal lines without diagonal edges, exact for
/// every terminal cut or distance, with a replayable step log.
pub fn gitler_reduce(h: &HalfGrid) -> Result<GitlerResult, OsError> {
    let ell = validate_half_grid(&h.g)?;
    if ell != h.ell {
        return Err(OsError::BadHalfGrid(format!(
            "size field {} versus derived {ell}",
            h.ell
        )));
    }
    let mut g = h.g.clone();
    let mut at: BTreeMap<(u32, u32), VertexId> = BTreeMap::new();
    for v in g.vertices() {
        at.insert(g.coord(v).expect("validated above"), v);
    }
    let mut promoted: Vec<(u32, u32)> = Vec::new();
    for p in [(1, 1), (2, 2), (ell - 1, ell - 1), (ell, ell)] {
        if promoted.contains(&p) {
            continue;
        }
        let v = at[&p];
        if !g.is_terminal(v) {
            g.make_terminal(v);
            promoted.push(p);
        }
    }
    let mut marks: Vec<u32> = g
        .terminals()
        .map(|t| g.coord(t).expect("validated above").0)
        .collect();
    marks.sort_unstable();
    let mode = g.mode();
    let mut red = Reducer { g: &mut g, at, steps: Vec::new() };
    red.phase_diagonals(ell)?;
    red.phase_erode(&marks)?;
    red.phase_lines(&marks, ell)?;
    red.final_shape(&marks)?;
    let steps = red.steps;
    Ok(GitlerResult {
        graph: g,
        log: ReductionLog { mode, steps },
        promoted,
        k_prime: marks.len() as u32,
    })
}

/// The assembled sparsifier and the record of how it was built.
#[derive(Clone, Debug)]
pub struct OsSparsifier {
    pub graph: TerminalGraph,
    pub mode: OsMode,
    /// One JSON object per pipeline stage, in order.
    pub log: Vec<String>,
    /// Input terminal to its vertex in the output graph; ascending ids
    /// correspond.
    pub terminal_map: BTreeMap<VertexId, VertexId>,
    /// Terminal lines in the reduced half-grid, before helper corners
    /// were returned to ordinary vertices.
    pub k_prime: u32,
    /// Flow answers equal cut answers at this scale; recorded, never
    /// applied.
    pub scale: Weight,
}

/// Builds an exact sparsifier for a partial-grid input whose terminals
/// lie on the bounding box boundary. Runs split, embed, fold and reduce,
/// returns promoted helper corners to ordinary vertices, then reduces
/// leftover non-terminal fringe greedily. Flow mode runs the cut
/// pipeline and records scale one. The output has at most
/// (k + 4)(k + 5) / 2 vertices.
pub fn build_sparsifier_os(g: &TerminalGraph, mode: OsMode) -> Result<OsSparsifier, OsError> {
    if g.directed() {
        return Err(OsError::Directed);
    }
    if g.mode() != mode.weight_mode() {
        return Err(OsError::WrongWeights(mode.as_str(), mode.weight_mode().as_str()));
    }
    if g.k() < 2 {
        return Err(OsError::TooFewTerminals);
    }
    let coords = validate_partial_grid(g)?;
    let rmax = coords.values().map(|c| c.0).max().expect("has vertices");
    let cmax = coords.values().map(|c| c.1).max().expect("has vertices");
    for t in g.terminals() {
        let p = coords[&t];
        if p.0 != 1 && p.0 != rmax && p.1 != 1 && p.1 != cmax {
            return Err(OsError::TerminalInside(t));
        }
    }
    if mode == OsMode::Distance && !g.is_connected() {
        return Err(OsError::Disconnected);
    }
    let stats = |x: &TerminalGraph| json!({"n": x.n(), "m": x.m(), "k": x.k()});
    let mut log = Vec::new();

    // When pendant, series and parallel elimination alone strips every
    // non-terminal, the grid machinery has nothing left to do.
    let mut quick = g.clone();
    let qlog = greedy_reduce(&mut quick).expect("validated undirected weighted graph");
    if quick.nonterminal_count() == 0 {
        log.push(
            json!({
                "stage": "prereduce",
                "input": stats(g),
                "output": stats(&quick),
                "steps": qlog.steps.len(),
                "log": qlog.to_text(),
            })
            .to_string(),
        );
        log.push(
            json!({
                "stage": "sparsifier",
                "mode": mode.as_str(),
                "scale": "1",
                "n": quick.n(),
                "m": quick.m(),
                "k": quick.k(),
            })
            .to_string(),
        );
        let terminal_map = g.terminals().map(|t| (t, t)).collect();
        let k_prime = quick.k() as u32;
        return Ok(OsSparsifier {
            graph: quick,
            mode,
            log,
            terminal_map,
            k_prime,
            scale: Weight::one(),
        });
    }

    let split = split_vertices(g)?;
    log.push(
        json!({
            "stage": "split",
            "input": stats(g),
            "output": stats(&split.graph),
            "splits": split.splits.len(),
        })
        .to_string(),
    );
    let emb = orthogonal_grid_embed(&split)?;
    log.push(
        json!({
            "stage": "embed",
            "input": stats(&split.graph),
            "output": stats(&emb.grid.g),
            "grid_n": emb.grid.n,
            "block_scale": if split.splits.is_empty() { 1 } else { 3 },
        })
        .to_string(),
    );
    let halved = grid_to_halfgrid(&emb.grid)?;
    log.push(
        json!({
            "stage": "halfgrid",
            "input": stats(&emb.grid.g),
            "output": stats(&halved.half.g),
            "ell": halved.half.ell,
        })
        .to_string(),
    );
    let red = gitler_reduce(&halved.half)?;
    log.push(
        json!({
            "stage": "reduce",
            "input": stats(&halved.half.g),
            "output": stats(&red.graph),
            "promoted": red.promoted.iter().map(|&(r, c)| json!([r, c])).collect::<Vec<_>>(),
            "k_prime": red.k_prime,
            "steps": red.log.steps.len(),
            "log": red.log.to_text(),
        })
        .to_string(),
    );
    let mut out = red.graph.clone();
    let by_pos: BTreeMap<(u32, u32), VertexId> = out
        .vertices()
        .map(|v| (out.coord(v).expect("reduced cells keep coordinates"), v))
        .collect();
    for p in &red.promoted {
        out.clear_terminal(by_pos[p]);
    }
    let before_cleanup = stats(&out);
    let clog = greedy_reduce(&mut out).expect("cleanup on a valid undirected graph");
    if !clog.steps.is_empty() {
        log.push(
            json!({
                "stage": "cleanup",
                "input": before_cleanup,
                "output": stats(&out),
                "steps": clog.steps.len(),
                "log": clog.to_text(),
            })
            .to_string(),
        );
    }
    let bound = (g.k() + 4) * (g.k() + 5) / 2;
    if out.n() > bound {
        return Err(OsError::BadShape(format!(
            "output has {} vertices, guarantee is {bound}",
            out.n()
        )));
    }
    let mut terminal_map = BTreeMap::new();
    for t in g.terminals() {
        let s1 = split
            .splits
            .iter()
            .find(|rec| rec.original == t)
            .map(|rec| rec.copies[0])
            .unwrap_or(t);
        let s2 = emb.vertex_map[&s1];
        let s3 = halved.vertex_map[&s2];
        assert!(
            out.has_vertex(s3) && out.is_terminal(s3),
            "reduction and cleanup never touch terminals"
        );
        terminal_map.insert(t, s3);
    }
    log.push(
        json!({
            "stage": "sparsifier",
            "mode": mode.as_str(),
            "scale": "1",
            "n": out.n(),
            "m": out.m(),
            "k": out.k(),
        })
        .to_string(),
    );
    Ok(OsSparsifier {
        graph: out,
        mode,
        log,
        terminal_map,
        k_prime: red.k_prime,
        scale: Weight::one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{equivalence_report, EquivalenceCheck};
    use crate::wye_delta::replay_reduction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rw(rng: &mut ChaCha8Rng) -> Weight {
        Weight::ratio(rng.gen_range(1..12), rng.gen_range(1..4))
    }

    fn ring(rows: u32, cols: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for c in 1..=cols {
            out.push((1, c));
        }
        for r in 2..=rows {
            out.push((r, cols));
        }
        for c in (1..cols).rev() {
            out.push((rows, c));
        }
        for r in (2..rows).rev() {
            out.push((r, 1));
        }
        out
    }

    fn grid_instance(seed: u64, rows: u32, cols: u32, k: usize, mode: WeightMode) -> TerminalGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = TerminalGraph::new(false, mode);
        let mut at = BTreeMap::new();
        for r in 1..=rows {
            for c in 1..=cols {
                let v = g.add_vertex();
                g.set_coord(v, Some((r, c)));
                at.insert((r, c), v);
            }
        }
        for r in 1..=rows {
            for c in 1..=cols {
                if c < cols {
                    let w = rw(&mut rng);
                    g.add_edge(at[&(r, c)], at[&(r, c + 1)], w);
                }
                if r < rows {
                    let w = rw(&mut rng);
                    g.add_edge(at[&(r, c)], at[&(r + 1, c)], w);
                }
            }
        }
        let ring = ring(rows, cols);
        for i in 0..k {
            g.make_terminal(at[&ring[i * ring.len() / k]]);
        }
        g
    }

    fn make_halfgrid(ell: u32, k: usize, mode: WeightMode, seed: u64) -> HalfGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = TerminalGraph::new(false, mode);
        let mut at = BTreeMap::new();
        for i in 1..=ell {
            for j in i..=ell {
                let v = g.add_vertex();
                g.set_coord(v, Some((i, j)));
                at.insert((i, j), v);
            }
        }
        for i in 1..=ell {
            for j in i..=ell {
                if j < ell {
                    let w = rw(&mut rng);
                    g.add_edge(at[&(i, j)], at[&(i, j + 1)], w);
                }
                if i < j {
                    let w = rw(&mut rng);
                    g.add_edge(at[&(i, j)], at[&(i + 1, j)], w);
                }
            }
        }
        for m in 1..ell {
            let w = rw(&mut rng);
            g.add_edge(at[&(m, m)], at[&(m + 1, m + 1)], w);
        }
        let mut picks: BTreeSet<u32> = BTreeSet::new();
        while picks.len() < k {
            picks.insert(rng.gen_range(1..=ell));
        }
        for m in picks {
            g.make_terminal(at[&(m, m)]);
        }
        HalfGrid { g, ell }
    }

    fn vertex_at(g: &TerminalGraph, p: (u32, u32)) -> VertexId {
        g.vertices().find(|&v| g.coord(v) == Some(p)).unwrap()
    }

    fn check_for(mode: WeightMode) -> EquivalenceCheck {
        match mode {
            WeightMode::Cut => EquivalenceCheck::Cut { table_cap: 8 },
            _ => EquivalenceCheck::Distance,
        }
    }

    #[test]
    fn split_caps_degree_and_keeps_answers() {
        for mode in [WeightMode::Cut, WeightMode::Length] {
            let mut g = TerminalGraph::new(false, mode);
            let vs: Vec<VertexId> = [(1, 2), (2, 3), (3, 2), (2, 1), (2, 2)]
                .into_iter()
                .map(|p| {
                    let v = g.add_vertex();
                    g.set_coord(v, Some(p));
                    v
                })
                .collect();
            for (i, w) in [3, 5, 2, 7].into_iter().enumerate() {
                g.add_edge(vs[4], vs[i], Weight::from_int(w));
            }
            g.make_terminal(vs[0]);
            g.make_terminal(vs[2]);
            g.make_terminal(vs[4]);
            let split = split_vertices(&g).unwrap();
            assert_eq!(split.splits.len(), 1);
            let rec = &split.splits[0];
            assert_eq!(rec.original, vs[4]);
            assert_eq!(rec.copies.len(), 4);
            assert!(split.graph.is_terminal(rec.copies[0]));
            assert!(split.graph.vertices().all(|v| split.graph.degree(v) <= 3));
            let rep = equivalence_report(&g, &split.graph, &check_for(mode));
            assert!(rep.equivalent, "{mode:?}: {rep:?}");
        }
    }

    #[test]
    fn split_skips_degree_three_and_below() {
        let g = grid_instance(7, 2, 3, 2, WeightMode::Cut);
        let split = split_vertices(&g).unwrap();
        assert!(split.splits.is_empty());
        assert_eq!(split.graph, g);
    }

    #[test]
    fn embed_places_a_plain_subgrid_directly() {
        for mode in [WeightMode::Cut, WeightMode::Length] {
            let g = grid_instance(11, 2, 4, 3, mode);
            let split = split_vertices(&g).unwrap();
            assert!(split.splits.is_empty());
            let emb = orthogonal_grid_embed(&split).unwrap();
            assert_eq!(emb.grid.n, 4);
            for (v, gv) in &emb.vertex_map {
                let (r, c) = g.coord(*v).unwrap();
                let sr = if r == 2 { 4 } else { r };
                assert_eq!(emb.grid.g.coord(*gv), Some((sr, c)));
            }
            let rep = equivalence_report(&g, &emb.grid.g, &check_for(mode));
            assert!(rep.equivalent, "{mode:?}: {rep:?}");
        }
    }

    #[test]
    fn embed_expands_blocks_for_split_vertices() {
        for mode in [WeightMode::Cut, WeightMode::Length] {
            let g = grid_instance(13, 3, 3, 4, mode);
            let split = split_vertices(&g).unwrap();
            assert_eq!(split.splits.len(), 1);
            let emb = orthogonal_grid_embed(&split).unwrap();
            assert_eq!(emb.grid.n, 9);
            for cells in emb.paths.values() {
                for w in cells.windows(2) {
                    assert_eq!(w[0].0.abs_diff(w[1].0) + w[0].1.abs_diff(w[1].1), 1);
                }
            }
            let rep = equivalence_report(&g, &emb.grid.g, &check_for(mode));
            assert!(rep.equivalent, "{mode:?}: {rep:?}");
        }
    }

    #[test]
    fn fold_matches_the_small_grid_map() {
        assert_eq!(fold(3, (1, 3)), (1, 1));
        assert_eq!(fold(3, (1, 2)), (2, 2));
        assert_eq!(fold(3, (1, 1)), (3, 3));
        assert_eq!(fold(3, (2, 1)), (4, 4));
        assert_eq!(fold(3, (3, 1)), (5, 5));
        assert_eq!(fold(3, (3, 3)), (7, 7));
        assert_eq!(fold(3, (2, 3)), (8, 8));
        assert_eq!(fold(3, (2, 2)), (4, 6));
        assert_eq!(fold(2, (1, 2)), (1, 1));
        assert_eq!(fold(2, (1, 1)), (2, 2));
        assert_eq!(fold(2, (2, 1)), (3, 3));
        assert_eq!(fold(2, (2, 2)), (4, 4));
    }

    #[test]
    fn halfgrid_folds_exactly() {
        for mode in [WeightMode::Cut, WeightMode::Length] {
            let g = grid_instance(17, 2, 3, 3, mode);
            let split = split_vertices(&g).unwrap();
            let emb = orthogonal_grid_embed(&split).unwrap();
            assert_eq!(emb.grid.n, 3);
            let halved = grid_to_halfgrid(&emb.grid).unwrap();
            assert_eq!(halved.half.ell, 9);
            let sa = vertex_at(&emb.grid.g, (1, 3));
            let sb = vertex_at(&emb.grid.g, (2, 3));
            let seam_edge = emb
                .grid
                .g
                .incident_edges(sa)
                .into_iter()
                .find(|&e| emb.grid.g.edge(e).other(sa) == sb)
                .unwrap();
            let seam = &halved.paths[&seam_edge];
            assert_eq!(seam.len(), 17);
            let ends = [seam[0], *seam.last().unwrap()];
            assert!(ends.contains(&(1, 1)) && ends.contains(&(8, 8)));
            let rep = equivalence_report(&emb.grid.g, &halved.half.g, &check_for(mode));
            assert!(rep.equivalent, "{mode:?}: {rep:?}");
        }
    }

    #[test]
    fn reduce_solves_the_smallest_halfgrid() {
        let mut g = TerminalGraph::new(false, WeightMode::Cut);
        let a = g.add_vertex();
        g.set_coord(a, Some((1, 1)));
        let b = g.add_vertex();
        g.set_coord(b, Some((1, 2)));
        let c = g.add_vertex();
        g.set_coord(c, Some((2, 2)));
        g.add_edge(a, b, Weight::from_int(3));
        g.add_edge(b, c, Weight::from_int(5));
        g.add_edge(a, c, Weight::from_int(2));
        g.make_terminal(a);
        g.make_terminal(c);
        let h = HalfGrid { g, ell: 2 };
        let red = gitler_reduce(&h).unwrap();
        assert!(red.promoted.is_empty());
        assert_eq!(red.k_prime, 2);
        assert_eq!(red.graph.n(), 3);
        assert_eq!(red.graph.m(), 2);
        let rep = equivalence_report(&h.g, &red.graph, &check_for(WeightMode::Cut));
        assert!(rep.equivalent, "{rep:?}");
    }

    #[test]
    fn reduce_preserves_tables_and_replays() {
        let cases = [
            (5u32, 2usize, WeightMode::Cut, 1u64),
            (5, 3, WeightMode::Cut, 2),
            (5, 2, WeightMode::Length, 3),
            (5, 4, WeightMode::Length, 4),
            (9, 2, WeightMode::Cut, 5),
            (9, 4, WeightMode::Length, 6),
            (13, 3, WeightMode::Length, 7),
        ];
        for (ell, k, mode, seed) in cases {
            let h = make_halfgrid(ell, k, mode, seed);
            let red = gitler_reduce(&h).unwrap();
            let mut lhs = h.g.clone();
            for &p in &red.promoted {
                let v = vertex_at(&lhs, p);
                lhs.make_terminal(v);
            }
            let rep = equivalence_report(&lhs, &red.graph, &check_for(mode));
            assert!(rep.equivalent, "ell {ell} seed {seed}: {rep:?}");
            let replayed = replay_reduction(&lhs, &red.log).unwrap();
            assert_eq!(replayed, red.graph);
        }
    }

    #[test]
    fn reduce_rejects_a_broken_halfgrid() {
        let mut h = make_halfgrid(5, 2, WeightMode::Cut, 9);
        let e = h.g.edge_ids().next().unwrap();
        h.g.apply_minor_op_mut(MinorOp::DeleteEdge(e)).unwrap();
        assert!(matches!(gitler_reduce(&h), Err(OsError::BadHalfGrid(_))));
    }

    #[test]
    fn reduce_log_replays_and_rejects_tampering() {
        let h = make_halfgrid(5, 2, WeightMode::Cut, 51);
        let red = gitler_reduce(&h).unwrap();
        let mut lhs = h.g.clone();
        for &p in &red.promoted {
            let v = vertex_at(&lhs, p);
            lhs.make_terminal(v);
        }
        let text = red.log.to_text();
        let parsed = ReductionLog::parse(&text).unwrap();
        assert_eq!(parsed, red.log);
        let mut bad = red.log.clone();
        bad.steps[0].rule = if bad.steps[0].rule == 6 { 7 } else { 6 };
        assert!(replay_reduction(&lhs, &bad).is_err());
    }

    #[test]
    fn pipeline_collapses_a_two_terminal_path() {
        let cases = [
            (OsMode::Cut, Weight::from_int(2)),
            (OsMode::Distance, Weight::from_int(14)),
        ];
        for (mode, want) in cases {
            let mut g = TerminalGraph::new(false, mode.weight_mode());
            let mut vs = Vec::new();
            for p in [(1u32, 1u32), (1, 2), (1, 3), (1, 4)] {
                let v = g.add_vertex();
                g.set_coord(v, Some(p));
                vs.push(v);
            }
            for (i, w) in [5, 2, 7].into_iter().enumerate() {
                g.add_edge(vs[i], vs[i + 1], Weight::from_int(w));
            }
            g.make_terminal(vs[0]);
            g.make_terminal(vs[3]);
            let sp = build_sparsifier_os(&g, mode).unwrap();
            assert!(sp.log[0].contains("\"stage\":\"prereduce\""));
            assert_eq!(sp.graph.n(), 2, "{mode:?}");
            assert_eq!(sp.graph.m(), 1);
            let e = sp.graph.edge_ids().next().unwrap();
            assert_eq!(sp.graph.edge(e).w, want);
        }
    }

    #[test]
    fn pipeline_preserves_tables_end_to_end() {
        let cases = [
            (21u64, 3u32, 4u32, 3usize, OsMode::Cut),
            (22, 4, 4, 4, OsMode::Cut),
            (23, 3, 4, 3, OsMode::Distance),
            (24, 4, 4, 5, OsMode::Distance),
        ];
        for (seed, rows, cols, k, mode) in cases {
            let g = grid_instance(seed, rows, cols, k, mode.weight_mode());
            let sp = build_sparsifier_os(&g, mode).unwrap();
            assert!(sp.graph.n() <= (g.k() + 4) * (g.k() + 5) / 2);
            assert!(sp.k_prime <= g.k() as u32 + 4);
            assert_eq!(sp.graph.k(), g.k());
            let outs: Vec<VertexId> = sp.terminal_map.values().copied().collect();
            let mut sorted = outs.clone();
            sorted.sort_unstable();
            assert_eq!(outs, sorted, "terminal correspondence keeps order");
            let rep = equivalence_report(&g, &sp.graph, &check_for(mode.weight_mode()));
            assert!(rep.equivalent, "seed {seed}: {rep:?}");
            for line in &sp.log {
                let v: serde_json::Value = serde_json::from_str(line).unwrap();
                assert!(v.get("stage").is_some());
            }
            assert!(sp.log[0].contains("\"stage\":\"split\""));
            assert!(sp.log.last().unwrap().contains("\"stage\":\"sparsifier\""));
            let reduce_line = sp
                .log
                .iter()
                .find(|l| l.contains("\"stage\":\"reduce\""))
                .unwrap();
            let v: serde_json::Value = serde_json::from_str(reduce_line).unwrap();
            let embedded = ReductionLog::parse(v["log"].as_str().unwrap()).unwrap();
            assert_eq!(embedded.steps.len(), v["steps"].as_u64().unwrap() as usize);
        }
    }

    #[test]
    fn pipeline_flow_mode_mirrors_cut_mode() {
        let g = grid_instance(31, 2, 4, 3, WeightMode::Cut);
        let cut = build_sparsifier_os(&g, OsMode::Cut).unwrap();
        let flow = build_sparsifier_os(&g, OsMode::Flow).unwrap();
        assert_eq!(flow.graph, cut.graph);
        assert_eq!(flow.scale, Weight::one());
        let last = flow.log.last().unwrap();
        assert!(last.contains("\"mode\":\"flow\"") && last.contains("\"scale\":\"1\""));
    }

    #[test]
    fn pipeline_rejects_bad_inputs() {
        let ok = grid_instance(41, 2, 3, 2, WeightMode::Cut);
        assert!(matches!(
            build_sparsifier_os(&ok, OsMode::Distance),
            Err(OsError::WrongWeights(..))
        ));

        let mut one_term = ok.clone();
        let t = one_term.terminals().next().unwrap();
        one_term.clear_terminal(t);
        assert!(matches!(
            build_sparsifier_os(&one_term, OsMode::Cut),
            Err(OsError::TooFewTerminals)
        ));

        let mut inner = grid_instance(42, 3, 3, 2, WeightMode::Cut);
        inner.make_terminal(vertex_at(&inner, (2, 2)));
        assert!(matches!(
            build_sparsifier_os(&inner, OsMode::Cut),
            Err(OsError::TerminalInside(_))
        ));

        let mut far = TerminalGraph::new(false, WeightMode::Length);
        let quad: Vec<VertexId> = [(1, 1), (1, 2), (2, 1), (2, 2)]
            .into_iter()
            .map(|p| {
                let v = far.add_vertex();
                far.set_coord(v, Some(p));
                v
            })
            .collect();
        far.add_edge(quad[0], quad[1], Weight::one());
        far.add_edge(quad[2], quad[3], Weight::one());
        far.make_terminal(quad[0]);
        far.make_terminal(quad[3]);
        assert!(matches!(
            build_sparsifier_os(&far, OsMode::Distance),
            Err(OsError::Disconnected)
        ));

        let mut skewed = TerminalGraph::new(false, WeightMode::Cut);
        let a = skewed.add_vertex();
        skewed.set_coord(a, Some((1, 1)));
        let b = skewed.add_vertex();
        skewed.set_coord(b, Some((1, 3)));
        skewed.add_edge(a, b, Weight::one());
        skewed.make_terminal(a);
        skewed.make_terminal(b);
        assert!(matches!(
            build_sparsifier_os(&skewed, OsMode::Cut),
            Err(OsError::NotGridEdge(_))
        ));

        let mut bare = grid_instance(43, 2, 2, 2, WeightMode::Cut);
        let v = bare.vertices().next().unwrap();
        bare.set_coord(v, None);
        assert!(matches!(
            build_sparsifier_os(&bare, OsMode::Cut),
            Err(OsError::MissingCoord(_))
        ));

        let mut dir = TerminalGraph::new(true, WeightMode::Cut);
        let a = dir.add_vertex();
        let b = dir.add_vertex();
        dir.add_edge(a, b, Weight::one());
        dir.make_terminal(a);
        dir.make_terminal(b);
        assert!(matches!(
            build_sparsifier_os(&dir, OsMode::Cut),
            Err(OsError::Directed)
        ));
    }
}
