//! Local rewrite rules on undirected weighted graphs.
//!
//! Eight numbered rules remove or relocate non-terminal structure while
//! preserving every terminal minimum cut (capacity weights) or every
//! terminal distance (length weights). Rules 1 to 4 strictly shrink the
//! graph and drive `greedy_reduce`. Rule 5 grows a star out of a triangle;
//! rules 6 to 8 compose it with a shrinking rule to move a diagonal edge
//! across a pivot vertex, which is how grid schedulers migrate diagonals
//! toward the boundary. Every application is recorded as a
//! `ReductionStep`, and a `ReductionLog` replays deterministically against
//! the original graph because fresh ids come from the allocation counters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, MinorOp, TerminalGraph, VertexId, WeightMode};
use crate::weight::Weight;

/// Site or fresh-item token inside a `ReductionStep`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Tok {
    V(VertexId),
    E(EdgeId),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::V(v) => write!(f, "v{v}"),
            Tok::E(e) => write!(f, "e{e}"),
        }
    }
}

fn parse_tok(s: &str) -> Option<Tok> {
    let n: u32 = s.get(1..)?.parse().ok()?;
    match s.bytes().next()? {
        b'v' => Some(Tok::V(VertexId(n))),
        b'e' => Some(Tok::E(EdgeId(n))),
        _ => None,
    }
}

fn parse_mode(s: &str) -> Option<WeightMode> {
    match s {
        "cut" => Some(WeightMode::Cut),
        "length" => Some(WeightMode::Length),
        _ => None,
    }
}

/// One applied rule: which rule, where, and what it created.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionStep {
    pub rule: u8,
    pub mode: WeightMode,
    /// Existing items the rule consumed, in rule-specific order.
    pub sites: Vec<Tok>,
    /// Items the rule created, in creation order. Composite rules keep
    /// the full record even when a later part consumes an item again.
    pub fresh: Vec<Tok>,
    /// Whether a weight was clamped before the rewrite.
    pub normalized: bool,
}

impl fmt::Display for ReductionStep {
    /// Prints `step <rule> <mode> <sites..> -> <fresh..> [norm]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} {}", self.rule, self.mode.as_str())?;
        for t in &self.sites {
            write!(f, " {t}")?;
        }
        write!(f, " ->")?;
        for t in &self.fresh {
            write!(f, " {t}")?;
        }
        if self.normalized {
            write!(f, " norm")?;
        }
        Ok(())
    }
}

impl ReductionStep {
    pub fn parse_line(line: &str) -> Option<ReductionStep> {
        let mut toks = line.split_whitespace();
        if toks.next()? != "step" {
            return None;
        }
        let rule: u8 = toks.next()?.parse().ok()?;
        if !(1..=8).contains(&rule) {
            return None;
        }
        let mode = parse_mode(toks.next()?)?;
        let rest: Vec<&str> = toks.collect();
        let arrow = rest.iter().position(|&t| t == "->")?;
        let sites = rest[..arrow]
            .iter()
            .map(|&t| parse_tok(t))
            .collect::<Option<Vec<_>>>()?;
        let mut tail = &rest[arrow + 1..];
        let normalized = tail.last() == Some(&"norm");
        if normalized {
            tail = &tail[..tail.len() - 1];
        }
        let fresh = tail
            .iter()
            .map(|&t| parse_tok(t))
            .collect::<Option<Vec<_>>>()?;
        Some(ReductionStep {
            rule,
            mode,
            sites,
            fresh,
            normalized,
        })
    }
}

/// Ordered, replayable record of rule applications on one graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionLog {
    pub mode: WeightMode,
    pub steps: Vec<ReductionStep>,
}

impl ReductionLog {
    pub fn new(mode: WeightMode) -> Self {
        ReductionLog {
            mode,
            steps: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("reduction {}\n", self.mode.as_str());
        for step in &self.steps {
            s.push_str(&step.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, ParseLogError> {
        let fail = |line: usize, l: &str| ParseLogError {
            line,
            text: l.to_string(),
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hn, header) = lines.next().ok_or_else(|| fail(1, ""))?;
        let mut hw = header.split_whitespace();
        let mode = match (hw.next(), hw.next().and_then(parse_mode), hw.next()) {
            (Some("reduction"), Some(m), None) => m,
            _ => return Err(fail(hn + 1, header)),
        };
        let mut steps = Vec::new();
        for (ln, line) in lines {
            steps.push(ReductionStep::parse_line(line).ok_or_else(|| fail(ln + 1, line))?);
        }
        Ok(ReductionLog { mode, steps })
    }
}

#[derive(Debug, Error)]
#[error("bad reduction log line {line}: {text:?}")]
pub struct ParseLogError {
    pub line: usize,
    pub text: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("reduction rules require an undirected graph")]
    Directed,
    #[error("reduction rules require cut or length weights")]
    NoMode,
    #[error("rule {rule} rejected: {why}")]
    BadSite { rule: u8, why: &'static str },
    #[error("log mode {0:?} does not match graph mode {1:?}")]
    ModeMismatch(WeightMode, WeightMode),
    #[error("replay diverged at step {step}: {why}")]
    Replay { step: usize, why: String },
}

/// Applies one rewrite rule at explicit sites. On error the graph is
/// unchanged.
///
/// Sites by rule:
/// 1. pendant: `[v]`, non-terminal of degree at most one; deletes it.
/// 2. series: `[v]`, non-terminal of degree two; replaces it by one edge
///    (capacity: min, length: sum), or by nothing when both of its edges
///    run to the same neighbor.
/// 3. parallel: `[keep, drop]`, ascending parallel edges; folds drop into
///    keep (capacity: sum, length: min).
/// 4. wye to delta: `[v]`, non-terminal of degree three with distinct
///    neighbors; replaces the star by a triangle. A capacity star first
///    clamps an arm exceeding the sum of the other two.
/// 5. delta to wye: `[e1, e2, e3]`, ascending triangle edges; replaces
///    the triangle by a star around a fresh vertex. A length triangle
///    first repairs a side exceeding the sum of the other two.
/// 6. flip at a degree three pivot: `[diagonal, pivot]`; rule 5 on the
///    diagonal plus the two pivot edges toward it, then rule 2 on the
///    pivot. The fresh vertex takes the pivot coordinates.
/// 7. flip at a degree four pivot: `[diagonal, pivot]`; rule 5, then
///    rule 4 on the pivot. The fresh vertex takes the pivot coordinates.
/// 8. corner absorption: `[diagonal, apex]`, apex of degree two; rule 5,
///    then rule 1 on the apex. The fresh vertex takes the apex
///    coordinates.
pub fn apply_rule(
    g: &mut TerminalGraph,
    rule: u8,
    sites: &[Tok],
) -> Result<ReductionStep, ReduceError> {
    if g.directed() {
        return Err(ReduceError::Directed);
    }
    let mode = g.mode();
    if mode == WeightMode::None {
        return Err(ReduceError::NoMode);
    }
    match rule {
        1 => r1(g, sites, mode),
        2 => r2(g, sites, mode),
        3 => r3(g, sites, mode),
        4 => r4(g, sites, mode),
        5 => r5(g, sites, mode),
        6 => r6(g, sites, mode),
        7 => r7(g, sites, mode),
        8 => r8(g, sites, mode),
        _ => Err(bad(rule, "unknown rule")),
    }
}

fn bad(rule: u8, why: &'static str) -> ReduceError {
    ReduceError::BadSite { rule, why }
}

fn one_vertex(rule: u8, sites: &[Tok]) -> Result<VertexId, ReduceError> {
    match sites {
        [Tok::V(v)] => Ok(*v),
        _ => Err(bad(rule, "sites must be a single vertex")),
    }
}

fn check_vertex(g: &TerminalGraph, rule: u8, v: VertexId) -> Result<(), ReduceError> {
    if !g.has_vertex(v) {
        return Err(bad(rule, "missing vertex"));
    }
    if g.is_terminal(v) {
        return Err(bad(rule, "terminals cannot be removed"));
    }
    Ok(())
}

/// The edge between `p` and `x`, provided there is exactly one.
fn sole_edge_between(g: &TerminalGraph, p: VertexId, x: VertexId) -> Option<EdgeId> {
    let mut found = None;
    for e in g.incident_edges(p) {
        if g.edge(e).other(p) == x {
            if found.is_some() {
                return None;
            }
            found = Some(e);
        }
    }
    found
}

/// Repairs the one entry exceeding the sum of the other two, if any.
/// At most one entry can violate since weights are non-negative.
fn clamp_to_triangle(t: &mut [Weight; 3]) -> bool {
    for i in 0..3 {
        let rest = &t[(i + 1) % 3] + &t[(i + 2) % 3];
        if t[i] > rest {
            t[i] = rest;
            return true;
        }
    }
    false
}

fn paired_sums(a: &Weight, b: &Weight, c: &Weight) -> [Weight; 3] {
    [a + b, a + c, b + c]
}

/// Entry i sums the two weights involving position i and subtracts the
/// third, halved. Callers clamp first so no entry goes negative.
fn paired_halves(a: &Weight, b: &Weight, c: &Weight) -> [Weight; 3] {
    [
        (a + b).checked_sub(c).halve(),
        (a + c).checked_sub(b).halve(),
        (b + c).checked_sub(a).halve(),
    ]
}

fn r1(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let v = one_vertex(1, sites)?;
    check_vertex(g, 1, v)?;
    if g.degree(v) > 1 {
        return Err(bad(1, "vertex degree must be at most one"));
    }
    g.apply_minor_op_mut(MinorOp::DeleteVertex(v))
        .expect("checked non-terminal");
    Ok(ReductionStep {
        rule: 1,
        mode,
        sites: sites.to_vec(),
        fresh: vec![],
        normalized: false,
    })
}

fn r2(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let v = one_vertex(2, sites)?;
    check_vertex(g, 2, v)?;
    if g.degree(v) != 2 {
        return Err(bad(2, "vertex degree must be two"));
    }
    let fresh = r2_core(g, v, mode);
    Ok(ReductionStep {
        rule: 2,
        mode,
        sites: sites.to_vec(),
        fresh,
        normalized: false,
    })
}

/// Series contraction of a degree-two non-terminal.
fn r2_core(g: &mut TerminalGraph, v: VertexId, mode: WeightMode) -> Vec<Tok> {
    let inc = g.incident_edges(v);
    let (a, w1) = (g.edge(inc[0]).other(v), g.edge(inc[0]).w.clone());
    let (b, w2) = (g.edge(inc[1]).other(v), g.edge(inc[1]).w.clone());
    g.apply_minor_op_mut(MinorOp::DeleteVertex(v))
        .expect("checked non-terminal");
    if a == b {
        return vec![];
    }
    let w = match mode {
        WeightMode::Cut => Weight::min_of(&w1, &w2),
        WeightMode::Length => &w1 + &w2,
        WeightMode::None => unreachable!("rules reject meaningless weights"),
    };
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    vec![Tok::E(g.add_edge(lo, hi, w))]
}

fn r3(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let (keep, drop) = match sites {
        [Tok::E(a), Tok::E(b)] => (*a, *b),
        _ => return Err(bad(3, "sites must be two edges")),
    };
    if keep >= drop {
        return Err(bad(3, "keep the lower edge id"));
    }
    let ek = g.try_edge(keep).ok_or_else(|| bad(3, "missing edge"))?;
    let ed = g.try_edge(drop).ok_or_else(|| bad(3, "missing edge"))?;
    if !(ed.touches(ek.u) && ed.touches(ek.v)) {
        return Err(bad(3, "edges are not parallel"));
    }
    let w = match mode {
        WeightMode::Cut => &ek.w + &ed.w,
        WeightMode::Length => Weight::min_of(&ek.w, &ed.w),
        WeightMode::None => unreachable!("rules reject meaningless weights"),
    };
    g.set_weight(keep, w);
    g.apply_minor_op_mut(MinorOp::DeleteEdge(drop))
        .expect("checked edge");
    Ok(ReductionStep {
        rule: 3,
        mode,
        sites: sites.to_vec(),
        fresh: vec![],
        normalized: false,
    })
}

fn r4(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let v = one_vertex(4, sites)?;
    check_vertex(g, 4, v)?;
    if g.degree(v) != 3 {
        return Err(bad(4, "vertex degree must be three"));
    }
    if g.neighbors(v).len() != 3 {
        return Err(bad(4, "star must reach three distinct neighbors"));
    }
    let (fresh, normalized) = r4_core(g, v, mode);
    Ok(ReductionStep {
        rule: 4,
        mode,
        sites: sites.to_vec(),
        fresh,
        normalized,
    })
}

/// Wye to delta at a degree-three non-terminal with distinct neighbors.
fn r4_core(g: &mut TerminalGraph, v: VertexId, mode: WeightMode) -> (Vec<Tok>, bool) {
    let nbrs: Vec<VertexId> = g.neighbors(v).into_iter().collect();
    let mut star: [Weight; 3] = std::array::from_fn(|i| {
        let e = sole_edge_between(g, v, nbrs[i]).expect("distinct neighbors");
        g.edge(e).w.clone()
    });
    let normalized = mode == WeightMode::Cut && clamp_to_triangle(&mut star);
    let [a, b, c] = &star;
    let tri = match mode {
        WeightMode::Cut => paired_halves(a, b, c),
        WeightMode::Length => paired_sums(a, b, c),
        WeightMode::None => unreachable!("rules reject meaningless weights"),
    };
    g.apply_minor_op_mut(MinorOp::DeleteVertex(v))
        .expect("checked non-terminal");
    let ends = [(nbrs[0], nbrs[1]), (nbrs[0], nbrs[2]), (nbrs[1], nbrs[2])];
    let fresh = ends
        .into_iter()
        .zip(tri)
        .map(|((x, y), w)| Tok::E(g.add_edge(x, y, w)))
        .collect();
    (fresh, normalized)
}

fn r5(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let es = check_r5_sites(g, sites)?;
    let (fresh, normalized) = r5_core(g, es, mode);
    Ok(ReductionStep {
        rule: 5,
        mode,
        sites: sites.to_vec(),
        fresh,
        normalized,
    })
}

fn check_r5_sites(g: &TerminalGraph, sites: &[Tok]) -> Result<[EdgeId; 3], ReduceError> {
    let es: [EdgeId; 3] = match sites {
        [Tok::E(a), Tok::E(b), Tok::E(c)] => [*a, *b, *c],
        _ => return Err(bad(5, "sites must be three edges")),
    };
    if !(es[0] < es[1] && es[1] < es[2]) {
        return Err(bad(5, "edge sites must be ascending"));
    }
    let mut verts = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for &e in &es {
        let ed = g.try_edge(e).ok_or_else(|| bad(5, "missing edge"))?;
        let key = if ed.u < ed.v { (ed.u, ed.v) } else { (ed.v, ed.u) };
        pairs.insert(key);
        verts.insert(ed.u);
        verts.insert(ed.v);
    }
    if verts.len() != 3 || pairs.len() != 3 {
        return Err(bad(5, "edges must form a triangle"));
    }
    Ok(es)
}

/// Delta to wye: replaces a validated triangle by a fresh star vertex.
fn r5_core(g: &mut TerminalGraph, es: [EdgeId; 3], mode: WeightMode) -> (Vec<Tok>, bool) {
    let mut verts = BTreeSet::new();
    for &e in &es {
        verts.insert(g.edge(e).u);
        verts.insert(g.edge(e).v);
    }
    let vs: Vec<VertexId> = verts.into_iter().collect();
    let [x, y, z] = [vs[0], vs[1], vs[2]];
    let weight_of = |g: &TerminalGraph, a: VertexId, b: VertexId| {
        es.iter()
            .map(|&e| g.edge(e))
            .find(|ed| ed.touches(a) && ed.touches(b))
            .expect("validated triangle")
            .w
            .clone()
    };
    // Sides keyed by the vertex pair they join, ascending.
    let mut side = [weight_of(g, x, y), weight_of(g, x, z), weight_of(g, y, z)];
    let normalized = mode == WeightMode::Length && clamp_to_triangle(&mut side);
    let [p, q, r] = &side;
    let star = match mode {
        WeightMode::Cut => paired_sums(p, q, r),
        WeightMode::Length => paired_halves(p, q, r),
        WeightMode::None => unreachable!("rules reject meaningless weights"),
    };
    for &e in &es {
        g.apply_minor_op_mut(MinorOp::DeleteEdge(e))
            .expect("validated triangle");
    }
    let w = g.add_vertex();
    let mut fresh = vec![Tok::V(w)];
    for (&t, sw) in [x, y, z].iter().zip(star) {
        fresh.push(Tok::E(g.add_edge(t, w, sw)));
    }
    (fresh, normalized)
}

/// Validates a diagonal edge plus pivot vertex for rules 6 to 8. Returns
/// the sole pivot edges toward the two diagonal endpoints.
fn flip_sites(
    g: &TerminalGraph,
    rule: u8,
    sites: &[Tok],
    pivot_degree: usize,
) -> Result<(EdgeId, VertexId, EdgeId, EdgeId), ReduceError> {
    let (diag, p) = match sites {
        [Tok::E(e), Tok::V(v)] => (*e, *v),
        _ => return Err(bad(rule, "sites must be one edge then one vertex")),
    };
    let ed = g.try_edge(diag).ok_or_else(|| bad(rule, "missing diagonal edge"))?;
    let (x, z) = (ed.u, ed.v);
    if !g.has_vertex(p) {
        return Err(bad(rule, "missing pivot vertex"));
    }
    if g.is_terminal(p) {
        return Err(bad(rule, "pivot must be a non-terminal"));
    }
    if p == x || p == z {
        return Err(bad(rule, "pivot lies on the diagonal"));
    }
    if g.degree(p) != pivot_degree {
        return Err(bad(rule, "pivot degree does not fit the rule"));
    }
    let need = || bad(rule, "need exactly one pivot edge per diagonal end");
    let epx = sole_edge_between(g, p, x).ok_or_else(need)?;
    let epz = sole_edge_between(g, p, z).ok_or_else(need)?;
    Ok((diag, p, epx, epz))
}

fn r6(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let (diag, p, epx, epz) = flip_sites(g, 6, sites, 3)?;
    let pcoord = g.coord(p);
    let mut tri = [diag, epx, epz];
    tri.sort();
    let (mut fresh, normalized) = r5_core(g, tri, mode);
    let Tok::V(w) = fresh[0] else {
        unreachable!("delta to wye creates the vertex first")
    };
    // The pivot now holds its outer edge plus its star edge.
    fresh.extend(r2_core(g, p, mode));
    g.set_coord(w, pcoord);
    Ok(ReductionStep {
        rule: 6,
        mode,
        sites: sites.to_vec(),
        fresh,
        normalized,
    })
}

fn r7(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let (diag, p, epx, epz) = flip_sites(g, 7, sites, 4)?;
    let outer: BTreeSet<VertexId> = g
        .incident_edges(p)
        .into_iter()
        .filter(|&e| e != epx && e != epz)
        .map(|e| g.edge(e).other(p))
        .collect();
    if outer.len() != 2 {
        return Err(bad(7, "pivot needs two distinct outer neighbors"));
    }
    let pcoord = g.coord(p);
    let mut tri = [diag, epx, epz];
    tri.sort();
    let (mut fresh, n5) = r5_core(g, tri, mode);
    let Tok::V(w) = fresh[0] else {
        unreachable!("delta to wye creates the vertex first")
    };
    // The pivot now has degree three with distinct neighbors.
    let (f4, n4) = r4_core(g, p, mode);
    fresh.extend(f4);
    g.set_coord(w, pcoord);
    Ok(ReductionStep {
        rule: 7,
        mode,
        sites: sites.to_vec(),
        fresh,
        normalized: n5 || n4,
    })
}

fn r8(g: &mut TerminalGraph, sites: &[Tok], mode: WeightMode) -> Result<ReductionStep, ReduceError> {
    let (diag, p, epx, epz) = flip_sites(g, 8, sites, 2)?;
    let pcoord = g.coord(p);
    let mut tri = [diag, epx, epz];
    tri.sort();
    let (fresh, normalized) = r5_core(g, tri, mode);
    let Tok::V(w) = fresh[0] else {
        unreachable!("delta to wye creates the vertex first")
    };
    // The apex keeps only its fresh star edge; deleting it drops both.
    g.apply_minor_op_mut(MinorOp::DeleteVertex(p))
        .expect("checked non-terminal");
    g.set_coord(w, pcoord);
    Ok(ReductionStep {
        rule: 8,
        mode,
        sites: sites.to_vec(),
        fresh,
        normalized,
    })
}

/// Applies rules 1 to 4 repeatedly, lowest rule first, lowest site first,
/// until none applies. Terminates because every application shrinks
/// (vertex count, edge count) lexicographically.
pub fn greedy_reduce(g: &mut TerminalGraph) -> Result<ReductionLog, ReduceError> {
    if g.directed() {
        return Err(ReduceError::Directed);
    }
    if g.mode() == WeightMode::None {
        return Err(ReduceError::NoMode);
    }
    let mut log = ReductionLog::new(g.mode());
    while let Some((rule, sites)) = next_greedy_site(g) {
        let step = apply_rule(g, rule, &sites).expect("scanned site applies");
        log.steps.push(step);
    }
    Ok(log)
}

/// True when none of rules 1 to 4 applies anywhere in the graph.
pub fn is_reduced(g: &TerminalGraph) -> bool {
    next_greedy_site(g).is_none()
}

fn next_greedy_site(g: &TerminalGraph) -> Option<(u8, Vec<Tok>)> {
    for v in g.nonterminals() {
        if g.degree(v) <= 1 {
            return Some((1, vec![Tok::V(v)]));
        }
    }
    for v in g.nonterminals() {
        if g.degree(v) == 2 {
            return Some((2, vec![Tok::V(v)]));
        }
    }
    let mut seen: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    for e in g.edge_ids() {
        let ed = g.edge(e);
        let key = if ed.u < ed.v { (ed.u, ed.v) } else { (ed.v, ed.u) };
        if let Some(&keep) = seen.get(&key) {
            return Some((3, vec![Tok::E(keep), Tok::E(e)]));
        }
        seen.insert(key, e);
    }
    for v in g.nonterminals() {
        if g.degree(v) == 3 && g.neighbors(v).len() == 3 {
            return Some((4, vec![Tok::V(v)]));
        }
    }
    None
}

/// Folds every class of parallel edges into its lowest edge id via
/// rule 3. Returns the applied steps in order.
pub fn merge_parallels(g: &mut TerminalGraph) -> Result<Vec<ReductionStep>, ReduceError> {
    if g.directed() {
        return Err(ReduceError::Directed);
    }
    if g.mode() == WeightMode::None {
        return Err(ReduceError::NoMode);
    }
    let mut groups: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for e in g.edge_ids() {
        let ed = g.edge(e);
        let key = if ed.u < ed.v { (ed.u, ed.v) } else { (ed.v, ed.u) };
        groups.entry(key).or_default().push(e);
    }
    let mut steps = Vec::new();
    for ids in groups.into_values() {
        for &drop in &ids[1..] {
            let step = apply_rule(g, 3, &[Tok::E(ids[0]), Tok::E(drop)])
                .expect("grouped edges are parallel");
            steps.push(step);
        }
    }
    Ok(steps)
}

/// Splits edge `e` into `parts` consecutive edges through fresh interior
/// vertices, returned in path order. Capacity mode gives every piece the
/// original capacity; length mode divides the length evenly. Directed
/// edges keep their orientation. Not a logged rule: subdivision refines
/// the graph rather than reducing it.
pub fn subdivide(g: &mut TerminalGraph, e: EdgeId, parts: u32) -> Vec<VertexId> {
    assert!(parts >= 1, "parts must be positive");
    if parts == 1 {
        return vec![];
    }
    let ed = g.edge(e).clone();
    let piece = match g.mode() {
        WeightMode::Length => ed.w.clone() / Weight::from_int(u64::from(parts)),
        _ => ed.w.clone(),
    };
    g.apply_minor_op_mut(MinorOp::DeleteEdge(e)).expect("edge exists");
    let mut inner = Vec::new();
    let mut prev = ed.u;
    for _ in 1..parts {
        let x = g.add_vertex();
        g.add_edge(prev, x, piece.clone());
        inner.push(x);
        prev = x;
    }
    g.add_edge(prev, ed.v, piece);
    inner
}

/// Re-applies `log` to a copy of `input`, checking every recorded step
/// against the re-derived one. Returns the reduced graph.
pub fn replay_reduction(
    input: &TerminalGraph,
    log: &ReductionLog,
) -> Result<TerminalGraph, ReduceError> {
    if input.mode() != log.mode {
        return Err(ReduceError::ModeMismatch(log.mode, input.mode()));
    }
    let mut g = input.clone();
    for (i, rec) in log.steps.iter().enumerate() {
        let got = apply_rule(&mut g, rec.rule, &rec.sites).map_err(|e| ReduceError::Replay {
            step: i,
            why: e.to_string(),
        })?;
        if got != *rec {
            return Err(ReduceError::Replay {
                step: i,
                why: format!("recorded `{rec}`, derived `{got}`"),
            });
        }
    }
    Ok(g)
}
