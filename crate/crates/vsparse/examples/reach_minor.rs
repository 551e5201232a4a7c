//! Shrinks a random digraph to a reachability-preserving minor: every
//! ordered terminal pair keeps exactly its input reachability, and the
//! recorded trace replays to the same minor.

use vsparse::graph::{check_minor_witness, PairSet, TerminalGraph, VertexId};
use vsparse::instances::{gen_random_digraph, DigraphConfig};
use vsparse::oracles::terminal_reach_matrix;
use vsparse::reach_minor::{
    nonterminal_branching_events, sparsest_preserver, sparsify, PreserverConfig,
};

fn all_pairs(g: &TerminalGraph) -> PairSet {
    let terms: Vec<VertexId> = g.terminals().collect();
    let mut wanted = Vec::new();
    for &s in &terms {
        for &t in &terms {
            if s != t {
                wanted.push((s, t));
            }
        }
    }
    PairSet::new(wanted, g).unwrap()
}

fn main() {
    let cfg = DigraphConfig {
        seed: 17,
        n: 90,
        m: 180,
        k: 5,
        acyclic: false,
        planar: false,
    };
    let g = gen_random_digraph(&cfg);
    println!(
        "input: {} vertices, {} edges, {} terminals",
        g.n(),
        g.m(),
        g.k()
    );

    let pairs = all_pairs(&g);
    let res = sparsify(&g, &pairs);
    println!(
        "minor: {} vertices ({} non-terminals), {} edges, trace of {} ops",
        res.minor.n(),
        res.minor.nonterminals().count(),
        res.minor.m(),
        res.trace.len()
    );
    println!(
        "branching events among non-terminals: {} (bound {})",
        nonterminal_branching_events(&res.minor),
        pairs.pairs().len() * (pairs.pairs().len() - 1) / 2
    );

    check_minor_witness(&g, &res.minor, &res.trace).unwrap();
    println!("witness check: trace replays to the minor, branch sets connected");

    let before = terminal_reach_matrix(&g);
    let after = terminal_reach_matrix(&res.minor);
    assert_eq!(before.reach, after.reach);
    println!("reachability matrix: identical on all {} terminal pairs", {
        let k = before.terms.len();
        k * (k - 1)
    });

    // Small instances also admit an exact search for the fewest surviving
    // input edges, with the same witness contract.
    let small = gen_random_digraph(&DigraphConfig {
        seed: 3,
        n: 11,
        m: 17,
        k: 3,
        acyclic: false,
        planar: false,
    });
    let sp = all_pairs(&small);
    let best = sparsest_preserver(&small, &sp, &PreserverConfig::default()).unwrap();
    check_minor_witness(&small, &best.minor, &best.trace).unwrap();
    assert_eq!(
        terminal_reach_matrix(&small).reach,
        terminal_reach_matrix(&best.minor).reach
    );
    println!(
        "\nexact search on an {}-vertex digraph: minimum preserver reduces to \
         {} vertices and {} edges, branching events {} (bound {})",
        small.n(),
        best.minor.n(),
        best.minor.m(),
        nonterminal_branching_events(&best.minor),
        small.k() * sp.pairs().len()
    );
}
