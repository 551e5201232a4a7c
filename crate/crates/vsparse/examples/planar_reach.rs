//! Sparsifies a planar digraph for terminal reachability via recursive
//! path separators, then checks the result exactly against the input.

use vsparse::graph::check_minor_witness;
use vsparse::instances::{gen_random_digraph, DigraphConfig};
use vsparse::oracles::terminal_reach_matrix;
use vsparse::planar::is_planar;
use vsparse::planar_reach::{sparsify_planar_reach, PlanarReachConfig};

fn main() {
    let cfg = DigraphConfig {
        seed: 29,
        n: 240,
        m: 400,
        k: 7,
        acyclic: false,
        planar: true,
    };
    let g = gen_random_digraph(&cfg);
    assert!(is_planar(&g));
    println!(
        "input: {} vertices, {} edges, {} terminals, planar",
        g.n(),
        g.m(),
        g.k()
    );

    let res = sparsify_planar_reach(&g, &PlanarReachConfig::default()).unwrap();
    println!(
        "minor: {} vertices, {} edges, trace of {} ops",
        res.minor.n(),
        res.minor.m(),
        res.trace.len()
    );
    println!(
        "separator recursion: {} pairs marked, budget {}, within budget: {}",
        res.report.pair_count, res.report.pair_budget, res.report.within_budget
    );

    check_minor_witness(&g, &res.minor, &res.trace).unwrap();
    assert_eq!(
        terminal_reach_matrix(&g).reach,
        terminal_reach_matrix(&res.minor).reach
    );
    println!("reachability preserved exactly on every ordered terminal pair");
}
