//! Command-line front end: `gen` emits seeded instances, `sparsify` builds
//! minors and sparsifiers, `verify` compares terminal answers exactly,
//! `replay` re-derives outputs from their recorded traces, and `stats`
//! prints graph facts.
//!
//! `--out` is an artifact stem: `gen` writes `<stem>.graph` plus a
//! `<stem>.json` manifest; `sparsify` writes `<stem>.graph`,
//! `<stem>.stats.json`, and a replayable `<stem>.trace` (reachability
//! modes) or `<stem>.log` (boundary pipeline modes). `verify` and `replay`
//! take two `--in` flags: the original graph first, then the candidate
//! graph or artifact stem. Exit codes: 0 success, 1 verification mismatch,
//! 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::graph::{MinorTrace, PairSet, TerminalGraph, VertexId, WeightMode};
use crate::instances::{
    detouring_subset, gen_incompressibility_family, gen_lb_grid, gen_os_instance,
    gen_random_digraph, gen_sts, DigraphConfig, OsInstanceConfig,
};
use crate::io::{parse_graph, serialize_graph};
use crate::oracles::{
    equivalence_report, DemandFunction, EquivalenceCheck, EquivalenceReport,
};
use crate::os_pipeline::{build_sparsifier_os, OsMode};
use crate::planar::is_planar;
use crate::planar_reach::{sparsify_planar_reach, PlanarReachConfig};
use crate::reach_minor::{is_acyclic, nonterminal_branching_events, sparsify};
use crate::weight::Weight;

#[derive(Parser)]
#[command(name = "vsparse", version, about = "Exact vertex sparsification toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Reach,
    ReachPlanar,
    Cut,
    Distance,
    Flow,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Family {
    Digraph,
    Dag,
    Planar,
    Os,
    LbGrid,
    Incompressibility,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded instance: <stem>.graph plus a <stem>.json manifest.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Generators take no hidden entropy; the seed is required.
        #[arg(long)]
        seed: u64,
        /// Vertex count target (digraph, dag, planar, os).
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Terminal count; for lb-grid the grid parameter, for
        /// incompressibility the point count.
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Detouring girth bound (incompressibility).
        #[arg(long, default_value_t = 3)]
        t: usize,
        /// Weight mode for os instances: cut, distance, or flow.
        #[arg(long, value_enum, default_value_t = ModeArg::Cut)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a sparsifier; writes <stem>.graph, <stem>.stats.json, and a
    /// replayable <stem>.trace or <stem>.log.
    Sparsify {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare terminal answers of two graphs exactly; exit 1 on mismatch
    /// with a JSON report.
    Verify {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Original graph, then candidate graph (two --in flags).
        #[arg(long = "in", value_name = "PATH", num_args = 1)]
        input: Vec<PathBuf>,
        /// Write the JSON report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Most terminals allowed in cut-table enumeration.
        #[arg(long, default_value_t = 10)]
        cap: usize,
        /// Demand functions drawn for flow comparison.
        #[arg(long, default_value_t = 5)]
        t: usize,
        /// Seed for the drawn demands.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for flow comparison.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Re-derive a sparsifier from its recorded artifacts and compare
    /// byte for byte; exit 1 on divergence.
    Replay {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Original graph, then the sparsify artifact stem (two --in flags).
        #[arg(long = "in", value_name = "PATH", num_args = 1)]
        input: Vec<PathBuf>,
        /// Write the replayed graph here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print graph statistics as JSON.
    Stats {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point for the `vsparse` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("vsparse: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<i32, String> {
    match cmd {
        Cmd::Gen {
            family,
            seed,
            n,
            k,
            t,
            mode,
            out,
        } => cmd_gen(family, seed, n, k, t, mode, &out),
        Cmd::Sparsify { mode, input, out } => cmd_sparsify(mode, &input, &out),
        Cmd::Verify {
            mode,
            input,
            out,
            cap,
            t,
            seed,
            jobs,
        } => cmd_verify(mode, &input, out.as_deref(), cap, t, seed, jobs),
        Cmd::Replay { mode, input, out } => cmd_replay(mode, &input, out.as_deref()),
        Cmd::Stats { input, out } => cmd_stats(&input, out.as_deref()),
    }
}

fn art(stem: &Path, ext: &str) -> PathBuf {
    PathBuf::from(format!("{}.{ext}", stem.display()))
}

fn read_text(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("read {}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("write {}: {e}", path.display()))
}

fn read_graph(path: &Path) -> Result<TerminalGraph, String> {
    parse_graph(&read_text(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn os_mode(mode: ModeArg) -> Option<OsMode> {
    match mode {
        ModeArg::Cut => Some(OsMode::Cut),
        ModeArg::Distance => Some(OsMode::Distance),
        ModeArg::Flow => Some(OsMode::Flow),
        _ => None,
    }
}

fn mode_name(mode: ModeArg) -> &'static str {
    match mode {
        ModeArg::Reach => "reach",
        ModeArg::ReachPlanar => "reach-planar",
        ModeArg::Cut => "cut",
        ModeArg::Distance => "distance",
        ModeArg::Flow => "flow",
    }
}

fn cmd_gen(
    family: Family,
    seed: u64,
    n: usize,
    k: usize,
    t: usize,
    mode: ModeArg,
    out: &Path,
) -> Result<i32, String> {
    let (name, g, params) = match family {
        Family::Digraph | Family::Dag | Family::Planar => {
            let cfg = DigraphConfig {
                seed,
                n,
                m: 2 * n,
                k,
                acyclic: family == Family::Dag,
                planar: family == Family::Planar,
            };
            let g = gen_random_digraph(&cfg);
            let name = match family {
                Family::Dag => "dag",
                Family::Planar => "planar",
                _ => "digraph",
            };
            let params = json!({"n": cfg.n, "m": cfg.m, "k": cfg.k});
            (name, g, params)
        }
        Family::Os => {
            let weights = match mode {
                ModeArg::Cut | ModeArg::Flow => WeightMode::Cut,
                ModeArg::Distance => WeightMode::Length,
                _ => return Err("os instances carry cut or length weights".into()),
            };
            let cfg = OsInstanceConfig {
                seed,
                n,
                k,
                mode: weights,
            };
            let params = json!({"n": n, "k": k, "mode": weights.as_str()});
            ("os", gen_os_instance(&cfg), params)
        }
        Family::LbGrid => {
            let lb = gen_lb_grid(k).map_err(|e| e.to_string())?;
            let params = json!({"k": k, "paths": lb.paths});
            ("lb-grid", lb.graph, params)
        }
        Family::Incompressibility => {
            let sts = gen_sts(k).map_err(|e| e.to_string())?;
            let subset = detouring_subset(&sts, t, seed);
            // Separate stream so the membership draw does not mirror the
            // subset draw.
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let r_set: Vec<usize> = subset.iter().copied().filter(|_| rng.gen()).collect();
            let g = gen_incompressibility_family(&sts, &subset, &r_set)
                .map_err(|e| e.to_string())?;
            let params = json!({"k": k, "t": t, "subset": subset, "r_set": r_set});
            ("incompressibility", g, params)
        }
    };
    write_text(&art(out, "graph"), &serialize_graph(&g))?;
    let manifest = json!({
        "family": name,
        "params": params,
        "seed": seed,
        "k": g.k(),
        "n": g.n(),
        "m": g.m(),
    });
    write_text(&art(out, "json"), &format!("{manifest:#}\n"))?;
    Ok(0)
}

fn all_terminal_pairs(g: &TerminalGraph) -> Result<PairSet, String> {
    let terms: Vec<VertexId> = g.terminals().collect();
    let mut pairs = Vec::new();
    for &s in &terms {
        for &t in &terms {
            if s != t {
                pairs.push((s, t));
            }
        }
    }
    PairSet::new(pairs, g).map_err(|e| e.to_string())
}

fn cmd_sparsify(mode: ModeArg, input: &Path, out: &Path) -> Result<i32, String> {
    let g = read_graph(input)?;
    match mode {
        ModeArg::Reach => {
            if !g.directed() {
                return Err("reachability modes need a directed input".into());
            }
            let pairs = all_terminal_pairs(&g)?;
            let res = sparsify(&g, &pairs);
            write_text(&art(out, "graph"), &serialize_graph(&res.minor))?;
            write_text(&art(out, "trace"), &res.trace.serialize())?;
            let stats = json!({
                "mode": "reach",
                "input": g.stats(),
                "output": res.minor.stats(),
                "pairs": pairs.pairs().len(),
                "branching_events": nonterminal_branching_events(&res.minor).to_string(),
            });
            write_text(&art(out, "stats.json"), &format!("{stats:#}\n"))?;
        }
        ModeArg::ReachPlanar => {
            let res = sparsify_planar_reach(&g, &PlanarReachConfig::default())
                .map_err(|e| e.to_string())?;
            write_text(&art(out, "graph"), &serialize_graph(&res.minor))?;
            write_text(&art(out, "trace"), &res.trace.serialize())?;
            let stats = json!({
                "mode": "reach-planar",
                "input": g.stats(),
                "output": res.minor.stats(),
                "report": res.report,
            });
            write_text(&art(out, "stats.json"), &format!("{stats:#}\n"))?;
        }
        ModeArg::Cut | ModeArg::Distance | ModeArg::Flow => {
            let res =
                build_sparsifier_os(&g, os_mode(mode).unwrap()).map_err(|e| e.to_string())?;
            write_text(&art(out, "graph"), &serialize_graph(&res.graph))?;
            write_text(&art(out, "log"), &(res.log.join("\n") + "\n"))?;
            let stats = json!({
                "mode": mode_name(mode),
                "input": g.stats(),
                "output": res.graph.stats(),
                "k_prime": res.k_prime,
                "scale": res.scale.to_string(),
            });
            write_text(&art(out, "stats.json"), &format!("{stats:#}\n"))?;
        }
    }
    Ok(0)
}

fn random_demands(g: &TerminalGraph, count: usize, seed: u64) -> Result<Vec<DemandFunction>, String> {
    let terms: Vec<VertexId> = g.terminals().collect();
    if terms.len() < 2 {
        return Err("flow verification needs at least two terminals".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let mut demands = Vec::new();
            for a in 0..terms.len() {
                for b in a + 1..terms.len() {
                    if rng.gen() {
                        let w = Weight::ratio(rng.gen_range(1..8), rng.gen_range(1..3));
                        demands.push((terms[a], terms[b], w));
                    }
                }
            }
            if demands.is_empty() {
                demands.push((terms[0], terms[1], Weight::one()));
            }
            DemandFunction { demands }
        })
        .collect())
}

/// Striped fan-out over demands; aggregation is order-independent and
/// re-sorted, so the report does not depend on scheduling.
fn flow_report(
    g: &TerminalGraph,
    h: &TerminalGraph,
    demands: Vec<DemandFunction>,
    jobs: usize,
) -> EquivalenceReport {
    if jobs <= 1 || demands.len() <= 1 {
        return equivalence_report(g, h, &EquivalenceCheck::Flow { demands });
    }
    let mut slots: Vec<(usize, EquivalenceReport)> = std::thread::scope(|scope| {
        let demands = &demands;
        let handles: Vec<_> = (0..jobs.min(demands.len()))
            .map(|w| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut i = w;
                    while i < demands.len() {
                        let check = EquivalenceCheck::Flow {
                            demands: vec![demands[i].clone()],
                        };
                        out.push((i, equivalence_report(g, h, &check)));
                        i += jobs;
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    slots.sort_by_key(|(i, _)| *i);
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for (i, rep) in slots {
        compared += rep.entries_compared;
        for mut m in rep.mismatches {
            m.key = format!("sparsity, demand {i}");
            mismatches.push(m);
        }
    }
    EquivalenceReport {
        mode: "flow".into(),
        equivalent: mismatches.is_empty(),
        entries_compared: compared,
        mismatches,
    }
}

fn cmd_verify(
    mode: ModeArg,
    input: &[PathBuf],
    out: Option<&Path>,
    cap: usize,
    t: usize,
    seed: u64,
    jobs: usize,
) -> Result<i32, String> {
    let [a, b] = input else {
        return Err("verify takes two --in flags: original, then candidate".into());
    };
    if jobs == 0 {
        return Err("--jobs must be at least 1".into());
    }
    let g = read_graph(a)?;
    let h = read_graph(b)?;
    let report = match mode {
        ModeArg::Reach | ModeArg::ReachPlanar => {
            equivalence_report(&g, &h, &EquivalenceCheck::Reach)
        }
        ModeArg::Cut => {
            if g.k() > cap {
                return Err(format!(
                    "cut table over {} terminals exceeds --cap {cap}",
                    g.k()
                ));
            }
            equivalence_report(&g, &h, &EquivalenceCheck::Cut { table_cap: cap })
        }
        ModeArg::Distance => equivalence_report(&g, &h, &EquivalenceCheck::Distance),
        ModeArg::Flow => {
            for (side, gr) in [("original", &g), ("candidate", &h)] {
                if gr.n() > 20 {
                    return Err(format!(
                        "flow verification enumerates subsets; {side} has {} > 20 vertices",
                        gr.n()
                    ));
                }
            }
            let demands = random_demands(&g, t, seed)?;
            flow_report(&g, &h, demands, jobs)
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(path) = out {
        write_text(path, &(text.clone() + "\n"))?;
    }
    Ok(if report.equivalent { 0 } else { 1 })
}

fn cmd_replay(mode: ModeArg, input: &[PathBuf], out: Option<&Path>) -> Result<i32, String> {
    let [orig, stem] = input else {
        return Err("replay takes two --in flags: original graph, then artifact stem".into());
    };
    let g = read_graph(orig)?;
    let recorded = read_text(&art(stem, "graph"))?;
    let (replayed, log_matches, detail) = match mode {
        ModeArg::Reach | ModeArg::ReachPlanar => {
            let trace = MinorTrace::parse(&read_text(&art(stem, "trace"))?)
                .map_err(|e| e.to_string())?;
            let (h, _) = crate::graph::replay_minor_trace(&g, &trace)
                .map_err(|e| format!("trace does not apply: {e}"))?;
            (h, true, json!({"trace_ops": trace.len()}))
        }
        ModeArg::Cut | ModeArg::Distance | ModeArg::Flow => {
            let res =
                build_sparsifier_os(&g, os_mode(mode).unwrap()).map_err(|e| e.to_string())?;
            let log = read_text(&art(stem, "log"))?;
            let rerun = res.log.join("\n") + "\n";
            (res.graph, rerun == log, json!({"log_lines": res.log.len()}))
        }
    };
    let graph_matches = serialize_graph(&replayed) == recorded;
    if let Some(path) = out {
        write_text(path, &serialize_graph(&replayed))?;
    }
    let report = json!({
        "mode": mode_name(mode),
        "graph_matches": graph_matches,
        "log_matches": log_matches,
        "detail": detail,
    });
    println!("{report:#}");
    Ok(if graph_matches && log_matches { 0 } else { 1 })
}

fn cmd_stats(input: &Path, out: Option<&Path>) -> Result<i32, String> {
    let g = read_graph(input)?;
    let report = json!({
        "stats": g.stats(),
        "acyclic": g.directed() && is_acyclic(&g),
        "planar": is_planar(&g),
    });
    println!("{report:#}");
    if let Some(path) = out {
        write_text(path, &format!("{report:#}\n"))?;
    }
    Ok(0)
}
