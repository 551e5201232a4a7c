//! Exact vertex sparsification for terminal graphs.
//!
//! Two families of constructions, both verified exactly (rational
//! arithmetic, no tolerances):
//!
//! * reachability-preserving minors of digraphs, with replayable minor
//!   traces and a planar pipeline that keeps the minor small;
//! * quality-1 cut, flow, and distance sparsifiers of planar graphs whose
//!   terminals lie on one face, via grid embedding and local reduction
//!   rules, with replayable rule logs.
//!
//! Start with the runnable examples:
//!
//! * `examples/reach_minor.rs`: reachability-preserving minor of a digraph.
//! * `examples/planar_reach.rs`: the planar pipeline with its size report.
//! * `examples/cut_sparsifier.rs`: exact cut sparsifier of a grid instance.
//! * `examples/distance_sparsifier.rs`: the same pipeline in distance mode.
//! * `examples/flow_sparsifier.rs`: flow mode and sparsity certification.
//! * `examples/wye_delta_rules.rs`: the local reduction rules one by one.
//! * `examples/lower_bound_grid.rs`: a family where minors must stay large.
//! * `examples/incompressibility.rs`: instances no small sparsifier encodes.
//!
//! The same operations are scriptable through the `vsparse` binary.

pub mod cli;
pub mod graph;
pub mod instances;
pub mod io;
pub mod oracles;
pub mod os_pipeline;
pub mod planar;
pub mod planar_reach;
pub mod reach_minor;
pub mod weight;
pub mod wye_delta;
