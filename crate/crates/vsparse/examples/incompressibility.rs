//! A family of unit-length graphs on a fixed terminal set whose members
//! pairwise disagree on some terminal distance: any scheme that compresses
//! every member must spend about one bit per family index.

use vsparse::instances::{
    detouring_subset, gen_incompressibility_family, gen_sts, short_detouring_cycle,
    verify_incompressibility_claims,
};
use vsparse::oracles::terminal_distance_matrix;

fn main() {
    let k = 21;
    let t = 3;
    let sts = gen_sts(k).unwrap();
    println!(
        "triple system on {k} points: {} triples, every point pair in exactly one",
        sts.triples.len()
    );

    let subset = detouring_subset(&sts, t, 2);
    println!(
        "detouring subset: {} of {} triples, no detouring cycle of length <= {t}",
        subset.len(),
        sts.triples.len()
    );
    assert!(short_detouring_cycle(&sts, &subset, t).is_none());

    // Two family members that differ in a single triple's choice.
    let r_a: Vec<usize> = vec![];
    let r_b: Vec<usize> = vec![subset[0]];
    let ga = gen_incompressibility_family(&sts, &subset, &r_a).unwrap();
    let gb = gen_incompressibility_family(&sts, &subset, &r_b).unwrap();
    println!(
        "members: {} vertices, {} edges (a) and {} edges (b)",
        ga.n(),
        ga.m(),
        gb.m()
    );

    for (name, g, r) in [("a", &ga, &r_a), ("b", &gb, &r_b)] {
        let rep = verify_incompressibility_claims(g, &sts, &subset, r, t);
        assert!(rep.ok);
        println!(
            "member {name}: {} covered pairs all at distance 2, \
             {} uncovered pairs all at distance >= {} or unreachable",
            rep.covered_pairs,
            rep.uncovered_pairs,
            2 * t
        );
    }

    let da = terminal_distance_matrix(&ga);
    let db = terminal_distance_matrix(&gb);
    assert_ne!(da.dist, db.dist);
    let [x, y, _] = sts.triples[subset[0]];
    let (i, j) = (
        da.terms.iter().position(|&v| v.0 as usize == x).unwrap(),
        da.terms.iter().position(|&v| v.0 as usize == y).unwrap(),
    );
    let show = |d: &Option<vsparse::weight::Weight>| match d {
        Some(w) => w.to_string(),
        None => "unreachable".into(),
    };
    println!(
        "distinguishing pair (points {x}, {y}): distance {} in member a, {} in member b",
        show(&da.dist[i][j]),
        show(&db.dist[i][j])
    );
}
