use gsmine::compile::{
    apply_rule, compile, decompile, CompileError, Convention, ReplayError,
};
use gsmine::matcher::{contains, embeddings, Embedding};
use gsmine::model::{GraphSequence, LabeledGraph};
use gsmine::{Label, Rule, TrSeq, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const A: Label = Label(0);
const B: Label = Label(1);
const C: Label = Label(2);
const DASH: Label = Label(3);

fn graph(verts: &[(VertexId, Label)], edges: &[(VertexId, VertexId, Label)]) -> LabeledGraph {
    let mut g = LabeledGraph::new();
    for &(v, l) in verts {
        g.add_vertex(v, l);
    }
    for &(u, v, l) in edges {
        g.add_edge(u, v, l);
    }
    g
}

fn seq(graphs: Vec<LabeledGraph>) -> GraphSequence {
    GraphSequence { gid: "d".into(), graphs }
}

/// Four snapshots over vertices 1..=5: vertex 4 appears, then 5 appears
/// while the edge (3,4) forms and vertex 2 goes, then vertex 1 goes.
fn worked_sequence() -> GraphSequence {
    seq(vec![
        graph(&[(1, A), (2, B), (3, A)], &[(1, 3, DASH), (2, 3, DASH)]),
        graph(&[(1, A), (2, B), (3, A), (4, C)], &[(1, 3, DASH), (2, 3, DASH)]),
        graph(&[(1, A), (3, A), (4, C), (5, C)], &[(1, 3, DASH), (3, 4, DASH)]),
        graph(&[(3, A), (4, C), (5, C)], &[(3, 4, DASH)]),
    ])
}

#[test]
fn worked_four_snapshot_sequence_compiles_to_the_listed_rules() {
    let d = worked_sequence();
    let s = compile(&d, Convention::AssumeEmptyStart).unwrap();
    let expect = vec![
        Rule::vi(4, C, 1, 1),
        Rule::vi(5, C, 2, 1),
        Rule::ei(3, 4, DASH, 2, 2),
        Rule::ed(2, 3, 2, 3),
        Rule::vd(2, 2, 4),
        Rule::ed(1, 3, 3, 1),
        Rule::vd(1, 3, 2),
    ];
    assert_eq!(s.rules, expect);
    assert_eq!(s.transitions, 3);

    // The other convention prepends the first snapshot as inserts and
    // shifts every interstate by one.
    let s0 = compile(&d, Convention::EmitInitialInserts).unwrap();
    let mut expect0 = vec![
        Rule::vi(1, A, 1, 1),
        Rule::vi(2, B, 1, 2),
        Rule::vi(3, A, 1, 3),
        Rule::ei(1, 3, DASH, 1, 4),
        Rule::ei(2, 3, DASH, 1, 5),
    ];
    expect0.extend(expect.iter().map(|r| Rule { j: r.j + 1, ..*r }));
    assert_eq!(s0, TrSeq::new(expect0, 4));
}

#[test]
fn printed_inclusion_example_embeds_with_the_printed_maps() {
    let d = worked_sequence();
    // The shorter sequence walks the same deletions one vertex lower.
    let d_prime = seq(vec![
        graph(&[(1, B), (2, A)], &[(1, 2, DASH)]),
        graph(&[(1, B), (2, A), (3, C)], &[(1, 2, DASH)]),
        graph(&[(2, A), (3, C)], &[(2, 3, DASH)]),
    ]);
    let sd = compile(&d, Convention::AssumeEmptyStart).unwrap();
    let sdp = compile(&d_prime, Convention::AssumeEmptyStart).unwrap();
    assert_eq!(
        sdp.rules,
        vec![
            Rule::vi(3, C, 1, 1),
            Rule::ei(2, 3, DASH, 2, 1),
            Rule::ed(1, 2, 2, 2),
            Rule::vd(1, 2, 3),
        ]
    );
    assert!(contains(&sd, &sdp));
    assert!(!contains(&sdp, &sd));
    let shifted = Embedding {
        phi: vec![1, 2],
        psi: (1..=3).map(|v| (v, v + 1)).collect(),
    };
    assert!(embeddings(&sdp, &sd).contains(&shifted));
}

#[test]
fn relabels_compile_in_phase_order_between_inserts_and_deletes() {
    let d = seq(vec![
        graph(&[(1, A), (2, B)], &[(1, 2, DASH)]),
        graph(&[(1, B), (2, B), (3, A)], &[(1, 2, C), (2, 3, DASH)]),
        graph(&[(2, A), (3, A)], &[(2, 3, DASH)]),
    ]);
    let s = compile(&d, Convention::AssumeEmptyStart).unwrap();
    assert_eq!(
        s.rules,
        vec![
            Rule::vi(3, A, 1, 1),
            Rule::ei(2, 3, DASH, 1, 2),
            Rule::vr(1, B, 1, 3),
            Rule::er(1, 2, C, 1, 4),
            Rule::vr(2, A, 2, 1),
            Rule::ed(1, 2, 2, 2),
            Rule::vd(1, 2, 3),
        ]
    );
    let back = decompile(&s, &d.graphs[0], Convention::AssumeEmptyStart).unwrap();
    assert_eq!(back.graphs, d.graphs);
}

#[test]
fn single_snapshot_sequences_compile_per_convention() {
    let d = seq(vec![graph(&[(1, A), (2, B)], &[(1, 2, DASH)])]);
    let s = compile(&d, Convention::AssumeEmptyStart).unwrap();
    assert!(s.rules.is_empty());
    assert_eq!(s.transitions, 0);
    let back = decompile(&s, &d.graphs[0], Convention::AssumeEmptyStart).unwrap();
    assert_eq!(back.graphs, d.graphs);

    let s0 = compile(&d, Convention::EmitInitialInserts).unwrap();
    assert_eq!(
        s0.rules,
        vec![Rule::vi(1, A, 1, 1), Rule::vi(2, B, 1, 2), Rule::ei(1, 2, DASH, 1, 3)]
    );
    assert_eq!(s0.transitions, 1);
    let back0 = decompile(&s0, &LabeledGraph::new(), Convention::EmitInitialInserts).unwrap();
    assert_eq!(back0.graphs, d.graphs);
}

#[test]
fn identical_consecutive_snapshots_leave_a_ruleless_transition() {
    let g = graph(&[(1, A)], &[]);
    let d = seq(vec![g.clone(), g.clone(), graph(&[(1, A), (2, B)], &[])]);
    let s = compile(&d, Convention::AssumeEmptyStart).unwrap();
    assert_eq!(s.rules, vec![Rule::vi(2, B, 2, 1)]);
    assert_eq!(s.transitions, 2);
    let empty = LabeledGraph::new();
    for conv in [Convention::AssumeEmptyStart, Convention::EmitInitialInserts] {
        let s = compile(&d, conv).unwrap();
        let seed = match conv {
            Convention::AssumeEmptyStart => &d.graphs[0],
            Convention::EmitInitialInserts => &empty,
        };
        let back = decompile(&s, seed, conv).unwrap();
        assert_eq!(back.graphs, d.graphs, "{}", conv.name());
    }
}

#[test]
fn empty_sequences_and_dangling_edges_are_rejected() {
    let empty = GraphSequence { gid: "e".into(), graphs: Vec::new() };
    assert_eq!(
        compile(&empty, Convention::AssumeEmptyStart),
        Err(CompileError::Empty { gid: "e".into() })
    );
    let mut bad = graph(&[(1, A)], &[]);
    bad.edges.insert((1, 7), DASH);
    let d = GraphSequence { gid: "x".into(), graphs: vec![graph(&[(1, A)], &[]), bad] };
    assert_eq!(
        compile(&d, Convention::EmitInitialInserts),
        Err(CompileError::DanglingEdge { gid: "x".into(), step: 2, u: 1, v: 7 })
    );
}

/// Random snapshot churn over a small id pool: vertices come, go, and
/// return, labels flip, edges appear and vanish between alive vertices.
fn random_snapshots(rng: &mut ChaCha8Rng) -> GraphSequence {
    let labels = [A, B, C];
    let mut graphs = Vec::new();
    let mut g = LabeledGraph::new();
    for _ in 0..rng.gen_range(1..=5) {
        for v in 1..=6u32 {
            let roll: f64 = rng.gen();
            if g.has_vertex(v) {
                if roll < 0.2 {
                    g.edges.retain(|&(a, b), _| a != v && b != v);
                    g.vertices.remove(&v);
                } else if roll < 0.4 {
                    g.vertices.insert(v, labels[rng.gen_range(0..3)]);
                }
            } else if roll < 0.3 {
                g.add_vertex(v, labels[rng.gen_range(0..3)]);
            }
        }
        let alive: Vec<u32> = g.vertices.keys().copied().collect();
        for i in 0..alive.len() {
            for j in i + 1..alive.len() {
                let (u, v) = (alive[i], alive[j]);
                let roll: f64 = rng.gen();
                if g.has_edge(u, v) {
                    if roll < 0.3 {
                        g.edges.remove(&(u, v));
                    } else if roll < 0.5 {
                        g.edges.insert((u, v), labels[rng.gen_range(0..3)]);
                    }
                } else if roll < 0.3 {
                    g.add_edge(u, v, labels[rng.gen_range(0..3)]);
                }
            }
        }
        graphs.push(g.clone());
    }
    GraphSequence { gid: "r".into(), graphs }
}

/// Unit edits needed between two snapshots, counted without the compiler.
fn edit_distance(a: &LabeledGraph, b: &LabeledGraph) -> usize {
    let vert_churn = a.vertices.keys().filter(|v| !b.vertices.contains_key(v)).count()
        + b.vertices.keys().filter(|v| !a.vertices.contains_key(v)).count()
        + b.vertices
            .iter()
            .filter(|(v, l)| a.vertices.get(v).is_some_and(|old| old != *l))
            .count();
    let edge_churn = a.edges.keys().filter(|e| !b.edges.contains_key(e)).count()
        + b.edges.keys().filter(|e| !a.edges.contains_key(e)).count()
        + b.edges
            .iter()
            .filter(|(e, l)| a.edges.get(e).is_some_and(|old| old != *l))
            .count();
    vert_churn + edge_churn
}

#[test]
fn compile_decompile_identity_on_random_snapshot_churn() {
    for seed in 0..120 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_snapshots(&mut rng);

        let s = compile(&d, Convention::AssumeEmptyStart).unwrap();
        let back = decompile(&s, &d.graphs[0], Convention::AssumeEmptyStart).unwrap();
        assert_eq!(back.graphs, d.graphs, "seed {seed}");
        for (t, pair) in d.graphs.windows(2).enumerate() {
            let j = t as u32 + 1;
            assert_eq!(
                s.interstate(j).len(),
                edit_distance(&pair[0], &pair[1]),
                "seed {seed} interstate {j} is not a minimal edit script"
            );
        }

        let s0 = compile(&d, Convention::EmitInitialInserts).unwrap();
        let back0 = decompile(&s0, &LabeledGraph::new(), Convention::EmitInitialInserts).unwrap();
        assert_eq!(back0.graphs, d.graphs, "seed {seed}");
        assert_eq!(s0.interstate(1).len(), edit_distance(&LabeledGraph::new(), &d.graphs[0]));
    }
}

#[test]
fn replay_rejects_inapplicable_rules() {
    let base = || graph(&[(1, A), (2, B)], &[(1, 2, DASH)]);
    let cases: Vec<(Rule, ReplayError)> = vec![
        (Rule::vi(1, A, 1, 1), ReplayError::VertexExists { j: 1, k: 1, v: 1 }),
        (Rule::vd(1, 1, 1), ReplayError::VertexNotIsolated { j: 1, k: 1, v: 1 }),
        (Rule::vd(5, 1, 1), ReplayError::VertexMissing { j: 1, k: 1, kind: "vd", v: 5 }),
        (Rule::vr(1, A, 1, 1), ReplayError::RelabelSame { j: 1, k: 1, v: 1 }),
        (Rule::vr(5, A, 1, 1), ReplayError::VertexMissing { j: 1, k: 1, kind: "vr", v: 5 }),
        (Rule::ei(1, 2, DASH, 1, 1), ReplayError::EdgeExists { j: 1, k: 1, u: 1, v: 2 }),
        (Rule::ei(1, 5, DASH, 1, 1), ReplayError::EndpointMissing { j: 1, k: 1, u: 1, v: 5 }),
        (Rule::ed(1, 5, 1, 1), ReplayError::EdgeMissing { j: 1, k: 1, kind: "ed", u: 1, v: 5 }),
        (Rule::er(1, 2, DASH, 1, 1), ReplayError::EdgeRelabelSame { j: 1, k: 1, u: 1, v: 2 }),
        (Rule::er(1, 5, DASH, 1, 1), ReplayError::EdgeMissing { j: 1, k: 1, kind: "er", u: 1, v: 5 }),
    ];
    for (rule, want) in cases {
        let mut g = base();
        assert_eq!(apply_rule(&mut g, &rule), Err(want));
    }
    // A valid rule mutates in place.
    let mut g = base();
    apply_rule(&mut g, &Rule::vr(1, B, 1, 1)).unwrap();
    assert_eq!(g.vertices[&1], B);
}
