use std::collections::{BTreeMap, BTreeSet};

use gsmine::compile::{compile_db, Convention};
use gsmine::datagen::{generate, GeneratorConfig};
use gsmine::matcher::{contains, embeddings, support, Embedding};
use gsmine::model::{Labels, TrDatabase, TrEntry};
use gsmine::{Label, Rule, TrSeq, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const A: Label = Label(0);
const B: Label = Label(1);
const X: Label = Label(10);

type Psi = BTreeMap<VertexId, VertexId>;

/// Every way to pick `k` elements of `pool` keeping their order.
fn combinations(pool: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in pool.iter().enumerate() {
        if pool.len() - i < k {
            break;
        }
        for mut tail in combinations(&pool[i + 1..], k - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Every injective map from `from` into `into`.
fn injections(from: &[VertexId], into: &[VertexId]) -> Vec<Psi> {
    fn rec(
        from: &[VertexId],
        into: &[VertexId],
        used: &mut Vec<bool>,
        cur: &mut Psi,
        out: &mut Vec<Psi>,
    ) {
        let Some(&p) = from.first() else {
            out.push(cur.clone());
            return;
        };
        for (i, &d) in into.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            cur.insert(p, d);
            rec(&from[1..], into, used, cur, out);
            cur.remove(&p);
            used[i] = false;
        }
    }
    let mut out = Vec::new();
    rec(from, into, &mut vec![false; into.len()], &mut BTreeMap::new(), &mut out);
    out
}

fn satisfied(pattern: &TrSeq, data: &TrSeq, phi: &[u32], psi: &Psi) -> bool {
    pattern.interstates().enumerate().all(|(i, (_, rules))| {
        let witnesses = data.interstate(phi[i]);
        rules.iter().all(|r| {
            let want = r.renamed(|v| psi[&v]);
            witnesses.iter().any(|w| w.descriptor() == want.descriptor())
        })
    })
}

/// Reference embedding enumeration: tries every strictly increasing phi
/// over the rule-carrying data interstates and every injective psi over
/// the data vertex ids, no search tree, no pruning.
fn oracle_embeddings(data: &TrSeq, pattern: &TrSeq) -> Vec<Embedding> {
    let groups = pattern.interstates().count();
    let data_js: Vec<u32> = {
        let set: BTreeSet<u32> = data.rules.iter().map(|r| r.j).collect();
        set.into_iter().collect()
    };
    let pverts = pattern.vertex_ids();
    let dverts = data.vertex_ids();
    let mut out = BTreeSet::new();
    if groups <= data_js.len() && pverts.len() <= dverts.len() {
        for phi in combinations(&data_js, groups) {
            for psi in injections(&pverts, &dverts) {
                if satisfied(pattern, data, &phi, &psi) {
                    out.insert(Embedding { phi: phi.clone(), psi });
                }
            }
        }
    }
    out.into_iter().collect()
}

fn random_rule(
    rng: &mut ChaCha8Rng,
    j: u32,
    k: u32,
    max_vertex: VertexId,
    n_labels: u32,
) -> Rule {
    let label = Label(rng.gen_range(0..n_labels));
    let v = rng.gen_range(1..=max_vertex);
    match rng.gen_range(0..6) {
        0 => Rule::vi(v, label, j, k),
        1 => Rule::vd(v, j, k),
        2 => Rule::vr(v, label, j, k),
        kind => {
            let mut u = rng.gen_range(1..=max_vertex);
            while u == v {
                u = rng.gen_range(1..=max_vertex);
            }
            match kind {
                3 => Rule::ei(u, v, label, j, k),
                4 => Rule::ed(u, v, j, k),
                _ => Rule::er(u, v, label, j, k),
            }
        }
    }
}

fn random_data(rng: &mut ChaCha8Rng) -> TrSeq {
    let transitions = rng.gen_range(1..=4);
    let rules = (0..rng.gen_range(1..=6))
        .map(|k| {
            let j = rng.gen_range(1..=transitions);
            random_rule(rng, j, k, 5, 2)
        })
        .collect();
    TrSeq::new(rules, transitions)
}

fn random_pattern(rng: &mut ChaCha8Rng) -> TrSeq {
    let rules = (0..rng.gen_range(1..=3))
        .map(|k| {
            let j = rng.gen_range(1..=3);
            random_rule(rng, j, k, 3, 2)
        })
        .collect();
    TrSeq::pattern(rules)
}

/// Random rule subset of `data` with vertices renamed injectively onto
/// small fresh ids. Contained in `data` by construction.
fn sub_pick(data: &TrSeq, rng: &mut ChaCha8Rng) -> TrSeq {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(rng);
    idx.truncate(rng.gen_range(1..=data.len().min(3)));
    let picked: Vec<Rule> = idx.into_iter().map(|i| data.rules[i]).collect();
    let ids: Vec<VertexId> = {
        let set: BTreeSet<VertexId> =
            picked.iter().flat_map(|r| r.target.vertices()).collect();
        set.into_iter().collect()
    };
    let mut fresh: Vec<VertexId> = (1..=ids.len() as u32).collect();
    fresh.shuffle(rng);
    let map: BTreeMap<VertexId, VertexId> = ids.into_iter().zip(fresh).collect();
    TrSeq::pattern(picked.iter().map(|r| r.renamed(|v| map[&v])).collect())
}

#[test]
fn empty_pattern_is_contained_everywhere_with_one_trivial_embedding() {
    let empty = TrSeq::pattern(Vec::new());
    let data = TrSeq::new(vec![Rule::vi(1, A, 1, 0)], 1);
    assert!(contains(&data, &empty));
    assert_eq!(embeddings(&empty, &data), vec![Embedding { phi: Vec::new(), psi: Psi::new() }]);
    assert!(contains(&TrSeq::new(Vec::new(), 0), &empty));
}

#[test]
fn edge_rules_match_in_either_orientation() {
    let pattern = TrSeq::pattern(vec![Rule::ei(1, 2, X, 1, 0)]);
    let data = TrSeq::new(vec![Rule::ei(5, 3, X, 1, 0)], 1);
    let got = embeddings(&pattern, &data);
    let expect: Vec<Embedding> = [[(1, 3), (2, 5)], [(1, 5), (2, 3)]]
        .iter()
        .map(|m| Embedding { phi: vec![1], psi: m.iter().copied().collect() })
        .collect();
    assert_eq!(got, expect);
}

#[test]
fn phi_images_must_be_strictly_increasing() {
    let pattern =
        TrSeq::pattern(vec![Rule::vi(1, A, 1, 0), Rule::vr(1, B, 2, 0)]);
    let ordered = TrSeq::new(vec![Rule::vi(7, A, 1, 0), Rule::vr(7, B, 3, 0)], 3);
    let reversed = TrSeq::new(vec![Rule::vr(7, B, 1, 0), Rule::vi(7, A, 3, 0)], 3);
    // Two pattern interstates cannot share one data interstate.
    let collapsed = TrSeq::new(vec![Rule::vi(7, A, 2, 0), Rule::vr(7, B, 2, 1)], 2);
    assert!(contains(&ordered, &pattern));
    assert!(!contains(&reversed, &pattern));
    assert!(!contains(&collapsed, &pattern));
    assert_eq!(
        embeddings(&pattern, &ordered),
        vec![Embedding { phi: vec![1, 3], psi: [(1, 7)].into_iter().collect() }]
    );
}

#[test]
fn psi_must_be_injective() {
    let pattern =
        TrSeq::pattern(vec![Rule::vi(1, A, 1, 0), Rule::vi(2, A, 2, 0)]);
    let folded = TrSeq::new(vec![Rule::vi(9, A, 1, 0), Rule::vi(9, A, 2, 0)], 2);
    assert!(!contains(&folded, &pattern));
    let spread = TrSeq::new(
        vec![Rule::vi(9, A, 1, 0), Rule::vi(9, A, 2, 0), Rule::vi(8, A, 2, 1)],
        2,
    );
    assert_eq!(
        embeddings(&pattern, &spread),
        vec![Embedding { phi: vec![1, 2], psi: [(1, 9), (2, 8)].into_iter().collect() }]
    );
}

#[test]
fn deletions_match_only_deletions_of_the_same_shape() {
    let vd = TrSeq::pattern(vec![Rule::vd(1, 1, 0)]);
    let data = TrSeq::new(
        vec![Rule::vr(5, A, 1, 0), Rule::ed(5, 6, 1, 1), Rule::vd(6, 1, 2)],
        1,
    );
    assert_eq!(
        embeddings(&vd, &data),
        vec![Embedding { phi: vec![1], psi: [(1, 6)].into_iter().collect() }]
    );
    let ed = TrSeq::pattern(vec![Rule::ed(1, 2, 1, 0)]);
    assert!(contains(&data, &ed));
    let er = TrSeq::pattern(vec![Rule::er(1, 2, X, 1, 0)]);
    assert!(!contains(&data, &er));
}

#[test]
fn duplicate_witnesses_do_not_multiply_embeddings() {
    // Two copies of the same data rule offer two witnesses but only one
    // (phi, psi) pair.
    let pattern = TrSeq::pattern(vec![Rule::vi(1, A, 1, 0)]);
    let data = TrSeq::new(vec![Rule::vi(5, A, 1, 0), Rule::vi(5, A, 1, 1)], 1);
    assert_eq!(embeddings(&pattern, &data).len(), 1);
}

#[test]
fn symmetric_pattern_has_both_swap_embeddings() {
    let pattern =
        TrSeq::pattern(vec![Rule::vi(1, A, 1, 0), Rule::vi(2, A, 1, 1)]);
    let data = TrSeq::new(
        vec![Rule::vi(7, A, 1, 0), Rule::vi(8, A, 1, 1), Rule::vi(9, B, 1, 2)],
        1,
    );
    let expect: Vec<Embedding> = [[(1, 7), (2, 8)], [(1, 8), (2, 7)]]
        .iter()
        .map(|m| Embedding { phi: vec![1], psi: m.iter().copied().collect() })
        .collect();
    assert_eq!(embeddings(&pattern, &data), expect);
}

#[test]
fn embeddings_and_contains_agree_with_exhaustive_enumeration() {
    for seed in 0..250 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_data(&mut rng);
        let pattern =
            if seed % 3 == 0 { sub_pick(&data, &mut rng) } else { random_pattern(&mut rng) };
        let expect = oracle_embeddings(&data, &pattern);
        let got = embeddings(&pattern, &data);
        assert_eq!(got, expect, "seed {seed}: pattern {pattern:?} in {data:?}");
        assert_eq!(contains(&data, &pattern), !expect.is_empty(), "seed {seed}");
    }
}

#[test]
fn sub_picks_of_generated_sequences_are_always_contained() {
    let config = GeneratorConfig {
        v_avg: 4,
        v_embed_avg: 2,
        n_labels_v: 3,
        n_labels_e: 2,
        n_embedded: 2,
        db_size: 6,
        seed: 5,
        ..GeneratorConfig::default()
    };
    let (db, _) = generate(&config).unwrap();
    let trs = compile_db(&db, Convention::EmitInitialInserts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for entry in &trs.entries {
        for _ in 0..20 {
            let pattern = sub_pick(&entry.seq, &mut rng);
            assert!(contains(&entry.seq, &pattern), "{}: {pattern:?}", entry.gid);
        }
        // The whole rule set in pattern form embeds into itself.
        let whole = TrSeq::pattern(entry.seq.rules.clone());
        assert!(contains(&entry.seq, &whole), "{}", entry.gid);
    }
}

#[test]
fn support_counts_sequences_not_embeddings() {
    let pattern = TrSeq::pattern(vec![Rule::vi(1, A, 1, 0)]);
    let twice = TrSeq::new(vec![Rule::vi(4, A, 1, 0), Rule::vi(5, A, 1, 1)], 1);
    let once = TrSeq::new(vec![Rule::vi(4, A, 1, 0), Rule::vi(5, B, 1, 1)], 1);
    let never = TrSeq::new(vec![Rule::vi(4, B, 1, 0)], 1);
    assert_eq!(embeddings(&pattern, &twice).len(), 2);
    let db = TrDatabase {
        labels: Labels::new(),
        entries: [twice, once, never]
            .into_iter()
            .enumerate()
            .map(|(i, seq)| TrEntry { gid: format!("g{i}"), seq })
            .collect(),
    };
    assert_eq!(support(&db, &pattern), 2);
    assert_eq!(support(&db, &TrSeq::pattern(Vec::new())), 3);
}

#[test]
fn support_agrees_with_contains_on_a_generated_database() {
    let config = GeneratorConfig {
        v_avg: 4,
        v_embed_avg: 2,
        n_labels_v: 3,
        n_labels_e: 2,
        n_embedded: 3,
        db_size: 10,
        seed: 23,
        ..GeneratorConfig::default()
    };
    let (db, planted) = generate(&config).unwrap();
    let trs = compile_db(&db, Convention::EmitInitialInserts).unwrap();
    for p in &planted {
        let by_hand =
            trs.entries.iter().filter(|e| contains(&e.seq, p)).count() as u32;
        assert_eq!(support(&trs, p), by_hand);
        assert!(by_hand >= 1, "planted pattern missing everywhere");
    }
}
