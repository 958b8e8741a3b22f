//! Subsequence matching: embeddings of a pattern transformation sequence
//! into a data transformation sequence, containment, and support.
//!
//! An embedding is a pair (phi, psi): phi maps pattern interstates to data
//! interstates strictly increasing, psi maps pattern vertex ids to data
//! vertex ids injectively, and every pattern rule must have a data rule
//! with the same kind and label on the mapped target at the mapped
//! interstate.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::model::{Rule, Target, TrDatabase, TrSeq, VertexId};

/// One way a pattern occurs in a data sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Embedding {
    /// `phi[i]` is the data interstate matched by pattern interstate i+1.
    pub phi: Vec<u32>,
    /// Injective pattern-vertex to data-vertex map.
    pub psi: BTreeMap<VertexId, VertexId>,
}

/// A pattern together with how many database sequences contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinedPattern {
    pub seq: TrSeq,
    pub support: u32,
}

/// All embeddings of `pattern` into `data`, deduplicated by (phi, psi).
///
/// Distinct witness rules for one pattern rule do not multiply
/// embeddings: the definition only asks that a witness exists.
pub fn embeddings(pattern: &TrSeq, data: &TrSeq) -> Vec<Embedding> {
    let groups: Vec<(u32, &[Rule])> = pattern.interstates().collect();
    let data_js: Vec<u32> = {
        let set: BTreeSet<u32> = data.rules.iter().map(|r| r.j).collect();
        set.into_iter().collect()
    };
    let mut out: BTreeSet<Embedding> = BTreeSet::new();
    let mut psi: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    let mut phi: Vec<u32> = Vec::new();
    search(
        &groups,
        data,
        &data_js,
        0,
        0,
        &mut phi,
        &mut psi,
        &mut used,
        &mut out,
    );
    out.into_iter().collect()
}

#[allow(clippy::too_many_arguments)]
fn search(
    groups: &[(u32, &[Rule])],
    data: &TrSeq,
    data_js: &[u32],
    group_idx: usize,
    j_idx: usize,
    phi: &mut Vec<u32>,
    psi: &mut BTreeMap<VertexId, VertexId>,
    used: &mut BTreeSet<VertexId>,
    out: &mut BTreeSet<Embedding>,
) {
    if group_idx == groups.len() {
        out.insert(Embedding { phi: phi.clone(), psi: psi.clone() });
        return;
    }
    // Not enough data interstates left for the remaining pattern ones.
    if data_js.len() - j_idx < groups.len() - group_idx {
        return;
    }
    let (_, rules) = groups[group_idx];
    for (idx, &dj) in data_js.iter().enumerate().skip(j_idx) {
        if data_js.len() - idx < groups.len() - group_idx {
            break;
        }
        phi.push(dj);
        match_itemset(rules, 0, data.interstate(dj), psi, used, &mut |psi, used| {
            search(groups, data, data_js, group_idx + 1, idx + 1, phi, psi, used, out);
        });
        phi.pop();
    }
}

/// Extends psi so that every rule in `rules[from..]` has a same-descriptor
/// witness in `data_rules`, invoking `cont` for each consistent extension.
fn match_itemset(
    rules: &[Rule],
    from: usize,
    data_rules: &[Rule],
    psi: &mut BTreeMap<VertexId, VertexId>,
    used: &mut BTreeSet<VertexId>,
    cont: &mut dyn FnMut(&mut BTreeMap<VertexId, VertexId>, &mut BTreeSet<VertexId>),
) {
    let Some(rule) = rules.get(from) else {
        cont(psi, used);
        return;
    };
    for w in data_rules {
        if w.kind != rule.kind || w.label != rule.label {
            continue;
        }
        let bindings = match (rule.target, w.target) {
            (Target::Vertex(p), Target::Vertex(d)) => vec![vec![(p, d)]],
            (Target::Edge(p1, p2), Target::Edge(d1, d2)) => {
                vec![vec![(p1, d1), (p2, d2)], vec![(p1, d2), (p2, d1)]]
            }
            _ => continue,
        };
        for binding in bindings {
            let mut added: Vec<VertexId> = Vec::new();
            let mut ok = true;
            for &(p, d) in &binding {
                match psi.get(&p) {
                    Some(&existing) if existing == d => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        if used.contains(&d) {
                            ok = false;
                            break;
                        }
                        psi.insert(p, d);
                        used.insert(d);
                        added.push(p);
                    }
                }
            }
            if ok {
                match_itemset(rules, from + 1, data_rules, psi, used, cont);
            }
            for p in added {
                let d = psi.remove(&p).unwrap();
                used.remove(&d);
            }
        }
    }
}

/// True when at least one embedding of `pattern` into `data` exists.
pub fn contains(data: &TrSeq, pattern: &TrSeq) -> bool {
    if pattern.is_empty() {
        return true;
    }
    // Same search, but stop at the first complete embedding.
    struct Found;
    fn search_any(
        groups: &[(u32, &[Rule])],
        data: &TrSeq,
        data_js: &[u32],
        group_idx: usize,
        j_idx: usize,
        psi: &mut BTreeMap<VertexId, VertexId>,
        used: &mut BTreeSet<VertexId>,
    ) -> Option<Found> {
        if group_idx == groups.len() {
            return Some(Found);
        }
        if data_js.len() - j_idx < groups.len() - group_idx {
            return None;
        }
        let (_, rules) = groups[group_idx];
        for (idx, &dj) in data_js.iter().enumerate().skip(j_idx) {
            if data_js.len() - idx < groups.len() - group_idx {
                break;
            }
            let mut found = None;
            match_itemset(rules, 0, data.interstate(dj), psi, used, &mut |psi, used| {
                if found.is_none() {
                    found =
                        search_any(groups, data, data_js, group_idx + 1, idx + 1, psi, used);
                }
            });
            if found.is_some() {
                return found;
            }
        }
        None
    }
    let groups: Vec<(u32, &[Rule])> = pattern.interstates().collect();
    let data_js: Vec<u32> = {
        let set: BTreeSet<u32> = data.rules.iter().map(|r| r.j).collect();
        set.into_iter().collect()
    };
    search_any(
        &groups,
        data,
        &data_js,
        0,
        0,
        &mut BTreeMap::new(),
        &mut BTreeSet::new(),
    )
    .is_some()
}

/// Number of database sequences containing the pattern.
pub fn support(db: &TrDatabase, pattern: &TrSeq) -> u32 {
    db.entries
        .par_iter()
        .filter(|e| contains(&e.seq, pattern))
        .count() as u32
}
