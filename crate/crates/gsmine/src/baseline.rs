//! Tail-append miner over all frequent transformation subsequences
//! (FTSs), connected or not. It is the correctness oracle for the
//! reverse miner and the comparison subject for candidate counts: it
//! explores the full FTS space and filters for relevance afterwards,
//! where the reverse search never leaves the relevant space.
//!
//! Growth appends one rule at the temporal end of a pattern, either
//! into the last interstate or into a fresh one, guided by where rules
//! actually occur in the data. There is no ordering discipline, so a
//! class is reached through many spellings; a seen-set over canonical
//! forms collapses them before support is counted. Support itself comes
//! from the matcher, independent of the embedding bookkeeping the
//! reverse miner relies on.

use std::collections::{BTreeMap, BTreeSet};

use crate::canon::{canonical_seq, cmp_rule_lists};
use crate::matcher::{embeddings, support, MinedPattern};
use crate::model::{is_relevant, Rule, Target, TrDatabase, TrSeq, VertexId};
use crate::reverse::{MineOutcome, MineTimeout, MinerConfig};

/// Mines every FTS of `db`, relevant or not. `config.stages` is
/// ignored; cap and deadline behave as in the reverse miner.
pub fn mine_all_fts(db: &TrDatabase, config: &MinerConfig) -> Result<MineOutcome, MineTimeout> {
    let min_sup = config.min_support.absolute(db.entries.len()).max(1);
    let cap = config.max_pattern_rules;
    let mut seen: BTreeSet<Vec<Rule>> = BTreeSet::new();
    let mut out: Vec<MinedPattern> = Vec::new();
    let mut stack: Vec<TrSeq> = Vec::new();
    let mut candidates: u64 = 0;
    let mut expired = false;

    let consider = |cand: TrSeq,
                        seen: &mut BTreeSet<Vec<Rule>>,
                        out: &mut Vec<MinedPattern>,
                        stack: &mut Vec<TrSeq>,
                        candidates: &mut u64| {
        if !seen.insert(cand.rules.clone()) {
            return;
        }
        *candidates += 1;
        let sup = support(db, &cand);
        if sup >= min_sup {
            stack.push(cand.clone());
            out.push(MinedPattern { seq: cand, support: sup });
        }
    };

    if min_sup as usize <= db.entries.len() && cap != Some(0) {
        for seed in single_rule_seeds(db) {
            consider(seed, &mut seen, &mut out, &mut stack, &mut candidates);
        }
        while let Some(p) = stack.pop() {
            if let Some(d) = config.deadline {
                if std::time::Instant::now() >= d {
                    expired = true;
                    break;
                }
            }
            if cap.is_some_and(|c| p.len() >= c) {
                continue;
            }
            for ext in tail_extensions(&p, db) {
                consider(ext, &mut seen, &mut out, &mut stack, &mut candidates);
            }
        }
    }

    out.sort_by(|a, b| cmp_rule_lists(&a.seq.rules, &b.seq.rules));
    let emitted = out.len() as u64;
    let outcome = MineOutcome { patterns: out, candidates, emitted };
    if expired {
        Err(MineTimeout { partial: outcome })
    } else {
        Ok(outcome)
    }
}

/// The relevant subset, preserving order.
pub fn filter_relevant(patterns: &[MinedPattern]) -> Vec<MinedPattern> {
    patterns.iter().filter(|p| is_relevant(&p.seq)).cloned().collect()
}

/// Share of mined FTSs whose union graph is disconnected; 0 for an
/// empty set.
pub fn irrelevance_ratio(patterns: &[MinedPattern]) -> f64 {
    if patterns.is_empty() {
        return 0.0;
    }
    let irrelevant = patterns.iter().filter(|p| !is_relevant(&p.seq)).count();
    irrelevant as f64 / patterns.len() as f64
}

fn single_rule_seeds(db: &TrDatabase) -> BTreeSet<TrSeq> {
    let mut seeds = BTreeSet::new();
    for entry in &db.entries {
        for r in &entry.seq.rules {
            let target = match r.target {
                Target::Vertex(_) => Target::Vertex(1),
                Target::Edge(..) => Target::edge(1, 2),
            };
            seeds.insert(TrSeq::pattern(vec![Rule::new(r.kind, target, r.label, 1, 1)]));
        }
    }
    seeds
}

/// Canonical forms of every data-realized one-rule extension of `p` at
/// its temporal end: into the last interstate or past it, on mapped,
/// partly fresh, or wholly fresh vertices (the union graph may
/// disconnect; relevance is not this miner's concern).
fn tail_extensions(p: &TrSeq, db: &TrDatabase) -> BTreeSet<TrSeq> {
    let plast = p.max_rule_interstate();
    let nverts = p.vertex_ids().len() as VertexId;
    let mut exts: BTreeSet<TrSeq> = BTreeSet::new();
    for entry in &db.entries {
        let data = &entry.seq;
        for emb in embeddings(p, data) {
            let dlast = *emb.phi.last().expect("pattern is nonempty");
            let image: BTreeMap<VertexId, VertexId> =
                emb.psi.iter().map(|(&pv, &dv)| (dv, pv)).collect();
            for r in &data.rules {
                if r.j < dlast {
                    continue;
                }
                let newj = if r.j == dlast { plast } else { plast + 1 };
                let target = match r.target {
                    Target::Vertex(v) => {
                        Target::Vertex(image.get(&v).copied().unwrap_or(nverts + 1))
                    }
                    Target::Edge(a, b) => {
                        let (pa, pb) = (image.get(&a).copied(), image.get(&b).copied());
                        match (pa, pb) {
                            (Some(x), Some(y)) => Target::edge(x, y),
                            (Some(x), None) | (None, Some(x)) => Target::edge(x, nverts + 1),
                            (None, None) => Target::edge(nverts + 1, nverts + 2),
                        }
                    }
                };
                let appended = Rule::new(r.kind, target, r.label, newj, 1);
                // Appending a rule the last interstate already holds
                // would duplicate it verbatim; neither miner emits such
                // patterns.
                if newj == plast
                    && p.interstate(plast).iter().any(|q| q.descriptor() == appended.descriptor())
                {
                    continue;
                }
                let mut rules = p.rules.clone();
                rules.push(appended);
                exts.insert(canonical_seq(&TrSeq::pattern(rules)));
            }
        }
    }
    exts
}
