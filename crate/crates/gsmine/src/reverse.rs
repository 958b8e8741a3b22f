//! Reverse-search miner for relevant frequent transformation
//! subsequences (rFTSs).
//!
//! Enumeration walks the parent-function tree from the empty sequence
//! outward, so every pattern class is visited exactly once and no
//! global duplicate store is needed:
//!
//! * [`p3`] (drop the temporally last rule whose removal keeps the union
//!   graph connected) links connected edge-only patterns with mutually
//!   distinct edges, the skeletons. Children are generated data-driven
//!   from threaded embeddings and accepted only when canonical and when
//!   their P3 parent is the generating node.
//! * [`p2`] (drop the temporally last redundant same-edge rule) and
//!   [`p1`] (drop the temporally last vertex rule) decorate a fixed
//!   skeleton with extra rules. Both inverses are flattened into one
//!   PrefixSpan run per skeleton over annotated items; symmetric
//!   spellings are collapsed by the skeleton's automorphisms.
//! * Patterns whose union graph is a single vertex have no skeleton and
//!   are mined by a PrefixSpan run per data vertex.
//!
//! Every emitted pattern is the canonical representative of its class.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;

use crate::canon::{
    canonical_seq, canonical_with_renaming, cmp_rule_lists, pattern_automorphisms,
};
use crate::matcher::{embeddings, Embedding, MinedPattern};
use crate::model::{
    is_relevant, union_graph_of_trs, Label, Rule, RuleKind, Target, TrDatabase, TrSeq, VertexId,
};
use crate::prefixspan::{prefixspan, ItemsetSequence};

/// Minimum support, absolute or as a fraction of the database size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Absolute(u32),
    Fraction(f64),
}

impl Support {
    /// Resolves to an absolute count; fractions round up and never drop
    /// below 1.
    pub fn absolute(&self, db_size: usize) -> u32 {
        match *self {
            Support::Absolute(n) => n,
            Support::Fraction(f) => ((f * db_size as f64).ceil() as u32).max(1),
        }
    }
}

/// Which parent-function inverses run; disabling a stage removes the
/// pattern shapes only it can build. For testing.
#[derive(Debug, Clone, Copy)]
pub struct Stages {
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
}

impl Default for Stages {
    fn default() -> Self {
        Stages { p1: true, p2: true, p3: true }
    }
}

#[derive(Debug, Clone)]
pub struct MinerConfig {
    pub min_support: Support,
    /// Hard cap on rules per pattern; `None` mines to closure.
    pub max_pattern_rules: Option<usize>,
    pub stages: Stages,
    /// Wall-clock cutoff; exceeding it aborts with partial results.
    pub deadline: Option<Instant>,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            min_support: Support::Absolute(2),
            max_pattern_rules: None,
            stages: Stages::default(),
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MineOutcome {
    /// Canonical patterns in a fixed total order.
    pub patterns: Vec<MinedPattern>,
    /// Distinct candidates whose support was evaluated.
    pub candidates: u64,
    /// Emission events; equals `patterns.len()` when enumeration is
    /// duplicate-free.
    pub emitted: u64,
}

#[derive(Debug, thiserror::Error)]
#[error("mining exceeded its deadline after {} patterns", partial.patterns.len())]
pub struct MineTimeout {
    pub partial: MineOutcome,
}

// ---------------------------------------------------------------------------
// Parent functions.

fn strip_rule(s0: &TrSeq, idx: usize) -> TrSeq {
    let mut rules = s0.rules.clone();
    rules.remove(idx);
    TrSeq::pattern(rules)
}

/// Removes the temporally last vertex rule; `None` when there is none.
pub fn p1(s: &TrSeq) -> Option<TrSeq> {
    let s0 = s.normalized();
    let idx = s0.rules.iter().rposition(|r| r.kind.is_vertex())?;
    Some(strip_rule(&s0, idx))
}

/// Removes the temporally last redundant rule: the last rule sharing its
/// edge with a strictly earlier one. `None` when every edge is touched
/// once.
pub fn p2(s: &TrSeq) -> Option<TrSeq> {
    let s0 = s.normalized();
    let idx = s0.rules.iter().rposition(|r| {
        matches!(r.target, Target::Edge(..))
            && s0.rules.iter().any(|e| e.target == r.target && e.j < r.j)
    })?;
    Some(strip_rule(&s0, idx))
}

/// Removes the temporally last rule whose removal keeps the union graph
/// connected. `None` for the empty sequence (no rule qualifies only
/// there; every connected union graph keeps a removable rule).
pub fn p3(s: &TrSeq) -> Option<TrSeq> {
    let s0 = s.normalized();
    (0..s0.rules.len()).rev().find_map(|i| {
        let parent = strip_rule(&s0, i);
        union_graph_of_trs(&parent).is_connected().then_some(parent)
    })
}

// ---------------------------------------------------------------------------
// Projection and annotated conversion (P1/P2 inverse substrate).

/// A data sequence restricted to one embedding: only rules whose
/// vertices all lie in the embedding's image survive. Skeleton
/// occurrences are still present; conversion removes them.
#[derive(Debug, Clone)]
pub struct ProjectedSequence {
    pub gid: usize,
    pub rules: TrSeq,
    pub embedding: Embedding,
}

/// Projects `data` through each embedding of `pattern`.
pub fn project(
    data: &TrSeq,
    pattern: &TrSeq,
    embs: &[Embedding],
    gid: usize,
) -> Vec<ProjectedSequence> {
    embs.iter()
        .map(|emb| {
            debug_assert!(pattern.vertex_ids().iter().all(|v| emb.psi.contains_key(v)));
            let image: BTreeSet<VertexId> = emb.psi.values().copied().collect();
            let rules: Vec<Rule> = data
                .rules
                .iter()
                .filter(|r| r.target.vertices().all(|v| image.contains(&v)))
                .copied()
                .collect();
            ProjectedSequence {
                gid,
                rules: TrSeq::new(rules, data.transitions),
                embedding: emb.clone(),
            }
        })
        .collect()
}

/// Temporal position of an item relative to the skeleton interstates it
/// was projected around: strictly before the r-th, inside the r-th, or
/// after the last. Ordered accordingly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Annotation {
    Before(u32),
    At(u32),
    AfterLast,
}

impl Annotation {
    fn rank(&self) -> u64 {
        match *self {
            Annotation::Before(r) => 2 * r as u64 - 1,
            Annotation::At(r) => 2 * r as u64,
            Annotation::AfterLast => u64::MAX,
        }
    }
}

impl Ord for Annotation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for Annotation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// One projected rule, renamed into the pattern frame and positioned
/// relative to the skeleton. Everything is ground, so items compare as
/// plain values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AnnotatedItem {
    pub ann: Annotation,
    pub kind: RuleKind,
    pub target: Target,
    pub label: Option<Label>,
}

/// Renames a projected sequence into the pattern frame, removes the
/// skeleton occurrence itself, annotates what is left, and groups it
/// into itemsets by data interstate.
///
/// Item alphabet: vertex rules anywhere; edge rules only on skeleton
/// edges and strictly after that edge's own skeleton rule (an earlier
/// same-edge rule would change which rule is the edge's first, i.e. the
/// skeleton, so those spellings belong to another skeleton's subtree).
pub fn reassign_and_convert(
    projected: &ProjectedSequence,
    skeleton: &TrSeq,
) -> ItemsetSequence<AnnotatedItem> {
    let emb = &projected.embedding;
    let inverse: BTreeMap<VertexId, VertexId> =
        emb.psi.iter().map(|(&p, &d)| (d, p)).collect();
    // Skeleton interstate of each skeleton edge, for the strictly-after
    // restriction.
    let edge_interstate: BTreeMap<Target, u32> =
        skeleton.rules.iter().map(|r| (r.target, r.j)).collect();
    let witness: BTreeSet<(u32, Target)> = skeleton
        .rules
        .iter()
        .map(|r| (emb.phi[r.j as usize - 1], r.renamed(|v| emb.psi[&v]).target))
        .collect();
    let last = *emb.phi.last().expect("skeleton is nonempty");

    let mut itemsets: BTreeMap<u32, Vec<AnnotatedItem>> = BTreeMap::new();
    for r in &projected.rules.rules {
        if witness.contains(&(r.j, r.target)) {
            continue;
        }
        let target = r.renamed(|v| inverse[&v]).target;
        let ann = if r.j > last {
            Annotation::AfterLast
        } else {
            match emb.phi.iter().position(|&dj| dj == r.j) {
                Some(i) => Annotation::At(i as u32 + 1),
                None => {
                    let before = emb.phi.iter().filter(|&&dj| dj < r.j).count();
                    Annotation::Before(before as u32 + 1)
                }
            }
        };
        if let Target::Edge(..) = target {
            match edge_interstate.get(&target) {
                Some(&je) if ann > Annotation::At(je) => {}
                _ => continue,
            }
        }
        itemsets.entry(r.j).or_default().push(AnnotatedItem {
            ann,
            kind: r.kind,
            target,
            label: r.label,
        });
    }
    let itemsets = itemsets
        .into_values()
        .map(|mut is| {
            is.sort();
            is.dedup();
            is
        })
        .collect();
    ItemsetSequence { gid: projected.gid, itemsets }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReconvertError {
    #[error("itemset {0} is empty")]
    EmptyItemset(usize),
    #[error("itemset {0} mixes annotations")]
    MixedAnnotations(usize),
    #[error("itemset {0} is annotated earlier than its predecessor")]
    OutOfOrder(usize),
    #[error("two itemsets both claim skeleton interstate {0}")]
    DuplicateAt(u32),
}

/// Interleaves an annotated item pattern back around its skeleton:
/// `Before(r)` itemsets open fresh interstates ahead of skeleton
/// interstate r (in itemset order), `At(r)` items join interstate r, and
/// `AfterLast` itemsets trail one interstate each. Interstates come out
/// dense; the result stays in the skeleton's vertex frame.
pub fn reconvert(
    skeleton: &TrSeq,
    items: &[Vec<AnnotatedItem>],
) -> Result<TrSeq, ReconvertError> {
    let mut seen_at: BTreeSet<u32> = BTreeSet::new();
    let mut prev: Option<Annotation> = None;
    for (i, itemset) in items.iter().enumerate() {
        let Some(first) = itemset.first() else {
            return Err(ReconvertError::EmptyItemset(i));
        };
        if itemset.iter().any(|it| it.ann != first.ann) {
            return Err(ReconvertError::MixedAnnotations(i));
        }
        if let Annotation::At(r) = first.ann {
            if !seen_at.insert(r) {
                return Err(ReconvertError::DuplicateAt(r));
            }
        }
        match prev {
            Some(p) if first.ann < p => return Err(ReconvertError::OutOfOrder(i)),
            Some(p) if first.ann == p && matches!(p, Annotation::At(_)) => {
                unreachable!("duplicate At caught above")
            }
            _ => {}
        }
        prev = Some(first.ann);
    }

    let skel_js = skeleton.max_rule_interstate();
    let mut rules: Vec<Rule> = Vec::new();
    let emit = |items: &[AnnotatedItem], j: u32, rules: &mut Vec<Rule>| {
        for it in items {
            rules.push(Rule::new(it.kind, it.target, it.label, j, 1));
        }
    };
    let mut next = items.iter().peekable();
    let mut j = 0;
    for r in 1..=skel_js {
        while next
            .peek()
            .is_some_and(|is| is[0].ann == Annotation::Before(r))
        {
            j += 1;
            emit(next.next().unwrap(), j, &mut rules);
        }
        j += 1;
        for rule in skeleton.interstate(r) {
            rules.push(Rule { j, k: 1, ..*rule });
        }
        if next.peek().is_some_and(|is| is[0].ann == Annotation::At(r)) {
            emit(next.next().unwrap(), j, &mut rules);
        }
    }
    while let Some(is) = next.next() {
        debug_assert_eq!(is[0].ann, Annotation::AfterLast);
        j += 1;
        emit(is, j, &mut rules);
    }
    Ok(TrSeq::pattern(rules))
}

// ---------------------------------------------------------------------------
// P3 inverse: skeleton children from threaded embeddings.

/// The frequent P3 children of a skeleton (or of the empty root), in
/// canonical form with exact support. Wrapper over the miner's internal
/// step that recomputes embeddings with the matcher.
pub fn p3_extensions(skeleton: &TrSeq, db: &TrDatabase, min_support: u32) -> Vec<MinedPattern> {
    let canon = canonical_seq(skeleton);
    let embs: Vec<(usize, BTreeSet<Embedding>)> = if canon.is_empty() {
        Vec::new()
    } else {
        db.entries
            .iter()
            .enumerate()
            .filter_map(|(gi, e)| {
                let found = embeddings(&canon, &e.seq);
                (!found.is_empty()).then(|| (gi, found.into_iter().collect()))
            })
            .collect()
    };
    let node = SkelNode { pattern: canon, embs };
    let children = if node.pattern.is_empty() {
        root_children(db)
    } else {
        generate_children(&node, db)
    };
    children
        .into_values()
        .filter(|c| c.embs.len() as u32 >= min_support)
        .filter(|c| accepted(&c.seq, &node.pattern))
        .map(|c| MinedPattern { support: c.embs.len() as u32, seq: c.seq })
        .collect()
}

struct SkelNode {
    pattern: TrSeq,
    /// Per containing gid, every embedding (closed under the pattern's
    /// automorphisms, so projection sees each occurrence frame).
    embs: Vec<(usize, BTreeSet<Embedding>)>,
}

struct ChildCand {
    seq: TrSeq,
    embs: Vec<(usize, BTreeSet<Embedding>)>,
}

/// A candidate survives when the parent function maps it back to the
/// node that generated it; combined with canonical-form aggregation this
/// visits each child class exactly once.
fn accepted(child: &TrSeq, parent: &TrSeq) -> bool {
    p3(child).is_some_and(|p| canonical_seq(&p) == *parent)
}

/// Single-edge-rule classes with both endpoint orientations as
/// embeddings; the recursion trunk starts here.
fn root_children(db: &TrDatabase) -> BTreeMap<Vec<Rule>, ChildCand> {
    let mut out: BTreeMap<Vec<Rule>, ChildCand> = BTreeMap::new();
    for (gi, entry) in db.entries.iter().enumerate() {
        for r in &entry.seq.rules {
            let Target::Edge(a, b) = r.target else { continue };
            let seq = TrSeq::pattern(vec![Rule::new(r.kind, Target::edge(1, 2), r.label, 1, 1)]);
            let cand = out
                .entry(seq.rules.clone())
                .or_insert_with(|| ChildCand { seq, embs: Vec::new() });
            let set = match cand.embs.last_mut() {
                Some((g, set)) if *g == gi => set,
                _ => {
                    cand.embs.push((gi, BTreeSet::new()));
                    &mut cand.embs.last_mut().unwrap().1
                }
            };
            for (x, y) in [(a, b), (b, a)] {
                set.insert(Embedding {
                    phi: vec![r.j],
                    psi: BTreeMap::from([(1, x), (2, y)]),
                });
            }
        }
    }
    out
}

/// All data-driven one-rule extensions of a skeleton node, aggregated by
/// canonical form with embeddings renamed into it. The new rule may land
/// in any existing interstate, any gap, or past the end; offered
/// placements come straight from where unmatched data rules sit.
fn generate_children(node: &SkelNode, db: &TrDatabase) -> BTreeMap<Vec<Rule>, ChildCand> {
    let pattern = &node.pattern;
    let nverts = pattern.vertex_ids().len() as VertexId;
    let edges: BTreeSet<Target> = pattern.rules.iter().map(|r| r.target).collect();

    // (gid, built child rules, embedding in the built frame)
    let per_gid: Vec<(usize, Vec<(Vec<Rule>, Embedding)>)> = node
        .embs
        .par_iter()
        .map(|(gi, embs)| {
            let data = &db.entries[*gi].seq;
            let mut found = Vec::new();
            for emb in embs {
                let image: BTreeMap<VertexId, VertexId> =
                    emb.psi.iter().map(|(&p, &d)| (d, p)).collect();
                for r in &data.rules {
                    let Target::Edge(a, b) = r.target else { continue };
                    let (pa, pb) = (image.get(&a).copied(), image.get(&b).copied());
                    let target = match (pa, pb) {
                        (Some(x), Some(y)) => {
                            if edges.contains(&Target::edge(x, y)) {
                                continue;
                            }
                            Target::edge(x, y)
                        }
                        (Some(x), None) | (None, Some(x)) => Target::edge(x, nverts + 1),
                        (None, None) => continue,
                    };
                    let new_data_vertex = if pa.is_none() { Some(a) } else if pb.is_none() { Some(b) } else { None };

                    // Interstate placement relative to the embedding.
                    let (newj, phi) = match emb.phi.iter().position(|&dj| dj == r.j) {
                        Some(i) => (i as u32 + 1, emb.phi.clone()),
                        None => {
                            let g = emb.phi.iter().filter(|&&dj| dj < r.j).count();
                            let mut phi = emb.phi.clone();
                            phi.insert(g, r.j);
                            (g as u32 + 1, phi)
                        }
                    };
                    let shift = |j: u32| if phi.len() > emb.phi.len() && j >= newj { j + 1 } else { j };
                    let mut rules: Vec<Rule> = pattern
                        .rules
                        .iter()
                        .map(|p| Rule { j: shift(p.j), ..*p })
                        .collect();
                    rules.push(Rule::new(r.kind, target, r.label, newj, 1));
                    let child = TrSeq::pattern(rules);

                    let mut psi = emb.psi.clone();
                    if let Some(dv) = new_data_vertex {
                        psi.insert(nverts + 1, dv);
                    }
                    found.push((child.rules, Embedding { phi, psi }));
                }
            }
            (*gi, found)
        })
        .collect();

    // Canonicalize each distinct built spelling once, then aggregate.
    let mut canon_cache: BTreeMap<Vec<Rule>, (TrSeq, BTreeMap<VertexId, VertexId>)> =
        BTreeMap::new();
    let mut out: BTreeMap<Vec<Rule>, ChildCand> = BTreeMap::new();
    for (gi, found) in per_gid {
        for (built, emb) in found {
            let (canon, rename) = canon_cache
                .entry(built.clone())
                .or_insert_with(|| canonical_with_renaming(&TrSeq::pattern(built.clone())))
                .clone();
            let cand = out
                .entry(canon.rules.clone())
                .or_insert_with(|| ChildCand { seq: canon, embs: Vec::new() });
            let psi = emb.psi.iter().map(|(&p, &d)| (rename[&p], d)).collect();
            let set = match cand.embs.last_mut() {
                Some((g, set)) if *g == gi => set,
                _ => {
                    cand.embs.push((gi, BTreeSet::new()));
                    &mut cand.embs.last_mut().unwrap().1
                }
            };
            set.insert(Embedding { phi: emb.phi, psi });
        }
    }
    // Close embeddings under the child's automorphisms so every
    // occurrence frame is present for projection and further growth.
    for cand in out.values_mut() {
        let auts = pattern_automorphisms(&cand.seq);
        if auts.len() > 1 {
            for (_, set) in cand.embs.iter_mut() {
                let twisted: Vec<Embedding> = set
                    .iter()
                    .flat_map(|e| {
                        auts.iter().map(move |a| Embedding {
                            phi: e.phi.clone(),
                            psi: e.psi.iter().map(|(&p, &d)| (a[&p], d)).collect(),
                        })
                    })
                    .collect();
                set.extend(twisted);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The miner.

/// Mines every relevant frequent transformation subsequence of `db`.
/// Returns partial results as the error payload when the configured
/// deadline passes.
pub fn mine(db: &TrDatabase, config: &MinerConfig) -> Result<MineOutcome, MineTimeout> {
    let mut m = Miner {
        db,
        config,
        min_sup: config.min_support.absolute(db.entries.len()).max(1),
        out: Vec::new(),
        candidates: 0,
        emitted: 0,
        expired: false,
    };
    if m.min_sup as usize <= db.entries.len() {
        m.run();
    }
    m.out.sort_by(|a, b| cmp_rule_lists(&a.seq.rules, &b.seq.rules));
    let outcome =
        MineOutcome { patterns: m.out, candidates: m.candidates, emitted: m.emitted };
    if m.expired {
        Err(MineTimeout { partial: outcome })
    } else {
        Ok(outcome)
    }
}

struct Miner<'a> {
    db: &'a TrDatabase,
    config: &'a MinerConfig,
    min_sup: u32,
    out: Vec<MinedPattern>,
    candidates: u64,
    emitted: u64,
    expired: bool,
}

impl Miner<'_> {
    fn run(&mut self) {
        if self.config.stages.p1 {
            self.vertex_stage();
        }
        if self.config.stages.p3 {
            let roots = root_children(self.db);
            self.candidates += roots.len() as u64;
            for cand in roots.into_values() {
                if self.check_deadline() {
                    return;
                }
                if cand.embs.len() as u32 >= self.min_sup {
                    let node = SkelNode { pattern: cand.seq, embs: cand.embs };
                    self.skeleton_node(&node);
                }
            }
        }
    }

    fn check_deadline(&mut self) -> bool {
        if !self.expired {
            if let Some(d) = self.config.deadline {
                if Instant::now() >= d {
                    self.expired = true;
                }
            }
        }
        self.expired
    }

    fn emit(&mut self, seq: TrSeq, support: u32) {
        debug_assert!(is_relevant(&seq));
        debug_assert_eq!(seq, canonical_seq(&seq));
        self.emitted += 1;
        self.out.push(MinedPattern { seq, support });
    }

    /// Patterns whose union graph is one vertex: a PrefixSpan run over
    /// the vertex-rule history of every data vertex.
    fn vertex_stage(&mut self) {
        let mut seqs: Vec<ItemsetSequence<(RuleKind, Option<Label>)>> = Vec::new();
        for (gi, entry) in self.db.entries.iter().enumerate() {
            let mut per_vertex: BTreeMap<VertexId, Vec<Vec<(RuleKind, Option<Label>)>>> =
                BTreeMap::new();
            for r in &entry.seq.rules {
                if let Target::Vertex(v) = r.target {
                    // Rules arrive j-sorted; one rule per (j, vertex), so
                    // every itemset is a singleton.
                    per_vertex.entry(v).or_default().push(vec![(r.kind, r.label)]);
                }
            }
            seqs.extend(
                per_vertex
                    .into_values()
                    .map(|itemsets| ItemsetSequence { gid: gi, itemsets }),
            );
        }
        let found = prefixspan(
            &seqs,
            self.min_sup,
            self.config.max_pattern_rules,
            &mut self.candidates,
        );
        for sp in found {
            let rules: Vec<Rule> = sp
                .itemsets
                .iter()
                .enumerate()
                .map(|(i, is)| {
                    debug_assert_eq!(is.len(), 1);
                    let (kind, label) = is[0];
                    Rule::new(kind, Target::Vertex(1), label, i as u32 + 1, 1)
                })
                .collect();
            self.emit(TrSeq::pattern(rules), sp.support);
        }
    }

    fn skeleton_node(&mut self, node: &SkelNode) {
        if self.check_deadline() {
            return;
        }
        self.emit(node.pattern.clone(), node.embs.len() as u32);
        let cap = self.config.max_pattern_rules;
        if cap.is_some_and(|c| node.pattern.len() >= c) {
            return;
        }
        self.item_stage(node);
        let children = generate_children(node, self.db);
        self.candidates += children.len() as u64;
        for cand in children.into_values() {
            if self.check_deadline() {
                return;
            }
            if cand.embs.len() as u32 >= self.min_sup && accepted(&cand.seq, &node.pattern) {
                let child = SkelNode { pattern: cand.seq, embs: cand.embs };
                self.skeleton_node(&child);
            }
        }
    }

    /// P2 and P1 inverses around one skeleton, flattened into a single
    /// PrefixSpan run; each chain step appends the temporally last rule
    /// of its kind, so any item multiset reachable by the chains is
    /// reachable by growing items in pattern order.
    fn item_stage(&mut self, node: &SkelNode) {
        if !self.config.stages.p1 && !self.config.stages.p2 {
            return;
        }
        let mut seqs: Vec<ItemsetSequence<AnnotatedItem>> = Vec::new();
        for (gi, embs) in &node.embs {
            let data = &self.db.entries[*gi].seq;
            let embs: Vec<Embedding> = embs.iter().cloned().collect();
            for pr in project(data, &node.pattern, &embs, *gi) {
                let mut conv = reassign_and_convert(&pr, &node.pattern);
                conv.itemsets.retain_mut(|is| {
                    is.retain(|it| match it.target {
                        Target::Vertex(_) => self.config.stages.p1,
                        Target::Edge(..) => self.config.stages.p2,
                    });
                    !is.is_empty()
                });
                if !conv.itemsets.is_empty() {
                    seqs.push(conv);
                }
            }
        }
        let max_items = self.config.max_pattern_rules.map(|c| c - node.pattern.len());
        let found = prefixspan(&seqs, self.min_sup, max_items, &mut self.candidates);
        if found.is_empty() {
            return;
        }
        let auts = pattern_automorphisms(&node.pattern);
        for sp in found {
            let seq = reconvert(&node.pattern, &sp.itemsets)
                .expect("mined annotations are consistent by construction");
            if auts.len() > 1 {
                let minimal = auts.iter().all(|a| {
                    let image = TrSeq::pattern(
                        seq.rules.iter().map(|r| r.renamed(|v| a[&v])).collect(),
                    );
                    cmp_rule_lists(&seq.rules, &image.rules) != std::cmp::Ordering::Greater
                });
                if !minimal {
                    continue;
                }
            }
            self.emit(canonical_seq(&seq), sp.support);
        }
    }
}
