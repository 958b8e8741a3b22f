//! Core data model: labels, graphs, graph sequences, transformation rules.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// Interned label identifier. Resolve through [`Labels`] for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

/// Label interning table. One table per database; every sequence and
/// pattern derived from that database shares it.
#[derive(Debug, Clone, Default)]
pub struct Labels {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Labels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Label {
        if let Some(&i) = self.index.get(name) {
            return Label(i);
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        Label(i)
    }

    pub fn get(&self, name: &str) -> Option<Label> {
        self.index.get(name).map(|&i| Label(i))
    }

    pub fn name(&self, label: Label) -> &str {
        &self.names[label.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub type VertexId = u32;

/// Undirected edge key, stored with endpoints ordered.
pub fn edge_key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A vertex- and edge-labeled simple undirected graph with persistent
/// vertex identifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    pub vertices: BTreeMap<VertexId, Label>,
    pub edges: BTreeMap<(VertexId, VertexId), Label>,
}

impl LabeledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VertexId, label: Label) {
        self.vertices.insert(v, label);
    }

    /// Inserts an undirected edge; endpoints must already exist and differ.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, label: Label) {
        debug_assert!(u != v, "self loops are not modeled");
        debug_assert!(self.vertices.contains_key(&u) && self.vertices.contains_key(&v));
        self.edges.insert(edge_key(u, v), label);
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains_key(&edge_key(u, v))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.keys().filter(|&&(a, b)| a == v || b == v).count()
    }
}

/// A sequence of graph snapshots sharing one vertex-id space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSequence {
    pub gid: String,
    pub graphs: Vec<LabeledGraph>,
}

/// A database of graph sequences with a shared label table.
#[derive(Debug, Clone, Default)]
pub struct GraphDatabase {
    pub labels: Labels,
    pub sequences: Vec<GraphSequence>,
}

/// The six transformation rule kinds. Declaration order fixes the kind
/// rank used by rule ordering: vi < vd < vr < ei < ed < er.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    VertexInsert,
    VertexDelete,
    VertexRelabel,
    EdgeInsert,
    EdgeDelete,
    EdgeRelabel,
}

impl RuleKind {
    pub fn mnemonic(self) -> &'static str {
        match self {
            RuleKind::VertexInsert => "vi",
            RuleKind::VertexDelete => "vd",
            RuleKind::VertexRelabel => "vr",
            RuleKind::EdgeInsert => "ei",
            RuleKind::EdgeDelete => "ed",
            RuleKind::EdgeRelabel => "er",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Some(match s {
            "vi" => RuleKind::VertexInsert,
            "vd" => RuleKind::VertexDelete,
            "vr" => RuleKind::VertexRelabel,
            "ei" => RuleKind::EdgeInsert,
            "ed" => RuleKind::EdgeDelete,
            "er" => RuleKind::EdgeRelabel,
            _ => return None,
        })
    }

    pub fn is_vertex(self) -> bool {
        matches!(
            self,
            RuleKind::VertexInsert | RuleKind::VertexDelete | RuleKind::VertexRelabel
        )
    }

    pub fn is_edge(self) -> bool {
        !self.is_vertex()
    }

    /// Deletions carry the dummy label (modeled as `None`).
    pub fn takes_label(self) -> bool {
        !matches!(self, RuleKind::VertexDelete | RuleKind::EdgeDelete)
    }
}

/// What a rule acts on. Edge targets are stored with ordered endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Vertex(VertexId),
    Edge(VertexId, VertexId),
}

impl Target {
    pub fn edge(u: VertexId, v: VertexId) -> Self {
        let (a, b) = edge_key(u, v);
        Target::Edge(a, b)
    }

    /// Vertex ids touched by this target.
    pub fn vertices(self) -> impl Iterator<Item = VertexId> {
        let (a, b) = match self {
            Target::Vertex(v) => (v, None),
            Target::Edge(u, v) => (u, Some(v)),
        };
        std::iter::once(a).chain(b)
    }
}

/// One transformation rule: at interstate `j`, in order position `k`,
/// apply `kind` to `target`. `label` is `None` exactly for deletions.
///
/// The derived `Ord` is only a map key order; semantic rule order is
/// [`tr_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub kind: RuleKind,
    pub target: Target,
    pub label: Option<Label>,
    pub j: u32,
    pub k: u32,
}

impl Rule {
    pub fn new(kind: RuleKind, target: Target, label: Option<Label>, j: u32, k: u32) -> Self {
        debug_assert_eq!(label.is_some(), kind.takes_label());
        debug_assert_eq!(
            matches!(target, Target::Edge(..)),
            kind.is_edge(),
            "target shape must match rule kind"
        );
        Rule { kind, target, label, j, k }
    }

    pub fn vi(v: VertexId, label: Label, j: u32, k: u32) -> Self {
        Rule::new(RuleKind::VertexInsert, Target::Vertex(v), Some(label), j, k)
    }

    pub fn vd(v: VertexId, j: u32, k: u32) -> Self {
        Rule::new(RuleKind::VertexDelete, Target::Vertex(v), None, j, k)
    }

    pub fn vr(v: VertexId, label: Label, j: u32, k: u32) -> Self {
        Rule::new(RuleKind::VertexRelabel, Target::Vertex(v), Some(label), j, k)
    }

    pub fn ei(u: VertexId, v: VertexId, label: Label, j: u32, k: u32) -> Self {
        Rule::new(RuleKind::EdgeInsert, Target::edge(u, v), Some(label), j, k)
    }

    pub fn ed(u: VertexId, v: VertexId, j: u32, k: u32) -> Self {
        Rule::new(RuleKind::EdgeDelete, Target::edge(u, v), None, j, k)
    }

    pub fn er(u: VertexId, v: VertexId, label: Label, j: u32, k: u32) -> Self {
        Rule::new(RuleKind::EdgeRelabel, Target::edge(u, v), Some(label), j, k)
    }

    /// The (kind, target, label) part, i.e. the rule with position erased.
    pub fn descriptor(&self) -> (RuleKind, Target, Option<Label>) {
        (self.kind, self.target, self.label)
    }

    /// The same rule with its target vertices renamed.
    pub fn renamed(&self, rename: impl Fn(VertexId) -> VertexId) -> Rule {
        let target = match self.target {
            Target::Vertex(v) => Target::Vertex(rename(v)),
            Target::Edge(u, v) => Target::edge(rename(u), rename(v)),
        };
        Rule { target, ..*self }
    }
}

/// A transformation sequence: rules grouped by interstate. `transitions`
/// records how many interstates exist, which can exceed the largest rule
/// interstate when trailing transitions change nothing.
///
/// The derived `Ord` is a set/map key order like [`Rule`]'s, not the
/// semantic pattern order; see [`crate::canon::cmp_rule_lists`].
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrSeq {
    pub rules: Vec<Rule>,
    pub transitions: u32,
}

impl TrSeq {
    /// Builds a data sequence. Rules are grouped by interstate keeping
    /// their relative order (which is the executable intrastate order);
    /// positions are renumbered densely.
    pub fn new(mut rules: Vec<Rule>, transitions: u32) -> Self {
        rules.sort_by_key(|r| r.j);
        renumber_positions(&mut rules);
        let max_j = rules.iter().map(|r| r.j).max().unwrap_or(0);
        TrSeq { rules, transitions: transitions.max(max_j) }
    }

    /// Builds a pattern sequence in normal form: interstates renumbered
    /// densely, rules within an interstate sorted by rule order, interstate
    /// count equal to the largest rule interstate. Pattern equality is
    /// well-defined only on this form.
    pub fn pattern(rules: Vec<Rule>) -> Self {
        let seq = TrSeq::new(rules, 0);
        seq.normalized()
    }

    /// Pattern normal form of this sequence (see [`TrSeq::pattern`]).
    /// Collapses ruleless transitions, so only meaningful for patterns.
    pub fn normalized(&self) -> TrSeq {
        let mut rules = self.rules.clone();
        sort_rules(&mut rules);
        TrSeq { rules, transitions: 0 }.with_dense_interstates()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// Largest interstate that actually carries a rule (0 when empty).
    pub fn max_rule_interstate(&self) -> u32 {
        self.rules.iter().map(|r| r.j).max().unwrap_or(0)
    }

    /// Rules of one interstate, in position order.
    pub fn interstate(&self, j: u32) -> &[Rule] {
        let lo = self.rules.partition_point(|r| r.j < j);
        let hi = self.rules.partition_point(|r| r.j <= j);
        &self.rules[lo..hi]
    }

    /// Iterates (interstate, rules) groups for interstates that carry rules.
    pub fn interstates(&self) -> impl Iterator<Item = (u32, &[Rule])> {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 0..self.rules.len() {
            if i + 1 == self.rules.len() || self.rules[i + 1].j != self.rules[i].j {
                groups.push((self.rules[start].j, &self.rules[start..=i]));
                start = i + 1;
            }
        }
        groups.into_iter()
    }

    /// Renumbers interstates densely (1..), preserving relative order and
    /// dropping ruleless transitions.
    pub fn with_dense_interstates(&self) -> TrSeq {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for r in &self.rules {
            let next = map.len() as u32 + 1;
            map.entry(r.j).or_insert(next);
        }
        let rules = self
            .rules
            .iter()
            .map(|r| Rule { j: map[&r.j], ..*r })
            .collect();
        TrSeq::new(rules, 0)
    }

    /// Applies a vertex renaming to every rule target and re-sorts.
    pub fn renamed(&self, rename: &impl Fn(VertexId) -> VertexId) -> TrSeq {
        let rules = self.rules.iter().map(|r| r.renamed(rename)).collect();
        TrSeq::new(rules, self.transitions)
    }

    /// Distinct vertex ids touched by any rule, ascending.
    pub fn vertex_ids(&self) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> =
            self.rules.iter().flat_map(|r| r.target.vertices()).collect();
        set.into_iter().collect()
    }
}

/// Total order on rules within one interstate: kind rank, then target,
/// then label. Across interstates, `j` dominates.
pub fn tr_order(a: &Rule, b: &Rule) -> std::cmp::Ordering {
    (a.j, a.kind)
        .cmp(&(b.j, b.kind))
        .then_with(|| cmp_targets(&a.target, &b.target))
        .then(a.label.cmp(&b.label))
}

/// Target order used by `tr_order` and the canonical code comparison.
///
/// Vertices precede edges; vertices compare by ID. Edges compare by the
/// DFS-code edge order: second endpoint ascending, then first endpoint
/// descending (deeper attachment first). This is what makes the path
/// pattern canonical when numbered from an end rather than the middle.
pub fn cmp_targets(a: &Target, b: &Target) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a, b) {
        (Target::Vertex(u), Target::Vertex(v)) => u.cmp(v),
        (Target::Vertex(_), Target::Edge(..)) => Ordering::Less,
        (Target::Edge(..), Target::Vertex(_)) => Ordering::Greater,
        (Target::Edge(u1, v1), Target::Edge(u2, v2)) => v1.cmp(v2).then(u2.cmp(u1)),
    }
}

/// Sorts rules into canonical pattern order, ascending (j, kind, target,
/// label), and renumbers `k` densely within each interstate.
pub fn sort_rules(rules: &mut [Rule]) {
    rules.sort_by(tr_order);
    renumber_positions(rules);
}

/// Renumbers `k` densely (1..) within each interstate; rules must already
/// be grouped by `j`.
fn renumber_positions(rules: &mut [Rule]) {
    let mut prev_j = 0;
    let mut k = 0;
    for r in rules.iter_mut() {
        if r.j != prev_j {
            prev_j = r.j;
            k = 0;
        }
        k += 1;
        r.k = k;
    }
}

/// A database of transformation sequences with a shared label table.
#[derive(Debug, Clone, Default)]
pub struct TrDatabase {
    pub labels: Labels,
    pub entries: Vec<TrEntry>,
}

#[derive(Debug, Clone)]
pub struct TrEntry {
    pub gid: String,
    pub seq: TrSeq,
}

/// An unlabeled graph accumulating every vertex and edge a sequence or
/// rule set ever touches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnionGraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<(VertexId, VertexId)>,
}

impl UnionGraph {
    pub fn add_vertex(&mut self, v: VertexId) {
        self.vertices.insert(v);
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) {
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert(edge_key(u, v));
    }

    /// True when every vertex is reachable from every other. The empty
    /// graph and single vertices count as connected.
    pub fn is_connected(&self) -> bool {
        let mut it = self.vertices.iter();
        let Some(&start) = it.next() else { return true };
        let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for &(u, v) in &self.edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(u) = stack.pop() {
            for &w in adj.get(&u).into_iter().flatten() {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// Union graph of a snapshot sequence: every vertex and edge present in
/// any snapshot.
pub fn union_graph_of_sequence(seq: &GraphSequence) -> UnionGraph {
    let mut u = UnionGraph::default();
    for g in &seq.graphs {
        for &v in g.vertices.keys() {
            u.add_vertex(v);
        }
        for &(a, b) in g.edges.keys() {
            u.add_edge(a, b);
        }
    }
    u
}

/// Union graph of a transformation sequence: every vertex and edge any
/// rule targets.
pub fn union_graph_of_trs(seq: &TrSeq) -> UnionGraph {
    let mut u = UnionGraph::default();
    for r in &seq.rules {
        match r.target {
            Target::Vertex(v) => u.add_vertex(v),
            Target::Edge(a, b) => u.add_edge(a, b),
        }
    }
    u
}

/// A transformation sequence is relevant when its union graph is
/// connected: all its changes touch one connected working area.
pub fn is_relevant(seq: &TrSeq) -> bool {
    union_graph_of_trs(seq).is_connected()
}

/// Renders one rule like `ei 2 1 (1,3) x`; `labels` resolves names.
pub struct DisplayRule<'a> {
    pub rule: &'a Rule,
    pub labels: &'a Labels,
}

impl fmt::Display for DisplayRule<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule;
        write!(f, "{} {} {} ", r.kind.mnemonic(), r.j, r.k)?;
        match r.target {
            Target::Vertex(v) => write!(f, "{v}")?,
            Target::Edge(u, v) => write!(f, "{u},{v}")?,
        }
        match r.label {
            Some(l) => write!(f, " {}", self.labels.name(l)),
            None => write!(f, " -"),
        }
    }
}
