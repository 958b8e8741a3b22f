//! Canonical forms and DFS codes for patterns.
//!
//! A pattern names its vertices with arbitrary IDs, so the same structure
//! has many spellings. The canonical representative is the spelling whose
//! code is lexicographically minimal over all depth-first numberings of
//! the union graph. The code of a spelling lists its rules in normal
//! order as `(u, u2, (label, kind, j))` tuples; tuples compare by
//! interstate, then kind rank, then target (edges by the DFS-code edge
//! order of [`cmp_targets`]), then label.
//!
//! Two layers live here:
//!
//! * flat pattern codes ([`code_of`], [`canonical_seq`], [`is_canonical`])
//!   used as the output identity by both miners, and
//! * classic DFS codes over plain edge-labeled graphs
//!   ([`min_classic_code`]), the substrate the edge-stage search is built
//!   on.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::model::{
    union_graph_of_trs, Label, Rule, RuleKind, Target, TrSeq, UnionGraph, VertexId,
};
pub use crate::model::{cmp_targets, tr_order};

/// One entry of a flat pattern code: the rule's target under the current
/// vertex numbering plus its payload. `u2` is `None` for vertex rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeTuple {
    pub u: VertexId,
    pub u2: Option<VertexId>,
    pub label: Option<Label>,
    pub kind: RuleKind,
    pub j: u32,
}

/// A pattern code: tuples in normal rule order under some numbering.
pub type Code = Vec<CodeTuple>;

impl CodeTuple {
    fn from_rule(r: &Rule) -> CodeTuple {
        let (u, u2) = match r.target {
            Target::Vertex(v) => (v, None),
            Target::Edge(a, b) => (a, Some(b)),
        };
        CodeTuple { u, u2, label: r.label, kind: r.kind, j: r.j }
    }

    fn target(&self) -> Target {
        match self.u2 {
            None => Target::Vertex(self.u),
            Some(v) => Target::edge(self.u, v),
        }
    }
}

/// Total order on code tuples: (j, kind, target, label) with edge targets
/// under the DFS-code edge order.
pub fn cmp_code_tuples(a: &CodeTuple, b: &CodeTuple) -> Ordering {
    (a.j, a.kind)
        .cmp(&(b.j, b.kind))
        .then_with(|| cmp_targets(&a.target(), &b.target()))
        .then(a.label.cmp(&b.label))
}

/// Positional lexicographic order on codes.
pub fn cmp_codes(a: &Code, b: &Code) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match cmp_code_tuples(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("pattern is not relevant (union graph empty or disconnected)")]
    NotRelevant,
    #[error("bad vertex assignment: {0}")]
    BadAssignment(String),
}

fn adjacency(g: &UnionGraph) -> BTreeMap<VertexId, Vec<VertexId>> {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &v in &g.vertices {
        adj.entry(v).or_default();
    }
    for &(u, v) in &g.edges {
        adj.get_mut(&u).unwrap().push(v);
        adj.get_mut(&v).unwrap().push(u);
    }
    adj
}

/// Checks that `order` (vertices in numbering order) is reachable by a
/// depth-first traversal: each vertex either continues from the deepest
/// stacked vertex that still has unvisited neighbors, or starts a new
/// component once the previous one is exhausted.
fn dfs_order_valid(adj: &BTreeMap<VertexId, Vec<VertexId>>, order: &[VertexId]) -> bool {
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut stack: Vec<VertexId> = Vec::new();
    for &v in order {
        while let Some(&top) = stack.last() {
            if adj[&top].iter().any(|w| !seen.contains(w)) {
                break;
            }
            stack.pop();
        }
        match stack.last() {
            Some(&top) if !adj[&top].contains(&v) => return false,
            // Stack empty: v starts a fresh component. A cross edge back
            // into the numbered part would have kept its endpoint stacked.
            _ => {}
        }
        seen.insert(v);
        stack.push(v);
    }
    true
}

/// Enumerates every depth-first numbering of `g` as a vertex order
/// (position i gets number i+1). Components are numbered in blocks, so a
/// connected graph yields exactly its DFS discovery orders.
pub fn dfs_numberings(g: &UnionGraph) -> Vec<Vec<VertexId>> {
    let adj = adjacency(g);
    let n = g.vertices.len();
    let mut out = Vec::new();
    let mut order: Vec<VertexId> = Vec::new();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut stack: Vec<VertexId> = Vec::new();

    fn rec(
        adj: &BTreeMap<VertexId, Vec<VertexId>>,
        n: usize,
        order: &mut Vec<VertexId>,
        seen: &mut BTreeSet<VertexId>,
        stack: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        if order.len() == n {
            out.push(order.clone());
            return;
        }
        // Exhausted vertices pop deterministically; remember them so the
        // caller's stack is restored on return.
        let mut popped = Vec::new();
        while let Some(&top) = stack.last() {
            if adj[&top].iter().any(|w| !seen.contains(w)) {
                break;
            }
            popped.push(stack.pop().unwrap());
        }
        let next: Vec<VertexId> = match stack.last() {
            Some(&top) => adj[&top].iter().copied().filter(|w| !seen.contains(w)).collect(),
            None => adj.keys().copied().filter(|w| !seen.contains(w)).collect(),
        };
        for v in next {
            order.push(v);
            seen.insert(v);
            stack.push(v);
            rec(adj, n, order, seen, stack, out);
            stack.pop();
            seen.remove(&v);
            order.pop();
        }
        while let Some(v) = popped.pop() {
            stack.push(v);
        }
    }

    rec(&adj, n, &mut order, &mut seen, &mut stack, &mut out);
    out
}

/// Reads the code of `s` under a vertex renaming: rules are renamed, put
/// back into normal order, and listed as tuples.
///
/// The assignment must be a bijection from the union-graph vertices onto
/// 1..=n arising from a depth-first traversal, and `s` must be relevant.
pub fn code_of(s: &TrSeq, assignment: &BTreeMap<VertexId, u32>) -> Result<Code, CanonError> {
    let s0 = s.normalized();
    let g = union_graph_of_trs(&s0);
    if g.vertices.is_empty() || !g.is_connected() {
        return Err(CanonError::NotRelevant);
    }
    let n = g.vertices.len();
    if assignment.len() != n || !g.vertices.iter().all(|v| assignment.contains_key(v)) {
        return Err(CanonError::BadAssignment(
            "keys must be exactly the union-graph vertices".into(),
        ));
    }
    let values: BTreeSet<u32> = assignment.values().copied().collect();
    if values.len() != n || *values.first().unwrap() != 1 || *values.last().unwrap() != n as u32 {
        return Err(CanonError::BadAssignment("values must be a bijection onto 1..=n".into()));
    }
    let mut order: Vec<VertexId> = g.vertices.iter().copied().collect();
    order.sort_by_key(|v| assignment[v]);
    if !dfs_order_valid(&adjacency(&g), &order) {
        return Err(CanonError::BadAssignment("numbering is not depth-first".into()));
    }
    let renamed: Vec<Rule> = s0.rules.iter().map(|r| r.renamed(|v| assignment[&v])).collect();
    let seq = TrSeq::pattern(renamed);
    Ok(seq.rules.iter().map(CodeTuple::from_rule).collect())
}

/// Canonical form plus the renaming (old ID to new ID) that produced it.
///
/// Total over all patterns: a disconnected union graph is numbered
/// per-component (components in blocks), so this also serves as the
/// duplicate-suppression key for irrelevant sequences.
pub fn canonical_with_renaming(s: &TrSeq) -> (TrSeq, BTreeMap<VertexId, VertexId>) {
    let s0 = s.normalized();
    let g = union_graph_of_trs(&s0);
    if g.vertices.is_empty() {
        return (s0, BTreeMap::new());
    }
    let mut best: Option<(Vec<Rule>, BTreeMap<VertexId, VertexId>)> = None;
    for order in dfs_numberings(&g) {
        let map: BTreeMap<VertexId, VertexId> =
            order.iter().enumerate().map(|(i, &v)| (v, i as u32 + 1)).collect();
        let renamed = TrSeq::pattern(s0.rules.iter().map(|r| r.renamed(|v| map[&v])).collect());
        let better = match &best {
            None => true,
            Some((rules, _)) => cmp_rule_lists(&renamed.rules, rules) == Ordering::Less,
        };
        if better {
            best = Some((renamed.rules, map));
        }
    }
    let (rules, map) = best.unwrap();
    (TrSeq::pattern(rules), map)
}

/// Positional rule order with shorter prefixes first; total on pattern
/// normal forms, used to pick orbit minima and to sort miner output.
pub fn cmp_rule_lists(a: &[Rule], b: &[Rule]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match tr_order(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// The canonical representative of `s`'s renaming class.
pub fn canonical_seq(s: &TrSeq) -> TrSeq {
    canonical_with_renaming(s).0
}

/// Whether `s` (as spelled) is the canonical representative. Errors when
/// `s` is not relevant; exactly one spelling per class returns true.
pub fn is_canonical(s: &TrSeq) -> Result<bool, CanonError> {
    let g = union_graph_of_trs(s);
    if g.vertices.is_empty() || !g.is_connected() {
        return Err(CanonError::NotRelevant);
    }
    Ok(*s == canonical_seq(s))
}

/// The code of an already-canonical pattern under the identity numbering.
pub fn canonical_code(s: &TrSeq) -> Code {
    s.normalized().rules.iter().map(CodeTuple::from_rule).collect()
}

/// All vertex bijections mapping `s` onto itself (always contains the
/// identity). Used to collapse symmetric spellings produced around one
/// skeleton.
pub fn pattern_automorphisms(s: &TrSeq) -> Vec<BTreeMap<VertexId, VertexId>> {
    let s0 = s.normalized();
    let verts: Vec<VertexId> = s0.vertex_ids().into_iter().collect();
    // Per-vertex multiset of incident rule payloads; automorphisms must
    // preserve it, which prunes most of the n! search.
    let sig = |v: VertexId| -> Vec<(u32, RuleKind, Option<Label>)> {
        let mut xs: Vec<_> = s0
            .rules
            .iter()
            .filter(|r| r.target.vertices().any(|u| u == v))
            .map(|r| (r.j, r.kind, r.label))
            .collect();
        xs.sort();
        xs
    };
    let sigs: BTreeMap<VertexId, Vec<(u32, RuleKind, Option<Label>)>> =
        verts.iter().map(|&v| (v, sig(v))).collect();

    let mut out = Vec::new();
    let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();

    fn rec(
        s0: &TrSeq,
        verts: &[VertexId],
        sigs: &BTreeMap<VertexId, Vec<(u32, RuleKind, Option<Label>)>>,
        map: &mut BTreeMap<VertexId, VertexId>,
        used: &mut BTreeSet<VertexId>,
        out: &mut Vec<BTreeMap<VertexId, VertexId>>,
    ) {
        let i = map.len();
        if i == verts.len() {
            let renamed = TrSeq::pattern(s0.rules.iter().map(|r| r.renamed(|v| map[&v])).collect());
            if renamed.rules == s0.rules {
                out.push(map.clone());
            }
            return;
        }
        let v = verts[i];
        for &w in verts {
            if used.contains(&w) || sigs[&v] != sigs[&w] {
                continue;
            }
            map.insert(v, w);
            used.insert(w);
            rec(s0, verts, sigs, map, used, out);
            used.remove(&w);
            map.remove(&v);
        }
    }

    rec(&s0, &verts, &sigs, &mut map, &mut used, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Classic DFS codes over edge-labeled graphs.

/// One DFS-code tuple: `from < to` is a forward (tree) edge discovering
/// `to`, `from > to` a backward edge. Payload carries the edge label, or
/// any richer `Ord` annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicTuple<P> {
    pub from: u32,
    pub to: u32,
    pub payload: P,
}

/// The gSpan edge order on tuple positions, then payload.
pub fn cmp_classic_tuples<P: Ord>(a: &ClassicTuple<P>, b: &ClassicTuple<P>) -> Ordering {
    let fwd = |t: &ClassicTuple<P>| t.from < t.to;
    let pos = match (fwd(a), fwd(b)) {
        (true, true) => a.to.cmp(&b.to).then(b.from.cmp(&a.from)),
        (false, false) => a.from.cmp(&b.from).then(a.to.cmp(&b.to)),
        // backward vs forward: a comes first iff its source is visited
        // no later than where b lands.
        (false, true) => {
            if a.from < b.to {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        (true, false) => {
            if a.to <= b.from {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
    };
    pos.then_with(|| a.payload.cmp(&b.payload))
}

/// Positional lexicographic order on classic codes.
pub fn cmp_classic_codes<P: Ord>(a: &[ClassicTuple<P>], b: &[ClassicTuple<P>]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match cmp_classic_tuples(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// The minimal DFS code of a connected edge-labeled graph, i.e. its
/// canonical form. Explores every rightmost-path extension order with
/// branch-and-bound against the best complete code.
///
/// Input edges are (u, v, payload) with arbitrary vertex IDs; self loops
/// are not supported.
pub fn min_classic_code<P: Ord + Clone>(edges: &[(VertexId, VertexId, P)]) -> Vec<ClassicTuple<P>> {
    assert!(!edges.is_empty(), "minimal code of an empty graph is undefined");
    let mut adj: BTreeMap<VertexId, Vec<(VertexId, usize)>> = BTreeMap::new();
    for (i, &(u, v, _)) in edges.iter().enumerate() {
        debug_assert_ne!(u, v);
        adj.entry(u).or_default().push((v, i));
        adj.entry(v).or_default().push((u, i));
    }

    struct State<'a, P> {
        edges: &'a [(VertexId, VertexId, P)],
        adj: &'a BTreeMap<VertexId, Vec<(VertexId, usize)>>,
        code: Vec<ClassicTuple<P>>,
        // graph vertex of each code vertex; index 0 unused.
        order: Vec<VertexId>,
        num: BTreeMap<VertexId, u32>,
        used: Vec<bool>,
        used_count: usize,
        // rightmost path as code-vertex numbers, root first.
        stack: Vec<u32>,
        best: Option<Vec<ClassicTuple<P>>>,
    }

    impl<P: Ord + Clone> State<'_, P> {
        fn prefix_beats_best(&self) -> bool {
            match &self.best {
                None => true,
                Some(best) => {
                    for (x, y) in self.code.iter().zip(best.iter()) {
                        match cmp_classic_tuples(x, y) {
                            Ordering::Less => return true,
                            Ordering::Greater => return false,
                            Ordering::Equal => {}
                        }
                    }
                    // Equal prefix; a longer best is still beatable.
                    true
                }
            }
        }

        fn rec(&mut self) {
            if !self.prefix_beats_best() {
                return;
            }
            if self.used_count == self.edges.len() {
                let replace = match &self.best {
                    None => true,
                    Some(best) => cmp_classic_codes(&self.code, best) == Ordering::Less,
                };
                if replace {
                    self.best = Some(self.code.clone());
                }
                return;
            }
            let rm = *self.stack.last().unwrap();
            let rm_v = self.order[rm as usize];
            // Backward extensions leave the rightmost vertex, in ascending
            // target order past the last one already coded.
            let min_back = self
                .code
                .iter()
                .rev()
                .take_while(|t| t.from == rm)
                .filter(|t| t.from > t.to)
                .map(|t| t.to)
                .next()
                .unwrap_or(0);
            for &(w, ei) in &self.adj[&rm_v] {
                if self.used[ei] {
                    continue;
                }
                if let Some(&wn) = self.num.get(&w) {
                    if self.stack.contains(&wn) && wn > min_back {
                        self.used[ei] = true;
                        self.used_count += 1;
                        self.code.push(ClassicTuple {
                            from: rm,
                            to: wn,
                            payload: self.edges[ei].2.clone(),
                        });
                        self.rec();
                        self.code.pop();
                        self.used_count -= 1;
                        self.used[ei] = false;
                    }
                }
            }
            // Forward extensions grow from any rightmost-path vertex,
            // implicitly popping everything above it.
            for pos in (0..self.stack.len()).rev() {
                let vn = self.stack[pos];
                let v = self.order[vn as usize];
                for &(w, ei) in &self.adj[&v] {
                    if self.used[ei] || self.num.contains_key(&w) {
                        continue;
                    }
                    let new = self.order.len() as u32;
                    self.used[ei] = true;
                    self.used_count += 1;
                    self.num.insert(w, new);
                    self.order.push(w);
                    let saved: Vec<u32> = self.stack.drain(pos + 1..).collect();
                    self.stack.push(new);
                    self.code.push(ClassicTuple { from: vn, to: new, payload: self.edges[ei].2.clone() });
                    self.rec();
                    self.code.pop();
                    self.stack.pop();
                    self.stack.extend(saved);
                    self.order.pop();
                    self.num.remove(&w);
                    self.used_count -= 1;
                    self.used[ei] = false;
                }
            }
        }
    }

    let mut st = State {
        edges,
        adj: &adj,
        code: Vec::new(),
        order: vec![0],
        num: BTreeMap::new(),
        used: vec![false; edges.len()],
        used_count: 0,
        stack: Vec::new(),
        best: None,
    };
    for (i, &(u, v, ref p)) in edges.iter().enumerate() {
        for (a, b) in [(u, v), (v, u)] {
            st.used[i] = true;
            st.used_count = 1;
            st.num.insert(a, 1);
            st.num.insert(b, 2);
            st.order.push(a);
            st.order.push(b);
            st.stack.push(1);
            st.stack.push(2);
            st.code.push(ClassicTuple { from: 1, to: 2, payload: p.clone() });
            st.rec();
            st.code.pop();
            st.stack.clear();
            st.order.truncate(1);
            st.num.clear();
            st.used_count = 0;
            st.used[i] = false;
        }
    }
    st.best.expect("connected graph has at least one DFS code")
}
