//! Compiling snapshot sequences into transformation sequences and
//! replaying them back.
//!
//! Each transition between consecutive snapshots becomes one interstate
//! of unit edits, emitted in a fixed phase order that keeps every
//! intermediate graph well-formed:
//!
//! 1. vertex insertions, 2. edge insertions, 3. vertex relabels,
//! 4. edge relabels, 5. edge deletions, 6. vertex deletions,
//! ties within a phase broken by target id.
//!
//! Insertions precede edge work so endpoints exist; edge deletions
//! precede vertex deletions so deleted vertices are isolated. The number
//! of rules per transition is exactly the symmetric difference of the
//! element sets plus the label changes, which is the minimum possible
//! since persistent vertex ids pin every element's fate.

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{
    GraphDatabase, GraphSequence, LabeledGraph, Rule, RuleKind, Target, TrDatabase, TrEntry,
    TrSeq,
};

/// How the first snapshot is encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// The first snapshot becomes insertion rules at interstate 1; observed
    /// transition t is interstate t+1. Replay starts from the empty graph.
    #[default]
    EmitInitialInserts,
    /// Only observed transitions are encoded (transition t is interstate
    /// t); the first snapshot is the replay seed and carries no rules.
    AssumeEmptyStart,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::EmitInitialInserts => "emit-initial-inserts",
            Convention::AssumeEmptyStart => "assume-empty-start",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "emit-initial-inserts" => Convention::EmitInitialInserts,
            "assume-empty-start" => Convention::AssumeEmptyStart,
            _ => return None,
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("sequence `{gid}` has no snapshots")]
    Empty { gid: String },
    #[error("sequence `{gid}` step {step}: edge ({u},{v}) references a vertex missing from the step")]
    DanglingEdge { gid: String, step: usize, u: u32, v: u32 },
}

/// Emits the unit edits turning `from` into `to`, in phase order, all at
/// interstate `j` (positions are renumbered by the caller).
fn diff_into(from: &LabeledGraph, to: &LabeledGraph, j: u32, out: &mut Vec<Rule>) {
    for (&v, &l) in &to.vertices {
        if !from.vertices.contains_key(&v) {
            out.push(Rule::vi(v, l, j, 1));
        }
    }
    for (&(u, v), &l) in &to.edges {
        if !from.edges.contains_key(&(u, v)) {
            out.push(Rule::ei(u, v, l, j, 1));
        }
    }
    for (&v, &l) in &to.vertices {
        match from.vertices.get(&v) {
            Some(&old) if old != l => out.push(Rule::vr(v, l, j, 1)),
            _ => {}
        }
    }
    for (&(u, v), &l) in &to.edges {
        match from.edges.get(&(u, v)) {
            Some(&old) if old != l => out.push(Rule::er(u, v, l, j, 1)),
            _ => {}
        }
    }
    for &(u, v) in from.edges.keys() {
        if !to.edges.contains_key(&(u, v)) {
            out.push(Rule::ed(u, v, j, 1));
        }
    }
    for &v in from.vertices.keys() {
        if !to.vertices.contains_key(&v) {
            out.push(Rule::vd(v, j, 1));
        }
    }
}

fn check_sequence(d: &GraphSequence) -> Result<(), CompileError> {
    if d.graphs.is_empty() {
        return Err(CompileError::Empty { gid: d.gid.clone() });
    }
    for (step, g) in d.graphs.iter().enumerate() {
        for &(u, v) in g.edges.keys() {
            if !g.has_vertex(u) || !g.has_vertex(v) {
                return Err(CompileError::DanglingEdge { gid: d.gid.clone(), step: step + 1, u, v });
            }
        }
    }
    Ok(())
}

/// Compiles one snapshot sequence into its transformation sequence.
pub fn compile(d: &GraphSequence, conv: Convention) -> Result<TrSeq, CompileError> {
    check_sequence(d)?;
    let empty = LabeledGraph::new();
    let mut rules = Vec::new();
    let (seed, offset) = match conv {
        Convention::EmitInitialInserts => (&empty, 1),
        Convention::AssumeEmptyStart => (&d.graphs[0], 0),
    };
    if conv == Convention::EmitInitialInserts {
        diff_into(seed, &d.graphs[0], 1, &mut rules);
    }
    for t in 1..d.graphs.len() {
        diff_into(&d.graphs[t - 1], &d.graphs[t], t as u32 + offset, &mut rules);
    }
    let transitions = (d.graphs.len() - 1) as u32 + offset;
    Ok(TrSeq::new(rules, transitions))
}

/// Compiles a whole database, in parallel, preserving order.
pub fn compile_db(db: &GraphDatabase, conv: Convention) -> Result<TrDatabase, CompileError> {
    let entries = db
        .sequences
        .par_iter()
        .map(|d| compile(d, conv).map(|seq| TrEntry { gid: d.gid.clone(), seq }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrDatabase { labels: db.labels.clone(), entries })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("interstate {j} rule {k}: vi on vertex {v} which already exists")]
    VertexExists { j: u32, k: u32, v: u32 },
    #[error("interstate {j} rule {k}: {kind} on missing vertex {v}")]
    VertexMissing { j: u32, k: u32, kind: &'static str, v: u32 },
    #[error("interstate {j} rule {k}: vd on vertex {v} which still has edges")]
    VertexNotIsolated { j: u32, k: u32, v: u32 },
    #[error("interstate {j} rule {k}: vr on vertex {v} keeps its label")]
    RelabelSame { j: u32, k: u32, v: u32 },
    #[error("interstate {j} rule {k}: ei on edge ({u},{v}) which already exists")]
    EdgeExists { j: u32, k: u32, u: u32, v: u32 },
    #[error("interstate {j} rule {k}: {kind} on missing edge ({u},{v})")]
    EdgeMissing { j: u32, k: u32, kind: &'static str, u: u32, v: u32 },
    #[error("interstate {j} rule {k}: ei on edge ({u},{v}) with a missing endpoint")]
    EndpointMissing { j: u32, k: u32, u: u32, v: u32 },
    #[error("interstate {j} rule {k}: er on edge ({u},{v}) keeps its label")]
    EdgeRelabelSame { j: u32, k: u32, u: u32, v: u32 },
}

/// Applies one rule in place, validating applicability.
pub fn apply_rule(g: &mut LabeledGraph, r: &Rule) -> Result<(), ReplayError> {
    let (j, k) = (r.j, r.k);
    match (r.kind, r.target) {
        (RuleKind::VertexInsert, Target::Vertex(v)) => {
            if g.has_vertex(v) {
                return Err(ReplayError::VertexExists { j, k, v });
            }
            g.vertices.insert(v, r.label.unwrap());
        }
        (RuleKind::VertexDelete, Target::Vertex(v)) => {
            if !g.has_vertex(v) {
                return Err(ReplayError::VertexMissing { j, k, kind: "vd", v });
            }
            if g.degree(v) > 0 {
                return Err(ReplayError::VertexNotIsolated { j, k, v });
            }
            g.vertices.remove(&v);
        }
        (RuleKind::VertexRelabel, Target::Vertex(v)) => {
            let Some(slot) = g.vertices.get_mut(&v) else {
                return Err(ReplayError::VertexMissing { j, k, kind: "vr", v });
            };
            if *slot == r.label.unwrap() {
                return Err(ReplayError::RelabelSame { j, k, v });
            }
            *slot = r.label.unwrap();
        }
        (RuleKind::EdgeInsert, Target::Edge(u, v)) => {
            if !g.has_vertex(u) || !g.has_vertex(v) {
                return Err(ReplayError::EndpointMissing { j, k, u, v });
            }
            if g.has_edge(u, v) {
                return Err(ReplayError::EdgeExists { j, k, u, v });
            }
            g.edges.insert((u, v), r.label.unwrap());
        }
        (RuleKind::EdgeDelete, Target::Edge(u, v)) => {
            if g.edges.remove(&(u, v)).is_none() {
                return Err(ReplayError::EdgeMissing { j, k, kind: "ed", u, v });
            }
        }
        (RuleKind::EdgeRelabel, Target::Edge(u, v)) => {
            let Some(slot) = g.edges.get_mut(&(u, v)) else {
                return Err(ReplayError::EdgeMissing { j, k, kind: "er", u, v });
            };
            if *slot == r.label.unwrap() {
                return Err(ReplayError::EdgeRelabelSame { j, k, u, v });
            }
            *slot = r.label.unwrap();
        }
        // Constructors enforce matching target shapes.
        _ => unreachable!("rule target shape mismatches its kind"),
    }
    Ok(())
}

/// Replays a transformation sequence from `g0`.
///
/// Under `AssumeEmptyStart` the result starts with `g0` itself followed
/// by one snapshot per transition; under `EmitInitialInserts` the seed
/// (normally the empty graph) is not part of the sequence and interstate
/// 1 builds the first snapshot.
pub fn decompile(
    s: &TrSeq,
    g0: &LabeledGraph,
    conv: Convention,
) -> Result<GraphSequence, ReplayError> {
    let mut graphs = Vec::with_capacity(s.transitions as usize + 1);
    let mut cur = g0.clone();
    if conv == Convention::AssumeEmptyStart {
        graphs.push(cur.clone());
    }
    let mut next = 1;
    for (j, rules) in s.interstates() {
        // Ruleless transitions repeat the current snapshot.
        for _ in next..j {
            graphs.push(cur.clone());
        }
        for r in rules {
            apply_rule(&mut cur, r)?;
        }
        graphs.push(cur.clone());
        next = j + 1;
    }
    for _ in next..=s.transitions {
        graphs.push(cur.clone());
    }
    Ok(GraphSequence { gid: String::new(), graphs })
}
