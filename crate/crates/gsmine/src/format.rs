//! Text formats for graph sequences (.gsq), transformation sequences
//! (.tsq), and mined patterns (.pat).
//!
//! Shared conventions: one record per line, whitespace-separated tokens,
//! `#` starts a comment, blank lines are ignored (except between .pat
//! blocks, where they separate patterns). Labels and gids are bare tokens;
//! `-` is reserved for the deletion dummy and `#` cannot appear in names.
//!
//! .gsq — snapshot sequences:
//! ```text
//! gid <id>
//! t 1
//! v <vertex> <label>
//! e <vertex> <vertex> <label>
//! t 2
//! ...
//! end
//! ```
//!
//! .tsq — transformation sequences; `n <transitions>` is optional and
//! only needed when trailing transitions change nothing:
//! ```text
//! gid <id>
//! n 3
//! <kind> <j> <k> <target> <label>
//! end
//! ```
//! where `<kind>` is vi/vd/vr/ei/ed/er, targets are `<v>` for vertex
//! rules and `<u>,<v>` for edge rules, and the label is `-` exactly for
//! vd/ed.
//!
//! .pat — pattern blocks separated by blank lines, each ending with a
//! `support <count>` line:
//! ```text
//! vi 1 1 1 A
//! ei 2 1 1,2 x
//! support 2
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::matcher::MinedPattern;
use crate::model::{
    DisplayRule, GraphDatabase, GraphSequence, LabeledGraph, Labels, Rule, RuleKind, Target,
    TrDatabase, TrEntry, TrSeq,
};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError { line, msg: msg.into() }
    }
}

/// Lines with comments stripped, keeping 1-based line numbers. Blank
/// lines are kept (as empty token lists) so .pat can use them.
fn tokenize(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let body = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            (i + 1, body.split_whitespace().collect())
        })
        .collect()
}

fn parse_u32(tok: &str, line: usize, what: &str) -> Result<u32, ParseError> {
    tok.parse::<u32>()
        .map_err(|_| ParseError::new(line, format!("{what} must be a non-negative integer, got `{tok}`")))
}

fn check_name(tok: &str, line: usize, what: &str) -> Result<(), ParseError> {
    if tok == "-" {
        return Err(ParseError::new(line, format!("`-` is reserved and cannot be used as a {what}")));
    }
    Ok(())
}

/// Parses a rule line `<kind> <j> <k> <target> <label>`.
fn parse_rule_line(
    toks: &[&str],
    line: usize,
    labels: &mut Labels,
) -> Result<Rule, ParseError> {
    let kind = RuleKind::from_mnemonic(toks[0])
        .ok_or_else(|| ParseError::new(line, format!("unknown rule kind `{}`", toks[0])))?;
    if toks.len() != 5 {
        return Err(ParseError::new(
            line,
            format!("rule line needs 5 tokens `kind j k target label`, got {}", toks.len()),
        ));
    }
    let j = parse_u32(toks[1], line, "interstate j")?;
    let k = parse_u32(toks[2], line, "position k")?;
    if j == 0 || k == 0 {
        return Err(ParseError::new(line, "interstate and position are 1-based"));
    }
    let target = if kind.is_edge() {
        let (a, b) = toks[3]
            .split_once(',')
            .ok_or_else(|| ParseError::new(line, format!("edge target must be `u,v`, got `{}`", toks[3])))?;
        let u = parse_u32(a, line, "edge endpoint")?;
        let v = parse_u32(b, line, "edge endpoint")?;
        if u == v {
            return Err(ParseError::new(line, "self loops are not allowed"));
        }
        Target::edge(u, v)
    } else {
        if toks[3].contains(',') {
            return Err(ParseError::new(line, format!("vertex rule takes a vertex target, got `{}`", toks[3])));
        }
        Target::Vertex(parse_u32(toks[3], line, "vertex target")?)
    };
    let label = if kind.takes_label() {
        check_name(toks[4], line, "label")?;
        Some(labels.intern(toks[4]))
    } else {
        if toks[4] != "-" {
            return Err(ParseError::new(
                line,
                format!("{} carries the dummy label, expected `-`, got `{}`", kind.mnemonic(), toks[4]),
            ));
        }
        None
    };
    Ok(Rule::new(kind, target, label, j, k))
}

/// Rejects two rules touching the same element in one interstate; data
/// produced by compilation never does, and allowing it would make
/// itemset matching ambiguous.
fn check_distinct_elements(rules: &[Rule], line: usize) -> Result<(), ParseError> {
    let mut seen = std::collections::HashSet::new();
    for r in rules {
        if !seen.insert((r.j, r.target)) {
            return Err(ParseError::new(
                line,
                format!("two rules touch the same element at interstate {}", r.j),
            ));
        }
    }
    Ok(())
}

/// Parses a .gsq snapshot-sequence database.
pub fn parse_gsq(text: &str) -> Result<GraphDatabase, ParseError> {
    let mut db = GraphDatabase::default();
    let mut gids = std::collections::HashSet::new();
    let mut cur: Option<(usize, GraphSequence)> = None;
    let mut cur_t: u32 = 0;
    for (line, toks) in tokenize(text) {
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "gid" => {
                if cur.is_some() {
                    return Err(ParseError::new(line, "previous sequence not closed with `end`"));
                }
                if toks.len() != 2 {
                    return Err(ParseError::new(line, "usage: gid <id>"));
                }
                check_name(toks[1], line, "gid")?;
                if !gids.insert(toks[1].to_owned()) {
                    return Err(ParseError::new(line, format!("duplicate gid `{}`", toks[1])));
                }
                cur = Some((line, GraphSequence { gid: toks[1].to_owned(), graphs: Vec::new() }));
                cur_t = 0;
            }
            "t" => {
                let Some((_, seq)) = cur.as_mut() else {
                    return Err(ParseError::new(line, "`t` outside a sequence (missing `gid`)"));
                };
                if toks.len() != 2 {
                    return Err(ParseError::new(line, "usage: t <step>"));
                }
                let t = parse_u32(toks[1], line, "step")?;
                if t != cur_t + 1 {
                    return Err(ParseError::new(
                        line,
                        format!("steps must be consecutive from 1, expected {}, got {t}", cur_t + 1),
                    ));
                }
                cur_t = t;
                seq.graphs.push(LabeledGraph::new());
            }
            "v" => {
                let Some((_, seq)) = cur.as_mut() else {
                    return Err(ParseError::new(line, "`v` outside a sequence"));
                };
                let Some(g) = seq.graphs.last_mut() else {
                    return Err(ParseError::new(line, "`v` before the first `t` step"));
                };
                if toks.len() != 3 {
                    return Err(ParseError::new(line, "usage: v <vertex> <label>"));
                }
                let v = parse_u32(toks[1], line, "vertex")?;
                check_name(toks[2], line, "label")?;
                if g.has_vertex(v) {
                    return Err(ParseError::new(line, format!("vertex {v} already in this step")));
                }
                g.add_vertex(v, db.labels.intern(toks[2]));
            }
            "e" => {
                let Some((_, seq)) = cur.as_mut() else {
                    return Err(ParseError::new(line, "`e` outside a sequence"));
                };
                let Some(g) = seq.graphs.last_mut() else {
                    return Err(ParseError::new(line, "`e` before the first `t` step"));
                };
                if toks.len() != 4 {
                    return Err(ParseError::new(line, "usage: e <vertex> <vertex> <label>"));
                }
                let u = parse_u32(toks[1], line, "vertex")?;
                let v = parse_u32(toks[2], line, "vertex")?;
                check_name(toks[3], line, "label")?;
                if u == v {
                    return Err(ParseError::new(line, "self loops are not allowed"));
                }
                if !g.has_vertex(u) || !g.has_vertex(v) {
                    return Err(ParseError::new(line, format!("edge ({u},{v}) references a vertex missing from this step")));
                }
                if g.has_edge(u, v) {
                    return Err(ParseError::new(line, format!("edge ({u},{v}) already in this step")));
                }
                g.add_edge(u, v, db.labels.intern(toks[3]));
            }
            "end" => {
                let Some((start, seq)) = cur.take() else {
                    return Err(ParseError::new(line, "`end` without an open sequence"));
                };
                if seq.graphs.is_empty() {
                    return Err(ParseError::new(start, format!("sequence `{}` has no steps", seq.gid)));
                }
                db.sequences.push(seq);
            }
            other => {
                return Err(ParseError::new(line, format!("unknown directive `{other}`")));
            }
        }
    }
    if let Some((start, seq)) = cur {
        return Err(ParseError::new(start, format!("sequence `{}` not closed with `end`", seq.gid)));
    }
    Ok(db)
}

/// Serializes a snapshot-sequence database to .gsq text.
pub fn write_gsq(db: &GraphDatabase) -> String {
    let mut out = String::new();
    for seq in &db.sequences {
        writeln!(out, "gid {}", seq.gid).unwrap();
        for (i, g) in seq.graphs.iter().enumerate() {
            writeln!(out, "t {}", i + 1).unwrap();
            for (&v, &l) in &g.vertices {
                writeln!(out, "v {} {}", v, db.labels.name(l)).unwrap();
            }
            for (&(u, v), &l) in &g.edges {
                writeln!(out, "e {} {} {}", u, v, db.labels.name(l)).unwrap();
            }
        }
        writeln!(out, "end").unwrap();
    }
    out
}

/// Parses a .tsq transformation-sequence database.
pub fn parse_tsq(text: &str) -> Result<TrDatabase, ParseError> {
    let mut db = TrDatabase::default();
    let mut gids = std::collections::HashSet::new();
    let mut cur: Option<(usize, String, Option<u32>, Vec<Rule>)> = None;
    for (line, toks) in tokenize(text) {
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "gid" => {
                if cur.is_some() {
                    return Err(ParseError::new(line, "previous sequence not closed with `end`"));
                }
                if toks.len() != 2 {
                    return Err(ParseError::new(line, "usage: gid <id>"));
                }
                check_name(toks[1], line, "gid")?;
                if !gids.insert(toks[1].to_owned()) {
                    return Err(ParseError::new(line, format!("duplicate gid `{}`", toks[1])));
                }
                cur = Some((line, toks[1].to_owned(), None, Vec::new()));
            }
            "n" => {
                let Some((_, _, n, rules)) = cur.as_mut() else {
                    return Err(ParseError::new(line, "`n` outside a sequence"));
                };
                if toks.len() != 2 {
                    return Err(ParseError::new(line, "usage: n <transitions>"));
                }
                if n.is_some() || !rules.is_empty() {
                    return Err(ParseError::new(line, "`n` must appear once, before any rule"));
                }
                *n = Some(parse_u32(toks[1], line, "transition count")?);
            }
            "end" => {
                let Some((start, gid, n, rules)) = cur.take() else {
                    return Err(ParseError::new(line, "`end` without an open sequence"));
                };
                check_distinct_elements(&rules, start)?;
                let max_j = rules.iter().map(|r| r.j).max().unwrap_or(0);
                if let Some(n) = n {
                    if n < max_j {
                        return Err(ParseError::new(
                            start,
                            format!("sequence `{gid}` declares {n} transitions but uses interstate {max_j}"),
                        ));
                    }
                }
                let mut sorted = rules;
                sorted.sort_by_key(|r| (r.j, r.k));
                db.entries.push(TrEntry { gid, seq: TrSeq::new(sorted, n.unwrap_or(max_j)) });
            }
            _ => {
                let Some((_, _, _, rules)) = cur.as_mut() else {
                    return Err(ParseError::new(line, "rule outside a sequence (missing `gid`)"));
                };
                rules.push(parse_rule_line(&toks, line, &mut db.labels)?);
            }
        }
    }
    if let Some((start, gid, ..)) = cur {
        return Err(ParseError::new(start, format!("sequence `{gid}` not closed with `end`")));
    }
    Ok(db)
}

/// Serializes a transformation-sequence database to .tsq text.
pub fn write_tsq(db: &TrDatabase) -> String {
    let mut out = String::new();
    for entry in &db.entries {
        writeln!(out, "gid {}", entry.gid).unwrap();
        if entry.seq.transitions > entry.seq.max_rule_interstate() {
            writeln!(out, "n {}", entry.seq.transitions).unwrap();
        }
        for r in &entry.seq.rules {
            writeln!(out, "{}", DisplayRule { rule: r, labels: &db.labels }).unwrap();
        }
        writeln!(out, "end").unwrap();
    }
    out
}

/// Parses a .pat pattern file, interning labels into `labels`.
pub fn parse_pat(text: &str, labels: &mut Labels) -> Result<Vec<MinedPattern>, ParseError> {
    let mut patterns = Vec::new();
    let mut rules: Vec<Rule> = Vec::new();
    let mut rules_start = 0usize;
    for (line, toks) in tokenize(text) {
        if toks.is_empty() {
            continue;
        }
        if toks[0] == "support" {
            if toks.len() != 2 {
                return Err(ParseError::new(line, "usage: support <count>"));
            }
            if rules.is_empty() {
                return Err(ParseError::new(line, "pattern block without rules"));
            }
            let support = parse_u32(toks[1], line, "support")?;
            check_distinct_elements(&rules, rules_start)?;
            let mut sorted = std::mem::take(&mut rules);
            sorted.sort_by_key(|r| (r.j, r.k));
            patterns.push(MinedPattern { seq: TrSeq::pattern(sorted), support });
        } else {
            if rules.is_empty() {
                rules_start = line;
            }
            rules.push(parse_rule_line(&toks, line, labels)?);
        }
    }
    if !rules.is_empty() {
        return Err(ParseError::new(rules_start, "pattern block missing its `support` line"));
    }
    Ok(patterns)
}

/// Serializes patterns to .pat text, one blank-line-separated block each.
pub fn write_pat(patterns: &[MinedPattern], labels: &Labels) -> String {
    let mut out = String::new();
    for (i, p) in patterns.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for r in &p.seq.rules {
            writeln!(out, "{}", DisplayRule { rule: r, labels }).unwrap();
        }
        writeln!(out, "support {}", p.support).unwrap();
    }
    out
}
