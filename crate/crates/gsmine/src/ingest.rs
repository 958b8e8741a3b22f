//! Turning timestamped edge logs into snapshot-sequence databases.
//!
//! Input is CSV with header `time,src,dst,elabel` plus optional
//! `srclabel,dstlabel` columns. Time is RFC 3339 (`2001-05-14T10:30:00Z`,
//! offsets and fractional seconds accepted) or a plain integer of
//! seconds. The log is cut into windows of `window` seconds from the
//! earliest record; each window becomes one sequence whose snapshots are
//! its `snap`-second sub-intervals. A window's vertex set is every id
//! seen in it (present in all of its snapshots, so ids persist); an edge
//! is present in a snapshot iff some record falls in that sub-interval.
//!
//! Malformed records are skipped and reported, never fatal.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{edge_key, GraphDatabase, GraphSequence, Label, LabeledGraph, VertexId};

pub const DEFAULT_VERTEX_LABEL: &str = "v";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("empty input: missing header row")]
    MissingHeader,
    #[error("header must be time,src,dst,elabel[,srclabel,dstlabel], got `{0}`")]
    BadHeader(String),
    #[error("window and snap must be positive")]
    BadWindow,
}

/// One skipped record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRecord {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone)]
pub struct IngestReport {
    pub records: usize,
    pub skipped: Vec<SkippedRecord>,
}

/// Days from 1970-01-01 to the given civil date (proleptic Gregorian).
fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp as i64 + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

fn is_leap(y: i64) -> bool {
    y % 4 == 0 && (y % 100 != 0 || y % 400 == 0)
}

fn days_in_month(y: i64, m: u32) -> u32 {
    match m {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap(y) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

/// Parses an RFC 3339 timestamp or a bare integer into epoch seconds.
/// Fractional seconds are truncated.
pub fn parse_time(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(secs) = s.parse::<i64>() {
        return Some(secs);
    }
    // YYYY-MM-DDThh:mm:ss[.frac](Z|±hh:mm)
    let bytes = s.as_bytes();
    if bytes.len() < 20 {
        return None;
    }
    let year: i64 = s.get(0..4)?.parse().ok()?;
    if bytes[4] != b'-' || bytes[7] != b'-' {
        return None;
    }
    let month: u32 = s.get(5..7)?.parse().ok()?;
    let day: u32 = s.get(8..10)?.parse().ok()?;
    if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
        return None;
    }
    if bytes[10] != b'T' && bytes[10] != b't' && bytes[10] != b' ' {
        return None;
    }
    let hour: i64 = s.get(11..13)?.parse().ok()?;
    let minute: i64 = s.get(14..16)?.parse().ok()?;
    let second: i64 = s.get(17..19)?.parse().ok()?;
    if bytes[13] != b':' || bytes[16] != b':' || hour > 23 || minute > 59 || second > 60 {
        return None;
    }
    let mut rest = &s[19..];
    if rest.starts_with('.') {
        let digits = rest[1..].chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return None;
        }
        rest = &rest[1 + digits..];
    }
    let offset_secs: i64 = match rest {
        "Z" | "z" => 0,
        _ => {
            let sign = match rest.chars().next()? {
                '+' => 1,
                '-' => -1,
                _ => return None,
            };
            if rest.len() != 6 || rest.as_bytes()[3] != b':' {
                return None;
            }
            let oh: i64 = rest.get(1..3)?.parse().ok()?;
            let om: i64 = rest.get(4..6)?.parse().ok()?;
            if oh > 23 || om > 59 {
                return None;
            }
            sign * (oh * 3600 + om * 60)
        }
    };
    let days = days_from_civil(year, month, day);
    Some(days * 86400 + hour * 3600 + minute * 60 + second - offset_secs)
}

struct Record {
    line: usize,
    time: i64,
    src: VertexId,
    dst: VertexId,
    elabel: String,
    srclabel: Option<String>,
    dstlabel: Option<String>,
}

/// Ingests an edge log, cutting it into `window`-second sequences of
/// `snap`-second snapshots.
pub fn ingest_edge_log(
    text: &str,
    window: u64,
    snap: u64,
) -> Result<(GraphDatabase, IngestReport), IngestError> {
    if window == 0 || snap == 0 || snap > window {
        return Err(IngestError::BadWindow);
    }
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
            Some((_, l)) => break l,
            None => return Err(IngestError::MissingHeader),
        }
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let with_vlabels = match cols.as_slice() {
        ["time", "src", "dst", "elabel"] => false,
        ["time", "src", "dst", "elabel", "srclabel", "dstlabel"] => true,
        _ => return Err(IngestError::BadHeader(header.to_owned())),
    };
    let ncols = if with_vlabels { 6 } else { 4 };

    let mut skipped = Vec::new();
    let mut records: Vec<Record> = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        let mut skip = |msg: String| skipped.push(SkippedRecord { line, msg });
        if fields.len() != ncols {
            skip(format!("expected {ncols} fields, got {}", fields.len()));
            continue;
        }
        let Some(time) = parse_time(fields[0]) else {
            skip(format!("bad time `{}`", fields[0]));
            continue;
        };
        let (Ok(src), Ok(dst)) = (fields[1].parse::<VertexId>(), fields[2].parse::<VertexId>())
        else {
            skip(format!("endpoints must be non-negative integers, got `{},{}`", fields[1], fields[2]));
            continue;
        };
        if src == dst {
            skip(format!("self loop on {src}"));
            continue;
        }
        if fields[3].is_empty() || fields[3] == "-" {
            skip(format!("bad edge label `{}`", fields[3]));
            continue;
        }
        let vlabel = |f: &str| {
            if f.is_empty() {
                None
            } else {
                Some(f.to_owned())
            }
        };
        records.push(Record {
            line,
            time,
            src,
            dst,
            elabel: fields[3].to_owned(),
            srclabel: if with_vlabels { vlabel(fields[4]) } else { None },
            dstlabel: if with_vlabels { vlabel(fields[5]) } else { None },
        });
    }

    let mut db = GraphDatabase::default();
    let report_records = records.len();
    if records.is_empty() {
        return Ok((db, IngestReport { records: 0, skipped }));
    }
    records.sort_by_key(|r| (r.time, r.line));
    let t0 = records[0].time;
    let snaps_per_window = window.div_ceil(snap) as usize;
    let default_label = db.labels.intern(DEFAULT_VERTEX_LABEL);

    // window index -> (vertex labels, per-snapshot edge sets)
    let mut windows: BTreeMap<u64, (BTreeMap<VertexId, Label>, Vec<BTreeMap<(u32, u32), Label>>)> =
        BTreeMap::new();
    for r in &records {
        let rel = (r.time - t0) as u64;
        let w = rel / window;
        let s = ((rel % window) / snap) as usize;
        let (vertices, snaps) = windows
            .entry(w)
            .or_insert_with(|| (BTreeMap::new(), vec![BTreeMap::new(); snaps_per_window]));
        for (v, lab) in [(r.src, &r.srclabel), (r.dst, &r.dstlabel)] {
            let label = lab
                .as_deref()
                .map(|name| db.labels.intern(name))
                .unwrap_or(default_label);
            // First record naming a vertex fixes its label for the window.
            vertices.entry(v).or_insert(label);
        }
        let elabel = db.labels.intern(&r.elabel);
        snaps[s].entry(edge_key(r.src, r.dst)).or_insert(elabel);
    }

    for (w, (vertices, snaps)) in windows {
        let graphs = snaps
            .into_iter()
            .map(|edges| LabeledGraph { vertices: vertices.clone(), edges })
            .collect();
        db.sequences.push(GraphSequence { gid: format!("w{w}"), graphs });
    }
    Ok((db, IngestReport { records: report_records, skipped }))
}
