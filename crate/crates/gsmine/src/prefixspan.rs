//! PrefixSpan over itemset sequences, generic in the item type.
//!
//! The reverse miner runs this once per skeleton on annotated items, and
//! the single-vertex stage runs it on bare rule descriptors. Support
//! counts distinct `gid`s, so several projected sequences of one data
//! sequence (one per embedding) never inflate a count.

use std::collections::{BTreeMap, BTreeSet};

/// One input sequence. Itemsets are temporal groups; items within an
/// itemset must be sorted ascending and distinct.
#[derive(Debug, Clone)]
pub struct ItemsetSequence<T> {
    /// Index of the owning data sequence; support = distinct gids.
    pub gid: usize,
    pub itemsets: Vec<Vec<T>>,
}

/// A frequent sequential pattern with its gid support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqPattern<T> {
    pub itemsets: Vec<Vec<T>>,
    pub support: u32,
}

/// Mines all sequential patterns with support >= `min_support`.
///
/// `max_items` caps the total item count per pattern (patterns at the cap
/// are emitted but not grown). Every candidate whose support is counted,
/// frequent or not, bumps `candidates`. Output order is the depth-first
/// growth order and is deterministic.
pub fn prefixspan<T: Ord + Clone>(
    seqs: &[ItemsetSequence<T>],
    min_support: u32,
    max_items: Option<usize>,
    candidates: &mut u64,
) -> Vec<SeqPattern<T>> {
    let mut run = Run { seqs, min_support, max_items, candidates, out: Vec::new(), prefix: Vec::new() };
    if min_support > 0 && max_items != Some(0) {
        let root: Vec<Projection> =
            (0..seqs.len()).map(|i| Projection { seq: i, ptrs: Vec::new() }).collect();
        run.grow(&root);
    }
    run.out
}

/// Where the current prefix matches inside one input sequence: indices of
/// the itemsets holding its last itemset, everything before matched.
struct Projection {
    seq: usize,
    ptrs: Vec<usize>,
}

struct Run<'a, T> {
    seqs: &'a [ItemsetSequence<T>],
    min_support: u32,
    max_items: Option<usize>,
    candidates: &'a mut u64,
    out: Vec<SeqPattern<T>>,
    prefix: Vec<Vec<T>>,
}

impl<T: Ord + Clone> Run<'_, T> {
    fn grow(&mut self, proj: &[Projection]) {
        let items_so_far: usize = self.prefix.iter().map(Vec::len).sum();
        if self.max_items.is_some_and(|m| items_so_far >= m) {
            return;
        }
        // Candidate items with their supporting gid sets. An i-extension
        // joins the last prefix itemset (so it sorts after that itemset's
        // max); an s-extension opens a new itemset strictly later.
        let mut i_cand: BTreeMap<T, BTreeSet<usize>> = BTreeMap::new();
        let mut s_cand: BTreeMap<T, BTreeSet<usize>> = BTreeMap::new();
        let last_item = self.prefix.last().map(|is| is.last().unwrap().clone());
        for p in proj {
            let seq = &self.seqs[p.seq];
            if let Some(last) = &last_item {
                for &i in &p.ptrs {
                    for x in &seq.itemsets[i] {
                        if x > last {
                            i_cand.entry(x.clone()).or_default().insert(seq.gid);
                        }
                    }
                }
            }
            for itemset in &seq.itemsets[Self::scan_from(p)..] {
                for x in itemset {
                    s_cand.entry(x.clone()).or_default().insert(seq.gid);
                }
            }
        }
        *self.candidates += (i_cand.len() + s_cand.len()) as u64;

        for (x, gids) in i_cand {
            if (gids.len() as u32) < self.min_support {
                continue;
            }
            let next: Vec<Projection> = proj
                .iter()
                .filter_map(|p| {
                    let keep: Vec<usize> = p
                        .ptrs
                        .iter()
                        .copied()
                        .filter(|&i| self.seqs[p.seq].itemsets[i].binary_search(&x).is_ok())
                        .collect();
                    (!keep.is_empty()).then_some(Projection { seq: p.seq, ptrs: keep })
                })
                .collect();
            self.prefix.last_mut().unwrap().push(x);
            self.out.push(SeqPattern { itemsets: self.prefix.clone(), support: gids.len() as u32 });
            self.grow(&next);
            self.prefix.last_mut().unwrap().pop();
        }

        for (x, gids) in s_cand {
            if (gids.len() as u32) < self.min_support {
                continue;
            }
            let next: Vec<Projection> = proj
                .iter()
                .filter_map(|p| {
                    let seq = &self.seqs[p.seq];
                    let keep: Vec<usize> = (Self::scan_from(p)..seq.itemsets.len())
                        .filter(|&i| seq.itemsets[i].binary_search(&x).is_ok())
                        .collect();
                    (!keep.is_empty()).then_some(Projection { seq: p.seq, ptrs: keep })
                })
                .collect();
            self.prefix.push(vec![x]);
            self.out.push(SeqPattern { itemsets: self.prefix.clone(), support: gids.len() as u32 });
            self.grow(&next);
            self.prefix.pop();
        }
    }

    /// First itemset index an s-extension may land in. The root prefix
    /// (no pointers) may start anywhere.
    fn scan_from(p: &Projection) -> usize {
        p.ptrs.iter().min().map_or(0, |&i| i + 1)
    }
}
