use std::collections::BTreeSet;

use gsmine::baseline::{filter_relevant, irrelevance_ratio, mine_all_fts};
use gsmine::reverse::{mine, MinerConfig, Support};
use gsmine::{Label, Rule, TrDatabase, TrEntry, TrSeq};

const A: Label = Label(0);
const B: Label = Label(1);
const C: Label = Label(2);
const X: Label = Label(10);

fn entry(gid: &str, rules: Vec<Rule>, transitions: u32) -> TrEntry {
    TrEntry { gid: gid.to_string(), seq: TrSeq::new(rules, transitions) }
}

fn mirrored_paths() -> TrDatabase {
    let d1 = vec![
        Rule::vi(1, A, 1, 1),
        Rule::vi(2, B, 2, 1),
        Rule::vi(3, A, 3, 1),
        Rule::ei(1, 2, X, 4, 1),
        Rule::ei(2, 3, X, 5, 1),
        Rule::vi(4, C, 6, 1),
    ];
    let d2 = vec![
        Rule::vi(1, B, 1, 1),
        Rule::vi(2, A, 2, 1),
        Rule::vi(3, B, 3, 1),
        Rule::ei(1, 2, X, 4, 1),
        Rule::ei(2, 3, X, 5, 1),
        Rule::vi(4, C, 6, 1),
    ];
    TrDatabase {
        entries: vec![entry("1", d1, 6), entry("2", d2, 6)],
        ..Default::default()
    }
}

fn pattern_set(patterns: &[gsmine::MinedPattern]) -> BTreeSet<(TrSeq, u32)> {
    patterns.iter().map(|p| (p.seq.clone(), p.support)).collect()
}

#[test]
fn relevant_baseline_patterns_match_reverse_miner() {
    let db = mirrored_paths();
    for min_sup in [1, 2] {
        let config =
            MinerConfig { min_support: Support::Absolute(min_sup), ..Default::default() };
        let all_fts = mine_all_fts(&db, &config).expect("no deadline");
        let relevant = filter_relevant(&all_fts.patterns);
        let reverse = mine(&db, &config).expect("no deadline");
        assert_eq!(
            pattern_set(&relevant),
            pattern_set(&reverse.patterns),
            "σ'={min_sup}"
        );
    }
}

#[test]
fn baseline_mines_disconnected_patterns_too() {
    let db = mirrored_paths();
    let config = MinerConfig { min_support: Support::Absolute(2), ..Default::default() };
    let all_fts = mine_all_fts(&db, &config).unwrap();
    // A and C never share a connected component yet co-occur in both
    // sequences, in insertion order.
    let disconnected = TrSeq::pattern(vec![Rule::vi(1, A, 1, 1), Rule::vi(2, C, 2, 1)]);
    assert!(all_fts.patterns.iter().any(|p| p.seq == disconnected && p.support == 2));

    let ratio = irrelevance_ratio(&all_fts.patterns);
    assert!(ratio > 0.0 && ratio < 1.0, "ratio = {ratio}");
    let relevant = filter_relevant(&all_fts.patterns);
    assert_eq!(relevant.len(), 9);
    assert!(all_fts.patterns.len() > 9);
}

#[test]
fn irrelevance_ratio_of_empty_set_is_zero() {
    assert_eq!(irrelevance_ratio(&[]), 0.0);
}

#[test]
fn baseline_respects_rule_cap() {
    let db = mirrored_paths();
    let config = MinerConfig {
        min_support: Support::Absolute(2),
        max_pattern_rules: Some(2),
        ..Default::default()
    };
    let all_fts = mine_all_fts(&db, &config).unwrap();
    assert!(all_fts.patterns.iter().all(|p| p.seq.len() <= 2));
    assert_eq!(filter_relevant(&all_fts.patterns).len(), 7);
}
