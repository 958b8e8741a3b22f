use std::time::Instant;

use gsmine::baseline::{irrelevance_ratio, mine_all_fts};
use gsmine::compile::{compile_db, Convention};
use gsmine::datagen::{generate, GeneratorConfig};
use gsmine::reverse::{mine, MinerConfig, Support};

#[test]
fn probe() {
    let cases = [
        (20u32, 4u32, 1u32, 8u32, 3u32),
        (30, 4, 1, 10, 4),
        (50, 4, 1, 10, 4),
        (50, 3, 1, 8, 4),
        (16, 5, 2, 8, 3),
        (12, 5, 2, 6, 3),
    ];
    for (i, &(db_size, v_avg, d_ist, labels, sigma)) in cases.iter().enumerate() {
        let config = GeneratorConfig {
            db_size,
            v_avg,
            d_ist,
            n_labels_v: labels,
            n_labels_e: labels,
            v_embed_avg: 2,
            n_embedded: 6,
            seed: 1000 + i as u64,
            ..Default::default()
        };
        eprintln!("case {i}: generating");
        let (gdb, _planted) = generate(&config).unwrap();
        let tdb = compile_db(&gdb, Convention::EmitInitialInserts).unwrap();
        let rules: usize = tdb.entries.iter().map(|e| e.seq.len()).sum();
        let max_rules = tdb.entries.iter().map(|e| e.seq.len()).max().unwrap();
        let mc = MinerConfig {
            min_support: Support::Absolute(sigma),
            max_pattern_rules: Some(6),
            ..Default::default()
        };
        eprintln!("case {i}: rules={rules} max={max_rules}, reverse mining");
        let t0 = Instant::now();
        let rev = mine(&tdb, &mc).unwrap();
        let t_rev = t0.elapsed();
        eprintln!("case {i}: baseline mining");
        let t0 = Instant::now();
        let base = mine_all_fts(&tdb, &mc).unwrap();
        let t_base = t0.elapsed();
        eprintln!(
            "case {i}: db={db_size} v={v_avg} d={d_ist} L={labels} s={sigma} rules={rules} | rev {t_rev:?} ({} pats, {} cand) | base {t_base:?} ({} pats, {} cand)",
            rev.patterns.len(),
            rev.candidates,
            base.patterns.len(),
            base.candidates
        );
    }
}

#[test]
#[ignore]
fn probe_bench() {
    for cap in [3usize, 4] {
        let config = GeneratorConfig { db_size: 200, v_avg: 5, seed: 9, ..Default::default() };
        eprintln!("cap {cap}: generating");
        let (gdb, _planted) = generate(&config).unwrap();
        let tdb = compile_db(&gdb, Convention::EmitInitialInserts).unwrap();
        let rules: usize = tdb.entries.iter().map(|e| e.seq.len()).sum();
        let mc = MinerConfig {
            min_support: Support::Fraction(0.10),
            max_pattern_rules: Some(cap),
            ..Default::default()
        };
        eprintln!("cap {cap}: rules={rules}, reverse mining");
        let t0 = Instant::now();
        let rev = mine(&tdb, &mc).unwrap();
        let t_rev = t0.elapsed();
        eprintln!("cap {cap}: reverse done {t_rev:?}, baseline mining");
        let t0 = Instant::now();
        let base = mine_all_fts(&tdb, &mc).unwrap();
        let t_base = t0.elapsed();
        eprintln!(
            "cap {cap}: rev {t_rev:?} ({} pats, {} cand) | base {t_base:?} ({} pats, {} cand, irr {:.3})",
            rev.patterns.len(),
            rev.candidates,
            base.patterns.len(),
            base.candidates,
            irrelevance_ratio(&base.patterns)
        );
    }
}
