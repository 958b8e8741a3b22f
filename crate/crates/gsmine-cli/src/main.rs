//! Command line surface for the gsmine library.
//!
//! Exit codes: 0 success, 1 usage, 2 malformed input or I/O failure,
//! 3 verification mismatch, 4 miner timeout (partial results written).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gsmine::baseline;
use gsmine::compile::{compile_db, Convention};
use gsmine::datagen::{generate, GeneratorConfig, RNG_SCHEME};
use gsmine::format::{parse_gsq, parse_pat, parse_tsq, write_gsq, write_pat, write_tsq};
use gsmine::ingest::ingest_edge_log;
use gsmine::model::{is_relevant, TrDatabase, TrEntry};
use gsmine::reverse::{self, MineTimeout, MinerConfig, Support};
use gsmine::{Labels, MinedPattern};

#[derive(Parser)]
#[command(
    name = "gsmine",
    version,
    about = "Mine relevant frequent transformation subsequences from graph-sequence databases"
)]
struct Cli {
    /// Worker threads (default: all cores); results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a snapshot database (.gsq) into transformation sequences (.tsq).
    Compile {
        /// Input .gsq file.
        input: PathBuf,
        /// Output .tsq file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Mine frequent transformation subsequences into a .pat file.
    Mine(MineArgs),
    /// Mine with both algorithms and compare their relevant-pattern sets.
    Verify {
        /// Input .gsq or .tsq file.
        input: PathBuf,
        #[command(flatten)]
        mining: MiningOpts,
    },
    /// Generate a seeded synthetic database with planted patterns.
    Gen(GenArgs),
    /// Cut a timestamped edge log (CSV) into a snapshot database.
    Ingest {
        /// Input CSV with header time,src,dst,elabel[,srclabel,dstlabel].
        input: PathBuf,
        /// Sequence length, e.g. 3600, 60m, or 24h.
        #[arg(long, value_parser = parse_duration)]
        window: u64,
        /// Snapshot length; must divide into the window.
        #[arg(long, value_parser = parse_duration)]
        snap: u64,
        /// Output .gsq file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run both miners over a parameter grid and print CSV to stdout.
    Bench(BenchArgs),
    /// Summarize a .pat file: count, length histogram, irrelevance ratio.
    Stats {
        /// Input .pat file.
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Reverse,
    Baseline,
}

#[derive(Args)]
struct MiningOpts {
    /// Minimum support: a count (2), a fraction (0.1), or a percentage (10%).
    #[arg(long = "min-sup", value_parser = parse_min_sup)]
    min_sup: Support,
    /// Hard cap on rules per pattern.
    #[arg(long)]
    max_rules: Option<usize>,
    /// Abort mining after this many seconds, keeping partial results.
    #[arg(long)]
    timeout: Option<f64>,
}

impl MiningOpts {
    fn miner_config(&self) -> MinerConfig {
        MinerConfig {
            min_support: self.min_sup,
            max_pattern_rules: self.max_rules,
            deadline: self.timeout.map(|s| Instant::now() + Duration::from_secs_f64(s)),
            ..MinerConfig::default()
        }
    }
}

#[derive(Args)]
struct MineArgs {
    /// Input .gsq or .tsq file.
    input: PathBuf,
    #[command(flatten)]
    mining: MiningOpts,
    /// Mining algorithm.
    #[arg(long, value_enum, default_value = "reverse")]
    algo: Algo,
    /// With --algo baseline, keep irrelevant patterns in the output.
    #[arg(long)]
    all_fts: bool,
    /// Output .pat file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Probability that an edit inserts.
    #[arg(long, default_value_t = 0.8)]
    pi: f64,
    /// Probability that an edit deletes.
    #[arg(long, default_value_t = 0.1)]
    pd: f64,
    /// Average distinct vertex IDs per sequence.
    #[arg(long, default_value_t = 6)]
    vavg: u32,
    /// Average distinct vertex IDs per planted pattern.
    #[arg(long, default_value_t = 3)]
    vembed: u32,
    /// Vertex label alphabet size.
    #[arg(long, default_value_t = 5)]
    lv: u32,
    /// Edge label alphabet size.
    #[arg(long, default_value_t = 5)]
    le: u32,
    /// Number of planted patterns.
    #[arg(long, default_value_t = 10)]
    n: u32,
    /// Number of sequences.
    #[arg(long, default_value_t = 1000)]
    db: u32,
    /// Edge probability of the initial snapshot.
    #[arg(long, default_value_t = 0.15)]
    pe: f64,
    /// Edits per transition.
    #[arg(long, default_value_t = 2)]
    dist: u32,
    /// RNG seed; output is byte-stable per seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output .gsq file.
    #[arg(short, long)]
    output: PathBuf,
    /// Sidecar .tsq file of the planted patterns.
    #[arg(long)]
    planted: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Minimum supports to sweep, comma separated (counts, fractions, or percentages).
    #[arg(long = "min-sup", value_delimiter = ',', default_value = "0.1")]
    min_sup: Vec<String>,
    /// Database sizes to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100")]
    db: Vec<u32>,
    /// Average vertex-ID counts to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    vavg: Vec<u32>,
    /// RNG seed for the generated corpora.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hard cap on rules per pattern.
    #[arg(long)]
    max_rules: Option<usize>,
    /// Per-cell timeout in seconds; timed-out cells report partial counts.
    #[arg(long)]
    timeout: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Compile { input, output } => cmd_compile(&input, &output),
        Command::Mine(args) => cmd_mine(&args),
        Command::Verify { input, mining } => cmd_verify(&input, &mining),
        Command::Gen(args) => cmd_gen(&args),
        Command::Ingest { input, window, snap, output } => {
            cmd_ingest(&input, window, snap, &output)
        }
        Command::Bench(args) => cmd_bench(&args),
        Command::Stats { input } => cmd_stats(&input),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Loads a database either as snapshots (.gsq, compiled on the fly) or
/// as ready transformation sequences (.tsq).
fn load_db(path: &Path) -> Result<TrDatabase> {
    let text = read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("gsq") => {
            let db = parse_gsq(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            compile_db(&db, Convention::EmitInitialInserts)
                .map_err(|e| anyhow!("{}: {e}", path.display()))
        }
        Some("tsq") => parse_tsq(&text).map_err(|e| anyhow!("{}: {e}", path.display())),
        _ => bail!("{}: expected a .gsq or .tsq file", path.display()),
    }
}

fn cmd_compile(input: &Path, output: &Path) -> Result<u8> {
    let text = read(input)?;
    let db = parse_gsq(&text).map_err(|e| anyhow!("{}: {e}", input.display()))?;
    let trdb = compile_db(&db, Convention::EmitInitialInserts)
        .map_err(|e| anyhow!("{}: {e}", input.display()))?;
    write(output, &write_tsq(&trdb))?;
    println!("compiled {} sequences", trdb.entries.len());
    Ok(0)
}

fn cmd_mine(args: &MineArgs) -> Result<u8> {
    let db = load_db(&args.input)?;
    let config = args.mining.miner_config();
    let started = Instant::now();
    let (result, algo) = match args.algo {
        Algo::Reverse => (reverse::mine(&db, &config), "reverse"),
        Algo::Baseline => (baseline::mine_all_fts(&db, &config), "baseline"),
    };
    let (outcome, timed_out) = match result {
        Ok(outcome) => (outcome, false),
        Err(MineTimeout { partial }) => (partial, true),
    };
    let patterns = match args.algo {
        Algo::Baseline if !args.all_fts => baseline::filter_relevant(&outcome.patterns),
        _ => outcome.patterns.clone(),
    };
    write(&args.output, &write_pat(&patterns, &db.labels))?;
    println!(
        "{algo}: {} patterns, {} candidates, {} ms",
        patterns.len(),
        outcome.candidates,
        started.elapsed().as_millis()
    );
    if timed_out {
        eprintln!("timeout: partial results written to {}", args.output.display());
        return Ok(4);
    }
    Ok(0)
}

fn cmd_verify(input: &Path, mining: &MiningOpts) -> Result<u8> {
    let db = load_db(input)?;
    let config = mining.miner_config();
    let (reverse_out, baseline_out) =
        match (reverse::mine(&db, &config), baseline::mine_all_fts(&db, &config)) {
            (Ok(r), Ok(b)) => (r, b),
            _ => {
                eprintln!("timeout: verification incomplete");
                return Ok(4);
            }
        };
    let relevant = baseline::filter_relevant(&baseline_out.patterns);
    println!("reverse:  {} patterns", reverse_out.patterns.len());
    println!(
        "baseline: {} relevant patterns ({} frequent in total)",
        relevant.len(),
        baseline_out.patterns.len()
    );

    let key = |p: &MinedPattern| (p.seq.clone(), p.support);
    let rset: std::collections::BTreeSet<_> = reverse_out.patterns.iter().map(key).collect();
    let bset: std::collections::BTreeSet<_> = relevant.iter().map(key).collect();
    if rset == bset {
        println!("outputs match");
        return Ok(0);
    }
    let show = |side: &str, mut missing: Vec<MinedPattern>| {
        missing.truncate(5);
        if !missing.is_empty() {
            println!("only in {side}:");
            print!("{}", write_pat(&missing, &db.labels));
        }
    };
    show(
        "reverse",
        reverse_out.patterns.iter().filter(|p| !bset.contains(&key(p))).cloned().collect(),
    );
    show("baseline", relevant.iter().filter(|p| !rset.contains(&key(p))).cloned().collect());
    println!("outputs differ");
    Ok(3)
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let config = GeneratorConfig {
        p_i: args.pi,
        p_d: args.pd,
        v_avg: args.vavg,
        v_embed_avg: args.vembed,
        n_labels_v: args.lv,
        n_labels_e: args.le,
        n_embedded: args.n,
        db_size: args.db,
        p_edge: args.pe,
        d_ist: args.dist,
        seed: args.seed,
    };
    let (db, planted) = generate(&config)?;
    let header = format!(
        "# rng: {RNG_SCHEME} seed={}\n# config: pi={} pd={} vavg={} vembed={} lv={} le={} n={} db={} pe={} dist={}\n",
        args.seed, args.pi, args.pd, args.vavg, args.vembed, args.lv, args.le, args.n,
        args.db, args.pe, args.dist,
    );
    write(&args.output, &format!("{header}{}", write_gsq(&db)))?;
    if let Some(planted_path) = &args.planted {
        let sidecar = TrDatabase {
            labels: db.labels.clone(),
            entries: planted
                .iter()
                .enumerate()
                .map(|(i, seq)| TrEntry { gid: format!("p{}", i + 1), seq: seq.clone() })
                .collect(),
        };
        write(planted_path, &format!("{header}{}", write_tsq(&sidecar)))?;
    }
    println!("generated {} sequences, {} planted patterns", db.sequences.len(), planted.len());
    Ok(0)
}

fn cmd_ingest(input: &Path, window: u64, snap: u64, output: &Path) -> Result<u8> {
    let text = read(input)?;
    let (db, report) =
        ingest_edge_log(&text, window, snap).map_err(|e| anyhow!("{}: {e}", input.display()))?;
    write(output, &write_gsq(&db))?;
    println!(
        "ingested {} records into {} sequences",
        report.records,
        db.sequences.len()
    );
    for s in &report.skipped {
        eprintln!("{}:{}: skipped: {}", input.display(), s.line, s.msg);
    }
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    let min_sups: Vec<Support> = args
        .min_sup
        .iter()
        .map(|s| parse_min_sup(s).map_err(|e| anyhow!("--min-sup: {e}")))
        .collect::<Result<_>>()?;
    println!("algo,db,vavg,min_sup,patterns,candidates,millis,irrelevance_ratio");
    let mut any_timeout = false;
    for &db_size in &args.db {
        for &v_avg in &args.vavg {
            let config = GeneratorConfig {
                db_size,
                v_avg,
                seed: args.seed,
                ..GeneratorConfig::default()
            };
            let (gdb, _) = generate(&config)?;
            let trdb = compile_db(&gdb, Convention::EmitInitialInserts)
                .expect("generated sequences always compile");
            for (&min_sup, raw) in min_sups.iter().zip(&args.min_sup) {
                for algo in ["reverse", "baseline"] {
                    let miner_config = MinerConfig {
                        min_support: min_sup,
                        max_pattern_rules: args.max_rules,
                        deadline: args
                            .timeout
                            .map(|s| Instant::now() + Duration::from_secs_f64(s)),
                        ..MinerConfig::default()
                    };
                    let started = Instant::now();
                    let result = match algo {
                        "reverse" => reverse::mine(&trdb, &miner_config),
                        _ => baseline::mine_all_fts(&trdb, &miner_config),
                    };
                    let outcome = match result {
                        Ok(outcome) => outcome,
                        Err(MineTimeout { partial }) => {
                            any_timeout = true;
                            eprintln!("timeout: {algo} db={db_size} vavg={v_avg} min_sup={raw}");
                            partial
                        }
                    };
                    let millis = started.elapsed().as_millis();
                    let ratio = match algo {
                        "reverse" => 0.0,
                        _ => baseline::irrelevance_ratio(&outcome.patterns),
                    };
                    println!(
                        "{algo},{db_size},{v_avg},{raw},{},{},{millis},{ratio:.4}",
                        outcome.patterns.len(),
                        outcome.candidates,
                    );
                }
            }
        }
    }
    Ok(if any_timeout { 4 } else { 0 })
}

fn cmd_stats(input: &Path) -> Result<u8> {
    let text = read(input)?;
    let mut labels = Labels::new();
    let patterns =
        parse_pat(&text, &mut labels).map_err(|e| anyhow!("{}: {e}", input.display()))?;
    println!("patterns: {}", patterns.len());
    let mut histogram: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for p in &patterns {
        *histogram.entry(p.seq.len()).or_default() += 1;
    }
    for (len, count) in &histogram {
        println!("len {len}: {count}");
    }
    let irrelevant = patterns.iter().filter(|p| !is_relevant(&p.seq)).count();
    println!(
        "irrelevant: {irrelevant} (ratio {:.4})",
        baseline::irrelevance_ratio(&patterns)
    );
    Ok(0)
}

fn parse_min_sup(s: &str) -> Result<Support, String> {
    let t = s.trim();
    if let Some(p) = t.strip_suffix('%') {
        let v: f64 =
            p.trim().parse().map_err(|_| format!("bad percentage `{s}`"))?;
        if !(0.0..=100.0).contains(&v) {
            return Err(format!("percentage must lie in [0, 100], got `{s}`"));
        }
        return Ok(Support::Fraction(v / 100.0));
    }
    if let Ok(n) = t.parse::<u32>() {
        return Ok(Support::Absolute(n));
    }
    match t.parse::<f64>() {
        Ok(f) if f > 0.0 && f <= 1.0 => Ok(Support::Fraction(f)),
        Ok(_) => Err(format!("fractional support must lie in (0, 1], got `{s}`")),
        Err(_) => Err(format!(
            "expected a count, a fraction in (0, 1], or a percentage, got `{s}`"
        )),
    }
}

/// Seconds, or a number suffixed with s, m, h, or d.
fn parse_duration(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let (digits, unit) = match t.chars().last() {
        Some(c) if c.is_ascii_alphabetic() => (&t[..t.len() - 1], c),
        _ => (t, 's'),
    };
    let n: u64 = digits.parse().map_err(|_| format!("bad duration `{s}`"))?;
    let scale = match unit {
        's' => 1,
        'm' => 60,
        'h' => 3600,
        'd' => 86400,
        _ => return Err(format!("bad duration unit `{unit}` in `{s}`")),
    };
    n.checked_mul(scale).ok_or_else(|| format!("duration `{s}` overflows"))
}
