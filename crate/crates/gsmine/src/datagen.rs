//! Seeded synthetic graph-sequence generator.
//!
//! Each sequence starts from a small random graph and is grown one
//! transition at a time by a fixed number of random edits until it has
//! reached its vertex-ID budget and become relevant. Every sequence is
//! then overlaid by one of a pool of planted relevant patterns (picked
//! uniformly, so any one pattern lands on a sequence with probability
//! 1/N), replayed on fresh vertex IDs at a random transition offset.
//! The planted pool is returned alongside the database so recall of the
//! planted patterns can be measured after mining.
//!
//! Output is byte-stable for a fixed config: every sequence draws from
//! its own counter-derived ChaCha8 stream, so thread scheduling cannot
//! reorder randomness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::compile::{compile, Convention};
use crate::model::{
    GraphDatabase, GraphSequence, Label, LabeledGraph, Labels, TrSeq, UnionGraph, VertexId,
};

/// Name of the RNG scheme, recorded in generated file headers so a
/// corpus documents how to reproduce itself.
pub const RNG_SCHEME: &str = "chacha8";

/// Knobs of the generator. Naming follows the usual dataset-parameter
/// conventions: averages are means (realized Poisson with a floor of
/// 1), probabilities steer the per-edit choice between inserting,
/// deleting, and relabeling.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    /// Probability that an edit inserts.
    pub p_i: f64,
    /// Probability that an edit deletes; relabeling gets the rest.
    pub p_d: f64,
    /// Average distinct vertex IDs per sequence.
    pub v_avg: u32,
    /// Average distinct vertex IDs per planted pattern.
    pub v_embed_avg: u32,
    /// Vertex label alphabet size.
    pub n_labels_v: u32,
    /// Edge label alphabet size.
    pub n_labels_e: u32,
    /// Number of planted patterns (the N in overlay probability 1/N).
    pub n_embedded: u32,
    /// Number of sequences.
    pub db_size: u32,
    /// Edge existence probability in initial graphs.
    pub p_edge: f64,
    /// Edits per transition.
    pub d_ist: u32,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            p_i: 0.8,
            p_d: 0.1,
            v_avg: 6,
            v_embed_avg: 3,
            n_labels_v: 5,
            n_labels_e: 5,
            n_embedded: 10,
            db_size: 1000,
            p_edge: 0.15,
            d_ist: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("sequence {0}: no feasible edit after {1} resamples")]
    ResampleBudget(String, u32),
    #[error("sequence {0}: not relevant with full vertex budget after {1} transitions")]
    GrowthBudget(String, u32),
}

const MAX_RESAMPLES: u32 = 1_000;
const MAX_TRANSITIONS: u32 = 10_000;

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(GenError::InvalidConfig(format!("{name} = {p} is not in [0, 1]")))
            }
        };
        prob("p_i", self.p_i)?;
        prob("p_d", self.p_d)?;
        prob("p_edge", self.p_edge)?;
        if self.p_i + self.p_d > 1.0 {
            return Err(GenError::InvalidConfig(format!(
                "p_i + p_d = {} exceeds 1",
                self.p_i + self.p_d
            )));
        }
        let count = |name: &str, n: u32| {
            if n >= 1 {
                Ok(())
            } else {
                Err(GenError::InvalidConfig(format!("{name} must be at least 1")))
            }
        };
        count("v_avg", self.v_avg)?;
        count("v_embed_avg", self.v_embed_avg)?;
        count("n_labels_v", self.n_labels_v)?;
        count("n_labels_e", self.n_labels_e)?;
        count("n_embedded", self.n_embedded)?;
        count("db_size", self.db_size)?;
        count("d_ist", self.d_ist)
    }
}

/// Generates the database and the planted pattern pool.
pub fn generate(config: &GeneratorConfig) -> Result<(GraphDatabase, Vec<TrSeq>), GenError> {
    config.validate()?;
    let mut labels = Labels::new();
    let vlabels: Vec<Label> =
        (1..=config.n_labels_v).map(|i| labels.intern(&format!("v{i}"))).collect();
    let elabels: Vec<Label> =
        (1..=config.n_labels_e).map(|i| labels.intern(&format!("e{i}"))).collect();

    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let pattern_seeds: Vec<u64> =
        (0..config.n_embedded).map(|_| master.gen()).collect();
    let sequence_seeds: Vec<u64> = (0..config.db_size).map(|_| master.gen()).collect();

    let planted: Vec<TrSeq> = pattern_seeds
        .into_par_iter()
        .enumerate()
        .map(|(i, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq = grow_sequence(
                &format!("pattern {}", i + 1),
                config,
                config.v_embed_avg,
                &vlabels,
                &elabels,
                &mut rng,
            )?;
            let compiled = compile(&seq, Convention::EmitInitialInserts)
                .expect("grown sequences have consistent snapshots");
            Ok(compiled.normalized())
        })
        .collect::<Result<_, GenError>>()?;

    let sequences: Vec<GraphSequence> = sequence_seeds
        .into_par_iter()
        .enumerate()
        .map(|(i, seed)| {
            let gid = (i + 1).to_string();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seq =
                grow_sequence(&gid, config, config.v_avg, &vlabels, &elabels, &mut rng)?;
            let which = rng.gen_range(0..planted.len());
            overlay(&mut seq, &planted[which], &elabels, &mut rng);
            Ok(seq)
        })
        .collect::<Result<_, GenError>>()?;

    Ok((GraphDatabase { labels, sequences }, planted))
}

fn poisson_floor_1(mean: u32, rng: &mut ChaCha8Rng) -> u32 {
    let p = Poisson::new(mean as f64).expect("validated mean >= 1");
    (p.sample(rng) as u32).max(1)
}

fn pick<T: Copy>(items: &[T], rng: &mut ChaCha8Rng) -> T {
    items[rng.gen_range(0..items.len())]
}

/// Grows one sequence: initial graph with `v_target/2` vertices and
/// p_edge-random edges, then `d_ist` random edits per transition until
/// the distinct-ID budget (Poisson around `v_mean`) is met and the
/// union graph is connected.
fn grow_sequence(
    gid: &str,
    config: &GeneratorConfig,
    v_mean: u32,
    vlabels: &[Label],
    elabels: &[Label],
    rng: &mut ChaCha8Rng,
) -> Result<GraphSequence, GenError> {
    let target_ids = poisson_floor_1(v_mean, rng);
    let initial = (v_mean / 2).max(1);

    let mut g = LabeledGraph::new();
    for v in 1..=initial {
        g.add_vertex(v, pick(vlabels, rng));
    }
    for u in 1..=initial {
        for v in u + 1..=initial {
            if rng.gen::<f64>() < config.p_edge {
                g.add_edge(u, v, pick(elabels, rng));
            }
        }
    }
    let mut next_id: VertexId = initial + 1;
    let mut seq = GraphSequence { gid: gid.to_string(), graphs: vec![g.clone()] };

    // The union graph must be taken over snapshots, not over edits: an
    // edge inserted and deleted within one transition never reaches a
    // snapshot, so it contributes no rule and must not count towards
    // connectivity. Snapshot contents only accumulate in the union, so
    // absorbing each pushed snapshot keeps it exact without rescanning.
    let mut union = UnionGraph::default();
    absorb_snapshot(&mut union, &g);

    while next_id <= target_ids || !union.is_connected() {
        if seq.graphs.len() as u32 > MAX_TRANSITIONS {
            return Err(GenError::GrowthBudget(gid.to_string(), MAX_TRANSITIONS));
        }
        for _ in 0..config.d_ist {
            apply_random_edit(
                gid, config, &mut g, &mut next_id, target_ids, &union, vlabels, elabels, rng,
            )?;
        }
        seq.graphs.push(g.clone());
        absorb_snapshot(&mut union, &g);
    }
    Ok(seq)
}

fn absorb_snapshot(union: &mut UnionGraph, g: &LabeledGraph) {
    for &v in g.vertices.keys() {
        union.add_vertex(v);
    }
    for &(u, v) in g.edges.keys() {
        union.add_edge(u, v);
    }
}

/// One insert/delete/relabel edit on a uniformly chosen vertex or edge;
/// infeasible draws (deleting from an empty graph, relabeling with an
/// alphabet of one, inserting a vertex past the ID budget) are redrawn
/// from scratch within a budget.
#[allow(clippy::too_many_arguments)]
fn apply_random_edit(
    gid: &str,
    config: &GeneratorConfig,
    g: &mut LabeledGraph,
    next_id: &mut VertexId,
    target_ids: u32,
    union: &UnionGraph,
    vlabels: &[Label],
    elabels: &[Label],
    rng: &mut ChaCha8Rng,
) -> Result<(), GenError> {
    for _ in 0..MAX_RESAMPLES {
        let r = rng.gen::<f64>();
        let on_vertex = rng.gen::<bool>();
        if r < config.p_i {
            if on_vertex {
                // Fresh IDs only up to the budget, otherwise the
                // distinct-ID average would overshoot its mean and a
                // growing vertex set could outrun connectivity forever.
                if *next_id > target_ids {
                    continue;
                }
                g.add_vertex(*next_id, pick(vlabels, rng));
                *next_id += 1;
                return Ok(());
            }
            let free: Vec<(VertexId, VertexId)> = vertex_pairs(g)
                .into_iter()
                .filter(|&(u, v)| !g.has_edge(u, v))
                .collect();
            if free.is_empty() {
                continue;
            }
            let (u, v) = pick(&free, rng);
            g.add_edge(u, v, pick(elabels, rng));
            return Ok(());
        } else if r < config.p_i + config.p_d {
            if on_vertex {
                // Only isolated vertices may disappear, and only when
                // their union component keeps another live vertex: IDs
                // are never reused, so a component whose vertices are
                // all deleted could never rejoin the rest of the union
                // graph and growth would spin forever.
                let isolated: Vec<VertexId> = g
                    .vertices
                    .keys()
                    .copied()
                    .filter(|&v| g.degree(v) == 0 && component_stays_anchored(v, g, union))
                    .collect();
                if isolated.is_empty() {
                    continue;
                }
                g.vertices.remove(&pick(&isolated, rng));
            } else {
                let edges: Vec<(VertexId, VertexId)> = g.edges.keys().copied().collect();
                if edges.is_empty() {
                    continue;
                }
                g.edges.remove(&pick(&edges, rng));
            }
            return Ok(());
        } else {
            if on_vertex {
                let vertices: Vec<VertexId> = g.vertices.keys().copied().collect();
                if vertices.is_empty() || vlabels.len() < 2 {
                    continue;
                }
                let v = pick(&vertices, rng);
                let old = g.vertices[&v];
                let fresh: Vec<Label> =
                    vlabels.iter().copied().filter(|&l| l != old).collect();
                g.add_vertex(v, pick(&fresh, rng));
            } else {
                let edges: Vec<(VertexId, VertexId)> = g.edges.keys().copied().collect();
                if edges.is_empty() || elabels.len() < 2 {
                    continue;
                }
                let (u, v) = pick(&edges, rng);
                let old = g.edges[&(u, v)];
                let fresh: Vec<Label> =
                    elabels.iter().copied().filter(|&l| l != old).collect();
                g.add_edge(u, v, pick(&fresh, rng));
            }
            return Ok(());
        }
    }
    Err(GenError::ResampleBudget(gid.to_string(), MAX_RESAMPLES))
}

/// True when `v`'s component in the union graph contains some other
/// vertex still present in `g`. That vertex anchors the component: it
/// can still gain snapshot edges, so the component is not stranded.
fn component_stays_anchored(v: VertexId, g: &LabeledGraph, union: &UnionGraph) -> bool {
    let mut adj: std::collections::HashMap<VertexId, Vec<VertexId>> =
        std::collections::HashMap::new();
    for &(a, b) in &union.edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = std::collections::BTreeSet::from([v]);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &w in adj.get(&u).into_iter().flatten() {
            if seen.insert(w) {
                if g.has_vertex(w) {
                    return true;
                }
                stack.push(w);
            }
        }
    }
    false
}

fn vertex_pairs(g: &LabeledGraph) -> Vec<(VertexId, VertexId)> {
    let vs: Vec<VertexId> = g.vertices.keys().copied().collect();
    let mut pairs = Vec::new();
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            pairs.push((u, v));
        }
    }
    pairs
}

/// Overlays `pattern` onto `host`: its state trajectory is replayed on
/// fresh vertex IDs and merged into the host snapshots from a random
/// offset onward (the final pattern state persists to the end). Hosts
/// shorter than the pattern are first padded by repeating their last
/// snapshot, which adds no transformation rules of its own. One bridge
/// edge between a host vertex and a pattern vertex joins the two union
/// graphs so the overlaid sequence stays relevant.
fn overlay(host: &mut GraphSequence, pattern: &TrSeq, elabels: &[Label], rng: &mut ChaCha8Rng) {
    let states = replay_states(pattern);
    while host.graphs.len() < states.len() {
        host.graphs.push(host.graphs.last().expect("host is nonempty").clone());
    }
    let base: VertexId = host
        .graphs
        .iter()
        .flat_map(|g| g.vertices.keys().copied())
        .max()
        .unwrap_or(0);
    let offset = rng.gen_range(0..=host.graphs.len() - states.len());
    for (t, hg) in host.graphs.iter_mut().enumerate().skip(offset) {
        let state = &states[(t - offset).min(states.len() - 1)];
        for (&v, &l) in &state.vertices {
            hg.add_vertex(base + v, l);
        }
        for (&(u, v), &l) in &state.edges {
            hg.add_edge(base + u, base + v, l);
        }
    }

    // Both halves have connected union graphs on their own; a single
    // edge between them connects the whole. Deleted IDs are never
    // reinserted, so the edge may simply persist until either endpoint
    // first disappears.
    let bridged = host.graphs[offset..].iter().enumerate().find_map(|(i, hg)| {
        let hosts: Vec<VertexId> =
            hg.vertices.keys().copied().filter(|&v| v <= base).collect();
        let pats: Vec<VertexId> =
            hg.vertices.keys().copied().filter(|&v| v > base).collect();
        (!hosts.is_empty() && !pats.is_empty())
            .then(|| (offset + i, pick(&hosts, rng), pick(&pats, rng)))
    });
    let Some((t0, hu, pv)) = bridged else { return };
    let label = pick(elabels, rng);
    for hg in &mut host.graphs[t0..] {
        if !(hg.has_vertex(hu) && hg.has_vertex(pv)) {
            break;
        }
        hg.add_edge(hu, pv, label);
    }
}

/// Snapshot trajectory of a pattern replayed from the empty graph, one
/// state per interstate. Rules within an interstate are applied in
/// executable phase order (inserts, then relabels, then deletions),
/// which any compiled sequence satisfies.
fn replay_states(pattern: &TrSeq) -> Vec<LabeledGraph> {
    use crate::compile::apply_rule;
    use crate::model::RuleKind;
    const PHASES: [RuleKind; 6] = [
        RuleKind::VertexInsert,
        RuleKind::EdgeInsert,
        RuleKind::VertexRelabel,
        RuleKind::EdgeRelabel,
        RuleKind::EdgeDelete,
        RuleKind::VertexDelete,
    ];
    let mut g = LabeledGraph::new();
    let mut states = Vec::new();
    for (_, rules) in pattern.interstates() {
        for phase in PHASES {
            for r in rules.iter().filter(|r| r.kind == phase) {
                apply_rule(&mut g, r).expect("planted patterns replay from empty");
            }
        }
        states.push(g.clone());
    }
    states
}
