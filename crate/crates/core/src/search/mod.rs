//! Sweeps over emission orderings and the `(emitters, CNOTs)` histograms they
//! produce.
//!
//! Three modes share one aggregation path:
//!
//! - [`exhaustive`] solves one representative per automorphism orbit, split
//!   into prefix-disjoint work items and optionally checkpointed to disk.
//! - [`random`] solves uniformly sampled raw permutations, one ChaCha stream
//!   per sample index.
//! - [`lifted`] runs the exhaustive search on the leaf-truncated core and
//!   solves the full graph for the lifts of the selected core orderings.
//!
//! Every work item produces a [`SearchOutcome`]; outcomes merge cell-wise, so
//! serial and parallel runs agree exactly.

mod histogram;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{
    automorphisms, lift_ordering, lift_with_mask, orbit_count, truncate_leaves, CanonicalOrderings,
    EmissionOrdering, Graph, GraphError, LiftMode,
};
use crate::solver::{solve_with, verify, SolveError, SolveOptions, SolveStats};

pub use histogram::{Cell, CellKey, Histogram, HistogramDoc, Provenance, MAX_REPRESENTATIVES};

/// Default cap on the number of canonical orderings an exhaustive run solves.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Prefixes solved between two checkpoint writes.
pub const DEFAULT_CHECKPOINT_EVERY: usize = 8;

/// Samples per random-mode work item.
const SAMPLE_BLOCK: u64 = 256;

/// Target number of prefix work items for exhaustive runs.
const MIN_WORK_ITEMS: usize = 64;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(
        "{count} canonical orderings exceed the budget of {budget}; \
         use random or lifted mode instead"
    )]
    BudgetExceeded { count: BigUint, budget: u64 },
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("at least one sample is required")]
    NoSamples,
    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },
    #[error("malformed histogram: {0}")]
    Format(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// How work items are executed. Without the `parallel` feature every run is
/// serial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// `workers == 0` lets the pool pick the thread count.
    Parallel {
        workers: usize,
    },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { workers: 0 }
        } else {
            Execution::Serial
        }
    }
}

/// Which orderings are kept in full, beyond the per-cell representatives.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Collect {
    #[default]
    Nothing,
    /// Every ordering in the best (fewest emitters, then CNOTs) cell.
    Best,
    /// Every ordering in the listed cells.
    Cells(Vec<CellKey>),
}

impl Collect {
    fn wants(&self, key: CellKey, best_so_far: Option<CellKey>) -> bool {
        match self {
            Collect::Nothing => false,
            Collect::Best => best_so_far.is_none_or(|b| key <= b),
            Collect::Cells(keys) => keys.contains(&key),
        }
    }
}

/// Seeded multi-stream verification of every produced circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub random_streams: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub solver: SolveOptions,
    pub execution: Execution,
    pub collect: Collect,
    pub verify: Option<VerifyConfig>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            solver: SolveOptions::default(),
            execution: Execution::default(),
            collect: Collect::Nothing,
            verify: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveConfig {
    pub search: SearchConfig,
    pub budget: u64,
    /// Prefix length used to split the orbit stream; chosen from the graph
    /// when `None`.
    pub prefix_depth: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: usize,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        ExhaustiveConfig {
            search: SearchConfig::default(),
            budget: DEFAULT_BUDGET,
            prefix_depth: None,
            checkpoint: None,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
        }
    }
}

/// One solved ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchRecord {
    pub ordering: EmissionOrdering,
    pub stats: SolveStats,
}

/// Aggregated result of a search or of one of its work items.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchOutcome {
    pub histogram: Histogram,
    pub evaluated: u64,
    /// Circuits that went through verification.
    pub verified: u64,
    pub verify_failures: u64,
    /// Circuits with a stage tally above its closed-form bound.
    pub bound_violations: u64,
    /// Lexicographically smallest failing ordering with its report.
    pub first_failure: Option<(EmissionOrdering, String)>,
    /// Full ordering lists per [`Collect`], each sorted.
    pub collected: BTreeMap<CellKey, Vec<EmissionOrdering>>,
}

impl SearchOutcome {
    fn record(&mut self, rec: &SearchRecord, collect: &Collect) {
        let key = (rec.stats.n_emitters, rec.stats.cnot_count);
        let best = self.collected.keys().next().copied();
        if collect.wants(key, best) {
            self.collected
                .entry(key)
                .or_default()
                .push(rec.ordering.clone());
            if *collect == Collect::Best {
                self.collected.retain(|&k, _| k <= key);
            }
        }
        self.histogram.add(key, &rec.ordering);
        self.evaluated += 1;
    }

    fn fail(&mut self, o: &EmissionOrdering, message: String) {
        self.verify_failures += 1;
        if self.first_failure.as_ref().is_none_or(|(f, _)| o < f) {
            self.first_failure = Some((o.clone(), message));
        }
    }

    /// Cell-wise union. Associative and commutative.
    pub fn merge(&mut self, other: SearchOutcome, collect: &Collect) {
        self.histogram.merge(other.histogram);
        self.evaluated += other.evaluated;
        self.verified += other.verified;
        self.verify_failures += other.verify_failures;
        self.bound_violations += other.bound_violations;
        if let Some((o, m)) = other.first_failure {
            if self.first_failure.as_ref().is_none_or(|(f, _)| &o < f) {
                self.first_failure = Some((o, m));
            }
        }
        for (key, mut list) in other.collected {
            let mine = self.collected.entry(key).or_default();
            mine.append(&mut list);
            mine.sort_unstable();
        }
        if *collect == Collect::Best {
            if let Some(&best) = self.collected.keys().next() {
                self.collected.retain(|&k, _| k == best);
            }
        }
    }

    /// Orderings of the best cell when the search collected it.
    pub fn best_orderings(&self) -> &[EmissionOrdering] {
        self.collected.values().next().map_or(&[], Vec::as_slice)
    }
}

/// Solves `ordering` and, when configured, verifies the circuit.
fn evaluate(
    g: &Graph,
    ordering: EmissionOrdering,
    cfg: &SearchConfig,
    out: &mut SearchOutcome,
) -> Result<(), SearchError> {
    let sol = solve_with(g, &ordering, &cfg.solver)?;
    if !sol.stats.within_bounds(g.n_vertices()) {
        out.bound_violations += 1;
    }
    if let Some(v) = cfg.verify {
        let report = verify(&sol.circuit, g, &ordering, v.seed, v.random_streams)?;
        out.verified += 1;
        if !report.passed {
            out.fail(&ordering, report.failure.unwrap_or_default());
        }
    }
    out.record(
        &SearchRecord {
            ordering,
            stats: sol.stats,
        },
        &cfg.collect,
    );
    Ok(())
}

/// Solves one ordering as a [`SearchRecord`].
pub fn solve_record(
    g: &Graph,
    ordering: &EmissionOrdering,
    opts: &SolveOptions,
) -> Result<SearchRecord, SearchError> {
    let sol = solve_with(g, ordering, opts)?;
    Ok(SearchRecord {
        ordering: ordering.clone(),
        stats: sol.stats,
    })
}

struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    fn new(execution: Execution) -> Result<Executor, SearchError> {
        #[cfg(feature = "parallel")]
        {
            let pool = match execution {
                Execution::Serial => None,
                Execution::Parallel { workers } => Some(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(workers)
                        .build()
                        .map_err(|e| SearchError::Pool(e.to_string()))?,
                ),
            };
            Ok(Executor { pool })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = execution;
            Ok(Executor {})
        }
    }

    /// Runs `f` on every item and merges the outcomes in item order.
    fn run<I, F>(&self, items: &[I], collect: &Collect, f: F) -> Result<SearchOutcome, SearchError>
    where
        I: Sync,
        F: Fn(&I) -> Result<SearchOutcome, SearchError> + Sync,
    {
        #[cfg(feature = "parallel")]
        let parts: Vec<Result<SearchOutcome, SearchError>> = match &self.pool {
            Some(pool) => {
                use rayon::prelude::*;
                pool.install(|| items.par_iter().map(&f).collect())
            }
            None => items.iter().map(&f).collect(),
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<Result<SearchOutcome, SearchError>> = items.iter().map(&f).collect();
        let mut total = SearchOutcome::default();
        for part in parts {
            total.merge(part?, collect);
        }
        Ok(total)
    }
}

/// Number of canonical orderings of `g`, the exhaustive-mode workload.
pub fn canonical_count(g: &Graph) -> Result<BigUint, SearchError> {
    let group = automorphisms(g)?;
    Ok(orbit_count(g.n_vertices() as u64, group.size() as u64))
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    prefix_depth: usize,
    n_prefixes: usize,
    completed: usize,
    partial: HistogramDoc,
}

fn fingerprint(g: &Graph, cfg: &SearchConfig) -> String {
    format!(
        "{:?}|{:?}|{:?}|{:?}|{:?}",
        g.edges(),
        g.hadamards(),
        cfg.solver,
        cfg.collect,
        cfg.verify
    )
}

fn provenance(mode: &str, cfg: &SearchConfig) -> Provenance {
    Provenance {
        mode: mode.into(),
        seed: cfg.verify.map(|v| v.seed),
        samples: None,
        graph_hash: None,
        solver: cfg.solver,
    }
}

fn checkpoint_error(path: &std::path::Path, message: impl ToString) -> SearchError {
    SearchError::Checkpoint {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

/// Solves one representative of every automorphism orbit of orderings.
///
/// Fails with [`SearchError::BudgetExceeded`] before any solving when the
/// orbit count is above `config.budget`. With a checkpoint path, progress is
/// written every `checkpoint_every` prefixes and a matching file is resumed.
pub fn exhaustive(g: &Graph, config: &ExhaustiveConfig) -> Result<SearchOutcome, SearchError> {
    let group = automorphisms(g)?;
    let n = g.n_vertices();
    let count = orbit_count(n as u64, group.size() as u64);
    if count > BigUint::from(config.budget) {
        return Err(SearchError::BudgetExceeded {
            count,
            budget: config.budget,
        });
    }
    let depth = config.prefix_depth.unwrap_or_else(|| {
        (1..=n)
            .find(|&d| CanonicalOrderings::prefixes(&group, d).len() >= MIN_WORK_ITEMS)
            .unwrap_or(n)
    });
    let prefixes = CanonicalOrderings::prefixes(&group, depth);
    let cfg = &config.search;
    let fp = fingerprint(g, cfg);

    let mut total = SearchOutcome::default();
    let mut start = 0;
    if let Some(path) = &config.checkpoint {
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| checkpoint_error(path, e))?;
            let ck: Checkpoint =
                serde_json::from_str(&text).map_err(|e| checkpoint_error(path, e))?;
            if ck.fingerprint != fp || ck.prefix_depth != depth || ck.n_prefixes != prefixes.len() {
                return Err(checkpoint_error(path, "written for a different search"));
            }
            total = ck.partial.outcome()?;
            start = ck.completed.min(prefixes.len());
        }
    }

    let exec = Executor::new(cfg.execution)?;
    let work = |prefix: &Vec<usize>| -> Result<SearchOutcome, SearchError> {
        let mut out = SearchOutcome::default();
        if let Some(stream) = CanonicalOrderings::from_prefix(&group, prefix) {
            for o in stream {
                evaluate(g, o, cfg, &mut out)?;
            }
        }
        Ok(out)
    };
    let step = match &config.checkpoint {
        Some(_) => config.checkpoint_every.max(1),
        None => prefixes.len().max(1),
    };
    while start < prefixes.len() {
        let end = (start + step).min(prefixes.len());
        let part = exec.run(&prefixes[start..end], &cfg.collect, work)?;
        total.merge(part, &cfg.collect);
        start = end;
        if let Some(path) = &config.checkpoint {
            let ck = Checkpoint {
                fingerprint: fp.clone(),
                prefix_depth: depth,
                n_prefixes: prefixes.len(),
                completed: start,
                partial: HistogramDoc::new(provenance("exhaustive", cfg), &total),
            };
            let tmp = path.with_extension("tmp");
            let text = serde_json::to_string(&ck).map_err(|e| checkpoint_error(path, e))?;
            fs::write(&tmp, text).map_err(|e| checkpoint_error(&tmp, e))?;
            fs::rename(&tmp, path).map_err(|e| checkpoint_error(path, e))?;
        }
    }
    Ok(total)
}

/// The ordering used for sample `index` of a seeded random search.
pub fn sample_ordering(n: usize, seed: u64, index: u64) -> EmissionOrdering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    EmissionOrdering::new(order).expect("a shuffled identity is a permutation")
}

/// Solves `samples` uniformly random raw orderings. Sample `i` depends only
/// on `(seed, i)`. Verification, when enabled, uses seed `seed + i` for
/// sample `i`.
pub fn random(
    g: &Graph,
    samples: u64,
    seed: u64,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    if samples == 0 {
        return Err(SearchError::NoSamples);
    }
    let n = g.n_vertices();
    let blocks: Vec<u64> = (0..samples.div_ceil(SAMPLE_BLOCK)).collect();
    let exec = Executor::new(config.execution)?;
    exec.run(&blocks, &config.collect, |&b| {
        let mut out = SearchOutcome::default();
        for i in b * SAMPLE_BLOCK..((b + 1) * SAMPLE_BLOCK).min(samples) {
            let mut cfg = config.clone();
            if let Some(v) = &mut cfg.verify {
                v.seed = seed.wrapping_add(i);
            }
            evaluate(g, sample_ordering(n, seed, i), &cfg, &mut out)?;
        }
        Ok(out)
    })
}

/// Core cells whose orderings are lifted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum CellSelect {
    /// The core's best cell.
    #[default]
    Best,
    Cells(Vec<CellKey>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedConfig {
    /// Options for the full-graph solves.
    pub search: SearchConfig,
    /// Options for the core exhaustive search.
    pub core: ExhaustiveConfig,
    pub select: CellSelect,
    /// Try every per-core leaf placement instead of the two global modes.
    pub per_leaf: bool,
}

impl Default for LiftedConfig {
    fn default() -> Self {
        LiftedConfig {
            search: SearchConfig::default(),
            core: ExhaustiveConfig::default(),
            select: CellSelect::Best,
            per_leaf: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedOutcome {
    pub core: SearchOutcome,
    /// Core orderings that were lifted.
    pub selected: Vec<EmissionOrdering>,
    pub full: SearchOutcome,
}

/// Exhaustive search on the leaf-truncated core of `g`, then full-graph
/// solves of the lifts of the selected core orderings.
pub fn lifted(g: &Graph, config: &LiftedConfig) -> Result<LiftedOutcome, SearchError> {
    let core = truncate_leaves(g)?;
    let mut core_cfg = config.core.clone();
    core_cfg.search.collect = match &config.select {
        CellSelect::Best => Collect::Best,
        CellSelect::Cells(keys) => Collect::Cells(keys.clone()),
    };
    let core_out = exhaustive(&core.graph, &core_cfg)?;
    let mut selected: Vec<EmissionOrdering> =
        core_out.collected.values().flatten().cloned().collect();
    selected.sort_unstable();
    let full = lift_all(g, &selected, config.per_leaf, &config.search)?;
    Ok(LiftedOutcome {
        core: core_out,
        selected,
        full,
    })
}

/// Lifts each core ordering under both global modes (or every per-core mask)
/// and solves the full graph.
pub fn lift_all(
    g: &Graph,
    core_orderings: &[EmissionOrdering],
    per_leaf: bool,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let exec = Executor::new(config.execution)?;
    exec.run(core_orderings, &config.collect, |co| {
        let mut out = SearchOutcome::default();
        if per_leaf {
            for mask in 0..1u64 << co.len() {
                evaluate(g, lift_with_mask(co, g, mask)?, config, &mut out)?;
            }
        } else {
            for mode in LiftMode::BOTH {
                evaluate(g, lift_ordering(co, g, mode)?, config, &mut out)?;
            }
        }
        Ok(out)
    })
}
