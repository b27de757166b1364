//! Simulated massively-parallel execution of the consensus algorithms.
//!
//! Every distributed algorithm here computes the *same value* as its
//! in-memory counterpart (for the inversion median, the same value its
//! many-pivot offline variant computes) while an [`Engine`] accounts what a
//! real deployment would cost: machines touched, synchronous rounds,
//! per-machine word loads against a sublinear cap, and total traffic.  The
//! account is returned as an [`MpcTrace`]; overflowing the per-machine cap
//! aborts the run with [`Error::CapExceeded`] carrying the partial trace.
//!
//! Machines hold `O(n^{1-eps} * polylog n)` words.  A word is one integer or
//! one float ([`Word`]); map keys and message envelopes are not counted.
//! Round schedules are fixed per algorithm and independent of `n`, so round
//! counts are comparable across problem sizes.

use crate::dist;
use crate::error::{Error, Result};
use crate::perm::{Instance, Metric, Permutation, WeightVector};
use crate::reconstruct::{self, snap, BlockLayout, ReconstructParams, ReconstructReport};
use crate::rng::subrng;
use crate::slack::{
    evaluation_members, sample_distinct, AggregationResult, FrameworkConfig, Provenance,
};
use crate::solvers::{self, MajorityTournament};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Rounds of the chunk-and-sum distance schedule (Hamming, displacement).
pub const ROUNDS_LINEAR_DISTANCE: usize = 2;
/// Rounds of the pairwise-chunk inversion-count schedule.
pub const ROUNDS_KENDALL_DISTANCE: usize = 5;
/// Rounds of the positional median schedule (majority vote, position
/// medians).
pub const ROUNDS_POSITIONAL_MEDIAN: usize = 5;
/// Fixed level budget of the distributed multi-pivot quicksort.
pub const KENDALL_MEDIAN_LEVELS: usize = 17;
/// Communication rounds spent per quicksort level.
pub const ROUNDS_PER_KENDALL_LEVEL: usize = 6;
/// Total rounds of the inversion median: distribute, all levels (padded even
/// when sorting finishes early), gather.
pub const ROUNDS_KENDALL_MEDIAN: usize = 2 + KENDALL_MEDIAN_LEVELS * ROUNDS_PER_KENDALL_LEVEL;
/// Rounds of the distributed block-reconstruction pipeline.
pub const ROUNDS_RECONSTRUCT: usize = 10;

/// Engine limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MpcConfig {
    /// Memory exponent: a machine holds about `n^(1-epsilon)` words times a
    /// polylog factor.
    pub epsilon: f64,
    /// Leading constant of the word cap.
    pub c: f64,
    /// Polylog exponent of the word cap.
    pub kappa: u32,
    /// Most machines a run may touch.
    pub machine_budget: usize,
}

impl Default for MpcConfig {
    fn default() -> Self {
        MpcConfig {
            epsilon: 0.5,
            c: 4.0,
            kappa: 1,
            machine_budget: 10_000_000,
        }
    }
}

/// `ceil(log2 n)`, with `n` clamped to at least 2.
fn ceil_log2(n: usize) -> u32 {
    let n = n.max(2);
    usize::BITS - (n - 1).leading_zeros()
}

impl MpcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cap constant must be positive, got {}",
                self.c
            )));
        }
        if self.machine_budget == 0 {
            return Err(Error::InvalidInput("machine budget must be positive".into()));
        }
        Ok(())
    }

    /// Per-machine word cap: `ceil(c * n^(1-eps) * ceil(log2 n)^kappa)`.
    pub fn word_cap(&self, n: usize) -> usize {
        let polylog = (ceil_log2(n) as f64).powi(self.kappa as i32);
        snap(self.c * (n as f64).powf(1.0 - self.epsilon) * polylog).ceil() as usize
    }
}

/// One storage or message word.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Word {
    Int(i64),
    Real(f64),
}

/// A machine's key-value store; only the word vectors count against the cap.
pub type Store = BTreeMap<String, Vec<Word>>;

/// One black-box helper invocation, charged instead of simulated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleCall {
    pub kind: String,
    pub word_charge: u64,
}

/// Cost account of one distributed run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MpcTrace {
    pub rounds: usize,
    pub machines_used: usize,
    pub peak_words_per_machine: usize,
    pub total_words: u64,
    pub total_messages: u64,
    pub oracle_calls: Vec<OracleCall>,
    pub failed: bool,
}

/// Cost-accounting core: tracks per-machine persistent words and per-round
/// inbox words, and enforces `store + inbox <= cap` after every transfer.
pub struct Engine {
    cap: usize,
    budget: usize,
    round: usize,
    store: BTreeMap<u64, usize>,
    inbox: BTreeMap<u64, usize>,
    peak: usize,
    total_words: u64,
    total_messages: u64,
    oracle_calls: Vec<OracleCall>,
}

impl Engine {
    pub fn new(cfg: &MpcConfig, n: usize) -> Result<Engine> {
        cfg.validate()?;
        Ok(Engine {
            cap: cfg.word_cap(n),
            budget: cfg.machine_budget,
            round: 0,
            store: BTreeMap::new(),
            inbox: BTreeMap::new(),
            peak: 0,
            total_words: 0,
            total_messages: 0,
            oracle_calls: Vec::new(),
        })
    }

    pub fn word_cap(&self) -> usize {
        self.cap
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    /// Open the next synchronous round; undelivered inbox words become the
    /// receivers' problem (they were either persisted explicitly or
    /// consumed).
    pub fn begin_round(&mut self) {
        self.round += 1;
        self.inbox.clear();
    }

    fn touch(&mut self, machine: u64) -> Result<()> {
        if !self.store.contains_key(&machine) {
            if self.store.len() + 1 > self.budget {
                return Err(Error::MachineBudget {
                    requested: self.store.len() + 1,
                    budget: self.budget,
                });
            }
            self.store.insert(machine, 0);
        }
        Ok(())
    }

    fn check(&mut self, machine: u64) -> Result<()> {
        let load =
            self.store.get(&machine).copied().unwrap_or(0) + self.inbox.get(&machine).copied().unwrap_or(0);
        self.peak = self.peak.max(load);
        if load > self.cap {
            return Err(Error::CapExceeded {
                machine,
                round: self.round,
                words: load,
                cap: self.cap,
                trace: Box::new(self.snapshot(true)),
            });
        }
        Ok(())
    }

    /// Deliver `words` words to `to` within the current round.
    pub fn send(&mut self, to: u64, words: usize) -> Result<()> {
        self.touch(to)?;
        self.total_messages += 1;
        self.total_words += words as u64;
        *self.inbox.entry(to).or_insert(0) += words;
        self.check(to)
    }

    /// Persist `words` additional words on `machine`.
    pub fn store_words(&mut self, machine: u64, words: usize) -> Result<()> {
        self.touch(machine)?;
        *self.store.entry(machine).or_insert(0) += words;
        self.check(machine)
    }

    /// Drop up to `words` persistent words from `machine`.
    pub fn release(&mut self, machine: u64, words: usize) {
        if let Some(w) = self.store.get_mut(&machine) {
            *w = w.saturating_sub(words);
        }
    }

    /// Record a black-box helper call.
    pub fn oracle(&mut self, kind: &str, word_charge: u64) {
        self.oracle_calls.push(OracleCall {
            kind: kind.to_string(),
            word_charge,
        });
    }

    fn snapshot(&self, failed: bool) -> MpcTrace {
        MpcTrace {
            rounds: self.round,
            machines_used: self.store.len(),
            peak_words_per_machine: self.peak,
            total_words: self.total_words,
            total_messages: self.total_messages,
            oracle_calls: self.oracle_calls.clone(),
            failed,
        }
    }

    pub fn finish(self) -> MpcTrace {
        self.snapshot(false)
    }
}

/// Position chunking shared by all schedules: identical to the block layout
/// of the reconstruction pipeline.
pub fn chunks(n: usize, epsilon: f64) -> BlockLayout {
    BlockLayout::for_params(n, epsilon)
}

/// Deliver one permutation's chunks to machines `base..base+k`: each chunk
/// machine receives its slice of the one-line notation and of the inverse,
/// `2 * chunk` words.
pub fn distribute_permutation(eng: &mut Engine, layout: &BlockLayout, base: u64) -> Result<()> {
    for u in 0..layout.k {
        eng.send(base + u as u64, 2 * layout.len(u))?;
    }
    Ok(())
}

/// Word charge of the black-box move-distance helper.
pub fn ulam_oracle_charge(n: usize, epsilon: f64) -> u64 {
    let work = snap((n as f64).powf(1.0 + epsilon)).ceil() as u64;
    work * ceil_log2(n) as u64
}

/// Pivots drawn per group and level by the distributed quicksort.
pub fn mpc_pivot_cap(n: usize, epsilon: f64) -> usize {
    let logarithmic = 8 * ceil_log2(n) as usize;
    let memory = snap((n as f64).powf(1.0 - epsilon)).ceil() as usize;
    logarithmic.min(memory).max(1)
}

/// Distributed distance evaluation; the value equals [`dist::distance`]
/// exactly.
pub fn mpc_distance(
    metric: Metric,
    x: &Permutation,
    y: &Permutation,
    weights: Option<&WeightVector>,
    cfg: &MpcConfig,
) -> Result<(f64, MpcTrace)> {
    let value = dist::distance(metric, x, y, weights)?;
    let n = x.n();
    let mut eng = Engine::new(cfg, n)?;
    match metric.base() {
        Metric::Ulam => {
            // longest-common-subsequence work resists cap-bounded rounds;
            // charged as a single helper call instead
            eng.oracle("ulam-distance", ulam_oracle_charge(n, cfg.epsilon));
        }
        Metric::Kendall => kendall_distance_schedule(&mut eng, n, cfg, metric.is_weighted())?,
        _ => linear_distance_schedule(&mut eng, n, cfg, metric)?,
    }
    Ok((value, eng.finish()))
}

/// Positionwise distances: chunk both inputs, sum one partial per chunk.
fn linear_distance_schedule(
    eng: &mut Engine,
    n: usize,
    cfg: &MpcConfig,
    metric: Metric,
) -> Result<()> {
    let layout = chunks(n, cfg.epsilon);
    // words per position: both entries, plus both entries' weights if any
    let wpp = if metric.is_weighted() { 4 } else { 2 };
    let agg = layout.k as u64;
    eng.begin_round();
    for u in 0..layout.k {
        eng.send(u as u64, wpp * layout.len(u))?;
    }
    eng.begin_round();
    for u in 0..layout.k {
        eng.store_words(u as u64, wpp * layout.len(u))?;
        eng.send(agg, 1)?;
    }
    eng.store_words(agg, 1)?;
    Ok(())
}

/// Inversion counting over all ordered chunk pairs: `k^2` pair machines,
/// `k` chunk holders and one combiner.
fn kendall_distance_schedule(
    eng: &mut Engine,
    n: usize,
    cfg: &MpcConfig,
    weighted: bool,
) -> Result<()> {
    let layout = chunks(n, cfg.epsilon);
    let k = layout.k;
    // per position: own entry, peer rank of that entry, optional weight
    let wpp = if weighted { 3 } else { 2 };
    let agg = k as u64;
    let pair = |u: usize, v: usize| (k + 1 + u * k + v) as u64;
    eng.begin_round(); // 1: chunk holders get their slices
    for u in 0..k {
        eng.send(u as u64, wpp * layout.len(u))?;
    }
    eng.begin_round(); // 2: every pair machine gets its two chunks
    for u in 0..k {
        eng.store_words(u as u64, wpp * layout.len(u))?;
        for v in 0..k {
            eng.send(pair(u, v), wpp * layout.len(u))?;
            eng.send(pair(v, u), wpp * layout.len(u))?;
        }
    }
    eng.begin_round(); // 3: pair machines persist and count locally
    for u in 0..k {
        for v in 0..k {
            eng.store_words(pair(u, v), wpp * (layout.len(u) + layout.len(v)))?;
        }
    }
    eng.begin_round(); // 4: one partial per pair machine
    for _ in 0..k * k {
        eng.send(agg, 1)?;
    }
    eng.begin_round(); // 5: combine
    eng.store_words(agg, 1)?;
    Ok(())
}

/// Majority-vote median, distributed by position chunks; bit-identical to
/// [`solvers::hamming_majority_median`].
pub fn mpc_hamming_median(q: &Instance, cfg: &MpcConfig) -> Result<(Permutation, MpcTrace)> {
    let median = solvers::hamming_majority_median(q);
    let trace = positional_median_schedule(q, cfg)?;
    Ok((median, trace))
}

/// Position-median ranking, distributed by position chunks; bit-identical to
/// [`solvers::footrule_median`].
pub fn mpc_footrule_median(q: &Instance, cfg: &MpcConfig) -> Result<(Permutation, MpcTrace)> {
    let median = solvers::footrule_median(q);
    let trace = positional_median_schedule(q, cfg)?;
    Ok((median, trace))
}

/// Shared schedule of the two positional medians: chunk columns, summarize
/// per position, resolve the global order on one combiner, scatter back.
fn positional_median_schedule(q: &Instance, cfg: &MpcConfig) -> Result<MpcTrace> {
    let n = q.n();
    let m = q.m();
    let layout = chunks(n, cfg.epsilon);
    let mut eng = Engine::new(cfg, n)?;
    let agg = layout.k as u64;
    eng.begin_round(); // 1: all members' entries for the chunk's positions
    for u in 0..layout.k {
        eng.send(u as u64, m * layout.len(u))?;
    }
    eng.begin_round(); // 2: one summary word per position to the combiner
    for u in 0..layout.k {
        eng.store_words(u as u64, m * layout.len(u))?;
        eng.send(agg, layout.len(u))?;
    }
    eng.begin_round(); // 3: combiner resolves fills/ranks, scatters chunks
    eng.store_words(agg, 2 * n)?;
    for u in 0..layout.k {
        eng.send(u as u64, layout.len(u))?;
    }
    eng.begin_round(); // 4: chunk machines persist their output slice
    for u in 0..layout.k {
        eng.store_words(u as u64, layout.len(u))?;
    }
    eng.begin_round(); // 5: emit
    Ok(eng.finish())
}

/// Distributed multi-pivot quicksort median for the inversion objective.
///
/// Computes [`solvers::multilevel_kwiksort`] with [`mpc_pivot_cap`] pivots
/// per group over a fixed budget of [`KENDALL_MEDIAN_LEVELS`] levels (the
/// offline solver recurses single-pivot to completion instead, so values
/// agree statistically, not bitwise).  Every level spends
/// [`ROUNDS_PER_KENDALL_LEVEL`] rounds even when already sorted, keeping the
/// round count a constant of the schedule.
pub fn mpc_kendall_median(
    q: &Instance,
    seed: u64,
    cfg: &MpcConfig,
) -> Result<(Permutation, MpcTrace)> {
    let n = q.n();
    let m = q.m();
    let t = MajorityTournament::from_instance(q);
    let (order, levels) = solvers::multilevel_kwiksort_traced(
        &t,
        seed,
        mpc_pivot_cap(n, cfg.epsilon),
        KENDALL_MEDIAN_LEVELS,
    );
    let median = Permutation::from_forward(order).expect("sort emits each item once");

    let layout = chunks(n, cfg.epsilon);
    let mut eng = Engine::new(cfg, n)?;
    let out = layout.k as u64;
    let chunk_of = |slot: usize| (slot / layout.b) as u64;
    let span = |start: usize, len: usize| (start / layout.b)..=((start + len - 1) / layout.b);
    let overlap = |start: usize, len: usize, u: usize| -> usize {
        let cs = u * layout.b;
        let ce = cs + layout.len(u);
        (start + len).min(ce).saturating_sub(start.max(cs))
    };
    eng.begin_round(); // distribute: per slot, the item and its rank in every member
    for u in 0..layout.k {
        let w = (m + 1) * layout.len(u);
        eng.send(u as u64, w)?;
        eng.store_words(u as u64, w)?;
    }
    for level in 0..KENDALL_MEDIAN_LEVELS {
        let rec = levels.get(level);
        eng.begin_round(); // L1: group roots request their pivot slots
        if let Some(rec) = rec {
            for g in &rec.groups {
                for &slot in &g.pivot_slots {
                    eng.send(chunk_of(slot), 2)?;
                }
            }
        }
        eng.begin_round(); // L2: pivot rank vectors to the root
        if let Some(rec) = rec {
            for g in &rec.groups {
                eng.send(chunk_of(g.start), g.pivot_slots.len() * (m + 1))?;
            }
        }
        eng.begin_round(); // L3: pivot table broadcast over the group span
        if let Some(rec) = rec {
            for g in &rec.groups {
                for u in span(g.start, g.len) {
                    eng.send(u as u64, g.pivot_slots.len() * (m + 1))?;
                }
            }
        }
        eng.begin_round(); // L4: per-chunk bucket counts back to the root
        if let Some(rec) = rec {
            for g in &rec.groups {
                let root = chunk_of(g.start);
                for _u in span(g.start, g.len) {
                    eng.send(root, g.pivot_slots.len() + 1)?;
                }
            }
        }
        eng.begin_round(); // L5: bucket offsets out, new group descriptors
        if let Some(rec) = rec {
            for g in &rec.groups {
                let root = chunk_of(g.start);
                for u in span(g.start, g.len) {
                    eng.send(u as u64, g.pivot_slots.len() + 1)?;
                }
                for _bucket in 0..=g.pivot_slots.len() {
                    eng.send(root, 3)?;
                }
            }
        }
        eng.begin_round(); // L6: items re-route to their new slots
        if let Some(rec) = rec {
            for g in &rec.groups {
                for u in span(g.start, g.len) {
                    let ov = overlap(g.start, g.len, u);
                    if ov > 0 {
                        eng.send(u as u64, ov * (m + 1))?;
                    }
                }
            }
        }
    }
    eng.begin_round(); // gather the final layout
    for u in 0..layout.k {
        eng.send(out, layout.len(u))?;
    }
    eng.store_words(out, n)?;
    Ok((median, eng.finish()))
}

/// Distributed block-reconstruction median for the move objective;
/// bit-identical to [`reconstruct::scalable_median_reconstruct`].
///
/// Phase 1 distributes the five inputs and fans window tuples out to one
/// machine each; phase 2 reduces 14-word tuple summaries onto a single
/// composition machine; phase 3 pulls the chosen block texts; phase 4 rounds
/// and broadcasts the result.  The summary reduction needs a higher polylog
/// memory factor than the flat schedules, so the engine runs with `kappa`
/// raised to at least 8.
pub fn mpc_ulam_reconstruct(
    q: &Instance,
    params: &ReconstructParams,
    cfg: &MpcConfig,
) -> Result<(ReconstructReport, MpcTrace)> {
    if q.m() != 5 {
        return Err(Error::InvalidInput(format!(
            "reconstruction takes exactly 5 permutations, got {}",
            q.m()
        )));
    }
    let relaxed = MpcConfig {
        kappa: cfg.kappa.max(8),
        ..*cfg
    };
    let n = q.n();
    let grid = reconstruct::window_grid(n, params)?;
    let layout = grid.layout;
    let k = layout.k;
    let mut eng = Engine::new(&relaxed, n)?;
    let coordinator = k as u64;
    let dp = k as u64 + 1;
    let tuple_base = k as u64 + 2;

    eng.begin_round(); // 1: distribute all five inputs over the chunk machines
    for _ in 0..5 {
        distribute_permutation(&mut eng, &layout, 0)?;
    }
    for u in 0..k {
        eng.store_words(u as u64, 10 * layout.len(u))?;
    }
    eng.begin_round(); // 2: position reports to the coordinator, which answers
                       // with the window plan plus the consensus shortlists
                       // that guide tuple enumeration
    for u in 0..k {
        eng.send(coordinator, 10 * layout.len(u))?;
    }
    eng.store_words(coordinator, 6)?;
    for u in 0..k {
        eng.send(u as u64, 6 + 10 * reconstruct::GUIDED_PER_COORD)?;
    }

    eng.begin_round(); // 3: route every tuple's five substrings to its machine
    let mut cands: Vec<Vec<reconstruct::CandidateBlock>> = Vec::with_capacity(k);
    let mut stats = Vec::with_capacity(k);
    let mut machine_of: Vec<Vec<u64>> = Vec::with_capacity(k);
    let mut tuple_words: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut next_machine = tuple_base;
    let mut routing_error: Option<Error> = None;
    for j in 0..k {
        let mut list = Vec::new();
        let mut ids = Vec::new();
        let mut words = Vec::new();
        let st = reconstruct::for_each_tuple_guided(&grid, q, j, params.tuple_cap, &mut |ws| {
            if routing_error.is_some() {
                return;
            }
            let tm = next_machine;
            next_machine += 1;
            let mut received = 0;
            for w in &ws {
                if let Err(e) = eng.send(tm, w.len() + 2) {
                    routing_error = Some(e);
                    return;
                }
                received += w.len() + 2;
            }
            let group: [&[usize]; 5] =
                std::array::from_fn(|i| &q.perms[i].forward()[ws[i].s - 1..ws[i].e - 1]);
            let text = reconstruct::block_reconstruction(group, layout.len(j));
            let objective = (0..5).map(|i| reconstruct::seq_indel(&text, group[i])).sum();
            ids.push(tm);
            words.push(received + text.len() + 1);
            list.push(reconstruct::CandidateBlock {
                block: j,
                text,
                windows: ws,
                objective,
            });
        });
        if let Some(e) = routing_error.take() {
            return Err(e);
        }
        stats.push(reconstruct::BlockTupleStats {
            block: j,
            tuple_count: st.count,
            truncated: st.truncated,
        });
        cands.push(list);
        machine_of.push(ids);
        tuple_words.push(words);
    }
    eng.begin_round(); // 4: tuple machines persist input plus candidate text
    for (ids, words) in machine_of.iter().zip(&tuple_words) {
        for (&tm, &w) in ids.iter().zip(words) {
            eng.store_words(tm, w)?;
        }
    }
    eng.begin_round(); // 5: 14-word summaries to the composition machine
    let total_tuples: usize = cands.iter().map(Vec::len).sum();
    for _ in 0..total_tuples {
        eng.send(dp, 14)?;
    }
    eng.begin_round(); // 6: composition dynamic program
    eng.store_words(dp, 14 * total_tuples)?;
    let comp = reconstruct::compose_blocks(&cands, &layout);
    eng.begin_round(); // 7: request the chosen texts
    for (j, choice) in comp.chosen.iter().enumerate() {
        if let Some(ai) = choice {
            eng.send(machine_of[j][*ai], 2)?;
        }
    }
    eng.begin_round(); // 8: chosen texts back to the composition machine
    for (j, choice) in comp.chosen.iter().enumerate() {
        if let Some(ai) = choice {
            eng.send(dp, cands[j][*ai].text.len() + 2)?;
            eng.store_words(dp, cands[j][*ai].text.len() + 2)?;
        }
    }
    eng.begin_round(); // 9: round to a permutation, broadcast the result
    let median = reconstruct::postprocess(&comp.intermediate, n)?;
    for u in 0..k {
        eng.send(u as u64, layout.len(u))?;
    }
    eng.begin_round(); // 10: emit
    Ok((
        ReconstructReport {
            median,
            block_ed: comp.block_ed,
            blocks: stats,
        },
        eng.finish(),
    ))
}

/// Combine traces of units that ran side by side on disjoint machines.
fn merge_parallel(traces: &[MpcTrace]) -> MpcTrace {
    MpcTrace {
        rounds: traces.iter().map(|t| t.rounds).max().unwrap_or(0),
        machines_used: traces.iter().map(|t| t.machines_used).sum(),
        peak_words_per_machine: traces
            .iter()
            .map(|t| t.peak_words_per_machine)
            .max()
            .unwrap_or(0),
        total_words: traces.iter().map(|t| t.total_words).sum(),
        total_messages: traces.iter().map(|t| t.total_messages).sum(),
        oracle_calls: traces.iter().flat_map(|t| t.oracle_calls.clone()).collect(),
        failed: traces.iter().any(|t| t.failed),
    }
}

/// Chain phase traces that ran one after the other (machine ids disjoint
/// across phases).
fn merge_sequential(phases: &[MpcTrace]) -> MpcTrace {
    MpcTrace {
        rounds: phases.iter().map(|t| t.rounds).sum(),
        machines_used: phases.iter().map(|t| t.machines_used).sum(),
        peak_words_per_machine: phases
            .iter()
            .map(|t| t.peak_words_per_machine)
            .max()
            .unwrap_or(0),
        total_words: phases.iter().map(|t| t.total_words).sum(),
        total_messages: phases.iter().map(|t| t.total_messages).sum(),
        oracle_calls: phases.iter().flat_map(|t| t.oracle_calls.clone()).collect(),
        failed: phases.iter().any(|t| t.failed),
    }
}

/// Distributed sampling driver: the same candidate, subset, solver-seed, and
/// evaluation streams as [`crate::slack::aggregate`] with the metric's
/// default solver, with subset solving and candidate scoring delegated to
/// the distributed algorithms.
///
/// For the Hamming, displacement, and move objectives the returned result is
/// bit-identical to the in-memory driver; for the inversion objective the
/// distributed quicksort variant stands in for the single-pivot solver.
/// The trace stacks three phases: parallel subset solves, parallel candidate
/// scoring, and a two-round mean-selection tournament.
pub fn mpc_aggregate(
    p: &Instance,
    metric: Metric,
    fw: &FrameworkConfig,
    cfg: &MpcConfig,
    recon: &ReconstructParams,
) -> Result<(AggregationResult, MpcTrace)> {
    fw.validate()?;
    cfg.validate()?;
    let m = p.m();
    if fw.r != metric.subset_size() {
        return Err(Error::InvalidInput(format!(
            "metric {} solves subsets of {}, config says r = {}",
            metric.name(),
            metric.subset_size(),
            fw.r
        )));
    }
    if m < fw.r {
        return Err(Error::InvalidInput(format!(
            "need at least r = {} members, instance has {m}",
            fw.r
        )));
    }
    let mut candidates = Vec::with_capacity(fw.candidate_samples + fw.subset_samples);
    let mut provenance = Vec::with_capacity(candidates.capacity());
    for t in 0..fw.candidate_samples {
        let i = subrng(fw.seed, "cand", t as u64).gen_range(0..m);
        candidates.push(p.perms[i].clone());
        provenance.push(Provenance::SampledInput { member: i });
    }
    let mut solve_traces = Vec::with_capacity(fw.subset_samples);
    for t in 0..fw.subset_samples {
        let mut rng = subrng(fw.seed, "subset", t as u64);
        let subset = sample_distinct(&mut rng, m, fw.r);
        let q = p.subset(&subset)?;
        let solver_seed = subrng(fw.seed, "solver", t as u64).gen();
        let (x, trace) = match metric.base() {
            Metric::Hamming => mpc_hamming_median(&q, cfg)?,
            Metric::Footrule => mpc_footrule_median(&q, cfg)?,
            Metric::Kendall => mpc_kendall_median(&q, solver_seed, cfg)?,
            Metric::Ulam => {
                let (report, trace) = mpc_ulam_reconstruct(&q, recon, cfg)?;
                (report.median, trace)
            }
            _ => unreachable!("base metrics only"),
        };
        candidates.push(x);
        provenance.push(Provenance::LocalSolution { subset });
        solve_traces.push(trace);
    }
    let members = evaluation_members(p, fw);
    let w = p.weights.as_ref();
    let mut eval_traces = Vec::with_capacity(candidates.len() * members.len());
    let mut best: Option<(usize, f64)> = None;
    for (ci, x) in candidates.iter().enumerate() {
        let mut tot = 0.0;
        for &i in &members {
            let (v, trace) = mpc_distance(metric, x, &p.perms[i], w, cfg)?;
            tot += v;
            eval_traces.push(trace);
        }
        let est = tot / members.len() as f64;
        if best.map_or(true, |(_, b)| est < b) {
            best = Some((ci, est));
        }
    }
    let (bi, estimated_cost) = best.expect("candidate pool is nonempty");
    let result = AggregationResult {
        median: candidates[bi].clone(),
        estimated_cost,
        exact_cost: fw.test_mode.then_some(estimated_cost),
        candidate_count: candidates.len(),
        provenance: provenance[bi].clone(),
    };
    let evals = eval_traces.len();
    let nc = candidates.len();
    let selection = MpcTrace {
        rounds: 2,
        machines_used: nc + 1,
        peak_words_per_machine: members.len().max(nc),
        total_words: (evals + nc) as u64,
        total_messages: (evals + nc) as u64,
        oracle_calls: Vec::new(),
        failed: false,
    };
    let trace = merge_sequential(&[
        merge_parallel(&solve_traces),
        merge_parallel(&eval_traces),
        selection,
    ]);
    Ok((result, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::slack;
    use crate::solvers::default_solver;

    #[test]
    fn word_cap_examples() {
        let cfg = MpcConfig::default();
        assert_eq!(cfg.word_cap(16), 64); // 4 * 4 * 4
        assert_eq!(cfg.word_cap(64), 192); // 4 * 8 * 6
        assert_eq!(cfg.word_cap(256), 512); // 4 * 16 * 8
        let relaxed = MpcConfig {
            kappa: 8,
            ..MpcConfig::default()
        };
        assert_eq!(relaxed.word_cap(16), 4 * 4 * 65536);
    }

    #[test]
    fn chunk_layout_matches_reconstruction() {
        let l = chunks(64, 0.5);
        assert_eq!((l.k, l.b), (8, 8));
    }

    #[test]
    fn linear_distance_rounds_and_value() {
        let cfg = MpcConfig::default();
        for n in [16usize, 64, 256] {
            let mut rng = crate::rng::subrng(5, "test", n as u64);
            let x = Permutation::random(n, &mut rng);
            let y = Permutation::random(n, &mut rng);
            let (v, tr) = mpc_distance(Metric::Hamming, &x, &y, None, &cfg).unwrap();
            assert_eq!(v, dist::distance(Metric::Hamming, &x, &y, None).unwrap());
            assert_eq!(tr.rounds, ROUNDS_LINEAR_DISTANCE, "n = {n}");
            assert!(!tr.failed);
            let (v2, tr2) = mpc_distance(Metric::Footrule, &x, &y, None, &cfg).unwrap();
            assert_eq!(v2, dist::distance(Metric::Footrule, &x, &y, None).unwrap());
            assert_eq!(tr2.rounds, ROUNDS_LINEAR_DISTANCE);
        }
    }

    #[test]
    fn kendall_distance_machine_formula() {
        let cfg = MpcConfig::default();
        for (n, k) in [(16usize, 4usize), (64, 8), (256, 16)] {
            let mut rng = crate::rng::subrng(6, "test", n as u64);
            let x = Permutation::random(n, &mut rng);
            let y = Permutation::random(n, &mut rng);
            let (v, tr) = mpc_distance(Metric::Kendall, &x, &y, None, &cfg).unwrap();
            assert_eq!(v, dist::distance(Metric::Kendall, &x, &y, None).unwrap());
            assert_eq!(tr.rounds, ROUNDS_KENDALL_DISTANCE);
            assert_eq!(tr.machines_used, k * k + k + 1, "n = {n}");
        }
    }

    #[test]
    fn ulam_distance_is_an_oracle_call() {
        let cfg = MpcConfig::default();
        let mut rng = crate::rng::subrng(7, "test", 0);
        let x = Permutation::random(32, &mut rng);
        let y = Permutation::random(32, &mut rng);
        let (v, tr) = mpc_distance(Metric::Ulam, &x, &y, None, &cfg).unwrap();
        assert_eq!(v, dist::distance(Metric::Ulam, &x, &y, None).unwrap());
        assert_eq!(tr.rounds, 0);
        assert_eq!(tr.oracle_calls.len(), 1);
        assert_eq!(tr.oracle_calls[0].kind, "ulam-distance");
        // ceil(32^1.5) * ceil(log2 32) = 182 * 5
        assert_eq!(tr.oracle_calls[0].word_charge, 182 * 5);
    }

    #[test]
    fn positional_medians_match_offline() {
        let cfg = MpcConfig::default();
        for seed in 0..10 {
            let q = gen::uniform_instance(16, 3, 800 + seed);
            let (h, tr) = mpc_hamming_median(&q, &cfg).unwrap();
            assert_eq!(h, solvers::hamming_majority_median(&q));
            assert_eq!(tr.rounds, ROUNDS_POSITIONAL_MEDIAN);
            assert!(!tr.failed);
            let (f, tf) = mpc_footrule_median(&q, &cfg).unwrap();
            assert_eq!(f, solvers::footrule_median(&q));
            assert_eq!(tf.rounds, ROUNDS_POSITIONAL_MEDIAN);
        }
    }

    #[test]
    fn kendall_median_rounds_are_schedule_constants() {
        let cfg = MpcConfig::default();
        for n in [16usize, 64] {
            let q = gen::uniform_instance(n, 3, 31 + n as u64);
            let (x, tr) = mpc_kendall_median(&q, 99, &cfg).unwrap();
            assert_eq!(x.n(), n);
            assert_eq!(tr.rounds, ROUNDS_KENDALL_MEDIAN, "n = {n}");
            assert!(!tr.failed);
            // deterministic
            let (y, _) = mpc_kendall_median(&q, 99, &cfg).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn reconstruct_matches_offline_pipeline() {
        let cfg = MpcConfig::default();
        let params = ReconstructParams {
            tuple_cap: 400,
            ..ReconstructParams::default()
        };
        for seed in 0..5 {
            let (q, _) = gen::planted_instance(16, 5, 1, 4400 + seed);
            let offline = reconstruct::scalable_median_reconstruct(&q, &params).unwrap();
            let (dist_rep, tr) = mpc_ulam_reconstruct(&q, &params, &cfg).unwrap();
            assert_eq!(dist_rep.median, offline.median, "seed {seed}");
            assert_eq!(dist_rep.block_ed, offline.block_ed);
            assert_eq!(dist_rep.blocks, offline.blocks);
            assert_eq!(tr.rounds, ROUNDS_RECONSTRUCT);
            assert!(!tr.failed);
        }
    }

    #[test]
    fn aggregate_matches_offline_for_hamming() {
        let cfg = MpcConfig::default();
        let recon = ReconstructParams::default();
        for seed in 0..3 {
            let p = gen::uniform_instance(16, 6, 900 + seed);
            let fw = FrameworkConfig {
                test_mode: true,
                ..FrameworkConfig::for_instance(Metric::Hamming, 16, 6, 0.5, 17 + seed).unwrap()
            };
            let offline =
                slack::aggregate(&p, Metric::Hamming, &fw, default_solver(Metric::Hamming).as_ref())
                    .unwrap();
            let (mpc_res, tr) = mpc_aggregate(&p, Metric::Hamming, &fw, &cfg, &recon).unwrap();
            assert_eq!(mpc_res.median, offline.median, "seed {seed}");
            assert_eq!(mpc_res.estimated_cost, offline.estimated_cost);
            assert_eq!(mpc_res.candidate_count, offline.candidate_count);
            assert!(!tr.failed);
            assert_eq!(
                tr.rounds,
                ROUNDS_POSITIONAL_MEDIAN + ROUNDS_LINEAR_DISTANCE + 2
            );
        }
    }

    #[test]
    fn tiny_cap_fails_with_trace() {
        let cfg = MpcConfig {
            c: 0.05,
            ..MpcConfig::default()
        };
        let q = gen::uniform_instance(64, 8, 1).clone();
        match mpc_hamming_median(&q, &cfg) {
            Err(Error::CapExceeded {
                trace, words, cap, ..
            }) => {
                assert!(trace.failed);
                assert!(words > cap);
            }
            other => panic!("expected a cap violation, got {other:?}"),
        }
    }

    #[test]
    fn machine_budget_is_enforced() {
        let cfg = MpcConfig {
            machine_budget: 3,
            ..MpcConfig::default()
        };
        let q = gen::uniform_instance(64, 3, 2);
        assert!(matches!(
            mpc_hamming_median(&q, &cfg),
            Err(Error::MachineBudget { .. })
        ));
    }

    #[test]
    fn trace_serializes_round_trip() {
        let cfg = MpcConfig::default();
        let mut rng = crate::rng::subrng(8, "test", 0);
        let x = Permutation::random(16, &mut rng);
        let y = Permutation::random(16, &mut rng);
        let (_, tr) = mpc_distance(Metric::Kendall, &x, &y, None, &cfg).unwrap();
        let json = serde_json::to_string(&tr).unwrap();
        assert!(json.contains("machinesUsed"));
        assert!(json.contains("peakWordsPerMachine"));
        let back: MpcTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tr);
    }
}
