//! Core-by-core breadth-first exploration of resource grants with Pareto
//! pruning. Each search depth extends every live partial solution by all
//! `(b, k)` grants for the next core, packs tasks via the knapsack layer, and
//! keeps completions and surviving partials in non-dominated archives.

use alloc::vec::Vec;

use crate::knapsack;
use crate::model::{SystemConfig, TaskSet};
use crate::pareto::{
    not_dominated_by_complete, ParetoSet, PartialArchive, PartialSolution,
};

/// One `(b, k)` extension of a live partial solution, identified by its index
/// into the current depth's partial list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub partial: usize,
    pub bandwidth: u32,
    pub cache: u32,
}

/// Counters describing one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Search depths processed (at most the core count).
    pub iterations: u32,
    /// `(b, k)` grants enumerated across all depths.
    pub candidates_considered: u64,
    /// Candidates cut by dominance against the complete front, before or
    /// after task packing ran.
    pub pruned_by_front: u64,
    /// Task-packing (knapsack) invocations.
    pub allocations_run: u64,
    /// Extensions discarded because the remaining demand cannot fit the
    /// remaining cores even under full remaining resources.
    pub pruned_infeasible: u64,
    /// Largest live partial archive observed after any insertion.
    pub max_live_partials: usize,
    /// False when the run was abandoned through the abort hook.
    pub completed: bool,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub front: ParetoSet,
    pub stats: SolveStats,
}

/// Candidates are evaluated in batches of this size between abort checks.
pub const CANDIDATE_CHUNK: usize = 256;

/// Sufficient infeasibility test for a partial solution: the remaining tasks'
/// total utilization, computed as if every remaining core received all
/// remaining resources, is a lower bound on the demand still to be placed. If
/// even that exceeds the number of remaining cores the branch is dead. With
/// no resources left, any remaining task reads as infinite utilization.
pub fn remaining_demand_feasible(
    partial: &PartialSolution,
    tasks: &TaskSet,
    total_cores: u32,
) -> bool {
    if partial.remaining_tasks.is_empty() {
        return true;
    }
    let remaining_cores = total_cores as f64 - partial.depth() as f64;
    if partial.remaining_bandwidth == 0 || partial.remaining_cache == 0 {
        return false;
    }
    let mut demand = 0.0;
    for &ti in &partial.remaining_tasks {
        demand += tasks[ti].utilization(partial.remaining_bandwidth, partial.remaining_cache);
    }
    demand <= remaining_cores
}

/// Serial candidate evaluator: packs each candidate's core in order.
pub fn evaluate_candidates(
    tasks: &TaskSet,
    live: &[PartialSolution],
    batch: &[Candidate],
    gamma: u32,
) -> Vec<PartialSolution> {
    batch
        .iter()
        .map(|c| knapsack::allocate_tasks(&live[c.partial], tasks, c.bandwidth, c.cache, gamma))
        .collect()
}

/// Runs the full search and returns the non-dominated front. An empty front
/// means no complete allocation was found.
pub fn solve(tasks: &TaskSet, cfg: &SystemConfig, gamma: u32) -> ParetoSet {
    solve_report(tasks, cfg, gamma).front
}

/// Like [`solve`] but also returns run statistics.
pub fn solve_report(tasks: &TaskSet, cfg: &SystemConfig, gamma: u32) -> SolveReport {
    solve_with(tasks, cfg, gamma, CANDIDATE_CHUNK, evaluate_candidates, || false)
}

/// Full-control entry point. `evaluate` maps a batch of at most `chunk_size`
/// candidates to their packed extensions and must preserve batch order (the
/// serial evaluator and any order-preserving parallel map produce identical
/// fronts, because merge order and all tie rules are applied serially here).
/// `should_abort` is polled between batches; aborting yields a report with
/// `completed = false`.
pub fn solve_with<E, A>(
    tasks: &TaskSet,
    cfg: &SystemConfig,
    gamma: u32,
    chunk_size: usize,
    mut evaluate: E,
    mut should_abort: A,
) -> SolveReport
where
    E: FnMut(&TaskSet, &[PartialSolution], &[Candidate], u32) -> Vec<PartialSolution>,
    A: FnMut() -> bool,
{
    debug_assert!(!tasks.is_empty());
    debug_assert!(gamma >= 1);
    debug_assert!(tasks.profiles_match(cfg), "profile grids must match the platform extents");
    let chunk_size = chunk_size.max(1);

    let mut front = ParetoSet::new();
    let mut stats = SolveStats { completed: true, ..SolveStats::default() };
    let mut live = alloc::vec![PartialSolution::root(tasks, cfg)];

    for _depth in 1..=cfg.cores {
        if live.is_empty() {
            break;
        }
        stats.iterations += 1;

        // Grants enumerated bandwidth-major, cache-minor; the front snapshot
        // taken here only over-approximates survivors, the exact mid-depth
        // dominance check happens again at merge time below.
        let mut batch = Vec::new();
        for (pi, p) in live.iter().enumerate() {
            for b in 1..=p.remaining_bandwidth {
                for k in 1..=p.remaining_cache {
                    stats.candidates_considered += 1;
                    if not_dominated_by_complete(
                        p.remaining_bandwidth - b,
                        p.remaining_cache - k,
                        &front,
                        cfg,
                    ) {
                        batch.push(Candidate { partial: pi, bandwidth: b, cache: k });
                    } else {
                        stats.pruned_by_front += 1;
                    }
                }
            }
        }

        let mut next = PartialArchive::new();
        for chunk in batch.chunks(chunk_size) {
            if should_abort() {
                stats.completed = false;
                return SolveReport { front, stats };
            }
            let extended = evaluate(tasks, &live, chunk, gamma);
            debug_assert_eq!(extended.len(), chunk.len());
            stats.allocations_run += chunk.len() as u64;
            for (c, ext) in chunk.iter().zip(extended) {
                let p = &live[c.partial];
                // The front may have grown within this depth; re-check.
                if !not_dominated_by_complete(
                    p.remaining_bandwidth - c.bandwidth,
                    p.remaining_cache - c.cache,
                    &front,
                    cfg,
                ) {
                    stats.pruned_by_front += 1;
                    continue;
                }
                if ext.is_complete() {
                    front.insert(ext.into_complete());
                } else if remaining_demand_feasible(&ext, tasks, cfg.cores) {
                    next.insert(ext);
                    stats.max_live_partials = stats.max_live_partials.max(next.len());
                } else {
                    stats.pruned_infeasible += 1;
                }
            }
        }
        live = next.into_members();
    }

    SolveReport { front, stats }
}
