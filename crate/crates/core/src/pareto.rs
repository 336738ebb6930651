//! Solution representations, dominance relations, and the archives that keep
//! partial and complete solutions mutually non-dominated.
//!
//! Tasks are referred to by their index in the originating
//! [`TaskSet`](crate::model::TaskSet).

use alloc::vec::Vec;

use crate::model::{SystemConfig, TaskSet};

/// Remaining-demand comparisons treat values within this relative tolerance
/// as equal, so float noise in sums of the same constants cannot keep
/// near-duplicate partial solutions alive. Pruning slightly more is safe for
/// a heuristic.
pub const DEMAND_RELATIVE_TOLERANCE: f64 = 1e-12;

fn demand_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEMAND_RELATIVE_TOLERANCE * a.abs().max(b.abs())
}

/// `a <= b` where near-equal demands count as equal.
fn demand_le(a: f64, b: f64) -> bool {
    a <= b || demand_eq(a, b)
}

/// An allocation prefix: the first `depth()` cores have their task subsets and
/// `(b, k)` resource grants fixed; the rest of the system is summarized by the
/// remaining tasks, remaining partitions, and the remaining reference demand.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSolution {
    /// Task indices packed onto each allocated core, in allocation order.
    pub core_tasks: Vec<Vec<usize>>,
    /// Bandwidth partitions granted to each allocated core.
    pub core_bandwidth: Vec<u32>,
    /// Cache partitions granted to each allocated core.
    pub core_cache: Vec<u32>,
    /// Unassigned task indices, in task-set order.
    pub remaining_tasks: Vec<usize>,
    pub remaining_bandwidth: u32,
    pub remaining_cache: u32,
    /// Sum of reference utilizations over `remaining_tasks`.
    pub remaining_demand: f64,
}

impl PartialSolution {
    /// The empty prefix: nothing allocated, everything remaining.
    pub fn root(tasks: &TaskSet, cfg: &SystemConfig) -> Self {
        Self {
            core_tasks: Vec::new(),
            core_bandwidth: Vec::new(),
            core_cache: Vec::new(),
            remaining_tasks: (0..tasks.len()).collect(),
            remaining_bandwidth: cfg.bandwidth,
            remaining_cache: cfg.cache,
            remaining_demand: tasks.total_reference_utilization(),
        }
    }

    /// Number of cores allocated so far.
    pub fn depth(&self) -> usize {
        self.core_tasks.len()
    }

    pub fn is_complete(&self) -> bool {
        self.remaining_tasks.is_empty()
    }

    pub fn into_complete(self) -> CompleteSolution {
        debug_assert!(self.remaining_tasks.is_empty());
        CompleteSolution::new(self.core_tasks, self.core_bandwidth, self.core_cache)
    }

    /// Structural invariants, checked from debug builds and tests.
    pub fn debug_validate(&self, tasks: &TaskSet, cfg: &SystemConfig) {
        assert_eq!(self.core_tasks.len(), self.core_bandwidth.len());
        assert_eq!(self.core_tasks.len(), self.core_cache.len());
        assert!(self.depth() <= cfg.cores as usize);
        let used_b: u32 = self.core_bandwidth.iter().sum();
        let used_k: u32 = self.core_cache.iter().sum();
        assert_eq!(used_b + self.remaining_bandwidth, cfg.bandwidth);
        assert_eq!(used_k + self.remaining_cache, cfg.cache);
        let mut seen = alloc::vec![0u8; tasks.len()];
        for ti in self.core_tasks.iter().flatten().chain(&self.remaining_tasks) {
            seen[*ti] += 1;
        }
        assert!(seen.iter().all(|&c| c == 1), "every task appears exactly once");
        let demand: f64 = self
            .remaining_tasks
            .iter()
            .map(|&ti| tasks[ti].reference_utilization())
            .sum();
        assert!(demand_eq(demand, self.remaining_demand) || (demand - self.remaining_demand).abs() < 1e-9);
    }
}

/// A finished allocation: every task placed, objectives fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct CompleteSolution {
    pub core_tasks: Vec<Vec<usize>>,
    pub core_bandwidth: Vec<u32>,
    pub core_cache: Vec<u32>,
    pub used_bandwidth: u32,
    pub used_cache: u32,
}

impl CompleteSolution {
    pub fn new(core_tasks: Vec<Vec<usize>>, core_bandwidth: Vec<u32>, core_cache: Vec<u32>) -> Self {
        assert_eq!(core_tasks.len(), core_bandwidth.len());
        assert_eq!(core_tasks.len(), core_cache.len());
        let used_bandwidth = core_bandwidth.iter().sum();
        let used_cache = core_cache.iter().sum();
        Self { core_tasks, core_bandwidth, core_cache, used_bandwidth, used_cache }
    }

    pub fn objectives(&self) -> (u32, u32) {
        (self.used_bandwidth, self.used_cache)
    }

    /// Resources left over on the platform.
    pub fn remaining(&self, cfg: &SystemConfig) -> (u32, u32) {
        (cfg.bandwidth - self.used_bandwidth, cfg.cache - self.used_cache)
    }
}

/// Objective-space dominance between complete solutions: no worse on both
/// resources, strictly better on at least one. Equal objective vectors do not
/// dominate each other; duplicates are resolved at insertion time.
pub fn complete_dominates(a: &CompleteSolution, b: &CompleteSolution) -> bool {
    a.used_bandwidth <= b.used_bandwidth
        && a.used_cache <= b.used_cache
        && (a.used_bandwidth < b.used_bandwidth || a.used_cache < b.used_cache)
}

/// A candidate with `remaining` resources survives against the complete front
/// only if it strictly beats every member in at least one remaining-resource
/// coordinate. Matching a member exactly is not enough: such a branch can at
/// best tie a solution we already have.
pub fn not_dominated_by_complete(
    remaining_bandwidth: u32,
    remaining_cache: u32,
    front: &ParetoSet,
    cfg: &SystemConfig,
) -> bool {
    front.members().iter().all(|m| {
        let (mb, mk) = m.remaining(cfg);
        remaining_bandwidth > mb || remaining_cache > mk
    })
}

/// Inter-partial dominance: `a` survives against `b` if it has strictly more
/// of either remaining resource or strictly less remaining demand. Both
/// solutions must sit at the same search depth.
pub fn partial_not_dominated(a: &PartialSolution, b: &PartialSolution) -> bool {
    a.remaining_bandwidth > b.remaining_bandwidth
        || a.remaining_cache > b.remaining_cache
        || (a.remaining_demand < b.remaining_demand && !demand_eq(a.remaining_demand, b.remaining_demand))
}

/// Negation of [`partial_not_dominated`] seen from the incumbent's side:
/// `incumbent` covers `candidate` when it has at least as much of both
/// remaining resources and no more remaining demand (up to tolerance).
fn partial_covers(incumbent: &PartialSolution, candidate: &PartialSolution) -> bool {
    incumbent.remaining_bandwidth >= candidate.remaining_bandwidth
        && incumbent.remaining_cache >= candidate.remaining_cache
        && demand_le(incumbent.remaining_demand, candidate.remaining_demand)
}

/// Mutually non-dominated partial solutions of one search depth. Insertion
/// keeps the earliest-inserted member on exact ties, so the archive holds at
/// most one member per `(remaining_bandwidth, remaining_cache)` pair.
#[derive(Debug, Clone, Default)]
pub struct PartialArchive {
    members: Vec<PartialSolution>,
}

impl PartialArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts unless a member covers the candidate; evicts members the
    /// candidate covers. Returns whether the candidate was kept.
    pub fn insert(&mut self, candidate: PartialSolution) -> bool {
        if self.members.iter().any(|m| partial_covers(m, &candidate)) {
            return false;
        }
        self.members.retain(|m| !partial_covers(&candidate, m));
        self.members.push(candidate);
        true
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[PartialSolution] {
        &self.members
    }

    pub fn into_members(self) -> Vec<PartialSolution> {
        self.members
    }
}

/// Removes dominated members from a same-depth batch, keeping the earliest on
/// ties. The result holds at most one member per remaining-resource pair, so
/// its size is bounded by `(B + 1) * (K + 1)`.
pub fn prune_partials(batch: Vec<PartialSolution>) -> Vec<PartialSolution> {
    let mut archive = PartialArchive::new();
    for p in batch {
        archive.insert(p);
    }
    archive.into_members()
}

/// The complete non-dominated front. Members are kept in insertion order;
/// ties on the objective vector keep the incumbent.
#[derive(Debug, Clone, Default)]
pub struct ParetoSet {
    members: Vec<CompleteSolution>,
}

impl ParetoSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `s` unless some member dominates it or matches its objective
    /// vector exactly; members dominated by `s` are removed. Returns whether
    /// `s` joined the front.
    pub fn insert(&mut self, s: CompleteSolution) -> bool {
        let covered = self.members.iter().any(|m| {
            m.used_bandwidth <= s.used_bandwidth && m.used_cache <= s.used_cache
        });
        if covered {
            return false;
        }
        self.members.retain(|m| !complete_dominates(&s, m));
        self.members.push(s);
        true
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[CompleteSolution] {
        &self.members
    }

    pub fn objectives(&self) -> Vec<(u32, u32)> {
        self.members.iter().map(|m| m.objectives()).collect()
    }

    /// Least bandwidth used by any member, if the front is non-empty.
    pub fn min_bandwidth(&self) -> Option<u32> {
        self.members.iter().map(|m| m.used_bandwidth).min()
    }

    /// Least cache used by any member, if the front is non-empty.
    pub fn min_cache(&self) -> Option<u32> {
        self.members.iter().map(|m| m.used_cache).min()
    }

    pub fn hypervolume(&self, reference: (u32, u32)) -> u64 {
        hypervolume(&self.objectives(), reference)
    }
}

impl FromIterator<CompleteSolution> for ParetoSet {
    fn from_iter<T: IntoIterator<Item = CompleteSolution>>(iter: T) -> Self {
        let mut set = Self::new();
        for s in iter {
            set.insert(s);
        }
        set
    }
}

/// Area of objective space dominated by `points` (minimization on both axes)
/// up to `reference`. Points at or beyond the reference contribute nothing.
/// Dominated or duplicate input points are tolerated.
pub fn hypervolume(points: &[(u32, u32)], reference: (u32, u32)) -> u64 {
    let mut pts: Vec<(u32, u32)> = points.to_vec();
    pts.sort_unstable();
    let mut area = 0u64;
    let mut stair: Vec<(u32, u32)> = Vec::new();
    for p in pts {
        match stair.last() {
            Some(&(_, k)) if p.1 >= k => {} // dominated by the staircase so far
            _ => stair.push(p),
        }
    }
    for (i, &(b, k)) in stair.iter().enumerate() {
        let next_b = stair.get(i + 1).map_or(reference.0, |n| n.0).min(reference.0);
        let width = next_b.saturating_sub(b) as u64;
        let height = reference.1.saturating_sub(k) as u64;
        area += width * height;
    }
    area
}
