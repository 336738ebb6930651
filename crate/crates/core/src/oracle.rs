//! Exact exhaustive co-allocation for desk-size instances: enumerates every
//! task partition (up to core relabeling) crossed with every per-core
//! resource split, and keeps the true Pareto front. Ground truth for the
//! heuristic search and for external ILP solvers.

use alloc::vec::Vec;

use crate::model::{edf_schedulable, SystemConfig, TaskSet};
use crate::pareto::{CompleteSolution, ParetoSet};

/// Search-space guard. Instances beyond these extents are refused unless the
/// caller raises the limits explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_tasks: usize,
    pub max_cores: u32,
    pub max_bandwidth: u32,
    pub max_cache: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_tasks: 8, max_cores: 3, max_bandwidth: 5, max_cache: 5 }
    }
}

impl OracleLimits {
    /// Effectively no guard; pair with small inputs or a lot of patience.
    pub fn unbounded() -> Self {
        Self {
            max_tasks: usize::MAX,
            max_cores: u32::MAX,
            max_bandwidth: u32::MAX,
            max_cache: u32::MAX,
        }
    }
}

/// How cores without tasks are treated.
///
/// By default idle cores receive nothing, which can only lower resource
/// usage. The ILP formulation instead forces every core to take at least one
/// partition of each resource; `IlpCompat` reproduces that accounting so
/// solver optima compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    #[default]
    AllowIdle,
    IlpCompat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitExceeded {
    pub quantity: &'static str,
    pub value: u64,
    pub limit: u64,
}

impl core::fmt::Display for LimitExceeded {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "instance exceeds the exhaustive-search guard: {} = {} > {} (raise the limit to force)",
            self.quantity, self.value, self.limit
        )
    }
}

impl core::error::Error for LimitExceeded {}

fn check_limits(tasks: &TaskSet, cfg: &SystemConfig, limits: &OracleLimits) -> Result<(), LimitExceeded> {
    let checks = [
        ("tasks", tasks.len() as u64, limits.max_tasks as u64),
        ("cores", cfg.cores as u64, limits.max_cores as u64),
        ("bandwidth partitions", cfg.bandwidth as u64, limits.max_bandwidth as u64),
        ("cache partitions", cfg.cache as u64, limits.max_cache as u64),
    ];
    for (quantity, value, limit) in checks {
        if value > limit {
            return Err(LimitExceeded { quantity, value, limit });
        }
    }
    Ok(())
}

/// Exact Pareto front under the default guard.
pub fn solve(tasks: &TaskSet, cfg: &SystemConfig, mode: OracleMode) -> Result<ParetoSet, LimitExceeded> {
    solve_with_limits(tasks, cfg, mode, &OracleLimits::default())
}

pub fn solve_with_limits(
    tasks: &TaskSet,
    cfg: &SystemConfig,
    mode: OracleMode,
    limits: &OracleLimits,
) -> Result<ParetoSet, LimitExceeded> {
    let mut front = ParetoSet::new();
    for_each_feasible(tasks, cfg, mode, limits, |s| {
        front.insert(s.clone());
    })?;
    Ok(front)
}

/// Streams every feasible complete solution the oracle enumerates, in its
/// deterministic enumeration order. Core-relabeled duplicates are skipped by
/// enumerating task partitions with blocks ordered by their smallest task.
pub fn for_each_feasible<F>(
    tasks: &TaskSet,
    cfg: &SystemConfig,
    mode: OracleMode,
    limits: &OracleLimits,
    mut visit: F,
) -> Result<(), LimitExceeded>
where
    F: FnMut(&CompleteSolution),
{
    check_limits(tasks, cfg, limits)?;
    debug_assert!(!tasks.is_empty());
    debug_assert!(tasks.profiles_match(cfg));

    let n = tasks.len();
    // Restricted-growth strings enumerate set partitions into at most
    // `cfg.cores` blocks exactly once, in canonical block order.
    let mut assignment = alloc::vec![0usize; n];
    loop {
        let blocks = 1 + assignment.iter().copied().max().unwrap_or(0);
        visit_partition(tasks, cfg, mode, &assignment, blocks, &mut visit);

        // Advance to the next restricted-growth string.
        let mut pos = n;
        loop {
            if pos <= 1 {
                return Ok(());
            }
            pos -= 1;
            let max_prefix = assignment[..pos].iter().copied().max().unwrap_or(0);
            if assignment[pos] <= max_prefix && assignment[pos] + 1 < cfg.cores as usize {
                assignment[pos] += 1;
                for a in &mut assignment[pos + 1..] {
                    *a = 0;
                }
                break;
            }
        }
    }
}

fn visit_partition<F>(
    tasks: &TaskSet,
    cfg: &SystemConfig,
    mode: OracleMode,
    assignment: &[usize],
    blocks: usize,
    visit: &mut F,
) where
    F: FnMut(&CompleteSolution),
{
    let idle = cfg.cores as usize - blocks;
    let reserve = match mode {
        OracleMode::AllowIdle => 0,
        OracleMode::IlpCompat => idle as u32,
    };
    if cfg.bandwidth < reserve + blocks as u32 || cfg.cache < reserve + blocks as u32 {
        return; // not enough partitions to give every counted core one
    }

    let mut block_tasks: Vec<Vec<usize>> = alloc::vec![Vec::new(); blocks];
    for (ti, &b) in assignment.iter().enumerate() {
        block_tasks[b].push(ti);
    }

    // Schedulability of each block under each grant, computed once.
    let bmax = cfg.bandwidth - reserve;
    let kmax = cfg.cache - reserve;
    let sched = |block: usize, b: u32, k: u32| -> bool {
        edf_schedulable(block_tasks[block].iter().map(|&ti| &tasks[ti]), b, k)
    };

    let b_splits = compositions(bmax, blocks);
    let k_splits = compositions(kmax, blocks);
    for b_vec in &b_splits {
        for k_vec in &k_splits {
            if (0..blocks).all(|i| sched(i, b_vec[i], k_vec[i])) {
                let mut core_tasks = block_tasks.clone();
                let mut bw = b_vec.clone();
                let mut cache = k_vec.clone();
                if mode == OracleMode::IlpCompat {
                    for _ in 0..idle {
                        core_tasks.push(Vec::new());
                        bw.push(1);
                        cache.push(1);
                    }
                }
                visit(&CompleteSolution::new(core_tasks, bw, cache));
            }
        }
    }
}

/// All vectors of `parts` positive integers summing to at most `total`,
/// in lexicographic order.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(parts);
    fn rec(total: u32, parts: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            out.push(current.clone());
            return;
        }
        // Leave at least one partition for each later part.
        let budget = total - (parts as u32 - 1);
        for v in 1..=budget {
            current.push(v);
            rec(total - v, parts - 1, current, out);
            current.pop();
        }
    }
    if total >= parts as u32 && parts > 0 {
        rec(total, parts, &mut current, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SlowdownProfile, TaskSpec};
    use crate::pareto::complete_dominates;
    use alloc::sync::Arc;
    use alloc::vec;

    fn profile_2x2(s11: f64, s21: f64, s12: f64) -> Arc<SlowdownProfile> {
        Arc::new(
            SlowdownProfile::new(
                "p",
                vec![vec![Some(s11), Some(s12)], vec![Some(s21), Some(1.0)]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn single_task_minimal_allocation() {
        let cfg = SystemConfig::new(1, 2, 2).unwrap();
        let p = profile_2x2(1.0, 1.0, 1.0);
        let tasks = TaskSet::new(vec![TaskSpec::new("t", 1.0, 0.5, p).unwrap()]).unwrap();
        let front = solve(&tasks, &cfg, OracleMode::AllowIdle).unwrap();
        assert_eq!(front.objectives(), vec![(1, 1)]);
    }

    #[test]
    fn incomparable_minimal_cells() {
        // Utilizations per cell: (1,1)=1.2, (2,1)=0.9, (1,2)=0.9, (2,2)=0.5.
        let cfg = SystemConfig::new(1, 2, 2).unwrap();
        let p = profile_2x2(2.4, 1.8, 1.8);
        let tasks = TaskSet::new(vec![TaskSpec::new("t", 1.0, 0.5, p).unwrap()]).unwrap();
        let front = solve(&tasks, &cfg, OracleMode::AllowIdle).unwrap();
        let mut objectives = front.objectives();
        objectives.sort_unstable();
        assert_eq!(objectives, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn infeasible_instance_gives_empty_front() {
        let cfg = SystemConfig::new(2, 2, 2).unwrap();
        let p = profile_2x2(4.0, 4.0, 4.0);
        // Two tasks that cannot share a core and cannot both get the corner.
        let tasks = TaskSet::new(
            (0..2)
                .map(|i| TaskSpec::new(alloc::format!("t{i}"), 1.0, 0.9, p.clone()).unwrap())
                .collect(),
        )
        .unwrap();
        let front = solve(&tasks, &cfg, OracleMode::AllowIdle).unwrap();
        assert!(front.is_empty());
    }

    #[test]
    fn guard_refuses_oversized_instances() {
        let cfg = SystemConfig::new(4, 2, 2).unwrap();
        let p = profile_2x2(1.0, 1.0, 1.0);
        let tasks = TaskSet::new(vec![TaskSpec::new("t", 1.0, 0.5, p).unwrap()]).unwrap();
        let err = solve(&tasks, &cfg, OracleMode::AllowIdle).unwrap_err();
        assert_eq!(err.quantity, "cores");
        assert!(solve_with_limits(&tasks, &cfg, OracleMode::AllowIdle, &OracleLimits::unbounded()).is_ok());
    }

    #[test]
    fn ilp_compat_counts_idle_cores() {
        let cfg = SystemConfig::new(2, 3, 3).unwrap();
        let grid = (1..=3)
            .map(|_| (1..=3).map(|_| Some(1.0)).collect())
            .collect::<Vec<Vec<Option<f64>>>>();
        let p = Arc::new(SlowdownProfile::new("flat", grid).unwrap());
        let tasks = TaskSet::new(vec![TaskSpec::new("t", 1.0, 0.5, p).unwrap()]).unwrap();

        let idle = solve(&tasks, &cfg, OracleMode::AllowIdle).unwrap();
        assert_eq!(idle.objectives(), vec![(1, 1)]);

        // The single-task block takes (1,1) and the idle core another (1,1).
        let compat = solve(&tasks, &cfg, OracleMode::IlpCompat).unwrap();
        assert_eq!(compat.objectives(), vec![(2, 2)]);
        let sol = &compat.members()[0];
        assert_eq!(sol.core_tasks.len(), 2);
        assert!(sol.core_tasks[1].is_empty());
    }

    #[test]
    fn front_is_complete_over_enumeration() {
        let cfg = SystemConfig::new(2, 3, 3).unwrap();
        let grid: Vec<Vec<Option<f64>>> = (1..=3)
            .map(|b| {
                (1..=3)
                    .map(|k| Some(1.0 + 0.7 * (3 - b) as f64 + 0.4 * (3 - k) as f64))
                    .collect()
            })
            .collect();
        let p = Arc::new(SlowdownProfile::new("ramp", grid).unwrap());
        let tasks = TaskSet::new(
            (0..4)
                .map(|i| TaskSpec::new(alloc::format!("t{i}"), 1.0, 0.15 + 0.1 * i as f64, p.clone()).unwrap())
                .collect(),
        )
        .unwrap();
        let front = solve(&tasks, &cfg, OracleMode::AllowIdle).unwrap();
        let mut all = Vec::new();
        for_each_feasible(&tasks, &cfg, OracleMode::AllowIdle, &OracleLimits::default(), |s| {
            all.push(s.clone());
        })
        .unwrap();
        assert!(!all.is_empty());
        for s in &all {
            let covered = front
                .members()
                .iter()
                .any(|m| complete_dominates(m, s) || m.objectives() == s.objectives());
            assert!(covered, "feasible {:?} escapes the front", s.objectives());
        }
        // And the front itself is mutually non-dominated by construction.
        for (i, a) in front.members().iter().enumerate() {
            for (j, b) in front.members().iter().enumerate() {
                if i != j {
                    assert!(!complete_dominates(a, b));
                }
            }
        }
    }

    #[test]
    fn compositions_enumerate_expected_counts() {
        assert_eq!(compositions(5, 1).len(), 5);
        // Pairs (a,b), a,b >= 1, a+b <= 5: 4+3+2+1 = 10... counted per sum:
        // sum 2:1, 3:2, 4:3, 5:4 -> 10.
        assert_eq!(compositions(5, 2).len(), 10);
        assert_eq!(compositions(3, 4).len(), 0);
        assert!(compositions(0, 1).is_empty());
    }
}
