//! Task packing for one core as a 0-1 knapsack: item sizes are utilizations
//! under the core's `(b, k)` grant, scaled to integers with a ceiling so the
//! EDF bound stays safe; item values are reference utilizations, so the DP
//! maximizes the scheduling demand absorbed by the core.

use alloc::vec::Vec;

use crate::model::TaskSet;
use crate::pareto::PartialSolution;

/// One knapsack item. Items are positional: index `i` refers to the `i`-th
/// entry of the instance (for task packing, the `i`-th remaining task).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackItem {
    /// Scaled size, `ceil(utilization * capacity)`. Sizes above `capacity`
    /// (used for unavailable profile cells) can never be packed.
    pub size: u32,
    /// Reference utilization gained by packing the item.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    pub items: Vec<KnapsackItem>,
    pub capacity: u32,
}

/// A solution: achieved total value and the chosen item indices, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub value: f64,
    pub chosen: Vec<usize>,
}

/// Exact ceiling of a non-negative finite `x`, without relying on `std`.
fn ceil_u64(x: f64) -> u64 {
    debug_assert!(x.is_finite() && x >= 0.0);
    let t = x as u64; // truncates toward zero
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}

/// Scaled item size for a utilization: `ceil(u * capacity)`, saturated to
/// `capacity + 1` for anything that cannot fit (including infinity).
pub fn scaled_size(utilization: f64, capacity: u32) -> u32 {
    debug_assert!(utilization > 0.0);
    if !utilization.is_finite() {
        return capacity + 1;
    }
    let x = utilization * capacity as f64;
    if x >= (capacity + 1) as f64 {
        return capacity + 1;
    }
    let s = ceil_u64(x) as u32;
    debug_assert!(s >= 1, "positive utilization scales to at least 1");
    s.min(capacity + 1)
}

/// Dynamic-programming solver. Value ties in the recurrence resolve toward
/// exclusion, which keeps the backtracking test (`dp[i][j] != dp[i-1][j]`)
/// consistent: an item is reported chosen only when it strictly improved the
/// cell. Value comparisons are exact.
pub fn solve_dp(instance: &KnapsackInstance) -> Selection {
    let n = instance.items.len();
    let cap = instance.capacity as usize;
    let width = cap + 1;

    let mut dp: Vec<f64> = Vec::with_capacity((n + 1) * width);
    dp.extend(core::iter::repeat(0.0).take(width));
    for i in 1..=n {
        let item = instance.items[i - 1];
        let u = item.size as usize;
        let prev = (i - 1) * width;
        if u > cap {
            dp.extend_from_within(prev..prev + width);
            continue;
        }
        dp.extend_from_within(prev..prev + u);
        for j in u..width {
            let exclude = dp[prev + j];
            let include = dp[prev + j - u] + item.value;
            dp.push(if include > exclude { include } else { exclude });
        }
    }

    let mut chosen = Vec::new();
    let mut j = cap;
    for i in (1..=n).rev() {
        if dp[i * width + j] != dp[(i - 1) * width + j] {
            chosen.push(i - 1);
            j -= instance.items[i - 1].size as usize;
        }
    }
    chosen.reverse();
    Selection { value: dp[n * width + cap], chosen }
}

/// Instances beyond this size are refused by [`solve_exhaustive`].
pub const EXHAUSTIVE_ITEM_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TooManyItems {
    pub count: usize,
}

impl core::fmt::Display for TooManyItems {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "exhaustive knapsack limited to {EXHAUSTIVE_ITEM_LIMIT} items, got {}",
            self.count
        )
    }
}

impl core::error::Error for TooManyItems {}

/// Reference solver: enumerates all `2^n` subsets. Value accumulation runs in
/// ascending item order, matching the DP's accumulation order, so optimal
/// values compare exactly. Value ties go to the lexicographically smallest
/// index set.
pub fn solve_exhaustive(instance: &KnapsackInstance) -> Result<Selection, TooManyItems> {
    let n = instance.items.len();
    if n > EXHAUSTIVE_ITEM_LIMIT {
        return Err(TooManyItems { count: n });
    }
    let mut best = Selection { value: 0.0, chosen: Vec::new() };
    for mask in 1u32..(1u32 << n) {
        let mut size = 0u64;
        let mut value = 0.0f64;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                size += instance.items[i].size as u64;
                value += instance.items[i].value;
            }
        }
        if size > instance.capacity as u64 {
            continue;
        }
        if value > best.value {
            best.value = value;
            best.chosen = bits(mask, n);
        } else if value == best.value {
            let candidate = bits(mask, n);
            if candidate < best.chosen {
                best.chosen = candidate;
            }
        }
    }
    Ok(best)
}

fn bits(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

/// Builds the knapsack instance a core with grant `(b, k)` poses for the
/// remaining tasks of `partial`.
pub fn instance_for(
    partial: &PartialSolution,
    tasks: &TaskSet,
    bandwidth: u32,
    cache: u32,
    gamma: u32,
) -> KnapsackInstance {
    let items = partial
        .remaining_tasks
        .iter()
        .map(|&ti| {
            let t = &tasks[ti];
            KnapsackItem {
                size: scaled_size(t.utilization(bandwidth, cache), gamma),
                value: t.reference_utilization(),
            }
        })
        .collect();
    KnapsackInstance { items, capacity: gamma }
}

/// Extends `partial` by one core holding `b` bandwidth and `k` cache
/// partitions, packed with the maximal-demand subset of the remaining tasks
/// that the scaled EDF bound admits. The chosen subset always satisfies the
/// unscaled bound as well, since the ceiling only tightens item sizes. The
/// subset may be empty.
pub fn allocate_tasks(
    partial: &PartialSolution,
    tasks: &TaskSet,
    bandwidth: u32,
    cache: u32,
    gamma: u32,
) -> PartialSolution {
    assert!(gamma >= 1);
    assert!(bandwidth >= 1 && bandwidth <= partial.remaining_bandwidth);
    assert!(cache >= 1 && cache <= partial.remaining_cache);

    let instance = instance_for(partial, tasks, bandwidth, cache, gamma);
    let selection = solve_dp(&instance);

    let mut next = partial.clone();
    let mut packed = Vec::with_capacity(selection.chosen.len());
    let mut left = Vec::with_capacity(partial.remaining_tasks.len() - selection.chosen.len());
    let mut chosen = selection.chosen.iter().peekable();
    for (pos, &ti) in partial.remaining_tasks.iter().enumerate() {
        if chosen.peek() == Some(&&pos) {
            chosen.next();
            packed.push(ti);
        } else {
            left.push(ti);
        }
    }
    next.core_tasks.push(packed);
    next.core_bandwidth.push(bandwidth);
    next.core_cache.push(cache);
    next.remaining_bandwidth -= bandwidth;
    next.remaining_cache -= cache;
    // Recomputed rather than decremented: sums stay exact and deterministic.
    next.remaining_demand = left.iter().map(|&ti| tasks[ti].reference_utilization()).sum();
    next.remaining_tasks = left;
    next
}
