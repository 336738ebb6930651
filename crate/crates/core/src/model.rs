//! Domain model: platform resources, slowdown profiles, task sets, and the
//! per-core EDF utilization test.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

/// Total platform resources: cores, memory-bandwidth partitions, and cache
/// partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemConfig {
    pub cores: u32,
    pub bandwidth: u32,
    pub cache: u32,
}

impl SystemConfig {
    pub fn new(cores: u32, bandwidth: u32, cache: u32) -> Result<Self, ModelError> {
        if cores == 0 || bandwidth == 0 || cache == 0 {
            return Err(ModelError::InvalidConfig);
        }
        Ok(Self { cores, bandwidth, cache })
    }
}

/// Errors raised while constructing model objects.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    InvalidConfig,
    GridShape,
    /// A grid entry is not finite and strictly positive.
    InvalidSlowdown { bandwidth: u32, cache: u32 },
    /// The full-resource corner of the grid must hold exactly 1.0.
    ReferenceCellNotUnit,
    InvalidPeriod(String),
    InvalidWcet(String),
    /// Reference utilization must lie in (0, 1]: a task that needs more than a
    /// full core even with all resources can never be scheduled.
    ReferenceUtilizationOutOfRange(String),
    DuplicateTaskId(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidConfig => write!(f, "core, bandwidth, and cache counts must all be at least 1"),
            ModelError::GridShape => write!(f, "slowdown grid must be a non-empty rectangular matrix"),
            ModelError::InvalidSlowdown { bandwidth, cache } => write!(
                f,
                "slowdown at (b={bandwidth}, k={cache}) must be finite and > 0"
            ),
            ModelError::ReferenceCellNotUnit => {
                write!(f, "slowdown at full resources must be exactly 1.0")
            }
            ModelError::InvalidPeriod(id) => write!(f, "task {id}: period must be finite and > 0"),
            ModelError::InvalidWcet(id) => write!(f, "task {id}: reference WCET must be finite and > 0"),
            ModelError::ReferenceUtilizationOutOfRange(id) => {
                write!(f, "task {id}: reference utilization must lie in (0, 1]")
            }
            ModelError::DuplicateTaskId(id) => write!(f, "duplicate task id {id}"),
        }
    }
}

impl core::error::Error for ModelError {}

/// Measured execution-time slowdown of one benchmark as a function of the
/// memory-bandwidth partitions `b` and cache partitions `k` granted to its
/// core, relative to execution with all resources.
///
/// Cells where the benchmark did not complete are unavailable (`None`) and are
/// treated as infinite slowdown. Construction applies a monotone sweep: every
/// cell is raised to at least the value of any cell with more resources, and
/// unavailability propagates toward fewer resources. This only ever increases
/// WCET estimates. Raw measurements are kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct SlowdownProfile {
    name: String,
    bandwidth_levels: u32,
    cache_levels: u32,
    raw: Vec<Option<f64>>,
    monotone: Vec<Option<f64>>,
    altered_cells: usize,
}

impl SlowdownProfile {
    /// Builds a profile from a `B x K` grid, `grid[b-1][k-1]` holding the
    /// slowdown under `b` bandwidth and `k` cache partitions.
    pub fn new(name: impl Into<String>, grid: Vec<Vec<Option<f64>>>) -> Result<Self, ModelError> {
        let bandwidth_levels = grid.len() as u32;
        if bandwidth_levels == 0 {
            return Err(ModelError::GridShape);
        }
        let cache_levels = grid[0].len() as u32;
        if cache_levels == 0 || grid.iter().any(|row| row.len() as u32 != cache_levels) {
            return Err(ModelError::GridShape);
        }
        let mut raw = Vec::with_capacity((bandwidth_levels * cache_levels) as usize);
        for (bi, row) in grid.iter().enumerate() {
            for (ki, cell) in row.iter().enumerate() {
                if let Some(v) = cell {
                    if !v.is_finite() || *v <= 0.0 {
                        return Err(ModelError::InvalidSlowdown {
                            bandwidth: bi as u32 + 1,
                            cache: ki as u32 + 1,
                        });
                    }
                }
                raw.push(*cell);
            }
        }
        if raw[raw.len() - 1] != Some(1.0) {
            return Err(ModelError::ReferenceCellNotUnit);
        }

        let (monotone, altered_cells) =
            monotone_sweep(&raw, bandwidth_levels as usize, cache_levels as usize);

        Ok(Self {
            name: name.into(),
            bandwidth_levels,
            cache_levels,
            raw,
            monotone,
            altered_cells,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `(B, K)` extents of the grid.
    pub fn dimensions(&self) -> (u32, u32) {
        (self.bandwidth_levels, self.cache_levels)
    }

    fn cell(&self, bandwidth: u32, cache: u32) -> usize {
        assert!(
            bandwidth >= 1 && bandwidth <= self.bandwidth_levels,
            "bandwidth index {bandwidth} outside 1..={}",
            self.bandwidth_levels
        );
        assert!(
            cache >= 1 && cache <= self.cache_levels,
            "cache index {cache} outside 1..={}",
            self.cache_levels
        );
        ((bandwidth - 1) * self.cache_levels + (cache - 1)) as usize
    }

    /// Monotone slowdown at `(b, k)`; `None` marks an unavailable cell.
    pub fn slowdown(&self, bandwidth: u32, cache: u32) -> Option<f64> {
        self.monotone[self.cell(bandwidth, cache)]
    }

    /// Slowdown as measured, before the monotone sweep.
    pub fn raw_slowdown(&self, bandwidth: u32, cache: u32) -> Option<f64> {
        self.raw[self.cell(bandwidth, cache)]
    }

    /// Number of cells changed by the monotone sweep.
    pub fn altered_cells(&self) -> usize {
        self.altered_cells
    }

    /// Fraction of cells changed by the monotone sweep, for load-time reporting.
    pub fn altered_fraction(&self) -> f64 {
        self.altered_cells as f64 / self.raw.len() as f64
    }
}

/// Raises every cell to the maximum over cells with at least as many
/// resources; a cell below or left of an unavailable cell becomes unavailable.
fn monotone_sweep(raw: &[Option<f64>], b_levels: usize, k_levels: usize) -> (Vec<Option<f64>>, usize) {
    let mut grid = raw.to_vec();
    let idx = |b: usize, k: usize| (b - 1) * k_levels + (k - 1);
    for b in (1..=b_levels).rev() {
        for k in (1..=k_levels).rev() {
            let mut v = grid[idx(b, k)];
            if b < b_levels {
                v = merge(v, grid[idx(b + 1, k)]);
            }
            if k < k_levels {
                v = merge(v, grid[idx(b, k + 1)]);
            }
            grid[idx(b, k)] = v;
        }
    }
    let altered = grid.iter().zip(raw).filter(|(m, r)| m != r).count();
    (grid, altered)
}

fn merge(cell: Option<f64>, with_more_resources: Option<f64>) -> Option<f64> {
    match (cell, with_more_resources) {
        (Some(c), Some(n)) => Some(c.max(n)),
        _ => None,
    }
}

/// A sporadic task with implicit deadline: minimum inter-arrival time,
/// reference WCET (under full resources), and the slowdown profile scaling
/// that WCET under restricted resources.
#[derive(Debug, Clone)]
pub struct TaskSpec {
    id: String,
    period: f64,
    ref_wcet: f64,
    ref_utilization: f64,
    profile: Arc<SlowdownProfile>,
}

impl TaskSpec {
    pub fn new(
        id: impl Into<String>,
        period: f64,
        ref_wcet: f64,
        profile: Arc<SlowdownProfile>,
    ) -> Result<Self, ModelError> {
        let id = id.into();
        if !period.is_finite() || period <= 0.0 {
            return Err(ModelError::InvalidPeriod(id));
        }
        if !ref_wcet.is_finite() || ref_wcet <= 0.0 {
            return Err(ModelError::InvalidWcet(id));
        }
        let ref_utilization = ref_wcet / period;
        if !(ref_utilization > 0.0 && ref_utilization <= 1.0) {
            return Err(ModelError::ReferenceUtilizationOutOfRange(id));
        }
        Ok(Self { id, period, ref_wcet, ref_utilization, profile })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn ref_wcet(&self) -> f64 {
        self.ref_wcet
    }

    /// Utilization under full resources.
    pub fn reference_utilization(&self) -> f64 {
        self.ref_utilization
    }

    pub fn profile(&self) -> &Arc<SlowdownProfile> {
        &self.profile
    }

    /// Utilization under `b` bandwidth and `k` cache partitions. An
    /// unavailable profile cell yields `f64::INFINITY`, which reads as
    /// unschedulable everywhere downstream.
    pub fn utilization(&self, bandwidth: u32, cache: u32) -> f64 {
        match self.profile.slowdown(bandwidth, cache) {
            Some(s) => self.ref_utilization * s,
            None => f64::INFINITY,
        }
    }
}

/// An ordered task collection with unique ids. Order is significant: the
/// knapsack layer and all tie-breaking rules depend on it.
#[derive(Debug, Clone)]
pub struct TaskSet {
    tasks: Vec<TaskSpec>,
}

impl TaskSet {
    pub fn new(tasks: Vec<TaskSpec>) -> Result<Self, ModelError> {
        let mut seen = alloc::collections::BTreeSet::new();
        for t in &tasks {
            if !seen.insert(t.id()) {
                return Err(ModelError::DuplicateTaskId(t.id().into()));
            }
        }
        Ok(Self { tasks })
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, TaskSpec> {
        self.tasks.iter()
    }

    /// Sum of reference utilizations, in task order.
    pub fn total_reference_utilization(&self) -> f64 {
        self.tasks.iter().map(|t| t.reference_utilization()).sum()
    }

    /// Checks that every task's profile grid matches the platform extents.
    pub fn profiles_match(&self, cfg: &SystemConfig) -> bool {
        self.tasks
            .iter()
            .all(|t| t.profile().dimensions() == (cfg.bandwidth, cfg.cache))
    }
}

impl Index<usize> for TaskSet {
    type Output = TaskSpec;

    fn index(&self, index: usize) -> &TaskSpec {
        &self.tasks[index]
    }
}

/// EDF schedulability of a task subset sharing one core with `b` bandwidth
/// and `k` cache partitions: total utilization must not exceed 1. The
/// comparison is exact; summation follows iteration order.
pub fn edf_schedulable<'a, I>(tasks: I, bandwidth: u32, cache: u32) -> bool
where
    I: IntoIterator<Item = &'a TaskSpec>,
{
    let mut total = 0.0;
    for t in tasks {
        total += t.utilization(bandwidth, cache);
    }
    total <= 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn uniform_profile(b: u32, k: u32, corner: f64) -> Arc<SlowdownProfile> {
        // Linear ramp from `corner` at (1,1) down to 1.0 at (B,K).
        let grid = (1..=b)
            .map(|bi| {
                (1..=k)
                    .map(|ki| {
                        let fb = if b > 1 { (b - bi) as f64 / (b - 1) as f64 } else { 0.0 };
                        let fk = if k > 1 { (k - ki) as f64 / (k - 1) as f64 } else { 0.0 };
                        Some(1.0 + (corner - 1.0) * 0.5 * (fb + fk))
                    })
                    .collect()
            })
            .collect();
        Arc::new(SlowdownProfile::new("uniform", grid).unwrap())
    }

    fn fixed_profile(grid: Vec<Vec<Option<f64>>>) -> Arc<SlowdownProfile> {
        Arc::new(SlowdownProfile::new("fixed", grid).unwrap())
    }

    #[test]
    fn utilization_follows_slowdown() {
        let p = fixed_profile(vec![vec![Some(2.0), Some(1.5)], vec![Some(1.5), Some(1.0)]]);
        let t = TaskSpec::new("t", 100.0, 10.0, p).unwrap();
        assert_eq!(t.utilization(1, 1), 0.2);
        assert_eq!(t.utilization(2, 2), 0.1); // slowdown 1 at full resources
        assert_eq!(t.reference_utilization(), 0.1);
    }

    #[test]
    fn unavailable_cell_is_infinite() {
        let p = fixed_profile(vec![vec![None, Some(1.5)], vec![Some(1.5), Some(1.0)]]);
        let t = TaskSpec::new("t", 100.0, 10.0, p).unwrap();
        assert_eq!(t.utilization(1, 1), f64::INFINITY);
        assert!(!edf_schedulable([&t], 1, 1));
    }

    #[test]
    fn edf_bound_is_inclusive() {
        let p = uniform_profile(2, 2, 1.0);
        let a = TaskSpec::new("a", 1.0, 0.5, p.clone()).unwrap();
        let b = TaskSpec::new("b", 1.0, 0.5, p.clone()).unwrap();
        assert!(edf_schedulable([&a, &b], 2, 2));
        let c = TaskSpec::new("c", 1.0, 0.5000001, p).unwrap();
        assert!(!edf_schedulable([&a, &c], 2, 2));
    }

    #[test]
    fn edf_empty_set_is_schedulable() {
        assert!(edf_schedulable([], 1, 1));
    }

    #[test]
    fn profile_rejects_bad_reference_corner() {
        let err = SlowdownProfile::new("p", vec![vec![Some(2.0), Some(1.1)]]).unwrap_err();
        assert_eq!(err, ModelError::ReferenceCellNotUnit);
    }

    #[test]
    fn profile_rejects_nonpositive_cells() {
        let err = SlowdownProfile::new("p", vec![vec![Some(0.0), Some(1.0)]]).unwrap_err();
        assert!(matches!(err, ModelError::InvalidSlowdown { .. }));
        let err = SlowdownProfile::new("p", vec![vec![Some(f64::NAN), Some(1.0)]]).unwrap_err();
        assert!(matches!(err, ModelError::InvalidSlowdown { .. }));
    }

    #[test]
    fn profile_rejects_ragged_grid() {
        let err =
            SlowdownProfile::new("p", vec![vec![Some(1.0)], vec![Some(1.0), Some(1.0)]]).unwrap_err();
        assert_eq!(err, ModelError::GridShape);
    }

    #[test]
    fn monotone_sweep_raises_noisy_cells() {
        // (1,1) measured faster than (1,2): the sweep lifts (1,1) to 1.4.
        let p = SlowdownProfile::new(
            "p",
            vec![vec![Some(1.2), Some(1.4)], vec![Some(1.1), Some(1.0)]],
        )
        .unwrap();
        assert_eq!(p.slowdown(1, 1), Some(1.4));
        assert_eq!(p.raw_slowdown(1, 1), Some(1.2));
        assert_eq!(p.altered_cells(), 1);
    }

    #[test]
    fn monotone_sweep_propagates_unavailability() {
        // (2,1) unavailable implies (1,1) cannot be trusted either.
        let p = SlowdownProfile::new(
            "p",
            vec![vec![Some(3.0), Some(1.4)], vec![None, Some(1.0)]],
        )
        .unwrap();
        assert_eq!(p.slowdown(1, 1), None);
        assert_eq!(p.slowdown(2, 1), None);
        assert_eq!(p.altered_cells(), 1);
    }

    #[test]
    fn task_validation() {
        let p = uniform_profile(2, 2, 2.0);
        assert!(matches!(
            TaskSpec::new("t", 0.0, 1.0, p.clone()),
            Err(ModelError::InvalidPeriod(_))
        ));
        assert!(matches!(
            TaskSpec::new("t", 1.0, -1.0, p.clone()),
            Err(ModelError::InvalidWcet(_))
        ));
        // Reference utilization above 1 is rejected at load time.
        assert!(matches!(
            TaskSpec::new("t", 1.0, 1.5, p.clone()),
            Err(ModelError::ReferenceUtilizationOutOfRange(_))
        ));
        assert!(TaskSpec::new("t", 1.0, 1.0, p).is_ok());
    }

    #[test]
    fn task_set_rejects_duplicate_ids() {
        let p = uniform_profile(2, 2, 2.0);
        let a = TaskSpec::new("a", 1.0, 0.1, p.clone()).unwrap();
        let a2 = TaskSpec::new("a", 2.0, 0.1, p).unwrap();
        assert!(matches!(
            TaskSet::new(vec![a, a2]),
            Err(ModelError::DuplicateTaskId(_))
        ));
    }

    proptest::proptest! {
        /// After the sweep, slowdown never increases when resources increase,
        /// and every cell is at least its raw measurement.
        #[test]
        fn normalized_grids_are_monotone(cells in proptest::collection::vec(0.0f64..4.0, 12)) {
            let mut grid: Vec<Vec<Option<f64>>> = (0..3)
                .map(|b| (0..4).map(|k| {
                    let v = cells[b * 4 + k];
                    if v < 0.2 { None } else { Some(v.max(0.2)) }
                }).collect())
                .collect();
            grid[2][3] = Some(1.0);
            let p = match SlowdownProfile::new("p", grid) {
                Ok(p) => p,
                Err(_) => return Ok(()), // rejected grids are out of scope here
            };
            for b in 1..=3u32 {
                for k in 1..=4u32 {
                    let here = p.slowdown(b, k);
                    if let Some(raw) = p.raw_slowdown(b, k) {
                        if let Some(m) = here {
                            proptest::prop_assert!(m >= raw);
                        }
                    }
                    for (nb, nk) in [(b + 1, k), (b, k + 1)] {
                        if nb <= 3 && nk <= 4 {
                            match (here, p.slowdown(nb, nk)) {
                                (Some(h), Some(n)) => proptest::prop_assert!(h >= n),
                                // unavailable with more resources forces unavailable here
                                (Some(_), None) => proptest::prop_assert!(false),
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
    }
}
