//! Co-allocation of real-time tasks, memory-bandwidth partitions, and cache
//! partitions to cores under partitioned preemptive EDF.
//!
//! The crate is organized in layers:
//!
//! - [`model`]: tasks, slowdown profiles, and the per-core EDF utilization bound;
//! - [`knapsack`]: packs a maximal-demand subset of tasks onto one core via a
//!   scaled 0-1 knapsack DP, plus an exhaustive reference solver;
//! - [`pareto`]: dominance relations and archives for partial and complete
//!   solutions;
//! - [`search`]: the core-by-core breadth-first search with Pareto pruning;
//! - [`oracle`]: exact exhaustive co-allocation for small instances;
//! - [`ilp`]: the equivalent 0-1 integer linear program (construction, LP-format
//!   export, and independent solution verification).
//!
//! The crate is `no_std` (it requires `alloc`); all IO, file formats, and the
//! command-line front end live in the companion `coalloc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod ilp;
pub mod knapsack;
pub mod model;
pub mod oracle;
pub mod pareto;
pub mod search;
