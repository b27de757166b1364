//! Approximate 1-median computation for sets of permutations.
//!
//! Given `m` rankings of `n` items, the crate computes a consensus ranking
//! whose average distance to the inputs is provably close to optimal under
//! four metrics (Hamming, Spearman footrule, Kendall tau, Ulam) and their
//! element-weighted variants.
//!
//! The main entry points are:
//!
//! * [`dist`] — exact distance kernels (`O(n log n)` for Kendall and Ulam),
//! * [`slack`] — the sampling framework built on triangle-inequality slack,
//! * [`solvers`] — metric-specific consensus rules for small sampled subsets,
//! * [`reconstruct`] — a window/block decomposition median for the Ulam metric,
//! * [`mpc`] — a simulated massively-parallel engine with word-level memory
//!   accounting, plus MPC versions of the distances and solvers,
//! * [`oracles`] — brute-force references used by the test suites,
//! * [`verify`] — the acceptance checks, runnable from tests or the CLI.

pub mod dist;
pub mod error;
pub mod gen;
pub mod io;
pub mod mpc;
pub mod oracles;
pub mod perm;
pub mod reconstruct;
pub mod rng;
pub mod slack;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use perm::{Instance, Metric, Permutation, WeightVector};
