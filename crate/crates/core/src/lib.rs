//! A simulation lab for Gaussian-process bandit optimization under
//! adversarial reward poisoning.
//!
//! The crate provides:
//!
//! * stationary covariance kernels and exact GP posterior inference
//!   ([`kernels`], [`gp`]),
//! * a catalog of benchmark objectives with axis-aligned target regions
//!   and compactly supported bump perturbations ([`objectives`], [`bumps`]),
//! * player-side bandit algorithms (GP-UCB and variance-maximizing
//!   elimination) with pluggable exploration schedules ([`algorithms`]),
//! * adversary-side perturbation policies, budget accounting, and
//!   numerical attack-condition checks ([`attacks`]),
//! * run-level metrics ([`metrics`]) and a seeded, reproducible
//!   experiment harness with sweep support ([`harness`], [`config`],
//!   [`emit`]).

pub mod algorithms;
pub mod attacks;
pub mod bumps;
pub mod config;
pub mod emit;
pub mod gp;
pub mod harness;
pub mod kernels;
pub mod metrics;
pub mod objectives;

mod error;

pub use error::{Error, Result};
