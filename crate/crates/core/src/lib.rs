//! Agent-based simulation of a team searching correlated NK(C,S) performance
//! landscapes.
//!
//! Each of `P` agents owns an `N`-bit block of an `M`-bit decision vector and
//! performs a one-bit hill climb on it. Agents are paid through a linear
//! incentive scheme that mixes their own performance with the residual
//! performance of the rest of the team, and they also weigh how closely
//! their *social* bits match what peers reported over a ring network during
//! the last `T_L` periods (a descriptive norm).
//!
//! Modules, bottom-up:
//!
//! * [`landscape`]: interaction structures, correlated contribution tables,
//!   performance evaluation and exhaustive global maximum.
//! * [`team`]: incentive payoff and the one-bit propose/choose rule.
//! * [`norms`]: sharing network, sliding-window memory and norm compliance.
//! * [`engine`]: the per-period schedule, single runs and replication.
//! * [`experiments`]: scenario grids, aggregation with confidence
//!   intervals, CSV output and config files.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod landscape;
pub mod norms;
pub mod seed;
pub mod team;

pub use engine::{replicate, run, RunState, RunTrace, ScenarioParams};
pub use error::{Error, Result};
pub use experiments::{
    aggregate, run_grid, write_csv, AggregateSeries, CellResult, Complexity, Figure, GridCell,
    PeriodStats, ScenarioGrid, TailSummary,
};
pub use landscape::{InteractionStructure, Landscape, TeamConfig, ENUMERATION_BUDGET};
pub use norms::{compliance, MemoryRecord, NormMemory, SocialBits, SocialNetwork};
pub use team::{choose, incentive_payoff, propose_flip, residual_performance, DecisionWeights, IncentiveScheme};
