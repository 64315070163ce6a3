//! Scripted operator runs, operation classes and the time model.

pub mod classify;
pub mod engine;
pub mod error;
pub mod estimate;
pub mod log;
pub mod random;
pub mod scenario;
pub mod time_model;

pub use classify::{classify_ops, workload_ratio, ClassShares, Measure};
pub use engine::{run_scenario, validate_scenario};
pub use error::OperatorError;
pub use estimate::{estimate_time, task_profile};
pub use log::{CheckTarget, ClassTotals, Detail, LogEntry, OpClass, SessionLog};
pub use random::random_scenario;
pub use scenario::{Scenario, Step};
pub use time_model::{StagePenaltySign, TaskProfile, TimeModelParams};
