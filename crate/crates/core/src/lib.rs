//! Simulation, synthesis and workload models for command-signaling control
//! panels.

pub mod fixtures;
pub mod io;
pub mod metrics;
pub mod operator;
pub mod panel;
pub mod synthesis;
