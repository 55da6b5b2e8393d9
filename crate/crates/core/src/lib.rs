//! Climate outage risk characterization and resilience analysis for joint
//! power-communication networks.
//!
//! The crate is organized as a pipeline:
//!
//! * [`outage`] ingests outage records and attaches categories and geography.
//! * [`stats`] produces descriptive series and the hypothesis-test table.
//! * [`severity`] labels severe outages and fits an interpretable logistic model.
//! * [`grid`] builds the joint network over the IEEE 118-bus case.
//! * [`miim`] evaluates three-valued dependency rules and runs cascades.
//! * [`scenario`] turns scenario rows into initial failure sets.
//! * [`metrics`] computes operability, resilience gap and reports.
//! * [`pipeline`] wires the stages together behind a single config.

pub mod data;
pub mod grid;
pub mod metrics;
pub mod miim;
pub mod outage;
pub mod pipeline;
pub mod scenario;
pub mod severity;
pub mod stats;
