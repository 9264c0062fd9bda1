//! Allocation of virtual arrays with mixed RAID levels onto a shared disk
//! array, with the load models and analytic tools around it.
//!
//! The usual entry point is [`experiment::run_experiment`], which draws
//! requests from a seeded [`workload::RequestStream`], prices each one with
//! [`load_model`] and places it with an [`allocator::Policy`].

pub mod allocator;
pub mod analysis;
pub mod disk_model;
pub mod experiment;
pub mod load_model;
pub mod workload;

pub use allocator::{ArrayState, Policy, PolicyKind};
pub use disk_model::{DiskSpec, ServiceTimes};
pub use experiment::{run_experiment, run_once, ExperimentConfig, ExperimentReport, Mode};
pub use load_model::{ArrayGeometry, RaidLevel, UpdateMethod};
pub use workload::{RequestStream, WorkloadClass, WorkloadConfig};
