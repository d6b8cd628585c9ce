//! Discrete-event simulation of time-zone scheduled wireless sensor networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`energy`], [`packet`], [`chipset`]: radio states, power arithmetic and packet sizing.
//! * [`deployment`]: random and grid node placement.
//! * [`topology`]: unit-disk connectivity, hop-count zones and the routing tree.
//! * [`scheduling`]: the six zone-periodic scheduling tables and their analysis.
//! * [`sim`]: the slot-driven MAC simulator.
//! * [`harness`]: experiment configs, sweeps, aggregation and output files.

pub mod chipset;
pub mod deployment;
pub mod energy;
pub mod error;
pub mod harness;
pub mod packet;
pub mod rng;
pub mod scheduling;
pub mod sim;
pub mod topology;
pub mod types;

pub use chipset::{default_profiles, find_profile, parse_profiles};
pub use deployment::{deploy_grid, deploy_random, Deployment, DeploymentKind, GatewayPlacement};
pub use energy::{power_draw, ChipsetProfile, EnergyAccount, RadioState};
pub use error::{Error, ErrorKind, Result};
pub use harness::{parse_config, run_sweep, summarize, Dataset, ExperimentSpec};
pub use packet::{airtime, packet_bits, Direction, Packet};
pub use scheduling::{build_table, slot_action, validate_table, SchedulingTable, SlotAction, TableKind};
pub use sim::{run, CsmaConfig, RunResult, Scenario, Simulation, TrafficConfig};
pub use topology::{Topology, UnreachablePolicy};
pub use types::{Area, NodeId, Position};
