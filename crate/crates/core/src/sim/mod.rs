//! Slot-driven MAC simulation of one scenario.
//!
//! Time advances one TDMA slot at a time. In each slot every node follows the
//! cell of its zone's table row: transmitters with a matching queued packet
//! contend by carrier sense, receivers pick up whatever is on air within
//! range, and every node's radio time is charged to exactly one state for the
//! whole slot.

mod engine;
mod events;
mod mac;

use std::collections::BTreeMap;

use crate::energy::{ChipsetProfile, EnergyAccount};
use crate::error::{Error, Result};
use crate::packet::{airtime, check_payload, frame_bits, DEFAULT_HEADER_BYTES};
use crate::scheduling::{validate_table, SchedulingTable};
use crate::topology::Topology;
use crate::types::NodeId;

pub use engine::{HopTrace, Simulation};
pub use events::{Event, EventKind};
pub use mac::{carrier_sense, contend, deliver, ContentionOutcome, Reception};

pub const DEFAULT_DURATION_S: f64 = 1200.0;
pub const DEFAULT_SLOT_S: f64 = 0.1;
pub const DEFAULT_REPORT_INTERVAL_S: f64 = 10.0;
pub const DEFAULT_PAYLOAD_BYTES: u32 = 16;
pub const DEFAULT_QUEUE_CAPACITY: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficConfig {
    /// Upstream report period per sensing node; `None` disables reports.
    pub report_interval_s: Option<f64>,
    pub payload_bytes: u32,
    pub extra_payload_bits: u32,
    /// Gateway-originated traffic period; `None` disables it.
    pub downstream_interval_s: Option<f64>,
    pub header_bytes: u32,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            report_interval_s: Some(DEFAULT_REPORT_INTERVAL_S),
            payload_bytes: DEFAULT_PAYLOAD_BYTES,
            extra_payload_bits: 0,
            downstream_interval_s: None,
            header_bytes: DEFAULT_HEADER_BYTES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsmaConfig {
    pub contention_window: u32,
    pub micro_slot_s: f64,
    pub max_retries: u32,
}

impl Default for CsmaConfig {
    fn default() -> Self {
        CsmaConfig {
            contention_window: 16,
            micro_slot_s: 0.001,
            max_retries: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub topology: Topology,
    pub table: SchedulingTable,
    pub profile: ChipsetProfile,
    pub traffic: TrafficConfig,
    pub duration_s: f64,
    pub seed: u64,
    pub slot_s: f64,
    pub csma: CsmaConfig,
    pub queue_capacity: usize,
}

impl Scenario {
    /// A scenario with default traffic, timing and MAC settings.
    pub fn new(topology: Topology, table: SchedulingTable, profile: ChipsetProfile, seed: u64) -> Self {
        Scenario {
            topology,
            table,
            profile,
            traffic: TrafficConfig::default(),
            duration_s: DEFAULT_DURATION_S,
            seed,
            slot_s: DEFAULT_SLOT_S,
            csma: CsmaConfig::default(),
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
        }
    }

    pub fn frame_s(&self) -> f64 {
        self.table.slots_per_frame() as f64 * self.slot_s
    }

    /// Number of whole slots in `duration_s`.
    pub fn total_slots(&self) -> u64 {
        (self.duration_s / self.slot_s).round() as u64
    }

    /// Longest frame this scenario can put on air, in seconds.
    pub fn max_airtime_s(&self) -> f64 {
        let t = &self.traffic;
        let bits = frame_bits(
            self.profile.preamble_bits(),
            t.header_bytes,
            t.payload_bytes,
            t.extra_payload_bits,
        );
        airtime(bits, &self.profile)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return bad(format!("duration_s must be positive, got {}", self.duration_s));
        }
        if !(self.slot_s > 0.0 && self.slot_s.is_finite()) {
            return bad(format!("slot_s must be positive, got {}", self.slot_s));
        }
        let slots = self.total_slots();
        if slots == 0 || (slots as f64 * self.slot_s - self.duration_s).abs() > 1e-9 * self.duration_s {
            return bad(format!(
                "duration_s {} is not a whole number of {} s slots",
                self.duration_s, self.slot_s
            ));
        }
        let t = &self.traffic;
        for (name, v) in [
            ("report_interval_s", t.report_interval_s),
            ("downstream_interval_s", t.downstream_interval_s),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        check_payload(t.payload_bytes, t.extra_payload_bits)
            .map_err(|e| Error::Scenario(e.to_string()))?;
        let c = &self.csma;
        if c.contention_window == 0 {
            return bad("contention_window must be at least 1".into());
        }
        if !(c.micro_slot_s > 0.0 && c.micro_slot_s.is_finite()) {
            return bad(format!("micro_slot_s must be positive, got {}", c.micro_slot_s));
        }
        let window_s = f64::from(c.contention_window) * c.micro_slot_s;
        if window_s > self.slot_s {
            return bad(format!(
                "contention window of {window_s} s does not fit a {} s slot",
                self.slot_s
            ));
        }
        let latest_end = f64::from(c.contention_window - 1) * c.micro_slot_s + self.max_airtime_s();
        if latest_end > self.slot_s {
            return bad(format!(
                "a {:.6} s frame after the longest backoff ends at {latest_end:.6} s, past the {} s slot",
                self.max_airtime_s(),
                self.slot_s
            ));
        }
        if self.queue_capacity == 0 {
            return bad("queue_capacity must be at least 1".into());
        }
        let report = validate_table(&self.table);
        if !report.is_empty() {
            return Err(Error::InvalidTable {
                name: self.table.kind().to_string(),
                violations: report.to_string(),
            });
        }
        if self.topology.is_empty() || !self.topology.is_active(NodeId::GATEWAY) {
            return bad("topology has no gateway".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Accounts of every node that took part; excluded nodes are absent.
    pub per_node: BTreeMap<NodeId, EnergyAccount>,
    pub total_energy_j: f64,
    pub packets_generated: u64,
    pub packets_delivered: u64,
    pub collisions: u64,
    pub retransmissions: u64,
    pub mean_upstream_latency_frames: f64,
    pub dropped: u64,
    /// Packets still queued when the run ended.
    pub in_flight: u64,
    pub excluded_nodes: usize,
    pub duration_s: f64,
}

/// Runs a scenario to completion.
pub fn run(scenario: &Scenario) -> Result<RunResult> {
    let mut sim = Simulation::new(scenario)?;
    sim.run_to_end();
    Ok(sim.finish())
}
