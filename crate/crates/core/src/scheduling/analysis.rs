//! Contention-free progress of a single packet through a table.
//!
//! A packet held by a node in zone `z` leaves in the first later slot whose
//! cell for `z` is a transmit cell in the packet's direction, and may be
//! forwarded again from the following slot. Chasing that rule slot by slot
//! gives both the per-frame reach and the end-to-end latency of a table.

use crate::error::{Error, Result};

use super::{SchedulingTable, SlotAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowDirection {
    Upstream,
    Downstream,
}

/// The transmit action that carries traffic in `dir` for this table.
pub(crate) fn carrier(table: &SchedulingTable, dir: FlowDirection) -> SlotAction {
    match dir {
        FlowDirection::Upstream => SlotAction::TransmitUp,
        FlowDirection::Downstream if table.downstream_via_broadcast() => {
            SlotAction::TransmitBroadcast
        }
        FlowDirection::Downstream => SlotAction::TransmitDown,
    }
}

fn step(zone: u32, dir: FlowDirection) -> u32 {
    match dir {
        FlowDirection::Upstream => zone - 1,
        FlowDirection::Downstream => zone + 1,
    }
}

/// Hops covered inside one frame starting at slot 0 from `zone`, stopping at
/// the gateway for upstream flows.
fn hops_in_frame(table: &SchedulingTable, mut zone: u32, dir: FlowDirection) -> u32 {
    let tx = carrier(table, dir);
    let mut hops = 0;
    for slot in 0..table.slots_per_frame() {
        if dir == FlowDirection::Upstream && zone == 0 {
            break;
        }
        if table.action(zone, slot) == tx {
            zone = step(zone, dir);
            hops += 1;
        }
    }
    hops
}

/// Most zones a packet can advance in one frame without contention.
pub fn zones_per_frame(table: &SchedulingTable, dir: FlowDirection) -> u32 {
    let period = table.zone_period() as u32;
    let slots = table.slots_per_frame() as u32;
    let starts: Vec<u32> = match dir {
        // Deep enough that the gateway cannot cut a chain short.
        FlowDirection::Upstream => (slots + 1..=slots + period).collect(),
        FlowDirection::Downstream => (0..=period).collect(),
    };
    starts
        .into_iter()
        .map(|z| hops_in_frame(table, z, dir))
        .max()
        .unwrap_or(0)
}

/// Frames needed by one packet, ready at the start of a frame in
/// `origin_zone`, to reach the gateway with no competing traffic. The frame
/// in which it becomes ready counts as the first.
pub fn uncontended_latency_frames(table: &SchedulingTable, origin_zone: u32) -> Result<u32> {
    if origin_zone == 0 {
        return Err(Error::InvalidArgument(
            "origin zone must be at least 1".into(),
        ));
    }
    let slots = table.slots_per_frame();
    let mut zone = origin_zone;
    let mut frame = 0u32;
    let mut slot = 0usize;
    let mut idle_frames = 0;
    while zone > 0 {
        if table.action(zone, slot) == SlotAction::TransmitUp {
            zone -= 1;
            idle_frames = 0;
        }
        slot += 1;
        if slot == slots && zone > 0 {
            slot = 0;
            frame += 1;
            idle_frames += 1;
            if idle_frames > 1 {
                return Err(Error::InvalidArgument(format!(
                    "table {} never forwards upstream from zone {zone}",
                    table.kind()
                )));
            }
        }
    }
    Ok(frame + 1)
}

/// Deepest zone downstream traffic can be delivered to, or `None` if every
/// zone can forward it further.
pub fn downstream_reach(table: &SchedulingTable) -> Option<u32> {
    let tx = carrier(table, FlowDirection::Downstream);
    (0..=table.zone_period() as u32)
        .find(|&z| !(0..table.slots_per_frame()).any(|s| table.action(z, s) == tx))
}
