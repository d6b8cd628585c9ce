//! Zone-periodic scheduling tables.
//!
//! A table is a `zone_period x slots_per_frame` matrix of [`SlotAction`]s.
//! Row `r` prescribes what every node in a zone `z` with `z % zone_period == r`
//! does in each slot of the frame, so deeper networks reuse the same rows.
//! The gateway is the one exception: it reads row 0 with the actions that have
//! no meaning at the root (sending up, receiving from above) replaced by sleep.

mod analysis;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use analysis::{downstream_reach, uncontended_latency_frames, zones_per_frame, FlowDirection};
pub use validate::{validate_table, ValidationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotAction {
    TransmitUp,
    TransmitDown,
    ReceiveUp,
    ReceiveDown,
    TransmitBroadcast,
    ReceiveBroadcast,
    Sleep,
}

impl SlotAction {
    pub fn to_char(self) -> char {
        match self {
            SlotAction::TransmitUp => 'U',
            SlotAction::TransmitDown => 'D',
            SlotAction::ReceiveUp => 'u',
            SlotAction::ReceiveDown => 'd',
            SlotAction::TransmitBroadcast => 'B',
            SlotAction::ReceiveBroadcast => 'b',
            SlotAction::Sleep => '.',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'U' => SlotAction::TransmitUp,
            'D' => SlotAction::TransmitDown,
            'u' => SlotAction::ReceiveUp,
            'd' => SlotAction::ReceiveDown,
            'B' => SlotAction::TransmitBroadcast,
            'b' => SlotAction::ReceiveBroadcast,
            '.' => SlotAction::Sleep,
            _ => return None,
        })
    }

    pub fn is_transmit(self) -> bool {
        matches!(
            self,
            SlotAction::TransmitUp | SlotAction::TransmitDown | SlotAction::TransmitBroadcast
        )
    }

    pub fn is_receive(self) -> bool {
        matches!(
            self,
            SlotAction::ReceiveUp | SlotAction::ReceiveDown | SlotAction::ReceiveBroadcast
        )
    }

    pub fn is_broadcast(self) -> bool {
        matches!(
            self,
            SlotAction::TransmitBroadcast | SlotAction::ReceiveBroadcast
        )
    }

    /// The action as seen by the gateway.
    fn for_gateway(self) -> Self {
        match self {
            SlotAction::TransmitUp | SlotAction::ReceiveDown | SlotAction::ReceiveBroadcast => {
                SlotAction::Sleep
            }
            other => other,
        }
    }
}

impl fmt::Display for SlotAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableKind {
    X,
    V,
    V9x9,
    Leon4x4CrossedShifted,
    Leon4x4CrossedNotShifted,
    Crossed4x4Shifted,
}

impl TableKind {
    pub const ALL: [TableKind; 6] = [
        TableKind::X,
        TableKind::V,
        TableKind::V9x9,
        TableKind::Leon4x4CrossedShifted,
        TableKind::Leon4x4CrossedNotShifted,
        TableKind::Crossed4x4Shifted,
    ];

    /// Stable short name, used in config files, CSV rows and output file names.
    pub fn name(self) -> &'static str {
        match self {
            TableKind::X => "x",
            TableKind::V => "v",
            TableKind::V9x9 => "v9x9",
            TableKind::Leon4x4CrossedShifted => "leon4x4-crossed-shifted",
            TableKind::Leon4x4CrossedNotShifted => "leon4x4-crossed-not-shifted",
            TableKind::Crossed4x4Shifted => "crossed4x4-shifted",
        }
    }

    pub fn slots_per_frame(self) -> usize {
        match self {
            TableKind::X => 17,
            TableKind::V9x9 => 9,
            TableKind::V => 8,
            TableKind::Leon4x4CrossedShifted
            | TableKind::Leon4x4CrossedNotShifted
            | TableKind::Crossed4x4Shifted => 4,
        }
    }

    pub fn zone_period(self) -> usize {
        match self {
            TableKind::X | TableKind::V9x9 => 9,
            TableKind::V => 8,
            TableKind::Leon4x4CrossedShifted
            | TableKind::Leon4x4CrossedNotShifted
            | TableKind::Crossed4x4Shifted => 4,
        }
    }

    /// Whether the last slot of the frame is reserved for local broadcast.
    pub fn has_broadcast_slot(self) -> bool {
        matches!(self, TableKind::X | TableKind::V9x9)
    }

    /// Nodes drop to sleep once their exchange in a slot is over instead of
    /// keeping the radio on until the slot ends.
    pub fn sleeps_after_exchange(self) -> bool {
        self == TableKind::Leon4x4CrossedShifted
    }

    fn builtin_text(self) -> &'static str {
        match self {
            TableKind::X => include_str!("../../data/tables/x.tbl"),
            TableKind::V => include_str!("../../data/tables/v.tbl"),
            TableKind::V9x9 => include_str!("../../data/tables/v9x9.tbl"),
            TableKind::Leon4x4CrossedShifted => {
                include_str!("../../data/tables/leon4x4-crossed-shifted.tbl")
            }
            TableKind::Leon4x4CrossedNotShifted => {
                include_str!("../../data/tables/leon4x4-crossed-not-shifted.tbl")
            }
            TableKind::Crossed4x4Shifted => {
                include_str!("../../data/tables/crossed4x4-shifted.tbl")
            }
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Ok(match key.as_str() {
            "x" => TableKind::X,
            "v" => TableKind::V,
            "v9x9" => TableKind::V9x9,
            "leon4x4crossedshifted" => TableKind::Leon4x4CrossedShifted,
            "leon4x4crossednotshifted" => TableKind::Leon4x4CrossedNotShifted,
            "crossed4x4shifted" | "4x4crossedshifted" => TableKind::Crossed4x4Shifted,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown scheduling table {s:?}"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedulingTable {
    kind: TableKind,
    slots_per_frame: usize,
    /// Row-major, `zone_period * slots_per_frame` cells.
    actions: Vec<SlotAction>,
    broadcast_slots: Vec<usize>,
}

impl SchedulingTable {
    /// Assembles a table from rows without validating it.
    pub fn from_rows(kind: TableKind, rows: &[Vec<SlotAction>]) -> Result<Self> {
        let slots = rows.first().map_or(0, Vec::len);
        if slots == 0 {
            return Err(Error::InvalidArgument("table has no cells".into()));
        }
        if rows.iter().any(|r| r.len() != slots) {
            return Err(Error::InvalidArgument(
                "table rows differ in length".into(),
            ));
        }
        let actions: Vec<SlotAction> = rows.iter().flatten().copied().collect();
        let broadcast_slots = (0..slots)
            .filter(|&s| rows.iter().any(|r| r[s].is_broadcast()))
            .collect();
        Ok(SchedulingTable {
            kind,
            slots_per_frame: slots,
            actions,
            broadcast_slots,
        })
    }

    /// Parses the table file format (`kind = <name>` then one row of cell
    /// characters per zone; `#` starts a comment) and validates the result.
    pub fn parse(text: &str) -> Result<Self> {
        let table = Self::parse_unvalidated(text)?;
        let report = validate_table(&table);
        if !report.is_empty() {
            return Err(Error::InvalidTable {
                name: table.kind.name().into(),
                violations: report.to_string(),
            });
        }
        Ok(table)
    }

    pub fn parse_unvalidated(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut rows = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                if key.trim() != "kind" {
                    return Err(table_syntax(n, format!("unknown key {:?}", key.trim())));
                }
                kind = Some(value.trim().parse::<TableKind>()?);
                continue;
            }
            let row = line
                .chars()
                .map(|c| {
                    SlotAction::from_char(c)
                        .ok_or_else(|| table_syntax(n, format!("unknown cell {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let kind = kind.ok_or_else(|| table_syntax(0, "missing `kind = ...` line".into()))?;
        Self::from_rows(kind, &rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("kind = {}\n", self.kind);
        for z in 0..self.zone_period() {
            out.extend(self.row(z).iter().map(|a| a.to_char()));
            out.push('\n');
        }
        out
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn slots_per_frame(&self) -> usize {
        self.slots_per_frame
    }

    pub fn zone_period(&self) -> usize {
        self.actions.len() / self.slots_per_frame
    }

    pub fn broadcast_slots(&self) -> &[usize] {
        &self.broadcast_slots
    }

    /// Raw matrix row `r` (no gateway masking).
    pub fn row(&self, r: usize) -> &[SlotAction] {
        let s = self.slots_per_frame;
        &self.actions[r * s..(r + 1) * s]
    }

    pub(crate) fn cell(&self, row: usize, slot: usize) -> SlotAction {
        self.actions[row * self.slots_per_frame + slot]
    }

    #[cfg(test)]
    pub(crate) fn set_cell(&mut self, row: usize, slot: usize, action: SlotAction) {
        self.actions[row * self.slots_per_frame + slot] = action;
    }

    /// Action of a node in `zone` during `slot`, gateway masking included.
    pub fn action(&self, zone: u32, slot: usize) -> SlotAction {
        let a = self.cell(zone as usize % self.zone_period(), slot);
        if zone == 0 {
            a.for_gateway()
        } else {
            a
        }
    }

    /// The full row a node in `zone` follows.
    pub fn effective_row(&self, zone: u32) -> Vec<SlotAction> {
        (0..self.slots_per_frame)
            .map(|s| self.action(zone, s))
            .collect()
    }

    /// Sends in broadcast cells stand in for downstream cells when the
    /// gateway row has no TransmitDown.
    pub fn downstream_via_broadcast(&self) -> bool {
        !self
            .effective_row(0)
            .contains(&SlotAction::TransmitDown)
    }
}

fn table_syntax(line: usize, message: String) -> Error {
    Error::Data {
        path: "table".into(),
        message: format!("line {}: {message}", line + 1),
    }
}

/// The shipped matrix for `kind`.
pub fn build_table(kind: TableKind) -> SchedulingTable {
    let table = SchedulingTable::parse(kind.builtin_text())
        .unwrap_or_else(|e| panic!("built-in table {kind} is invalid: {e}"));
    assert_eq!(table.kind(), kind, "built-in table file declares the wrong kind");
    table
}

/// Checked lookup of a node's action.
pub fn slot_action(table: &SchedulingTable, zone: u32, slot: usize) -> Result<SlotAction> {
    if slot >= table.slots_per_frame() {
        return Err(Error::InvalidArgument(format!(
            "slot {slot} out of range for a {}-slot frame",
            table.slots_per_frame()
        )));
    }
    Ok(table.action(zone, slot))
}
