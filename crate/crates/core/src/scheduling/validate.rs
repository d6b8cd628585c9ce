use std::fmt;

use super::{SchedulingTable, SlotAction, TableKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `action` at (`row`, `slot`) lacks its counterpart in an adjacent row.
    Pairing {
        row: usize,
        slot: usize,
        action: SlotAction,
        expected: SlotAction,
    },
    SlotCount { expected: usize, found: usize },
    ZonePeriod { expected: usize, found: usize },
    BroadcastPlacement(String),
    GatewayRow(String),
    /// A row with no TransmitUp strands every zone that maps onto it.
    NoUpstreamSlot { row: usize },
    KindConstraint(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Pairing {
                row,
                slot,
                action,
                expected,
            } => write!(
                f,
                "{action} at row {row} slot {slot} has no {expected} in the adjacent row"
            ),
            Violation::SlotCount { expected, found } => {
                write!(f, "expected {expected} slots per frame, found {found}")
            }
            Violation::ZonePeriod { expected, found } => {
                write!(f, "expected {expected} zone rows, found {found}")
            }
            Violation::BroadcastPlacement(msg) => write!(f, "broadcast slot: {msg}"),
            Violation::GatewayRow(msg) => write!(f, "gateway row: {msg}"),
            Violation::NoUpstreamSlot { row } => write!(f, "row {row} has no TransmitUp"),
            Violation::KindConstraint(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a table against the structural rules every schedule must obey.
///
/// Pairing is checked in both directions: a transmit cell needs the matching
/// receive cell one row toward its destination, and every receive cell needs
/// a transmitter feeding it. Broadcast cells pair with either neighbor row.
pub fn validate_table(table: &SchedulingTable) -> ValidationReport {
    use SlotAction::*;

    let kind = table.kind();
    let period = table.zone_period();
    let slots = table.slots_per_frame();
    let mut out = Vec::new();

    if slots != kind.slots_per_frame() {
        out.push(Violation::SlotCount {
            expected: kind.slots_per_frame(),
            found: slots,
        });
    }
    if period != kind.zone_period() {
        out.push(Violation::ZonePeriod {
            expected: kind.zone_period(),
            found: period,
        });
    }

    let above = |r: usize| (r + period - 1) % period;
    let below = |r: usize| (r + 1) % period;

    for r in 0..period {
        for s in 0..slots {
            let a = table.cell(r, s);
            let pair = |row: usize, want: SlotAction| table.cell(row, s) == want;
            let expected = match a {
                TransmitUp if !pair(above(r), ReceiveUp) => Some(ReceiveUp),
                ReceiveUp if !pair(below(r), TransmitUp) => Some(TransmitUp),
                TransmitDown if !pair(below(r), ReceiveDown) => Some(ReceiveDown),
                ReceiveDown if !pair(above(r), TransmitDown) => Some(TransmitDown),
                TransmitBroadcast
                    if !pair(above(r), ReceiveBroadcast) && !pair(below(r), ReceiveBroadcast) =>
                {
                    Some(ReceiveBroadcast)
                }
                ReceiveBroadcast
                    if !pair(above(r), TransmitBroadcast)
                        && !pair(below(r), TransmitBroadcast) =>
                {
                    Some(TransmitBroadcast)
                }
                _ => None,
            };
            if let Some(expected) = expected {
                out.push(Violation::Pairing {
                    row: r,
                    slot: s,
                    action: a,
                    expected,
                });
            }
        }
        if !table.row(r).contains(&TransmitUp) {
            out.push(Violation::NoUpstreamSlot { row: r });
        }
    }

    check_broadcast(table, &mut out);

    let gateway = table.effective_row(0);
    if !gateway.contains(&ReceiveUp) {
        out.push(Violation::GatewayRow("no ReceiveUp slot".into()));
    }
    if !gateway.contains(&TransmitDown) && !gateway.contains(&TransmitBroadcast) {
        out.push(Violation::GatewayRow(
            "no TransmitDown or TransmitBroadcast slot".into(),
        ));
    }

    check_kind(table, &mut out);

    ValidationReport { violations: out }
}

fn check_broadcast(table: &SchedulingTable, out: &mut Vec<Violation>) {
    let kind = table.kind();
    let bslots = table.broadcast_slots();
    if kind == TableKind::V && !bslots.is_empty() {
        out.push(Violation::BroadcastPlacement(format!(
            "V tables carry no broadcast cells, found some in slots {bslots:?}"
        )));
    }
    if kind.has_broadcast_slot() {
        let last = table.slots_per_frame() - 1;
        if bslots != [last] {
            out.push(Violation::BroadcastPlacement(format!(
                "exactly the last slot ({last}) must carry broadcast cells, found {bslots:?}"
            )));
        }
        for r in 0..table.zone_period() {
            if !table.cell(r, last).is_broadcast() {
                out.push(Violation::BroadcastPlacement(format!(
                    "row {r} is not broadcasting in the broadcast slot"
                )));
            }
        }
    }
}

fn check_kind(table: &SchedulingTable, out: &mut Vec<Violation>) {
    let period = table.zone_period();
    match table.kind() {
        TableKind::Leon4x4CrossedShifted => {
            for r in 0..period {
                if !table.row(r).contains(&SlotAction::Sleep) {
                    out.push(Violation::KindConstraint(format!(
                        "row {r} has no sleep slot"
                    )));
                }
            }
        }
        TableKind::Leon4x4CrossedNotShifted => {
            for r in 0..period {
                if table.row(r).contains(&SlotAction::TransmitDown) {
                    out.push(Violation::KindConstraint(format!(
                        "row {r} sends downstream outside local broadcast"
                    )));
                }
            }
        }
        TableKind::Crossed4x4Shifted => {
            let shared = (0..period).any(|r| {
                (0..table.slots_per_frame()).any(|s| {
                    table.cell(r, s).is_transmit() && table.cell((r + 2) % period, s).is_transmit()
                })
            });
            if !shared {
                out.push(Violation::KindConstraint(
                    "no slot where alternate zones transmit together".into(),
                ));
            }
        }
        TableKind::X | TableKind::V | TableKind::V9x9 => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduling::build_table;

    #[test]
    fn builtins_are_clean() {
        for kind in TableKind::ALL {
            let report = validate_table(&build_table(kind));
            assert!(report.is_empty(), "{kind}: {report}");
        }
    }

    #[test]
    fn unpaired_transmit_is_reported() {
        // V rows are period 8; put a TransmitUp at (3, 2) above a sleeping row 2.
        let mut t = build_table(TableKind::V);
        t.set_cell(3, 2, SlotAction::TransmitUp);
        t.set_cell(2, 2, SlotAction::Sleep);
        let report = validate_table(&t);
        assert!(report.violations.contains(&Violation::Pairing {
            row: 3,
            slot: 2,
            action: SlotAction::TransmitUp,
            expected: SlotAction::ReceiveUp,
        }));
    }

    #[test]
    fn flipping_any_active_cell_is_caught() {
        for kind in TableKind::ALL {
            let base = build_table(kind);
            for r in 0..base.zone_period() {
                for s in 0..base.slots_per_frame() {
                    if base.cell(r, s) == SlotAction::Sleep {
                        continue;
                    }
                    let mut t = base.clone();
                    t.set_cell(r, s, SlotAction::Sleep);
                    t = SchedulingTable::from_rows(
                        kind,
                        &(0..t.zone_period()).map(|r| t.row(r).to_vec()).collect::<Vec<_>>(),
                    )
                    .unwrap();
                    assert!(
                        !validate_table(&t).is_empty(),
                        "{kind}: flipping ({r},{s}) went unnoticed"
                    );
                }
            }
        }
    }

    #[test]
    fn wrong_shape_is_reported() {
        let t = build_table(TableKind::V);
        let rows: Vec<Vec<SlotAction>> = (0..8).map(|r| t.row(r).to_vec()).collect();
        let as_x = SchedulingTable::from_rows(TableKind::X, &rows).unwrap();
        let report = validate_table(&as_x);
        assert!(report
            .violations
            .contains(&Violation::SlotCount { expected: 17, found: 8 }));
        assert!(report
            .violations
            .contains(&Violation::ZonePeriod { expected: 9, found: 8 }));
    }

    #[test]
    fn broadcast_cells_outside_the_broadcast_slot() {
        let mut rows: Vec<Vec<SlotAction>> = {
            let t = build_table(TableKind::V9x9);
            (0..9).map(|r| t.row(r).to_vec()).collect()
        };
        // Move row 0's broadcast into slot 2 (which is sleeping there).
        assert_eq!(rows[0][2], SlotAction::Sleep);
        rows[0][2] = SlotAction::TransmitBroadcast;
        rows[1][2] = SlotAction::ReceiveBroadcast;
        let t = SchedulingTable::from_rows(TableKind::V9x9, &rows).unwrap();
        let report = validate_table(&t);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BroadcastPlacement(_))));
    }
}
