use std::fmt;

use crate::types::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Generate,
    Transmit,
    Defer,
    Receive,
    Collision,
    Lost,
    Deliver,
    Drop,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Generate => "generate",
            EventKind::Transmit => "transmit",
            EventKind::Defer => "defer",
            EventKind::Receive => "receive",
            EventKind::Collision => "collision",
            EventKind::Lost => "lost",
            EventKind::Deliver => "deliver",
            EventKind::Drop => "drop",
        }
    }
}

/// One MAC event. Displays as `t_s frame slot node event detail`.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t_s: f64,
    pub frame: u64,
    pub slot: usize,
    pub node: NodeId,
    pub kind: EventKind,
    pub detail: String,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.6} {} {} {} {} {}",
            self.t_s,
            self.frame,
            self.slot,
            self.node,
            self.kind.name(),
            self.detail
        )
    }
}
