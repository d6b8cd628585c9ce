//! Contention and reception rules inside a single slot.
//!
//! Candidates draw a backoff in micro-slots and sense the carrier until it
//! expires. A candidate transmits unless it hears a transmission that started
//! strictly earlier; candidates that pick the same micro-slot cannot hear each
//! other in time and both go on air. When every candidate hears every other
//! this reduces to [`contend`]: the unique minimum wins, tied minima collide.

use crate::rng::SimRng;
use crate::types::NodeId;

use super::CsmaConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContentionOutcome {
    Idle,
    Winner(NodeId),
    Collision(Vec<NodeId>),
}

/// Single collision domain contention. Backoffs are drawn in ascending id
/// order regardless of the order of `candidates`.
pub fn contend(candidates: &[NodeId], csma: &CsmaConfig, rng: &mut SimRng) -> ContentionOutcome {
    let mut ids = candidates.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return ContentionOutcome::Idle;
    }
    let backoffs = draw_backoffs(ids.len(), csma, rng);
    let min = *backoffs.iter().min().expect("non-empty");
    let tied: Vec<NodeId> = ids
        .iter()
        .zip(&backoffs)
        .filter(|(_, &b)| b == min)
        .map(|(&id, _)| id)
        .collect();
    match tied.as_slice() {
        [one] => ContentionOutcome::Winner(*one),
        _ => ContentionOutcome::Collision(tied),
    }
}

pub(crate) fn draw_backoffs(n: usize, csma: &CsmaConfig, rng: &mut SimRng) -> Vec<u32> {
    (0..n)
        .map(|_| rng.below(u64::from(csma.contention_window)) as u32)
        .collect()
}

/// Which candidates go on air, given their backoffs and who can hear whom.
pub fn carrier_sense(backoffs: &[u32], hears: impl Fn(usize, usize) -> bool) -> Vec<bool> {
    let mut order: Vec<usize> = (0..backoffs.len()).collect();
    order.sort_by_key(|&i| (backoffs[i], i));
    let mut on_air = vec![false; backoffs.len()];
    for (k, &i) in order.iter().enumerate() {
        let blocked = order[..k]
            .iter()
            .any(|&j| on_air[j] && backoffs[j] < backoffs[i] && hears(i, j));
        on_air[i] = !blocked;
    }
    on_air
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reception {
    Received,
    Collided,
    Overheard,
}

/// Fate of a frame at one listening node.
///
/// `in_range_tx` counts every active transmitter the node can hear,
/// including the sender of this frame.
pub fn deliver(is_next_hop: bool, in_range_tx: usize) -> Reception {
    if !is_next_hop {
        Reception::Overheard
    } else if in_range_tx <= 1 {
        Reception::Received
    } else {
        Reception::Collided
    }
}
