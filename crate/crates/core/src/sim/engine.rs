use std::collections::{BTreeMap, VecDeque};

use crate::energy::{EnergyAccount, RadioState};
use crate::error::{Error, Result};
use crate::packet::{airtime, packet_bits, Direction, Packet};
use crate::rng::{derive_seed, SimRng};
use crate::scheduling::{downstream_reach, SlotAction};
use crate::types::NodeId;

use super::events::{Event, EventKind};
use super::mac::{carrier_sense, deliver, draw_backoffs, Reception};
use super::{RunResult, Scenario};

const STREAM_JITTER: u64 = 1;
const STREAM_MAC: u64 = 2;
const STREAM_DEST: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Queued,
    Delivered,
    Dropped,
}

#[derive(Debug, Clone)]
struct Flight {
    packet: Packet,
    dest: NodeId,
    airtime_s: f64,
    retries: u32,
    eligible_slot: u64,
    delivered_slot: u64,
    zones: Vec<u32>,
    status: Status,
}

/// Frames from the one a packet became ready in to the one it arrived in, inclusive.
fn latency_frames(fl: &Flight, slots_per_frame: u64) -> u64 {
    fl.delivered_slot / slots_per_frame - fl.eligible_slot / slots_per_frame + 1
}

/// Route and timing of a delivered packet.
#[derive(Debug, Clone, PartialEq)]
pub struct HopTrace {
    pub src: NodeId,
    pub dest: NodeId,
    pub direction: Direction,
    /// Zone of every holder, origin first, destination last.
    pub zones: Vec<u32>,
    pub created_at: f64,
    pub eligible_slot: u64,
    pub delivered_slot: u64,
    pub latency_frames: u64,
}

#[derive(Debug, Clone)]
struct Node {
    active: bool,
    zone: u32,
    parent: Option<NodeId>,
    row: Vec<SlotAction>,
    queue: VecDeque<usize>,
    account: EnergyAccount,
    jitter_s: f64,
    next_report: u64,
}

#[derive(Debug, Clone, Copy)]
enum Role {
    Idle,
    Transmit { start: f64, end: f64 },
    Deferred { sensed: f64 },
}

#[derive(Debug, Clone, Copy)]
struct OnAir {
    node: usize,
    queue_pos: usize,
    flight: usize,
    end: f64,
}

/// Step-by-step execution of one scenario.
pub struct Simulation<'a> {
    sc: &'a Scenario,
    nodes: Vec<Node>,
    flights: Vec<Flight>,
    mac_rng: SimRng,
    dest_rng: SimRng,
    slots_per_frame: u64,
    total_slots: u64,
    next_slot: u64,
    early_sleep: bool,
    downstream_dir: Direction,
    downstream_targets: Vec<NodeId>,
    gateway_jitter_s: f64,
    next_downstream: u64,
    generated: u64,
    delivered: u64,
    collisions: u64,
    retransmissions: u64,
    dropped: u64,
    upstream_delivered: u64,
    latency_sum: u64,
    log: Option<Vec<Event>>,
    heard: Vec<Vec<usize>>,
    roles: Vec<Role>,
}

impl<'a> Simulation<'a> {
    pub fn new(sc: &'a Scenario) -> Result<Self> {
        sc.validate()?;
        let topo = &sc.topology;
        let table = &sc.table;
        let mut jitter_rng = SimRng::new(derive_seed(&[sc.seed, STREAM_JITTER]));
        let report_cap = sc.traffic.report_interval_s.map(|t| t.min(sc.frame_s()));

        let nodes: Vec<Node> = (0..topo.len())
            .map(|i| {
                let id = NodeId::from(i);
                let zone = topo.zone(id);
                let jitter_s = match (zone, report_cap) {
                    (Some(z), Some(cap)) if z > 0 => jitter_rng.unit() * cap,
                    _ => 0.0,
                };
                Node {
                    active: zone.is_some(),
                    zone: zone.unwrap_or(0),
                    parent: topo.parent(id),
                    row: zone.map(|z| table.effective_row(z)).unwrap_or_default(),
                    queue: VecDeque::new(),
                    account: EnergyAccount::new(),
                    jitter_s,
                    next_report: 0,
                }
            })
            .collect();
        let gateway_jitter_s = sc
            .traffic
            .downstream_interval_s
            .map(|t| jitter_rng.unit() * t.min(sc.frame_s()))
            .unwrap_or(0.0);

        let reach = downstream_reach(table);
        let downstream_targets = topo
            .active_nodes()
            .filter(|&n| match topo.zone(n) {
                Some(z) => z > 0 && reach.is_none_or(|r| z <= r),
                None => false,
            })
            .collect();
        let downstream_dir = if table.downstream_via_broadcast() {
            Direction::Broadcast
        } else {
            Direction::Downstream
        };

        Ok(Simulation {
            sc,
            heard: vec![Vec::new(); nodes.len()],
            roles: vec![Role::Idle; nodes.len()],
            nodes,
            flights: Vec::new(),
            mac_rng: SimRng::new(derive_seed(&[sc.seed, STREAM_MAC])),
            dest_rng: SimRng::new(derive_seed(&[sc.seed, STREAM_DEST])),
            slots_per_frame: table.slots_per_frame() as u64,
            total_slots: sc.total_slots(),
            next_slot: 0,
            early_sleep: table.kind().sleeps_after_exchange(),
            downstream_dir,
            downstream_targets,
            gateway_jitter_s,
            next_downstream: 0,
            generated: 0,
            delivered: 0,
            collisions: 0,
            retransmissions: 0,
            dropped: 0,
            upstream_delivered: 0,
            latency_sum: 0,
            log: None,
        })
    }

    /// Records every MAC event from now on.
    pub fn with_event_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn events(&self) -> &[Event] {
        self.log.as_deref().unwrap_or(&[])
    }

    /// Index of the slot the next [`slot_step`](Self::slot_step) will run.
    pub fn next_slot(&self) -> u64 {
        self.next_slot
    }

    pub fn total_slots(&self) -> u64 {
        self.total_slots
    }

    pub fn account(&self, node: NodeId) -> &EnergyAccount {
        &self.nodes[node.index()].account
    }

    /// Offset of a node's report times from multiples of the report interval.
    pub fn report_jitter_s(&self, node: NodeId) -> f64 {
        self.nodes[node.index()].jitter_s
    }

    /// Generation time of a node's `k`-th report.
    fn report_time(&self, node: usize, k: u64) -> Option<f64> {
        let t = self.sc.traffic.report_interval_s?;
        Some(k as f64 * t + self.nodes[node].jitter_s)
    }

    fn downstream_time(&self, k: u64) -> Option<f64> {
        let t = self.sc.traffic.downstream_interval_s?;
        Some(k as f64 * t + self.gateway_jitter_s)
    }

    fn emit(&mut self, t_s: f64, slot: u64, node: usize, kind: EventKind, detail: impl FnOnce() -> String) {
        if let Some(log) = &mut self.log {
            log.push(Event {
                t_s,
                frame: slot / self.slots_per_frame,
                slot: (slot % self.slots_per_frame) as usize,
                node: NodeId::from(node),
                kind,
                detail: detail(),
            });
        }
    }

    /// Queues a packet at `src` for `dest`, ready in the next slot to run.
    /// One end must be the gateway.
    pub fn inject(&mut self, src: NodeId, dest: NodeId) -> Result<usize> {
        let topo = &self.sc.topology;
        let ok = |n: NodeId| n.index() < topo.len() && topo.is_active(n);
        if !ok(src) || !ok(dest) || src == dest {
            return Err(Error::InvalidArgument(format!(
                "cannot send from node {src} to node {dest}"
            )));
        }
        let direction = if dest.is_gateway() {
            Direction::Upstream
        } else if src.is_gateway() {
            self.downstream_dir
        } else {
            return Err(Error::InvalidArgument(
                "packets travel to or from the gateway".into(),
            ));
        };
        let now = self.next_slot as f64 * self.sc.slot_s;
        Ok(self.create(src.index(), dest, direction, now, self.next_slot))
    }

    fn create(&mut self, src: usize, dest: NodeId, direction: Direction, created_at: f64, slot: u64) -> usize {
        let t = &self.sc.traffic;
        let packet = Packet {
            src: NodeId::from(src),
            origin_zone: self.nodes[src].zone,
            direction,
            header_bytes: t.header_bytes,
            payload_bytes: t.payload_bytes,
            extra_payload_bits: t.extra_payload_bits,
            created_at,
        };
        let id = self.flights.len();
        self.flights.push(Flight {
            airtime_s: airtime(packet_bits(&packet, &self.sc.profile), &self.sc.profile),
            packet,
            dest,
            retries: 0,
            eligible_slot: slot,
            delivered_slot: 0,
            zones: vec![self.nodes[src].zone],
            status: Status::Queued,
        });
        self.generated += 1;
        self.emit(created_at, slot, src, EventKind::Generate, || {
            format!("pkt={id} dir={direction} dest={dest}")
        });
        self.enqueue(src, id, created_at, slot);
        id
    }

    fn enqueue(&mut self, node: usize, flight: usize, t_s: f64, slot: u64) {
        if self.nodes[node].queue.len() >= self.sc.queue_capacity {
            self.flights[flight].status = Status::Dropped;
            self.dropped += 1;
            self.emit(t_s, slot, node, EventKind::Drop, || {
                format!("pkt={flight} reason=overflow")
            });
        } else {
            self.nodes[node].queue.push_back(flight);
        }
    }

    /// Creates every packet due by `now` (strictly before it when `strict`).
    fn generate_traffic(&mut self, now: f64, strict: bool, slot: u64) {
        let due = |t: f64| if strict { t < now } else { t <= now };
        if self.sc.traffic.report_interval_s.is_some() {
            for i in 1..self.nodes.len() {
                if !self.nodes[i].active {
                    continue;
                }
                while let Some(t) = self.report_time(i, self.nodes[i].next_report).filter(|&t| due(t)) {
                    self.nodes[i].next_report += 1;
                    self.create(i, NodeId::GATEWAY, Direction::Upstream, t, slot);
                }
            }
        }
        if self.downstream_targets.is_empty() {
            return;
        }
        while let Some(t) = self.downstream_time(self.next_downstream).filter(|&t| due(t)) {
            self.next_downstream += 1;
            let pick = self.dest_rng.below(self.downstream_targets.len() as u64) as usize;
            let dest = self.downstream_targets[pick];
            self.create(0, dest, self.downstream_dir, t, slot);
        }
    }

    /// The neighbor a packet held by `node` is sent to.
    fn next_hop(&self, node: usize, flight: &Flight) -> NodeId {
        match flight.packet.direction {
            Direction::Upstream => self.nodes[node].parent.expect("active non-gateway node has a parent"),
            Direction::Downstream | Direction::Broadcast => {
                let mut v = flight.dest;
                while let Some(p) = self.nodes[v.index()].parent {
                    if p.index() == node {
                        return v;
                    }
                    v = p;
                }
                unreachable!("destination {} is not below node {node}", flight.dest)
            }
        }
    }

    /// Runs the next slot. Returns `false` once the scenario duration is used up.
    pub fn slot_step(&mut self) -> bool {
        let g = self.next_slot;
        if g >= self.total_slots {
            return false;
        }
        let sc = self.sc;
        let slot_s = sc.slot_s;
        let micro = sc.csma.micro_slot_s;
        let s = (g % self.slots_per_frame) as usize;
        let t0 = g as f64 * slot_s;
        self.generate_traffic(t0, false, g);

        // Transmit cells holding a packet of the matching direction contend.
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if !n.active {
                continue;
            }
            let want = match n.row[s] {
                SlotAction::TransmitUp => Direction::Upstream,
                SlotAction::TransmitDown => Direction::Downstream,
                SlotAction::TransmitBroadcast => Direction::Broadcast,
                _ => continue,
            };
            if let Some(pos) = n
                .queue
                .iter()
                .position(|&f| self.flights[f].packet.direction == want)
            {
                cands.push((i, pos));
            }
        }
        let backoffs = draw_backoffs(cands.len(), &sc.csma, &mut self.mac_rng);
        let topo = &sc.topology;
        let hears = |a: usize, b: usize| topo.are_neighbors(NodeId::from(cands[a].0), NodeId::from(cands[b].0));
        let on_air = carrier_sense(&backoffs, hears);

        let mut txs: Vec<OnAir> = Vec::new();
        for (k, &(node, pos)) in cands.iter().enumerate() {
            let start = f64::from(backoffs[k]) * micro;
            if on_air[k] {
                let flight = self.nodes[node].queue[pos];
                let end = start + self.flights[flight].airtime_s;
                self.roles[node] = Role::Transmit { start, end };
                txs.push(OnAir {
                    node,
                    queue_pos: pos,
                    flight,
                    end,
                });
            } else {
                let sensed = (0..cands.len())
                    .filter(|&j| on_air[j] && backoffs[j] < backoffs[k] && hears(k, j))
                    .map(|j| backoffs[j])
                    .min()
                    .expect("a deferring node heard an earlier transmission");
                self.roles[node] = Role::Deferred {
                    sensed: f64::from(sensed) * micro,
                };
            }
        }
        for (k, tx) in txs.iter().enumerate() {
            for &nb in topo.neighbors(NodeId::from(tx.node)) {
                self.heard[nb.index()].push(k);
            }
        }

        self.charge_energy(s, &txs);
        self.resolve(g, s, t0, &txs, &cands, &on_air);

        for &(node, _) in &cands {
            self.roles[node] = Role::Idle;
        }
        for tx in &txs {
            for &nb in topo.neighbors(NodeId::from(tx.node)) {
                self.heard[nb.index()].clear();
            }
        }
        self.next_slot += 1;
        true
    }

    fn charge_energy(&mut self, s: usize, txs: &[OnAir]) {
        let sc = self.sc;
        let slot_s = sc.slot_s;
        let window = f64::from(sc.csma.contention_window) * sc.csma.micro_slot_s;
        // Sleep-after-exchange tables power down once their part of the slot is over.
        let after = if self.early_sleep {
            RadioState::Sleep
        } else {
            RadioState::Listen
        };
        for (i, n) in self.nodes.iter_mut().enumerate() {
            if !n.active {
                continue;
            }
            let acc = &mut n.account;
            let p = &sc.profile;
            let a = n.row[s];
            if a.is_transmit() {
                match self.roles[i] {
                    Role::Transmit { start, end } => {
                        acc.add(RadioState::Listen, start, p);
                        acc.add(RadioState::Transmit, end - start, p);
                        acc.add(after, slot_s - end, p);
                    }
                    Role::Deferred { sensed } => {
                        acc.add(RadioState::Listen, sensed, p);
                        acc.add(after, slot_s - sensed, p);
                    }
                    Role::Idle => acc.add(after, slot_s, p),
                }
            } else if a.is_receive() {
                if self.early_sleep {
                    let until = self.heard[i]
                        .iter()
                        .map(|&k| txs[k].end)
                        .fold(window, f64::max);
                    acc.add(RadioState::Receive, until, p);
                    acc.add(RadioState::Sleep, slot_s - until, p);
                } else {
                    acc.add(RadioState::Receive, slot_s, p);
                }
            } else {
                acc.add(RadioState::Sleep, slot_s, p);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn resolve(
        &mut self,
        g: u64,
        s: usize,
        t0: f64,
        txs: &[OnAir],
        cands: &[(usize, usize)],
        on_air: &[bool],
    ) {
        if self.log.is_some() {
            for (k, &(node, pos)) in cands.iter().enumerate() {
                if !on_air[k] {
                    let f = self.nodes[node].queue[pos];
                    self.emit(t0, g, node, EventKind::Defer, || format!("pkt={f}"));
                }
            }
        }

        let mut collided_at: Vec<usize> = Vec::new();
        // Each node sends at most one packet per slot, so positions stay valid.
        let mut removals: Vec<(usize, usize)> = Vec::new();
        for tx in txs {
            let f = tx.flight;
            let to = self.next_hop(tx.node, &self.flights[f]);
            let start = t0 + (tx.end - self.flights[f].airtime_s);
            self.emit(start, g, tx.node, EventKind::Transmit, || format!("pkt={f} to={to}"));

            let want = match self.flights[f].packet.direction {
                Direction::Upstream => SlotAction::ReceiveUp,
                Direction::Downstream => SlotAction::ReceiveDown,
                Direction::Broadcast => SlotAction::ReceiveBroadcast,
            };
            let r = to.index();
            let outcome = if self.nodes[r].row[s] == want {
                Some(deliver(true, self.heard[r].len()))
            } else {
                None
            };
            match outcome {
                Some(Reception::Received) => {
                    removals.push((tx.node, tx.queue_pos));
                    self.receive(g, t0, tx.node, r, f);
                }
                Some(Reception::Collided) | None => {
                    if outcome.is_some() {
                        if !collided_at.contains(&r) {
                            collided_at.push(r);
                            self.collisions += 1;
                        }
                        let heard = self.heard[r].len();
                        self.emit(t0, g, tx.node, EventKind::Collision, || {
                            format!("pkt={f} at={to} heard={heard}")
                        });
                    } else {
                        self.emit(t0, g, tx.node, EventKind::Lost, || {
                            format!("pkt={f} to={to} reason=not-listening")
                        });
                    }
                    let fl = &mut self.flights[f];
                    fl.retries += 1;
                    if fl.retries > self.sc.csma.max_retries {
                        fl.status = Status::Dropped;
                        self.dropped += 1;
                        removals.push((tx.node, tx.queue_pos));
                        self.emit(t0, g, tx.node, EventKind::Drop, || format!("pkt={f} reason=retries"));
                    } else {
                        self.retransmissions += 1;
                    }
                }
                Some(Reception::Overheard) => unreachable!("the next hop is always addressed"),
            }
        }
        for (node, pos) in removals {
            self.nodes[node].queue.remove(pos);
        }
    }

    fn receive(&mut self, g: u64, t0: f64, from: usize, r: usize, f: usize) {
        let zone = self.nodes[r].zone;
        let fl = &mut self.flights[f];
        fl.zones.push(zone);
        fl.retries = 0;
        if fl.dest.index() == r {
            fl.status = Status::Delivered;
            fl.delivered_slot = g;
            self.delivered += 1;
            let latency = latency_frames(fl, self.slots_per_frame);
            if fl.packet.direction == Direction::Upstream {
                self.upstream_delivered += 1;
                self.latency_sum += latency;
            }
            self.emit(t0, g, r, EventKind::Deliver, || {
                format!("pkt={f} from={from} latency_frames={latency}")
            });
        } else {
            self.emit(t0, g, r, EventKind::Receive, || format!("pkt={f} from={from}"));
            self.enqueue(r, f, t0, g);
        }
    }

    /// Runs every remaining slot.
    pub fn run_to_end(&mut self) {
        while self.slot_step() {}
    }

    /// Every delivered packet, in generation order.
    pub fn delivered_traces(&self) -> Vec<HopTrace> {
        self.flights
            .iter()
            .filter(|f| f.status == Status::Delivered)
            .map(|f| HopTrace {
                src: f.packet.src,
                dest: f.dest,
                direction: f.packet.direction,
                zones: f.zones.clone(),
                created_at: f.packet.created_at,
                eligible_slot: f.eligible_slot,
                delivered_slot: f.delivered_slot,
                latency_frames: latency_frames(f, self.slots_per_frame),
            })
            .collect()
    }

    /// Creates the reports due before the end of the run and collects the totals.
    pub fn finish(mut self) -> RunResult {
        let end = self.total_slots as f64 * self.sc.slot_s;
        let last = self.total_slots;
        self.generate_traffic(end, true, last);
        let per_node: BTreeMap<NodeId, EnergyAccount> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.active)
            .map(|(i, n)| (NodeId::from(i), n.account.clone()))
            .collect();
        let total_energy_j = per_node.values().map(EnergyAccount::energy_joules).sum();
        let in_flight = self
            .flights
            .iter()
            .filter(|f| f.status == Status::Queued)
            .count() as u64;
        let mean_upstream_latency_frames = if self.upstream_delivered == 0 {
            0.0
        } else {
            self.latency_sum as f64 / self.upstream_delivered as f64
        };
        RunResult {
            per_node,
            total_energy_j,
            packets_generated: self.generated,
            packets_delivered: self.delivered,
            collisions: self.collisions,
            retransmissions: self.retransmissions,
            mean_upstream_latency_frames,
            dropped: self.dropped,
            in_flight,
            excluded_nodes: self.sc.topology.excluded().len(),
            duration_s: end,
        }
    }
}
