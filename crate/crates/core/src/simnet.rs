//! Discrete-time network of routers over a directed, metric-labelled
//! ground-truth topology.
//!
//! One [`Network::tick`] delivers every transmission due at the current
//! clock, steps each router that is not busy transmitting (in ascending
//! id order by default), applies scheduled topology events, and advances
//! every clock. A broadcast takes `LB + U{0..ΔB}` ticks and reaches the
//! neighbours in range when it started.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Arrival, NetworkParams, Router, RouterConfig, RouterEvent, StartOffsets};
use crate::error::NetworkError;
use crate::messages::{render_packet, Packet};
use crate::topology::RoutingSet;
use crate::types::{Metric, NodeId};

/// Directed links with metrics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundTruth {
    nodes: BTreeSet<NodeId>,
    links: BTreeMap<NodeId, BTreeMap<NodeId, Metric>>,
}

impl GroundTruth {
    pub fn new(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        GroundTruth {
            nodes: nodes.into_iter().collect(),
            links: BTreeMap::new(),
        }
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn set_link(&mut self, src: &NodeId, dst: &NodeId, metric: Metric) {
        self.links
            .entry(src.clone())
            .or_default()
            .insert(dst.clone(), metric);
    }

    pub fn remove_link(&mut self, src: &NodeId, dst: &NodeId) {
        if let Some(out) = self.links.get_mut(src) {
            out.remove(dst);
        }
    }

    pub fn metric(&self, src: &NodeId, dst: &NodeId) -> Option<Metric> {
        self.links.get(src).and_then(|out| out.get(dst)).copied()
    }

    /// Nodes that hear `src`, with the metric of each link.
    pub fn range(&self, src: &NodeId) -> impl Iterator<Item = (&NodeId, Metric)> {
        self.links.get(src).into_iter().flatten().map(|(d, m)| (d, *m))
    }

    /// Every directed link.
    pub fn links(&self) -> impl Iterator<Item = (&NodeId, &NodeId, Metric)> {
        self.links
            .iter()
            .flat_map(|(s, out)| out.iter().map(move |(d, m)| (s, d, *m)))
    }

    pub fn apply(&mut self, event: &TopologyEvent) {
        match event {
            TopologyEvent::LinkUp { src, dst, metric } | TopologyEvent::MetricChange { src, dst, metric } => {
                self.set_link(src, dst, *metric)
            }
            TopologyEvent::LinkDown { src, dst } => self.remove_link(src, dst),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyEvent {
    LinkUp { src: NodeId, dst: NodeId, metric: Metric },
    LinkDown { src: NodeId, dst: NodeId },
    MetricChange { src: NodeId, dst: NodeId, metric: Metric },
}

impl TopologyEvent {
    pub fn endpoints(&self) -> (&NodeId, &NodeId) {
        match self {
            TopologyEvent::LinkUp { src, dst, .. }
            | TopologyEvent::LinkDown { src, dst }
            | TopologyEvent::MetricChange { src, dst, .. } => (src, dst),
        }
    }
}

impl fmt::Display for TopologyEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyEvent::LinkUp { src, dst, metric } => write!(f, "linkup {src} {dst} {metric}"),
            TopologyEvent::LinkDown { src, dst } => write!(f, "linkdown {src} {dst}"),
            TopologyEvent::MetricChange { src, dst, metric } => write!(f, "metric {src} {dst} {metric}"),
        }
    }
}

/// A broadcast on its way to the neighbours snapshotted at send time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InFlight {
    pub sender: NodeId,
    pub packet: Packet,
    pub deliver_at: i64,
    pub recipients: Vec<(NodeId, Metric)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraceKind {
    Broadcast,
    Deliver,
    HelloGen,
    TcGen,
    TcFwd,
    LinkEvent,
    RouteChange,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceKind::Broadcast => "BROADCAST",
            TraceKind::Deliver => "DELIVER",
            TraceKind::HelloGen => "HELLO_GEN",
            TraceKind::TcGen => "TC_GEN",
            TraceKind::TcFwd => "TC_FWD",
            TraceKind::LinkEvent => "LINK_EVENT",
            TraceKind::RouteChange => "ROUTE_CHANGE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub tick: i64,
    pub node: NodeId,
    pub kind: TraceKind,
    pub detail: String,
    /// The packet carried by BROADCAST and DELIVER events.
    pub packet: Option<Packet>,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} n={} ev={} {}", self.tick, self.node, self.kind, self.detail)
    }
}

/// One line per event.
pub fn render_trace(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

fn render_routes(rs: &RoutingSet) -> String {
    let parts: Vec<String> = rs
        .values()
        .map(|r| format!("{} via {} m={}", r.dest, r.next_hop, r.metric))
        .collect();
    format!("rs={{{}}}", parts.join(","))
}

/// Seeded perturbation of measured link metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricNoise {
    pub lo: i64,
    pub hi: i64,
}

/// A router to place in the network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSpec {
    pub config: RouterConfig,
    pub offsets: Option<StartOffsets>,
}

/// Everything needed to assemble a [`Network`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    pub lb: i64,
    pub delta_b: i64,
    pub seed: u64,
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<(NodeId, NodeId, Metric)>,
    pub events: Vec<(i64, TopologyEvent)>,
    pub noise: Option<MetricNoise>,
    /// Check timing inequalities and start offsets.
    pub strict: bool,
}

impl NetworkSpec {
    pub fn new(lb: i64, delta_b: i64, seed: u64) -> Self {
        NetworkSpec {
            lb,
            delta_b,
            seed,
            nodes: Vec::new(),
            links: Vec::new(),
            events: Vec::new(),
            noise: None,
            strict: true,
        }
    }

    pub fn params(&self) -> NetworkParams {
        NetworkParams {
            lb: self.lb,
            delta_b: self.delta_b,
            node_count: self.nodes.len(),
        }
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn build_network(spec: &NetworkSpec) -> Result<Network, NetworkError> {
    let params = spec.params();
    if spec.delta_b < 0 {
        return Err(NetworkError::Params("ΔB must be nonnegative"));
    }
    if spec.lb < 1 {
        return Err(NetworkError::Params("LB must be positive"));
    }
    let mut ids = BTreeSet::new();
    for n in &spec.nodes {
        if !ids.insert(n.config.ip.clone()) {
            return Err(NetworkError::DuplicateNode(n.config.ip.clone()));
        }
    }
    let mut truth = GroundTruth::new(ids.iter().cloned());
    let check_link = |src: &NodeId, dst: &NodeId| {
        if src == dst {
            return Err(NetworkError::SelfLink(src.clone()));
        }
        if !ids.contains(src) || !ids.contains(dst) {
            return Err(NetworkError::DanglingLink(src.clone(), dst.clone()));
        }
        Ok(())
    };
    for (src, dst, metric) in &spec.links {
        check_link(src, dst)?;
        if !metric.is_finite() {
            return Err(NetworkError::BadMetric);
        }
        truth.set_link(src, dst, *metric);
    }
    let mut schedule: BTreeMap<i64, Vec<TopologyEvent>> = BTreeMap::new();
    for (tick, event) in &spec.events {
        let (src, dst) = event.endpoints();
        check_link(src, dst)?;
        schedule.entry(*tick).or_default().push(event.clone());
    }

    let mut routers = BTreeMap::new();
    let mut duration_rngs = BTreeMap::new();
    let index: BTreeMap<&NodeId, u64> = ids.iter().zip(0u64..).collect();
    for n in &spec.nodes {
        let i = index[&n.config.ip];
        let rng = stream(spec.seed, 2 * i + 1);
        let router = if spec.strict {
            Router::new(n.config.clone(), &params, 0, n.offsets, rng)?
        } else {
            Router::new_unchecked(n.config.clone(), &params, 0, n.offsets, rng)
        };
        routers.insert(n.config.ip.clone(), router);
        duration_rngs.insert(n.config.ip.clone(), stream(spec.seed, 2 * i + 2));
    }
    Ok(Network {
        params,
        truth,
        routers,
        in_flight: Vec::new(),
        clock: 0,
        schedule,
        duration_rngs,
        noise: spec.noise,
        noise_rng: stream(spec.seed, 0),
        step_order: ids.into_iter().collect(),
    })
}

#[derive(Clone, Debug)]
pub struct Network {
    params: NetworkParams,
    truth: GroundTruth,
    routers: BTreeMap<NodeId, Router>,
    in_flight: Vec<InFlight>,
    clock: i64,
    schedule: BTreeMap<i64, Vec<TopologyEvent>>,
    duration_rngs: BTreeMap<NodeId, ChaCha8Rng>,
    noise: Option<MetricNoise>,
    noise_rng: ChaCha8Rng,
    step_order: Vec<NodeId>,
}

impl Network {
    pub fn clock(&self) -> i64 {
        self.clock
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn router(&self, id: &NodeId) -> Option<&Router> {
        self.routers.get(id)
    }

    pub fn routers(&self) -> impl Iterator<Item = &Router> {
        self.routers.values()
    }

    pub fn in_flight(&self) -> &[InFlight] {
        &self.in_flight
    }

    /// Overrides the order routers are stepped in within a tick.
    ///
    /// # Panics
    ///
    /// Panics unless `order` is a permutation of the node ids.
    pub fn set_step_order(&mut self, order: Vec<NodeId>) {
        let mut sorted = order.clone();
        sorted.sort();
        assert!(
            sorted.iter().eq(self.routers.keys()),
            "step order must be a permutation of the nodes"
        );
        self.step_order = order;
    }

    /// Whether `id` is still transmitting.
    pub fn is_busy(&self, id: &NodeId) -> bool {
        self.in_flight
            .iter()
            .any(|f| &f.sender == id && f.deliver_at > self.clock)
    }

    fn measure(&mut self, sender: &NodeId, recipient: &NodeId, snapshot: Metric) -> Metric {
        let base = self.truth.metric(sender, recipient).unwrap_or(snapshot);
        match (self.noise, base) {
            (Some(n), Metric::Finite(m)) => {
                let delta = self.noise_rng.gen_range(n.lo..=n.hi.max(n.lo));
                Metric::finite((m as i64 + delta).max(1) as u64)
            }
            _ => base,
        }
    }

    /// Advances the network by one tick and returns what happened.
    pub fn tick(&mut self) -> Vec<TraceEvent> {
        let t = self.clock;
        let mut events = Vec::new();

        let (mut due, rest): (Vec<InFlight>, Vec<InFlight>) =
            self.in_flight.drain(..).partition(|f| f.deliver_at == t);
        self.in_flight = rest;
        due.sort_by(|a, b| a.sender.cmp(&b.sender));
        for f in due {
            for (r, snapshot) in &f.recipients {
                let metric = self.measure(&f.sender, r, *snapshot);
                events.push(TraceEvent {
                    tick: t,
                    node: r.clone(),
                    kind: TraceKind::Deliver,
                    detail: format!("from={} m={} pkt={}", f.sender, metric, render_packet(&f.packet)),
                    packet: Some(f.packet.clone()),
                });
                if let Some(router) = self.routers.get_mut(r) {
                    router.enqueue(Arrival {
                        sender: f.sender.clone(),
                        packet: f.packet.clone(),
                        link_metric: metric,
                    });
                }
            }
        }

        for id in self.step_order.clone() {
            if self.is_busy(&id) {
                continue;
            }
            let router = self.routers.get_mut(&id).expect("stepped node exists");
            let out = router.step();
            for e in out.events {
                let (kind, detail) = match e {
                    RouterEvent::HelloGenerated(h) => (TraceKind::HelloGen, h.to_string()),
                    RouterEvent::TcGenerated(tc) => (TraceKind::TcGen, tc.to_string()),
                    RouterEvent::TcForwarded(tc) => (TraceKind::TcFwd, tc.to_string()),
                    RouterEvent::RouteChange(rs) => (TraceKind::RouteChange, render_routes(&rs)),
                };
                events.push(TraceEvent {
                    tick: t,
                    node: id.clone(),
                    kind,
                    detail,
                    packet: None,
                });
            }
            if let Some(packet) = out.broadcast {
                let rng = self.duration_rngs.get_mut(&id).expect("every node has a stream");
                let d = self.params.lb + rng.gen_range(0..=self.params.delta_b);
                let recipients: Vec<(NodeId, Metric)> =
                    self.truth.range(&id).map(|(n, m)| (n.clone(), m)).collect();
                let to: Vec<&str> = recipients.iter().map(|(n, _)| n.as_str()).collect();
                events.push(TraceEvent {
                    tick: t,
                    node: id.clone(),
                    kind: TraceKind::Broadcast,
                    detail: format!("d={d} to={{{}}} pkt={}", to.join(","), render_packet(&packet)),
                    packet: Some(packet.clone()),
                });
                self.in_flight.push(InFlight {
                    sender: id.clone(),
                    packet,
                    deliver_at: t + d,
                    recipients,
                });
            }
        }

        if let Some(scheduled) = self.schedule.remove(&t) {
            for event in scheduled {
                self.truth.apply(&event);
                events.push(TraceEvent {
                    tick: t,
                    node: event.endpoints().0.clone(),
                    kind: TraceKind::LinkEvent,
                    detail: event.to_string(),
                    packet: None,
                });
            }
        }

        self.clock += 1;
        for r in self.routers.values_mut() {
            r.advance_clock();
        }
        events.sort_by(|a, b| a.node.cmp(&b.node));
        events
    }

    /// Runs `ticks` ticks and returns the concatenated trace.
    pub fn run(&mut self, ticks: u64) -> Vec<TraceEvent> {
        let mut trace = Vec::new();
        for _ in 0..ticks {
            trace.extend(self.tick());
        }
        trace
    }

    /// Every router's state, in id order.
    pub fn render_state(&self) -> String {
        self.routers.values().map(Router::render_state).collect()
    }
}
