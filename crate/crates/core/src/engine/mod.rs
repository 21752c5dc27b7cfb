//! A single OLSRv2 router: its state, the update and message-processing
//! procedures, and a deterministic step policy for one clock tick.
//!
//! # Step order
//!
//! Within a tick a router first restores consistency if needed, then
//! broadcasts the accumulated packet when `send_time` has arrived. A
//! broadcast ends the router's tick. Otherwise it moves every queued
//! packet into `mqueue`, processes messages one at a time (restoring
//! consistency before each), and finally generates a HELLO and then a TC
//! if their jitter windows have opened.

mod config;

pub use config::{NetworkParams, ProtocolOptions, RouterConfig, Timing};

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::mem;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::ConfigError;
use crate::message_logs::{ProcessedSet, ReceivedSet};
use crate::messages::{forward_tc_message, make_hello, make_tc, Hello, Message, Packet, Tc};
use crate::neighborhood::{
    add_2hop_tuples, add_link_tuple, choose_fmprs, choose_rmprs, is_valid_fmpr_set,
    is_valid_rmpr_set, link_status, purge_2hop_set, purge_link_set, update_2hop_in_metrics,
    update_2hop_out_metrics, update_2hop_time, update_fmpr_selectors, update_fmprs,
    update_heard_time, update_link_out_metrics, update_rmpr_selectors, update_rmprs,
    update_symmetric_time, update_validity_time, LinkSet, TwoHopSet,
};
use crate::topology::{
    choose_optimal, increment_ansn, is_optimal_routing_set, purge_advertising_routers,
    purge_router_topology, update_advertising_routers, update_router_topology,
    update_routing_set, AdvertisingRouterSet, RoutingSet, TopologySet,
};
use crate::types::{Metric, NodeId, Sqn, Status, Time};

/// Upper bound on zero-time actions a router may take in one tick.
pub const MICRO_STEP_CAP: usize = 1_000_000;

/// A message waiting in `mqueue`, tagged with the metric of the link it
/// arrived on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inbound {
    pub msg: Message,
    pub link_metric: Metric,
}

/// A packet delivered to the router's queue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrival {
    pub sender: NodeId,
    pub packet: Packet,
    pub link_metric: Metric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouterState {
    pub now: Time,
    pub ls: LinkSet,
    pub prev_ls: LinkSet,
    pub two_hop: TwoHopSet,
    pub arrs: AdvertisingRouterSet,
    pub rts: TopologySet,
    pub rs: RoutingSet,
    pub ps: ProcessedSet,
    pub rxs: ReceivedSet,
    pub pkt: Packet,
    pub mqueue: VecDeque<Inbound>,
    pub hello_time: Time,
    pub tc_time: Time,
    pub send_time: Time,
    pub sqn: Sqn,
    pub ansn: Sqn,
}

impl RouterState {
    pub fn initial(now: i64, hello_time: i64, tc_time: i64) -> Self {
        RouterState {
            now: Time::at(now),
            ls: LinkSet::default(),
            prev_ls: LinkSet::default(),
            two_hop: TwoHopSet::default(),
            arrs: AdvertisingRouterSet::new(),
            rts: TopologySet::new(),
            rs: RoutingSet::new(),
            ps: ProcessedSet::default(),
            rxs: ReceivedSet::default(),
            pkt: Vec::new(),
            mqueue: VecDeque::new(),
            hello_time: Time::at(hello_time),
            tc_time: Time::at(tc_time),
            send_time: Time::Inf,
            sqn: 0,
            ansn: 0,
        }
    }
}

fn link_set_stale(ls: &LinkSet, now: Time) -> bool {
    ls.iter().any(|lt| {
        lt.validity_time <= now
            || (link_status(lt, now) != Status::Symmetric
                && (lt.fmpr || lt.rmpr || lt.fmpr_selector || lt.rmpr_selector))
    })
}

fn two_hop_stale(ls: &LinkSet, n2s: &TwoHopSet, now: Time) -> bool {
    n2s.iter()
        .any(|t| t.validity_time <= now || !ls.is_symmetric(&t.one_hop, now))
}

/// Whether any information base is inconsistent and needs an update.
pub fn updates_pending(state: &RouterState, config: &RouterConfig) -> bool {
    let now = state.now;
    let ls = &state.ls;
    link_set_stale(ls, now)
        || two_hop_stale(ls, &state.two_hop, now)
        || state.arrs.values().any(|ar| ar.validity_time <= now)
        || state.rts.values().any(|t| t.validity_time <= now)
        || !is_valid_fmpr_set(ls, &state.two_hop, now, &ls.flooding_mprs())
        || !is_valid_rmpr_set(
            ls,
            &state.two_hop,
            now,
            config.options.bug_rfc7181,
            &ls.routing_mprs(),
        )
        || (config.options.reselect_mprs
            && (ls.flooding_mprs() != choose_fmprs(ls, &state.two_hop, now)
                || ls.routing_mprs()
                    != choose_rmprs(ls, &state.two_hop, now, config.options.bug_rfc7181)))
        || state.ansn != increment_ansn(ls, &state.prev_ls, state.ansn)
        || !is_optimal_routing_set(&config.ip, ls, &state.rts, &state.rs, now)
}

/// Purges expired tuples, refreshes MPR flags, the ANSN and the routing
/// set.
pub fn run_update_info(state: &mut RouterState, config: &RouterConfig) {
    let now = state.now;
    let legacy = config.options.bug_rfc7181;
    state.ls = purge_link_set(&state.ls, now);
    state.two_hop = purge_2hop_set(&state.ls, &state.two_hop, now);
    state.arrs = purge_advertising_routers(&state.arrs, now);
    state.rts = purge_router_topology(&state.rts, now);

    let fmprs = choose_fmprs(&state.ls, &state.two_hop, now);
    let rmprs = choose_rmprs(&state.ls, &state.two_hop, now, legacy);
    if config.options.reselect_mprs {
        for lt in state.ls.iter_mut() {
            lt.fmpr = fmprs.contains(&lt.oip);
            lt.rmpr = rmprs.contains(&lt.oip);
        }
    }
    state.ls = update_fmprs(&state.ls, &state.two_hop, &fmprs, now)
        .expect("chosen flooding MPRs are valid");
    state.ls = update_rmprs(&state.ls, &state.two_hop, &rmprs, now, legacy)
        .expect("chosen routing MPRs are valid");

    state.ansn = increment_ansn(&state.ls, &state.prev_ls, state.ansn);
    state.prev_ls = state.ls.clone();

    let candidate = choose_optimal(&config.ip, &state.ls, &state.rts, now);
    state.rs = update_routing_set(&config.ip, &state.ls, &state.rts, &state.rs, &candidate, now)
        .expect("chosen routing set is optimal");
}

/// Applies a HELLO received over a link of metric `in_metric`.
pub fn process_hello(state: &mut RouterState, config: &RouterConfig, msg: &Hello, in_metric: Metric) {
    let ip = &config.ip;
    let now = state.now;
    let htime = Time::at(config.timing.l_hold_time);
    let mut ls = add_link_tuple(&state.ls, &msg.originator, msg.validity, in_metric, now);
    ls = update_link_out_metrics(ip, &ls, msg);
    ls = update_symmetric_time(ip, &ls, msg, htime, now);
    ls = update_heard_time(&ls, msg, now);
    ls = update_validity_time(&ls, &msg.originator, htime);
    ls = update_fmpr_selectors(ip, &ls, msg);
    ls = update_rmpr_selectors(ip, &ls, msg);
    let mut n2 = add_2hop_tuples(ip, &ls, &state.two_hop, msg, now);
    n2 = update_2hop_in_metrics(&ls, &n2, msg, now);
    n2 = update_2hop_out_metrics(&ls, &n2, msg, now);
    n2 = update_2hop_time(ip, &ls, &n2, msg, now);
    state.ls = ls;
    state.two_hop = n2;
}

/// What happens to a TC after processing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcDisposition {
    Discard,
    ConsiderForwarding,
}

/// Applies a TC to the topology where appropriate.
pub fn process_tc(state: &mut RouterState, config: &RouterConfig, tc: &Tc) -> TcDisposition {
    if tc.originator == config.ip {
        return TcDisposition::Discard;
    }
    if !state.ls.is_symmetric(&tc.sender, state.now) && !config.options.process_tc_from_unknown {
        return TcDisposition::ConsiderForwarding;
    }
    if state.ps.contains(&tc.originator, tc.seq) {
        return TcDisposition::ConsiderForwarding;
    }
    state.ps.insert(&tc.originator, tc.seq);
    if state
        .arrs
        .get(&tc.originator)
        .is_some_and(|ar| ar.ansn > tc.ansn)
    {
        return TcDisposition::ConsiderForwarding;
    }
    state.arrs = update_advertising_routers(&state.arrs, tc, state.now);
    state.rts = update_router_topology(&config.ip, &state.rts, tc, state.now);
    TcDisposition::ConsiderForwarding
}

/// Queues a forwarded copy of `tc` if it came from a flooding MPR selector
/// and was not seen before. Returns the copy.
pub fn forward_tc(state: &mut RouterState, config: &RouterConfig, tc: &Tc) -> Option<Tc> {
    let sender = state.ls.get(&tc.sender)?;
    if link_status(sender, state.now) != Status::Symmetric {
        return None;
    }
    let selector = sender.fmpr_selector || config.options.flood_all;
    if !state.rxs.insert(&tc.originator, tc.seq) || !selector {
        return None;
    }
    let copy = forward_tc_message(&config.ip, &Message::Tc(tc.clone()))
        .expect("forwarding a TC");
    state.pkt.push(copy.clone());
    state.send_time = state.now + 1;
    copy.as_tc().cloned()
}

/// Something a router did during a step, for tracing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RouterEvent {
    HelloGenerated(Hello),
    TcGenerated(Tc),
    TcForwarded(Tc),
    RouteChange(RoutingSet),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub broadcast: Option<Packet>,
    pub events: Vec<RouterEvent>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RouterStats {
    pub update_runs: u64,
    /// Updates after which the information bases were still inconsistent.
    pub consistency_violations: u64,
    /// HELLO or TC generations that happened after their deadline.
    pub late_generations: u64,
    pub hellos: u64,
    pub tcs: u64,
    pub forwards: u64,
}

/// Initial message deadlines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StartOffsets {
    pub hello_time: i64,
    pub tc_time: i64,
}

#[derive(Clone, Debug)]
pub struct Router {
    config: RouterConfig,
    state: RouterState,
    queue: VecDeque<Arrival>,
    hello_fire: i64,
    tc_fire: i64,
    /// Smallest jitter that still leaves room for a full transmission
    /// before the deadline.
    jitter_floor: i64,
    rng: ChaCha8Rng,
    stats: RouterStats,
    measured: BTreeMap<NodeId, Metric>,
}

impl Router {
    /// A fresh router at clock `now`. Offsets are drawn from `rng` when not
    /// given.
    pub fn new(
        config: RouterConfig,
        net: &NetworkParams,
        now: i64,
        offsets: Option<StartOffsets>,
        rng: ChaCha8Rng,
    ) -> Result<Self, ConfigError> {
        config.validate(net)?;
        let router = Self::new_unchecked(config, net, now, offsets, rng);
        let t = &router.config.timing;
        let (h, c) = (router.state.hello_time, router.state.tc_time);
        if !(Time::at(now) <= h && h <= Time::at(now + t.hello_interval)) {
            return Err(router.config_error("now ≤ hello_time ≤ now + hello_interval"));
        }
        if !(Time::at(now) <= c && c <= Time::at(now + t.tc_interval)) {
            return Err(router.config_error("now ≤ tc_time ≤ now + tc_interval"));
        }
        Ok(router)
    }

    /// Like [`Router::new`] without checking the timing inequalities.
    pub fn new_unchecked(
        config: RouterConfig,
        net: &NetworkParams,
        now: i64,
        offsets: Option<StartOffsets>,
        mut rng: ChaCha8Rng,
    ) -> Self {
        let t = config.timing;
        let offsets = offsets.unwrap_or_else(|| StartOffsets {
            hello_time: now + rng.gen_range(0..=t.hello_interval.max(0)),
            tc_time: now + rng.gen_range(0..=t.tc_interval.max(0)),
        });
        let mut router = Router {
            state: RouterState::initial(now, offsets.hello_time, offsets.tc_time),
            config,
            queue: VecDeque::new(),
            hello_fire: 0,
            tc_fire: 0,
            jitter_floor: net.lb + net.delta_b,
            rng,
            stats: RouterStats::default(),
            measured: BTreeMap::new(),
        };
        router.hello_fire = offsets.hello_time - router.draw_jitter(t.hp_maxjitter);
        router.tc_fire = offsets.tc_time - router.draw_jitter(t.tp_maxjitter);
        router
    }

    fn config_error(&self, inequality: &'static str) -> ConfigError {
        ConfigError {
            node: self.config.ip.clone(),
            inequality,
        }
    }

    fn draw_jitter(&mut self, max: i64) -> i64 {
        let max = max.max(0);
        let lo = self.jitter_floor.clamp(0, max);
        self.rng.gen_range(lo..=max)
    }

    pub fn ip(&self) -> &NodeId {
        &self.config.ip
    }

    pub fn config(&self) -> &RouterConfig {
        &self.config
    }

    pub fn state(&self) -> &RouterState {
        &self.state
    }

    pub fn stats(&self) -> &RouterStats {
        &self.stats
    }

    /// Packets delivered but not yet handed to the main process.
    pub fn queued(&self) -> usize {
        self.queue.len()
    }

    /// The last link metric measured for HELLOs from `from`.
    pub fn measured_in_metric(&self, from: &NodeId) -> Option<Metric> {
        self.measured.get(from).copied()
    }

    /// Appends a delivered packet to the queue. Never blocks.
    pub fn enqueue(&mut self, arrival: Arrival) {
        self.queue.push_back(arrival);
    }

    /// Advances the local clock by one tick.
    pub fn advance_clock(&mut self) {
        self.state.now = self.state.now + 1;
    }

    fn ensure_updated(&mut self) {
        if updates_pending(&self.state, &self.config) {
            run_update_info(&mut self.state, &self.config);
            self.stats.update_runs += 1;
            let still = updates_pending(&self.state, &self.config);
            if still {
                self.stats.consistency_violations += 1;
            }
            debug_assert!(!still, "{}: inconsistent right after an update", self.config.ip);
        }
    }

    fn dispatch(&mut self, inbound: Inbound, out: &mut StepOutcome) {
        match inbound.msg {
            Message::Hello(h) => {
                self.measured.insert(h.originator.clone(), inbound.link_metric);
                process_hello(&mut self.state, &self.config, &h, inbound.link_metric);
            }
            Message::Tc(tc) => {
                if process_tc(&mut self.state, &self.config, &tc) == TcDisposition::ConsiderForwarding {
                    if let Some(copy) = forward_tc(&mut self.state, &self.config, &tc) {
                        self.stats.forwards += 1;
                        out.events.push(RouterEvent::TcForwarded(copy));
                    }
                }
            }
        }
    }

    fn generation_due(&mut self, now: i64, fire: i64, deadline: Time, maxjitter: i64) -> bool {
        let open = deadline
            .finite()
            .is_some_and(|d| now >= fire && now >= d - maxjitter);
        if open && Time::at(now) > deadline {
            self.stats.late_generations += 1;
        }
        open
    }

    fn generate(&mut self, out: &mut StepOutcome) {
        let now = self.state.now.finite().expect("router clocks are finite");
        let t = self.config.timing;
        if self.generation_due(now, self.hello_fire, self.state.hello_time, t.hp_maxjitter) {
            let hello = make_hello(&self.config.ip, Time::at(t.h_hold_time), &self.state.ls, self.state.now);
            self.state.pkt.push(Message::Hello(hello.clone()));
            self.state.hello_time = Time::at(now + t.hello_interval);
            self.state.send_time = Time::at(now + 1);
            self.hello_fire = now + t.hello_interval - self.draw_jitter(t.hp_maxjitter);
            self.stats.hellos += 1;
            out.events.push(RouterEvent::HelloGenerated(hello));
        }
        if self.generation_due(now, self.tc_fire, self.state.tc_time, t.tp_maxjitter) {
            let tc = make_tc(
                &self.config.ip,
                Time::at(t.t_hold_time),
                self.state.sqn,
                self.state.ansn,
                &self.state.ls,
                self.state.now,
            );
            self.state.pkt.push(Message::Tc(tc.clone()));
            self.state.sqn += 1;
            self.state.tc_time = Time::at(now + t.tc_interval);
            self.state.send_time = Time::at(now + 1);
            self.tc_fire = now + t.tc_interval - self.draw_jitter(t.tp_maxjitter);
            self.stats.tcs += 1;
            out.events.push(RouterEvent::TcGenerated(tc));
        }
    }

    /// Runs the router for the current tick.
    pub fn step(&mut self) -> StepOutcome {
        let mut out = StepOutcome::default();
        let routes_before = self.state.rs.clone();
        self.ensure_updated();
        if self.state.send_time == self.state.now {
            self.state.send_time = Time::Inf;
            out.broadcast = Some(mem::take(&mut self.state.pkt));
        } else {
            while let Some(arrival) = self.queue.pop_front() {
                self.state.mqueue.extend(arrival.packet.into_iter().map(|msg| Inbound {
                    msg,
                    link_metric: arrival.link_metric,
                }));
            }
            let mut steps = 0;
            loop {
                steps += 1;
                assert!(steps <= MICRO_STEP_CAP, "{}: micro-step cap reached", self.config.ip);
                self.ensure_updated();
                debug_assert_ne!(self.state.send_time, self.state.now);
                match self.state.mqueue.pop_front() {
                    Some(inbound) => self.dispatch(inbound, &mut out),
                    None => break,
                }
            }
            self.generate(&mut out);
        }
        if self.state.rs != routes_before {
            out.events.push(RouterEvent::RouteChange(self.state.rs.clone()));
        }
        out
    }

    /// Every tuple and counter, one item per line.
    pub fn render_state(&self) -> String {
        let s = &self.state;
        let mut text = format!(
            "NODE {} now={} sqn={} ansn={} hello={} tc={} send={} pkt={} mq={} q={}\n",
            self.config.ip,
            s.now,
            s.sqn,
            s.ansn,
            s.hello_time,
            s.tc_time,
            s.send_time,
            s.pkt.len(),
            s.mqueue.len(),
            self.queue.len()
        );
        for lt in s.ls.iter() {
            let _ = writeln!(text, "{lt}");
        }
        for t in s.two_hop.iter() {
            let _ = writeln!(text, "{t}");
        }
        for ar in s.arrs.values() {
            let _ = writeln!(text, "AR {} ansn={} vt={}", ar.oip, ar.ansn, ar.validity_time);
        }
        for t in s.rts.values() {
            let _ = writeln!(text, "{t}");
        }
        for r in s.rs.values() {
            let _ = writeln!(text, "{r}");
        }
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn net() -> NetworkParams {
        NetworkParams {
            lb: 1,
            delta_b: 1,
            node_count: 3,
        }
    }

    fn router(name: &str, hello_time: i64, tc_time: i64) -> Router {
        Router::new(
            RouterConfig::new(id(name)),
            &net(),
            0,
            Some(StartOffsets { hello_time, tc_time }),
            ChaCha8Rng::seed_from_u64(7),
        )
        .unwrap()
    }

    fn run_until_broadcast(r: &mut Router) -> (i64, Packet) {
        for _ in 0..100 {
            let out = r.step();
            if let Some(p) = out.broadcast {
                return (r.state.now.finite().unwrap(), p);
            }
            r.advance_clock();
        }
        panic!("no broadcast");
    }

    #[test]
    fn fresh_router_is_consistent() {
        let r = router("A", 5, 7);
        assert!(!updates_pending(&r.state, &r.config));
    }

    #[test]
    fn first_hello_is_sent_by_its_deadline() {
        let mut r = router("A", 5, 15);
        let (t, pkt) = run_until_broadcast(&mut r);
        assert!((3..=6).contains(&t), "broadcast at {t}");
        assert_eq!(pkt.len(), 1);
        assert!(matches!(&pkt[0], Message::Hello(h) if h.statuses.is_empty()));
        assert!(r.state.pkt.is_empty());
        assert_eq!(r.state.send_time, Time::Inf);
    }

    #[test]
    fn coinciding_deadlines_share_a_packet() {
        let mut r = router("A", 5, 5);
        let out = (0..10)
            .map(|_| {
                let o = r.step();
                r.advance_clock();
                o
            })
            .find(|o| o.broadcast.is_some());
        let pkt = out.unwrap().broadcast.unwrap();
        assert_eq!(pkt.len(), 2);
        assert_eq!(r.state.sqn, 1);
    }

    #[test]
    fn own_tc_is_discarded() {
        let r = router("A", 5, 5);
        let mut state = r.state.clone();
        let tc = make_tc(&id("A"), Time::at(30), 0, 0, &LinkSet::default(), Time::at(0));
        assert_eq!(process_tc(&mut state, &r.config, &tc), TcDisposition::Discard);
        assert_eq!(state, r.state);
    }

    #[test]
    fn tc_from_unknown_sender_is_not_applied() {
        let r = router("A", 5, 5);
        let mut state = r.state.clone();
        let mut tc = make_tc(&id("B"), Time::at(30), 0, 0, &LinkSet::default(), Time::at(0));
        tc.dests.insert(id("C"), Metric::finite(1));
        assert_eq!(process_tc(&mut state, &r.config, &tc), TcDisposition::ConsiderForwarding);
        assert!(state.rts.is_empty() && state.ps.is_empty());
        assert_eq!(forward_tc(&mut state, &r.config, &tc), None);
        assert!(state.rxs.is_empty());

        let mut cfg = r.config.clone();
        cfg.options.process_tc_from_unknown = true;
        process_tc(&mut state, &cfg, &tc);
        assert_eq!(state.rts.len(), 1);
    }

    fn hello_from(o: &str, statuses: &[(&str, Status)]) -> Hello {
        Hello {
            originator: id(o),
            validity: Time::at(20),
            statuses: statuses.iter().map(|(k, v)| (id(k), *v)).collect(),
            mprs: BTreeMap::new(),
            in_metrics: BTreeMap::new(),
            out_metrics: BTreeMap::new(),
        }
    }

    #[test]
    fn stale_ansn_is_ignored_but_logged() {
        let r = router("A", 5, 5);
        let mut state = r.state.clone();
        process_hello(&mut state, &r.config, &hello_from("B", &[("A", Status::Heard)]), Metric::finite(1));
        assert!(state.ls.is_symmetric(&id("B"), state.now));
        let mut tc = make_tc(&id("C"), Time::at(30), 4, 9, &LinkSet::default(), Time::at(0));
        tc.sender = id("B");
        process_tc(&mut state, &r.config, &tc);
        assert_eq!(state.arrs[&id("C")].ansn, 9);
        tc.seq = 5;
        tc.ansn = 8;
        tc.dests.insert(id("D"), Metric::finite(1));
        process_tc(&mut state, &r.config, &tc);
        assert!(state.ps.contains(&id("C"), 5));
        assert!(state.rts.is_empty());
    }

    #[test]
    fn forwarding_needs_a_flooding_selector_and_happens_once() {
        let r = router("A", 5, 5);
        let mut state = r.state.clone();
        let mut h = hello_from("B", &[("A", Status::Heard)]);
        process_hello(&mut state, &r.config, &h, Metric::finite(1));
        let mut tc = make_tc(&id("C"), Time::at(30), 1, 0, &LinkSet::default(), Time::at(0));
        tc.sender = id("B");
        assert_eq!(forward_tc(&mut state, &r.config, &tc), None);
        assert!(state.rxs.contains(&id("C"), 1));

        h.statuses.insert(id("A"), Status::Symmetric);
        h.mprs.insert(id("A"), crate::types::MprRole::Flooding);
        process_hello(&mut state, &r.config, &h, Metric::finite(1));
        tc.seq = 2;
        let fwd = forward_tc(&mut state, &r.config, &tc).unwrap();
        assert_eq!(fwd.sender, id("A"));
        assert_eq!(state.send_time, state.now + 1);
        assert_eq!(forward_tc(&mut state, &r.config, &tc), None);
        assert_eq!(state.pkt.len(), 1);
    }
}
