//! Whole-network checks against ground truth: route optimality, TC
//! flooding cost, convergence and link stability.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::messages::Message;
use crate::simnet::{GroundTruth, Network, TraceEvent, TraceKind};
use crate::types::{Metric, NodeId, Sqn, Status};

/// Links usable for routing: `(a, b)` with both directions present. The
/// cost is the metric of `a -> b`.
pub fn symmetric_links(truth: &GroundTruth) -> Vec<(NodeId, NodeId, u64)> {
    truth
        .links()
        .filter(|(a, b, _)| truth.metric(b, a).is_some())
        .filter_map(|(a, b, m)| m.value().map(|v| (a.clone(), b.clone(), v)))
        .collect()
}

/// Shortest distances from `src` over the symmetric links of `truth`.
/// `src` itself is omitted.
pub fn ground_truth_shortest_paths(truth: &GroundTruth, src: &NodeId) -> BTreeMap<NodeId, u64> {
    let links = symmetric_links(truth);
    let mut dist: BTreeMap<NodeId, u64> = BTreeMap::from([(src.clone(), 0)]);
    let mut done: BTreeSet<NodeId> = BTreeSet::new();
    loop {
        let next = dist
            .iter()
            .filter(|(n, _)| !done.contains(*n))
            .min_by_key(|(n, d)| (**d, (*n).clone()))
            .map(|(n, d)| (n.clone(), *d));
        let Some((u, du)) = next else { break };
        done.insert(u.clone());
        for (a, b, w) in &links {
            if *a == u {
                let cand = du + w;
                if dist.get(b).is_none_or(|old| cand < *old) {
                    dist.insert(b.clone(), cand);
                }
            }
        }
    }
    dist.remove(src);
    dist
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalityReport {
    pub node: NodeId,
    pub verdict: bool,
    /// Reachable destinations without a route.
    pub missing: BTreeSet<NodeId>,
    /// `(dest, found, optimal)` for routes whose metric is wrong, including
    /// routes to unreachable destinations (optimal is `inf`).
    pub suboptimal: Vec<(NodeId, Metric, Metric)>,
    /// Destinations whose next hop is not on any shortest path.
    pub bad_next_hop: BTreeSet<NodeId>,
}

fn render_set(s: &BTreeSet<NodeId>) -> String {
    s.iter().map(NodeId::as_str).collect::<Vec<_>>().join(",")
}

impl fmt::Display for OptimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub: Vec<String> = self
            .suboptimal
            .iter()
            .map(|(d, found, opt)| format!("({d},{found},{opt})"))
            .collect();
        write!(
            f,
            "OPT n={} verdict={} missing={{{}}} subopt={{{}}}",
            self.node,
            self.verdict,
            render_set(&self.missing),
            sub.join(",")
        )?;
        if !self.bad_next_hop.is_empty() {
            write!(f, " nexthop={{{}}}", render_set(&self.bad_next_hop))?;
        }
        Ok(())
    }
}

/// Compares every router's routing set with the ground-truth shortest
/// paths of the current topology.
pub fn check_route_optimality(net: &Network) -> Vec<OptimalityReport> {
    let truth = net.truth();
    let all: BTreeMap<NodeId, BTreeMap<NodeId, u64>> = truth
        .nodes()
        .iter()
        .map(|n| (n.clone(), ground_truth_shortest_paths(truth, n)))
        .collect();
    net.routers()
        .map(|r| {
            let me = r.ip();
            let opt = &all[me];
            let rs = &r.state().rs;
            let missing: BTreeSet<NodeId> = opt.keys().filter(|d| !rs.contains_key(*d)).cloned().collect();
            let mut suboptimal = Vec::new();
            let mut bad_next_hop = BTreeSet::new();
            for (d, route) in rs {
                let best = opt.get(d).map_or(Metric::Infinite, |v| Metric::finite(*v));
                if route.metric != best {
                    suboptimal.push((d.clone(), route.metric, best));
                    continue;
                }
                let hop = truth
                    .metric(me, &route.next_hop)
                    .filter(|_| truth.metric(&route.next_hop, me).is_some())
                    .and_then(Metric::value);
                let rest = if route.next_hop == *d { Some(0) } else { all[&route.next_hop].get(d).copied() };
                let tight = matches!((hop, rest, best), (Some(h), Some(r), Metric::Finite(b)) if h + r == b);
                if !tight {
                    bad_next_hop.insert(d.clone());
                }
            }
            OptimalityReport {
                node: me.clone(),
                verdict: missing.is_empty() && suboptimal.is_empty() && bad_next_hop.is_empty(),
                missing,
                suboptimal,
                bad_next_hop,
            }
        })
        .collect()
}

/// How far one TC travelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloodCount {
    /// Broadcasts carrying the TC, origination included.
    pub broadcasts: usize,
    pub broadcasters: BTreeSet<NodeId>,
    /// Nodes that received the TC at least once, plus the originator.
    pub coverage: BTreeSet<NodeId>,
}

fn carries_tc(e: &TraceEvent, originator: &NodeId, sqn: Sqn) -> bool {
    e.packet.iter().flatten().any(|m| match m {
        Message::Tc(tc) => tc.originator == *originator && tc.seq == sqn,
        Message::Hello(_) => false,
    })
}

pub fn count_tc_broadcasts(trace: &[TraceEvent], originator: &NodeId, sqn: Sqn) -> FloodCount {
    let mut out = FloodCount {
        broadcasts: 0,
        broadcasters: BTreeSet::new(),
        coverage: BTreeSet::from([originator.clone()]),
    };
    for e in trace.iter().filter(|e| carries_tc(e, originator, sqn)) {
        match e.kind {
            TraceKind::Broadcast => {
                out.broadcasts += 1;
                out.broadcasters.insert(e.node.clone());
            }
            TraceKind::Deliver => {
                out.coverage.insert(e.node.clone());
            }
            _ => {}
        }
    }
    out
}

/// Tick after the last route change in `[start, end)`, or `start` if there
/// was none, provided routes then stayed unchanged for at least `window`
/// ticks before `end`.
pub fn detect_convergence(trace: &[TraceEvent], start: i64, end: i64, window: i64) -> Option<i64> {
    let last = trace
        .iter()
        .filter(|e| e.kind == TraceKind::RouteChange && e.tick >= start && e.tick < end)
        .map(|e| e.tick)
        .max();
    let at = last.map_or(start, |t| t + 1);
    (end - at >= window).then_some(at)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvergenceOptions {
    /// Ticks without any route change required.
    pub window: i64,
    /// Ticks that must elapse before convergence may be declared.
    pub warmup: i64,
    pub max_ticks: u64,
}

impl ConvergenceOptions {
    /// Window of one TC period, warm-up of two HELLO plus two TC periods.
    pub fn for_network(net: &Network) -> Self {
        let (mut window, mut warmup) = (1, 0);
        for r in net.routers() {
            let t = r.config().timing;
            window = window.max(t.tc_interval + t.tp_maxjitter);
            warmup = warmup.max(2 * (t.hello_interval + t.tc_interval));
        }
        ConvergenceOptions {
            window,
            warmup,
            max_ticks: 4000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceRun {
    pub trace: Vec<TraceEvent>,
    /// First tick of the final stable period, if one was found.
    pub converged_at: Option<i64>,
}

/// Ticks `net` until routes have been stable for `opts.window` ticks past
/// the warm-up, or until `opts.max_ticks` have run.
pub fn run_to_convergence(net: &mut Network, opts: ConvergenceOptions) -> ConvergenceRun {
    run_to_convergence_observed(net, opts, |_, _| {})
}

/// As [`run_to_convergence`], calling `observe` after every tick.
pub fn run_to_convergence_observed(
    net: &mut Network,
    opts: ConvergenceOptions,
    mut observe: impl FnMut(&Network, &[TraceEvent]),
) -> ConvergenceRun {
    let start = net.clock();
    let mut trace = Vec::new();
    let mut stable_since = start;
    for _ in 0..opts.max_ticks {
        let events = net.tick();
        observe(net, &events);
        if events.iter().any(|e| e.kind == TraceKind::RouteChange) {
            stable_since = net.clock();
        }
        trace.extend(events);
        let now = net.clock();
        if now - start >= opts.warmup && now - stable_since >= opts.window {
            return ConvergenceRun {
                trace,
                converged_at: Some(stable_since),
            };
        }
    }
    ConvergenceRun {
        trace,
        converged_at: None,
    }
}

/// A link that stopped being symmetric after having been symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regression {
    pub tick: i64,
    pub node: NodeId,
    pub neighbour: NodeId,
    /// `None` when the tuple is gone.
    pub status: Option<Status>,
}

/// Watches link tuples across ticks for symmetric links that regress.
#[derive(Clone, Debug, Default)]
pub struct SymmetryMonitor {
    seen: BTreeSet<(NodeId, NodeId)>,
    pub regressions: Vec<Regression>,
}

impl SymmetryMonitor {
    pub fn observe(&mut self, net: &Network) {
        for r in net.routers() {
            let now = r.state().now;
            for lt in r.state().ls.iter() {
                if r.state().ls.is_symmetric(&lt.oip, now) {
                    self.seen.insert((r.ip().clone(), lt.oip.clone()));
                }
            }
            for (node, nb) in self.seen.iter().filter(|(n, _)| n == r.ip()) {
                if !r.state().ls.is_symmetric(nb, now) {
                    self.regressions.push(Regression {
                        tick: net.clock(),
                        node: node.clone(),
                        neighbour: nb.clone(),
                        status: r.state().ls.status_of(nb, now),
                    });
                }
            }
        }
    }

    /// Number of directed links seen symmetric so far.
    pub fn symmetric_seen(&self) -> usize {
        self.seen.len()
    }
}

/// Totals of the per-router counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConsistencyStats {
    pub update_runs: u64,
    pub consistency_violations: u64,
    pub late_generations: u64,
}

pub fn consistency_stats(net: &Network) -> ConsistencyStats {
    net.routers().fold(ConsistencyStats::default(), |acc, r| {
        let s = r.stats();
        ConsistencyStats {
            update_runs: acc.update_runs + s.update_runs,
            consistency_violations: acc.consistency_violations + s.consistency_violations,
            late_generations: acc.late_generations + s.late_generations,
        }
    })
}
