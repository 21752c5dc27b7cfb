//! Three small networks with known outcomes: flooding on a grid, HELLO
//! exchange on a chain, and routing MPR selection on a diamond with
//! asymmetric metrics.

use std::collections::BTreeSet;
use std::fmt;

use crate::checkers::{
    check_route_optimality, count_tc_broadcasts, run_to_convergence, ConvergenceOptions, FloodCount,
    OptimalityReport,
};
use crate::messages::Message;
use crate::scenario::{parse_scenario, Scenario};
use crate::simnet::{Network, TraceEvent, TraceKind};
use crate::topology::Route;
use crate::types::{NodeId, Sqn, Status};

pub const FIG1: &str = include_str!("../scenarios/fig1.scn");
pub const FIG2: &str = include_str!("../scenarios/fig2.scn");
pub const FIG3: &str = include_str!("../scenarios/fig3.scn");

fn load(text: &str) -> Scenario {
    parse_scenario(text).expect("bundled scenario parses")
}

fn build(sc: &Scenario) -> Network {
    sc.build().expect("bundled scenario is valid")
}

fn id(s: &str) -> NodeId {
    NodeId::from(s)
}

#[derive(Clone, Debug)]
pub struct Fig1Outcome {
    pub flood_all: bool,
    pub converged_at: Option<i64>,
    pub sqn: Option<Sqn>,
    pub flood: Option<FloodCount>,
}

impl fmt::Display for Fig1Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let conv = self.converged_at.map_or("none".to_string(), |t| t.to_string());
        match (&self.flood, self.sqn) {
            (Some(fl), Some(sqn)) => write!(
                f,
                "fig1 flood_all={} converged_at={} tc=E/{} broadcasts={} by={{{}}} delivered={}",
                self.flood_all,
                conv,
                sqn,
                fl.broadcasts,
                fl.broadcasters.iter().map(NodeId::as_str).collect::<Vec<_>>().join(","),
                fl.coverage.len()
            ),
            _ => write!(f, "fig1 flood_all={} converged_at={} tc=none", self.flood_all, conv),
        }
    }
}

fn first_tc_from(trace: &[TraceEvent], originator: &NodeId, from_tick: i64) -> Option<Sqn> {
    trace
        .iter()
        .filter(|e| e.kind == TraceKind::Broadcast && e.node == *originator && e.tick >= from_tick)
        .flat_map(|e| e.packet.iter().flatten())
        .find_map(|m| match m {
            Message::Tc(tc) if tc.originator == *originator => Some(tc.seq),
            _ => None,
        })
}

/// Counts the broadcasts spent on the first TC that E originates once
/// the grid has converged.
pub fn fig1(flood_all: bool) -> Fig1Outcome {
    let mut sc = load(FIG1);
    sc.options.flood_all = flood_all;
    let mut net = build(&sc);
    let opts = ConvergenceOptions::for_network(&net);
    let run = run_to_convergence(&mut net, opts);
    let Some(converged_at) = run.converged_at else {
        return Fig1Outcome { flood_all, converged_at: None, sqn: None, flood: None };
    };
    let from = net.clock();
    let tc_interval = net.router(&id("E")).expect("E exists").config().timing.tc_interval;
    let mut trace = net.run(3 * tc_interval as u64);
    let e = id("E");
    let sqn = first_tc_from(&trace, &e, from);
    // Let the flood finish.
    trace.extend(net.run(tc_interval as u64));
    let flood = sqn.map(|s| count_tc_broadcasts(&trace, &e, s));
    Fig1Outcome { flood_all, converged_at: Some(converged_at), sqn, flood }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Panel {
    /// The HELLO whose effect the panel shows, e.g. `B1`.
    pub after: String,
    /// End of this tick is where the state was inspected.
    pub tick: i64,
    pub checks: Vec<(String, bool)>,
}

impl Panel {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fig2Outcome {
    pub panels: Vec<Panel>,
}

impl Fig2Outcome {
    pub fn ok(&self) -> bool {
        self.panels.len() == 6 && self.panels.iter().all(Panel::ok)
    }
}

impl fmt::Display for Fig2Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.panels {
            let checks: Vec<String> = p
                .checks
                .iter()
                .map(|(c, ok)| format!("{c}:{}", if *ok { "ok" } else { "FAIL" }))
                .collect();
            writeln!(f, "fig2 after={} t={} {}", p.after, p.tick, checks.join(" "))?;
        }
        Ok(())
    }
}

fn status(net: &Network, node: &str, nb: &str) -> Option<Status> {
    let r = net.router(&id(node))?;
    r.state().ls.status_of(&id(nb), r.state().now)
}

fn has_two_hop(net: &Network, node: &str, via: &str, target: &str) -> bool {
    net.router(&id(node))
        .is_some_and(|r| r.state().two_hop.contains(&id(via), &id(target)))
}

type Expect = (&'static str, &'static str, Option<Status>);

const FIG2_EXPECT: [&[Expect]; 6] = [
    &[("B", "A", Some(Status::Heard)), ("A", "B", None), ("C", "B", None)],
    &[("A", "B", Some(Status::Symmetric)), ("C", "B", Some(Status::Heard)), ("B", "A", Some(Status::Heard))],
    &[("B", "A", Some(Status::Heard)), ("B", "C", Some(Status::Symmetric)), ("C", "B", Some(Status::Heard))],
    &[("B", "A", Some(Status::Symmetric)), ("B", "C", Some(Status::Symmetric))],
    &[("A", "B", Some(Status::Symmetric)), ("C", "B", Some(Status::Symmetric))],
    &[("A", "B", Some(Status::Symmetric)), ("C", "B", Some(Status::Symmetric))],
];

fn render_status(s: Option<Status>) -> String {
    s.map_or("none".to_string(), |s| s.to_string())
}

/// Replays the chain's first two HELLO rounds and inspects the link and
/// 2-hop sets after each HELLO has been received.
pub fn fig2() -> Fig2Outcome {
    let sc = load(FIG2);
    let mut net = build(&sc);
    let mut snapshots = Vec::new();
    let mut deliveries: Vec<(i64, NodeId)> = Vec::new();
    for _ in 0..sc.ticks {
        let t = net.clock();
        for e in net.tick() {
            if e.kind != TraceKind::Deliver {
                continue;
            }
            for m in e.packet.iter().flatten() {
                if let Message::Hello(h) = m {
                    if deliveries.last() != Some(&(t, h.originator.clone())) {
                        deliveries.push((t, h.originator.clone()));
                    }
                }
            }
        }
        snapshots.push(net.clone());
    }
    let mut rounds: Vec<(String, i64)> = Vec::new();
    for (tick, sender) in deliveries.iter().take(6) {
        let n = rounds.iter().filter(|(l, _)| l.starts_with(sender.as_str())).count() + 1;
        rounds.push((format!("{sender}{n}"), *tick));
    }
    let mut panels = Vec::new();
    for (i, (label, tick)) in rounds.iter().enumerate() {
        let inspect = rounds.get(i + 1).map_or(*tick, |(_, next)| next - 1);
        let Some(snap) = snapshots.get(inspect as usize) else { break };
        let mut checks: Vec<(String, bool)> = FIG2_EXPECT[i]
            .iter()
            .map(|(n, nb, want)| {
                let got = status(snap, n, nb);
                (format!("{n}[{nb}]={}", render_status(got)), got == *want)
            })
            .collect();
        if i >= 4 {
            checks.push(("A has C via B".into(), has_two_hop(snap, "A", "B", "C")));
            checks.push(("C has A via B".into(), has_two_hop(snap, "C", "B", "A")));
        }
        panels.push(Panel { after: label.clone(), tick: inspect, checks });
    }
    Fig2Outcome { panels }
}

#[derive(Clone, Debug)]
pub struct Fig3Outcome {
    pub bug: bool,
    pub converged_at: Option<i64>,
    pub d_routing_mprs: BTreeSet<NodeId>,
    pub s_route_to_d: Option<Route>,
    pub reports: Vec<OptimalityReport>,
}

impl Fig3Outcome {
    pub fn verdict(&self) -> bool {
        self.reports.iter().all(|r| r.verdict)
    }
}

impl fmt::Display for Fig3Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "fig3 bug_rfc7181={} converged_at={} D.rmprs={{{}}} S->D={} verdict={}",
            self.bug,
            self.converged_at.map_or("none".to_string(), |t| t.to_string()),
            self.d_routing_mprs.iter().map(NodeId::as_str).collect::<Vec<_>>().join(","),
            self.s_route_to_d.as_ref().map_or("none".to_string(), |r| r.to_string()),
            self.verdict()
        )?;
        for r in &self.reports {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Runs the diamond to convergence with or without the RFC 7181 routing
/// MPR metric.
pub fn fig3(bug: bool) -> Fig3Outcome {
    let mut sc = load(FIG3);
    sc.options.bug_rfc7181 = bug;
    let mut net = build(&sc);
    let opts = ConvergenceOptions::for_network(&net);
    let run = run_to_convergence(&mut net, opts);
    let d = net.router(&id("D")).expect("D exists");
    let s = net.router(&id("S")).expect("S exists");
    Fig3Outcome {
        bug,
        converged_at: run.converged_at,
        d_routing_mprs: d.state().ls.routing_mprs(),
        s_route_to_d: s.state().rs.get(&id("D")).cloned(),
        reports: check_route_optimality(&net),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig3_file_lists_ten_directed_links() {
        let sc = load(FIG3);
        assert_eq!(sc.nodes.len(), 5);
        let metrics: Vec<u64> = sc.links.iter().filter_map(|(_, _, m)| m.value()).collect();
        assert_eq!(metrics, [1, 1, 1, 3, 1, 6, 5, 5, 1, 4]);
    }

    #[test]
    fn bundled_scenarios_build() {
        for text in [FIG1, FIG2, FIG3] {
            build(&load(text));
        }
    }
}
