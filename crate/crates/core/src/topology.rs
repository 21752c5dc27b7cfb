//! Topology learned from TC messages and the routing set computed over it.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use crate::error::ContractError;
use crate::messages::Tc;
use crate::neighborhood::LinkSet;
use crate::types::{Metric, NodeId, Sqn, Time};

/// Latest ANSN seen from an originator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdvertisingRouter {
    pub oip: NodeId,
    pub ansn: Sqn,
    pub validity_time: Time,
}

/// A link `from -> dest` advertised by `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyTuple {
    pub from: NodeId,
    pub dest: NodeId,
    pub validity_time: Time,
    pub metric: Metric,
}

impl fmt::Display for TopologyTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RT {} -> {} m={} vt={}",
            self.from, self.dest, self.metric, self.validity_time
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub dest: NodeId,
    pub next_hop: NodeId,
    pub metric: Metric,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ROUTE {} via {} m={}", self.dest, self.next_hop, self.metric)
    }
}

pub type AdvertisingRouterSet = BTreeMap<NodeId, AdvertisingRouter>;
/// Keyed by `(from, dest)`.
pub type TopologySet = BTreeMap<(NodeId, NodeId), TopologyTuple>;
/// Keyed by destination.
pub type RoutingSet = BTreeMap<NodeId, Route>;

/// Records the ANSN carried by `msg`, replacing the originator's entry.
pub fn update_advertising_routers(
    arrs: &AdvertisingRouterSet,
    msg: &Tc,
    now: Time,
) -> AdvertisingRouterSet {
    let mut out = arrs.clone();
    out.insert(
        msg.originator.clone(),
        AdvertisingRouter {
            oip: msg.originator.clone(),
            ansn: msg.ansn,
            validity_time: now + msg.validity,
        },
    );
    out
}

/// Replaces every link advertised by the originator of `msg` with the
/// links it carries, skipping links into `ip`.
pub fn update_router_topology(ip: &NodeId, rts: &TopologySet, msg: &Tc, now: Time) -> TopologySet {
    let mut out: TopologySet = rts
        .iter()
        .filter(|((from, _), _)| from != &msg.originator)
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    for (dest, metric) in &msg.dests {
        if dest != ip {
            out.insert(
                (msg.originator.clone(), dest.clone()),
                TopologyTuple {
                    from: msg.originator.clone(),
                    dest: dest.clone(),
                    validity_time: now + msg.validity,
                    metric: *metric,
                },
            );
        }
    }
    out
}

pub fn purge_advertising_routers(arrs: &AdvertisingRouterSet, now: Time) -> AdvertisingRouterSet {
    arrs.iter()
        .filter(|(_, ar)| ar.validity_time > now)
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

pub fn purge_router_topology(rts: &TopologySet, now: Time) -> TopologySet {
    rts.iter()
        .filter(|(_, t)| t.validity_time > now)
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

/// Bumps the ANSN when the routing MPR selector set changed since
/// `prev_ls`.
pub fn increment_ansn(ls: &LinkSet, prev_ls: &LinkSet, ansn: Sqn) -> Sqn {
    if ls.routing_mpr_selectors() == prev_ls.routing_mpr_selectors() {
        ansn
    } else {
        ansn + 1
    }
}

/// Directed links usable for routing from `ip`: own symmetric links
/// weighted by their out metric, plus every advertised link. Links with an
/// infinite metric are left out.
pub fn routing_links(ip: &NodeId, ls: &LinkSet, rts: &TopologySet, now: Time) -> Vec<(NodeId, NodeId, u64)> {
    let own = ls
        .symmetric(now)
        .filter_map(|lt| lt.out_metric.value().map(|m| (ip.clone(), lt.oip.clone(), m)));
    let advertised = rts
        .values()
        .filter_map(|t| t.metric.value().map(|m| (t.from.clone(), t.dest.clone(), m)));
    own.chain(advertised).collect()
}

/// Shortest-path structure from a source over a link list.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    source: NodeId,
    dist: BTreeMap<NodeId, u64>,
    /// Predecessors on some shortest path.
    preds: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// Nodes in nondecreasing distance order.
    order: Vec<NodeId>,
}

impl ShortestPaths {
    pub fn compute(source: &NodeId, links: &[(NodeId, NodeId, u64)]) -> Self {
        let mut adj: BTreeMap<&NodeId, BTreeMap<&NodeId, u64>> = BTreeMap::new();
        for (a, b, m) in links {
            let e = adj.entry(a).or_default().entry(b).or_insert(*m);
            *e = (*e).min(*m);
        }
        let mut dist: BTreeMap<NodeId, u64> = BTreeMap::new();
        let mut order = Vec::new();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u64, source.clone())));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist.contains_key(&u) {
                continue;
            }
            dist.insert(u.clone(), d);
            order.push(u.clone());
            for (v, w) in adj.get(&u).into_iter().flatten() {
                if !dist.contains_key(*v) {
                    heap.push(Reverse((d + w, (*v).clone())));
                }
            }
        }
        let mut preds: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for (a, out) in &adj {
            let Some(da) = dist.get(*a) else { continue };
            for (b, w) in out {
                if *b != source && dist.get(*b) == Some(&(da + w)) {
                    preds.entry((*b).clone()).or_default().insert((*a).clone());
                }
            }
        }
        ShortestPaths {
            source: source.clone(),
            dist,
            preds,
            order,
        }
    }

    /// Distances to every reachable node other than the source.
    pub fn distances(&self) -> BTreeMap<NodeId, u64> {
        self.dist
            .iter()
            .filter(|(n, _)| **n != self.source)
            .map(|(n, d)| (n.clone(), *d))
            .collect()
    }

    /// First hops of every shortest path to each reachable node.
    pub fn first_hops(&self) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let mut fh: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for v in self.order.iter().filter(|v| **v != self.source) {
            let mut hops = BTreeSet::new();
            for u in &self.preds[v] {
                if *u == self.source {
                    hops.insert(v.clone());
                } else {
                    hops.extend(fh[u].iter().cloned());
                }
            }
            fh.insert(v.clone(), hops);
        }
        fh
    }

    /// One route per reachable node; ties between shortest paths go to the
    /// smallest predecessor.
    pub fn canonical_routes(&self) -> RoutingSet {
        let mut next: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut rs = RoutingSet::new();
        for v in self.order.iter().filter(|v| **v != self.source) {
            let pred = self.preds[v].iter().next().expect("reachable nodes have a predecessor");
            let hop = if *pred == self.source {
                v.clone()
            } else {
                next[pred].clone()
            };
            next.insert(v.clone(), hop.clone());
            rs.insert(
                v.clone(),
                Route {
                    dest: v.clone(),
                    next_hop: hop,
                    metric: Metric::finite(self.dist[v]),
                },
            );
        }
        rs
    }

    /// Whether `rs` holds exactly one shortest route per reachable node.
    pub fn admits(&self, rs: &RoutingSet) -> bool {
        let dist = self.distances();
        if rs.len() != dist.len() {
            return false;
        }
        let fh = self.first_hops();
        rs.iter().all(|(d, r)| {
            r.dest == *d
                && dist.get(d).map(|m| Metric::finite(*m)) == Some(r.metric)
                && fh[d].contains(&r.next_hop)
        })
    }
}

pub fn is_optimal_routing_set(
    ip: &NodeId,
    ls: &LinkSet,
    rts: &TopologySet,
    rs: &RoutingSet,
    now: Time,
) -> bool {
    ShortestPaths::compute(ip, &routing_links(ip, ls, rts, now)).admits(rs)
}

/// The deterministic optimal routing set for the current topology.
pub fn choose_optimal(ip: &NodeId, ls: &LinkSet, rts: &TopologySet, now: Time) -> RoutingSet {
    ShortestPaths::compute(ip, &routing_links(ip, ls, rts, now)).canonical_routes()
}

/// Keeps `rs` if it is still optimal, otherwise switches to `candidate`.
pub fn update_routing_set(
    ip: &NodeId,
    ls: &LinkSet,
    rts: &TopologySet,
    rs: &RoutingSet,
    candidate: &RoutingSet,
    now: Time,
) -> Result<RoutingSet, ContractError> {
    let sp = ShortestPaths::compute(ip, &routing_links(ip, ls, rts, now));
    if !sp.admits(candidate) {
        return Err(ContractError::NonOptimalRoutingSet);
    }
    Ok(if sp.admits(rs) { rs.clone() } else { candidate.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighborhood::LinkTuple;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn tc(o: &str, ansn: Sqn, dests: &[(&str, u64)]) -> Tc {
        Tc {
            originator: id(o),
            sender: id(o),
            validity: Time::at(30),
            seq: 1,
            ansn,
            dests: dests.iter().map(|(d, m)| (id(d), Metric::finite(*m))).collect(),
        }
    }

    fn neighbour(oip: &str, out: u64) -> LinkTuple {
        LinkTuple {
            symmetric_time: Time::at(100),
            heard_time: Time::at(100),
            out_metric: Metric::finite(out),
            ..LinkTuple::fresh(id(oip), Time::at(100), Metric::finite(1))
        }
    }

    fn rt(f: &str, d: &str, m: u64) -> ((NodeId, NodeId), TopologyTuple) {
        (
            (id(f), id(d)),
            TopologyTuple {
                from: id(f),
                dest: id(d),
                validity_time: Time::at(9),
                metric: Metric::finite(m),
            },
        )
    }

    fn route(d: &str, n: &str, m: u64) -> (NodeId, Route) {
        (
            id(d),
            Route {
                dest: id(d),
                next_hop: id(n),
                metric: Metric::finite(m),
            },
        )
    }

    #[test]
    fn topology_replaced_per_originator_and_skips_self() {
        let ip = id("S");
        let now = Time::at(5);
        let rts = update_router_topology(&ip, &TopologySet::new(), &tc("A", 1, &[("B", 1), ("S", 1)]), now);
        assert_eq!(rts.len(), 1);
        assert_eq!(rts[&(id("A"), id("B"))].validity_time, Time::at(35));
        let rts = update_router_topology(&ip, &rts, &tc("A", 2, &[("C", 5)]), now);
        assert_eq!(rts.keys().cloned().collect::<Vec<_>>(), [(id("A"), id("C"))]);
        let arrs = update_advertising_routers(&AdvertisingRouterSet::new(), &tc("A", 7, &[]), now);
        let arrs = update_advertising_routers(&arrs, &tc("A", 9, &[]), now);
        assert_eq!(arrs.len(), 1);
        assert_eq!(arrs[&id("A")].ansn, 9);
        assert!(purge_advertising_routers(&arrs, Time::at(35)).is_empty());
        assert!(purge_router_topology(&rts, Time::at(35)).is_empty());
    }

    #[test]
    fn ansn_tracks_selector_changes() {
        let mut a = neighbour("A", 1);
        let ls: LinkSet = [a.clone()].into_iter().collect();
        assert_eq!(increment_ansn(&ls, &ls, 4), 4);
        a.rmpr_selector = true;
        let changed: LinkSet = [a].into_iter().collect();
        assert_eq!(increment_ansn(&changed, &ls, 4), 5);
    }

    #[test]
    fn routes_through_advertised_links() {
        let ip = id("S");
        let now = Time::at(0);
        let ls: LinkSet = [neighbour("A", 1)].into_iter().collect();
        let rts: TopologySet = [("A", "B", 1), ("A", "C", 5), ("C", "D", 1), ("B", "D", 4)]
            .iter()
            .map(|(f, d, m)| rt(f, d, *m))
            .collect();
        let rs = choose_optimal(&ip, &ls, &rts, now);
        let expected: RoutingSet = [route("A", "A", 1), route("B", "A", 2), route("C", "A", 6), route("D", "A", 6)]
            .into_iter()
            .collect();
        assert_eq!(rs, expected);
        assert!(is_optimal_routing_set(&ip, &ls, &rts, &rs, now));
        let mut worse = rs.clone();
        worse.insert(id("D"), route("D", "A", 7).1);
        assert!(!is_optimal_routing_set(&ip, &ls, &rts, &worse, now));
        let mut missing = rs.clone();
        missing.remove(&id("C"));
        assert!(!is_optimal_routing_set(&ip, &ls, &rts, &missing, now));
        assert_eq!(update_routing_set(&ip, &ls, &rts, &worse, &rs, now), Ok(rs.clone()));
        assert!(update_routing_set(&ip, &ls, &rts, &rs, &worse, now).is_err());
    }

    #[test]
    fn equal_cost_next_hops_are_all_optimal() {
        let ip = id("S");
        let now = Time::at(0);
        let ls: LinkSet = [neighbour("A", 1), neighbour("B", 1)].into_iter().collect();
        let rts: TopologySet = [rt("A", "X", 2), rt("B", "X", 2)].into_iter().collect();
        let rs = choose_optimal(&ip, &ls, &rts, now);
        assert_eq!(rs[&id("X")].next_hop, id("A"));
        let mut alt = rs.clone();
        alt.insert(id("X"), route("X", "B", 3).1);
        assert!(is_optimal_routing_set(&ip, &ls, &rts, &alt, now));
    }

    #[test]
    fn empty_and_infinite_links_give_no_routes() {
        let ip = id("S");
        let now = Time::at(0);
        assert!(choose_optimal(&ip, &LinkSet::default(), &TopologySet::new(), now).is_empty());
        let mut n = neighbour("A", 1);
        n.out_metric = Metric::Infinite;
        let ls: LinkSet = [n].into_iter().collect();
        assert!(choose_optimal(&ip, &ls, &TopologySet::new(), now).is_empty());
        assert!(is_optimal_routing_set(&ip, &ls, &TopologySet::new(), &RoutingSet::new(), now));
    }
}
