//! Oracles written independently of the library's own algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use olsrv2::neighborhood::{LinkSet, LinkTuple, TwoHopSet, TwoHopTuple};
use olsrv2::{Metric, NodeId, Time};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(s: &str) -> NodeId {
    NodeId::from(s)
}

/// Cheapest simple path from `src` to every reachable node, found by
/// enumerating all simple paths.
pub fn brute_force_paths(links: &[(NodeId, NodeId, u64)], src: &NodeId) -> BTreeMap<NodeId, u64> {
    fn walk(
        links: &[(NodeId, NodeId, u64)],
        at: &NodeId,
        cost: u64,
        visited: &mut Vec<NodeId>,
        best: &mut BTreeMap<NodeId, u64>,
    ) {
        for (a, b, w) in links {
            if a != at || visited.contains(b) {
                continue;
            }
            let c = cost + w;
            let e = best.entry(b.clone()).or_insert(c);
            if c < *e {
                *e = c;
            }
            visited.push(b.clone());
            walk(links, b, c, visited, best);
            visited.pop();
        }
    }
    let mut best = BTreeMap::new();
    walk(links, src, 0, &mut vec![src.clone()], &mut best);
    best
}

/// A neighbourhood as plain data: symmetric neighbours with their in
/// metric, and `(one_hop, two_hop, in, out)` rows.
#[derive(Clone, Debug)]
pub struct Hood {
    pub n1: BTreeMap<NodeId, Metric>,
    pub n2: Vec<(NodeId, NodeId, Metric, Metric)>,
    pub ls: LinkSet,
    pub n2s: TwoHopSet,
}

pub const NOW: Time = Time::At(0);

fn random_metric(rng: &mut ChaCha8Rng) -> Metric {
    if rng.gen_bool(0.1) {
        Metric::Infinite
    } else {
        Metric::finite(rng.gen_range(1..=8))
    }
}

/// Up to `max_n1` symmetric neighbours, a few non-symmetric ones, and
/// 2-hop rows to other neighbours or to further nodes.
pub fn random_hood(seed: u64, max_n1: usize) -> Hood {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_sym = rng.gen_range(0..=max_n1);
    let n_heard = rng.gen_range(0..=2);
    let n_far = rng.gen_range(0..=5);
    let sym: Vec<NodeId> = (0..n_sym).map(|i| id(&format!("x{i}"))).collect();
    let heard: Vec<NodeId> = (0..n_heard).map(|i| id(&format!("h{i}"))).collect();
    let far: Vec<NodeId> = (0..n_far).map(|i| id(&format!("y{i}"))).collect();
    let mut ls = LinkSet::default();
    let mut n1 = BTreeMap::new();
    for x in &sym {
        let m = random_metric(&mut rng);
        let mut lt = LinkTuple::fresh(x.clone(), Time::at(50), m);
        lt.heard_time = Time::at(50);
        lt.symmetric_time = Time::at(50);
        ls.insert(lt);
        n1.insert(x.clone(), m);
    }
    for h in &heard {
        let mut lt = LinkTuple::fresh(h.clone(), Time::at(50), random_metric(&mut rng));
        lt.heard_time = Time::at(50);
        ls.insert(lt);
    }
    let anchors: Vec<NodeId> = sym.iter().chain(&heard).cloned().collect();
    let targets: Vec<NodeId> = sym.iter().chain(&heard).chain(&far).cloned().collect();
    let p = rng.gen_range(0.2..0.7);
    let mut n2s = TwoHopSet::default();
    let mut n2 = Vec::new();
    for x in &anchors {
        for t in &targets {
            if x == t || !rng.gen_bool(p) {
                continue;
            }
            let (i, o) = (random_metric(&mut rng), random_metric(&mut rng));
            n2s.insert(TwoHopTuple {
                one_hop: x.clone(),
                two_hop: t.clone(),
                validity_time: Time::at(50),
                in_metric: i,
                out_metric: o,
            });
            if n1.contains_key(x) {
                n2.push((x.clone(), t.clone(), i, o));
            }
        }
    }
    Hood { n1, n2, ls, n2s }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavour {
    Flooding,
    Routing,
    RoutingLegacy,
}

fn add(a: Metric, b: Metric) -> Metric {
    match (a.value(), b.value()) {
        (Some(x), Some(y)) => Metric::finite(x + y),
        _ => Metric::Infinite,
    }
}

/// `d(t, M)`: the best way to reach `t` through a member of `m`.
pub fn dist(h: &Hood, f: Flavour, t: &NodeId, m: &BTreeSet<NodeId>) -> Metric {
    let mut best = Metric::Infinite;
    for x in m {
        let d1 = h.n1[x];
        if x == t {
            let direct = if f == Flavour::Flooding { Metric::finite(1) } else { d1 };
            best = best.min(direct);
        }
        for (a, b, i, o) in &h.n2 {
            if a == x && b == t {
                let c = match f {
                    Flavour::Flooding => Metric::finite(2),
                    Flavour::Routing => add(d1, *i),
                    Flavour::RoutingLegacy => add(d1, *o),
                };
                best = best.min(c);
            }
        }
    }
    best
}

pub fn is_valid(h: &Hood, f: Flavour, m: &BTreeSet<NodeId>) -> bool {
    let all: BTreeSet<NodeId> = h.n1.keys().cloned().collect();
    m.is_subset(&all)
        && h
            .n2
            .iter()
            .map(|(_, t, _, _)| t)
            .all(|t| dist(h, f, t, m) == dist(h, f, t, &all))
}

/// All valid subsets of N1, recomputed from the definition.
pub fn valid_sets(h: &Hood, f: Flavour) -> BTreeSet<BTreeSet<NodeId>> {
    let n1: Vec<NodeId> = h.n1.keys().cloned().collect();
    (0u32..1 << n1.len())
        .map(|mask| {
            n1.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect::<BTreeSet<NodeId>>()
        })
        .filter(|s| is_valid(h, f, s))
        .collect()
}
