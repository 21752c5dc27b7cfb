//! Flooding and routing MPR selection.
//!
//! A candidate set `M` of symmetric neighbours is valid when every 2-hop
//! target is reached through `M` at the same distance as through the whole
//! symmetric neighbourhood `N1`. Flooding distances count hops; routing
//! distances add the incoming link metrics along `t -> x -> self`.

use std::collections::{BTreeMap, BTreeSet};

use super::{LinkSet, TwoHopSet};
use crate::error::ContractError;
use crate::types::{Metric, NodeId, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Flooding,
    /// `legacy` measures the second hop with the 2-hop out metric.
    Routing { legacy: bool },
}

/// Symmetric neighbours and the 2-hop tuples anchored at them, as seen at
/// one instant.
#[derive(Clone, Debug)]
pub struct MprNeighbourhood {
    /// Symmetric neighbour -> incoming link metric.
    n1: BTreeMap<NodeId, Metric>,
    /// (1-hop, 2-hop) -> (in metric, out metric).
    n2: BTreeMap<(NodeId, NodeId), (Metric, Metric)>,
}

impl MprNeighbourhood {
    pub fn new(ls: &LinkSet, n2s: &TwoHopSet, now: Time) -> Self {
        let n1: BTreeMap<NodeId, Metric> = ls
            .symmetric(now)
            .map(|lt| (lt.oip.clone(), lt.in_metric))
            .collect();
        let n2 = n2s
            .iter()
            .filter(|t| n1.contains_key(&t.one_hop))
            .map(|t| ((t.one_hop.clone(), t.two_hop.clone()), (t.in_metric, t.out_metric)))
            .collect();
        MprNeighbourhood { n1, n2 }
    }

    /// Symmetric neighbours in ascending order.
    pub fn one_hop(&self) -> impl Iterator<Item = &NodeId> {
        self.n1.keys()
    }

    /// Distinct 2-hop targets in ascending order.
    pub fn targets(&self) -> BTreeSet<NodeId> {
        self.n2.keys().map(|(_, t)| t.clone()).collect()
    }

    /// Distance to `t` through the single neighbour `x`.
    fn via(&self, kind: Kind, x: &NodeId, t: &NodeId) -> Metric {
        let Some(&d1) = self.n1.get(x) else {
            return Metric::Infinite;
        };
        let direct = if x == t {
            match kind {
                Kind::Flooding => Metric::finite(1),
                Kind::Routing { .. } => d1,
            }
        } else {
            Metric::Infinite
        };
        let two = match self.n2.get(&(x.clone(), t.clone())) {
            None => Metric::Infinite,
            Some(&(n2_in, n2_out)) => match kind {
                Kind::Flooding => Metric::finite(2),
                Kind::Routing { legacy: false } => d1 + n2_in,
                Kind::Routing { legacy: true } => d1 + n2_out,
            },
        };
        direct.min(two)
    }

    fn distance<'a>(
        &self,
        kind: Kind,
        t: &NodeId,
        set: impl IntoIterator<Item = &'a NodeId>,
    ) -> Metric {
        set.into_iter()
            .map(|x| self.via(kind, x, t))
            .min()
            .unwrap_or(Metric::Infinite)
    }

    fn is_valid(&self, kind: Kind, set: &BTreeSet<NodeId>) -> bool {
        set.iter().all(|x| self.n1.contains_key(x))
            && self
                .targets()
                .iter()
                .all(|t| self.distance(kind, t, set) == self.distance(kind, t, self.n1.keys()))
    }

    fn enumerate(&self, kind: Kind) -> Vec<BTreeSet<NodeId>> {
        let n1: Vec<&NodeId> = self.n1.keys().collect();
        assert!(n1.len() <= 20, "exhaustive MPR enumeration over {} neighbours", n1.len());
        let mut out: Vec<BTreeSet<NodeId>> = (0u32..1 << n1.len())
            .map(|mask| {
                n1.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, x)| (*x).clone())
                    .collect()
            })
            .filter(|s| self.is_valid(kind, s))
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
        out
    }

    /// Greedy cover seeded with the neighbours that are the only optimal
    /// relay for some target, followed by removal of redundant members.
    fn choose(&self, kind: Kind) -> BTreeSet<NodeId> {
        let best: BTreeMap<NodeId, Metric> = self
            .targets()
            .into_iter()
            .map(|t| {
                let d = self.distance(kind, &t, self.n1.keys());
                (t, d)
            })
            .filter(|(_, d)| d.is_finite())
            .collect();
        let covers: BTreeMap<&NodeId, BTreeSet<&NodeId>> = self
            .n1
            .keys()
            .map(|x| {
                let c = best
                    .iter()
                    .filter(|(t, d)| self.via(kind, x, t) == **d)
                    .map(|(t, _)| t)
                    .collect();
                (x, c)
            })
            .collect();

        let mut chosen: BTreeSet<&NodeId> = BTreeSet::new();
        for t in best.keys() {
            let mut relays = covers.iter().filter(|(_, c)| c.contains(t)).map(|(x, _)| *x);
            if let (Some(only), None) = (relays.next(), relays.next()) {
                chosen.insert(only);
            }
        }
        let covered = |chosen: &BTreeSet<&NodeId>| -> BTreeSet<&NodeId> {
            chosen.iter().flat_map(|x| covers[x].iter().copied()).collect()
        };
        let mut uncovered: BTreeSet<&NodeId> = best.keys().collect();
        uncovered.retain(|t| !covered(&chosen).contains(t));
        while !uncovered.is_empty() {
            let (x, gain) = covers
                .iter()
                .filter(|(x, _)| !chosen.contains(*x))
                .map(|(x, c)| (*x, c.intersection(&uncovered).count()))
                .fold(None, |acc: Option<(&NodeId, usize)>, (x, g)| match acc {
                    Some((_, bg)) if bg >= g => acc,
                    _ => Some((x, g)),
                })
                .expect("every finite target has a relay");
            assert!(gain > 0, "every finite target has a relay");
            chosen.insert(x);
            uncovered.retain(|t| !covers[x].contains(t));
        }
        let all: BTreeSet<&NodeId> = best.keys().collect();
        for x in chosen.clone().into_iter().rev() {
            let mut without = chosen.clone();
            without.remove(x);
            if covered(&without) == all {
                chosen = without;
            }
        }
        let result: BTreeSet<NodeId> = chosen.into_iter().cloned().collect();
        debug_assert!(self.is_valid(kind, &result));
        result
    }
}

fn routing(legacy: bool) -> Kind {
    Kind::Routing { legacy }
}

/// Every valid flooding MPR set, ordered by size then lexicographically.
///
/// # Panics
///
/// Panics with more than 20 symmetric neighbours.
pub fn valid_fmprs(ls: &LinkSet, n2s: &TwoHopSet, now: Time) -> Vec<BTreeSet<NodeId>> {
    MprNeighbourhood::new(ls, n2s, now).enumerate(Kind::Flooding)
}

/// Every valid routing MPR set, ordered by size then lexicographically.
/// `legacy` measures 2-hop distances with the out metric.
///
/// # Panics
///
/// Panics with more than 20 symmetric neighbours.
pub fn valid_rmprs(
    ls: &LinkSet,
    n2s: &TwoHopSet,
    now: Time,
    legacy: bool,
) -> Vec<BTreeSet<NodeId>> {
    MprNeighbourhood::new(ls, n2s, now).enumerate(routing(legacy))
}

pub fn is_valid_fmpr_set(ls: &LinkSet, n2s: &TwoHopSet, now: Time, set: &BTreeSet<NodeId>) -> bool {
    MprNeighbourhood::new(ls, n2s, now).is_valid(Kind::Flooding, set)
}

pub fn is_valid_rmpr_set(
    ls: &LinkSet,
    n2s: &TwoHopSet,
    now: Time,
    legacy: bool,
    set: &BTreeSet<NodeId>,
) -> bool {
    MprNeighbourhood::new(ls, n2s, now).is_valid(routing(legacy), set)
}

pub fn choose_fmprs(ls: &LinkSet, n2s: &TwoHopSet, now: Time) -> BTreeSet<NodeId> {
    MprNeighbourhood::new(ls, n2s, now).choose(Kind::Flooding)
}

pub fn choose_rmprs(ls: &LinkSet, n2s: &TwoHopSet, now: Time, legacy: bool) -> BTreeSet<NodeId> {
    MprNeighbourhood::new(ls, n2s, now).choose(routing(legacy))
}

fn apply(ls: &LinkSet, set: &BTreeSet<NodeId>, field: fn(&mut super::LinkTuple) -> &mut bool) -> LinkSet {
    let mut out = ls.clone();
    for lt in out.iter_mut() {
        let member = set.contains(&lt.oip);
        *field(lt) = member;
    }
    out
}

/// Re-flags flooding MPRs with `fmprs` if the current flags are no longer
/// valid.
pub fn update_fmprs(
    ls: &LinkSet,
    n2s: &TwoHopSet,
    fmprs: &BTreeSet<NodeId>,
    now: Time,
) -> Result<LinkSet, ContractError> {
    let hood = MprNeighbourhood::new(ls, n2s, now);
    if !hood.is_valid(Kind::Flooding, fmprs) {
        return Err(ContractError::InvalidFloodingMprs(fmprs.iter().cloned().collect()));
    }
    if hood.is_valid(Kind::Flooding, &ls.flooding_mprs()) {
        Ok(ls.clone())
    } else {
        Ok(apply(ls, fmprs, |lt| &mut lt.fmpr))
    }
}

/// Re-flags routing MPRs with `rmprs` if the current flags are no longer
/// valid.
pub fn update_rmprs(
    ls: &LinkSet,
    n2s: &TwoHopSet,
    rmprs: &BTreeSet<NodeId>,
    now: Time,
    legacy: bool,
) -> Result<LinkSet, ContractError> {
    let hood = MprNeighbourhood::new(ls, n2s, now);
    if !hood.is_valid(routing(legacy), rmprs) {
        return Err(ContractError::InvalidRoutingMprs(rmprs.iter().cloned().collect()));
    }
    if hood.is_valid(routing(legacy), &ls.routing_mprs()) {
        Ok(ls.clone())
    } else {
        Ok(apply(ls, rmprs, |lt| &mut lt.rmpr))
    }
}
