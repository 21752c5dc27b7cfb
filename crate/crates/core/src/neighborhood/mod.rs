//! Link set and 2-hop set: the router's view of its one- and two-hop
//! neighbourhood, the updates driven by incoming HELLOs, and purging.

mod mpr;

pub use mpr::{
    choose_fmprs, choose_rmprs, is_valid_fmpr_set, is_valid_rmpr_set, update_fmprs, update_rmprs,
    valid_fmprs, valid_rmprs, MprNeighbourhood,
};

use std::collections::BTreeMap;
use std::fmt;

use crate::messages::Hello;
use crate::types::{Metric, NodeId, Status, Time};

/// One entry of the link set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkTuple {
    pub oip: NodeId,
    pub symmetric_time: Time,
    pub heard_time: Time,
    pub validity_time: Time,
    pub fmpr: bool,
    pub rmpr: bool,
    pub fmpr_selector: bool,
    pub rmpr_selector: bool,
    /// Metric of the link from the neighbour to this router.
    pub in_metric: Metric,
    /// Metric of the link from this router to the neighbour.
    pub out_metric: Metric,
}

impl LinkTuple {
    /// A tuple for a neighbour that has just been heard for the first time.
    pub fn fresh(oip: NodeId, validity_time: Time, in_metric: Metric) -> Self {
        LinkTuple {
            oip,
            symmetric_time: Time::NegInf,
            heard_time: Time::NegInf,
            validity_time,
            fmpr: false,
            rmpr: false,
            fmpr_selector: false,
            rmpr_selector: false,
            in_metric,
            out_metric: Metric::Infinite,
        }
    }
}

fn flag(b: bool) -> char {
    if b {
        'T'
    } else {
        'F'
    }
}

impl fmt::Display for LinkTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L {} sym={} heard={} vt={} fmpr={} rmpr={} fsel={} rsel={} in={} out={}",
            self.oip,
            self.symmetric_time,
            self.heard_time,
            self.validity_time,
            flag(self.fmpr),
            flag(self.rmpr),
            flag(self.fmpr_selector),
            flag(self.rmpr_selector),
            self.in_metric,
            self.out_metric
        )
    }
}

/// Status of a link tuple at `now`.
pub fn link_status(lt: &LinkTuple, now: Time) -> Status {
    if lt.symmetric_time > now {
        Status::Symmetric
    } else if lt.heard_time > now {
        Status::Heard
    } else {
        Status::Lost
    }
}

/// Link tuples keyed by neighbour address; at most one tuple per neighbour.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkSet(BTreeMap<NodeId, LinkTuple>);

impl LinkSet {
    /// Inserts `lt`, replacing any tuple for the same neighbour.
    pub fn insert(&mut self, lt: LinkTuple) {
        self.0.insert(lt.oip.clone(), lt);
    }

    pub fn get(&self, oip: &NodeId) -> Option<&LinkTuple> {
        self.0.get(oip)
    }

    pub fn get_mut(&mut self, oip: &NodeId) -> Option<&mut LinkTuple> {
        self.0.get_mut(oip)
    }

    pub fn remove(&mut self, oip: &NodeId) -> Option<LinkTuple> {
        self.0.remove(oip)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinkTuple> {
        self.0.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut LinkTuple> {
        self.0.values_mut()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn status_of(&self, oip: &NodeId, now: Time) -> Option<Status> {
        self.get(oip).map(|lt| link_status(lt, now))
    }

    pub fn is_symmetric(&self, oip: &NodeId, now: Time) -> bool {
        self.status_of(oip, now) == Some(Status::Symmetric)
    }

    /// Tuples that are SYMMETRIC at `now`.
    pub fn symmetric(&self, now: Time) -> impl Iterator<Item = &LinkTuple> {
        self.iter()
            .filter(move |lt| link_status(lt, now) == Status::Symmetric)
    }

    pub fn flooding_mprs(&self) -> std::collections::BTreeSet<NodeId> {
        self.iter().filter(|lt| lt.fmpr).map(|lt| lt.oip.clone()).collect()
    }

    pub fn routing_mprs(&self) -> std::collections::BTreeSet<NodeId> {
        self.iter().filter(|lt| lt.rmpr).map(|lt| lt.oip.clone()).collect()
    }

    pub fn routing_mpr_selectors(&self) -> std::collections::BTreeSet<NodeId> {
        self.iter()
            .filter(|lt| lt.rmpr_selector)
            .map(|lt| lt.oip.clone())
            .collect()
    }
}

impl FromIterator<LinkTuple> for LinkSet {
    fn from_iter<I: IntoIterator<Item = LinkTuple>>(iter: I) -> Self {
        let mut ls = LinkSet::default();
        for lt in iter {
            ls.insert(lt);
        }
        ls
    }
}

/// One entry of the 2-hop set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoHopTuple {
    pub one_hop: NodeId,
    pub two_hop: NodeId,
    pub validity_time: Time,
    /// Metric of the link from the 2-hop node to the 1-hop node.
    pub in_metric: Metric,
    /// Metric of the link from the 1-hop node to the 2-hop node.
    pub out_metric: Metric,
}

impl fmt::Display for TwoHopTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N2 {} {} vt={} in={} out={}",
            self.one_hop, self.two_hop, self.validity_time, self.in_metric, self.out_metric
        )
    }
}

/// 2-hop tuples keyed by `(one_hop, two_hop)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwoHopSet(BTreeMap<(NodeId, NodeId), TwoHopTuple>);

impl TwoHopSet {
    pub fn insert(&mut self, t: TwoHopTuple) {
        self.0.insert((t.one_hop.clone(), t.two_hop.clone()), t);
    }

    pub fn get(&self, one_hop: &NodeId, two_hop: &NodeId) -> Option<&TwoHopTuple> {
        self.0.get(&(one_hop.clone(), two_hop.clone()))
    }

    pub fn contains(&self, one_hop: &NodeId, two_hop: &NodeId) -> bool {
        self.get(one_hop, two_hop).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TwoHopTuple> {
        self.0.values()
    }

    /// Tuples whose 1-hop node is `one_hop`.
    pub fn via<'a>(&'a self, one_hop: &'a NodeId) -> impl Iterator<Item = &'a TwoHopTuple> + 'a {
        self.iter().filter(move |t| &t.one_hop == one_hop)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn for_anchor_mut(&mut self, moip: &NodeId) -> impl Iterator<Item = &mut TwoHopTuple> {
        let moip = moip.clone();
        self.0
            .iter_mut()
            .filter(move |((a, _), _)| *a == moip)
            .map(|(_, t)| t)
    }
}

impl FromIterator<TwoHopTuple> for TwoHopSet {
    fn from_iter<I: IntoIterator<Item = TwoHopTuple>>(iter: I) -> Self {
        let mut s = TwoHopSet::default();
        for t in iter {
            s.insert(t);
        }
        s
    }
}

/// Adds a tuple for `moip` unless one exists.
pub fn add_link_tuple(
    ls: &LinkSet,
    moip: &NodeId,
    vtime: Time,
    in_metric: Metric,
    now: Time,
) -> LinkSet {
    let mut out = ls.clone();
    if out.get(moip).is_none() {
        out.insert(LinkTuple::fresh(moip.clone(), now + vtime, in_metric));
    }
    out
}

/// Takes the out metric for `moip` from the metric it reports for `ip`.
pub fn update_link_out_metrics(ip: &NodeId, ls: &LinkSet, msg: &Hello) -> LinkSet {
    let mut out = ls.clone();
    if let (Some(lt), Some(m)) = (out.get_mut(&msg.originator), msg.in_metrics.get(ip)) {
        lt.out_metric = *m;
    }
    out
}

pub fn update_symmetric_time(
    ip: &NodeId,
    ls: &LinkSet,
    msg: &Hello,
    htime: Time,
    now: Time,
) -> LinkSet {
    let mut out = ls.clone();
    let vtime = msg.validity;
    match msg.statuses.get(ip) {
        Some(Status::Symmetric | Status::Heard) => {
            if let Some(lt) = out.get_mut(&msg.originator) {
                lt.symmetric_time = now + vtime;
            }
        }
        Some(Status::Lost) if ls.is_symmetric(&msg.originator, now) => {
            if let Some(lt) = out.get_mut(&msg.originator) {
                lt.symmetric_time = Time::NegInf;
                lt.validity_time = now + htime;
            }
        }
        _ => {}
    }
    out
}

pub fn update_heard_time(ls: &LinkSet, msg: &Hello, now: Time) -> LinkSet {
    let mut out = ls.clone();
    if let Some(lt) = out.get_mut(&msg.originator) {
        lt.heard_time = (now + msg.validity).max(lt.symmetric_time);
    }
    out
}

pub fn update_validity_time(ls: &LinkSet, moip: &NodeId, htime: Time) -> LinkSet {
    let mut out = ls.clone();
    if let Some(lt) = out.get_mut(moip) {
        lt.validity_time = (lt.heard_time + htime).max(lt.validity_time);
    }
    out
}

fn update_selector(
    ip: &NodeId,
    ls: &LinkSet,
    msg: &Hello,
    selects: fn(crate::types::MprRole) -> bool,
    field: fn(&mut LinkTuple) -> &mut bool,
) -> LinkSet {
    let mut out = ls.clone();
    let value = if msg.mprs.get(ip).is_some_and(|r| selects(*r)) {
        Some(true)
    } else if msg.statuses.get(ip) == Some(&Status::Symmetric) {
        Some(false)
    } else {
        None
    };
    if let (Some(v), Some(lt)) = (value, out.get_mut(&msg.originator)) {
        *field(lt) = v;
    }
    out
}

pub fn update_fmpr_selectors(ip: &NodeId, ls: &LinkSet, msg: &Hello) -> LinkSet {
    update_selector(ip, ls, msg, |r| r.is_flooding(), |lt| &mut lt.fmpr_selector)
}

pub fn update_rmpr_selectors(ip: &NodeId, ls: &LinkSet, msg: &Hello) -> LinkSet {
    update_selector(ip, ls, msg, |r| r.is_routing(), |lt| &mut lt.rmpr_selector)
}

/// Records the symmetric neighbours of a symmetric neighbour.
pub fn add_2hop_tuples(
    ip: &NodeId,
    ls: &LinkSet,
    n2s: &TwoHopSet,
    msg: &Hello,
    now: Time,
) -> TwoHopSet {
    let mut out = n2s.clone();
    let moip = &msg.originator;
    if !ls.is_symmetric(moip, now) {
        return out;
    }
    for (x, status) in &msg.statuses {
        if x != ip && *status == Status::Symmetric && !n2s.contains(moip, x) {
            out.insert(TwoHopTuple {
                one_hop: moip.clone(),
                two_hop: x.clone(),
                validity_time: Time::NegInf,
                in_metric: Metric::Infinite,
                out_metric: Metric::Infinite,
            });
        }
    }
    out
}

fn update_2hop_metric(
    ls: &LinkSet,
    n2s: &TwoHopSet,
    moip: &NodeId,
    metrics: &BTreeMap<NodeId, Metric>,
    now: Time,
    field: fn(&mut TwoHopTuple) -> &mut Metric,
) -> TwoHopSet {
    let mut out = n2s.clone();
    if ls.is_symmetric(moip, now) {
        for t in out.for_anchor_mut(moip) {
            if let Some(m) = metrics.get(&t.two_hop) {
                *field(t) = *m;
            }
        }
    }
    out
}

pub fn update_2hop_in_metrics(ls: &LinkSet, n2s: &TwoHopSet, msg: &Hello, now: Time) -> TwoHopSet {
    update_2hop_metric(ls, n2s, &msg.originator, &msg.in_metrics, now, |t| {
        &mut t.in_metric
    })
}

pub fn update_2hop_out_metrics(
    ls: &LinkSet,
    n2s: &TwoHopSet,
    msg: &Hello,
    now: Time,
) -> TwoHopSet {
    update_2hop_metric(ls, n2s, &msg.originator, &msg.out_metrics, now, |t| {
        &mut t.out_metric
    })
}

pub fn update_2hop_time(
    ip: &NodeId,
    ls: &LinkSet,
    n2s: &TwoHopSet,
    msg: &Hello,
    now: Time,
) -> TwoHopSet {
    let mut out = n2s.clone();
    let moip = &msg.originator;
    if ls.is_symmetric(moip, now) {
        for t in out.for_anchor_mut(moip) {
            if &t.two_hop != ip && msg.statuses.get(&t.two_hop) == Some(&Status::Symmetric) {
                t.validity_time = now + msg.validity;
            }
        }
    }
    out
}

/// Drops expired tuples and clears MPR flags on tuples that are not
/// symmetric.
pub fn purge_link_set(ls: &LinkSet, now: Time) -> LinkSet {
    ls.iter()
        .filter(|lt| lt.validity_time > now)
        .map(|lt| {
            if link_status(lt, now) == Status::Symmetric {
                lt.clone()
            } else {
                LinkTuple {
                    fmpr: false,
                    rmpr: false,
                    fmpr_selector: false,
                    rmpr_selector: false,
                    ..lt.clone()
                }
            }
        })
        .collect()
}

/// Drops expired tuples and tuples whose 1-hop node is not symmetric.
pub fn purge_2hop_set(ls: &LinkSet, n2s: &TwoHopSet, now: Time) -> TwoHopSet {
    n2s.iter()
        .filter(|t| t.validity_time > now && ls.is_symmetric(&t.one_hop, now))
        .cloned()
        .collect()
}
