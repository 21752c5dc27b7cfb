//! HELLO and TC messages, packets, and the constructors that derive them
//! from a link set.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ContractError;
use crate::neighborhood::{link_status, LinkSet};
use crate::types::{Metric, MprRole, NodeId, Sqn, Status, Time};

/// One-hop neighbourhood advertisement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hello {
    pub originator: NodeId,
    pub validity: Time,
    pub statuses: BTreeMap<NodeId, Status>,
    pub mprs: BTreeMap<NodeId, MprRole>,
    pub in_metrics: BTreeMap<NodeId, Metric>,
    pub out_metrics: BTreeMap<NodeId, Metric>,
}

/// Topology control message, flooded through the network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tc {
    pub originator: NodeId,
    pub sender: NodeId,
    pub validity: Time,
    pub seq: Sqn,
    pub ansn: Sqn,
    pub dests: BTreeMap<NodeId, Metric>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Hello(Hello),
    Tc(Tc),
}

impl Message {
    pub fn originator(&self) -> &NodeId {
        match self {
            Message::Hello(h) => &h.originator,
            Message::Tc(t) => &t.originator,
        }
    }

    pub fn as_tc(&self) -> Option<&Tc> {
        match self {
            Message::Tc(t) => Some(t),
            Message::Hello(_) => None,
        }
    }
}

/// Messages broadcast together in one transmission.
pub type Packet = Vec<Message>;

/// The HELLO `ip` would send at `now`, advertising every link tuple.
pub fn make_hello(ip: &NodeId, vtime: Time, ls: &LinkSet, now: Time) -> Hello {
    let mut statuses = BTreeMap::new();
    let mut mprs = BTreeMap::new();
    let mut in_metrics = BTreeMap::new();
    let mut out_metrics = BTreeMap::new();
    for lt in ls.iter() {
        let status = link_status(lt, now);
        statuses.insert(lt.oip.clone(), status);
        let role = match (lt.fmpr, lt.rmpr) {
            (true, false) => Some(MprRole::Flooding),
            (false, true) => Some(MprRole::Routing),
            (true, true) => Some(MprRole::FloodRoute),
            (false, false) => None,
        };
        if let Some(role) = role {
            mprs.insert(lt.oip.clone(), role);
        }
        if status != Status::Lost {
            in_metrics.insert(lt.oip.clone(), lt.in_metric);
        }
        if status == Status::Symmetric {
            out_metrics.insert(lt.oip.clone(), lt.out_metric);
        }
    }
    Hello {
        originator: ip.clone(),
        validity: vtime,
        statuses,
        mprs,
        in_metrics,
        out_metrics,
    }
}

/// A freshly originated TC advertising the symmetric routing-MPR selectors.
pub fn make_tc(ip: &NodeId, vtime: Time, sqn: Sqn, ansn: Sqn, ls: &LinkSet, now: Time) -> Tc {
    let dests = ls
        .iter()
        .filter(|lt| lt.rmpr_selector && link_status(lt, now) == Status::Symmetric)
        .map(|lt| (lt.oip.clone(), lt.out_metric))
        .collect();
    Tc {
        originator: ip.clone(),
        sender: ip.clone(),
        validity: vtime,
        seq: sqn,
        ansn,
        dests,
    }
}

/// The copy of a TC that `ip` rebroadcasts; only the sender changes.
pub fn forward_tc_message(ip: &NodeId, msg: &Message) -> Result<Message, ContractError> {
    match msg {
        Message::Tc(tc) => Ok(Message::Tc(Tc {
            sender: ip.clone(),
            ..tc.clone()
        })),
        Message::Hello(_) => Err(ContractError::ForwardHello),
    }
}

fn write_pairs<V: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    map: &BTreeMap<NodeId, V>,
) -> fmt::Result {
    f.write_str("{")?;
    for (i, (k, v)) in map.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "({k},{v})")?;
    }
    f.write_str("}")
}

impl fmt::Display for Hello {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HELLO o={} vt={} st=", self.originator, self.validity)?;
        write_pairs(f, &self.statuses)?;
        f.write_str(" mpr=")?;
        write_pairs(f, &self.mprs)?;
        f.write_str(" in=")?;
        write_pairs(f, &self.in_metrics)?;
        f.write_str(" out=")?;
        write_pairs(f, &self.out_metrics)
    }
}

impl fmt::Display for Tc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TC o={} s={} vt={} sqn={} ansn={} d=",
            self.originator, self.sender, self.validity, self.seq, self.ansn
        )?;
        write_pairs(f, &self.dests)
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Hello(h) => h.fmt(f),
            Message::Tc(t) => t.fmt(f),
        }
    }
}

/// `[msg | msg]`.
pub fn render_packet(pkt: &[Message]) -> String {
    let parts: Vec<String> = pkt.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(" | "))
}
