//! Scalar domains shared by every module: node identifiers, extended
//! integer time, link metrics, sequence numbers and the small enums that
//! appear inside HELLO messages.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;
use std::sync::Arc;

/// Opaque, totally ordered node identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(Arc<str>);

impl NodeId {
    /// Builds an identifier from a printable token.
    ///
    /// # Panics
    ///
    /// Panics if `name` is empty or contains whitespace or one of the
    /// characters used by the trace format.
    pub fn new(name: &str) -> Self {
        assert!(Self::is_valid(name), "invalid node id {name:?}");
        NodeId(Arc::from(name))
    }

    /// Whether `name` can be used as an identifier.
    pub fn is_valid(name: &str) -> bool {
        !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Integers extended with both infinities.
///
/// The derived order places `NegInf` below every finite value and `Inf`
/// above.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Time {
    NegInf,
    At(i64),
    Inf,
}

impl Time {
    pub const fn at(t: i64) -> Self {
        Time::At(t)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Time::At(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<i64> {
        match self {
            Time::At(t) => Some(t),
            _ => None,
        }
    }
}

impl From<i64> for Time {
    fn from(t: i64) -> Self {
        Time::At(t)
    }
}

impl Add for Time {
    type Output = Time;

    /// # Panics
    ///
    /// Panics on `Inf + NegInf`, which has no value.
    fn add(self, rhs: Time) -> Time {
        match (self, rhs) {
            (Time::At(a), Time::At(b)) => Time::At(a + b),
            (Time::Inf, Time::NegInf) | (Time::NegInf, Time::Inf) => {
                panic!("undefined time sum inf + -inf")
            }
            (Time::Inf, _) | (_, Time::Inf) => Time::Inf,
            (Time::NegInf, _) | (_, Time::NegInf) => Time::NegInf,
        }
    }
}

impl Add<i64> for Time {
    type Output = Time;

    fn add(self, rhs: i64) -> Time {
        self + Time::At(rhs)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::NegInf => f.write_str("-inf"),
            Time::At(t) => write!(f, "{t}"),
            Time::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for Time {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" => Ok(Time::Inf),
            "-inf" => Ok(Time::NegInf),
            _ => s.parse().map(Time::At).map_err(|_| format!("bad time {s:?}")),
        }
    }
}

/// Link cost: a positive integer or infinity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Metric {
    Finite(u64),
    Infinite,
}

impl Metric {
    /// A finite metric; `None` for zero.
    pub fn new(v: u64) -> Option<Self> {
        (v > 0).then_some(Metric::Finite(v))
    }

    /// # Panics
    ///
    /// Panics if `v` is zero.
    pub fn finite(v: u64) -> Self {
        Self::new(v).expect("metrics are positive")
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Metric::Finite(_))
    }

    pub fn value(self) -> Option<u64> {
        match self {
            Metric::Finite(v) => Some(v),
            Metric::Infinite => None,
        }
    }
}

impl Add for Metric {
    type Output = Metric;

    fn add(self, rhs: Metric) -> Metric {
        match (self, rhs) {
            (Metric::Finite(a), Metric::Finite(b)) => Metric::Finite(a.saturating_add(b)),
            _ => Metric::Infinite,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Finite(v) => write!(f, "{v}"),
            Metric::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(Metric::Infinite);
        }
        s.parse::<u64>()
            .ok()
            .and_then(Metric::new)
            .ok_or_else(|| format!("bad metric {s:?}"))
    }
}

/// Message sequence numbers and ANSNs.
pub type Sqn = i64;

/// Link status advertised in HELLO messages.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Status {
    Symmetric,
    Heard,
    Lost,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Symmetric => "SYMMETRIC",
            Status::Heard => "HEARD",
            Status::Lost => "LOST",
        })
    }
}

/// Which kind of MPR a HELLO announces a neighbour to be.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MprRole {
    Flooding,
    Routing,
    FloodRoute,
}

impl MprRole {
    pub fn is_flooding(self) -> bool {
        matches!(self, MprRole::Flooding | MprRole::FloodRoute)
    }

    pub fn is_routing(self) -> bool {
        matches!(self, MprRole::Routing | MprRole::FloodRoute)
    }
}

impl fmt::Display for MprRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MprRole::Flooding => "FLOODING",
            MprRole::Routing => "ROUTING",
            MprRole::FloodRoute => "FLOOD_ROUTE",
        })
    }
}
