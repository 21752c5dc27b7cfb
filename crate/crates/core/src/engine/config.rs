use crate::error::ConfigError;
use crate::types::NodeId;

/// Transmission bounds shared by every router: a broadcast takes between
/// `lb` and `lb + delta_b` ticks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkParams {
    pub lb: i64,
    pub delta_b: i64,
    pub node_count: usize,
}

/// Per-router timing constants, in ticks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Timing {
    pub hp_maxjitter: i64,
    pub tp_maxjitter: i64,
    pub h_hold_time: i64,
    pub t_hold_time: i64,
    pub l_hold_time: i64,
    pub hello_interval: i64,
    pub tc_interval: i64,
}

impl Default for Timing {
    fn default() -> Self {
        Timing {
            hp_maxjitter: 3,
            tp_maxjitter: 3,
            h_hold_time: 20,
            t_hold_time: 60,
            l_hold_time: 10,
            hello_interval: 10,
            tc_interval: 15,
        }
    }
}

/// Behavioural switches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProtocolOptions {
    /// Measure the second hop of routing MPR distances with the out metric
    /// instead of the in metric, as RFC 7181 does.
    pub bug_rfc7181: bool,
    /// Forward every TC received from a symmetric neighbour.
    pub flood_all: bool,
    /// Apply TCs whose sender is not a symmetric neighbour.
    pub process_tc_from_unknown: bool,
    /// Replace MPR flags with the selector's choice whenever they differ,
    /// not only when they have become invalid.
    pub reselect_mprs: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouterConfig {
    pub ip: NodeId,
    pub timing: Timing,
    pub options: ProtocolOptions,
}

impl RouterConfig {
    pub fn new(ip: NodeId) -> Self {
        RouterConfig {
            ip,
            timing: Timing::default(),
            options: ProtocolOptions::default(),
        }
    }

    /// Checks every timing inequality against the network bounds.
    pub fn validate(&self, net: &NetworkParams) -> Result<(), ConfigError> {
        let t = &self.timing;
        let (lb, db) = (net.lb, net.delta_b);
        let n = net.node_count.max(1) as i64;
        let checks: [(bool, &'static str); 10] = [
            (0 < lb, "0 < LB"),
            (lb < lb + db, "LB < LB + ΔB"),
            (lb + db < t.hp_maxjitter, "LB + ΔB < hp_maxjitter"),
            (t.hp_maxjitter < t.hello_interval, "hp_maxjitter < hello_interval"),
            (
                lb + 2 * db + t.hello_interval < t.h_hold_time,
                "LB + 2ΔB + hello_interval < h_hold_time",
            ),
            (lb + db < t.tp_maxjitter, "LB + ΔB < tp_maxjitter"),
            (t.tp_maxjitter < t.tc_interval, "tp_maxjitter < tc_interval"),
            (
                (2 * (lb + db) + 1) * (n - 1) - (lb + 1) + t.tc_interval < t.t_hold_time,
                "(2(LB + ΔB) + 1)(|IP| - 1) - (LB + 1) + tc_interval < t_hold_time",
            ),
            (0 <= t.l_hold_time, "0 ≤ l_hold_time"),
            (0 <= db, "0 ≤ ΔB"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, inequality)) => Err(ConfigError {
                node: self.ip.clone(),
                inequality,
            }),
            None => Ok(()),
        }
    }
}
