//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! node <id>
//! param <name> <int> [<id>]
//! link <src> <dst> <metric> [bidi <metric>]
//! at <tick> linkup|metric <src> <dst> <metric> [bidi <metric>]
//! at <tick> linkdown <src> <dst> [bidi]
//! flag <name> on|off
//! offset <id> hello <t> tc <t>
//! ```
//!
//! Timing parameters may carry a trailing node id to override the global
//! value for that node. `seed` and `ticks` are run settings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{ProtocolOptions, RouterConfig, StartOffsets, Timing};
use crate::error::{NetworkError, ParseError};
use crate::simnet::{build_network, Network, NetworkSpec, NodeSpec, TopologyEvent};
use crate::types::{Metric, NodeId};

const TIMING_PARAMS: [&str; 7] = [
    "hp_maxjitter",
    "tp_maxjitter",
    "h_hold_time",
    "t_hold_time",
    "l_hold_time",
    "hello_interval",
    "tc_interval",
];

const FLAGS: [&str; 4] = ["bug_rfc7181", "flood_all", "process_tc_from_unknown", "reselect_mprs"];

fn timing_field<'a>(t: &'a mut Timing, name: &str) -> Option<&'a mut i64> {
    Some(match name {
        "hp_maxjitter" => &mut t.hp_maxjitter,
        "tp_maxjitter" => &mut t.tp_maxjitter,
        "h_hold_time" => &mut t.h_hold_time,
        "t_hold_time" => &mut t.t_hold_time,
        "l_hold_time" => &mut t.l_hold_time,
        "hello_interval" => &mut t.hello_interval,
        "tc_interval" => &mut t.tc_interval,
        _ => return None,
    })
}

fn timing_value(t: &Timing, name: &str) -> i64 {
    let mut copy = *t;
    *timing_field(&mut copy, name).expect("known timing parameter")
}

fn flag_field<'a>(o: &'a mut ProtocolOptions, name: &str) -> Option<&'a mut bool> {
    Some(match name {
        "bug_rfc7181" => &mut o.bug_rfc7181,
        "flood_all" => &mut o.flood_all,
        "process_tc_from_unknown" => &mut o.process_tc_from_unknown,
        "reselect_mprs" => &mut o.reselect_mprs,
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub lb: i64,
    pub delta_b: i64,
    pub seed: u64,
    pub ticks: u64,
    pub timing: Timing,
    /// Per-node timing overrides.
    pub overrides: BTreeMap<NodeId, BTreeMap<String, i64>>,
    pub options: ProtocolOptions,
    pub nodes: Vec<NodeId>,
    pub links: Vec<(NodeId, NodeId, Metric)>,
    pub events: Vec<(i64, TopologyEvent)>,
    pub offsets: BTreeMap<NodeId, StartOffsets>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            lb: 1,
            delta_b: 1,
            seed: 0,
            ticks: 400,
            timing: Timing::default(),
            overrides: BTreeMap::new(),
            options: ProtocolOptions::default(),
            nodes: Vec::new(),
            links: Vec::new(),
            events: Vec::new(),
            offsets: BTreeMap::new(),
        }
    }
}

impl Scenario {
    /// Timing for `node` after overrides.
    pub fn timing_for(&self, node: &NodeId) -> Timing {
        let mut t = self.timing;
        for (name, v) in self.overrides.get(node).into_iter().flatten() {
            if let Some(f) = timing_field(&mut t, name) {
                *f = *v;
            }
        }
        t
    }

    pub fn network_spec(&self) -> NetworkSpec {
        let mut spec = NetworkSpec::new(self.lb, self.delta_b, self.seed);
        spec.nodes = self
            .nodes
            .iter()
            .map(|n| NodeSpec {
                config: RouterConfig {
                    ip: n.clone(),
                    timing: self.timing_for(n),
                    options: self.options,
                },
                offsets: self.offsets.get(n).copied(),
            })
            .collect();
        spec.links = self.links.clone();
        spec.events = self.events.clone();
        spec
    }

    pub fn build(&self) -> Result<Network, NetworkError> {
        build_network(&self.network_spec())
    }

    /// Largest `tc_interval + tp_maxjitter` over all nodes.
    pub fn default_window(&self) -> i64 {
        self.nodes
            .iter()
            .map(|n| {
                let t = self.timing_for(n);
                t.tc_interval + t.tp_maxjitter
            })
            .max()
            .unwrap_or(self.timing.tc_interval + self.timing.tp_maxjitter)
    }
}

fn parse_int<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::new(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("bad {what} {tok:?}")))
}

fn parse_metric(line: usize, tok: Option<&str>) -> Result<Metric, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::new(line, "missing metric"))?;
    tok.parse::<u64>()
        .ok()
        .and_then(Metric::new)
        .ok_or_else(|| ParseError::new(line, format!("metric must be a positive integer, got {tok:?}")))
}

fn parse_id(line: usize, tok: Option<&str>) -> Result<NodeId, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::new(line, "missing node id"))?;
    if NodeId::is_valid(tok) {
        Ok(NodeId::new(tok))
    } else {
        Err(ParseError::new(line, format!("bad node id {tok:?}")))
    }
}

/// `[bidi <metric>]`; `Ok(None)` when absent.
fn parse_bidi(line: usize, toks: &mut std::str::SplitWhitespace<'_>, with_metric: bool) -> Result<Option<Option<Metric>>, ParseError> {
    match toks.next() {
        None => Ok(None),
        Some("bidi") if with_metric => Ok(Some(Some(parse_metric(line, toks.next())?))),
        Some("bidi") => Ok(Some(None)),
        Some(other) => Err(ParseError::new(line, format!("unexpected {other:?}"))),
    }
}

fn no_more(line: usize, toks: &mut std::str::SplitWhitespace<'_>) -> Result<(), ParseError> {
    match toks.next() {
        None => Ok(()),
        Some(t) => Err(ParseError::new(line, format!("unexpected {t:?}"))),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut sc = Scenario::default();
    let mut declared = BTreeSet::new();
    let mut references: Vec<(usize, NodeId)> = Vec::new();
    let mut lines = ParamLines::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(head) = toks.next() else { continue };
        match head {
            "node" => {
                let id = parse_id(line, toks.next())?;
                if !declared.insert(id.clone()) {
                    return Err(ParseError::new(line, format!("duplicate node {id}")));
                }
                sc.nodes.push(id);
            }
            "param" => {
                let name = toks
                    .next()
                    .ok_or_else(|| ParseError::new(line, "missing parameter name"))?;
                let value: i64 = parse_int(line, toks.next(), "parameter value")?;
                let node = toks.next().map(|t| parse_id(line, Some(t))).transpose()?;
                no_more(line, &mut toks)?;
                match &node {
                    Some(id) => lines.per_node.insert((id.clone(), name.to_string()), line),
                    None => lines.global.insert(name.to_string(), line),
                };
                match (name, node) {
                    (_, Some(id)) if TIMING_PARAMS.contains(&name) => {
                        references.push((line, id.clone()));
                        sc.overrides.entry(id).or_default().insert(name.to_string(), value);
                    }
                    (_, Some(_)) => {
                        return Err(ParseError::new(line, format!("{name} cannot be set per node")))
                    }
                    ("lb", None) => sc.lb = value,
                    ("delta_b", None) => sc.delta_b = value,
                    ("seed" | "ticks", None) if value < 0 => {
                        return Err(ParseError::new(line, format!("{name} must be nonnegative")))
                    }
                    ("seed", None) => sc.seed = value as u64,
                    ("ticks", None) => sc.ticks = value as u64,
                    (_, None) => match timing_field(&mut sc.timing, name) {
                        Some(f) => *f = value,
                        None => return Err(ParseError::new(line, format!("unknown parameter {name:?}"))),
                    },
                }
            }
            "link" => {
                let src = parse_id(line, toks.next())?;
                let dst = parse_id(line, toks.next())?;
                let m = parse_metric(line, toks.next())?;
                let back = parse_bidi(line, &mut toks, true)?;
                no_more(line, &mut toks)?;
                references.push((line, src.clone()));
                references.push((line, dst.clone()));
                if src == dst {
                    return Err(ParseError::new(line, format!("self link on {src}")));
                }
                sc.links.push((src.clone(), dst.clone(), m));
                if let Some(Some(bm)) = back {
                    sc.links.push((dst, src, bm));
                }
            }
            "at" => {
                let tick: i64 = parse_int(line, toks.next(), "tick")?;
                if tick < 0 {
                    return Err(ParseError::new(line, "tick must be nonnegative"));
                }
                let kind = toks
                    .next()
                    .ok_or_else(|| ParseError::new(line, "missing event kind"))?;
                let src = parse_id(line, toks.next())?;
                let dst = parse_id(line, toks.next())?;
                references.push((line, src.clone()));
                references.push((line, dst.clone()));
                match kind {
                    "linkup" | "metric" => {
                        let m = parse_metric(line, toks.next())?;
                        let back = parse_bidi(line, &mut toks, true)?;
                        let make = |src: NodeId, dst: NodeId, metric: Metric| {
                            if kind == "linkup" {
                                TopologyEvent::LinkUp { src, dst, metric }
                            } else {
                                TopologyEvent::MetricChange { src, dst, metric }
                            }
                        };
                        sc.events.push((tick, make(src.clone(), dst.clone(), m)));
                        if let Some(Some(bm)) = back {
                            sc.events.push((tick, make(dst, src, bm)));
                        }
                    }
                    "linkdown" => {
                        let back = parse_bidi(line, &mut toks, false)?;
                        sc.events.push((tick, TopologyEvent::LinkDown { src: src.clone(), dst: dst.clone() }));
                        if back.is_some() {
                            sc.events.push((tick, TopologyEvent::LinkDown { src: dst, dst: src }));
                        }
                    }
                    other => return Err(ParseError::new(line, format!("unknown event {other:?}"))),
                }
                no_more(line, &mut toks)?;
            }
            "flag" => {
                let name = toks.next().ok_or_else(|| ParseError::new(line, "missing flag name"))?;
                let value = match toks.next() {
                    Some("on") => true,
                    Some("off") => false,
                    other => return Err(ParseError::new(line, format!("flag value must be on or off, got {other:?}"))),
                };
                no_more(line, &mut toks)?;
                *flag_field(&mut sc.options, name)
                    .ok_or_else(|| ParseError::new(line, format!("unknown flag {name:?}")))? = value;
            }
            "offset" => {
                let id = parse_id(line, toks.next())?;
                if toks.next() != Some("hello") {
                    return Err(ParseError::new(line, "expected `hello`"));
                }
                let hello_time = parse_int(line, toks.next(), "hello offset")?;
                if toks.next() != Some("tc") {
                    return Err(ParseError::new(line, "expected `tc`"));
                }
                let tc_time = parse_int(line, toks.next(), "tc offset")?;
                no_more(line, &mut toks)?;
                references.push((line, id.clone()));
                lines.offsets.insert(id.clone(), line);
                sc.offsets.insert(id, StartOffsets { hello_time, tc_time });
            }
            other => return Err(ParseError::new(line, format!("unknown directive {other:?}"))),
        }
    }
    if let Some((line, id)) = references.into_iter().find(|(_, id)| !declared.contains(id)) {
        return Err(ParseError::new(line, format!("unknown node {id}")));
    }
    lines.last = text.lines().count();
    lines.last_node = text
        .lines()
        .enumerate()
        .filter(|(_, l)| l.split_whitespace().next() == Some("node"))
        .map(|(i, _)| i + 1)
        .last()
        .unwrap_or(lines.last);
    validate(&sc, &lines)?;
    Ok(sc)
}

/// Where each parameter was last set, for error reporting.
#[derive(Default)]
struct ParamLines {
    global: BTreeMap<String, usize>,
    per_node: BTreeMap<(NodeId, String), usize>,
    offsets: BTreeMap<NodeId, usize>,
    last_node: usize,
    last: usize,
}

/// Parameters mentioned in an inequality, by their symbol in it.
const SYMBOLS: [(&str, &str); 9] = [
    ("LB", "lb"),
    ("ΔB", "delta_b"),
    ("hp_maxjitter", "hp_maxjitter"),
    ("tp_maxjitter", "tp_maxjitter"),
    ("h_hold_time", "h_hold_time"),
    ("t_hold_time", "t_hold_time"),
    ("l_hold_time", "l_hold_time"),
    ("hello_interval", "hello_interval"),
    ("tc_interval", "tc_interval"),
];

fn validate(sc: &Scenario, lines: &ParamLines) -> Result<(), ParseError> {
    let net = sc.network_spec().params();
    for n in &sc.nodes {
        let cfg = RouterConfig {
            ip: n.clone(),
            timing: sc.timing_for(n),
            options: sc.options,
        };
        if let Err(e) = cfg.validate(&net) {
            let mut line = SYMBOLS
                .iter()
                .filter(|(sym, _)| e.inequality.contains(sym))
                .filter_map(|(_, name)| {
                    lines
                        .per_node
                        .get(&(n.clone(), name.to_string()))
                        .or_else(|| lines.global.get(*name))
                })
                .max()
                .copied();
            if e.inequality.contains("|IP|") {
                line = line.max(Some(lines.last_node));
            }
            return Err(ParseError::new(
                line.unwrap_or(lines.last),
                format!("node {n} violates {}", e.inequality),
            ));
        }
        if let Some(o) = sc.offsets.get(n) {
            let t = cfg.timing;
            let bad = if !(0..=t.hello_interval).contains(&o.hello_time) {
                Some("now ≤ hello_time ≤ now + hello_interval")
            } else if !(0..=t.tc_interval).contains(&o.tc_time) {
                Some("now ≤ tc_time ≤ now + tc_interval")
            } else {
                None
            };
            if let Some(inequality) = bad {
                return Err(ParseError::new(lines.offsets[n], format!("node {n} violates {inequality}")));
            }
        }
    }
    Ok(())
}

/// Canonical text for `sc`; parsing it yields `sc` again.
pub fn render_scenario(sc: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "param lb {}", sc.lb);
    let _ = writeln!(out, "param delta_b {}", sc.delta_b);
    for name in TIMING_PARAMS {
        let _ = writeln!(out, "param {name} {}", timing_value(&sc.timing, name));
    }
    let _ = writeln!(out, "param seed {}", sc.seed);
    let _ = writeln!(out, "param ticks {}", sc.ticks);
    for name in FLAGS {
        let mut o = sc.options;
        let on = *flag_field(&mut o, name).expect("known flag");
        let _ = writeln!(out, "flag {name} {}", if on { "on" } else { "off" });
    }
    for n in &sc.nodes {
        let _ = writeln!(out, "node {n}");
    }
    for (n, params) in &sc.overrides {
        for (name, v) in params {
            let _ = writeln!(out, "param {name} {v} {n}");
        }
    }
    for (n, o) in &sc.offsets {
        let _ = writeln!(out, "offset {n} hello {} tc {}", o.hello_time, o.tc_time);
    }
    for (s, d, m) in &sc.links {
        let _ = writeln!(out, "link {s} {d} {m}");
    }
    for (t, e) in &sc.events {
        let _ = writeln!(out, "at {t} {e}");
    }
    out
}

/// A random connected topology of `n` nodes where every link exists in
/// both directions, each direction with its own metric in `1..=max_metric`.
pub fn random_connected(n: usize, max_metric: u64, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<NodeId> = (0..n).map(|i| NodeId::new(&format!("n{i}"))).collect();
    let mut order = nodes.clone();
    order.shuffle(&mut rng);
    let mut pairs = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i].clone(), order[j].clone());
        pairs.insert(if a < b { (a, b) } else { (b, a) });
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            let (a, b) = (nodes[a.min(b)].clone(), nodes[a.max(b)].clone());
            pairs.insert((a, b));
        }
    }
    let mut links = Vec::new();
    for (a, b) in pairs {
        links.push((a.clone(), b.clone(), Metric::finite(rng.gen_range(1..=max_metric))));
        links.push((b, a, Metric::finite(rng.gen_range(1..=max_metric))));
    }
    Scenario {
        seed,
        nodes,
        links,
        ..Scenario::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# diamond
node A
node B
node C # trailing comment
param hello_interval 12
param hp_maxjitter 4 B
link A B 1 bidi 3
link B C 2
flag flood_all on
offset A hello 3 tc 9
at 40 linkdown A B bidi
at 50 metric B C 7
";

    #[test]
    fn parses_directives() {
        let sc = parse_scenario(SAMPLE).unwrap();
        assert_eq!(sc.nodes.len(), 3);
        assert_eq!(sc.links.len(), 3);
        assert_eq!(sc.links[1], (NodeId::from("B"), NodeId::from("A"), Metric::finite(3)));
        assert_eq!(sc.timing.hello_interval, 12);
        assert_eq!(sc.timing_for(&NodeId::from("B")).hp_maxjitter, 4);
        assert_eq!(sc.timing_for(&NodeId::from("A")).hp_maxjitter, 3);
        assert!(sc.options.flood_all && !sc.options.bug_rfc7181);
        assert_eq!(sc.events.len(), 3);
        assert_eq!(sc.offsets[&NodeId::from("A")], StartOffsets { hello_time: 3, tc_time: 9 });
    }

    #[test]
    fn round_trips() {
        let sc = parse_scenario(SAMPLE).unwrap();
        assert_eq!(parse_scenario(&render_scenario(&sc)).unwrap(), sc);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_scenario("node A\nnode B\nlink A B 0\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("positive"));
        assert_eq!(parse_scenario("node A\nlink A Z 1\n").unwrap_err().line, 2);
        assert_eq!(parse_scenario("node A\nnode A\n").unwrap_err().line, 2);
        assert_eq!(parse_scenario("\n\nbogus\n").unwrap_err().line, 3);
        assert_eq!(parse_scenario("flag nope on\n").unwrap_err().line, 1);
        assert_eq!(parse_scenario("param seed 1 A\n").unwrap_err().line, 1);
    }

    #[test]
    fn rejects_timing_violations_by_name() {
        let err = parse_scenario("param lb 2\nparam hp_maxjitter 2\nparam delta_b 1\nnode A\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("LB + ΔB < hp_maxjitter"), "{err}");
        let err = parse_scenario("node A\nparam tc_interval 70 A\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("t_hold_time"), "{err}");
        let err = parse_scenario("node A\noffset A hello 11 tc 0\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("hello_time"));
    }

    #[test]
    fn random_topologies_are_connected_and_bidirectional() {
        for seed in 0..50 {
            let sc = random_connected(7, 8, seed);
            let mut seen = BTreeSet::from([sc.nodes[0].clone()]);
            let mut frontier = vec![sc.nodes[0].clone()];
            while let Some(x) = frontier.pop() {
                for (s, d, _) in &sc.links {
                    if *s == x && seen.insert(d.clone()) {
                        frontier.push(d.clone());
                    }
                }
            }
            assert_eq!(seen.len(), 7);
            for (s, d, _) in &sc.links {
                assert!(sc.links.iter().any(|(a, b, _)| a == d && b == s));
            }
        }
    }
}
