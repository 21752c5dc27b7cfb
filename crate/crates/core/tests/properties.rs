mod common;

use std::collections::BTreeSet;

use common::{brute_force_paths, id, random_hood, valid_sets, Flavour};
use olsrv2::checkers::{ground_truth_shortest_paths, symmetric_links};
use olsrv2::messages::{forward_tc_message, make_hello, make_tc, Message};
use olsrv2::neighborhood::{
    choose_fmprs, choose_rmprs, link_status, purge_2hop_set, purge_link_set, valid_fmprs, valid_rmprs,
    LinkSet, LinkTuple, TwoHopSet, TwoHopTuple,
};
use olsrv2::scenario::{parse_scenario, random_connected, render_scenario};
use olsrv2::simnet::{GroundTruth, TopologyEvent};
use olsrv2::topology::ShortestPaths;
use olsrv2::{Metric, NodeId, Status, Time};
use proptest::prelude::*;

const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

fn time() -> impl Strategy<Value = Time> {
    prop_oneof![1 => Just(Time::NegInf), 6 => (0i64..12).prop_map(Time::at)]
}

fn metric() -> impl Strategy<Value = Metric> {
    prop_oneof![1 => Just(Metric::Infinite), 5 => (1u64..9).prop_map(Metric::finite)]
}

fn link_tuple() -> impl Strategy<Value = LinkTuple> {
    (
        0..NAMES.len(),
        (time(), time(), time()),
        any::<[bool; 4]>(),
        (metric(), metric()),
    )
        .prop_map(|(n, (sym, heard, valid), flags, (i, o))| LinkTuple {
            oip: id(NAMES[n]),
            symmetric_time: sym,
            heard_time: heard,
            validity_time: valid,
            fmpr: flags[0],
            rmpr: flags[1],
            fmpr_selector: flags[2],
            rmpr_selector: flags[3],
            in_metric: i,
            out_metric: o,
        })
}

fn link_set() -> impl Strategy<Value = LinkSet> {
    prop::collection::vec(link_tuple(), 0..8).prop_map(|v| v.into_iter().collect())
}

fn two_hop_set() -> impl Strategy<Value = TwoHopSet> {
    prop::collection::vec((0..NAMES.len(), 0..NAMES.len(), time(), metric(), metric()), 0..12).prop_map(|v| {
        v.into_iter()
            .map(|(a, b, vt, i, o)| TwoHopTuple {
                one_hop: id(NAMES[a]),
                two_hop: id(NAMES[b]),
                validity_time: vt,
                in_metric: i,
                out_metric: o,
            })
            .collect()
    })
}

/// Directed weighted graph on up to `n` nodes.
fn graph(n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, u64)>)> {
    (2..=n).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec((0..k, 0..k, 1u64..9), 0..(k * k)),
        )
    })
}

fn node(i: usize) -> NodeId {
    id(&format!("n{i}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn purging_is_idempotent(ls in link_set(), n2s in two_hop_set(), now in 0i64..12) {
        let now = Time::at(now);
        let ls1 = purge_link_set(&ls, now);
        prop_assert_eq!(purge_link_set(&ls1, now), ls1.clone());
        for lt in ls1.iter() {
            prop_assert!(lt.validity_time > now);
            if link_status(lt, now) != Status::Symmetric {
                prop_assert!(!(lt.fmpr || lt.rmpr || lt.fmpr_selector || lt.rmpr_selector));
            }
        }
        let n2 = purge_2hop_set(&ls1, &n2s, now);
        prop_assert_eq!(purge_2hop_set(&ls1, &n2, now), n2.clone());
        for t in n2.iter() {
            prop_assert!(t.validity_time > now);
            prop_assert!(ls1.is_symmetric(&t.one_hop, now));
        }
    }

    #[test]
    fn hello_keys_follow_link_status(ls in link_set(), now in 0i64..12) {
        let now = Time::at(now);
        let h = make_hello(&id("Z"), Time::at(20), &ls, now);
        let oips: BTreeSet<&NodeId> = ls.iter().map(|lt| &lt.oip).collect();
        prop_assert!(h.statuses.keys().eq(oips.iter().copied()));
        for (n, st) in &h.statuses {
            prop_assert_eq!(h.in_metrics.contains_key(n), *st != Status::Lost);
            prop_assert_eq!(h.out_metrics.contains_key(n), *st == Status::Symmetric);
        }
        for n in h.mprs.keys() {
            prop_assert!(h.statuses.contains_key(n));
        }
    }

    #[test]
    fn forwarding_changes_only_the_sender(ls in link_set(), sqn in 0i64..100, ansn in 0i64..100, who in 0..NAMES.len()) {
        let tc = make_tc(&id("Z"), Time::at(30), sqn, ansn, &ls, Time::at(3));
        let fwd = forward_tc_message(&id(NAMES[who]), &Message::Tc(tc.clone())).unwrap();
        let fwd = fwd.as_tc().unwrap();
        prop_assert_eq!(&fwd.sender, &id(NAMES[who]));
        let mut back = fwd.clone();
        back.sender = tc.sender.clone();
        prop_assert_eq!(back, tc);
    }

    #[test]
    fn shortest_paths_match_simple_path_enumeration((n, edges) in graph(6)) {
        let links: Vec<(NodeId, NodeId, u64)> = edges
            .iter()
            .filter(|(a, b, _)| a != b)
            .map(|(a, b, w)| (node(*a), node(*b), *w))
            .collect();
        let sp = ShortestPaths::compute(&node(0), &links);
        let mut expected = brute_force_paths(&links, &node(0));
        expected.remove(&node(0));
        prop_assert_eq!(sp.distances(), expected.clone());
        let routes = sp.canonical_routes();
        prop_assert!(sp.admits(&routes));
        prop_assert_eq!(routes.len(), expected.len());
        prop_assert!(n >= routes.len());
        for (d, r) in &routes {
            prop_assert_eq!(r.metric, Metric::finite(expected[d]));
            let hop = links.iter().filter(|(a, b, _)| *a == node(0) && *b == r.next_hop).map(|l| l.2).min();
            let rest = if r.next_hop == *d {
                Some(0)
            } else {
                brute_force_paths(&links, &r.next_hop).get(d).copied()
            };
            prop_assert_eq!(hop.zip(rest).map(|(h, r)| h + r), Some(expected[d]));
        }
    }

    #[test]
    fn scenario_text_round_trips(seed in 0u64..10_000, n in 2usize..8, events in prop::collection::vec((0i64..300, 0usize..3, 1u64..9), 0..5), flags in any::<[bool; 4]>(), hi in 4i64..17) {
        let mut sc = random_connected(n, 8, seed);
        sc.options.bug_rfc7181 = flags[0];
        sc.options.flood_all = flags[1];
        sc.options.process_tc_from_unknown = flags[2];
        sc.options.reselect_mprs = flags[3];
        sc.overrides.entry(sc.nodes[0].clone()).or_default().insert("hello_interval".into(), hi);
        let (a, b) = (sc.links[0].0.clone(), sc.links[0].1.clone());
        for (t, kind, m) in events {
            let e = match kind {
                0 => TopologyEvent::LinkDown { src: a.clone(), dst: b.clone() },
                1 => TopologyEvent::LinkUp { src: a.clone(), dst: b.clone(), metric: Metric::finite(m) },
                _ => TopologyEvent::MetricChange { src: a.clone(), dst: b.clone(), metric: Metric::finite(m) },
            };
            sc.events.push((t, e));
        }
        let text = render_scenario(&sc);
        prop_assert_eq!(parse_scenario(&text).unwrap(), sc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ground_truth_oracle_matches_path_enumeration((n, edges) in graph(8)) {
        let mut g = GroundTruth::new((0..n).map(node));
        for (a, b, w) in &edges {
            if a != b {
                g.set_link(&node(*a), &node(*b), Metric::finite(*w));
            }
        }
        let links = symmetric_links(&g);
        for i in 0..n {
            let mut expected = brute_force_paths(&links, &node(i));
            expected.remove(&node(i));
            prop_assert_eq!(ground_truth_shortest_paths(&g, &node(i)), expected);
        }
    }

    #[test]
    fn mpr_enumeration_matches_definition(seed in any::<u64>()) {
        let h = random_hood(seed, 6);
        let now = common::NOW;
        let flood: BTreeSet<_> = valid_fmprs(&h.ls, &h.n2s, now).into_iter().collect();
        prop_assert_eq!(&flood, &valid_sets(&h, Flavour::Flooding));
        let all: BTreeSet<NodeId> = h.n1.keys().cloned().collect();
        prop_assert!(flood.contains(&all));
        prop_assert!(flood.contains(&choose_fmprs(&h.ls, &h.n2s, now)));
        for (legacy, flavour) in [(false, Flavour::Routing), (true, Flavour::RoutingLegacy)] {
            let route: BTreeSet<_> = valid_rmprs(&h.ls, &h.n2s, now, legacy).into_iter().collect();
            prop_assert_eq!(&route, &valid_sets(&h, flavour));
            prop_assert!(route.contains(&all));
            prop_assert!(route.contains(&choose_rmprs(&h.ls, &h.n2s, now, legacy)));
        }
    }

    #[test]
    fn chosen_mprs_are_inclusion_minimal(seed in any::<u64>()) {
        let h = random_hood(seed, 6);
        let now = common::NOW;
        let chosen = choose_fmprs(&h.ls, &h.n2s, now);
        let valid = valid_sets(&h, Flavour::Flooding);
        for x in &chosen {
            let mut smaller = chosen.clone();
            smaller.remove(x);
            prop_assert!(!valid.contains(&smaller));
        }
    }
}
