//! Deterministic discrete-time OLSRv2 routers and network simulator.
//!
//! Routers are modelled as pure state plus the procedures that update it:
//! neighbourhood discovery from HELLOs ([`neighborhood`]), topology
//! dissemination through flooded TCs ([`topology`], [`message_logs`]) and a
//! per-tick step policy ([`engine`]). [`simnet`] places routers on a
//! directed metric graph with bounded transmission delays, and
//! [`checkers`] compares the routes they settle on against an independent
//! shortest-path oracle.
//!
//! # Example
//!
//! ```
//! use olsrv2::scenario::parse_scenario;
//! use olsrv2::checkers::check_route_optimality;
//!
//! let sc = parse_scenario("node A\nnode B\nlink A B 2 bidi 3\nparam ticks 80\n").unwrap();
//! let mut net = sc.build().unwrap();
//! net.run(sc.ticks);
//! assert!(check_route_optimality(&net).iter().all(|r| r.verdict));
//! ```

pub mod checkers;
pub mod demos;
pub mod engine;
pub mod error;
pub mod message_logs;
pub mod messages;
pub mod neighborhood;
pub mod scenario;
pub mod simnet;
pub mod sweep;
pub mod topology;
pub mod types;

pub use error::{ConfigError, ContractError, NetworkError, ParseError};
pub use types::{Metric, MprRole, NodeId, Sqn, Status, Time};
