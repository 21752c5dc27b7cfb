use std::fs;
use std::io::{self, Write};
use std::ops::Range;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use olsrv2::demos::{fig1, fig2, fig3};
use olsrv2::scenario::{parse_scenario, Scenario};
use olsrv2::simnet::render_trace;
use olsrv2::sweep::{check_scenario, map};

const EXIT_VERDICT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "olsrv2-sim", version, about = "Deterministic OLSRv2 network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario for a fixed number of ticks and write its trace.
    Run {
        #[command(flatten)]
        common: Common,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run to convergence and compare every routing set with shortest paths.
    Check {
        #[command(flatten)]
        common: Common,
        /// Ticks without route changes required for convergence.
        #[arg(long)]
        window: Option<i64>,
        /// Check every seed in `a..b` instead of a single run.
        #[arg(long, value_parser = parse_range)]
        seeds: Option<Range<u64>>,
    },
    /// Run one of the bundled example networks.
    Demo {
        name: DemoName,
        #[arg(long)]
        bug_rfc7181: bool,
        #[arg(long)]
        flood_all: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Tick budget; defaults to the scenario's `ticks`. For `check` this
    /// bounds the search for convergence.
    #[arg(long)]
    ticks: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bug_rfc7181: bool,
    #[arg(long)]
    flood_all: bool,
}

fn parse_range(s: &str) -> Result<Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let a: u64 = a.parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: u64 = b.parse().map_err(|_| format!("bad range end {b:?}"))?;
    if a >= b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..b)
}

fn load(common: &Common) -> Result<Scenario, String> {
    let path = common.scenario.display();
    let text = fs::read_to_string(&common.scenario).map_err(|e| format!("{path}: {e}"))?;
    let mut sc = parse_scenario(&text).map_err(|e| format!("{path}: {e}"))?;
    if let Some(s) = common.seed {
        sc.seed = s;
    }
    if let Some(t) = common.ticks {
        sc.ticks = t;
    }
    sc.options.bug_rfc7181 |= common.bug_rfc7181;
    sc.options.flood_all |= common.flood_all;
    Ok(sc)
}

fn run(common: &Common, trace: Option<&PathBuf>) -> Result<u8, String> {
    let sc = load(common)?;
    let mut net = sc.build().map_err(|e| e.to_string())?;
    let text = render_trace(&net.run(sc.ticks));
    match trace {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())?,
    }
    Ok(0)
}

fn check(common: &Common, window: Option<i64>, seeds: Option<Range<u64>>) -> Result<u8, String> {
    let sc = load(common)?;
    let seeds: Vec<u64> = seeds.map_or_else(|| vec![sc.seed], |r| r.collect());
    let runs: Vec<Scenario> = seeds.iter().map(|s| Scenario { seed: *s, ..sc.clone() }).collect();
    let mut code = 0;
    for result in map(&runs, |r| check_scenario(r, window, Some(r.ticks))) {
        let summary = result.map_err(|e| e.to_string())?;
        match summary.converged_at {
            Some(t) => println!("seed={} converged_at={t}", summary.seed),
            None => {
                println!("seed={} converged_at=none ticks={}", summary.seed, summary.ticks_run);
                code = EXIT_NO_CONVERGENCE;
            }
        }
        for r in &summary.reports {
            println!("{r}");
        }
        if code == 0 && !summary.optimal() {
            code = EXIT_VERDICT_FALSE;
        }
    }
    Ok(code)
}

fn demo(name: DemoName, bug: bool, flood_all: bool) -> u8 {
    match name {
        DemoName::Fig1 => {
            let out = fig1(flood_all);
            println!("{out}");
            if out.flood.is_none() {
                EXIT_NO_CONVERGENCE
            } else {
                0
            }
        }
        DemoName::Fig2 => {
            let out = fig2();
            print!("{out}");
            if out.ok() {
                0
            } else {
                EXIT_VERDICT_FALSE
            }
        }
        DemoName::Fig3 => {
            let runs = if bug { vec![fig3(true), fig3(false)] } else { vec![fig3(false), fig3(true)] };
            println!("{:<12} {:<10} {:<24} verdict", "bug_rfc7181", "D.rmprs", "S->D");
            for o in &runs {
                let rmprs: Vec<&str> = o.d_routing_mprs.iter().map(|n| n.as_str()).collect();
                let route = o
                    .s_route_to_d
                    .as_ref()
                    .map_or("none".to_string(), |r| format!("via {} m={}", r.next_hop, r.metric));
                println!("{:<12} {:<10} {:<24} {}", o.bug, format!("{{{}}}", rmprs.join(",")), route, o.verdict());
            }
            for o in &runs {
                print!("{o}");
            }
            if runs.iter().any(|o| o.converged_at.is_none()) {
                EXIT_NO_CONVERGENCE
            } else {
                0
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, trace } => run(common, trace.as_ref()),
        Command::Check { common, window, seeds } => check(common, *window, seeds.clone()),
        Command::Demo { name, bug_rfc7181, flood_all } => Ok(demo(*name, *bug_rfc7181, *flood_all)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
