//! Batch runs over many scenarios or seeds. Each simulation is sequential;
//! independent runs are spread over threads when the `parallel` feature is
//! on.

use crate::checkers::{
    check_route_optimality, consistency_stats, run_to_convergence_observed, ConsistencyStats,
    ConvergenceOptions, OptimalityReport, Regression, SymmetryMonitor,
};
use crate::error::NetworkError;
use crate::scenario::Scenario;

/// Maps `f` over `items` on the calling thread.
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Maps `f` over `items` on the rayon pool, preserving order.
#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// [`map_parallel`] when available, else [`map_sequential`].
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub seed: u64,
    pub nodes: usize,
    pub converged_at: Option<i64>,
    pub ticks_run: i64,
    pub reports: Vec<OptimalityReport>,
    pub stats: ConsistencyStats,
    pub regressions: Vec<Regression>,
}

impl RunSummary {
    /// Converged with every routing set optimal.
    pub fn optimal(&self) -> bool {
        self.converged_at.is_some() && self.reports.iter().all(|r| r.verdict)
    }
}

/// Runs `sc` until convergence (or `max_ticks`, when given) and checks
/// the routing sets, the consistency counters and link stability.
pub fn check_scenario(sc: &Scenario, window: Option<i64>, max_ticks: Option<u64>) -> Result<RunSummary, NetworkError> {
    let mut net = sc.build()?;
    let mut opts = ConvergenceOptions::for_network(&net);
    if let Some(w) = window {
        opts.window = w;
    }
    if let Some(m) = max_ticks {
        opts.max_ticks = m;
    }
    let mut monitor = SymmetryMonitor::default();
    let run = run_to_convergence_observed(&mut net, opts, |n, _| monitor.observe(n));
    Ok(RunSummary {
        seed: sc.seed,
        nodes: sc.nodes.len(),
        converged_at: run.converged_at,
        ticks_run: net.clock(),
        reports: check_route_optimality(&net),
        stats: consistency_stats(&net),
        regressions: monitor.regressions,
    })
}

/// [`check_scenario`] for every scenario in `scs`.
pub fn check_all(scs: &[Scenario], window: Option<i64>) -> Vec<Result<RunSummary, NetworkError>> {
    map(scs, |sc| check_scenario(sc, window, None))
}

/// [`check_scenario`] for `sc` under each seed in `seeds`.
pub fn check_seeds(sc: &Scenario, seeds: &[u64], window: Option<i64>) -> Vec<Result<RunSummary, NetworkError>> {
    let scs: Vec<Scenario> = seeds
        .iter()
        .map(|s| Scenario { seed: *s, ..sc.clone() })
        .collect();
    check_all(&scs, window)
}
