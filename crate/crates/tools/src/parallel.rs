//! Seed-parallel replication. Results always come back in seed order, and
//! every seed's draws are fixed by the seed alone, so the output does not
//! depend on the thread count.

use rateq_core::dists::Environment;
use rateq_core::policy::PolicySpec;
use rateq_core::sim::{run, SimConfig, Trajectory};
use rayon::prelude::*;

use crate::error::{CliError, Result};

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))
}

/// One trajectory per seed.
pub fn replicate(
    env: &Environment,
    policy: &PolicySpec,
    cfg: &SimConfig,
    seeds: &[u64],
    threads: usize,
) -> Result<Vec<Trajectory>> {
    let cells = [(env.clone(), *policy)];
    Ok(run_cells(&cells, cfg, seeds, threads)?
        .pop()
        .unwrap_or_default())
}

/// Every `(environment, policy)` cell against every seed, flattened into one
/// work queue. Returns trajectories grouped by cell, in seed order.
pub fn run_cells(
    cells: &[(Environment, PolicySpec)],
    cfg: &SimConfig,
    seeds: &[u64],
    threads: usize,
) -> Result<Vec<Vec<Trajectory>>> {
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
        .collect();
    let flat: Vec<Trajectory> = pool(threads)?.install(|| {
        jobs.par_iter()
            .map(|&(c, seed)| {
                let (env, spec) = &cells[c];
                let mut policy = spec.build(env)?;
                Ok(run(env, policy.as_mut(), cfg, seed)?)
            })
            .collect::<Result<_>>()
    })?;
    let mut it = flat.into_iter();
    Ok(cells
        .iter()
        .map(|_| it.by_ref().take(seeds.len()).collect())
        .collect())
}
