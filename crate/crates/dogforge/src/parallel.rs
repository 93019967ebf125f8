//! Sweep evaluation over a rayon pool, merged in axis order.

use dogforge_core::bench::{AxisKind, FidelitySweep, SweepSeries, SweepTarget};
use dogforge_core::Error;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "DOGFORGE_THREADS";

/// Worker count from `DOGFORGE_THREADS`, or rayon's default when unset.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!(
                "{THREADS_ENV}={v:?} is not a positive integer"
            ))),
        },
    }
}

/// Same result as `bench::sweep`, with cells evaluated concurrently.
pub fn par_sweep(
    targets: &[SweepTarget],
    axis: AxisKind,
    values: &[f64],
    threads: Option<usize>,
) -> CliResult<FidelitySweep> {
    if targets.is_empty() {
        return Err(Error::Empty("design list").into());
    }
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    let pool = b
        .build()
        .map_err(|e| CliError::precondition(e.to_string()))?;
    let m = values.len();
    let cells: Vec<(usize, usize)> = (0..targets.len())
        .flat_map(|i| (0..m).map(move |k| (i, k)))
        .collect();
    let out: Vec<((usize, usize), f64)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, k)| targets[i].fidelity(axis, values[k]).map(|f| ((i, k), f)))
            .collect::<Result<Vec<_>, Error>>()
    })?;
    let mut grid = vec![vec![0.0; m]; targets.len()];
    for ((i, k), f) in out {
        grid[i][k] = f;
    }
    let series = targets
        .iter()
        .zip(grid)
        .map(|(t, fidelities)| SweepSeries {
            label: t.label.clone(),
            fidelities,
        })
        .collect();
    Ok(FidelitySweep::new(axis, values.to_vec(), series)?)
}
