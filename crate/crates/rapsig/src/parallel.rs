//! Thread-parallel Monte Carlo over the chunked seed streams of the core
//! sampler. Chunk counts are integers, so the merged estimate is identical to
//! the sequential one whatever the schedule.

use rayon::prelude::*;

use rapsig_core::montecarlo::{check_config, Counts, McConfig, McEstimate, SystemSampler};
use rapsig_core::Result;

pub fn estimate(sampler: &SystemSampler, config: &McConfig, times: &[f64]) -> Result<McEstimate> {
    check_config(config)?;
    let parts = (0..config.chunks())
        .into_par_iter()
        .map(|c| sampler.run_chunk(config, c, times))
        .collect::<Result<Vec<_>>>()?;
    let total = parts.iter().fold(Counts::zero(times.len()), |acc, c| acc.merge(c));
    Ok(McEstimate::from_counts(times, &total))
}
