//! Optimal single active spare for the bridge with exponential components.

use rayon::prelude::*;
use serde::Serialize;

use rapsig_core::engine::{optimal_allocation, RedundancyKind};
use rapsig_core::lifetimes::LifetimeDistribution;
use rapsig_core::CoherentSystem;

use crate::error::CliResult;
use crate::settings::Settings;

/// Component rates `λ₁..λ₅`, spare rate and the published optimal components.
pub struct Row {
    pub rates: [f64; 5],
    pub spare: f64,
    pub expected: &'static [usize],
}

pub const ROWS: [Row; 12] = [
    Row { rates: [1.0, 1.0, 1.0, 2.0, 2.0], spare: 1.5, expected: &[4] },
    Row { rates: [1.0, 1.0, 1.5, 2.0, 2.0], spare: 1.5, expected: &[4] },
    Row { rates: [1.0, 1.0, 2.0, 2.0, 2.0], spare: 1.5, expected: &[4] },
    Row { rates: [1.0, 1.0, 1.0, 2.0, 2.0], spare: 1.0, expected: &[4] },
    Row { rates: [1.0, 1.0, 1.0, 2.0, 2.0], spare: 1.5, expected: &[4] },
    Row { rates: [1.0, 1.0, 1.0, 2.0, 2.0], spare: 2.0, expected: &[4] },
    Row { rates: [1.0, 2.0, 1.0, 1.0, 2.0], spare: 1.5, expected: &[2] },
    Row { rates: [1.0, 2.0, 1.5, 1.0, 2.0], spare: 1.5, expected: &[2] },
    Row { rates: [1.0, 2.0, 2.0, 1.0, 2.0], spare: 1.5, expected: &[2] },
    Row { rates: [2.0, 1.0, 1.0, 1.0, 2.0], spare: 1.5, expected: &[2] },
    Row { rates: [2.0, 1.0, 1.0, 2.0, 1.0], spare: 1.5, expected: &[1, 4] },
    Row { rates: [3.0, 1.0, 1.0, 2.0, 1.0], spare: 1.5, expected: &[1] },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowResult {
    pub row: usize,
    pub rates: [f64; 5],
    pub spare: f64,
    pub expected: Vec<usize>,
    pub chosen: Vec<usize>,
    pub basis: &'static str,
    /// Targets st-larger than every alternative on the grid (may be empty).
    pub st_dominant: Vec<usize>,
    /// Targets within the tie tolerance of the largest MTTF.
    pub mttf_best: Vec<usize>,
    pub mttfs: Vec<Option<f64>>,
    pub matches: bool,
    /// The st-on-grid and MTTF rules disagree.
    pub basis_sensitive: bool,
}

pub fn run_row(index: usize, row: &Row, settings: &Settings) -> CliResult<RowResult> {
    let exp = LifetimeDistribution::exponential;
    let marginals = row.rates.iter().map(|&r| exp(r)).collect::<Result<Vec<_>, _>>()?;
    let spare = exp(row.spare)?;
    let grid = settings.grid(marginals.iter().chain([&spare]))?;
    let base = CoherentSystem::bridge();
    let opt = optimal_allocation(
        &base,
        &marginals,
        &spare,
        RedundancyKind::Active,
        None,
        &settings.eval,
        Some(&grid),
        settings.tol,
    )?;
    let st_dominant: Vec<usize> = opt.candidates.iter().filter(|c| c.dominant).map(|c| c.target).collect();
    let mttfs: Vec<Option<f64>> = opt.candidates.iter().map(|c| c.mttf).collect();
    let mttf_best = if mttfs.iter().all(Option::is_some) {
        let top = mttfs.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        opt.candidates.iter().filter(|c| top - c.mttf.unwrap() < settings.tol).map(|c| c.target).collect()
    } else {
        Vec::new()
    };
    let basis_sensitive = st_dominant != mttf_best;
    Ok(RowResult {
        row: index + 1,
        rates: row.rates,
        spare: row.spare,
        expected: row.expected.to_vec(),
        matches: opt.best == row.expected,
        chosen: opt.best,
        basis: opt.basis.name(),
        st_dominant,
        mttf_best,
        mttfs,
        basis_sensitive,
    })
}

/// All rows, evaluated concurrently and returned in table order.
pub fn run(settings: &Settings) -> CliResult<Vec<RowResult>> {
    ROWS.par_iter().enumerate().map(|(i, r)| run_row(i, r, settings)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row() {
        let r = run_row(0, &ROWS[0], &Settings::default()).unwrap();
        assert_eq!(r.chosen, vec![4]);
        assert!(r.matches);
        assert!((r.mttfs[3].unwrap() - 0.77376904).abs() < 1e-6);
        assert_eq!(r.basis, "st-dominance-on-grid");
        assert!(!r.basis_sensitive);
    }

    #[test]
    fn tie_row() {
        let r = run_row(10, &ROWS[10], &Settings::default()).unwrap();
        assert_eq!(r.chosen, vec![1, 4]);
        assert!(r.matches);
    }
}
