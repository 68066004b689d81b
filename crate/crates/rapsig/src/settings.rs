//! Run settings shared by the commands.

use rapsig_core::engine::{EvalConfig, MTTF_TIE_TOL};
use rapsig_core::grid::{TimeGrid, DEFAULT_FIRST, DEFAULT_POINTS, TAIL_LEVEL};
use rapsig_core::lifetimes::LifetimeDistribution;
use rapsig_core::montecarlo::McConfig;

use crate::error::{CliError, CliResult};

/// Largest default grid end; heavy tails would otherwise reach ~1e8.
pub const T_CAP: f64 = 1e7;

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    /// Positive points of the certification grid (0 is always added).
    pub grid_points: usize,
    /// Grid end; by default the time all lifetimes drop below 1e-8.
    pub t_max: Option<f64>,
    /// Absolute MTTF tie tolerance.
    pub tol: f64,
    pub mc_n: u64,
    pub seed: u64,
    pub eval: EvalConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            grid_points: DEFAULT_POINTS,
            t_max: None,
            tol: MTTF_TIE_TOL,
            mc_n: 1_000_000,
            seed: 20_240_501,
            eval: EvalConfig::default(),
        }
    }
}

impl Settings {
    pub fn validate(&self) -> CliResult<()> {
        if self.grid_points < 2 {
            return Err(CliError::input(format!("--grid-points: need at least 2, got {}", self.grid_points)));
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > DEFAULT_FIRST) {
                return Err(CliError::input(format!("--t-max: must be finite and above {DEFAULT_FIRST}, got {t}")));
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::input(format!("--tol: must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    /// Geometric grid from 1e-4 to `t_max`, or to the horizon of `lifetimes`.
    pub fn grid<'a, I>(&self, lifetimes: I) -> CliResult<TimeGrid>
    where
        I: IntoIterator<Item = &'a LifetimeDistribution>,
    {
        let t = self.t_max.unwrap_or_else(|| horizon(lifetimes).min(T_CAP));
        TimeGrid::geometric(DEFAULT_FIRST, t.max(10.0 * DEFAULT_FIRST), self.grid_points).map_err(CliError::from)
    }

    pub fn mc(&self) -> McConfig {
        McConfig::new(self.mc_n, self.seed)
    }
}

/// Time by which every lifetime has reliability below 1e-8.
pub fn horizon<'a, I>(lifetimes: I) -> f64
where
    I: IntoIterator<Item = &'a LifetimeDistribution>,
{
    lifetimes.into_iter().map(|d| d.inverse_sf(TAIL_LEVEL)).fold(0.0, f64::max)
}
