//! Lifetime of a component backed by a cold standby spare: the independent
//! sum `X + Y`.
//!
//! `F̄_{X+Y}(t) = F̄_X(t) + ∫₀ᵗ f_X(x) F̄_Y(t−x) dx` and the density
//! `∫₀ᵗ f_X(x) f_Y(t−x) dx` are computed node by node, and the result is a
//! Hermite-interpolated [`Tabulated`] distribution.

use alloc::format;
use alloc::vec::Vec;

use super::{LifetimeDistribution, Tabulated};
use crate::error::{Error, Result};
use crate::grid::{TimeGrid, DEFAULT_FIRST};
use crate::quadrature::AdaptiveGaussLegendre;

/// Reliability level that fixes the default end of the table.
const SUPPORT_LEVEL: f64 = 1e-9;
/// Tables longer than this are laid out geometrically.
const UNIFORM_LIMIT: f64 = 200.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionConfig {
    /// Number of table nodes, `t = 0` included.
    pub points: usize,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// End of the table; by default both inputs are below `1e-9` there.
    pub t_max: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        ConvolutionConfig { points: 2048, nodes: 64, t_max: None, abs_tol: 1e-13, rel_tol: 1e-11 }
    }
}

/// Distribution of `X + Y` for independent `X ~ d1`, `Y ~ d2`.
pub fn convolve(
    d1: &LifetimeDistribution,
    d2: &LifetimeDistribution,
    config: &ConvolutionConfig,
) -> Result<LifetimeDistribution> {
    if config.points < 3 {
        return Err(Error::input("convolution needs at least 3 table points"));
    }
    let t_max = match config.t_max {
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(t) => return Err(Error::input(format!("convolution t_max must be positive, got {t}"))),
        None => d1.inverse_sf(SUPPORT_LEVEL) + d2.inverse_sf(SUPPORT_LEVEL),
    };
    if !t_max.is_finite() {
        return Err(Error::numeric("convolution support does not end at a finite time"));
    }
    let grid = if t_max <= UNIFORM_LIMIT {
        TimeGrid::uniform(0.0, t_max, config.points)?
    } else {
        TimeGrid::geometric(DEFAULT_FIRST, t_max, config.points - 1)?
    };

    // integrate against the smoother density when one of them blows up at 0
    let (x, y) = if !d1.bounded_density_at_zero() && d2.bounded_density_at_zero() {
        (d2, d1)
    } else {
        (d1, d2)
    };
    let quad = AdaptiveGaussLegendre::new(config.nodes).with_tolerances(config.abs_tol, config.rel_tol);

    let mut times = Vec::with_capacity(grid.len());
    let mut survival = Vec::with_capacity(grid.len());
    let mut density = Vec::with_capacity(grid.len());
    let mut knots = Vec::new();
    for &t in grid.points() {
        if t == 0.0 {
            times.push(0.0);
            survival.push(1.0);
            density.push(f64::NAN); // filled below
            continue;
        }
        // each half is integrated in the variable that vanishes at its
        // singular end, so `t − s` is never rounded onto the singularity
        let half = 0.5 * t;
        end_knots(half, &mut knots);
        let integral = |g: &dyn Fn(f64) -> f64, what: &str| -> Result<f64> {
            quad.integrate_with_knots(g, 0.0, half, &knots)
                .map(|e| e.value)
                .map_err(|e| diagnose(e, what, t))
        };
        let sf = integral(&|s| x.pdf(s) * y.sf(t - s), "reliability")?
            + integral(&|u| x.pdf(t - u) * y.sf(u), "reliability")?;
        let pdf = integral(&|s| x.pdf(s) * y.pdf(t - s), "density")?
            + integral(&|u| x.pdf(t - u) * y.pdf(u), "density")?;
        times.push(t);
        survival.push((x.sf(t) + sf).clamp(0.0, 1.0));
        density.push(pdf.max(0.0));
    }
    density[0] = if d1.bounded_density_at_zero() || d2.bounded_density_at_zero() {
        0.0
    } else {
        density[1]
    };
    // quadrature noise must not break monotonicity of the table
    for k in 1..survival.len() {
        if survival[k] > survival[k - 1] {
            survival[k] = survival[k - 1];
        }
    }
    Ok(LifetimeDistribution::tabulated(Tabulated::with_density(times, survival, density)?))
}

/// Panel boundaries clustered at `0`, where the integrands of shape < 1
/// families vary fastest.
fn end_knots(t: f64, knots: &mut Vec<f64>) {
    knots.clear();
    let mut frac = 0.5;
    for _ in 0..12 {
        knots.push(t * frac);
        frac *= 0.25;
    }
}

fn diagnose(e: Error, what: &str, t: f64) -> Error {
    match e {
        Error::Numeric(msg) => Error::numeric(format!("convolution {what} at t = {t}: {msg}")),
        other => other,
    }
}
