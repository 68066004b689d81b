//! Mean time to failure `∫₀^∞ F̄(t) dt`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods come from libm on no_std targets
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveGaussLegendre;

#[derive(Clone, Debug, PartialEq)]
pub struct MttfConfig {
    /// The integral is truncated once `F̄` drops below this level.
    pub tail_level: f64,
    /// Hard end of the integration range.
    pub t_max: f64,
    /// A curve with `F̄(t_max)·t_max` above this is treated as divergent.
    pub divergence_tol: f64,
    pub nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for MttfConfig {
    fn default() -> Self {
        MttfConfig {
            tail_level: 1e-10,
            t_max: 1e7,
            divergence_tol: 1e-6,
            nodes: 64,
            abs_tol: 1e-12,
            rel_tol: 1e-11,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MttfEstimate {
    /// Integral over `[0, t_end]` plus the tail correction.
    pub value: f64,
    /// Quadrature error estimate.
    pub quadrature_error: f64,
    pub t_end: f64,
    /// Estimated mass beyond `t_end`, from the local power-law decay.
    pub tail: f64,
}

/// Integrates a reliability curve. The range is split at powers of two so
/// that early drops and long tails both get their own panels.
pub fn mttf<F: Fn(f64) -> f64>(sf: F, config: &MttfConfig) -> Result<MttfEstimate> {
    let s0 = sf(0.0);
    if !(0.0..=1.0 + 1e-12).contains(&s0) {
        return Err(Error::input(format!("F̄(0) = {s0} is not a probability")));
    }
    let mut knots = Vec::new();
    let mut t = 1.0 / 1024.0;
    let mut t_end = None;
    while t < config.t_max {
        knots.push(t);
        let v = sf(t);
        if !v.is_finite() {
            return Err(Error::numeric(format!("F̄({t}) is not finite")));
        }
        if v < config.tail_level {
            t_end = Some(t);
            break;
        }
        t *= 2.0;
    }
    let t_end = match t_end {
        Some(t) => t,
        None => {
            let v = sf(config.t_max);
            if v * config.t_max > config.divergence_tol {
                return Err(Error::numeric(format!(
                    "reliability has not decayed by t_max = {}: F̄ = {v:.3e}, mean may be infinite",
                    config.t_max
                )));
            }
            config.t_max
        }
    };
    let quad = AdaptiveGaussLegendre::new(config.nodes).with_tolerances(config.abs_tol, config.rel_tol);
    let body = quad.integrate_with_knots(&sf, 0.0, t_end, &knots)?;

    let end = sf(t_end);
    let half = sf(0.5 * t_end);
    let tail = if end > 0.0 && half > end {
        let slope = (half / end).ln() / core::f64::consts::LN_2;
        if slope <= 1.0 {
            return Err(Error::numeric(format!(
                "reliability decays like t^-{slope:.3} near t = {t_end}; the mean is infinite"
            )));
        }
        end * t_end / (slope - 1.0)
    } else {
        0.0
    };
    Ok(MttfEstimate { value: body.value + tail, quadrature_error: body.error, t_end, tail })
}
