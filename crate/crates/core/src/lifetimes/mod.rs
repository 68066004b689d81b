//! Lifetime distributions on `[0, ∞)`.
//!
//! Every distribution exposes the reliability `F̄(t) = P(X > t)`, the cdf and
//! the density. [`convolution`] builds the lifetime of a component backed by
//! a cold standby spare, [`mttf`] integrates reliability curves and
//! [`orders`] certifies stochastic orders on a grid.

pub mod convolution;
pub mod mttf;
pub mod orders;

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods come from libm on no_std targets
use num_traits::Float;

use crate::error::{Error, Result};

pub use convolution::{convolve, ConvolutionConfig};
pub use mttf::{mttf, MttfConfig, MttfEstimate};
pub use orders::{check_order, check_rr2, OrderCheckReport, OrderRelation, Verdict, Witness};

/// A parametric or tabulated lifetime law.
#[derive(Clone, Debug, PartialEq)]
pub enum LifetimeDistribution {
    /// `F̄(t) = e^{−λt}`.
    Exponential { rate: f64 },
    /// `F̄(t) = exp{−(λt)^α}`.
    Weibull { shape: f64, rate: f64 },
    /// Lomax form `F̄(t) = (1+t)^{−θ}`.
    Pareto { exponent: f64 },
    Tabulated(Arc<Tabulated>),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::input(format!("{name} must be positive and finite, got {v}")))
    }
}

impl LifetimeDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(LifetimeDistribution::Exponential { rate })
    }

    pub fn weibull(shape: f64, rate: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("rate", rate)?;
        Ok(LifetimeDistribution::Weibull { shape, rate })
    }

    pub fn pareto(exponent: f64) -> Result<Self> {
        positive("exponent", exponent)?;
        Ok(LifetimeDistribution::Pareto { exponent })
    }

    pub fn tabulated(table: Tabulated) -> Self {
        LifetimeDistribution::Tabulated(Arc::new(table))
    }

    /// `F̄(t)`; an error for negative `t`.
    pub fn reliability(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.sf(t))
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(1.0 - self.sf(t))
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.pdf(t))
    }

    /// Unchecked reliability: `1` for `t ≤ 0`.
    pub fn sf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match self {
            LifetimeDistribution::Exponential { rate } => (-rate * t).exp(),
            LifetimeDistribution::Weibull { shape, rate } => (-(rate * t).powf(*shape)).exp(),
            LifetimeDistribution::Pareto { exponent } => (1.0 + t).powf(-exponent),
            LifetimeDistribution::Tabulated(tab) => tab.sf(t),
        }
    }

    /// Unchecked density: `0` for `t < 0`; may be `+∞` at `0` (Weibull with
    /// shape < 1).
    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            LifetimeDistribution::Exponential { rate } => rate * (-rate * t).exp(),
            LifetimeDistribution::Weibull { shape, rate } => {
                let z = rate * t;
                if t == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(core::cmp::Ordering::Less) => f64::INFINITY,
                        Some(core::cmp::Ordering::Equal) => *rate,
                        _ => 0.0,
                    };
                }
                shape * rate * z.powf(shape - 1.0) * (-z.powf(*shape)).exp()
            }
            LifetimeDistribution::Pareto { exponent } => exponent * (1.0 + t).powf(-exponent - 1.0),
            LifetimeDistribution::Tabulated(tab) => tab.pdf(t),
        }
    }

    /// Smallest `t` with `F̄(t) ≤ level` (the inverse reliability).
    pub fn inverse_sf(&self, level: f64) -> f64 {
        if level >= 1.0 {
            return 0.0;
        }
        if level <= 0.0 {
            return f64::INFINITY;
        }
        match self {
            LifetimeDistribution::Exponential { rate } => -level.ln() / rate,
            LifetimeDistribution::Weibull { shape, rate } => (-level.ln()).powf(1.0 / shape) / rate,
            LifetimeDistribution::Pareto { exponent } => level.powf(-1.0 / exponent) - 1.0,
            LifetimeDistribution::Tabulated(tab) => tab.inverse_sf(level),
        }
    }

    /// `true` if the density is finite at `0`.
    pub fn bounded_density_at_zero(&self) -> bool {
        self.pdf(0.0).is_finite()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::input(format!("time must be non-negative, got {t}")))
    } else {
        Ok(())
    }
}

/// A reliability function known on a grid starting at `t = 0`.
///
/// With densities the curve is a monotone-clamped cubic Hermite interpolant
/// (its derivative gives the density); without, it is piecewise linear.
/// Beyond the last node the curve decays exponentially with the hazard rate
/// observed at the end of the table.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    times: Vec<f64>,
    survival: Vec<f64>,
    density: Option<Vec<f64>>,
    tail_hazard: f64,
}

impl Tabulated {
    pub fn new(times: Vec<f64>, survival: Vec<f64>) -> Result<Self> {
        Self::build(times, survival, None)
    }

    pub fn with_density(times: Vec<f64>, survival: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        Self::build(times, survival, Some(density))
    }

    fn build(times: Vec<f64>, survival: Vec<f64>, density: Option<Vec<f64>>) -> Result<Self> {
        let n = times.len();
        if n < 2 || survival.len() != n || density.as_ref().is_some_and(|d| d.len() != n) {
            return Err(Error::input("tabulated distribution needs ≥ 2 aligned points"));
        }
        if times[0] != 0.0 {
            return Err(Error::input("tabulated distribution must start at t = 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::input("tabulated times must be strictly increasing and finite"));
        }
        if survival.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::input("tabulated reliabilities must lie in [0, 1]"));
        }
        if survival.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::input("tabulated reliabilities must be non-increasing"));
        }
        if let Some(d) = &density {
            if d.iter().any(|f| !f.is_finite() || *f < 0.0) {
                return Err(Error::input("tabulated densities must be finite and non-negative"));
            }
        }
        let last = n - 1;
        let tail_hazard = match &density {
            Some(d) if survival[last] > 0.0 => d[last] / survival[last],
            _ if survival[last] > 0.0 && survival[last - 1] > survival[last] => {
                (survival[last - 1] / survival[last]).ln() / (times[last] - times[last - 1])
            }
            _ => f64::INFINITY,
        };
        Ok(Tabulated { times, survival, density, tail_hazard })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn survival_values(&self) -> &[f64] {
        &self.survival
    }

    pub fn density_values(&self) -> Option<&[f64]> {
        self.density.as_deref()
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index `k` with `times[k] ≤ t < times[k+1]`; `t` inside the table.
    fn segment(&self, t: f64) -> usize {
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(k) => k.min(self.times.len() - 2),
            Err(k) => k - 1,
        }
    }

    fn tail(&self, t: f64) -> (f64, f64) {
        let last = self.times.len() - 1;
        let s = self.survival[last];
        if s == 0.0 || self.tail_hazard.is_infinite() {
            return (0.0, 0.0);
        }
        let v = s * (-self.tail_hazard * (t - self.times[last])).exp();
        (v, self.tail_hazard * v)
    }

    pub fn sf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0f64.min(self.survival[0]);
        }
        if t >= self.t_max() {
            return self.tail(t).0;
        }
        let k = self.segment(t);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let (s0, s1) = (self.survival[k], self.survival[k + 1]);
        let h = t1 - t0;
        let u = (t - t0) / h;
        match &self.density {
            None => s0 + (s1 - s0) * u,
            Some(d) => {
                let (m0, m1) = (-d[k] * h, -d[k + 1] * h);
                let u2 = u * u;
                let u3 = u2 * u;
                let v = (2.0 * u3 - 3.0 * u2 + 1.0) * s0
                    + (u3 - 2.0 * u2 + u) * m0
                    + (-2.0 * u3 + 3.0 * u2) * s1
                    + (u3 - u2) * m1;
                v.clamp(s1, s0)
            }
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if t >= self.t_max() {
            return self.tail(t).1;
        }
        let k = self.segment(t);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let (s0, s1) = (self.survival[k], self.survival[k + 1]);
        let h = t1 - t0;
        match &self.density {
            None => (s0 - s1) / h,
            Some(d) => {
                let u = (t - t0) / h;
                let (m0, m1) = (-d[k] * h, -d[k + 1] * h);
                let u2 = u * u;
                let dv = (6.0 * u2 - 6.0 * u) * s0
                    + (3.0 * u2 - 4.0 * u + 1.0) * m0
                    + (-6.0 * u2 + 6.0 * u) * s1
                    + (3.0 * u2 - 2.0 * u) * m1;
                (-dv / h).max(0.0)
            }
        }
    }

    pub fn inverse_sf(&self, level: f64) -> f64 {
        let last = self.times.len() - 1;
        if level >= self.survival[0] {
            return 0.0;
        }
        if level < self.survival[last] {
            if self.tail_hazard.is_infinite() || self.survival[last] == 0.0 {
                return self.t_max();
            }
            return self.times[last] + (self.survival[last] / level).ln() / self.tail_hazard;
        }
        // first node at or below the level, then bisection inside the segment
        let k = self.survival.partition_point(|&s| s > level);
        let (mut lo, mut hi) = (self.times[k.saturating_sub(1)], self.times[k]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sf(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn closed_forms() {
        let e = LifetimeDistribution::exponential(1.0).unwrap();
        assert!((e.reliability(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((e.reliability(1.0).unwrap() - 0.367879).abs() < 1e-6);
        let p = LifetimeDistribution::pareto(1.0).unwrap();
        assert_eq!(p.reliability(1.0).unwrap(), 0.5);
        assert_eq!(p.density(1.0).unwrap(), 0.25);
        let w = LifetimeDistribution::weibull(2.0, 1.0).unwrap();
        assert_eq!(w.reliability(0.0).unwrap(), 1.0);
        assert!(w.reliability(-1.0).is_err());
        assert!(LifetimeDistribution::exponential(0.0).is_err());
        assert!(LifetimeDistribution::weibull(1.0, f64::NAN).is_err());
    }

    #[test]
    fn density_matches_finite_difference() {
        let dists = [
            LifetimeDistribution::exponential(1.7).unwrap(),
            LifetimeDistribution::weibull(2.0, 1.0).unwrap(),
            LifetimeDistribution::weibull(0.5, 1.3).unwrap(),
            LifetimeDistribution::pareto(2.5).unwrap(),
        ];
        for d in &dists {
            for &t in &[0.05, 0.3, 1.0, 2.5, 4.0] {
                let h = 1e-5 * t.max(1e-2);
                let fd = (d.cdf(t + h).unwrap() - d.cdf(t - h).unwrap()) / (2.0 * h);
                let f = d.density(t).unwrap();
                assert!((fd - f).abs() <= 1e-6 * f.abs().max(1e-3), "{d:?} at {t}: {fd} vs {f}");
                assert!((d.cdf(t).unwrap() + d.reliability(t).unwrap() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_sf_round_trips() {
        let dists = [
            LifetimeDistribution::exponential(0.5).unwrap(),
            LifetimeDistribution::weibull(0.7, 2.0).unwrap(),
            LifetimeDistribution::pareto(1.0).unwrap(),
        ];
        for d in &dists {
            for &q in &[0.9, 0.5, 1e-3, 1e-8] {
                let t = d.inverse_sf(q);
                assert!((d.sf(t) - q).abs() <= 1e-12 * q.max(1e-3), "{d:?} {q}");
            }
        }
    }

    #[test]
    fn tabulated_linear_and_hermite() {
        let e = LifetimeDistribution::exponential(1.0).unwrap();
        let times: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
        let surv: Vec<f64> = times.iter().map(|&t| e.sf(t)).collect();
        let dens: Vec<f64> = times.iter().map(|&t| e.pdf(t)).collect();
        let lin = Tabulated::new(times.clone(), surv.clone()).unwrap();
        let herm = Tabulated::with_density(times, surv, dens).unwrap();
        let mut worst_lin = 0.0f64;
        let mut worst_herm = 0.0f64;
        for k in 0..2000 {
            let t = 0.0123 + k as f64 * 0.011;
            worst_lin = worst_lin.max((lin.sf(t) - e.sf(t)).abs());
            worst_herm = worst_herm.max((herm.sf(t) - e.sf(t)).abs());
        }
        assert!(worst_lin < 5e-4);
        assert!(worst_herm < 5e-8, "{worst_herm}");
        // exponential tail extrapolation
        assert!((herm.sf(25.0) - e.sf(25.0)).abs() < 1e-12);
        assert!((herm.pdf(1.234) - e.pdf(1.234)).abs() < 1e-6);
        let q = herm.inverse_sf(0.3);
        assert!((q - e.inverse_sf(0.3)).abs() < 1e-7);
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        assert!(Tabulated::new(vec![0.0], vec![1.0]).is_err());
        assert!(Tabulated::new(vec![0.5, 1.0], vec![1.0, 0.5]).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0], vec![0.5, 0.7]).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0], vec![1.0, -0.1]).is_err());
        assert!(Tabulated::new(vec![0.0, 0.0], vec![1.0, 0.5]).is_err());
    }
}
