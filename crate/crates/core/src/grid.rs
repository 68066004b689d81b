//! Time grids on which curves are tabulated and orders are certified.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods come from libm on no_std targets
use num_traits::Float;

use crate::error::{Error, Result};

/// Default number of positive points of a certification grid.
pub const DEFAULT_POINTS: usize = 2000;
/// First positive point of the default geometric grid.
pub const DEFAULT_FIRST: f64 = 1e-4;
/// Reliability level below which a curve is considered finished.
pub const TAIL_LEVEL: f64 = 1e-8;

/// Strictly increasing, non-negative time points.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::input("a time grid needs at least two points"));
        }
        if points.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::input("time grid points must be finite and non-negative"));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::input(format!(
                "time grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(TimeGrid { points })
    }

    /// `0` followed by `points` geometrically spaced values from `first` to `last`.
    pub fn geometric(first: f64, last: f64, points: usize) -> Result<Self> {
        if !(first > 0.0 && last > first) || points < 2 {
            return Err(Error::input(format!(
                "geometric grid needs 0 < first < last and ≥ 2 points (got {first}, {last}, {points})"
            )));
        }
        let ratio = (last / first).ln() / (points - 1) as f64;
        let mut v = Vec::with_capacity(points + 1);
        v.push(0.0);
        v.extend((0..points).map(|k| first * (ratio * k as f64).exp()));
        *v.last_mut().unwrap() = last;
        Self::new(v)
    }

    /// `points` evenly spaced values on `[start, end]`.
    pub fn uniform(start: f64, end: f64, points: usize) -> Result<Self> {
        if !(end > start) || points < 2 {
            return Err(Error::input("uniform grid needs start < end and ≥ 2 points"));
        }
        let step = (end - start) / (points - 1) as f64;
        Self::new((0..points).map(|k| start + step * k as f64).collect())
    }

    /// The default certification grid: 0 plus [`DEFAULT_POINTS`] geometric
    /// points from [`DEFAULT_FIRST`] to `t_max`.
    pub fn certification(t_max: f64) -> Result<Self> {
        Self::geometric(DEFAULT_FIRST, t_max.max(DEFAULT_FIRST * 10.0), DEFAULT_POINTS)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid() {
        let g = TimeGrid::geometric(1e-4, 10.0, 2000).unwrap();
        assert_eq!(g.len(), 2001);
        assert_eq!(g.first(), 0.0);
        assert!((g.points()[1] - 1e-4).abs() < 1e-18);
        assert_eq!(g.last(), 10.0);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(alloc::vec![0.0]).is_err());
        assert!(TimeGrid::new(alloc::vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::new(alloc::vec![-1.0, 0.0]).is_err());
        assert!(TimeGrid::geometric(0.0, 1.0, 10).is_err());
        assert!(TimeGrid::uniform(0.0, 1.0, 1).is_err());
    }
}
