//! Grid certificates for the usual stochastic, hazard rate and likelihood
//! ratio orders, and for the RR2 property of a pair of densities.
//!
//! A verdict only speaks for the grid it was computed on.

use alloc::vec::Vec;

use super::LifetimeDistribution;
use crate::grid::TimeGrid;

/// Absolute slack of the pointwise survival comparison.
pub const ST_TOL: f64 = 1e-12;
/// Relative slack of the successive-ratio monotonicity tests.
pub const RATIO_TOL: f64 = 1e-9;
/// Values below this are treated as an exhausted tail.
const NEGLIGIBLE: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderRelation {
    St,
    Hr,
    Lr,
    Rr2,
}

impl OrderRelation {
    pub fn name(self) -> &'static str {
        match self {
            OrderRelation::St => "st",
            OrderRelation::Hr => "hr",
            OrderRelation::Lr => "lr",
            OrderRelation::Rr2 => "rr2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness {
    /// `F̄₁(t) > F̄₂(t)` for `X₁ ≤st X₂`.
    Point { t: f64, lhs: f64, rhs: f64 },
    /// A pair `x₁ < x₂` at which a ratio decreases (hr, lr) or the RR2
    /// inequality `lhs ≥ rhs` is violated.
    Pair { x1: f64, x2: f64, lhs: f64, rhs: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    HoldsOnGrid,
    FailsAt(Witness),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderCheckReport {
    pub relation: OrderRelation,
    pub verdict: Verdict,
    /// First violation in grid order, when it differs from the reported
    /// (largest) one.
    pub first_violation: Option<Witness>,
    pub violations: usize,
    pub checked: usize,
    pub skipped: usize,
    pub grid_points: usize,
    pub grid_first: f64,
    pub grid_last: f64,
}

impl OrderCheckReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }

    pub fn fails(&self) -> bool {
        matches!(self.verdict, Verdict::FailsAt(_))
    }

    pub fn witness(&self) -> Option<Witness> {
        match self.verdict {
            Verdict::FailsAt(w) => Some(w),
            _ => None,
        }
    }
}

/// Checks `d1 ≤ d2` in the given order on `grid`.
pub fn check_order(
    d1: &LifetimeDistribution,
    d2: &LifetimeDistribution,
    relation: OrderRelation,
    grid: &TimeGrid,
) -> OrderCheckReport {
    let ts = grid.points();
    match relation {
        OrderRelation::St | OrderRelation::Hr => {
            let a: Vec<f64> = ts.iter().map(|&t| d1.sf(t)).collect();
            let b: Vec<f64> = ts.iter().map(|&t| d2.sf(t)).collect();
            check_sampled(&a, &b, relation, grid)
        }
        OrderRelation::Lr => {
            let a: Vec<f64> = ts.iter().map(|&t| d1.pdf(t)).collect();
            let b: Vec<f64> = ts.iter().map(|&t| d2.pdf(t)).collect();
            check_sampled(&a, &b, relation, grid)
        }
        OrderRelation::Rr2 => {
            let pairs = grid_pairs(ts);
            check_rr2(|x| d1.pdf(x), |x| d2.pdf(x), &pairs)
        }
    }
}

/// Checks `X₁ ≤ X₂` from curves sampled on `grid`: reliabilities for st and
/// hr, densities for lr.
pub fn check_sampled(a: &[f64], b: &[f64], relation: OrderRelation, grid: &TimeGrid) -> OrderCheckReport {
    let ts = grid.points();
    assert_eq!(a.len(), ts.len());
    assert_eq!(b.len(), ts.len());
    let mut report = OrderCheckReport {
        relation,
        verdict: Verdict::HoldsOnGrid,
        first_violation: None,
        violations: 0,
        checked: 0,
        skipped: 0,
        grid_points: ts.len(),
        grid_first: grid.first(),
        grid_last: grid.last(),
    };
    let mut worst: Option<(f64, Witness)> = None;
    let mut note = |report: &mut OrderCheckReport, size: f64, w: Witness| {
        report.violations += 1;
        if report.first_violation.is_none() {
            report.first_violation = Some(w);
        }
        if worst.is_none_or(|(s, _)| size > s) {
            worst = Some((size, w));
        }
    };
    match relation {
        OrderRelation::St => {
            for ((&t, &x), &y) in ts.iter().zip(a).zip(b) {
                if !(x.is_finite() && y.is_finite()) {
                    report.skipped += 1;
                    continue;
                }
                report.checked += 1;
                if x > y + ST_TOL {
                    note(&mut report, x - y, Witness::Point { t, lhs: x, rhs: y });
                }
            }
        }
        OrderRelation::Hr | OrderRelation::Lr => {
            // b/a non-decreasing  <=>  b(t₂)a(t₁) ≥ b(t₁)a(t₂) for t₁ < t₂
            let usable: Vec<usize> = (0..ts.len())
                .filter(|&k| {
                    let ok = a[k].is_finite() && b[k].is_finite() && (a[k] > NEGLIGIBLE || b[k] > NEGLIGIBLE);
                    if !ok {
                        report.skipped += 1;
                    }
                    ok
                })
                .collect();
            for w in usable.windows(2) {
                let (i, j) = (w[0], w[1]);
                report.checked += 1;
                let lhs = b[j] * a[i];
                let rhs = b[i] * a[j];
                if lhs < rhs - RATIO_TOL * rhs.abs() {
                    note(
                        &mut report,
                        (rhs - lhs) / rhs.abs(),
                        Witness::Pair { x1: ts[i], x2: ts[j], lhs, rhs },
                    );
                }
            }
        }
        OrderRelation::Rr2 => unreachable!("RR2 is checked on pairs, see check_rr2"),
    }
    if let Some((_, w)) = worst {
        report.verdict = Verdict::FailsAt(w);
        if report.first_violation == Some(w) {
            report.first_violation = None;
        }
    } else if report.checked == 0 || report.skipped > report.grid_points / 2 {
        report.verdict = Verdict::Inconclusive;
    }
    report
}

/// All pairs `x₁ < x₂` of grid points, in lexicographic order.
pub fn grid_pairs(points: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, &x1) in points.iter().enumerate() {
        for &x2 in &points[i + 1..] {
            out.push((x1, x2));
        }
    }
    out
}

/// Checks `f₁(x₁)f₂(x₂) ≥ f₁(x₂)f₂(x₁)` on each pair `(x₁, x₂)`, `x₁ < x₂`.
/// The witness is the first violating pair.
pub fn check_rr2<F1: Fn(f64) -> f64, F2: Fn(f64) -> f64>(
    f1: F1,
    f2: F2,
    pairs: &[(f64, f64)],
) -> OrderCheckReport {
    let (lo, hi) = pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, b)| (lo.min(a), hi.max(b)));
    let mut report = OrderCheckReport {
        relation: OrderRelation::Rr2,
        verdict: Verdict::HoldsOnGrid,
        first_violation: None,
        violations: 0,
        checked: 0,
        skipped: 0,
        grid_points: pairs.len(),
        grid_first: lo,
        grid_last: hi,
    };
    let mut first = None;
    for &(x1, x2) in pairs {
        let lhs = f1(x1) * f2(x2);
        let rhs = f1(x2) * f2(x1);
        if !(x1 < x2) || !lhs.is_finite() || !rhs.is_finite() {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        if lhs < rhs - RATIO_TOL * rhs.abs() {
            report.violations += 1;
            first.get_or_insert(Witness::Pair { x1, x2, lhs, rhs });
        }
    }
    report.verdict = match first {
        Some(w) => Verdict::FailsAt(w),
        None if report.checked == 0 => Verdict::Inconclusive,
        None => Verdict::HoldsOnGrid,
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::certification(50.0).unwrap()
    }

    #[test]
    fn exponential_rates() {
        let fast = LifetimeDistribution::exponential(2.0).unwrap();
        let slow = LifetimeDistribution::exponential(1.0).unwrap();
        for rel in [OrderRelation::St, OrderRelation::Hr, OrderRelation::Lr] {
            assert!(check_order(&fast, &slow, rel, &grid()).holds(), "{rel:?}");
            assert!(check_order(&slow, &fast, rel, &grid()).fails(), "{rel:?}");
        }
    }

    #[test]
    fn reflexive() {
        let ds = [
            LifetimeDistribution::exponential(1.3).unwrap(),
            LifetimeDistribution::weibull(0.5, 1.0).unwrap(),
            LifetimeDistribution::weibull(3.0, 0.7).unwrap(),
            LifetimeDistribution::pareto(1.0).unwrap(),
        ];
        for d in &ds {
            for rel in [OrderRelation::St, OrderRelation::Hr, OrderRelation::Lr] {
                let r = check_order(d, d, rel, &grid());
                assert!(r.holds(), "{d:?} {rel:?} {r:?}");
            }
        }
    }

    #[test]
    fn heavy_tail_breaks_st() {
        let p = LifetimeDistribution::pareto(1.0).unwrap();
        let e = LifetimeDistribution::exponential(1.0).unwrap();
        let r = check_order(&p, &e, OrderRelation::St, &grid());
        match r.witness() {
            Some(Witness::Point { t, lhs, rhs }) => {
                assert!(t > 1.0 && lhs > rhs);
                assert!((lhs - 1.0 / (1.0 + t)).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rr2_example() {
        let f1 = |t: f64| (1.0 + t).powi(-2);
        let f2 = |t: f64| (-t).exp();
        let r = check_rr2(f1, f2, &[(1.0, 2.0)]);
        match r.witness() {
            Some(Witness::Pair { x1, x2, lhs, rhs }) => {
                assert_eq!((x1, x2), (1.0, 2.0));
                assert!((lhs - 0.0338).abs() < 5e-4);
                assert!((rhs - 0.04088).abs() < 5e-4);
            }
            other => panic!("{other:?}"),
        }
        assert!(check_rr2(f1, f1, &grid_pairs(&[0.0, 0.5, 1.0, 4.0])).holds());
        let e2 = |t: f64| 2.0 * (-2.0 * t).exp();
        assert!(check_rr2(e2, f2, &grid_pairs(&[0.0, 0.3, 1.0, 2.0, 7.0])).holds());
    }

    #[test]
    fn lr_implies_hr_implies_st() {
        let ds = [
            LifetimeDistribution::exponential(0.7).unwrap(),
            LifetimeDistribution::exponential(2.0).unwrap(),
            LifetimeDistribution::weibull(2.0, 1.0).unwrap(),
            LifetimeDistribution::weibull(0.5, 1.0).unwrap(),
            LifetimeDistribution::weibull(1.5, 0.5).unwrap(),
            LifetimeDistribution::pareto(1.0).unwrap(),
            LifetimeDistribution::pareto(3.0).unwrap(),
        ];
        let g = grid();
        for a in &ds {
            for b in &ds {
                if check_order(a, b, OrderRelation::Lr, &g).holds() {
                    assert!(check_order(a, b, OrderRelation::Hr, &g).holds(), "{a:?} {b:?}");
                }
                if check_order(a, b, OrderRelation::Hr, &g).holds() {
                    assert!(check_order(a, b, OrderRelation::St, &g).holds(), "{a:?} {b:?}");
                }
            }
        }
    }
}
