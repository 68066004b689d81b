//! Gauss–Legendre rules and an adaptive composite integrator.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

#[allow(unused_imports)] // float methods come from libm on no_std targets
use num_traits::Float;

use crate::error::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 1..=n {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integral estimate with the summed panel error estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Composite Gauss–Legendre with bisection refinement: each panel is
/// integrated with an `n`- and an `n/2`-point rule, whose difference serves
/// as the panel error estimate.
#[derive(Clone, Debug)]
pub struct AdaptiveGaussLegendre {
    fine: GaussLegendre,
    coarse: GaussLegendre,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl AdaptiveGaussLegendre {
    pub fn new(nodes: usize) -> Self {
        let nodes = nodes.max(2);
        AdaptiveGaussLegendre {
            fine: GaussLegendre::new(nodes),
            coarse: GaussLegendre::new(nodes / 2),
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_panels: 2048,
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    /// Integrates over `[a, b]`, starting from the panels delimited by
    /// `knots` (points outside `(a, b)` are ignored). The panel with the
    /// largest error estimate is bisected until the summed estimate meets
    /// the tolerance, which copes with integrable endpoint singularities.
    pub fn integrate_with_knots<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        knots: &[f64],
    ) -> Result<Estimate> {
        if !(a.is_finite() && b.is_finite()) || b < a {
            return Err(Error::input(format!("bad integration interval [{a}, {b}]")));
        }
        if a == b {
            return Ok(Estimate { value: 0.0, error: 0.0, panels: 0 });
        }
        let mut edges: Vec<f64> = Vec::with_capacity(knots.len() + 2);
        edges.push(a);
        edges.extend(knots.iter().copied().filter(|&k| k > a && k < b));
        edges.push(b);
        edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
        edges.dedup();

        let mut heap = BinaryHeap::with_capacity(2 * edges.len());
        let mut total = 0.0;
        let mut error = 0.0;
        for w in edges.windows(2) {
            let p = self.panel(&mut f, w[0], w[1])?;
            total += p.value;
            error += p.error;
            heap.push(p);
        }
        while error > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_panels {
                let worst = heap.peek().unwrap();
                return Err(Error::numeric(format!(
                    "quadrature on [{a}, {b}] did not converge: {} panels, error {error:.3e}, \
                     worst panel [{}, {}] with error {:.3e}",
                    heap.len(),
                    worst.lo,
                    worst.hi,
                    worst.error
                )));
            }
            let worst = heap.pop().unwrap();
            let mid = 0.5 * (worst.lo + worst.hi);
            if !(mid > worst.lo && mid < worst.hi) {
                // cannot be refined further in floating point; accept it as is
                heap.push(Panel { error: 0.0, ..worst });
                error -= worst.error;
                continue;
            }
            let left = self.panel(&mut f, worst.lo, mid)?;
            let right = self.panel(&mut f, mid, worst.hi)?;
            total += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        // re-sum to shed the cancellation accumulated by the running updates
        let panels = heap.len();
        let value = heap.iter().map(|p| p.value).sum();
        let error = heap.iter().map(|p| p.error).sum();
        Ok(Estimate { value, error, panels })
    }

    fn panel<F: FnMut(f64) -> f64>(&self, f: &mut F, lo: f64, hi: f64) -> Result<Panel> {
        let fine = self.fine.integrate(&mut *f, lo, hi);
        let coarse = self.coarse.integrate(&mut *f, lo, hi);
        if !fine.is_finite() {
            return Err(Error::numeric(format!("non-finite integrand on [{lo}, {hi}]")));
        }
        let error = if coarse.is_finite() { (fine - coarse).abs() } else { fine.abs() };
        Ok(Panel { lo, hi, value: fine, error })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_with_knots(f, a, b, &[])
    }
}
