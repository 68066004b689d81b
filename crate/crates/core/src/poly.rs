//! The structure reliability function `H(p_1, …, p_n)` as an exact
//! multilinear polynomial, its diagonal `h(p) = H(p, …, p)` and `h⁻¹`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::system::{CoherentSystem, ComponentIndex, ComponentSet, MAX_EXPONENTIAL};

/// `Σ_S c_S Π_{i∈S} p_i` with integer coefficients; each variable appears
/// with degree at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    n_vars: usize,
    terms: BTreeMap<ComponentSet, i64>,
}

impl MultilinearPolynomial {
    pub fn new(n_vars: usize, terms: impl IntoIterator<Item = (ComponentSet, i64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, c) in terms {
            if s.max_index() > n_vars {
                return Err(Error::input(format!("term {s} uses a variable beyond p{n_vars}")));
            }
            *map.entry(s).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        Ok(MultilinearPolynomial { n_vars, terms: map })
    }

    /// Inclusion–exclusion over the minimal path sets, computed as
    /// `1 − Π_P (1 − Π_{i∈P} p_i)` with `p_i² = p_i`.
    pub fn from_path_sets(system: &CoherentSystem) -> Result<Self> {
        system.ensure_valid()?;
        let n = system.order();
        if n > MAX_EXPONENTIAL {
            return Err(Error::capacity("system order", n, MAX_EXPONENTIAL));
        }
        let mut failure: BTreeMap<ComponentSet, i64> = BTreeMap::new();
        failure.insert(ComponentSet::EMPTY, 1);
        for &path in system.path_sets() {
            let mut next = failure.clone();
            for (&s, &c) in &failure {
                *next.entry(s.union(path)).or_insert(0) -= c;
            }
            next.retain(|_, c| *c != 0);
            failure = next;
        }
        let terms = failure
            .into_iter()
            .filter(|(s, _)| !s.is_empty())
            .map(|(s, c)| (s, -c));
        Self::new(n, terms)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Terms in ascending subset order (cardinality, then lexicographic).
    pub fn terms(&self) -> impl Iterator<Item = (ComponentSet, i64)> + '_ {
        self.terms.iter().map(|(&s, &c)| (s, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, set: ComponentSet) -> i64 {
        self.terms.get(&set).copied().unwrap_or(0)
    }

    pub fn evaluate(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.n_vars {
            return Err(Error::input(format!(
                "{} probabilities given for {} variables",
                p.len(),
                self.n_vars
            )));
        }
        if let Some((k, v)) = p.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::input(format!("p{} = {v} is not a probability", k + 1)));
        }
        Ok(self.evaluate_unchecked(p).clamp(0.0, 1.0))
    }

    /// Raw polynomial value; no range checks, no clamping.
    pub fn evaluate_unchecked(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(s, &c)| c as f64 * s.iter().map(|i| p[i.get() - 1]).product::<f64>())
            .sum()
    }

    /// Coefficients of `h(p) = H(p, …, p)`.
    pub fn diagonal(&self) -> UnivariatePolynomial {
        let mut coeffs = vec![0i64; self.n_vars + 1];
        for (s, &c) in &self.terms {
            coeffs[s.len()] += c;
        }
        UnivariatePolynomial::new(coeffs)
    }

    /// Replaces `p_target` by `p_target ∪ p_spare = 1 − (1−p_target)(1−p_spare)`
    /// where the spare is the new variable `n_vars + 1`.
    pub fn substitute_active(&self, target: ComponentIndex, spare: ComponentIndex) -> Result<Self> {
        if target.get() > self.n_vars {
            return Err(Error::input(format!(
                "target p{target} outside p1..p{}",
                self.n_vars
            )));
        }
        if spare.get() != self.n_vars + 1 {
            return Err(Error::input(format!(
                "spare must be the new variable p{}, got p{spare}",
                self.n_vars + 1
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * 3);
        for (&s, &c) in &self.terms {
            if s.contains(target) {
                let mut swapped = s;
                swapped.remove(target);
                swapped.insert(spare);
                let mut both = s;
                both.insert(spare);
                terms.push((s, c));
                terms.push((swapped, c));
                terms.push((both, -c));
            } else {
                terms.push((s, c));
            }
        }
        Self::new(self.n_vars + 1, terms)
    }
}

impl fmt::Display for MultilinearPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (s, &c)) in self.terms.iter().enumerate() {
            let mag = c.unsigned_abs();
            match (k, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag != 1 || s.is_empty() {
                write!(f, "{mag}")?;
                if !s.is_empty() {
                    f.write_str("*")?;
                }
            }
            for (j, i) in s.iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                write!(f, "p{i}")?;
            }
        }
        Ok(())
    }
}

/// `h(p) = Σ_j a_j p^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariatePolynomial {
    coeffs: Vec<i64>,
}

impl UnivariatePolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UnivariatePolynomial { coeffs }
    }

    /// `a_0, a_1, …` (trailing zeros trimmed).
    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * p + a as f64)
    }

    /// `p ∈ [0,1]` with `|h(p) − y| ≤ tol`, by bisection on `[0, 1]` down to
    /// adjacent floating-point values.
    ///
    /// `h(0) = 0` and `h(1) = 1` are required; a bracket that fails its sign
    /// check is reported as a domain error.
    pub fn inverse(&self, y: f64, tol: f64) -> Result<f64> {
        const SLACK: f64 = 1e-12;
        if !(-SLACK..=1.0 + SLACK).contains(&y) || y.is_nan() {
            return Err(Error::input(format!("h⁻¹ argument {y} is not a probability")));
        }
        let (h0, h1) = (self.eval(0.0), self.eval(1.0));
        if h0.abs() > SLACK || (h1 - 1.0).abs() > SLACK {
            return Err(Error::domain(format!(
                "h(0) = {h0}, h(1) = {h1}; not the diagonal of a coherent system"
            )));
        }
        if y <= 0.0 {
            return Ok(0.0);
        }
        if y >= 1.0 {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.eval(mid);
            if v < y {
                lo = mid;
            } else if v > y {
                hi = mid;
            } else {
                return Ok(mid);
            }
        }
        let (rl, rh) = ((self.eval(lo) - y).abs(), (self.eval(hi) - y).abs());
        let (p, r) = if rl <= rh { (lo, rl) } else { (hi, rh) };
        if r > tol {
            return Err(Error::domain(format!(
                "h⁻¹({y}): residual {r:.3e} at p = {p} exceeds {tol:.1e}; h is not monotone"
            )));
        }
        Ok(p)
    }

    /// `true` if `h` increases strictly between consecutive points of a
    /// uniform `points`-grid on `[0, 1]`.
    pub fn is_strictly_increasing(&self, points: usize) -> bool {
        let step = 1.0 / (points.max(2) - 1) as f64;
        let mut prev = self.eval(0.0);
        (1..points.max(2)).all(|k| {
            let v = self.eval(k as f64 * step);
            let ok = v > prev;
            prev = v;
            ok
        })
    }
}

impl fmt::Display for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &a) in self.coeffs.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            let mag = a.unsigned_abs();
            match (first, a < 0) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            match (j, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => f.write_str("p")?,
                (1, m) => write!(f, "{m}*p")?,
                (j, 1) => write!(f, "p^{j}")?,
                (j, m) => write!(f, "{m}*p^{j}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `h⁻¹` for a diagonal checked once to be strictly increasing.
#[derive(Clone, Debug)]
pub struct DiagonalInverse {
    h: UnivariatePolynomial,
    tol: f64,
}

impl DiagonalInverse {
    /// Grid used for the one-off monotonicity check.
    pub const CHECK_POINTS: usize = 10_001;

    pub fn new(h: UnivariatePolynomial, tol: f64) -> Result<Self> {
        if !h.is_strictly_increasing(Self::CHECK_POINTS) {
            return Err(Error::domain(format!("h(p) = {h} is not strictly increasing on [0,1]")));
        }
        h.inverse(0.5, tol)?;
        Ok(DiagonalInverse { h, tol })
    }

    pub fn diagonal(&self) -> &UnivariatePolynomial {
        &self.h
    }

    pub fn apply(&self, y: f64) -> Result<f64> {
        self.h.inverse(y, self.tol)
    }
}
