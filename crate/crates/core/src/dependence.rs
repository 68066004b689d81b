//! Dependent component lifetimes through an exchangeable survival copula.
//!
//! With joint survival `P(X₁ > t₁, …, Xₙ > tₙ) = K(F̄₁(t₁), …, F̄ₙ(tₙ))`, the
//! system reliability is the structure-dependence function
//! `W(x) = Σ_S c_S K(x_S)`, where `S` runs over unions of minimal path sets
//! and `c_S` are the inclusion–exclusion coefficients of the structure
//! polynomial `H`. Applying `h⁻¹` to `W` gives the reliability of the IID
//! components of an equally reliable system with the same structure.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods come from libm on no_std targets
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lifetimes::LifetimeDistribution;
use crate::poly::{DiagonalInverse, MultilinearPolynomial};
use crate::system::{CoherentSystem, ComponentSet, MAX_EXPONENTIAL};

/// Exchangeable survival copulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurvivalCopula {
    /// `K(x) = Π xᵢ`.
    Independence,
    /// `K(x) = (Σ xᵢ^{−θ} − (n−1))^{−1/θ}`, `θ ≥ 0` (`θ = 0` is independence).
    Clayton { theta: f64 },
    /// `K(x) = exp(−(Σ (−ln xᵢ)^γ)^{1/γ})`, `γ ≥ 1` (`γ = 1` is independence).
    Gumbel { gamma: f64 },
}

impl SurvivalCopula {
    pub fn clayton(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::input(format!("Clayton theta must be finite and ≥ 0, got {theta}")));
        }
        Ok(SurvivalCopula::Clayton { theta })
    }

    pub fn gumbel(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(Error::input(format!("Gumbel gamma must be finite and ≥ 1, got {gamma}")));
        }
        Ok(SurvivalCopula::Gumbel { gamma })
    }

    pub fn is_independence(&self) -> bool {
        match *self {
            SurvivalCopula::Independence => true,
            SurvivalCopula::Clayton { theta } => theta == 0.0,
            SurvivalCopula::Gumbel { gamma } => gamma == 1.0,
        }
    }

    /// `K(x)`; every coordinate must lie in `[0, 1]`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::input(format!("copula argument {v} is outside [0, 1]")));
        }
        Ok(self.eval(x.iter().copied()))
    }

    /// `K` at the coordinates produced by `x`; coordinates equal to `1` may
    /// be omitted since the margins are uniform.
    pub fn eval<I: IntoIterator<Item = f64>>(&self, x: I) -> f64 {
        match *self {
            SurvivalCopula::Independence => x.into_iter().product(),
            SurvivalCopula::Clayton { theta } if theta == 0.0 => x.into_iter().product(),
            SurvivalCopula::Clayton { theta } => {
                // Σ (xᵢ^{−θ} − 1) written with expm1 so that small θ keeps its digits
                let mut s = 0.0;
                for v in x {
                    if v <= 0.0 {
                        return 0.0;
                    }
                    s += (-theta * v.ln()).exp_m1();
                }
                (-(s.ln_1p()) / theta).exp()
            }
            SurvivalCopula::Gumbel { gamma } => {
                let mut s = 0.0;
                for v in x {
                    if v <= 0.0 {
                        return 0.0;
                    }
                    s += (-v.ln()).powf(gamma);
                }
                (-s.powf(1.0 / gamma)).exp()
            }
        }
    }
}

/// `x_P`: `xᵢ` for `i ∈ P`, `1` elsewhere.
pub fn masked_argument(x: &[f64], set: ComponentSet) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| if set.bits() & (1 << i) != 0 { v } else { 1.0 })
        .collect()
}

/// A system with dependent components: structure, copula and marginals.
#[derive(Clone, Debug)]
pub struct StructureDependence {
    system: CoherentSystem,
    copula: SurvivalCopula,
    marginals: Vec<LifetimeDistribution>,
    poly: MultilinearPolynomial,
}

impl StructureDependence {
    pub fn new(
        system: CoherentSystem,
        copula: SurvivalCopula,
        marginals: Vec<LifetimeDistribution>,
    ) -> Result<Self> {
        if marginals.len() != system.order() {
            return Err(Error::input(format!(
                "{} marginals given for a system of order {}",
                marginals.len(),
                system.order()
            )));
        }
        let paths = system.path_sets().len();
        if paths > MAX_EXPONENTIAL {
            return Err(Error::capacity("number of minimal path sets", paths, MAX_EXPONENTIAL));
        }
        let poly = MultilinearPolynomial::from_path_sets(&system)?;
        Ok(StructureDependence { system, copula, marginals, poly })
    }

    pub fn system(&self) -> &CoherentSystem {
        &self.system
    }

    pub fn copula(&self) -> SurvivalCopula {
        self.copula
    }

    pub fn marginals(&self) -> &[LifetimeDistribution] {
        &self.marginals
    }

    pub fn polynomial(&self) -> &MultilinearPolynomial {
        &self.poly
    }

    /// `W(x)` for component reliabilities `x`.
    pub fn w_at(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.system.order() {
            return Err(Error::input(format!("W expects {} arguments, got {}", self.system.order(), x.len())));
        }
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::input(format!("W argument {v} is outside [0, 1]")));
        }
        Ok(self.w_unchecked(x))
    }

    fn w_unchecked(&self, x: &[f64]) -> f64 {
        let w: f64 = self
            .poly
            .terms()
            .map(|(s, c)| c as f64 * self.copula.eval(s.iter().map(|i| x[i.get() - 1])))
            .sum();
        w.clamp(0.0, 1.0)
    }

    /// System reliability `F̄_T(t) = W(F̄₁(t), …, F̄ₙ(t))`.
    pub fn w_value(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::input(format!("time must be non-negative, got {t}")));
        }
        let x: Vec<f64> = self.marginals.iter().map(|d| d.sf(t)).collect();
        Ok(self.w_unchecked(&x))
    }

    /// `δ(p) = W(p, …, p)`.
    pub fn delta(&self, p: f64) -> f64 {
        self.poly
            .terms()
            .map(|(s, c)| c as f64 * self.copula.eval(core::iter::repeat_n(p, s.len())))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// `m_W(x) = δ⁻¹(W(x))`.
    pub fn mean_function(&self, x: &[f64], tol: f64) -> Result<f64> {
        let y = self.w_at(x)?;
        invert_increasing(|p| self.delta(p), y, tol, "δ")
    }

    /// `h⁻¹(W(F̄₁(t), …, F̄ₙ(t)))` with `h` the IID reliability polynomial.
    pub fn equivalent_gbar(&self, t: f64, inverse: &DiagonalInverse) -> Result<f64> {
        inverse.apply(self.w_value(t)?)
    }
}

/// Bisection on `[0, 1]` down to adjacent floats, for a function that must
/// rise from `0` to `1`.
fn invert_increasing<F: Fn(f64) -> f64>(f: F, y: f64, tol: f64, name: &str) -> Result<f64> {
    let (f0, f1) = (f(0.0), f(1.0));
    if f0.abs() > tol || (f1 - 1.0).abs() > tol {
        return Err(Error::domain(format!("{name}(0) = {f0}, {name}(1) = {f1}; cannot invert")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = ((f(lo) - y).abs(), (f(hi) - y).abs());
    let (p, r) = if rl <= rh { (lo, rl) } else { (hi, rh) };
    if r > tol {
        return Err(Error::domain(format!(
            "{name}⁻¹({y}): residual {r:.3e} at p = {p} exceeds {tol:.1e}; {name} is not monotone"
        )));
    }
    Ok(p)
}

/// Mardia's multivariate Pareto joint survival
/// `(Σ xᵢ/σᵢ − (n−1))^{−α}` on `xᵢ ≥ σᵢ`.
pub fn mardia_joint_survival(sigma: &[f64], alpha: f64, x: &[f64]) -> Result<f64> {
    check_mardia(sigma, alpha)?;
    if x.len() != sigma.len() {
        return Err(Error::input("Mardia point and scale vectors differ in length"));
    }
    let mut s = 1.0 - sigma.len() as f64;
    for (&xi, &si) in x.iter().zip(sigma) {
        if !(xi >= si) {
            return Err(Error::input(format!("Mardia support requires x ≥ σ, got x = {xi}, σ = {si}")));
        }
        s += xi / si;
    }
    Ok(s.powf(-alpha))
}

/// Marginal survival `(x/σ)^{−α}` of the Mardia law.
pub fn mardia_marginal(sigma: f64, alpha: f64, x: f64) -> Result<f64> {
    check_mardia(&[sigma], alpha)?;
    if !(x >= sigma) {
        return Err(Error::input(format!("Mardia support requires x ≥ σ, got x = {x}, σ = {sigma}")));
    }
    Ok((x / sigma).powf(-alpha))
}

fn check_mardia(sigma: &[f64], alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::input(format!("Mardia alpha must be positive, got {alpha}")));
    }
    if sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::input("Mardia scales must be positive"));
    }
    Ok(())
}
