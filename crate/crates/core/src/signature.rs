//! Exact system signatures and the order-statistic mixture.
//!
//! `s_i` is the probability that, with IID continuous component lifetimes,
//! the system fails exactly at the `i`-th component failure. Then
//! `F̄_T(t) = Σ s_i Ḡ_{i:n}(t)` for the common component reliability `Ḡ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::system::{CoherentSystem, ComponentSet, MAX_EXPONENTIAL};

pub type Rational = Ratio<i128>;

/// Order limit of [`signature_by_enumeration`] (it visits all `n!` orders).
pub const MAX_ENUMERATION_ORDER: usize = 10;

/// Probability vector over the failure index `1..=n`, with exact entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(Vec<Rational>);

impl Signature {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("empty signature"));
        }
        if entries.iter().any(|s| s.is_negative()) {
            return Err(Error::input("signature has a negative entry"));
        }
        let total: Rational = entries.iter().copied().sum();
        if !total.is_one() {
            return Err(Error::input(format!("signature sums to {total}, not 1")));
        }
        Ok(Signature(entries))
    }

    /// Convenience for literals: `Signature::from_pairs(&[(0, 1), (1, 15), ...])`.
    pub fn from_pairs(pairs: &[(i128, i128)]) -> Result<Self> {
        if pairs.iter().any(|&(_, q)| q == 0) {
            return Err(Error::input("zero denominator"));
        }
        Self::new(pairs.iter().map(|&(p, q)| Rational::new(p, q)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect()
    }

    /// Reversed vector: the signature of the dual system.
    pub fn reversed(&self) -> Signature {
        Signature(self.0.iter().rev().copied().collect())
    }

    /// `Σ_i s_i Ḡ_{i:n}` for a common component reliability `gbar`.
    pub fn mixture_reliability(&self, gbar: f64) -> f64 {
        let n = self.0.len();
        self.to_f64()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0.0)
            .map(|(k, &s)| s * order_statistic_survival(k + 1, n, gbar).unwrap_or(f64::NAN))
            .sum()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// `φ_k`: fraction of size-`k` component subsets whose working leaves the
/// system working, `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivalSignatureTable {
    phi: Vec<Rational>,
}

impl SurvivalSignatureTable {
    pub fn compute(system: &CoherentSystem) -> Result<Self> {
        system.ensure_valid()?;
        let n = system.order();
        if n > MAX_EXPONENTIAL {
            return Err(Error::capacity("system order", n, MAX_EXPONENTIAL));
        }
        let mut working = vec![0i128; n + 1];
        for bits in 0u32..(1u32 << n) {
            let set = ComponentSet::from_bits(bits);
            if system.works(set) {
                working[set.len()] += 1;
            }
        }
        let phi = working
            .iter()
            .enumerate()
            .map(|(k, &w)| Rational::new(w, binomial_exact(n, k)))
            .collect();
        Ok(SurvivalSignatureTable { phi })
    }

    pub fn values(&self) -> &[Rational] {
        &self.phi
    }

    /// `s_i = φ_{n-i+1} − φ_{n-i}`.
    pub fn signature(&self) -> Signature {
        let n = self.phi.len() - 1;
        Signature((1..=n).map(|i| self.phi[n - i + 1] - self.phi[n - i]).collect())
    }
}

/// Signature from the survival-signature identity; `n ≤ 20`.
pub fn signature_by_subsets(system: &CoherentSystem) -> Result<Signature> {
    Ok(SurvivalSignatureTable::compute(system)?.signature())
}

/// Signature by walking every failure order of the components; `n ≤ 10`.
pub fn signature_by_enumeration(system: &CoherentSystem) -> Result<Signature> {
    system.ensure_valid()?;
    let n = system.order();
    if n > MAX_ENUMERATION_ORDER {
        return Err(Error::capacity(
            "system order for enumeration",
            n,
            MAX_ENUMERATION_ORDER,
        ));
    }
    let works: Vec<bool> = (0u32..(1u32 << n))
        .map(|b| system.works(ComponentSet::from_bits(b)))
        .collect();
    let full = ComponentSet::full(n).bits();
    let mut counts = vec![0i128; n];
    let mut tally = |perm: &[usize]| {
        let mut alive = full;
        for (k, &c) in perm.iter().enumerate() {
            alive &= !(1u32 << c);
            if !works[alive as usize] {
                counts[k] += 1;
                return;
            }
        }
    };

    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    tally(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }

    let total: i128 = (1..=n as i128).product();
    Signature::new(counts.into_iter().map(|k| Rational::new(k, total)).collect())
}

/// `Ḡ_{i:n}` at a point where the parent reliability is `gbar`:
/// `Σ_{j=0}^{i-1} C(n,j) G^j Ḡ^{n-j}`.
pub fn order_statistic_survival(i: usize, n: usize, gbar: f64) -> Result<f64> {
    if i == 0 || i > n {
        return Err(Error::input(format!("order statistic {i} of {n}")));
    }
    let g = 1.0 - gbar;
    let value: f64 = (0..i)
        .map(|j| binomial_f64(n, j) * powi(g, j) * powi(gbar, n - j))
        .sum();
    Ok(value.clamp(0.0, 1.0))
}

/// `E(n, i, a) = Σ_{j=i}^{n} C(n,j) a^j (1−a)^{n−j}`, the probability of at
/// least `i` successes in `n` Bernoulli(`a`) trials.
pub fn binomial_upper_tail(n: usize, i: usize, a: f64) -> f64 {
    (i..=n)
        .map(|j| binomial_f64(n, j) * powi(a, j) * powi(1.0 - a, n - j))
        .sum()
}

fn binomial_exact(n: usize, k: usize) -> i128 {
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, j| acc * (n - j) as i128 / (j as i128 + 1))
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial_exact(n, k) as f64
}

#[inline]
fn powi(x: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::ActiveAssignment;
    use num_traits::Zero;

    fn sig(pairs: &[(i128, i128)]) -> Signature {
        Signature::from_pairs(pairs).unwrap()
    }

    fn bridge_with_spare(target: usize) -> CoherentSystem {
        CoherentSystem::bridge()
            .apply_active_redundancy(&ActiveAssignment::from_targets(5, &[target]).unwrap())
            .unwrap()
    }

    #[test]
    fn series_and_parallel() {
        for n in 1..=6 {
            let series = CoherentSystem::series(n).unwrap();
            let parallel = CoherentSystem::parallel(n).unwrap();
            let s = signature_by_enumeration(&series).unwrap();
            assert!(s.as_slice()[0].is_one());
            let p = signature_by_subsets(&parallel).unwrap();
            assert!(p.as_slice()[n - 1].is_one());
            assert_eq!(s.reversed(), p);
        }
    }

    #[test]
    fn series_with_spare() {
        let sys = CoherentSystem::new(3, vec![vec![1, 2], vec![2, 3]]).unwrap();
        let expected = sig(&[(1, 3), (2, 3), (0, 1)]);
        assert_eq!(signature_by_enumeration(&sys).unwrap(), expected);
        assert_eq!(signature_by_subsets(&sys).unwrap(), expected);
    }

    #[test]
    fn bridge_signatures() {
        let base = sig(&[(0, 1), (1, 5), (3, 5), (1, 5), (0, 1)]);
        assert_eq!(signature_by_enumeration(&CoherentSystem::bridge()).unwrap(), base);

        let side = sig(&[(0, 1), (1, 15), (7, 30), (1, 2), (1, 5), (0, 1)]);
        let middle = sig(&[(0, 1), (2, 15), (4, 15), (7, 15), (2, 15), (0, 1)]);
        for target in 1..=4 {
            let sys = bridge_with_spare(target);
            assert_eq!(signature_by_subsets(&sys).unwrap(), side, "target {target}");
            assert_eq!(signature_by_enumeration(&sys).unwrap(), side, "target {target}");
        }
        let sys = bridge_with_spare(5);
        assert_eq!(signature_by_subsets(&sys).unwrap(), middle);
        assert_eq!(signature_by_enumeration(&sys).unwrap(), middle);
    }

    #[test]
    fn survival_signature_bounds() {
        let t = SurvivalSignatureTable::compute(&CoherentSystem::bridge()).unwrap();
        let phi = t.values();
        assert!(phi[0].is_zero() && phi[5].is_one());
        assert!(phi.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn capacity_limits() {
        let big = CoherentSystem::series(11).unwrap();
        assert!(matches!(
            signature_by_enumeration(&big),
            Err(Error::Capacity { .. })
        ));
        assert!(signature_by_subsets(&big).is_ok());
        let bigger = CoherentSystem::series(21).unwrap();
        assert!(signature_by_subsets(&bigger).is_err());
    }

    #[test]
    fn order_statistics() {
        assert!((order_statistic_survival(1, 2, 0.5).unwrap() - 0.25).abs() < 1e-15);
        for &g in &[0.0, 0.1, 0.5, 0.93, 1.0] {
            let max = order_statistic_survival(4, 4, g).unwrap();
            assert!((max - (1.0 - (1.0 - g).powi(4))).abs() < 1e-14);
            for i in 1..=4 {
                let v = order_statistic_survival(i, 4, g).unwrap();
                assert!((v - (1.0 - binomial_upper_tail(4, i, 1.0 - g))).abs() < 1e-14);
            }
        }
        // G = 0.3 → Ḡ = 0.7: 0.7³ + 3·0.3·0.7²
        assert!((order_statistic_survival(2, 3, 0.7).unwrap() - 0.784).abs() < 1e-14);
        assert!(order_statistic_survival(0, 3, 0.5).is_err());
        assert!(order_statistic_survival(4, 3, 0.5).is_err());
    }

    #[test]
    fn mixture_special_cases() {
        let series2 = sig(&[(1, 1), (0, 1)]);
        assert!((series2.mixture_reliability(0.8) - 0.64).abs() < 1e-15);
        let parallel3 = sig(&[(0, 1), (0, 1), (1, 1)]);
        assert!((parallel3.mixture_reliability(0.3) - (1.0 - 0.7f64.powi(3))).abs() < 1e-15);
    }

    #[test]
    fn signature_validation() {
        assert!(Signature::from_pairs(&[(1, 2), (1, 3)]).is_err());
        assert!(Signature::from_pairs(&[(3, 2), (-1, 2)]).is_err());
        assert_eq!(alloc::format!("{}", sig(&[(1, 3), (2, 3), (0, 1)])), "1/3, 2/3, 0");
    }
}
