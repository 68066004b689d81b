//! Seeded simulation of system lifetimes, used to cross-check the analytic
//! pipeline.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` uses its own ChaCha8
//! stream, so the result does not depend on how chunks are scheduled. The
//! std companion crate runs chunks on a thread pool and merges the integer
//! counts, which gives bit-identical estimates.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods come from libm on no_std targets
use num_traits::Float;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::dependence::SurvivalCopula;
use crate::engine::{Policy, RedundancyKind};
use crate::error::{Error, Result};
use crate::lifetimes::LifetimeDistribution;
use crate::system::{ActiveAssignment, CoherentSystem};

/// Smallest accepted sample size.
pub const MIN_SAMPLES: u64 = 1_000;
pub const DEFAULT_CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, chunk: DEFAULT_CHUNK }
    }

    pub fn chunks(&self) -> u64 {
        self.samples.div_ceil(self.chunk)
    }

    /// Number of samples in chunk `c`.
    pub fn chunk_len(&self, c: u64) -> u64 {
        self.chunk.min(self.samples - c * self.chunk)
    }
}

/// Survival counts per grid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts {
    pub samples: u64,
    pub survivors: Vec<u64>,
}

impl Counts {
    pub fn zero(points: usize) -> Self {
        Counts { samples: 0, survivors: vec![0; points] }
    }

    pub fn merge(mut self, other: &Counts) -> Self {
        self.samples += other.samples;
        for (a, b) in self.survivors.iter_mut().zip(&other.survivors) {
            *a += b;
        }
        self
    }
}

/// Estimated `F̄_T` with binomial standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub std_error: Vec<f64>,
    pub samples: u64,
}

impl McEstimate {
    pub fn from_counts(times: &[f64], counts: &Counts) -> Self {
        let n = counts.samples as f64;
        let survival: Vec<f64> = counts.survivors.iter().map(|&k| k as f64 / n).collect();
        let std_error = survival.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
        McEstimate { times: times.to_vec(), survival, std_error, samples: counts.samples }
    }
}

/// Draws lifetimes of an improved system.
#[derive(Clone, Debug)]
pub struct SystemSampler {
    system: CoherentSystem,
    marginals: Vec<LifetimeDistribution>,
    copula: SurvivalCopula,
    /// `(component, spare)` pairs added in standby.
    standby: Vec<(usize, LifetimeDistribution)>,
}

impl SystemSampler {
    pub fn new(
        base: &CoherentSystem,
        marginals: &[LifetimeDistribution],
        policy: &Policy,
        copula: Option<SurvivalCopula>,
    ) -> Result<Self> {
        base.ensure_valid()?;
        let n = base.order();
        if marginals.len() != n {
            return Err(Error::input(format!("{} marginals given for a system of order {n}", marginals.len())));
        }
        let copula = copula.unwrap_or(SurvivalCopula::Independence);
        match policy.kind {
            RedundancyKind::Active => {
                let targets: Vec<usize> = policy.allocations.iter().map(|a| a.target.get()).collect();
                let system = base.apply_active_redundancy(&ActiveAssignment::from_targets(n, &targets)?)?;
                let mut m = marginals.to_vec();
                m.extend(policy.allocations.iter().map(|a| a.spare.clone()));
                Ok(SystemSampler { system, marginals: m, copula, standby: Vec::new() })
            }
            RedundancyKind::Standby => {
                if !copula.is_independence() {
                    return Err(Error::Unsupported(format!(
                        "policy '{}': standby redundancy is only simulated for independent components",
                        policy.name
                    )));
                }
                let mut standby = Vec::new();
                for a in &policy.allocations {
                    if a.target.get() > n {
                        return Err(Error::input(format!("policy '{}' targets component {}", policy.name, a.target)));
                    }
                    standby.push((a.target.get() - 1, a.spare.clone()));
                }
                Ok(SystemSampler { system: base.clone(), marginals: marginals.to_vec(), copula, standby })
            }
        }
    }

    pub fn order(&self) -> usize {
        self.system.order()
    }

    /// Reliabilities `V` with `P(V₁ < x₁, …, Vₙ < xₙ) = K(x)`, so that
    /// `Xᵢ = F̄ᵢ⁻¹(Vᵢ)` has joint survival `K(F̄₁, …, F̄ₙ)`.
    fn sample_levels<R: Rng>(&self, rng: &mut R, out: &mut [f64]) -> Result<()> {
        match self.copula {
            SurvivalCopula::Independence => out.iter_mut().for_each(|v| *v = rng.sample(Open01)),
            SurvivalCopula::Clayton { theta } if theta == 0.0 => {
                out.iter_mut().for_each(|v| *v = rng.sample(Open01))
            }
            SurvivalCopula::Clayton { theta } => {
                let frailty = Gamma::new(1.0 / theta, 1.0)
                    .map_err(|e| Error::input(format!("Clayton frailty: {e}")))?
                    .sample(rng);
                for v in out.iter_mut() {
                    let e: f64 = Exp1.sample(rng);
                    *v = (-(e / frailty).ln_1p() / theta).exp();
                }
            }
            SurvivalCopula::Gumbel { gamma } => {
                let frailty = positive_stable(1.0 / gamma, rng);
                for v in out.iter_mut() {
                    let e: f64 = Exp1.sample(rng);
                    *v = (-(e / frailty).powf(1.0 / gamma)).exp();
                }
            }
        }
        Ok(())
    }

    /// One system lifetime.
    pub fn sample<R: Rng>(&self, rng: &mut R, levels: &mut Vec<f64>, lifetimes: &mut Vec<f64>) -> Result<f64> {
        let n = self.system.order();
        levels.resize(n, 0.0);
        self.sample_levels(rng, levels)?;
        lifetimes.clear();
        lifetimes.extend(levels.iter().zip(&self.marginals).map(|(&v, d)| d.inverse_sf(v)));
        for (i, spare) in &self.standby {
            let v: f64 = rng.sample(Open01);
            lifetimes[*i] += spare.inverse_sf(v);
        }
        Ok(self
            .system
            .path_sets()
            .iter()
            .map(|p| p.iter().map(|i| lifetimes[i.get() - 1]).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max))
    }

    /// Survival counts of chunk `c` on `times`.
    pub fn run_chunk(&self, config: &McConfig, c: u64, times: &[f64]) -> Result<Counts> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(c);
        let mut counts = Counts::zero(times.len());
        let mut levels = Vec::new();
        let mut lifetimes = Vec::new();
        let len = config.chunk_len(c);
        for _ in 0..len {
            let t_sys = self.sample(&mut rng, &mut levels, &mut lifetimes)?;
            for (k, &t) in times.iter().enumerate() {
                if t_sys > t {
                    counts.survivors[k] += 1;
                }
            }
        }
        counts.samples = len;
        Ok(counts)
    }

    /// Sequential estimate; identical to any parallel schedule of the chunks.
    pub fn estimate(&self, config: &McConfig, times: &[f64]) -> Result<McEstimate> {
        check_config(config)?;
        let mut total = Counts::zero(times.len());
        for c in 0..config.chunks() {
            total = total.merge(&self.run_chunk(config, c, times)?);
        }
        Ok(McEstimate::from_counts(times, &total))
    }
}

pub fn check_config(config: &McConfig) -> Result<()> {
    if config.samples < MIN_SAMPLES {
        return Err(Error::input(format!("Monte Carlo needs at least {MIN_SAMPLES} samples, got {}", config.samples)));
    }
    if config.chunk == 0 {
        return Err(Error::input("Monte Carlo chunk size must be positive"));
    }
    Ok(())
}

/// Positive `a`-stable variable with Laplace transform `exp(−s^a)`,
/// `0 < a ≤ 1`, by Kanter's representation.
pub fn positive_stable<R: Rng>(a: f64, rng: &mut R) -> f64 {
    if a >= 1.0 {
        return 1.0;
    }
    let u: f64 = core::f64::consts::PI * rng.sample::<f64, _>(Open01);
    let e: f64 = Exp1.sample(rng);
    (a * u).sin() / u.sin().powf(1.0 / a) * (((1.0 - a) * u).sin() / e).powf((1.0 - a) / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{evaluate_policy, EvalConfig};

    fn exp(rate: f64) -> LifetimeDistribution {
        LifetimeDistribution::exponential(rate).unwrap()
    }

    fn none() -> Policy {
        Policy::new("none", RedundancyKind::Active, Vec::new())
    }

    #[test]
    fn series_of_exponentials() {
        let s = SystemSampler::new(&CoherentSystem::series(2).unwrap(), &[exp(1.0), exp(1.0)], &none(), None).unwrap();
        let est = s.estimate(&McConfig::new(100_000, 7), &[0.0, 0.5]).unwrap();
        assert_eq!(est.survival[0], 1.0);
        assert_eq!(est.std_error[0], 0.0);
        let exact = (-1.0f64).exp();
        assert!((est.survival[1] - exact).abs() < 4.0 * est.std_error[1]);
    }

    #[test]
    fn deterministic_and_chunk_independent() {
        let s = SystemSampler::new(&CoherentSystem::bridge(), &vec![exp(1.0); 5], &none(), Some(SurvivalCopula::gumbel(2.0).unwrap())).unwrap();
        let times = [0.2, 0.6];
        let a = s.estimate(&McConfig::new(10_000, 3), &times).unwrap();
        let b = s.estimate(&McConfig::new(10_000, 3), &times).unwrap();
        assert_eq!(a, b);
        let c = s.estimate(&McConfig::new(10_000, 4), &times).unwrap();
        assert_ne!(a, c);
        assert!(s.estimate(&McConfig::new(10, 3), &times).is_err());
    }

    #[test]
    fn copula_samplers_match_their_survival_functions() {
        // a series system survives t iff both components do: K(F̄₁(t), F̄₂(t))
        for k in [SurvivalCopula::clayton(2.0).unwrap(), SurvivalCopula::gumbel(1.7).unwrap()] {
            let s = SystemSampler::new(&CoherentSystem::series(2).unwrap(), &[exp(1.0), exp(2.0)], &none(), Some(k)).unwrap();
            let times = [0.1, 0.4, 1.0];
            let est = s.estimate(&McConfig::new(200_000, 11), &times).unwrap();
            for (j, &t) in times.iter().enumerate() {
                let exact = k.value(&[(-t).exp(), (-2.0 * t).exp()]).unwrap();
                assert!((est.survival[j] - exact).abs() < 4.0 * est.std_error[j], "{k:?} t={t}");
            }
        }
    }

    #[test]
    fn standby_matches_the_analytic_pipeline() {
        let base = CoherentSystem::series(2).unwrap();
        let m = [exp(1.0), LifetimeDistribution::pareto(1.0).unwrap()];
        let p = Policy::single("I", RedundancyKind::Standby, 1, exp(2.0)).unwrap();
        let s = SystemSampler::new(&base, &m, &p, None).unwrap();
        let e = evaluate_policy(&base, &m, &p, None, &EvalConfig::default()).unwrap();
        let times = [0.3, 1.0, 2.5];
        let est = s.estimate(&McConfig::new(200_000, 5), &times).unwrap();
        for (j, &t) in times.iter().enumerate() {
            assert!((est.survival[j] - e.ft_bar(t)).abs() < 4.0 * est.std_error[j]);
        }
        assert!(SystemSampler::new(&base, &m, &p, Some(SurvivalCopula::clayton(1.0).unwrap())).is_err());
    }

    #[test]
    fn stable_laplace_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = 0.6;
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| (-positive_stable(a, &mut rng)).exp()).sum::<f64>() / n as f64;
        assert!((mean - (-1.0f64).exp()).abs() < 3e-3);
    }
}
