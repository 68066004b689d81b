//! Redundancy allocation: evaluate policies and rank them.
//!
//! A policy either wires spares in parallel with their targets (active) or
//! lets each spare take over when its target fails (standby). Each evaluated
//! policy carries its improved structure, signature, diagonal inverse and
//! component reliabilities, so that `Ḡ = h⁻¹(F̄_T)` and the order-statistic
//! mixture can be evaluated at any time.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dependence::{StructureDependence, SurvivalCopula};
use crate::error::{Error, Result};
use crate::grid::{TimeGrid, TAIL_LEVEL};
use crate::lifetimes::orders::{check_sampled, ST_TOL};
use crate::lifetimes::{convolve, mttf, ConvolutionConfig, LifetimeDistribution, MttfConfig, MttfEstimate, OrderRelation};
use crate::poly::{DiagonalInverse, MultilinearPolynomial};
use crate::signature::{order_statistic_survival, signature_by_subsets, Rational, Signature};
use crate::system::{ActiveAssignment, CoherentSystem, ComponentIndex};

/// Default MTTF tie tolerance (absolute, time units).
pub const MTTF_TIE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RedundancyKind {
    Active,
    Standby,
}

impl RedundancyKind {
    pub fn name(self) -> &'static str {
        match self {
            RedundancyKind::Active => "active",
            RedundancyKind::Standby => "standby",
        }
    }
}

/// One spare and the component it backs up.
#[derive(Clone, Debug, PartialEq)]
pub struct Allocation {
    pub target: ComponentIndex,
    pub spare: LifetimeDistribution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub name: String,
    pub kind: RedundancyKind,
    pub allocations: Vec<Allocation>,
}

impl Policy {
    pub fn new(name: impl Into<String>, kind: RedundancyKind, allocations: Vec<Allocation>) -> Self {
        Policy { name: name.into(), kind, allocations }
    }

    /// A single spare on component `target` (1-based).
    pub fn single(name: impl Into<String>, kind: RedundancyKind, target: usize, spare: LifetimeDistribution) -> Result<Self> {
        Ok(Policy::new(name, kind, alloc::vec![Allocation { target: ComponentIndex::new(target)?, spare }]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub convolution: ConvolutionConfig,
    pub mttf: MttfConfig,
    /// Residual tolerance of `h⁻¹`.
    pub inverse_tol: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { convolution: ConvolutionConfig::default(), mttf: MttfConfig::default(), inverse_tol: 1e-9 }
    }
}

/// How the system reliability is obtained from the component reliabilities.
#[derive(Clone, Debug)]
enum Reliability {
    Independent(MultilinearPolynomial),
    Dependent(StructureDependence),
}

/// An evaluated policy.
#[derive(Clone, Debug)]
pub struct PolicyEvaluation {
    policy: Policy,
    system: CoherentSystem,
    signature: Signature,
    signature_f64: Vec<f64>,
    inverse: DiagonalInverse,
    marginals: Vec<LifetimeDistribution>,
    copula: Option<SurvivalCopula>,
    reliability: Reliability,
    mttf_config: MttfConfig,
}

/// Applies `policy` to `base` with component lifetimes `marginals` and an
/// optional survival copula linking all components, spares included.
pub fn evaluate_policy(
    base: &CoherentSystem,
    marginals: &[LifetimeDistribution],
    policy: &Policy,
    copula: Option<SurvivalCopula>,
    config: &EvalConfig,
) -> Result<PolicyEvaluation> {
    base.ensure_valid()?;
    let n = base.order();
    if marginals.len() != n {
        return Err(Error::input(format!("{} marginals given for a system of order {n}", marginals.len())));
    }
    for a in &policy.allocations {
        if a.target.get() > n {
            return Err(Error::input(format!("policy '{}' targets component {} of a system of order {n}", policy.name, a.target)));
        }
    }
    let copula = copula.filter(|c| !c.is_independence());
    let (system, marginals) = match policy.kind {
        RedundancyKind::Active => {
            let targets: Vec<usize> = policy.allocations.iter().map(|a| a.target.get()).collect();
            let system = base.apply_active_redundancy(&ActiveAssignment::from_targets(n, &targets)?)?;
            let mut m = marginals.to_vec();
            m.extend(policy.allocations.iter().map(|a| a.spare.clone()));
            (system, m)
        }
        RedundancyKind::Standby => {
            if copula.is_some() {
                return Err(Error::Unsupported(format!(
                    "policy '{}': standby redundancy is only modelled for independent components",
                    policy.name
                )));
            }
            let mut m = marginals.to_vec();
            for a in &policy.allocations {
                let i = a.target.get() - 1;
                m[i] = convolve(&m[i], &a.spare, &config.convolution)?;
            }
            (base.clone(), m)
        }
    };
    let poly = MultilinearPolynomial::from_path_sets(&system)?;
    let signature = signature_by_subsets(&system)?;
    let inverse = DiagonalInverse::new(poly.diagonal(), config.inverse_tol)?;
    let reliability = match copula {
        None => Reliability::Independent(poly),
        Some(k) => Reliability::Dependent(StructureDependence::new(system.clone(), k, marginals.clone())?),
    };
    Ok(PolicyEvaluation {
        policy: policy.clone(),
        signature_f64: signature.to_f64(),
        system,
        signature,
        inverse,
        marginals,
        copula,
        reliability,
        mttf_config: config.mttf.clone(),
    })
}

impl PolicyEvaluation {
    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn system(&self) -> &CoherentSystem {
        &self.system
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn diagonal_inverse(&self) -> &DiagonalInverse {
        &self.inverse
    }

    /// Component lifetimes of the improved system (spares appended for
    /// active policies, convolutions in place for standby).
    pub fn marginals(&self) -> &[LifetimeDistribution] {
        &self.marginals
    }

    pub fn copula(&self) -> Option<SurvivalCopula> {
        self.copula
    }

    /// `F̄_T(t)` from `H` (independent) or `W` (dependent).
    pub fn ft_bar(&self, t: f64) -> f64 {
        let x: Vec<f64> = self.marginals.iter().map(|d| d.sf(t)).collect();
        match &self.reliability {
            Reliability::Independent(h) => h.evaluate_unchecked(&x).clamp(0.0, 1.0),
            Reliability::Dependent(w) => w.w_value(t.max(0.0)).unwrap_or(0.0),
        }
    }

    /// `Ḡ(t) = h⁻¹(F̄_T(t))`.
    pub fn gbar(&self, t: f64) -> Result<f64> {
        self.inverse.apply(self.ft_bar(t))
    }

    /// `Σ sᵢ Ḡ_{i:n}(t)`, the signature form of `F̄_T`.
    pub fn ft_bar_mixture(&self, t: f64) -> Result<f64> {
        let g = self.gbar(t)?;
        let n = self.signature_f64.len();
        let mut total = 0.0;
        for (i, &s) in self.signature_f64.iter().enumerate() {
            if s != 0.0 {
                total += s * order_statistic_survival(i + 1, n, g)?;
            }
        }
        Ok(total)
    }

    pub fn mttf(&self) -> Result<MttfEstimate> {
        mttf(|t| self.ft_bar(t), &self.mttf_config)
    }

    /// Time by which every component reliability is below `TAIL_LEVEL`.
    pub fn horizon(&self) -> f64 {
        self.marginals.iter().map(|d| d.inverse_sf(TAIL_LEVEL)).fold(0.0, f64::max)
    }

    pub fn sample_ft_bar(&self, grid: &TimeGrid) -> Vec<f64> {
        grid.points().iter().map(|&t| self.ft_bar(t)).collect()
    }

    pub fn sample_gbar(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        grid.points().iter().map(|&t| self.gbar(t)).collect()
    }
}

/// Certification grid reaching the horizon of every evaluation, capped by
/// `t_cap` (heavy tails would otherwise push it out to ~1e8).
pub fn default_grid(evals: &[&PolicyEvaluation], t_cap: f64) -> Result<TimeGrid> {
    let t = evals.iter().map(|e| e.horizon()).fold(0.0, f64::max).min(t_cap);
    TimeGrid::certification(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preference {
    First,
    Second,
    Tie,
    /// Curves cross and no MTTF could be computed.
    Incomparable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Equal signatures and pointwise ordered `Ḡ`.
    GbarOrder,
    /// Equal `Ḡ` and ordered signatures.
    SignatureOrder,
    /// Pointwise ordered `F̄_T` with differing signatures and `Ḡ`.
    StDominance,
    /// `F̄_T` curves cross; decided by the mean time to failure.
    MttfFallback,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::GbarOrder => "gbar-order",
            Basis::SignatureOrder => "signature-order",
            Basis::StDominance => "st-dominance-on-grid",
            Basis::MttfFallback => "mttf-fallback",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonVerdict {
    pub preferred: Preference,
    pub basis: Basis,
    /// Grid times at which `F̄_T¹ − F̄_T²` changes sign (beyond `ST_TOL`).
    pub crossings: Vec<f64>,
    /// Largest `F̄_T² − F̄_T¹` and `F̄_T¹ − F̄_T²` on the grid.
    pub max_deficit: (f64, f64),
    pub mttfs: Option<(f64, f64)>,
    pub note: Option<String>,
}

/// Ranks two evaluations on `grid`.
pub fn compare(e1: &PolicyEvaluation, e2: &PolicyEvaluation, grid: &TimeGrid, tie_tol: f64) -> ComparisonVerdict {
    let f1 = e1.sample_ft_bar(grid);
    let f2 = e2.sample_ft_bar(grid);
    let one_ge_two = check_sampled(&f2, &f1, OrderRelation::St, grid).holds();
    let two_ge_one = check_sampled(&f1, &f2, OrderRelation::St, grid).holds();
    let max_deficit = f1.iter().zip(&f2).fold((0.0f64, 0.0f64), |(a, b), (&x, &y)| (a.max(y - x), b.max(x - y)));
    let crossings = crossings(grid.points(), &f1, &f2);

    let same_signature = e1.signature == e2.signature;
    let mut basis = if same_signature { Basis::GbarOrder } else { Basis::StDominance };
    if !same_signature && e1.signature.len() == e2.signature.len() {
        // Ḡ equal on the grid: the signatures decide
        let equal_gbar = match (e1.sample_gbar(grid), e2.sample_gbar(grid)) {
            (Ok(g1), Ok(g2)) => g1.iter().zip(&g2).all(|(a, b)| (a - b).abs() <= 1e-9),
            _ => false,
        };
        if equal_gbar {
            let s12 = signature_order(&e1.signature, &e2.signature, OrderRelation::St);
            let s21 = signature_order(&e2.signature, &e1.signature, OrderRelation::St);
            if matches!((&s12, &s21), (Ok(a), Ok(b)) if a.holds || b.holds) {
                basis = Basis::SignatureOrder;
            }
        }
    }
    let mut verdict = ComparisonVerdict {
        preferred: Preference::Tie,
        basis,
        crossings,
        max_deficit,
        mttfs: None,
        note: None,
    };
    verdict.preferred = match (one_ge_two, two_ge_one) {
        (true, true) => Preference::Tie,
        (true, false) => Preference::First,
        (false, true) => Preference::Second,
        (false, false) => {
            verdict.basis = Basis::MttfFallback;
            match (e1.mttf(), e2.mttf()) {
                (Ok(m1), Ok(m2)) => {
                    verdict.mttfs = Some((m1.value, m2.value));
                    prefer_larger(m1.value, m2.value, tie_tol)
                }
                (r1, r2) => {
                    let err = r1.err().or(r2.err()).unwrap();
                    verdict.note = Some(format!("MTTF unavailable: {err}"));
                    Preference::Incomparable
                }
            }
        }
    };
    verdict
}

fn prefer_larger(a: f64, b: f64, tie_tol: f64) -> Preference {
    if (a - b).abs() < tie_tol {
        Preference::Tie
    } else if a > b {
        Preference::First
    } else {
        Preference::Second
    }
}

/// Grid points where the sign of `a − b` flips, ignoring differences within
/// `ST_TOL`.
pub fn crossings(ts: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last = 0i8;
    for ((&t, &x), &y) in ts.iter().zip(a).zip(b) {
        let d = x - y;
        let s = if d > ST_TOL {
            1
        } else if d < -ST_TOL {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                out.push(t);
            }
            last = s;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignatureOrder {
    pub relation: OrderRelation,
    pub holds: bool,
    /// Indices `(i, j)`, 1-based, of a violated inequality.
    pub witness: Option<(usize, usize)>,
}

/// Checks `s₁ ≤ s₂` in the st, hr or lr order, exactly.
pub fn signature_order(s1: &Signature, s2: &Signature, relation: OrderRelation) -> Result<SignatureOrder> {
    if s1.len() != s2.len() {
        return Err(Error::input(format!("signatures of lengths {} and {} cannot be compared", s1.len(), s2.len())));
    }
    let tail = |s: &Signature| -> Vec<Rational> {
        let mut acc = Rational::from_integer(0);
        let mut out: Vec<Rational> = s
            .as_slice()
            .iter()
            .rev()
            .map(|&v| {
                acc += v;
                acc
            })
            .collect();
        out.reverse();
        out
    };
    let n = s1.len();
    let witness = match relation {
        OrderRelation::St => {
            let (t1, t2) = (tail(s1), tail(s2));
            (0..n).find(|&j| t1[j] > t2[j]).map(|j| (j + 1, j + 1))
        }
        OrderRelation::Hr | OrderRelation::Lr => {
            let (a, b) = if relation == OrderRelation::Hr {
                (tail(s1), tail(s2))
            } else {
                (s1.as_slice().to_vec(), s2.as_slice().to_vec())
            };
            // b/a non-decreasing: b_j a_i ≥ b_i a_j for i < j
            let mut found = None;
            'outer: for i in 0..n {
                for j in i + 1..n {
                    if b[j] * a[i] < b[i] * a[j] {
                        found = Some((i + 1, j + 1));
                        break 'outer;
                    }
                }
            }
            found
        }
        OrderRelation::Rr2 => return Err(Error::input("RR2 is not an order between signatures")),
    };
    Ok(SignatureOrder { relation, holds: witness.is_none(), witness })
}

#[derive(Clone, Debug)]
pub struct AllocationCandidate {
    pub target: usize,
    pub evaluation: PolicyEvaluation,
    /// Whether this policy is st-larger than every other on the grid.
    pub dominant: bool,
    pub mttf: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct OptimalAllocation {
    /// Best targets (more than one on a tie), 1-based.
    pub best: Vec<usize>,
    pub basis: Basis,
    pub candidates: Vec<AllocationCandidate>,
}

/// Tries a single spare on each component in turn. An st-dominant policy
/// wins; otherwise the largest MTTF, with ties within `tie_tol`.
pub fn optimal_allocation(
    base: &CoherentSystem,
    marginals: &[LifetimeDistribution],
    spare: &LifetimeDistribution,
    kind: RedundancyKind,
    copula: Option<SurvivalCopula>,
    config: &EvalConfig,
    grid: Option<&TimeGrid>,
    tie_tol: f64,
) -> Result<OptimalAllocation> {
    let n = base.order();
    let evals = (1..=n)
        .map(|i| {
            let policy = Policy::single(format!("spare on {i}"), kind, i, spare.clone())?;
            evaluate_policy(base, marginals, &policy, copula, config)
        })
        .collect::<Result<Vec<_>>>()?;
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = default_grid(&evals.iter().collect::<Vec<_>>(), config.mttf.t_max)?;
            &owned
        }
    };
    let curves: Vec<Vec<f64>> = evals.iter().map(|e| e.sample_ft_bar(grid)).collect();
    let dominant: Vec<bool> = (0..n)
        .map(|i| (0..n).all(|j| check_sampled(&curves[j], &curves[i], OrderRelation::St, grid).holds()))
        .collect();

    let mut candidates: Vec<AllocationCandidate> = evals
        .into_iter()
        .enumerate()
        .map(|(i, evaluation)| AllocationCandidate { target: i + 1, evaluation, dominant: dominant[i], mttf: None })
        .collect();

    if dominant.iter().any(|&d| d) {
        let best = candidates.iter().filter(|c| c.dominant).map(|c| c.target).collect();
        // MTTFs are reported when available; they do not affect the choice
        for c in &mut candidates {
            c.mttf = c.evaluation.mttf().ok().map(|m| m.value);
        }
        let basis = if candidates.iter().all(|c| c.evaluation.signature == candidates[0].evaluation.signature) {
            Basis::GbarOrder
        } else {
            Basis::StDominance
        };
        return Ok(OptimalAllocation { best, basis, candidates });
    }
    for c in &mut candidates {
        c.mttf = Some(c.evaluation.mttf()?.value);
    }
    let top = candidates.iter().map(|c| c.mttf.unwrap()).fold(f64::NEG_INFINITY, f64::max);
    let best = candidates.iter().filter(|c| top - c.mttf.unwrap() < tie_tol).map(|c| c.target).collect();
    Ok(OptimalAllocation { best, basis: Basis::MttfFallback, candidates })
}
