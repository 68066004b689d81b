//! Coherent systems described by their minimal path sets.
//!
//! A system of order `n` works iff every component of at least one minimal
//! path set works, i.e. `T = max_j min_{i ∈ P_j} X_i`. Components are
//! numbered from 1.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

/// Largest order a [`CoherentSystem`] can represent (one bit per component).
pub const MAX_ORDER: usize = 32;

/// Largest order (or path count) accepted by the exponential-time
/// algorithms: subset signatures, inclusion–exclusion and `W`.
pub const MAX_EXPONENTIAL: usize = 20;

/// 1-based component number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentIndex(usize);

impl ComponentIndex {
    pub fn new(value: usize) -> Result<Self> {
        if value == 0 || value > MAX_ORDER {
            return Err(Error::input(format!(
                "component index {value} outside 1..={MAX_ORDER}"
            )));
        }
        Ok(ComponentIndex(value))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    fn bit(self) -> u32 {
        1u32 << (self.0 - 1)
    }
}

impl fmt::Display for ComponentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of components stored as a bitmask (bit `i-1` is component `i`).
///
/// Ordered by cardinality, then lexicographically by member indices, which is
/// the order used for deterministic dumps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ComponentSet(u32);

impl ComponentSet {
    pub const EMPTY: ComponentSet = ComponentSet(0);

    #[inline]
    pub fn from_bits(bits: u32) -> Self {
        ComponentSet(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    /// The set `{1, …, n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ORDER);
        if n == 32 {
            ComponentSet(u32::MAX)
        } else {
            ComponentSet((1u32 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut set = ComponentSet::EMPTY;
        for i in indices {
            set.insert(ComponentIndex::new(i)?);
        }
        Ok(set)
    }

    #[inline]
    pub fn contains(self, i: ComponentIndex) -> bool {
        self.0 & i.bit() != 0
    }

    #[inline]
    pub fn insert(&mut self, i: ComponentIndex) {
        self.0 |= i.bit();
    }

    #[inline]
    pub fn remove(&mut self, i: ComponentIndex) {
        self.0 &= !i.bit();
    }

    #[inline]
    pub fn union(self, other: ComponentSet) -> ComponentSet {
        ComponentSet(self.0 | other.0)
    }

    #[inline]
    pub fn is_subset_of(self, other: ComponentSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Largest member index, 0 for the empty set.
    pub fn max_index(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = ComponentIndex> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let tz = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(ComponentIndex(tz + 1))
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().map(ComponentIndex::get).collect()
    }
}

impl Ord for ComponentSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for ComponentSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ComponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Problems found by [`CoherentSystem::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// `(smaller, larger)` pairs with `smaller ⊂ larger`.
    pub antichain_violations: Vec<(ComponentSet, ComponentSet)>,
    /// Components that belong to no path set.
    pub irrelevant: Vec<ComponentIndex>,
    pub empty_path_sets: usize,
    pub no_path_sets: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antichain_violations.is_empty()
            && self.irrelevant.is_empty()
            && self.empty_path_sets == 0
            && !self.no_path_sets
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            let r = if first { Ok(()) } else { f.write_str("; ") };
            first = false;
            r
        };
        if self.no_path_sets {
            sep(f)?;
            f.write_str("no path sets")?;
        }
        if self.empty_path_sets > 0 {
            sep(f)?;
            write!(f, "{} empty path set(s)", self.empty_path_sets)?;
        }
        for (a, b) in &self.antichain_violations {
            sep(f)?;
            write!(f, "path set {a} is contained in {b}")?;
        }
        for i in &self.irrelevant {
            sep(f)?;
            write!(f, "component {i} is irrelevant")?;
        }
        Ok(())
    }
}

/// A binary system of `order` components given by its minimal path sets.
///
/// Construction with [`CoherentSystem::new`] only checks index ranges, so that
/// [`validate`](CoherentSystem::validate) can report on raw input;
/// [`CoherentSystem::coherent`] additionally insists on a valid system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoherentSystem {
    order: usize,
    paths: Vec<ComponentSet>,
}

impl CoherentSystem {
    pub fn new<P, I>(order: usize, path_sets: P) -> Result<Self>
    where
        P: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::input(format!(
                "system order {order} outside 1..={MAX_ORDER}"
            )));
        }
        let mut paths = Vec::new();
        for set in path_sets {
            let mut s = ComponentSet::EMPTY;
            for i in set {
                if i == 0 || i > order {
                    return Err(Error::input(format!(
                        "component {i} outside 1..={order}"
                    )));
                }
                s.insert(ComponentIndex(i));
            }
            paths.push(s);
        }
        Ok(Self::from_sets_unchecked(order, paths))
    }

    /// Like [`new`](Self::new) but rejects anything that is not coherent.
    pub fn coherent<P, I>(order: usize, path_sets: P) -> Result<Self>
    where
        P: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let system = Self::new(order, path_sets)?;
        system.ensure_valid()?;
        Ok(system)
    }

    pub fn from_sets(order: usize, paths: Vec<ComponentSet>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::input(format!(
                "system order {order} outside 1..={MAX_ORDER}"
            )));
        }
        if let Some(p) = paths.iter().find(|p| p.max_index() > order) {
            return Err(Error::input(format!(
                "path set {p} uses a component beyond order {order}"
            )));
        }
        Ok(Self::from_sets_unchecked(order, paths))
    }

    fn from_sets_unchecked(order: usize, mut paths: Vec<ComponentSet>) -> Self {
        paths.sort();
        paths.dedup();
        CoherentSystem { order, paths }
    }

    pub fn series(n: usize) -> Result<Self> {
        Self::coherent(n, [1..=n])
    }

    pub fn parallel(n: usize) -> Result<Self> {
        Self::coherent(n, (1..=n).map(|i| [i]))
    }

    /// `k`-out-of-`n`: works while at least `k` components work.
    pub fn k_out_of_n(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n || n > MAX_EXPONENTIAL {
            return Err(Error::input(format!("invalid {k}-out-of-{n} system")));
        }
        let paths = (0u32..(1u32 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(ComponentSet)
            .collect();
        Ok(Self::from_sets_unchecked(n, paths))
    }

    /// The five-component bridge with path sets {1,3}, {2,4}, {1,4,5},
    /// {2,3,5}; component 5 is the bridging element.
    pub fn bridge() -> Self {
        Self::coherent(5, [vec![1, 3], vec![2, 4], vec![1, 4, 5], vec![2, 3, 5]])
            .expect("bridge is coherent")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn path_sets(&self) -> &[ComponentSet] {
        &self.paths
    }

    /// Structure function on a bitmask of working components.
    #[inline]
    pub fn works(&self, working: ComponentSet) -> bool {
        self.paths.iter().any(|p| p.is_subset_of(working))
    }

    pub fn structure_value(&self, state: &[bool]) -> Result<bool> {
        if state.len() != self.order {
            return Err(Error::input(format!(
                "state has {} entries, system order is {}",
                state.len(),
                self.order
            )));
        }
        let mut working = ComponentSet::EMPTY;
        for (k, &up) in state.iter().enumerate() {
            if up {
                working.insert(ComponentIndex(k + 1));
            }
        }
        Ok(self.works(working))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport {
            no_path_sets: self.paths.is_empty(),
            empty_path_sets: self.paths.iter().filter(|p| p.is_empty()).count(),
            ..Default::default()
        };
        for (a, &p) in self.paths.iter().enumerate() {
            for (b, &q) in self.paths.iter().enumerate() {
                if a != b && !p.is_empty() && p.is_subset_of(q) {
                    report.antichain_violations.push((p, q));
                }
            }
        }
        let covered = self
            .paths
            .iter()
            .fold(ComponentSet::EMPTY, |acc, &p| acc.union(p));
        report.irrelevant = (1..=self.order)
            .map(ComponentIndex)
            .filter(|&i| !covered.contains(i))
            .collect();
        report
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::input(format!("system is not coherent: {report}")))
        }
    }

    /// Puts the spares of `assignment` in parallel with their targets.
    ///
    /// The result has order `n + k`; each minimal path set containing an
    /// assigned target `i` is expanded into copies where `i` is replaced by
    /// `i` itself or by any one of its spares, and the collection is then
    /// reduced to its minimal elements.
    pub fn apply_active_redundancy(&self, assignment: &ActiveAssignment) -> Result<Self> {
        self.ensure_valid()?;
        assignment.check_against(self.order)?;
        let new_order = self.order + assignment.len();
        if new_order > MAX_ORDER {
            return Err(Error::capacity("order after redundancy", new_order, MAX_ORDER));
        }
        // alternatives[i] = {i} ∪ spares(i)
        let mut alternatives: Vec<Vec<ComponentIndex>> = (1..=self.order)
            .map(|i| vec![ComponentIndex(i)])
            .collect();
        for &(spare, target) in assignment.pairs() {
            alternatives[target.get() - 1].push(spare);
        }
        let mut expanded = Vec::new();
        for &path in &self.paths {
            let mut partial = vec![ComponentSet::EMPTY];
            for i in path.iter() {
                let choices = &alternatives[i.get() - 1];
                partial = partial
                    .iter()
                    .flat_map(|&s| {
                        choices.iter().map(move |&c| {
                            let mut t = s;
                            t.insert(c);
                            t
                        })
                    })
                    .collect();
            }
            expanded.extend(partial);
        }
        Ok(Self::from_sets_unchecked(new_order, minimize(expanded)))
    }

    /// Renames component `i` to `perm[i-1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.order {
            return Err(Error::input("permutation length differs from system order"));
        }
        let mut seen = ComponentSet::EMPTY;
        for &p in perm {
            let c = ComponentIndex::new(p)?;
            if p > self.order || seen.contains(c) {
                return Err(Error::input("not a permutation of the components"));
            }
            seen.insert(c);
        }
        let paths = self
            .paths
            .iter()
            .map(|p| {
                let mut q = ComponentSet::EMPTY;
                for i in p.iter() {
                    q.insert(ComponentIndex(perm[i.get() - 1]));
                }
                q
            })
            .collect();
        Ok(Self::from_sets_unchecked(self.order, paths))
    }
}

/// Drops duplicates and every set that strictly contains another one.
pub fn minimize(mut sets: Vec<ComponentSet>) -> Vec<ComponentSet> {
    sets.sort();
    sets.dedup();
    let mut kept: Vec<ComponentSet> = Vec::with_capacity(sets.len());
    // sorted by cardinality, so any subset of `s` is already in `kept`
    for s in sets {
        if !kept.iter().any(|k| k.is_subset_of(s)) {
            kept.push(s);
        }
    }
    kept
}

/// Spares placed in parallel with original components.
///
/// Spares of an order-`n` system are numbered `n+1, …, n+k`, each assigned
/// to exactly one target in `1..=n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActiveAssignment {
    pairs: Vec<(ComponentIndex, ComponentIndex)>,
}

impl ActiveAssignment {
    /// `pairs` are `(spare, target)`.
    pub fn new(pairs: Vec<(ComponentIndex, ComponentIndex)>) -> Result<Self> {
        let mut seen = ComponentSet::EMPTY;
        for &(spare, _) in &pairs {
            if seen.contains(spare) {
                return Err(Error::input(format!("spare {spare} assigned twice")));
            }
            seen.insert(spare);
        }
        Ok(ActiveAssignment { pairs })
    }

    /// Spare `n + j` goes to `targets[j-1]`.
    pub fn from_targets(order: usize, targets: &[usize]) -> Result<Self> {
        let pairs = targets
            .iter()
            .enumerate()
            .map(|(j, &t)| Ok((ComponentIndex::new(order + j + 1)?, ComponentIndex::new(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[(ComponentIndex, ComponentIndex)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn check_against(&self, order: usize) -> Result<()> {
        let k = self.pairs.len();
        let mut spares = ComponentSet::EMPTY;
        for &(spare, target) in &self.pairs {
            if target.get() > order {
                return Err(Error::input(format!(
                    "spare {spare} targets component {target} of an order-{order} system"
                )));
            }
            if spare.get() <= order || spare.get() > order + k {
                return Err(Error::input(format!(
                    "spare index {spare} outside {}..={}",
                    order + 1,
                    order + k
                )));
            }
            spares.insert(spare);
        }
        debug_assert_eq!(spares.len(), k);
        Ok(())
    }
}
