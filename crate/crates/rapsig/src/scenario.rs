//! Scenario files: a base system, component lifetimes, redundancy policies and
//! an optional survival copula.
//!
//! ```json
//! {
//!   "system": {"n": 2, "min_path_sets": [[1, 2]]},
//!   "marginals": [{"family": "exponential", "rate": 2}, {"family": "exponential", "rate": 1}],
//!   "policies": [
//!     {"name": "I", "kind": "active", "allocations": [{"target": 1, "spare": {"family": "exponential", "rate": 1.5}}]},
//!     {"name": "II", "kind": "active", "allocations": [{"target": 2, "spare": {"family": "exponential", "rate": 1.5}}]}
//!   ],
//!   "copula": {"family": "clayton", "theta": 1},
//!   "optimal": {"kind": "active", "spare": {"family": "exponential", "rate": 1.5}}
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rapsig_core::dependence::SurvivalCopula;
use rapsig_core::engine::{Allocation, EvalConfig, Policy, RedundancyKind};
use rapsig_core::lifetimes::LifetimeDistribution;
use rapsig_core::{CoherentSystem, ComponentIndex};

use crate::error::{CliError, CliResult};
use crate::formats::{read_json, CopulaSpec, DistributionSpec, SystemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSpec {
    Active,
    Standby,
}

impl From<KindSpec> for RedundancyKind {
    fn from(k: KindSpec) -> Self {
        match k {
            KindSpec::Active => RedundancyKind::Active,
            KindSpec::Standby => RedundancyKind::Standby,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationSpec {
    /// 1-based component of the base system.
    pub target: usize,
    pub spare: DistributionSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub name: String,
    pub kind: KindSpec,
    pub allocations: Vec<AllocationSpec>,
}

/// One spare of the given lifetime, tried on every component in turn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimalSpec {
    pub kind: KindSpec,
    pub spare: DistributionSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub system: SystemSpec,
    pub marginals: Vec<DistributionSpec>,
    #[serde(default)]
    pub policies: Vec<PolicySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copula: Option<CopulaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal: Option<OptimalSpec>,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub path: PathBuf,
    pub system: CoherentSystem,
    pub marginals: Vec<LifetimeDistribution>,
    pub policies: Vec<Policy>,
    pub copula: Option<SurvivalCopula>,
    pub optimal: Option<(RedundancyKind, LifetimeDistribution)>,
}

impl Scenario {
    pub fn load(path: &Path, config: &EvalConfig) -> CliResult<Self> {
        let spec: ScenarioSpec = read_json(path)?;
        Self::build(&spec, path, config)
    }

    pub fn build(spec: &ScenarioSpec, path: &Path, config: &EvalConfig) -> CliResult<Self> {
        let conv = &config.convolution;
        let system = spec.system.build(path, "system")?;
        let n = system.order();
        if spec.marginals.len() != n {
            return Err(CliError::input(format!(
                "{}: field `marginals`: {} lifetimes given for a system of order {n}",
                path.display(),
                spec.marginals.len()
            )));
        }
        let marginals = spec
            .marginals
            .iter()
            .enumerate()
            .map(|(i, d)| d.build(path, &format!("marginals[{i}]"), conv))
            .collect::<CliResult<Vec<_>>>()?;
        let mut policies = Vec::with_capacity(spec.policies.len());
        for (p, ps) in spec.policies.iter().enumerate() {
            if policies.iter().any(|q: &Policy| q.name == ps.name) {
                return Err(CliError::input(format!(
                    "{}: field `policies[{p}].name`: duplicate policy name '{}'",
                    path.display(),
                    ps.name
                )));
            }
            let mut allocations = Vec::with_capacity(ps.allocations.len());
            for (a, al) in ps.allocations.iter().enumerate() {
                let field = format!("policies[{p}].allocations[{a}]");
                if al.target == 0 || al.target > n {
                    return Err(CliError::input(format!(
                        "{}: field `{field}.target`: component {} outside 1..={n}",
                        path.display(),
                        al.target
                    )));
                }
                let target = ComponentIndex::new(al.target).map_err(|e| CliError::at(path, &field, e))?;
                let spare = al.spare.build(path, &format!("{field}.spare"), conv)?;
                allocations.push(Allocation { target, spare });
            }
            policies.push(Policy::new(ps.name.clone(), ps.kind.into(), allocations));
        }
        let copula = spec.copula.as_ref().map(|c| c.build(path, "copula")).transpose()?;
        let optimal = spec
            .optimal
            .as_ref()
            .map(|o| o.spare.build(path, "optimal.spare", conv).map(|d| (o.kind.into(), d)))
            .transpose()?;
        Ok(Scenario { path: path.to_path_buf(), system, marginals, policies, copula, optimal })
    }

    /// Field path of policy `i`, for error messages.
    pub fn policy_field(&self, i: usize) -> String {
        format!("{}: field `policies[{i}]` ('{}')", self.path.display(), self.policies[i].name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_json;

    const EXAMPLE: &str = r#"{
        "system": {"n": 2, "min_path_sets": [[1, 2]]},
        "marginals": [{"family": "exponential", "rate": 2}, {"family": "exponential", "rate": 1}],
        "policies": [
            {"name": "I", "kind": "active", "allocations": [{"target": 1, "spare": {"family": "exponential", "rate": 1.5}}]},
            {"name": "II", "kind": "standby", "allocations": [{"target": 2, "spare": {"family": "exponential", "rate": 1.5}}]}
        ],
        "copula": {"family": "independence"}
    }"#;

    #[test]
    fn builds_policies() {
        let path = Path::new("ex1.json");
        let spec: ScenarioSpec = parse_json(EXAMPLE, path).unwrap();
        let s = Scenario::build(&spec, path, &EvalConfig::default()).unwrap();
        assert_eq!(s.policies.len(), 2);
        assert_eq!(s.policies[1].kind, RedundancyKind::Standby);
        assert_eq!(s.policies[0].allocations[0].target.get(), 1);
        assert_eq!(s.copula, Some(SurvivalCopula::Independence));
        assert!(s.optimal.is_none());
    }

    #[test]
    fn bad_target_names_the_field() {
        let path = Path::new("bad.json");
        let text = EXAMPLE.replace(r#""target": 2"#, r#""target": 7"#);
        let spec: ScenarioSpec = parse_json(&text, path).unwrap();
        let err = Scenario::build(&spec, path, &EvalConfig::default()).unwrap_err();
        assert!(err.message.starts_with("bad.json: field `policies[1].allocations[0].target`"), "{}", err.message);
        let text = EXAMPLE.replace(r#""kind": "standby""#, r#""kind": "cold""#);
        let err = parse_json::<ScenarioSpec>(&text, path).unwrap_err();
        assert!(err.message.contains("policies[1].kind"), "{}", err.message);
    }
}
