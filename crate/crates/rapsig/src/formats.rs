//! JSON documents: systems, distributions, copulas, signatures and
//! polynomial dumps.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use rapsig_core::dependence::SurvivalCopula;
use rapsig_core::lifetimes::{convolve, ConvolutionConfig, LifetimeDistribution, Tabulated};
use rapsig_core::poly::MultilinearPolynomial;
use rapsig_core::{CoherentSystem, Rational, Signature};

use crate::error::{CliError, CliResult};

/// `{"n": 5, "min_path_sets": [[1, 3], [2, 4], [1, 4, 5], [2, 3, 5]]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: usize,
    pub min_path_sets: Vec<Vec<usize>>,
}

impl SystemSpec {
    pub fn from_system(system: &CoherentSystem) -> Self {
        SystemSpec { n: system.order(), min_path_sets: system.path_sets().iter().map(|p| p.to_vec()).collect() }
    }

    /// Builds and validates the system; `file` and `field` locate errors.
    pub fn build(&self, file: &Path, field: &str) -> CliResult<CoherentSystem> {
        let system = CoherentSystem::new(self.n, self.min_path_sets.iter().map(|p| p.iter().copied()))
            .map_err(|e| CliError::at(file, field, e))?;
        let report = system.validate();
        if !report.is_valid() {
            return Err(CliError::input(format!("{}: field `{field}`: {report}", file.display())));
        }
        Ok(system)
    }
}

/// Lifetime distribution, tagged by `family`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Exponential {
        rate: f64,
    },
    Weibull {
        shape: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Pareto {
        exponent: f64,
    },
    /// Independent sum of the listed lifetimes.
    Convolution {
        of: Vec<DistributionSpec>,
    },
    Tabulated {
        times: Vec<f64>,
        survival: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<Vec<f64>>,
    },
}

fn one() -> f64 {
    1.0
}

impl DistributionSpec {
    pub fn build(&self, file: &Path, field: &str, conv: &ConvolutionConfig) -> CliResult<LifetimeDistribution> {
        let at = |e| CliError::at(file, field, e);
        match self {
            DistributionSpec::Exponential { rate } => LifetimeDistribution::exponential(*rate).map_err(at),
            DistributionSpec::Weibull { shape, rate } => LifetimeDistribution::weibull(*shape, *rate).map_err(at),
            DistributionSpec::Pareto { exponent } => LifetimeDistribution::pareto(*exponent).map_err(at),
            DistributionSpec::Convolution { of } => {
                if of.is_empty() {
                    return Err(CliError::input(format!("{}: field `{field}.of`: empty convolution", file.display())));
                }
                let mut acc = of[0].build(file, &format!("{field}.of[0]"), conv)?;
                for (k, d) in of.iter().enumerate().skip(1) {
                    let next = d.build(file, &format!("{field}.of[{k}]"), conv)?;
                    acc = convolve(&acc, &next, conv).map_err(at)?;
                }
                Ok(acc)
            }
            DistributionSpec::Tabulated { times, survival, density } => {
                let table = match density {
                    Some(d) => Tabulated::with_density(times.clone(), survival.clone(), d.clone()),
                    None => Tabulated::new(times.clone(), survival.clone()),
                };
                Ok(LifetimeDistribution::tabulated(table.map_err(at)?))
            }
        }
    }
}

/// Survival copula, tagged by `family`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum CopulaSpec {
    Independence,
    Clayton { theta: f64 },
    Gumbel { gamma: f64 },
}

impl CopulaSpec {
    pub fn build(&self, file: &Path, field: &str) -> CliResult<SurvivalCopula> {
        let c = match *self {
            CopulaSpec::Independence => Ok(SurvivalCopula::Independence),
            CopulaSpec::Clayton { theta } => SurvivalCopula::clayton(theta),
            CopulaSpec::Gumbel { gamma } => SurvivalCopula::gumbel(gamma),
        };
        c.map_err(|e| CliError::at(file, field, e))
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn rational_string(r: &Rational) -> String {
    r.to_string()
}

pub fn signature_strings(s: &Signature) -> Vec<String> {
    s.as_slice().iter().map(rational_string).collect()
}

/// Parses the `"p/q"` strings of a signature document.
pub fn parse_signature(entries: &[String]) -> Result<Signature, String> {
    let parsed = entries
        .iter()
        .enumerate()
        .map(|(i, e)| e.trim().parse::<Rational>().map_err(|_| format!("entry {i}: `{e}` is not a fraction")))
        .collect::<Result<Vec<_>, _>>()?;
    Signature::new(parsed).map_err(|e| e.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub vars: Vec<usize>,
    pub coeff: i64,
}

/// Terms of `H` sorted by degree, then lexicographically.
pub fn polynomial_dump(h: &MultilinearPolynomial) -> Vec<Term> {
    h.terms().map(|(s, c)| Term { vars: s.to_vec(), coeff: c }).collect()
}

/// Reads a JSON document, reporting the file and the failing field path.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_json(&text, path)
}

pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::input(format!(
            "{}: field `{field}`: {inner} (line {}, column {})",
            path.display(),
            inner.line(),
            inner.column()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn here() -> &'static Path {
        Path::new("test.json")
    }

    #[test]
    fn distribution_round_trip() {
        let text = r#"[{"family":"weibull","shape":2,"rate":1},{"family":"exponential","rate":1.5},
            {"family":"pareto","exponent":1},{"family":"convolution","of":[{"family":"exponential","rate":1},{"family":"exponential","rate":2}]}]"#;
        let specs: Vec<DistributionSpec> = parse_json(text, here()).unwrap();
        assert_eq!(specs[0], DistributionSpec::Weibull { shape: 2.0, rate: 1.0 });
        let conv = ConvolutionConfig::default();
        let d = specs[3].build(here(), "marginals[3]", &conv).unwrap();
        let t = 0.8f64;
        assert!((d.sf(t) - (2.0 * (-t).exp() - (-2.0 * t).exp())).abs() < 1e-6);
        let back = serde_json::to_string(&specs[1]).unwrap();
        assert_eq!(back, r#"{"family":"exponential","rate":1.5}"#);
    }

    #[test]
    fn errors_name_file_and_field() {
        let err = parse_json::<Vec<DistributionSpec>>(r#"[{"family":"exponential","rat":1}]"#, here()).unwrap_err();
        assert!(err.message.starts_with("test.json: field `[0]"), "{}", err.message);
        let spec = DistributionSpec::Exponential { rate: -1.0 };
        let err = spec.build(here(), "marginals[2]", &ConvolutionConfig::default()).unwrap_err();
        assert!(err.message.contains("test.json: field `marginals[2]`"), "{}", err.message);
        let bad = SystemSpec { n: 3, min_path_sets: vec![vec![1, 2], vec![1, 2, 3]] };
        let err = bad.build(here(), "system").unwrap_err();
        assert!(err.message.contains("field `system`"));
    }

    #[test]
    fn signatures_as_fractions() {
        let s = Signature::from_pairs(&[(0, 1), (1, 15), (7, 30), (1, 2), (1, 5), (0, 1)]).unwrap();
        let strings = signature_strings(&s);
        assert_eq!(strings, ["0", "1/15", "7/30", "1/2", "1/5", "0"]);
        assert_eq!(parse_signature(&strings).unwrap(), s);
        assert!(parse_signature(&["1/2".into()]).is_err());
    }

    #[test]
    fn polynomial_terms_are_sorted() {
        let h = MultilinearPolynomial::from_path_sets(&CoherentSystem::bridge()).unwrap();
        let dump = polynomial_dump(&h);
        assert_eq!(dump.len(), 10);
        assert_eq!(dump[0], Term { vars: vec![1, 3], coeff: 1 });
        assert_eq!(dump.last().unwrap(), &Term { vars: vec![1, 2, 3, 4, 5], coeff: 2 });
    }
}
