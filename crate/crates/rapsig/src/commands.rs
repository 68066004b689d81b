//! The command implementations. Each returns the rendered output and, for the
//! checking commands, the failure that sets the exit status.

use std::path::Path;

use serde::Serialize;

use rapsig_core::engine::{compare, evaluate_policy, optimal_allocation, PolicyEvaluation, Preference};
use rapsig_core::grid::TimeGrid;
use rapsig_core::lifetimes::{MttfEstimate, OrderRelation};
use rapsig_core::montecarlo::SystemSampler;
use rapsig_core::poly::MultilinearPolynomial;
use rapsig_core::signature::{signature_by_enumeration, signature_by_subsets};
use rapsig_core::{ActiveAssignment, CoherentSystem};

use crate::error::{CliError, CliResult};
use crate::formats::{polynomial_dump, read_json, signature_strings, SystemSpec, Term};
use crate::parallel;
use crate::scenario::Scenario;
use crate::settings::{horizon, Settings, T_CAP};
use crate::table1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Rendered output plus the failure to report after printing it.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub status: Option<CliError>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, status: None }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Loads a system file, optionally adding one active spare on `spare_on`.
pub fn load_system(path: &Path, spare_on: Option<usize>) -> CliResult<CoherentSystem> {
    let spec: SystemSpec = read_json(path)?;
    let system = spec.build(path, "min_path_sets")?;
    match spare_on {
        None => Ok(system),
        Some(i) => {
            let assignment = ActiveAssignment::from_targets(system.order(), &[i])
                .map_err(|e| CliError::input(format!("--spare-on: {e}")))?;
            Ok(system.apply_active_redundancy(&assignment)?)
        }
    }
}

#[derive(Serialize)]
struct SignatureReport {
    n: usize,
    subsets: Vec<String>,
    enumeration: Vec<String>,
    agree: bool,
}

pub fn signature(system: &CoherentSystem, format: Format) -> CliResult<Output> {
    let a = signature_by_subsets(system)?;
    let b = signature_by_enumeration(system)?;
    let report = SignatureReport {
        n: system.order(),
        subsets: signature_strings(&a),
        enumeration: signature_strings(&b),
        agree: a == b,
    };
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut header = vec!["algorithm".to_string()];
            header.extend((1..=report.n).map(|i| format!("s{i}")));
            let row = |name: &str, s: &[String]| std::iter::once(name.to_string()).chain(s.iter().cloned()).collect();
            csv_text(&header, &[row("subsets", &report.subsets), row("enumeration", &report.enumeration)])
        }
    };
    let status = (!report.agree).then(|| CliError::numeric("signature algorithms disagree"));
    Ok(Output { text, status })
}

#[derive(Serialize)]
struct PolynomialReport {
    n: usize,
    terms: Vec<Term>,
    /// Coefficients of `h(p)` by increasing power.
    diagonal: Vec<i64>,
}

pub fn polynomial(system: &CoherentSystem, format: Format) -> CliResult<Output> {
    let h = MultilinearPolynomial::from_path_sets(system)?;
    let report = PolynomialReport {
        n: system.order(),
        terms: polynomial_dump(&h),
        diagonal: h.diagonal().coefficients().to_vec(),
    };
    Ok(Output::ok(match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = report
                .terms
                .iter()
                .map(|t| {
                    let vars = t.vars.iter().map(|v| format!("p{v}")).collect::<Vec<_>>().join("*");
                    vec!["term".into(), vars, t.coeff.to_string()]
                })
                .collect();
            rows.extend(report.diagonal.iter().enumerate().map(|(k, c)| vec!["diagonal".into(), format!("p^{k}"), c.to_string()]));
            csv_text(&["kind".into(), "monomial".into(), "coeff".into()], &rows)
        }
    }))
}

/// Evaluates every policy of a scenario.
pub fn evaluate_all(scenario: &Scenario, settings: &Settings) -> CliResult<Vec<PolicyEvaluation>> {
    if scenario.policies.is_empty() {
        return Err(CliError::input(format!("{}: field `policies`: no policies given", scenario.path.display())));
    }
    scenario
        .policies
        .iter()
        .enumerate()
        .map(|(i, p)| {
            evaluate_policy(&scenario.system, &scenario.marginals, p, scenario.copula, &settings.eval).map_err(|e| {
                let mut err = CliError::from(e);
                err.message = format!("{}: {}", scenario.policy_field(i), err.message);
                err
            })
        })
        .collect()
}

/// Grid reaching the horizon of every (improved) component lifetime.
pub fn scenario_grid(evals: &[PolicyEvaluation], settings: &Settings) -> CliResult<TimeGrid> {
    settings.grid(evals.iter().flat_map(|e| e.marginals()))
}

#[derive(Serialize)]
struct Curves {
    t: Vec<f64>,
    policies: Vec<PolicyCurves>,
}

#[derive(Serialize)]
struct PolicyCurves {
    name: String,
    gbar: Vec<f64>,
    ft_bar: Vec<f64>,
}

fn curves(evals: &[PolicyEvaluation], grid: &TimeGrid) -> CliResult<Curves> {
    let policies = evals
        .iter()
        .map(|e| {
            let gbar = e.sample_gbar(grid)?;
            let ft_bar = e.sample_ft_bar(grid);
            if let Some(k) = gbar.iter().chain(&ft_bar).position(|v| !v.is_finite()) {
                return Err(CliError::numeric(format!("policy '{}': non-finite curve value at index {k}", e.policy().name)));
            }
            Ok(PolicyCurves { name: e.policy().name.clone(), gbar, ft_bar })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Curves { t: grid.points().to_vec(), policies })
}

/// Plot data: `t`, then `gbar[name]` for each policy, then `ft_bar[name]`.
fn curves_csv(c: &Curves) -> String {
    let mut header = vec!["t".to_string()];
    header.extend(c.policies.iter().map(|p| format!("gbar[{}]", p.name)));
    header.extend(c.policies.iter().map(|p| format!("ft_bar[{}]", p.name)));
    let rows: Vec<Vec<String>> = (0..c.t.len())
        .map(|k| {
            std::iter::once(num(c.t[k]))
                .chain(c.policies.iter().map(|p| num(p.gbar[k])))
                .chain(c.policies.iter().map(|p| num(p.ft_bar[k])))
                .collect()
        })
        .collect();
    csv_text(&header, &rows)
}

pub fn gbar(scenario: &Scenario, settings: &Settings, format: Format) -> CliResult<Output> {
    let evals = evaluate_all(scenario, settings)?;
    let grid = scenario_grid(&evals, settings)?;
    let c = curves(&evals, &grid)?;
    Ok(Output::ok(match format {
        Format::Json => json(&c),
        Format::Csv => curves_csv(&c),
    }))
}

#[derive(Serialize)]
struct GridInfo {
    points: usize,
    first_positive: f64,
    last: f64,
}

fn grid_info(grid: &TimeGrid) -> GridInfo {
    GridInfo { points: grid.len(), first_positive: grid.points()[1], last: grid.last() }
}

#[derive(Serialize)]
struct MttfReport {
    value: Option<f64>,
    quadrature_error: Option<f64>,
    t_end: Option<f64>,
    tail: Option<f64>,
    error: Option<String>,
}

fn mttf_report(r: &rapsig_core::Result<MttfEstimate>) -> MttfReport {
    match r {
        Ok(m) => MttfReport {
            value: Some(m.value),
            quadrature_error: Some(m.quadrature_error),
            t_end: Some(m.t_end),
            tail: Some(m.tail),
            error: None,
        },
        Err(e) => MttfReport { value: None, quadrature_error: None, t_end: None, tail: None, error: Some(e.to_string()) },
    }
}

#[derive(Serialize)]
struct PolicySummary {
    name: String,
    kind: &'static str,
    signature: Vec<String>,
    mttf: MttfReport,
}

#[derive(Serialize)]
struct Dominance {
    holds: bool,
    /// Largest violation `(t, lhs, rhs)`.
    witness: Option<[f64; 3]>,
}

/// Whether `a ≥ b` pointwise within `tol`.
fn dominance(ts: &[f64], a: &[f64], b: &[f64], tol: f64) -> Dominance {
    let worst = ts
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(_, (x, y))| **x < **y - tol)
        .max_by(|(_, (x1, y1)), (_, (x2, y2))| (*y1 - *x1).total_cmp(&(*y2 - *x2)));
    Dominance { holds: worst.is_none(), witness: worst.map(|(&t, (&x, &y))| [t, x, y]) }
}

/// Tolerance of the `Ḡ` dominance report (the accuracy of `h⁻¹`).
const GBAR_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct PairVerdict {
    first: String,
    second: String,
    preferred: &'static str,
    preferred_policy: Option<String>,
    basis: &'static str,
    crossings: Vec<f64>,
    max_deficit: [f64; 2],
    mttf: Option<[f64; 2]>,
    note: Option<String>,
    gbar_first_ge_second: Dominance,
    gbar_second_ge_first: Dominance,
    /// Exact `s_first ≤st s_second`.
    signature_first_le_second: bool,
    signature_second_le_first: bool,
}

#[derive(Serialize)]
struct CompareReport {
    scenario: String,
    grid: GridInfo,
    policies: Vec<PolicySummary>,
    comparisons: Vec<PairVerdict>,
}

fn preference_name(p: Preference) -> &'static str {
    match p {
        Preference::First => "first",
        Preference::Second => "second",
        Preference::Tie => "tie",
        Preference::Incomparable => "incomparable",
    }
}

/// Compares every pair of policies; `plot` receives the curve CSV.
pub fn compare_cmd(scenario: &Scenario, settings: &Settings, format: Format, plot: Option<&Path>) -> CliResult<Output> {
    let evals = evaluate_all(scenario, settings)?;
    let grid = scenario_grid(&evals, settings)?;
    let c = curves(&evals, &grid)?;
    if let Some(path) = plot {
        std::fs::write(path, curves_csv(&c)).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    let policies = evals
        .iter()
        .map(|e| PolicySummary {
            name: e.policy().name.clone(),
            kind: e.policy().kind.name(),
            signature: signature_strings(e.signature()),
            mttf: mttf_report(&e.mttf()),
        })
        .collect::<Vec<_>>();
    let mut comparisons = Vec::new();
    for i in 0..evals.len() {
        for j in i + 1..evals.len() {
            let v = compare(&evals[i], &evals[j], &grid, settings.tol);
            let (ci, cj) = (&c.policies[i], &c.policies[j]);
            let sig_le = |a: &PolicyEvaluation, b: &PolicyEvaluation| {
                rapsig_core::engine::signature_order(a.signature(), b.signature(), OrderRelation::St)
                    .map(|o| o.holds)
                    .unwrap_or(false)
            };
            comparisons.push(PairVerdict {
                first: ci.name.clone(),
                second: cj.name.clone(),
                preferred: preference_name(v.preferred),
                preferred_policy: match v.preferred {
                    Preference::First => Some(ci.name.clone()),
                    Preference::Second => Some(cj.name.clone()),
                    _ => None,
                },
                basis: v.basis.name(),
                crossings: v.crossings,
                max_deficit: [v.max_deficit.0, v.max_deficit.1],
                mttf: v.mttfs.map(|(a, b)| [a, b]),
                note: v.note,
                gbar_first_ge_second: dominance(&c.t, &ci.gbar, &cj.gbar, GBAR_TOL),
                gbar_second_ge_first: dominance(&c.t, &cj.gbar, &ci.gbar, GBAR_TOL),
                signature_first_le_second: sig_le(&evals[i], &evals[j]),
                signature_second_le_first: sig_le(&evals[j], &evals[i]),
            });
        }
    }
    let report = CompareReport { scenario: scenario.path.display().to_string(), grid: grid_info(&grid), policies, comparisons };
    Ok(Output::ok(match format {
        Format::Json => json(&report),
        Format::Csv => {
            let header = ["first", "second", "preferred", "basis", "crossings", "mttf_first", "mttf_second"].map(String::from);
            let rows: Vec<Vec<String>> = report
                .comparisons
                .iter()
                .map(|p| {
                    vec![
                        p.first.clone(),
                        p.second.clone(),
                        p.preferred_policy.clone().unwrap_or_else(|| p.preferred.to_string()),
                        p.basis.to_string(),
                        p.crossings.len().to_string(),
                        opt_num(p.mttf.map(|m| m[0])),
                        opt_num(p.mttf.map(|m| m[1])),
                    ]
                })
                .collect();
            csv_text(&header, &rows)
        }
    }))
}

#[derive(Serialize)]
struct CandidateReport {
    target: usize,
    signature: Vec<String>,
    dominant: bool,
    mttf: Option<f64>,
}

#[derive(Serialize)]
struct OptimalReport {
    scenario: String,
    kind: &'static str,
    best: Vec<usize>,
    basis: &'static str,
    grid: GridInfo,
    candidates: Vec<CandidateReport>,
}

pub fn optimal(scenario: &Scenario, settings: &Settings, format: Format) -> CliResult<Output> {
    let (kind, spare) = scenario.optimal.clone().ok_or_else(|| {
        CliError::input(format!("{}: field `optimal`: missing (needs kind and spare)", scenario.path.display()))
    })?;
    // a standby target lives at most as long as itself plus the spare
    let t_end = 2.0 * horizon(scenario.marginals.iter().chain([&spare])).min(T_CAP);
    let grid = Settings { t_max: Some(settings.t_max.unwrap_or(t_end)), ..settings.clone() }.grid([])?;
    let opt = optimal_allocation(
        &scenario.system,
        &scenario.marginals,
        &spare,
        kind,
        scenario.copula,
        &settings.eval,
        Some(&grid),
        settings.tol,
    )?;
    let report = OptimalReport {
        scenario: scenario.path.display().to_string(),
        kind: kind.name(),
        best: opt.best,
        basis: opt.basis.name(),
        grid: grid_info(&grid),
        candidates: opt
            .candidates
            .iter()
            .map(|c| CandidateReport {
                target: c.target,
                signature: signature_strings(c.evaluation.signature()),
                dominant: c.dominant,
                mttf: c.mttf,
            })
            .collect(),
    };
    Ok(Output::ok(match format {
        Format::Json => json(&report),
        Format::Csv => {
            let header = ["target", "best", "dominant", "mttf"].map(String::from);
            let rows: Vec<Vec<String>> = report
                .candidates
                .iter()
                .map(|c| {
                    vec![c.target.to_string(), report.best.contains(&c.target).to_string(), c.dominant.to_string(), opt_num(c.mttf)]
                })
                .collect();
            csv_text(&header, &rows)
        }
    }))
}

#[derive(Serialize)]
struct NamedMttf {
    name: String,
    #[serde(flatten)]
    mttf: MttfReport,
}

pub fn mttf(scenario: &Scenario, settings: &Settings, format: Format) -> CliResult<Output> {
    let evals = evaluate_all(scenario, settings)?;
    let results: Vec<_> = evals.iter().map(|e| e.mttf()).collect();
    let status = results
        .iter()
        .zip(&evals)
        .find_map(|(r, e)| r.as_ref().err().map(|err| (e, err)))
        .map(|(e, err)| CliError::numeric(format!("policy '{}': {err}", e.policy().name)));
    let report: Vec<NamedMttf> = evals
        .iter()
        .zip(&results)
        .map(|(e, r)| NamedMttf { name: e.policy().name.clone(), mttf: mttf_report(r) })
        .collect();
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let header = ["policy", "mttf", "quadrature_error", "t_end", "tail", "error"].map(String::from);
            let rows: Vec<Vec<String>> = report
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        opt_num(r.mttf.value),
                        opt_num(r.mttf.quadrature_error),
                        opt_num(r.mttf.t_end),
                        opt_num(r.mttf.tail),
                        r.mttf.error.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            csv_text(&header, &rows)
        }
    };
    Ok(Output { text, status })
}

pub fn table1_cmd(settings: &Settings, format: Format) -> CliResult<Output> {
    let rows = table1::run(settings)?;
    let mismatched: Vec<usize> = rows.iter().filter(|r| !r.matches).map(|r| r.row).collect();
    let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let text = match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut header: Vec<String> =
                ["row", "l1", "l2", "l3", "l4", "l5", "spare", "expected", "chosen", "basis", "st_dominant", "mttf_best"]
                    .map(String::from)
                    .to_vec();
            header.extend((1..=5).map(|i| format!("mttf{i}")));
            header.extend(["match", "basis_sensitive"].map(String::from));
            let out: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![r.row.to_string()];
                    v.extend(r.rates.iter().map(|&x| num(x)));
                    v.push(num(r.spare));
                    v.extend([list(&r.expected), list(&r.chosen), r.basis.to_string(), list(&r.st_dominant), list(&r.mttf_best)]);
                    v.extend(r.mttfs.iter().map(|&m| opt_num(m)));
                    v.extend([r.matches.to_string(), r.basis_sensitive.to_string()]);
                    v
                })
                .collect();
            csv_text(&header, &out)
        }
    };
    let status = (!mismatched.is_empty())
        .then(|| CliError::mismatch(format!("table 1: rows {} differ from the published optimum", list(&mismatched))));
    Ok(Output { text, status })
}

/// Times at which `sf` falls to `levels`, by bisection on `[0, hi]`.
pub fn level_times(sf: impl Fn(f64) -> f64, levels: &[f64], hi: f64) -> Vec<f64> {
    levels
        .iter()
        .map(|&y| {
            let (mut a, mut b) = (0.0f64, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if sf(m) > y {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Number of check times of `mc-check`.
pub const MC_POINTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McPoint {
    pub t: f64,
    pub analytic: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McPolicyReport {
    pub name: String,
    pub samples: u64,
    pub seed: u64,
    pub points: Vec<McPoint>,
    pub ok: bool,
}

/// Monte Carlo against the analytic `F̄_T` at the times where the analytic
/// curve crosses `k/21`, `k = 1..20`; agreement means within three standard
/// errors.
pub fn mc_check_policy(scenario: &Scenario, eval: &PolicyEvaluation, settings: &Settings) -> CliResult<McPolicyReport> {
    let sampler = SystemSampler::new(&scenario.system, &scenario.marginals, eval.policy(), scenario.copula)?;
    let levels: Vec<f64> = (1..=MC_POINTS).rev().map(|k| k as f64 / (MC_POINTS + 1) as f64).collect();
    let hi = scenario_grid(std::slice::from_ref(eval), settings)?.last();
    let times = level_times(|t| eval.ft_bar(t), &levels, hi);
    let config = settings.mc();
    let est = parallel::estimate(&sampler, &config, &times)?;
    let points: Vec<McPoint> = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let analytic = eval.ft_bar(t);
            let (estimate, std_error) = (est.survival[k], est.std_error[k]);
            let ok = (estimate - analytic).abs() <= 3.0 * std_error.max(1e-12 / 3.0);
            McPoint { t, analytic, estimate, std_error, ok }
        })
        .collect();
    Ok(McPolicyReport {
        name: eval.policy().name.clone(),
        samples: est.samples,
        seed: config.seed,
        ok: points.iter().all(|p| p.ok),
        points,
    })
}

pub fn mc_check(scenario: &Scenario, settings: &Settings, format: Format) -> CliResult<Output> {
    let evals = evaluate_all(scenario, settings)?;
    let reports = evals.iter().map(|e| mc_check_policy(scenario, e, settings)).collect::<CliResult<Vec<_>>>()?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.ok).map(|r| r.name.as_str()).collect();
    let text = match format {
        Format::Json => json(&reports),
        Format::Csv => {
            let header = ["policy", "t", "analytic", "estimate", "std_error", "ok"].map(String::from);
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.points.iter().map(|p| {
                        vec![r.name.clone(), num(p.t), num(p.analytic), num(p.estimate), num(p.std_error), p.ok.to_string()]
                    })
                })
                .collect();
            csv_text(&header, &rows)
        }
    };
    let status = (!failed.is_empty()).then(|| {
        CliError::mismatch(format!("{}: Monte Carlo disagrees beyond 3 standard errors for {}", scenario.path.display(), failed.join(", ")))
    });
    Ok(Output { text, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_times_invert() {
        let ts = level_times(|t: f64| (-t).exp(), &[0.5, 0.25], 50.0);
        assert!((ts[0] - 2f64.ln()).abs() < 1e-12);
        assert!((ts[1] - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn dominance_reports_worst_point() {
        let d = dominance(&[0.0, 1.0, 2.0], &[1.0, 0.5, 0.2], &[1.0, 0.6, 0.1], 1e-9);
        assert!(!d.holds);
        assert_eq!(d.witness, Some([1.0, 0.5, 0.6]));
        assert!(dominance(&[0.0], &[1.0], &[1.0], 0.0).holds);
    }
}
