//! Declarative experiments behind the `dictgreedy` binary.
//!
//! A JSON config names a problem, a dictionary and a list of algorithm runs.
//! Each run writes a CSV trace and a JSON trace (with coefficients); the
//! experiment writes `report.json` and an aligned `summary.txt`. Output is a
//! pure function of the config: runs are seeded and no timings are recorded.
//!
//! CSV columns: `iteration,objective,gap,atom,lambda,alpha,beta,l1_mass,support,evals,delta_eff`.
//! `objective` is the exact `E(G_m)`, `gap` is `objective - e_star` (empty
//! when no reference is known), `atom` is the dictionary index of the chosen
//! atom and unused relaxation parameters are left empty.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::analysis::{check_trace_invariants, quadratic_min_over_l1, rate_verdict, InvariantReport, RateVerdict};
use crate::dictionary::{Dictionary, DictionaryJson};
use crate::error::{Error, Result};
use crate::greedy::{
    ega_c_run, egafr_run, make_coefficients_cs, rega_run, wgafr_run, wrga_run, Algorithm, GreedyOptions,
    GreedyTrace, WeaknessSchedule,
};
use crate::linesearch::{box_eval_budget, MAX_BOX_EVALS};
use crate::objective::{Linear, Logistic, Objective, Oracle, PowerDistance, Quadratic};
use crate::space::NormOrder;

pub const CSV_HEADER: &str = "iteration,objective,gap,atom,lambda,alpha,beta,l1_mass,support,evals,delta_eff";

/// Slope slack for the `m^(1-q)` rates.
pub const RATE_TOLERANCE: f64 = 0.15;

/// Slope slack for the fixed-coefficient rate `m^-r`.
pub const SCHEDULE_RATE_TOLERANCE: f64 = 0.05;

pub const DEFAULT_LS_DEPTH: u32 = 30;
pub const DEFAULT_BURN_IN: usize = 10;
pub const DEFAULT_RATE_R: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "objective", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Quadratic {
        center: Vec<f64>,
    },
    Power {
        center: Vec<f64>,
        q: f64,
    },
    Logistic {
        features: Vec<Vec<f64>>,
        labels: Vec<f64>,
        #[serde(default)]
        ridge: f64,
    },
    Linear {
        a: Vec<f64>,
    },
}

impl ObjectiveSpec {
    pub fn build(&self) -> Result<Arc<dyn Objective>> {
        Ok(match self {
            ObjectiveSpec::Quadratic { center } => Arc::new(Quadratic::new(center.clone())?),
            ObjectiveSpec::Power { center, q } => Arc::new(PowerDistance::new(center.clone(), *q)?),
            ObjectiveSpec::Logistic { features, labels, ridge } => {
                Arc::new(Logistic::new(features.clone(), labels.clone(), *ridge)?)
            }
            ObjectiveSpec::Linear { a } => Arc::new(Linear::new(a.clone())?),
        })
    }
}

/// Problem given inline or by preset name.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ProblemConfig {
    Preset(String),
    Spec(ObjectiveSpec),
}

impl<'de> Deserialize<'de> for ProblemConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        match value {
            serde_json::Value::String(name) => Ok(ProblemConfig::Preset(name)),
            other => ObjectiveSpec::deserialize(other)
                .map(ProblemConfig::Spec)
                .map_err(de::Error::custom),
        }
    }
}

impl ProblemConfig {
    pub fn resolve(&self) -> Result<ObjectiveSpec> {
        match self {
            ProblemConfig::Spec(s) => Ok(s.clone()),
            ProblemConfig::Preset(name) => presets()
                .into_iter()
                .find(|p| p.name == name)
                .map(|p| p.spec)
                .ok_or_else(|| Error::config("problem", format!("unknown preset `{name}` (see --list-problems)"))),
        }
    }
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: ObjectiveSpec,
}

/// Built-in problems.
pub fn presets() -> Vec<Preset> {
    vec![
        Preset {
            name: "quadratic-interior",
            description: "||x - (0.3, 0.2)||^2, minimizer inside A_1",
            spec: ObjectiveSpec::Quadratic { center: vec![0.3, 0.2] },
        },
        Preset {
            name: "quadratic-boundary",
            description: "||x - (0.6, 0.4)||^2, minimizer on the boundary of A_1",
            spec: ObjectiveSpec::Quadratic { center: vec![0.6, 0.4] },
        },
        Preset {
            name: "quadratic-outside",
            description: "||x - (1.5, 0.5)||^2, minimizer in L_2 outside A_1",
            spec: ObjectiveSpec::Quadratic { center: vec![1.5, 0.5] },
        },
        Preset {
            name: "quadratic-origin",
            description: "||x||^2, minimizer at the starting point",
            spec: ObjectiveSpec::Quadratic { center: vec![0.0, 0.0] },
        },
        Preset {
            name: "power-interior",
            description: "sum |x_i - c_i|^1.5 with c = (0.3, -0.2), smoothness order 1.5",
            spec: ObjectiveSpec::Power { center: vec![0.3, -0.2], q: 1.5 },
        },
        Preset {
            name: "logistic-toy",
            description: "ridge logistic loss on six labelled points in R^2",
            spec: ObjectiveSpec::Logistic {
                features: vec![
                    vec![1.0, 0.5],
                    vec![0.8, -0.2],
                    vec![0.3, 1.0],
                    vec![-0.7, 0.1],
                    vec![-0.4, -0.9],
                    vec![-1.0, 0.4],
                ],
                labels: vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
                ridge: 0.1,
            },
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DictionaryConfig {
    Canonical {
        #[serde(default = "default_norm")]
        p: NormOrder,
    },
    Explicit {
        #[serde(default = "default_norm")]
        p: NormOrder,
        atoms: Vec<Vec<f64>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
}

fn default_norm() -> NormOrder {
    NormOrder::L2
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        DictionaryConfig::Canonical { p: NormOrder::L2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: Algorithm,
    /// File stem of the run's outputs; defaults to the algorithm name.
    #[serde(default)]
    pub label: Option<String>,
    pub iterations: usize,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub m_ls: Option<u32>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default)]
    pub early_stop: bool,
}

impl AlgorithmConfig {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.name().to_string())
    }

    fn options(&self) -> GreedyOptions {
        let mut o = GreedyOptions::new(self.iterations)
            .with_depth(self.m_ls.unwrap_or(DEFAULT_LS_DEPTH))
            .with_half_width(self.half_width.unwrap_or(1.0))
            .with_early_stop(self.early_stop);
        o.delta = self.delta;
        o.seed = self.seed;
        o
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Text]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir(), formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub dictionary: DictionaryConfig,
    /// Global minimum of the objective; closed forms are used when absent.
    #[serde(default)]
    pub e_star: Option<f64>,
    /// Minimum over `A_1(D)`.
    #[serde(default)]
    pub e_star_a1: Option<f64>,
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl ExperimentConfig {
    /// Parses JSON; errors name the offending field and position.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<root>".to_string() } else { path };
            Error::config(field, e.into_inner().to_string())
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Builds the problem and checks every run; returns warnings.
    pub fn validate(&self) -> Result<(Problem, Vec<String>)> {
        let problem = Problem::build(self)?;
        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "at least one algorithm is required"));
        }
        let mut warnings = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        for (i, a) in self.algorithms.iter().enumerate() {
            let field = |f: &str| format!("algorithms[{i}].{f}");
            let label = a.label();
            if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(Error::config(field("label"), format!("`{label}` is not a valid file stem")));
            }
            if labels.contains(&label) {
                return Err(Error::config(
                    field("label"),
                    format!("label `{label}` is used twice; give each run a distinct label"),
                ));
            }
            labels.push(label);
            if a.iterations == 0 {
                return Err(Error::config(field("iterations"), "must be positive"));
            }
            if !(a.delta >= 0.0 && a.delta.is_finite()) {
                return Err(Error::config(field("delta"), "must be finite and nonnegative"));
            }
            if a.delta > 0.0 && a.seed.is_none() {
                return Err(Error::config(field("seed"), "a seed is required when delta > 0"));
            }
            let depth = a.m_ls.unwrap_or(DEFAULT_LS_DEPTH);
            if depth == 0 {
                return Err(Error::config(field("m_ls"), "must be positive"));
            }
            if matches!(a.name, Algorithm::Egafr | Algorithm::Wgafr) && box_eval_budget(2, depth) > MAX_BOX_EVALS {
                return Err(Error::config(field("m_ls"), "plane search budget exceeds the evaluation guard"));
            }
            if let Some(t) = a.t {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::config(field("t"), "must lie in (0, 1]"));
                }
            }
            if let Some(h) = a.half_width {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::config(field("half_width"), "must be positive"));
                }
            }
            if a.name.needs_gradient() && !problem.oracle().has_gradient() {
                return Err(Error::config(field("name"), "this algorithm needs a gradient"));
            }
            let q = a.q.or(problem.smoothness_q());
            if let Some(q) = a.q {
                if !(q > 1.0 && q <= 2.0) {
                    return Err(Error::config(field("q"), "must lie in (1, 2]"));
                }
            }
            if let Some(g) = a.gamma {
                if !(g > 0.0 && g.is_finite()) {
                    return Err(Error::config(field("gamma"), "must be positive"));
                }
            }
            if a.name == Algorithm::EgaC {
                let q = q.ok_or_else(|| Error::config(field("q"), "required: the objective declares no smoothness"))?;
                if a.gamma.or(problem.smoothness_gamma()).is_none() {
                    return Err(Error::config(field("gamma"), "required: the objective declares no smoothness"));
                }
                let s = 2.0 / (1.0 + q);
                let r = a.r.unwrap_or(DEFAULT_RATE_R);
                if !(r > 0.0 && r < 1.0 - s) {
                    return Err(Error::config(field("r"), format!("must lie in (0, {:.6})", 1.0 - s)));
                }
            }
            if a.delta > 0.0 {
                if let Some(window) = delta_window(a, q) {
                    if a.iterations as f64 > window {
                        warnings.push(format!(
                            "{}: {} iterations exceed the delta window {:.0}; the rate is fitted on m <= {:.0}",
                            a.label(),
                            a.iterations,
                            window,
                            window
                        ));
                    }
                }
            }
        }
        Ok((problem, warnings))
    }
}

/// Largest `m` covered by the rate guarantee of a `delta` run.
fn delta_window(a: &AlgorithmConfig, q: Option<f64>) -> Option<f64> {
    if a.delta <= 0.0 {
        return None;
    }
    match a.name {
        Algorithm::EgaC => Some(a.delta.powf(-1.0 / (1.0 + a.r.unwrap_or(DEFAULT_RATE_R)))),
        _ => q.map(|q| a.delta.powf(-1.0 / q)),
    }
}

/// A built objective and dictionary with their reference minima.
pub struct Problem {
    pub objective: Arc<dyn Objective>,
    pub dictionary: Dictionary,
    pub e_star: Option<f64>,
    pub e_star_a1: Option<f64>,
}

impl Problem {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let spec = cfg.problem.resolve()?;
        let objective = spec.build().map_err(|e| Error::config("problem", e.to_string()))?;
        let dim = objective.dim();
        let (dictionary, canonical) = match &cfg.dictionary {
            DictionaryConfig::Canonical { p } => (Dictionary::canonical(dim, *p), true),
            DictionaryConfig::Explicit { p, atoms, labels } => {
                let raw = DictionaryJson { p: *p, atoms: atoms.clone(), labels: labels.clone() };
                (raw.into_dictionary(), false)
            }
        };
        let dictionary = dictionary.map_err(|e| Error::config("dictionary", e.to_string()))?;
        if dictionary.dim() != dim {
            return Err(Error::config(
                "dictionary",
                format!("atoms live in R^{} but the problem in R^{dim}", dictionary.dim()),
            ));
        }
        if !dictionary.is_spanning() {
            return Err(Error::config("dictionary", "atoms do not span the space"));
        }
        let (e_star, e_star_a1) = closed_form_minima(&spec, canonical);
        Ok(Problem {
            objective,
            dictionary,
            e_star: cfg.e_star.or(e_star),
            e_star_a1: cfg.e_star_a1.or(e_star_a1),
        })
    }

    /// A fresh exact oracle with its own counter.
    pub fn oracle(&self) -> Oracle {
        Oracle::from_arc(Arc::clone(&self.objective))
    }

    fn smoothness_q(&self) -> Option<f64> {
        self.objective.smoothness().map(|s| s.q)
    }

    fn smoothness_gamma(&self) -> Option<f64> {
        self.objective.smoothness().map(|s| s.gamma)
    }

    /// Reference minimum for the rate fit of `algorithm`.
    pub fn reference(&self, algorithm: Algorithm) -> Option<f64> {
        if algorithm.is_convex_relaxation() {
            self.e_star_a1.or(self.e_star)
        } else {
            self.e_star
        }
    }
}

fn closed_form_minima(spec: &ObjectiveSpec, canonical: bool) -> (Option<f64>, Option<f64>) {
    match spec {
        ObjectiveSpec::Quadratic { center } => {
            (Some(0.0), canonical.then(|| quadratic_min_over_l1(center, 1.0)))
        }
        ObjectiveSpec::Power { center, .. } => {
            let inside = center.iter().map(|c| c.abs()).sum::<f64>() <= 1.0;
            (Some(0.0), (canonical && inside).then_some(0.0))
        }
        ObjectiveSpec::Logistic { .. } | ObjectiveSpec::Linear { .. } => (None, None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub iterations: usize,
    pub delta: f64,
    pub seed: Option<u64>,
    pub final_objective: Option<f64>,
    pub final_gap: Option<f64>,
    pub evals: u64,
    pub max_delta_eff: f64,
    /// Reference minimum of the rate fit.
    pub reference: Option<f64>,
    /// Theoretical slope: `1 - q`, or `-r` for fixed coefficients.
    pub target_exponent: Option<f64>,
    pub tolerance: f64,
    pub rate: Option<RateVerdict>,
    pub invariants: Option<InvariantReport>,
    pub stopped_early: Option<usize>,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn meets_target(&self) -> Option<bool> {
        self.rate.as_ref().map(RateVerdict::meets_target)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: Option<String>,
    pub e_star: Option<f64>,
    pub e_star_a1: Option<f64>,
    pub runs: Vec<RunSummary>,
}

impl ExperimentReport {
    pub fn has_errors(&self) -> bool {
        self.runs.iter().any(|r| matches!(r.status, RunStatus::Error { .. }))
    }

    pub fn invariants_pass(&self) -> bool {
        self.runs
            .iter()
            .all(|r| r.invariants.as_ref().is_none_or(InvariantReport::passed))
    }

    /// 0 when everything passed, 3 after a runtime error, 4 after an
    /// invariant violation.
    pub fn exit_code(&self) -> i32 {
        if self.has_errors() {
            3
        } else if !self.invariants_pass() {
            4
        } else {
            0
        }
    }
}

/// One run of one algorithm on the problem.
pub fn run_algorithm(problem: &Problem, a: &AlgorithmConfig) -> Result<GreedyTrace> {
    let oracle = problem.oracle();
    let dict = &problem.dictionary;
    let opts = a.options();
    let t = WeaknessSchedule::new(a.t.unwrap_or(1.0))?;
    let smooth = problem.objective.smoothness();
    match a.name {
        Algorithm::Rega => rega_run(&oracle, dict, &opts),
        Algorithm::Egafr => egafr_run(&oracle, dict, &opts),
        Algorithm::Wrga => wrga_run(&oracle, dict, t, &opts),
        Algorithm::Wgafr => wgafr_run(&oracle, dict, t, &opts),
        Algorithm::EgaC => {
            let q = a.q.or(smooth.map(|s| s.q)).ok_or_else(|| Error::input("q is required"))?;
            let gamma = a.gamma.or(smooth.map(|s| s.gamma)).ok_or_else(|| Error::input("gamma is required"))?;
            let schedule = make_coefficients_cs(q, gamma, a.iterations)?;
            ega_c_run(&oracle, dict, &schedule, &opts)
        }
    }
}

fn summarize(problem: &Problem, a: &AlgorithmConfig, outcome: &Result<GreedyTrace>) -> RunSummary {
    let q = a.q.or(problem.smoothness_q());
    let (target_exponent, tolerance) = match a.name {
        Algorithm::EgaC => (Some(-a.r.unwrap_or(DEFAULT_RATE_R)), SCHEDULE_RATE_TOLERANCE),
        _ => (q.map(|q| 1.0 - q), RATE_TOLERANCE),
    };
    let reference = problem.reference(a.name);
    let mut summary = RunSummary {
        label: a.label(),
        algorithm: a.name,
        status: RunStatus::Ok,
        iterations: 0,
        delta: a.delta,
        seed: a.seed,
        final_objective: None,
        final_gap: None,
        evals: 0,
        max_delta_eff: 0.0,
        reference,
        target_exponent,
        tolerance,
        rate: None,
        invariants: None,
        stopped_early: None,
        warnings: Vec::new(),
    };
    let trace = match outcome {
        Ok(t) => t,
        Err(e) => {
            summary.status = RunStatus::Error { message: e.to_string() };
            return summary;
        }
    };
    summary.iterations = trace.len();
    summary.final_objective = Some(trace.final_objective());
    summary.final_gap = problem.e_star.map(|e| trace.final_objective() - e);
    summary.evals = trace.last().map_or(0, |r| r.evals);
    summary.max_delta_eff = trace.records.iter().map(|r| r.delta_eff).fold(0.0, f64::max);
    summary.stopped_early = trace.stopped_early;
    if let (Some(reference), Some(target)) = (reference, target_exponent) {
        let mut gaps = trace.gaps(reference);
        if let Some(window) = delta_window(a, q) {
            gaps.truncate((window.floor() as usize).max(1));
        }
        summary.rate = Some(rate_verdict(&gaps, a.burn_in.unwrap_or(DEFAULT_BURN_IN), target + tolerance));
    }
    summary.invariants = Some(check_trace_invariants(trace, &problem.dictionary, &problem.oracle()));
    summary
}

/// Runs every algorithm of the config, concurrently, and writes outputs
/// into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport> {
    let (problem, warnings) = cfg.validate()?;
    let outcomes: Vec<Result<GreedyTrace>> = cfg
        .algorithms
        .par_iter()
        .map(|a| run_algorithm(&problem, a))
        .collect();

    fs::create_dir_all(out_dir)?;
    let formats = &cfg.outputs.formats;
    let mut runs = Vec::new();
    for (a, outcome) in cfg.algorithms.iter().zip(&outcomes) {
        let mut summary = summarize(&problem, a, outcome);
        summary.warnings = warnings
            .iter()
            .filter(|w| w.starts_with(&format!("{}:", a.label())))
            .cloned()
            .collect();
        if let Ok(trace) = outcome {
            if formats.contains(&OutputFormat::Csv) {
                fs::write(out_dir.join(format!("{}.csv", a.label())), trace_csv(trace, problem.e_star))?;
            }
            if formats.contains(&OutputFormat::Json) {
                fs::write(
                    out_dir.join(format!("{}.trace.json", a.label())),
                    serde_json::to_string_pretty(trace)? + "\n",
                )?;
            }
        }
        runs.push(summary);
    }
    let report = ExperimentReport {
        name: cfg.name.clone(),
        e_star: problem.e_star,
        e_star_a1: problem.e_star_a1,
        runs,
    };
    if formats.contains(&OutputFormat::Json) {
        fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    }
    if formats.contains(&OutputFormat::Text) {
        fs::write(out_dir.join("summary.txt"), summary_table(&report))?;
    }
    Ok(report)
}

/// Like [`run_experiment`] and additionally writes `comparison.txt` and
/// `comparison.json`. Needs at least two algorithms.
pub fn compare_algorithms(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(ExperimentReport, String)> {
    if cfg.algorithms.len() < 2 {
        return Err(Error::config("algorithms", "comparison needs at least two algorithms"));
    }
    let report = run_experiment(cfg, out_dir)?;
    let table = comparison_table(&report);
    fs::write(out_dir.join("comparison.txt"), &table)?;
    let rows: Vec<ComparisonRow> = report.runs.iter().map(ComparisonRow::from).collect();
    fs::write(out_dir.join("comparison.json"), serde_json::to_string_pretty(&rows)? + "\n")?;
    Ok((report, table))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub algorithm: String,
    pub final_gap: Option<f64>,
    pub evals: u64,
    pub slope: Option<f64>,
    pub target_exponent: Option<f64>,
    pub max_delta_eff: f64,
    pub meets_target: Option<bool>,
}

impl From<&RunSummary> for ComparisonRow {
    fn from(r: &RunSummary) -> Self {
        ComparisonRow {
            algorithm: r.label.clone(),
            final_gap: r.final_gap,
            evals: r.evals,
            slope: r.rate.as_ref().and_then(RateVerdict::slope),
            target_exponent: r.target_exponent,
            max_delta_eff: r.max_delta_eff,
            meets_target: r.meets_target(),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV rendering of a trace; `e_star` fills the gap column.
pub fn trace_csv(trace: &GreedyTrace, e_star: Option<f64>) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.iteration,
            r.objective,
            opt(e_star.map(|e| r.objective - e)),
            r.atom,
            opt(r.lambda),
            opt(r.alpha),
            opt(r.beta),
            r.l1_mass,
            r.support,
            r.evals,
            r.delta_eff
        );
    }
    out
}

fn sci(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"))
}

fn slope_cell(rate: &Option<RateVerdict>) -> String {
    match rate {
        Some(RateVerdict::Fitted { fit, .. }) => format!("{:.3}", fit.slope),
        Some(RateVerdict::BelowFloor { .. }) => "exact".to_string(),
        Some(RateVerdict::Insufficient { .. }) => "n/a".to_string(),
        None => "-".to_string(),
    }
}

fn verdict_cell(r: &RunSummary) -> &'static str {
    match (&r.status, r.meets_target()) {
        (RunStatus::Error { .. }, _) => "error",
        (_, Some(true)) => "meets target",
        (_, Some(false)) => "misses target",
        (_, None) => "-",
    }
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<String>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&line(header.iter().map(|h| h.to_string()).collect()));
    out.push('\n');
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect()));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.clone()));
        out.push('\n');
    }
    out
}

/// Aligned text summary of a report.
pub fn summary_table(report: &ExperimentReport) -> String {
    let header = ["run", "algorithm", "iters", "final gap", "evals", "slope", "target", "max delta_eff", "invariants", "verdict"];
    let rows: Vec<Vec<String>> = report
        .runs
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                r.algorithm.to_string(),
                r.iterations.to_string(),
                sci(r.final_gap),
                r.evals.to_string(),
                slope_cell(&r.rate),
                r.target_exponent.map_or("-".into(), |t| format!("{t:.3}")),
                format!("{:.3e}", r.max_delta_eff),
                match &r.invariants {
                    Some(i) if i.passed() => "pass".to_string(),
                    Some(i) => format!("{} failures", i.failures()),
                    None => "-".to_string(),
                },
                verdict_cell(r).to_string(),
            ]
        })
        .collect();
    let mut out = String::new();
    if let Some(name) = &report.name {
        let _ = writeln!(out, "experiment: {name}");
    }
    let _ = writeln!(out, "e_star: {}  e_star over A_1: {}", sci(report.e_star), sci(report.e_star_a1));
    out.push('\n');
    out.push_str(&render_table(&header, &rows));
    for r in &report.runs {
        if let RunStatus::Error { message } = &r.status {
            let _ = writeln!(out, "\n{}: error: {message}", r.label);
        }
        for w in &r.warnings {
            let _ = writeln!(out, "\nwarning: {w}");
        }
        if let Some(inv) = &r.invariants {
            for c in inv.checks.iter().filter(|c| !c.passed()) {
                let _ = writeln!(
                    out,
                    "\n{}: {} failed {} of {} ({})",
                    r.label,
                    c.name,
                    c.failures,
                    c.checked,
                    c.first_failure.as_deref().unwrap_or("")
                );
            }
        }
    }
    out
}

/// Algorithm, final gap, evals, slope, theoretical exponent, max `delta_eff`.
pub fn comparison_table(report: &ExperimentReport) -> String {
    let header = ["algorithm", "final gap", "evals", "fitted slope", "exponent", "max delta_eff", "verdict"];
    let rows: Vec<Vec<String>> = report
        .runs
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                sci(r.final_gap),
                r.evals.to_string(),
                slope_cell(&r.rate),
                r.target_exponent.map_or("-".into(), |t| format!("{t:.3}")),
                format!("{:.3e}", r.max_delta_eff),
                verdict_cell(r).to_string(),
            ]
        })
        .collect();
    render_table(&header, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub label: String,
    pub csv_matches: Option<bool>,
    pub invariants: Option<InvariantReport>,
    pub error: Option<String>,
}

impl VerifyEntry {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.csv_matches != Some(false)
            && self.invariants.as_ref().is_some_and(InvariantReport::passed)
    }
}

/// Re-checks traces already written to `out_dir` without re-running.
pub fn verify_outputs(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<VerifyEntry>> {
    let (problem, _) = cfg.validate()?;
    let oracle = problem.oracle();
    Ok(cfg
        .algorithms
        .iter()
        .map(|a| {
            let label = a.label();
            let mut entry = VerifyEntry { label: label.clone(), csv_matches: None, invariants: None, error: None };
            let path = out_dir.join(format!("{label}.trace.json"));
            let trace: GreedyTrace = match fs::read_to_string(&path)
                .map_err(Error::from)
                .and_then(|t| serde_json::from_str(&t).map_err(Error::from))
            {
                Ok(t) => t,
                Err(e) => {
                    entry.error = Some(format!("{}: {e}", path.display()));
                    return entry;
                }
            };
            if let Ok(csv) = fs::read_to_string(out_dir.join(format!("{label}.csv"))) {
                entry.csv_matches = Some(csv == trace_csv(&trace, problem.e_star));
            }
            entry.invariants = Some(check_trace_invariants(&trace, &problem.dictionary, &oracle));
            entry
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"{
        "name": "basic",
        "problem": {"objective": "quadratic", "center": [0.3, 0.2]},
        "algorithms": [{"name": "rega", "iterations": 20, "m_ls": 20}]
    }"#;

    #[test]
    fn parses_defaults() {
        let cfg = ExperimentConfig::from_json(BASIC).unwrap();
        assert_eq!(cfg.dictionary, DictionaryConfig::Canonical { p: NormOrder::L2 });
        assert_eq!(cfg.outputs.formats.len(), 3);
        let (problem, warnings) = cfg.validate().unwrap();
        assert!(warnings.is_empty());
        assert_eq!(problem.e_star, Some(0.0));
        assert_eq!(problem.e_star_a1, Some(0.0));
    }

    #[test]
    fn unknown_algorithm_names_the_field() {
        let text = BASIC.replace("\"rega\"", "\"omp\"");
        match ExperimentConfig::from_json(&text) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "algorithms[0].name"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_field_rejected() {
        let text = BASIC.replace("\"m_ls\"", "\"depth\"");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(Error::Config { .. })));
    }

    #[test]
    fn delta_without_seed_rejected() {
        let text = BASIC.replace("\"m_ls\": 20", "\"m_ls\": 20, \"delta\": 0.001");
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "algorithms[0].seed"),
            other => panic!("unexpected {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn window_warning() {
        let text = BASIC.replace("\"m_ls\": 20", "\"m_ls\": 20, \"delta\": 0.01, \"seed\": 3");
        let (_, warnings) = ExperimentConfig::from_json(&text).unwrap().validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("window 10"));
    }

    #[test]
    fn presets_resolve_and_build() {
        for p in presets() {
            assert!(p.spec.build().is_ok(), "{}", p.name);
        }
        let cfg = ExperimentConfig::from_json(
            r#"{"problem": "quadratic-outside", "algorithms": [{"name": "rega", "iterations": 3}]}"#,
        )
        .unwrap();
        let (p, _) = cfg.validate().unwrap();
        assert!((p.e_star_a1.unwrap() - 0.5).abs() < 1e-15);
        let bad = ExperimentConfig::from_json(r#"{"problem": "nope", "algorithms": []}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let cfg = ExperimentConfig::from_json(
            r#"{"problem": "quadratic-interior", "algorithms": [
                {"name": "rega", "iterations": 3}, {"name": "rega", "iterations": 4}]}"#,
        )
        .unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig::from_json(BASIC).unwrap();
        let (problem, _) = cfg.validate().unwrap();
        let trace = run_algorithm(&problem, &cfg.algorithms[0]).unwrap();
        let csv = trace_csv(&trace, Some(0.0));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 21);
        assert_eq!(lines[1].split(',').count(), 11);
        assert!(lines[1].starts_with("1,"));
    }
}
