//! Greedy algorithms over a symmetric dictionary.
//!
//! Every runner starts from `G_0 = 0` and produces a [`GreedyTrace`]. Step
//! values are searched with the routines of [`crate::linesearch`]; when the
//! run asks for corruption (`delta > 0`) the searches only ever see values of
//! a corrupted copy of the oracle, while the trace records the exact value of
//! each iterate for later verification.
//!
//! Each step carries an effective error `delta_eff`: the largest certified
//! gap among the searches of that step plus `2 delta`, the most that picking
//! the best observed candidate can lose to corruption.

mod ega;
mod egafr;
mod rega;
mod schedule;
mod weak;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Combination, Dictionary};
use crate::error::{Error, Result};
use crate::objective::Oracle;

pub use ega::{ega_c_run, ega_c_step};
pub use egafr::{egafr_run, egafr_step};
pub use rega::{rega_run, rega_step};
pub use schedule::{make_coefficients_cs, zeta_bound, CoefficientSchedule, WeaknessSchedule};
pub use weak::{select_atom_gradient, wgafr_run, wgafr_step, wrga_run, wrga_step, SelectionMode};

/// Improvement below which a step counts as stalled for early stopping.
pub const STALL_TOL: f64 = 1e-14;

/// Consecutive stalled steps that trigger an early stop.
pub const STALL_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Rega,
    Egafr,
    EgaC,
    Wrga,
    Wgafr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Rega,
        Algorithm::Egafr,
        Algorithm::EgaC,
        Algorithm::Wrga,
        Algorithm::Wgafr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rega => "rega",
            Algorithm::Egafr => "egafr",
            Algorithm::EgaC => "ega-c",
            Algorithm::Wrga => "wrga",
            Algorithm::Wgafr => "wgafr",
        }
    }

    /// Iterates stay in `A_1(D)`.
    pub fn is_convex_relaxation(self) -> bool {
        matches!(self, Algorithm::Rega | Algorithm::Wrga)
    }

    /// `E(G_m) <= E(G_{m-1}) + delta_eff` holds by construction.
    pub fn is_monotone(self) -> bool {
        self != Algorithm::EgaC
    }

    pub fn needs_gradient(self) -> bool {
        matches!(self, Algorithm::Wrga | Algorithm::Wgafr)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown algorithm `{s}` (expected one of rega, egafr, ega-c, wrga, wgafr)"
                ))
            })
    }
}

/// Run parameters shared by all algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOptions {
    pub iterations: usize,
    /// Corruption budget of the value oracle seen by the searches.
    pub delta: f64,
    pub seed: Option<u64>,
    /// Depth of every line or box search.
    pub ls_depth: u32,
    /// Starting half-width of the plane searches.
    pub initial_half_width: f64,
    pub early_stop: bool,
}

impl GreedyOptions {
    pub fn new(iterations: usize) -> Self {
        GreedyOptions {
            iterations,
            delta: 0.0,
            seed: None,
            ls_depth: 30,
            initial_half_width: 1.0,
            early_stop: false,
        }
    }

    pub fn with_delta(mut self, delta: f64, seed: u64) -> Self {
        self.delta = delta;
        self.seed = Some(seed);
        self
    }

    pub fn with_depth(mut self, ls_depth: u32) -> Self {
        self.ls_depth = ls_depth;
        self
    }

    pub fn with_half_width(mut self, h: f64) -> Self {
        self.initial_half_width = h;
        self
    }

    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::input("iterations must be positive"));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::input(format!("delta must be nonnegative, got {}", self.delta)));
        }
        if self.delta > 0.0 && self.seed.is_none() {
            return Err(Error::input("a seed is required when delta > 0"));
        }
        if self.ls_depth == 0 {
            return Err(Error::input("line-search depth must be positive"));
        }
        if !(self.initial_half_width > 0.0 && self.initial_half_width.is_finite()) {
            return Err(Error::input("initial half-width must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub atom: usize,
    pub lambda: Option<f64>,
    pub w: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Exact `E(G_m)`.
    pub objective: f64,
    /// Value of `G_m` as seen by the algorithm.
    pub observed: f64,
    pub coefficients: Combination,
    pub l1_mass: f64,
    pub support: usize,
    /// Oracle queries since the start of the run.
    pub evals: u64,
    pub delta_eff: f64,
    /// Plane-search runs (box searches) spent on this step.
    #[serde(default)]
    pub box_runs: u32,
}

/// Snapshot of what produced a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub algorithm: Algorithm,
    pub options: GreedyOptions,
    pub dictionary_size: usize,
    pub objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<CoefficientSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub config: TraceConfig,
    /// Exact `E(G_0) = E(0)`.
    pub initial_objective: f64,
    pub records: Vec<TraceRecord>,
    #[serde(default)]
    pub final_gap: Option<f64>,
    /// Iteration after which the run stopped early.
    #[serde(default)]
    pub stopped_early: Option<usize>,
}

impl GreedyTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Exact objective of the last iterate, `E(G_0)` for an empty trace.
    pub fn final_objective(&self) -> f64 {
        self.last().map_or(self.initial_objective, |r| r.objective)
    }

    /// Sets `final_gap` from a reference minimum.
    pub fn with_e_star(mut self, e_star: f64) -> Self {
        self.final_gap = Some(self.final_objective() - e_star);
        self
    }

    pub fn gaps(&self, e_star: f64) -> Vec<f64> {
        self.records.iter().map(|r| r.objective - e_star).collect()
    }

    /// Exact objective of iterate `m` (`m = 0` is the origin).
    pub fn objective_at(&self, m: usize) -> Option<f64> {
        match m {
            0 => Some(self.initial_objective),
            _ => self.records.get(m - 1).map(|r| r.objective),
        }
    }
}

/// Outcome of one greedy step from a given iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub atom: usize,
    pub lambda: Option<f64>,
    pub w: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub coefficients: Combination,
    pub observed: f64,
    /// Largest certified gap among the searches of the step.
    pub certificate: f64,
    pub box_runs: u32,
}

/// Current iterate in sparse and dense form.
pub struct Iterate<'a> {
    pub coefficients: &'a Combination,
    pub point: &'a [f64],
}

/// `a * x + b * y`.
pub(crate) fn affine(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

/// Result of one per-atom search.
pub(crate) struct Candidate<T> {
    pub value: f64,
    pub certificate: f64,
    pub box_runs: u32,
    pub payload: T,
}

impl<T> Candidate<T> {
    pub fn new(value: f64, certificate: f64, payload: T) -> Self {
        Candidate { value, certificate, box_runs: 0, payload }
    }
}

/// Best candidate of a step, with the worst certificate and total box runs
/// over all atoms searched.
pub(crate) struct Selection<T> {
    pub atom: usize,
    pub value: f64,
    pub payload: T,
    pub certificate: f64,
    pub box_runs: u32,
}

/// Deterministic reduction: smallest value, then lowest index.
pub(crate) fn select_best<T>(candidates: Vec<(usize, Candidate<T>)>) -> Option<Selection<T>> {
    let certificate = candidates.iter().fold(0.0f64, |m, (_, c)| m.max(c.certificate));
    let box_runs = candidates.iter().map(|(_, c)| c.box_runs).sum();
    let (atom, best) = candidates
        .into_iter()
        .reduce(|best, c| if c.1.value < best.1.value { c } else { best })?;
    Some(Selection { atom, value: best.value, payload: best.payload, certificate, box_runs })
}

/// Runs `search` for every atom in parallel and keeps the best.
pub(crate) fn search_atoms<T: Send>(
    dict: &Dictionary,
    search: impl Fn(usize) -> Result<Candidate<T>> + Sync,
) -> Result<Selection<T>> {
    let outcomes: Vec<Result<Candidate<T>>> = (0..dict.len()).into_par_iter().map(&search).collect();
    // the first failure in atom order, so errors are deterministic too
    let results = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map(|c| (i, c)))
        .collect::<Result<Vec<_>>>()?;
    select_best(results).ok_or_else(|| Error::input("dictionary is empty"))
}

fn check_inputs(oracle: &Oracle, dict: &Dictionary) -> Result<()> {
    if dict.is_empty() {
        return Err(Error::input("dictionary is empty"));
    }
    if dict.dim() != oracle.dim() {
        return Err(Error::input(format!(
            "dictionary lives in R^{} but the objective in R^{}",
            dict.dim(),
            oracle.dim()
        )));
    }
    Ok(())
}

pub(crate) struct RunSetup {
    pub algorithm: Algorithm,
    pub schedule: Option<CoefficientSchedule>,
    pub weakness: Option<f64>,
}

/// Shared outer loop. `step` receives the value oracle, the current iterate
/// and the iteration number.
pub(crate) fn drive(
    oracle: &Oracle,
    dict: &Dictionary,
    opts: &GreedyOptions,
    setup: RunSetup,
    mut step: impl FnMut(&Oracle, &Iterate<'_>, usize) -> Result<StepOutcome>,
) -> Result<GreedyTrace> {
    opts.validate()?;
    check_inputs(oracle, dict)?;
    let corrupted;
    let values: &Oracle = if opts.delta > 0.0 {
        corrupted = oracle.corrupt(opts.delta, opts.seed.unwrap_or_default())?;
        &corrupted
    } else {
        oracle
    };
    let delta = values.delta();
    let start = values.eval_count();

    let mut coefficients = Combination::new();
    let mut point = vec![0.0; dict.dim()];
    let initial_objective = oracle.exact_value(&point)?;
    let mut records = Vec::with_capacity(opts.iterations);
    let mut stalled = 0usize;
    let mut stopped_early = None;

    for m in 1..=opts.iterations {
        let out = step(values, &Iterate { coefficients: &coefficients, point: &point }, m)?;
        coefficients = out.coefficients;
        let mat = dict.combine(&coefficients)?;
        point = mat.vector;
        let objective = oracle.exact_value(&point)?;
        let improvement = records
            .last()
            .map(|r: &TraceRecord| r.observed - out.observed);
        records.push(TraceRecord {
            iteration: m,
            atom: out.atom,
            lambda: out.lambda,
            w: out.w,
            alpha: out.alpha,
            beta: out.beta,
            objective,
            observed: out.observed,
            coefficients: coefficients.clone(),
            l1_mass: mat.l1_mass,
            support: mat.support,
            evals: values.eval_count() - start,
            delta_eff: out.certificate + 2.0 * delta,
            box_runs: out.box_runs,
        });
        if opts.early_stop {
            match improvement {
                Some(d) if d < STALL_TOL => stalled += 1,
                Some(_) => stalled = 0,
                None => {}
            }
            if stalled >= STALL_STEPS && m < opts.iterations {
                stopped_early = Some(m);
                break;
            }
        }
    }

    Ok(GreedyTrace {
        config: TraceConfig {
            algorithm: setup.algorithm,
            options: opts.clone(),
            dictionary_size: dict.len(),
            objective: oracle.objective().name(),
            schedule: setup.schedule,
            weakness: setup.weakness,
        },
        initial_objective,
        records,
        final_gap: None,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            let json = serde_json::to_string(&a).unwrap();
            assert_eq!(json, format!("\"{}\"", a.name()));
        }
        assert!("omp".parse::<Algorithm>().is_err());
    }

    #[test]
    fn reduction_prefers_lowest_index_on_ties() {
        let c = [(1.0, 0.1), (0.5, 0.0), (0.5, 0.3), (0.7, 0.2)]
            .into_iter()
            .enumerate()
            .map(|(i, (v, cert))| (i, Candidate::new(v, cert, ())))
            .collect();
        let s = select_best(c).unwrap();
        assert_eq!(s.atom, 1);
        assert_eq!(s.certificate, 0.3);
    }

    #[test]
    fn options_validation() {
        assert!(GreedyOptions::new(0).validate().is_err());
        let mut o = GreedyOptions::new(3);
        o.delta = 1e-3;
        assert!(o.validate().is_err());
        assert!(GreedyOptions::new(3).with_delta(1e-3, 1).validate().is_ok());
        assert!(GreedyOptions::new(3).with_depth(0).validate().is_err());
    }
}
