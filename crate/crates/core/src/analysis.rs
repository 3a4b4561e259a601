//! Reference minima, compressibility profiles, rate fits and trace checks.
//!
//! Everything here evaluates the objective exactly and without counting;
//! nothing feeds back into the algorithms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Combination, Dictionary};
use crate::error::{Error, Result};
use crate::greedy::{Algorithm, GreedyTrace};
use crate::linesearch::{box_eval_budget, plane_run_budget, UnivariateSearch};
use crate::objective::Oracle;

/// Largest number of objective evaluations a brute-force search may spend.
pub const MAX_GRID_EVALS: f64 = 1e7;

/// Gaps at or below this are excluded from rate fits.
pub const GAP_FLOOR: f64 = 1e-14;

/// Fewest points a rate fit accepts.
pub const MIN_FIT_POINTS: usize = 10;

/// Tolerance between a recorded objective and its re-evaluation.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Depth of the per-pair refinement searches.
const REFINE_DEPTH: u32 = 30;

/// Slack for rounding in the monotonicity and feasibility checks.
const ROUNDING_TOL: f64 = 1e-12;

/// Smallest value found by a brute-force search; an upper bound on the
/// constrained minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub value: f64,
    pub coefficients: Combination,
    pub evaluations: u64,
}

/// Brute-force search over `M * A_1(D)` restricted to small supports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    pub grid_n: usize,
    /// 2 or 3 atoms per candidate.
    pub max_support: usize,
    /// Radius `M` of the dilated hull.
    pub radius: f64,
    pub refine: bool,
}

impl BruteForce {
    pub fn new(grid_n: usize) -> Self {
        BruteForce { grid_n, max_support: 2, radius: 1.0, refine: true }
    }

    pub fn with_support(mut self, k: usize) -> Self {
        self.max_support = k;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_refinement(mut self, on: bool) -> Self {
        self.refine = on;
        self
    }

    /// Evaluations the search would spend.
    pub fn cost(&self, dict_len: usize) -> f64 {
        let n = self.grid_n as f64;
        let k = dict_len as f64;
        let pairs = k * (k - 1.0) / 2.0;
        let mut total = pairs * (n + 1.0) * (n + 2.0) / 2.0;
        if self.max_support >= 3 {
            let triples = pairs * (k - 2.0) / 3.0;
            total += triples * (n + 1.0) * (n + 2.0) * (n + 3.0) / 6.0;
        }
        if self.refine {
            total += pairs * box_eval_budget(2, REFINE_DEPTH);
        }
        total
    }

    pub fn minimize(&self, oracle: &Oracle, dict: &Dictionary) -> Result<GridMinimum> {
        if self.grid_n == 0 {
            return Err(Error::input("grid resolution must be positive"));
        }
        if !(2..=3).contains(&self.max_support) {
            return Err(Error::input("brute-force support must be 2 or 3"));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::input("radius must be finite and nonnegative"));
        }
        if dict.dim() != oracle.dim() {
            return Err(Error::input("dictionary and objective dimensions differ"));
        }
        let cost = self.cost(dict.len());
        if cost > MAX_GRID_EVALS {
            return Err(Error::Budget(format!(
                "brute force would need {cost:.3e} evaluations (guard {MAX_GRID_EVALS:.0e})"
            )));
        }
        let origin = oracle.exact_value(&vec![0.0; dict.dim()])?;
        let mut best = GridMinimum { value: origin, coefficients: Combination::new(), evaluations: 1 };
        if self.radius == 0.0 || dict.len() < 2 {
            return Ok(best);
        }

        let k = dict.len();
        let pairs: Vec<[usize; 2]> = (0..k).flat_map(|i| (i + 1..k).map(move |j| [i, j])).collect();
        let lattice = pairs
            .par_iter()
            .map(|&[i, j]| self.pair_lattice(oracle, dict, i, j))
            .collect::<Result<Vec<_>>>()?;
        merge(&mut best, lattice);

        if self.max_support >= 3 {
            let triples: Vec<[usize; 3]> = pairs
                .iter()
                .flat_map(|&[i, j]| (j + 1..k).map(move |l| [i, j, l]))
                .collect();
            let found = triples
                .par_iter()
                .map(|t| self.triple_lattice(oracle, dict, *t))
                .collect::<Result<Vec<_>>>()?;
            merge(&mut best, found);
        }

        if self.refine {
            let refined = pairs
                .par_iter()
                .map(|&[i, j]| self.pair_refine(oracle, dict, i, j))
                .collect::<Result<Vec<_>>>()?;
            merge(&mut best, refined);
        }
        Ok(best)
    }

    fn point(&self, dict: &Dictionary, terms: &[(usize, f64)]) -> Vec<f64> {
        let mut x = vec![0.0; dict.dim()];
        for &(i, a) in terms {
            for (xi, gi) in x.iter_mut().zip(dict.atoms()[i].as_slice()) {
                *xi += self.radius * a * gi;
            }
        }
        x
    }

    fn candidate(&self, terms: &[(usize, f64)], value: f64, evaluations: u64) -> GridMinimum {
        GridMinimum {
            value,
            coefficients: Combination::from_pairs(terms.iter().map(|&(i, a)| (i, self.radius * a))),
            evaluations,
        }
    }

    fn pair_lattice(&self, oracle: &Oracle, dict: &Dictionary, i: usize, j: usize) -> Result<GridMinimum> {
        let n = self.grid_n;
        let mut best: Option<GridMinimum> = None;
        let mut evals = 0;
        for a in 0..=n {
            for b in 0..=(n - a) {
                let terms = [(i, a as f64 / n as f64), (j, b as f64 / n as f64)];
                let v = oracle.exact_value(&self.point(dict, &terms))?;
                evals += 1;
                if best.as_ref().is_none_or(|b| v < b.value) {
                    best = Some(self.candidate(&terms, v, 0));
                }
            }
        }
        let mut best = best.expect("lattice is nonempty");
        best.evaluations = evals;
        Ok(best)
    }

    fn triple_lattice(&self, oracle: &Oracle, dict: &Dictionary, t: [usize; 3]) -> Result<GridMinimum> {
        let n = self.grid_n;
        let mut best: Option<GridMinimum> = None;
        let mut evals = 0;
        for a in 0..=n {
            for b in 0..=(n - a) {
                for c in 0..=(n - a - b) {
                    let terms = [
                        (t[0], a as f64 / n as f64),
                        (t[1], b as f64 / n as f64),
                        (t[2], c as f64 / n as f64),
                    ];
                    let v = oracle.exact_value(&self.point(dict, &terms))?;
                    evals += 1;
                    if best.as_ref().is_none_or(|b| v < b.value) {
                        best = Some(self.candidate(&terms, v, 0));
                    }
                }
            }
        }
        let mut best = best.expect("lattice is nonempty");
        best.evaluations = evals;
        Ok(best)
    }

    /// Nested exact searches over `{a, b >= 0, a + b <= 1}`: the partial
    /// minimum over `b` is convex in `a`. Independent of `grid_n`.
    fn pair_refine(&self, oracle: &Oracle, dict: &Dictionary, i: usize, j: usize) -> Result<GridMinimum> {
        let mut evals = 0u64;
        let mut best: Option<GridMinimum> = None;
        let outer = UnivariateSearch::unit(REFINE_DEPTH);
        outer.try_minimize(|a| {
            let rest = 1.0 - a;
            let inner_best = if rest <= 0.0 {
                let terms = [(i, a)];
                let v = oracle.exact_value(&self.point(dict, &terms))?;
                evals += 1;
                self.candidate(&terms, v, 0)
            } else {
                let mut local: Option<GridMinimum> = None;
                UnivariateSearch::new(0.0, rest, REFINE_DEPTH).try_minimize(|b| {
                    let terms = [(i, a), (j, b)];
                    let v = oracle.exact_value(&self.point(dict, &terms))?;
                    evals += 1;
                    if local.as_ref().is_none_or(|l| v < l.value) {
                        local = Some(self.candidate(&terms, v, 0));
                    }
                    Ok(v)
                })?;
                local.expect("inner search evaluates")
            };
            let v = inner_best.value;
            if best.as_ref().is_none_or(|b| v < b.value) {
                best = Some(inner_best);
            }
            Ok(v)
        })?;
        let mut best = best.expect("outer search evaluates");
        best.evaluations = evals;
        Ok(best)
    }
}

/// Keeps the smallest value, earliest candidate on ties; sums evaluations.
fn merge(best: &mut GridMinimum, found: Vec<GridMinimum>) {
    for f in found {
        best.evaluations += f.evaluations;
        if f.value < best.value {
            best.value = f.value;
            best.coefficients = f.coefficients;
        }
    }
}

/// Grid upper bound on `inf over A_1(D)` with pairs of atoms.
pub fn brute_force_min_a1(oracle: &Oracle, dict: &Dictionary, grid_n: usize) -> Result<f64> {
    Ok(BruteForce::new(grid_n).minimize(oracle, dict)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressibilityProfile {
    pub m_grid: Vec<f64>,
    pub e_values: Vec<f64>,
    pub method: String,
}

impl CompressibilityProfile {
    /// `e(E, M)` at a grid point.
    pub fn at(&self, m: f64) -> Option<f64> {
        self.m_grid.iter().position(|&x| x == m).map(|i| self.e_values[i])
    }
}

/// `e(E, M) = inf over L_M of E - E*` on each grid radius. Values are made
/// nonincreasing in `M` (the sets are nested) and clamped at zero.
pub fn compressibility(
    oracle: &Oracle,
    dict: &Dictionary,
    m_grid: &[f64],
    grid_n: usize,
    e_star: f64,
) -> Result<CompressibilityProfile> {
    let raw = m_grid
        .iter()
        .map(|&m| {
            BruteForce::new(grid_n)
                .with_radius(m)
                .minimize(oracle, dict)
                .map(|g| g.value - e_star)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..m_grid.len()).collect();
    order.sort_by(|&a, &b| m_grid[a].total_cmp(&m_grid[b]));
    let mut e_values = raw;
    let mut running = f64::INFINITY;
    for &i in &order {
        running = running.min(e_values[i]);
        e_values[i] = running.max(0.0);
    }
    Ok(CompressibilityProfile {
        m_grid: m_grid.to_vec(),
        e_values,
        method: format!("pair lattice 1/{grid_n} with refinement"),
    })
}

/// Euclidean projection onto `{x : ||x||_1 <= radius}`.
pub fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    if v.iter().map(|x| x.abs()).sum::<f64>() <= radius {
        return v.to_vec();
    }
    if radius <= 0.0 {
        return vec![0.0; v.len()];
    }
    let mut u: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumulative += uk;
        let t = (cumulative - radius) / (k + 1) as f64;
        if uk > t {
            theta = t;
        }
    }
    v.iter()
        .map(|&x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}

/// `inf { ||x - center||_2^2 : ||x||_1 <= radius }`, the minimum of the
/// shipped quadratic over `L_radius` for a canonical dictionary.
pub fn quadratic_min_over_l1(center: &[f64], radius: f64) -> f64 {
    let p = project_l1_ball(center, radius);
    center.iter().zip(&p).map(|(c, x)| (c - x) * (c - x)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub burn_in: usize,
    /// First and last iteration of the window.
    pub window: (usize, usize),
    pub used: usize,
    /// Iterations in the window with gap at or below [`GAP_FLOOR`].
    pub excluded: usize,
}

/// Least squares of `log gap` against `log m` over `m in (burn_in, M]`.
pub fn fit_rate(trace: &GreedyTrace, e_star: f64, burn_in: usize) -> Result<RateFit> {
    let gaps = trace.gaps(e_star);
    fit_gaps(&gaps, burn_in)
}

/// [`fit_rate`] on raw gaps, `gaps[k]` belonging to iteration `k + 1`.
pub fn fit_gaps(gaps: &[f64], burn_in: usize) -> Result<RateFit> {
    let window = (burn_in + 1, gaps.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = 0;
    for (k, &g) in gaps.iter().enumerate().skip(burn_in) {
        if g > GAP_FLOOR && g.is_finite() {
            xs.push(((k + 1) as f64).ln());
            ys.push(g.ln());
        } else {
            excluded += 1;
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData { usable: xs.len(), excluded, required: MIN_FIT_POINTS });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(RateFit { slope, intercept, r_squared, burn_in, window, used: xs.len(), excluded })
}

/// Outcome of a rate requirement `slope <= target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RateVerdict {
    Fitted { fit: RateFit, meets_target: bool },
    /// Every gap of the window is at or below the floor: faster than any
    /// power law.
    BelowFloor { window: (usize, usize) },
    Insufficient { usable: usize, excluded: usize },
}

impl RateVerdict {
    pub fn meets_target(&self) -> bool {
        match self {
            RateVerdict::Fitted { meets_target, .. } => *meets_target,
            RateVerdict::BelowFloor { .. } => true,
            RateVerdict::Insufficient { .. } => false,
        }
    }

    pub fn slope(&self) -> Option<f64> {
        match self {
            RateVerdict::Fitted { fit, .. } => Some(fit.slope),
            _ => None,
        }
    }
}

pub fn rate_verdict(gaps: &[f64], burn_in: usize, target: f64) -> RateVerdict {
    match fit_gaps(gaps, burn_in) {
        Ok(fit) => {
            let meets_target = fit.slope <= target;
            RateVerdict::Fitted { fit, meets_target }
        }
        Err(Error::InsufficientData { usable: 0, excluded, .. }) if excluded > 0 => {
            RateVerdict::BelowFloor { window: (burn_in + 1, gaps.len()) }
        }
        Err(Error::InsufficientData { usable, excluded, .. }) => RateVerdict::Insufficient { usable, excluded },
        Err(_) => RateVerdict::Insufficient { usable: 0, excluded: 0 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl InvariantCheck {
    fn new(name: &str) -> Self {
        InvariantCheck { name: name.to_string(), checked: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub algorithm: Algorithm,
    pub checks: Vec<InvariantCheck>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(InvariantCheck::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Re-validates a trace against the dictionary and an exact oracle. Never
/// errors: problems are report entries.
pub fn check_trace_invariants(trace: &GreedyTrace, dict: &Dictionary, exact: &Oracle) -> InvariantReport {
    let algorithm = trace.config.algorithm;
    let depth = trace.config.options.ls_depth as f64;
    let atoms = dict.len() as f64;

    let mut consecutive = InvariantCheck::new("consecutive-iterations");
    let mut evals = InvariantCheck::new("evals-nondecreasing");
    let mut monotone = InvariantCheck::new("monotone-up-to-delta");
    let mut sparsity = InvariantCheck::new("support-at-most-m");
    let mut feasible = InvariantCheck::new("l1-feasibility");
    let mut lambda = InvariantCheck::new("lambda-in-unit-interval");
    let mut ledger = InvariantCheck::new("coefficient-ledger");
    let mut budget = InvariantCheck::new("eval-budget");
    let mut consistent = InvariantCheck::new("materialization-consistency");

    let mut prev_objective = trace.initial_objective;
    let mut prev_evals = 0u64;
    let mut expected = Combination::new();
    let mut schedule_mass = 0.0;

    for (k, r) in trace.records.iter().enumerate() {
        let m = k + 1;
        consecutive.record(r.iteration == m, || format!("record {k} has iteration {}", r.iteration));
        evals.record(r.evals >= prev_evals, || {
            format!("iteration {m}: evals {} after {prev_evals}", r.evals)
        });

        if algorithm.is_monotone() {
            let slack = r.delta_eff + ROUNDING_TOL * (1.0 + prev_objective.abs());
            monotone.record(r.objective <= prev_objective + slack, || {
                format!(
                    "iteration {m}: E = {:.6e} exceeds previous {:.6e} + delta_eff {:.3e}",
                    r.objective, prev_objective, r.delta_eff
                )
            });
        }

        sparsity.record(r.support <= m && r.support == r.coefficients.support(), || {
            format!("iteration {m}: support {} (coefficients {})", r.support, r.coefficients.support())
        });

        if algorithm.is_convex_relaxation() {
            feasible.record(r.l1_mass <= 1.0 + ROUNDING_TOL, || {
                format!("iteration {m}: l1 mass {:.15}", r.l1_mass)
            });
            lambda.record(r.lambda.is_some_and(|l| (0.0..=1.0).contains(&l)), || {
                format!("iteration {m}: lambda {:?}", r.lambda)
            });
        }

        if algorithm == Algorithm::EgaC {
            match trace.config.schedule.as_ref().and_then(|s| s.value(m)) {
                Some(c) => {
                    expected.add(r.atom, c);
                    schedule_mass += c;
                    let matches = r
                        .coefficients
                        .iter()
                        .chain(expected.iter())
                        .all(|(i, _)| (r.coefficients.get(i) - expected.get(i)).abs() <= ROUNDING_TOL);
                    ledger.record(matches && r.l1_mass <= schedule_mass + ROUNDING_TOL, || {
                        format!("iteration {m}: coefficients differ from the summed schedule")
                    });
                }
                None => ledger.record(false, || format!("iteration {m}: no schedule value")),
            }
        }

        let spent = r.evals.saturating_sub(prev_evals) as f64;
        let (limit, exact_count) = match algorithm {
            Algorithm::Rega => (atoms * (3.0 + 2.0 * depth), false),
            Algorithm::Wrga => (3.0 + 2.0 * depth, false),
            Algorithm::EgaC => (atoms, true),
            Algorithm::Egafr | Algorithm::Wgafr => (r.box_runs as f64 * plane_run_budget(depth as u32), false),
        };
        let within = if exact_count { spent == limit } else { spent <= limit };
        budget.record(within, || format!("iteration {m}: {spent} evaluations, budget {limit}"));

        let check = dict.combine(&r.coefficients).and_then(|mat| {
            let v = exact.exact_value(&mat.vector)?;
            Ok((v, mat.l1_mass))
        });
        match check {
            Ok((v, mass)) => consistent.record(
                (v - r.objective).abs() <= CONSISTENCY_TOL && (mass - r.l1_mass).abs() <= CONSISTENCY_TOL,
                || format!("iteration {m}: recorded E = {:.12e}, re-evaluated {:.12e}", r.objective, v),
            ),
            Err(e) => consistent.record(false, || format!("iteration {m}: {e}")),
        }

        prev_objective = r.objective;
        prev_evals = r.evals;
    }

    let mut checks = vec![consecutive, evals, sparsity, budget, consistent];
    if algorithm.is_monotone() {
        checks.insert(2, monotone);
    }
    if algorithm.is_convex_relaxation() {
        checks.push(feasible);
        checks.push(lambda);
    }
    if algorithm == Algorithm::EgaC {
        checks.push(ledger);
    }
    InvariantReport { algorithm, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{rega_run, GreedyOptions};
    use crate::objective::Quadratic;
    use crate::space::NormOrder;

    fn setup(center: &[f64]) -> (Oracle, Dictionary) {
        (
            Oracle::new(Quadratic::new(center.to_vec()).unwrap()),
            Dictionary::canonical(center.len(), NormOrder::L2).unwrap(),
        )
    }

    #[test]
    fn brute_force_examples() {
        let (o, d) = setup(&[0.3, 0.2]);
        assert!(BruteForce::new(1000).with_refinement(false).minimize(&o, &d).unwrap().value <= 1e-4);
        assert!(brute_force_min_a1(&o, &d, 1000).unwrap() <= 1e-4);
        let (o, d) = setup(&[2.0, 0.0]);
        assert!((brute_force_min_a1(&o, &d, 100).unwrap() - 1.0).abs() < 1e-12);
        let (o, d) = setup(&[0.0, 0.0]);
        let g = BruteForce::new(10).minimize(&o, &d).unwrap();
        assert_eq!(g.value, 0.0);
        assert!(g.coefficients.is_empty());
    }

    #[test]
    fn brute_force_budget_guard() {
        let (o, d) = setup(&[0.3, 0.2, 0.1]);
        let r = BruteForce::new(1000).with_support(3).minimize(&o, &d);
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    #[test]
    fn finer_nested_grid_never_worse() {
        let (o, d) = setup(&[0.37, -0.21]);
        for n in [3usize, 7, 20] {
            let coarse = BruteForce::new(n).with_refinement(false).minimize(&o, &d).unwrap().value;
            let fine = BruteForce::new(2 * n).with_refinement(false).minimize(&o, &d).unwrap().value;
            assert!(fine <= coarse);
            let coarse = brute_force_min_a1(&o, &d, n).unwrap();
            let fine = brute_force_min_a1(&o, &d, 2 * n).unwrap();
            assert!(fine <= coarse);
        }
    }

    #[test]
    fn compressibility_example() {
        let (o, d) = setup(&[1.5, 0.5]);
        let p = compressibility(&o, &d, &[0.0, 1.0, 2.0, 3.0], 200, 0.0).unwrap();
        assert!((p.at(0.0).unwrap() - 2.5).abs() < 1e-12);
        assert!((p.at(1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(p.at(2.0).unwrap() < 1e-12);
        assert!(p.e_values.windows(2).all(|w| w[1] <= w[0]));
        let a1 = brute_force_min_a1(&o, &d, 200).unwrap();
        assert!((p.at(1.0).unwrap() - a1).abs() < 1e-12);
    }

    #[test]
    fn projection_matches_soft_threshold() {
        let p = project_l1_ball(&[1.5, 0.5], 1.0);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        assert_eq!(project_l1_ball(&[0.3, -0.2], 1.0), vec![0.3, -0.2]);
        assert!((quadratic_min_over_l1(&[1.5, 0.5], 1.0) - 0.5).abs() < 1e-15);
        assert!((quadratic_min_over_l1(&[2.0, 0.0], 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_power_laws() {
        let gaps: Vec<f64> = (1..=100).map(|m| 1.0 / m as f64).collect();
        let fit = fit_gaps(&gaps, 0).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
        let gaps: Vec<f64> = (1..=100).map(|m| 0.04 / m as f64).collect();
        let fit = fit_gaps(&gaps, 10).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-9);
        assert!((fit.intercept - 0.04f64.ln()).abs() < 1e-9);
        assert_eq!(fit.window, (11, 100));
    }

    #[test]
    fn fit_needs_enough_points() {
        let mut gaps = vec![1.0; 20];
        gaps[12..].iter_mut().for_each(|g| *g = 0.0);
        assert!(matches!(fit_gaps(&gaps, 5), Err(Error::InsufficientData { usable: 7, excluded: 8, .. })));
        assert!(matches!(rate_verdict(&vec![0.0; 30], 10, -1.0), RateVerdict::BelowFloor { .. }));
        assert!(!rate_verdict(&gaps, 5, -1.0).meets_target());
    }

    #[test]
    fn exact_rega_trace_passes_and_negative_controls_fail() {
        let (o, d) = setup(&[0.3, 0.2]);
        let t = rega_run(&o, &d, &GreedyOptions::new(20).with_depth(20)).unwrap();
        let report = check_trace_invariants(&t, &d, &o);
        assert!(report.passed(), "{report:?}");

        let mut bumped = t.clone();
        bumped.records[1].objective = bumped.records[0].objective + 1e-3;
        let report = check_trace_invariants(&bumped, &d, &o);
        assert!(!report.check("monotone-up-to-delta").unwrap().passed());

        let mut lying = t.clone();
        lying.records[0].objective = 0.0;
        let report = check_trace_invariants(&lying, &d, &o);
        assert!(!report.check("materialization-consistency").unwrap().passed());
    }
}
