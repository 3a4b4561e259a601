//! Certified derivative-free minimization of convex functions.
//!
//! The univariate routine keeps an active interval with known values at its
//! endpoints and midpoint. Each iteration spends at most two new queries and
//! halves the interval, so `m` iterations cost at most `3 + 2m` queries.
//! With exact values the minimizer never leaves the active interval. With
//! values known only to within `delta`, comparisons against the midpoint use
//! a `2 delta` guard band and each iteration may lose at most `4 delta`.
//!
//! The box routine minimizes coordinate-wise: the last coordinate is searched
//! with the corrupted-value routine, every value it sees being the result of a
//! recursive search over the remaining coordinates. The plane routine runs the
//! two-dimensional box search on a centred square and doubles the square
//! until the answer is interior.

use crate::error::{Error, Result};

/// Upper limit on `(3 + 2m)^d` for a box search.
pub const MAX_BOX_EVALS: f64 = 1e8;

/// Number of half-width doublings the plane search tries before giving up.
pub const MAX_DOUBLINGS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchResult {
    pub x_best: f64,
    /// Value observed at `x_best` (exact when `delta == 0`).
    pub f_best: f64,
    pub eval_count: usize,
    /// Upper bound on `f(x_best) - min f` for the Lipschitz constant below.
    pub certified_gap: f64,
    pub lipschitz: f64,
    /// True when `lipschitz` was estimated from queried values.
    pub lipschitz_empirical: bool,
    /// Active interval before the first and after every iteration.
    pub brackets: Vec<Bracket>,
    /// `(x, observed value)` in query order.
    pub queries: Vec<(f64, f64)>,
}

/// Univariate convex minimization on `[lo, hi]` with `depth` halvings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateSearch {
    pub lo: f64,
    pub hi: f64,
    pub depth: u32,
    pub delta: f64,
    pub lipschitz: Option<f64>,
}

impl UnivariateSearch {
    pub fn new(lo: f64, hi: f64, depth: u32) -> Self {
        UnivariateSearch { lo, hi, depth, delta: 0.0, lipschitz: None }
    }

    pub fn unit(depth: u32) -> Self {
        Self::new(0.0, 1.0, depth)
    }

    /// Values are known only to within `delta`.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Lipschitz constant used for the certificate (never by the search).
    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = Some(lipschitz);
        self
    }

    pub fn minimize(&self, mut f: impl FnMut(f64) -> f64) -> Result<LineSearchResult> {
        self.try_minimize(|x| Ok(f(x)))
    }

    pub fn try_minimize(&self, mut f: impl FnMut(f64) -> Result<f64>) -> Result<LineSearchResult> {
        let core = bisect(self.lo, self.hi, self.depth, self.delta, |x| f(x).map(|y| (y, ())))?;
        let (lipschitz, lipschitz_empirical) = match self.lipschitz {
            Some(l) => (l, false),
            None => (core.empirical_lipschitz(), true),
        };
        let chosen = &core.probes[core.chosen];
        Ok(LineSearchResult {
            x_best: chosen.x,
            f_best: chosen.y,
            eval_count: core.probes.len(),
            certified_gap: univariate_gap(self.hi - self.lo, self.depth, self.delta, lipschitz),
            lipschitz,
            lipschitz_empirical,
            brackets: core.brackets,
            queries: core.probes.iter().map(|p| (p.x, p.y)).collect(),
        })
    }
}

/// Exact values on `[0, 1]`, Lipschitz constant 1 in the certificate.
pub fn minimize_unit_interval(f: impl FnMut(f64) -> f64, m: u32) -> Result<LineSearchResult> {
    UnivariateSearch::unit(m).with_lipschitz(1.0).minimize(f)
}

/// Values within `delta` of a convex Lipschitz-1 function on `[0, 1]`.
pub fn minimize_unit_interval_corrupted(
    y: impl FnMut(f64) -> f64,
    m: u32,
    delta: f64,
) -> Result<LineSearchResult> {
    UnivariateSearch::unit(m)
        .with_delta(delta)
        .with_lipschitz(1.0)
        .minimize(y)
}

/// `L (b - a) 2^-m + (4m + 1) delta`, the second term only when `delta > 0`.
pub fn univariate_gap(width: f64, m: u32, delta: f64, lipschitz: f64) -> f64 {
    let base = lipschitz * width * 0.5f64.powi(m as i32);
    if delta > 0.0 {
        base + (4.0 * m as f64 + 1.0) * delta
    } else {
        base
    }
}

/// Relative certificate of a `d`-variate box search on a Lipschitz-1 unit
/// cube: `b_1 = 2^-m`, `b_k = 2^-m + (4m + 1) b_{k-1}`. Never exceeds
/// `2^-m (4m + 2)^d`.
pub fn box_relative_gap(d: usize, m: u32) -> f64 {
    let h = 0.5f64.powi(m as i32);
    let k = 4.0 * m as f64 + 1.0;
    (1..d).fold(h, |b, _| h + k * b)
}

/// `2^-m (4m + 2)^d`.
pub fn box_nominal_gap(d: usize, m: u32) -> f64 {
    0.5f64.powi(m as i32) * (4.0 * m as f64 + 2.0).powi(d as i32)
}

/// `(3 + 2m)^d`.
pub fn box_eval_budget(d: usize, m: u32) -> f64 {
    (3.0 + 2.0 * m as f64).powi(d as i32)
}

fn validate_interval(lo: f64, hi: f64, m: u32, delta: f64) -> Result<()> {
    if m < 1 {
        return Err(Error::input("line search needs at least one iteration"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::input(format!("invalid search interval [{lo}, {hi}]")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::input(format!("corruption bound must be nonnegative, got {delta}")));
    }
    Ok(())
}

struct Probe<T> {
    x: f64,
    y: f64,
    payload: T,
}

struct Bisection<T> {
    probes: Vec<Probe<T>>,
    brackets: Vec<Bracket>,
    chosen: usize,
    coarse: usize,
}

impl<T> Bisection<T> {
    /// Largest secant slope between consecutive probes on the quarter grid of
    /// the initial interval, plus the largest change between neighbouring
    /// secants so that the endpoint slopes of a quadratic are covered.
    fn empirical_lipschitz(&self) -> f64 {
        let mut pts: Vec<(f64, f64)> = self.probes[..self.coarse]
            .iter()
            .map(|p| (p.x, p.y))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let slopes: Vec<f64> = pts
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        extrapolated_slope(&slopes)
    }
}

/// `max |s_i| + max |s_{i+1} - s_i|` over consecutive secant slopes.
fn extrapolated_slope(slopes: &[f64]) -> f64 {
    let steepest = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let bend = slopes
        .windows(2)
        .fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs()));
    steepest + bend
}

fn bisect<T>(
    lo: f64,
    hi: f64,
    m: u32,
    delta: f64,
    mut f: impl FnMut(f64) -> Result<(f64, T)>,
) -> Result<Bisection<T>> {
    validate_interval(lo, hi, m, delta)?;
    let mut probes: Vec<Probe<T>> = Vec::with_capacity(3 + 2 * m as usize);
    let mut query = |x: f64, probes: &mut Vec<Probe<T>>| -> Result<usize> {
        let (y, payload) = f(x)?;
        if !y.is_finite() {
            return Err(Error::input(format!("objective returned a non-finite value at {x}")));
        }
        probes.push(Probe { x, y, payload });
        Ok(probes.len() - 1)
    };

    let mut l = query(lo, &mut probes)?;
    let mut c = query(0.5 * (lo + hi), &mut probes)?;
    let mut r = query(hi, &mut probes)?;
    let mut brackets = vec![Bracket { lo, hi }];
    let guard = 2.0 * delta;
    let mut coarse = probes.len();

    for iteration in 0..m {
        let (xl, xr) = (probes[l].x, probes[r].x);
        let (yl, yc, yr) = (probes[l].y, probes[c].y, probes[r].y);
        let w = xr - xl;
        let quarter = xl + 0.25 * w;
        let three_quarter = xl + 0.75 * w;

        if yl <= yr {
            if yl <= yc {
                // the right half cannot beat the midpoint by more than 2 delta
                let nc = query(quarter, &mut probes)?;
                r = c;
                c = nc;
            } else {
                let q1 = query(quarter, &mut probes)?;
                if probes[q1].y < yc - guard {
                    r = c;
                    c = q1;
                } else {
                    let q3 = query(three_quarter, &mut probes)?;
                    if probes[q3].y < yc - guard {
                        l = c;
                        c = q3;
                    } else {
                        l = q1;
                        r = q3;
                    }
                }
            }
        } else if yr <= yc {
            let nc = query(three_quarter, &mut probes)?;
            l = c;
            c = nc;
        } else {
            let q3 = query(three_quarter, &mut probes)?;
            if probes[q3].y < yc - guard {
                l = c;
                c = q3;
            } else {
                let q1 = query(quarter, &mut probes)?;
                if probes[q1].y < yc - guard {
                    r = c;
                    c = q1;
                } else {
                    l = q1;
                    r = q3;
                }
            }
        }
        brackets.push(Bracket { lo: probes[l].x, hi: probes[r].x });
        if iteration == 0 {
            coarse = probes.len();
        }
    }

    let chosen = if delta > 0.0 {
        c
    } else {
        // first query with the smallest value
        probes
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.y < probes[best].y { i } else { best })
    };

    Ok(Bisection { probes, brackets, chosen, coarse })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSearchResult {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub eval_count: usize,
    /// `scale * box_relative_gap(d, m)`.
    pub certified_gap: f64,
    /// Per-coordinate Lipschitz bound times the widest side of the box.
    pub scale: f64,
}

/// Box search on the unit cube `[0, 1]^d` for a per-coordinate Lipschitz-1
/// convex `f`.
pub fn minimize_box(mut f: impl FnMut(&[f64]) -> f64, d: usize, m: u32) -> Result<BoxSearchResult> {
    if d == 0 {
        return Err(Error::input("box search needs at least one coordinate"));
    }
    minimize_box_in(|x| Ok(f(x)), &vec![0.0; d], &vec![1.0; d], m, 1.0)
}

/// Box search on `prod [lower_i, upper_i]`. `lipschitz` bounds every partial
/// slope; it fixes the guard band used for the outer coordinates.
pub fn minimize_box_in(
    mut f: impl FnMut(&[f64]) -> Result<f64>,
    lower: &[f64],
    upper: &[f64],
    m: u32,
    lipschitz: f64,
) -> Result<BoxSearchResult> {
    let d = lower.len();
    if d == 0 || upper.len() != d {
        return Err(Error::input("box bounds must be nonempty and of equal length"));
    }
    if m < 1 {
        return Err(Error::input("box search needs at least one iteration"));
    }
    if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
        return Err(Error::input("Lipschitz bound must be finite and nonnegative"));
    }
    let budget = box_eval_budget(d, m);
    if budget > MAX_BOX_EVALS {
        return Err(Error::Budget(format!(
            "(3 + 2m)^d = {budget:.3e} exceeds the {MAX_BOX_EVALS:.0e} evaluation guard (d = {d}, m = {m})"
        )));
    }
    let width = lower
        .iter()
        .zip(upper)
        .map(|(a, b)| b - a)
        .fold(0.0, f64::max);
    let scale = lipschitz * width;

    let mut evals = 0usize;
    let mut counted = |x: &[f64]| {
        evals += 1;
        f(x)
    };
    let mut point = lower.to_vec();
    let (f_best, x_best) = solve_box(d, &mut point, lower, upper, m, scale, &mut counted)?;
    Ok(BoxSearchResult {
        x_best,
        f_best,
        eval_count: evals,
        certified_gap: scale * box_relative_gap(d, m),
        scale,
    })
}

fn solve_box(
    k: usize,
    point: &mut Vec<f64>,
    lower: &[f64],
    upper: &[f64],
    m: u32,
    scale: f64,
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
) -> Result<(f64, Vec<f64>)> {
    let axis = k - 1;
    if k == 1 {
        let core = bisect(lower[0], upper[0], m, 0.0, |t| {
            point[0] = t;
            f(point).map(|y| (y, ()))
        })?;
        let best = &core.probes[core.chosen];
        return Ok((best.y, vec![best.x]));
    }
    // inner values overshoot the partial minimum by at most this much
    let delta = scale * box_relative_gap(k - 1, m);
    let core = bisect(lower[axis], upper[axis], m, delta, |t| {
        point[axis] = t;
        solve_box(k - 1, point, lower, upper, m, scale, f)
    })?;
    let best = &core.probes[core.chosen];
    let mut coords = best.payload.clone();
    coords.push(best.x);
    Ok((best.y, coords))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSearchResult {
    pub point: [f64; 2],
    pub f_best: f64,
    pub eval_count: usize,
    /// Box certificate of the accepted run, with an empirical Lipschitz bound.
    pub certified_gap: f64,
    pub half_width: f64,
    pub doublings: u32,
    pub box_runs: u32,
    pub lipschitz: f64,
}

/// Evaluations spent by one plane-search run: 9 probes plus the box search.
pub fn plane_run_budget(m: u32) -> f64 {
    9.0 + box_eval_budget(2, m)
}

/// Minimizes a convex `f` over `R^2` on squares `[-h, h]^2`, doubling `h`
/// while the answer sits on the boundary and keeps improving.
pub fn minimize_plane(mut f: impl FnMut(f64, f64) -> f64, m: u32, initial_half_width: f64) -> Result<PlaneSearchResult> {
    try_minimize_plane(|a, b| Ok(f(a, b)), m, initial_half_width)
}

pub fn try_minimize_plane(
    mut f: impl FnMut(f64, f64) -> Result<f64>,
    m: u32,
    initial_half_width: f64,
) -> Result<PlaneSearchResult> {
    if !(initial_half_width > 0.0 && initial_half_width.is_finite()) {
        return Err(Error::input("initial half-width must be positive"));
    }
    let mut evals = 0usize;
    let mut previous: Option<PlaneSearchResult> = None;

    for doubling in 0..=MAX_DOUBLINGS {
        let h = initial_half_width * 2f64.powi(doubling as i32);
        let grid = [-h, 0.0, h];
        let mut probe = [[0.0; 3]; 3];
        for (i, &a) in grid.iter().enumerate() {
            for (j, &b) in grid.iter().enumerate() {
                probe[i][j] = f(a, b)?;
                if !probe[i][j].is_finite() {
                    return Err(Error::input(format!("objective is not finite at ({a}, {b})")));
                }
            }
        }
        evals += 9;
        let mut lipschitz = 0.0f64;
        for i in 0..3 {
            let row: Vec<f64> = (0..2).map(|j| (probe[i][j + 1] - probe[i][j]) / h).collect();
            let col: Vec<f64> = (0..2).map(|j| (probe[j + 1][i] - probe[j][i]) / h).collect();
            lipschitz = lipschitz
                .max(extrapolated_slope(&row))
                .max(extrapolated_slope(&col));
        }

        let run = minimize_box_in(|x| f(x[0], x[1]), &[-h, -h], &[h, h], m, lipschitz)?;
        evals += run.eval_count;
        let cell = 2.0 * h * 0.5f64.powi(m as i32);
        let on_boundary = run.x_best.iter().any(|c| c.abs() >= h - cell);
        let current = PlaneSearchResult {
            point: [run.x_best[0], run.x_best[1]],
            f_best: run.f_best,
            eval_count: evals,
            certified_gap: run.certified_gap,
            half_width: h,
            doublings: doubling,
            box_runs: doubling + 1,
            lipschitz,
        };
        if !on_boundary {
            return Ok(current);
        }
        let resolution = lipschitz * cell;
        if let Some(prev) = previous.take() {
            if prev.f_best - current.f_best <= resolution {
                // no progress from enlarging: flat direction, keep the better one
                let mut best = if current.f_best < prev.f_best { current } else { prev };
                best.eval_count = evals;
                best.box_runs = doubling + 1;
                return Ok(best);
            }
        }
        previous = Some(current);
    }
    Err(Error::NonCoercive(format!(
        "minimizer still on the boundary after {MAX_DOUBLINGS} doublings (half-width {:.3e})",
        initial_half_width * 2f64.powi(MAX_DOUBLINGS as i32)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute_value_example() {
        let r = minimize_unit_interval(|x| (x - 0.3).abs(), 5).unwrap();
        assert!(r.f_best <= 0.03125);
        assert!(r.eval_count <= 13);
        assert_eq!(r.certified_gap, 0.03125);
    }

    #[test]
    fn constant_function_has_zero_gap() {
        let r = UnivariateSearch::unit(6).minimize(|_| 7.0).unwrap();
        assert_eq!(r.f_best, 7.0);
        assert_eq!(r.certified_gap, 0.0);
        // ties retain the left half every time
        assert_eq!(r.brackets.last().unwrap().lo, 0.0);
    }

    #[test]
    fn quadratic_against_dense_grid() {
        let f = |x: f64| (x - 0.5) * (x - 0.5);
        let r = minimize_unit_interval(f, 8).unwrap();
        let grid_min = (0..=1_000_000)
            .map(|i| f(i as f64 / 1e6))
            .fold(f64::INFINITY, f64::min);
        assert!(r.f_best - grid_min <= 0.5f64.powi(8));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(minimize_unit_interval(|x| x, 0).is_err());
        assert!(minimize_unit_interval_corrupted(|x| x, 3, -0.1).is_err());
        assert!(UnivariateSearch::new(1.0, 1.0, 3).minimize(|x| x).is_err());
        assert!(minimize_unit_interval(|_| f64::NAN, 3).is_err());
        assert!(UnivariateSearch::new(0.0, 1.0, 3).minimize(|x| x).is_ok());
    }

    #[test]
    fn corrupted_example_bound() {
        let f = |x: f64| (x - 0.3).abs();
        let r = minimize_unit_interval_corrupted(
            |x| f(x) + 0.01 * crate::objective::corruption_noise(9, &[x]),
            3,
            0.01,
        )
        .unwrap();
        assert!(f(r.x_best) <= 0.125 + 13.0 * 0.01);
        assert!((r.certified_gap - 0.255).abs() < 1e-15);
    }

    #[test]
    fn zero_delta_matches_exact_routine() {
        let f = |x: f64| (x - 0.71).abs() + 0.2 * x * x;
        let a = minimize_unit_interval(f, 9).unwrap();
        let b = minimize_unit_interval_corrupted(f, 9, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn brackets_are_nested_and_halve() {
        let r = minimize_unit_interval(|x| (x - 0.123).abs(), 12).unwrap();
        for w in r.brackets.windows(2) {
            assert!(w[1].lo >= w[0].lo && w[1].hi <= w[0].hi);
            assert!((w[1].width() - 0.5 * w[0].width()).abs() < 1e-15);
        }
    }

    #[test]
    fn affine_rescaling_scales_the_certificate() {
        let r = UnivariateSearch::new(-2.0, 6.0, 10)
            .with_lipschitz(3.0)
            .minimize(|x| 3.0 * (x - 1.7).abs())
            .unwrap();
        assert!((r.certified_gap - 3.0 * 8.0 / 1024.0).abs() < 1e-15);
        assert!(3.0 * (r.x_best - 1.7).abs() <= r.certified_gap);
    }

    #[test]
    fn empirical_lipschitz_is_flagged() {
        let r = UnivariateSearch::unit(4).minimize(|x| 2.0 * x).unwrap();
        assert!(r.lipschitz_empirical);
        assert!((r.lipschitz - 2.0).abs() < 1e-12);
        let q = UnivariateSearch::unit(4).minimize(|x| x * x).unwrap();
        assert!(q.lipschitz >= 2.0);
        assert_eq!(r.x_best, 0.0);
    }

    #[test]
    fn box_base_case_matches_univariate() {
        let g = |x: f64| (x - 0.37).abs();
        let a = minimize_box(|x| g(x[0]), 1, 7).unwrap();
        let b = minimize_unit_interval(g, 7).unwrap();
        assert_eq!(a.x_best, vec![b.x_best]);
        assert_eq!(a.f_best, b.f_best);
        assert_eq!(a.eval_count, b.eval_count);
        assert_eq!(a.certified_gap, b.certified_gap);
    }

    #[test]
    fn box_two_dimensional_example() {
        let f = |x: &[f64]| ((x[0] - 0.3).abs() + (x[1] - 0.6).abs()) / 2.0;
        let r = minimize_box(f, 2, 10).unwrap();
        assert!(r.eval_count as f64 <= box_eval_budget(2, 10));
        assert!(r.f_best <= box_nominal_gap(2, 10));
        assert!((box_nominal_gap(2, 10) - 42.0 * 42.0 / 1024.0).abs() < 1e-12);
        assert!(r.f_best <= 1e-3);
    }

    #[test]
    fn box_three_dimensional_budget() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>() / 3.0;
        let r = minimize_box(f, 3, 6).unwrap();
        assert!(r.eval_count <= 3375);
        assert!(r.f_best <= box_nominal_gap(3, 6));
    }

    #[test]
    fn box_budget_guard() {
        assert!(matches!(minimize_box(|_| 0.0, 6, 30), Err(Error::Budget(_))));
        assert!(minimize_box(|_| 0.0, 0, 3).is_err());
    }

    #[test]
    fn relative_gap_never_exceeds_nominal() {
        for d in 1..5 {
            for m in 1..30 {
                assert!(box_relative_gap(d, m) <= box_nominal_gap(d, m) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn plane_shifted_quadratic_needs_doublings() {
        let f = |a: f64, b: f64| (a - 1.0).powi(2) + (b + 2.0).powi(2);
        let r = minimize_plane(f, 12, 1.0).unwrap();
        assert!(r.doublings >= 2);
        assert!(r.f_best <= r.certified_gap);
        assert!((r.point[0] - 1.0).abs() < 1e-2 && (r.point[1] + 2.0).abs() < 1e-2);
    }

    #[test]
    fn plane_flat_direction() {
        let r = minimize_plane(|_, b| b * b, 8, 1.0).unwrap();
        assert!(r.f_best <= r.certified_gap);
        assert!(r.f_best <= 1e-4);
    }

    #[test]
    fn plane_non_coercive() {
        assert!(matches!(minimize_plane(|a, b| a + b, 4, 1.0), Err(Error::NonCoercive(_))));
    }
}
