//! Convex objective oracles.
//!
//! An [`Oracle`] wraps an [`Objective`] and counts every value query. It can
//! be wrapped once more with bounded corruption: each answer is then
//! `E(x) + delta * r(x)` with `r(x)` in `[-1, 1]` a deterministic hash of the
//! seed and the quantized query point, so the same query always receives the
//! same answer and nothing has to be stored.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{dot, lp_norm, NormOrder};

/// Declared modulus-of-smoothness bound `rho(E, u) <= gamma * u^q`, measured
/// with unit directions in the `norm` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smoothness {
    pub q: f64,
    pub gamma: f64,
    pub norm: NormOrder,
}

pub trait Objective: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn smoothness(&self) -> Option<Smoothness> {
        None
    }

    fn name(&self) -> String;
}

/// `||x - center||_2^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    center: Vec<f64>,
}

impl Quadratic {
    pub fn new(center: Vec<f64>) -> Result<Self> {
        check_point("center", &center)?;
        Ok(Quadratic { center })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum()
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().zip(&self.center).map(|(a, c)| 2.0 * (a - c)).collect())
    }

    fn smoothness(&self) -> Option<Smoothness> {
        Some(Smoothness { q: 2.0, gamma: 1.0, norm: NormOrder::L2 })
    }

    fn name(&self) -> String {
        "quadratic".into()
    }
}

/// `sum_i |x_i - center_i|^q` with `q` in `(1, 2]`.
///
/// Its modulus of smoothness in the `l_q` norm is at most `u^q`, from the
/// scalar inequality `|a+u|^q + |a-u|^q - 2|a|^q <= 2|u|^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDistance {
    center: Vec<f64>,
    q: f64,
}

impl PowerDistance {
    pub fn new(center: Vec<f64>, q: f64) -> Result<Self> {
        check_point("center", &center)?;
        if !(q > 1.0 && q <= 2.0) {
            return Err(Error::input(format!("power q must lie in (1, 2], got {q}")));
        }
        Ok(PowerDistance { center, q })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

impl Objective for PowerDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c).abs().powf(self.q))
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(
            x.iter()
                .zip(&self.center)
                .map(|(a, c)| {
                    let t = a - c;
                    self.q * t.signum() * t.abs().powf(self.q - 1.0)
                })
                .collect(),
        )
    }

    fn smoothness(&self) -> Option<Smoothness> {
        Some(Smoothness {
            q: self.q,
            gamma: 1.0,
            norm: NormOrder::Finite(self.q),
        })
    }

    fn name(&self) -> String {
        "power".into()
    }
}

/// Ridge-regularized logistic loss
/// `(1/n) sum_i log(1 + exp(-y_i <a_i, x>)) + (ridge/2) ||x||_2^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Logistic {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
    ridge: f64,
}

impl Logistic {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>, ridge: f64) -> Result<Self> {
        let dim = features
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::input("logistic loss needs at least one sample"))?;
        if dim == 0 || features.iter().any(|a| a.len() != dim) {
            return Err(Error::input("all feature rows must share a positive dimension"));
        }
        if labels.len() != features.len() {
            return Err(Error::input("one label per feature row is required"));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::input("labels must be +1 or -1"));
        }
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(Error::input("ridge must be finite and nonnegative"));
        }
        for row in &features {
            check_point("features", row)?;
        }
        Ok(Logistic { features, labels, ridge })
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Objective for Logistic {
    fn dim(&self) -> usize {
        self.features[0].len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.features.len() as f64;
        let loss: f64 = self
            .features
            .iter()
            .zip(&self.labels)
            .map(|(a, y)| softplus(-y * dot(a, x)))
            .sum();
        loss / n + 0.5 * self.ridge * dot(x, x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = self.features.len() as f64;
        let mut g: Vec<f64> = x.iter().map(|xi| self.ridge * xi).collect();
        for (a, y) in self.features.iter().zip(&self.labels) {
            let w = -y * sigmoid(-y * dot(a, x)) / n;
            for (gi, ai) in g.iter_mut().zip(a) {
                *gi += w * ai;
            }
        }
        Some(g)
    }

    fn smoothness(&self) -> Option<Smoothness> {
        // Hessian <= (1/4n) sum ||a_i||^2 + ridge in operator norm
        let n = self.features.len() as f64;
        let curvature =
            self.features.iter().map(|a| dot(a, a)).sum::<f64>() / (4.0 * n) + self.ridge;
        Some(Smoothness {
            q: 2.0,
            gamma: 0.5 * curvature,
            norm: NormOrder::L2,
        })
    }

    fn name(&self) -> String {
        "logistic".into()
    }
}

/// `<a, x>`; convex with zero modulus of smoothness.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    a: Vec<f64>,
}

impl Linear {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        check_point("coefficients", &a)?;
        Ok(Linear { a })
    }
}

impl Objective for Linear {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.a, x)
    }

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(self.a.clone())
    }

    fn smoothness(&self) -> Option<Smoothness> {
        Some(Smoothness { q: 2.0, gamma: 0.0, norm: NormOrder::L2 })
    }

    fn name(&self) -> String {
        "linear".into()
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Objective built from closures.
pub struct FnObjective {
    name: String,
    dim: usize,
    value: Box<ValueFn>,
    gradient: Option<Box<GradFn>>,
    smoothness: Option<Smoothness>,
}

impl FnObjective {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnObjective {
            name: name.into(),
            dim,
            value: Box::new(value),
            gradient: None,
            smoothness: None,
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }

    pub fn with_smoothness(mut self, s: Smoothness) -> Self {
        self.smoothness = Some(s);
        self
    }
}

impl fmt::Debug for FnObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnObjective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl Objective for FnObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }

    fn smoothness(&self) -> Option<Smoothness> {
        self.smoothness
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

fn check_point(what: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::input(format!("{what} must be nonempty")));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::input(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// Bounded corruption parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    pub delta: f64,
    pub seed: u64,
}

/// Quantization step applied to query coordinates before hashing.
pub const NOISE_QUANTUM: f64 = 1e-12;

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic noise in `[-1, 1]` for the query point `x` under `seed`.
pub fn corruption_noise(seed: u64, x: &[f64]) -> f64 {
    let mut h = splitmix64(seed ^ 0x5851_F42D_4C95_7F2D);
    for &c in x {
        let q = (c / NOISE_QUANTUM).round();
        let bits = if q.abs() < 9.0e18 { q as i64 as u64 } else { c.to_bits() };
        h = splitmix64(h ^ bits);
    }
    let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
    2.0 * unit - 1.0
}

/// Counting oracle for a convex objective, optionally corrupted.
pub struct Oracle {
    objective: Arc<dyn Objective>,
    corruption: Option<Corruption>,
    evals: AtomicU64,
    gradients: AtomicU64,
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("objective", &self.objective)
            .field("corruption", &self.corruption)
            .field("evals", &self.eval_count())
            .finish()
    }
}

impl Oracle {
    pub fn new(objective: impl Objective + 'static) -> Self {
        Self::from_arc(Arc::new(objective))
    }

    pub fn from_arc(objective: Arc<dyn Objective>) -> Self {
        Oracle {
            objective,
            corruption: None,
            evals: AtomicU64::new(0),
            gradients: AtomicU64::new(0),
        }
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Oracle answering within `delta` of the exact value; has no gradient
    /// and a fresh evaluation counter.
    pub fn corrupt(&self, delta: f64, seed: u64) -> Result<Oracle> {
        if self.corruption.is_some() {
            return Err(Error::input("oracle is already corrupted"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::input(format!("corruption budget must be positive, got {delta}")));
        }
        Ok(Oracle {
            objective: Arc::clone(&self.objective),
            corruption: Some(Corruption { delta, seed }),
            evals: AtomicU64::new(0),
            gradients: AtomicU64::new(0),
        })
    }

    /// An uncorrupted oracle over the same objective, with its own counter.
    pub fn exact(&self) -> Oracle {
        Oracle::from_arc(Arc::clone(&self.objective))
    }

    pub fn corruption(&self) -> Option<Corruption> {
        self.corruption
    }

    /// Corruption budget, zero for an exact oracle.
    pub fn delta(&self) -> f64 {
        self.corruption.map_or(0.0, |c| c.delta)
    }

    pub fn smoothness(&self) -> Option<Smoothness> {
        self.objective.smoothness()
    }

    pub fn has_gradient(&self) -> bool {
        self.corruption.is_none() && self.objective.gradient(&vec![0.0; self.dim()]).is_some()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::input(format!(
                "query has dimension {}, oracle expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// One counted query.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.evals.fetch_add(1, Ordering::Relaxed);
        let exact = self.objective.value(x);
        Ok(match self.corruption {
            None => exact,
            Some(c) => exact + c.delta * corruption_noise(c.seed, x),
        })
    }

    /// Uncorrupted value, not counted. Used for reporting and verification,
    /// never by the algorithms.
    pub fn exact_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.objective.value(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if self.corruption.is_some() {
            return Err(Error::Unsupported("a corrupted oracle exposes no gradient".into()));
        }
        let g = self
            .objective
            .gradient(x)
            .ok_or_else(|| Error::Unsupported(format!("objective `{}` has no gradient", self.objective.name())))?;
        self.gradients.fetch_add(1, Ordering::Relaxed);
        Ok(g)
    }

    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn gradient_count(&self) -> u64 {
        self.gradients.load(Ordering::Relaxed)
    }

    pub fn reset_counts(&self) {
        self.evals.store(0, Ordering::Relaxed);
        self.gradients.store(0, Ordering::Relaxed);
    }
}

/// Sublevel set `D_C = {x : E(x) <= E(0) + C}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSet {
    pub c: f64,
    pub base_value: f64,
}

impl LevelSet {
    pub fn new(oracle: &Oracle, c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(Error::input("level-set offset must be nonnegative"));
        }
        let base_value = oracle.exact_value(&vec![0.0; oracle.dim()])?;
        Ok(LevelSet { c, base_value })
    }

    /// One oracle evaluation.
    pub fn contains(&self, oracle: &Oracle, x: &[f64]) -> Result<bool> {
        Ok(oracle.evaluate(x)? <= self.base_value + self.c)
    }
}

/// Finite-sample lower bounds on the modulus of smoothness over a `u` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessEstimate {
    pub u_grid: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub sample_set: Vec<Vec<f64>>,
}

/// `max over x in sample, y in directions of (1/2)|E(x+uy) + E(x-uy) - 2E(x)|`,
/// a lower bound on `rho(E, S, u)`.
pub fn estimate_modulus(
    oracle: &Oracle,
    sample: &[Vec<f64>],
    directions: &[Vec<f64>],
    u: f64,
    p: NormOrder,
) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::input("modulus estimation needs a nonempty sample"));
    }
    if directions.is_empty() {
        return Err(Error::input("modulus estimation needs at least one direction"));
    }
    if oracle.delta() > 0.0 {
        return Err(Error::Unsupported("modulus estimation needs an exact oracle".into()));
    }
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::input("scale u must be positive"));
    }
    for (i, y) in directions.iter().enumerate() {
        let n = lp_norm(y, p);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("direction {i} has norm {n}, expected 1")));
        }
    }
    let mut best = 0.0f64;
    let mut plus = vec![0.0; oracle.dim()];
    let mut minus = vec![0.0; oracle.dim()];
    for x in sample {
        let center = oracle.evaluate(x)?;
        for y in directions {
            if y.len() != x.len() {
                return Err(Error::input("direction and sample dimensions differ"));
            }
            for i in 0..x.len() {
                plus[i] = x[i] + u * y[i];
                minus[i] = x[i] - u * y[i];
            }
            let second = oracle.evaluate(&plus)? + oracle.evaluate(&minus)? - 2.0 * center;
            best = best.max(0.5 * second.abs());
        }
    }
    Ok(best)
}

pub fn estimate_modulus_profile(
    oracle: &Oracle,
    sample: &[Vec<f64>],
    directions: &[Vec<f64>],
    u_grid: &[f64],
    p: NormOrder,
) -> Result<SmoothnessEstimate> {
    let rho_values = u_grid
        .iter()
        .map(|&u| estimate_modulus(oracle, sample, directions, u, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(SmoothnessEstimate {
        u_grid: u_grid.to_vec(),
        rho_values,
        sample_set: sample.to_vec(),
    })
}

/// Coordinate directions `+-e_j` followed by `count` seeded pseudo-random
/// directions, all normalized in the `p` norm.
pub fn probe_directions(dim: usize, p: NormOrder, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim + count);
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        out.push(e.clone());
        e[j] = -1.0;
        out.push(e);
    }
    let mut state = seed;
    while out.len() < 2 * dim + count {
        let y: Vec<f64> = (0..dim)
            .map(|_| {
                state = splitmix64(state);
                2.0 * ((state >> 11) as f64 / (1u64 << 53) as f64) - 1.0
            })
            .collect();
        let n = lp_norm(&y, p);
        if n > 1e-6 {
            out.push(y.iter().map(|v| v / n).collect());
        }
    }
    out
}

/// `E(x + u y) - E(x) - u <E'(x), y>`, the first-order Taylor remainder.
pub fn taylor_remainder(oracle: &Oracle, x: &[f64], y: &[f64], u: f64) -> Result<f64> {
    let g = oracle.gradient(x)?;
    let shifted: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + u * b).collect();
    Ok(oracle.evaluate(&shifted)? - oracle.evaluate(x)? - u * dot(&g, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> Oracle {
        Oracle::new(Quadratic::new(vec![0.3, 0.2]).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let o = quad();
        assert_eq!(o.evaluate(&[0.3, 0.2]).unwrap(), 0.0);
        assert!((o.evaluate(&[0.0, 0.0]).unwrap() - 0.13).abs() < 1e-15);
        assert_eq!(o.eval_count(), 2);
        assert!(matches!(o.evaluate(&[0.0]), Err(Error::Input(_))));
        assert_eq!(o.eval_count(), 2);
    }

    #[test]
    fn corrupted_queries_are_deterministic_and_bounded() {
        let o = quad().corrupt(0.01, 7).unwrap();
        let a = o.evaluate(&[0.0, 0.0]).unwrap();
        let b = o.evaluate(&[0.0, 0.0]).unwrap();
        assert_eq!(a, b);
        assert!((0.12..=0.14).contains(&a));
        assert_eq!(o.eval_count(), 2);
    }

    #[test]
    fn corrupt_rejects_bad_arguments() {
        let o = quad();
        assert!(o.corrupt(0.0, 1).is_err());
        assert!(o.corrupt(-1.0, 1).is_err());
        let c = o.corrupt(0.1, 1).unwrap();
        assert!(c.corrupt(0.1, 2).is_err());
        assert!(matches!(c.gradient(&[0.0, 0.0]), Err(Error::Unsupported(_))));
        assert!(!c.has_gradient());
    }

    #[test]
    fn gradient_examples() {
        let o = quad();
        let g = o.gradient(&[1.0, 0.0]).unwrap();
        assert!((g[0] - 1.4).abs() < 1e-15 && (g[1] + 0.4).abs() < 1e-15);
        assert_eq!(o.gradient(&[0.3, 0.2]).unwrap(), vec![0.0, 0.0]);
        let no_grad = Oracle::new(FnObjective::new("abs", 1, |x| x[0].abs()));
        assert!(matches!(no_grad.gradient(&[0.0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn modulus_of_quadratic_and_linear() {
        let o = quad();
        let sample = vec![vec![0.0, 0.0], vec![1.0, -2.0]];
        let dirs = probe_directions(2, NormOrder::L2, 8, 3);
        for u in [0.5, 0.1, 0.01] {
            let rho = estimate_modulus(&o, &sample, &dirs, u, NormOrder::L2).unwrap();
            assert!((rho - u * u).abs() <= 1e-12, "u={u} rho={rho}");
        }
        let lin = Oracle::new(Linear::new(vec![1.0, -3.0]).unwrap());
        let rho = estimate_modulus(&lin, &sample, &dirs, 0.7, NormOrder::L2).unwrap();
        assert!(rho <= 1e-15);
    }

    #[test]
    fn modulus_errors() {
        let o = quad();
        let dirs = probe_directions(2, NormOrder::L2, 0, 0);
        assert!(estimate_modulus(&o, &[], &dirs, 0.1, NormOrder::L2).is_err());
        assert!(estimate_modulus(&o, &[vec![0.0, 0.0]], &[vec![2.0, 0.0]], 0.1, NormOrder::L2).is_err());
        let c = o.corrupt(0.1, 0).unwrap();
        assert!(estimate_modulus(&c, &[vec![0.0, 0.0]], &dirs, 0.1, NormOrder::L2).is_err());
    }

    #[test]
    fn modulus_is_monotone_in_the_sample() {
        let o = Oracle::new(Logistic::new(vec![vec![1.0, 2.0], vec![-1.0, 0.5]], vec![1.0, -1.0], 0.1).unwrap());
        let dirs = probe_directions(2, NormOrder::L2, 6, 11);
        let small = vec![vec![0.0, 0.0]];
        let large = vec![vec![0.0, 0.0], vec![0.5, -0.5], vec![2.0, 1.0]];
        let a = estimate_modulus(&o, &small, &dirs, 0.3, NormOrder::L2).unwrap();
        let b = estimate_modulus(&o, &large, &dirs, 0.3, NormOrder::L2).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn level_set_membership_costs_one_evaluation() {
        let o = quad();
        let level = LevelSet::new(&o, 0.0).unwrap();
        assert!((level.base_value - 0.13).abs() < 1e-15);
        assert!(level.contains(&o, &[0.3, 0.2]).unwrap());
        assert!(!level.contains(&o, &[2.0, 2.0]).unwrap());
        assert_eq!(o.eval_count(), 2);
    }

    #[test]
    fn noise_lies_in_unit_interval() {
        for i in 0..1000 {
            let x = [i as f64 * 0.37, -(i as f64) * 1e-3];
            let r = corruption_noise(42, &x);
            assert!((-1.0..=1.0).contains(&r));
        }
        assert_ne!(corruption_noise(1, &[0.5]), corruption_noise(2, &[0.5]));
    }

    #[test]
    fn power_distance_validation() {
        assert!(PowerDistance::new(vec![0.0], 1.0).is_err());
        assert!(PowerDistance::new(vec![0.0], 2.5).is_err());
        assert!(PowerDistance::new(vec![0.0], 1.5).is_ok());
    }
}
