use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Terms summed exactly before the integral tail bound takes over.
pub const PARTIAL_TERMS: u64 = 1_000_000;

/// Upper bound on `sum_{k >= 1} k^-a` for `a > 1`: the first
/// [`PARTIAL_TERMS`] terms plus `N^(1-a) / (a - 1)`.
pub fn zeta_bound(a: f64) -> Result<f64> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::input(format!("series exponent must exceed 1, got {a}")));
    }
    // smallest terms first
    let partial: f64 = (1..=PARTIAL_TERMS).rev().map(|k| (k as f64).powf(-a)).sum();
    let n = PARTIAL_TERMS as f64;
    Ok(partial + n.powf(1.0 - a) / (a - 1.0))
}

/// Step sizes `c_k = c k^-s`, `k = 1..=len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSchedule {
    pub c: f64,
    pub s: f64,
    pub q: f64,
    pub gamma: f64,
    pub len: usize,
    /// Upper bound on `sum k^(-s q)` used to pick `c`.
    pub series_bound: f64,
}

impl CoefficientSchedule {
    /// Checks `c_k` in `(0, 1]`, `s` in `(0, 1)` and
    /// `gamma c^q sum k^(-s q) <= 1`.
    pub fn new(c: f64, s: f64, q: f64, gamma: f64, len: usize) -> Result<Self> {
        if !(q > 1.0 && q <= 2.0) {
            return Err(Error::input(format!("smoothness order q must lie in (1, 2], got {q}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::input(format!("gamma must be positive, got {gamma}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::input(format!("decay exponent s must lie in (0, 1), got {s}")));
        }
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::input(format!("leading coefficient must lie in (0, 1], got {c}")));
        }
        let series_bound = zeta_bound(s * q)?;
        let load = gamma * c.powf(q) * series_bound;
        if load > 1.0 {
            return Err(Error::input(format!(
                "gamma c^q sum k^(-sq) = {load} exceeds 1"
            )));
        }
        Ok(CoefficientSchedule { c, s, q, gamma, len, series_bound })
    }

    /// `c_k` for `k >= 1`; `None` past the end.
    pub fn value(&self, k: usize) -> Option<f64> {
        (k >= 1 && k <= self.len).then(|| self.c * (k as f64).powf(-self.s))
    }

    /// `gamma c^q` times the series bound; at most 1.
    pub fn load(&self) -> f64 {
        self.gamma * self.c.powf(self.q) * self.series_bound
    }

    /// `sum_{k <= m} c_k`.
    pub fn partial_sum(&self, m: usize) -> f64 {
        (1..=m.min(self.len)).filter_map(|k| self.value(k)).sum()
    }

    /// Rate exponents `r` covered by this schedule lie in `(0, 1 - s)`.
    pub fn max_rate(&self) -> f64 {
        1.0 - self.s
    }
}

/// `s = 2 / (1 + q)` and the largest `c <= 1` with
/// `gamma c^q sum k^(-s q) <= 1`.
pub fn make_coefficients_cs(q: f64, gamma: f64, len: usize) -> Result<CoefficientSchedule> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(Error::input(format!("smoothness order q must lie in (1, 2], got {q}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::input(format!("gamma must be positive, got {gamma}")));
    }
    let s = 2.0 / (1.0 + q);
    let z = zeta_bound(s * q)?;
    let mut c = (gamma * z).powf(-1.0 / q).min(1.0);
    // absorb rounding in the power so the constructor's check passes
    while gamma * c.powf(q) * z > 1.0 {
        c = f64::from_bits(c.to_bits() - 1);
    }
    CoefficientSchedule::new(c, s, q, gamma, len)
}

/// Constant weakness parameter `t` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeaknessSchedule {
    t: f64,
}

impl WeaknessSchedule {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::input(format!("weakness parameter must lie in (0, 1], got {t}")));
        }
        Ok(WeaknessSchedule { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

impl Default for WeaknessSchedule {
    fn default() -> Self {
        WeaknessSchedule { t: 1.0 }
    }
}
