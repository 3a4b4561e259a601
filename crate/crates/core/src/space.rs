//! Dense vectors and `l_p` norms on `R^d`.

use std::fmt;
use std::ops::Index;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Order `p` of an `l_p` norm, `1 <= p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

impl NormOrder {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(NormOrder::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(NormOrder::Finite(p))
        } else {
            Err(Error::input(format!("norm order must lie in [1, inf], got {p}")))
        }
    }

    pub const L1: NormOrder = NormOrder::Finite(1.0);
    pub const L2: NormOrder = NormOrder::Finite(2.0);

    pub fn value(self) -> f64 {
        match self {
            NormOrder::Finite(p) => p,
            NormOrder::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::Finite(p) => write!(f, "{p}"),
            NormOrder::Infinity => f.write_str("inf"),
        }
    }
}

// JSON form: a number >= 1 or the string "inf".
impl Serialize for NormOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormOrder::Finite(p) => s.serialize_f64(*p),
            NormOrder::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for NormOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct OrderVisitor;

        impl Visitor<'_> for OrderVisitor {
            type Value = NormOrder;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 1 or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<NormOrder, E> {
                NormOrder::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<NormOrder, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<NormOrder, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<NormOrder, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(NormOrder::Infinity),
                    other => other
                        .parse::<f64>()
                        .map_err(|_| E::custom(format!("invalid norm order `{other}`")))
                        .and_then(|p| NormOrder::new(p).map_err(E::custom)),
                }
            }
        }

        d.deserialize_any(OrderVisitor)
    }
}

/// A point of `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("vector must have at least one coordinate"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!("coordinate {i} is not finite ({})", coords[i])));
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim.max(1)])
    }

    /// `i`-th canonical basis vector scaled by `sign`.
    pub fn basis(dim: usize, i: usize, sign: f64) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = sign;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self, p: NormOrder) -> f64 {
        lp_norm(&self.0, p)
    }

    pub fn scaled(&self, a: f64) -> Vector {
        Vector(self.0.iter().map(|x| a * x).collect())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Vector::new(coords).map_err(de::Error::custom)
    }
}

/// `l_p` norm of `v`; errors on non-finite coordinates.
pub fn norm(v: &[f64], p: NormOrder) -> Result<f64> {
    if let Some(i) = v.iter().position(|c| !c.is_finite()) {
        return Err(Error::input(format!("coordinate {i} is not finite ({})", v[i])));
    }
    Ok(lp_norm(v, p))
}

pub(crate) fn lp_norm(v: &[f64], p: NormOrder) -> f64 {
    match p {
        NormOrder::Infinity => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        NormOrder::Finite(p) if p == 1.0 => v.iter().map(|x| x.abs()).sum(),
        NormOrder::Finite(p) if p == 2.0 => {
            // scaled to avoid overflow for large coordinates
            let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
        }
        NormOrder::Finite(p) => {
            let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale * v.iter().map(|x| (x.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Numerical rank by Gaussian elimination with partial pivoting.
pub(crate) fn rank(rows: &[&[f64]], dim: usize, tol: f64) -> usize {
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut rank = 0;
    for col in 0..dim {
        if rank == m.len() {
            break;
        }
        let (pivot, best) = (rank..m.len())
            .map(|r| (r, m[r][col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        m.swap(rank, pivot);
        for r in (rank + 1)..m.len() {
            let factor = m[r][col] / m[rank][col];
            if factor != 0.0 {
                for c in col..dim {
                    m[r][c] -= factor * m[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&[3.0, 4.0], NormOrder::L2).unwrap(), 5.0);
        assert_eq!(norm(&[1.0, -1.0], NormOrder::L1).unwrap(), 2.0);
        assert_eq!(norm(&[-2.0, 1.0], NormOrder::Infinity).unwrap(), 2.0);
    }

    #[test]
    fn norm_rejects_non_finite() {
        assert!(matches!(norm(&[1.0, f64::NAN], NormOrder::L2), Err(Error::Input(_))));
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn norm_order_validation_and_json() {
        assert!(NormOrder::new(0.5).is_err());
        assert!(NormOrder::new(f64::NAN).is_err());
        let p: NormOrder = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(p, NormOrder::Infinity);
        let p: NormOrder = serde_json::from_str("1.5").unwrap();
        assert_eq!(p, NormOrder::Finite(1.5));
        assert!(serde_json::from_str::<NormOrder>("0.2").is_err());
        assert_eq!(serde_json::to_string(&NormOrder::Infinity).unwrap(), "\"inf\"");
    }

    #[test]
    fn rank_detects_dependence() {
        let a = [1.0, 1.0];
        let b = [-1.0, -1.0];
        let c = [0.0, 1.0];
        assert_eq!(rank(&[&a, &b], 2, 1e-10), 1);
        assert_eq!(rank(&[&a, &b, &c], 2, 1e-10), 2);
    }

    fn order() -> impl Strategy<Value = NormOrder> {
        prop_oneof![
            (1.0f64..6.0).prop_map(NormOrder::Finite),
            Just(NormOrder::Infinity),
            Just(NormOrder::L1),
            Just(NormOrder::L2),
        ]
    }

    proptest! {
        #[test]
        fn triangle_and_homogeneity(
            p in order(),
            pair in (1usize..8).prop_flat_map(|d| (
                prop::collection::vec(-10.0f64..10.0, d),
                prop::collection::vec(-10.0f64..10.0, d),
            )),
            a in -5.0f64..5.0,
        ) {
            let (x, y) = pair;
            let sum: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
            let nx = norm(&x, p).unwrap();
            let ny = norm(&y, p).unwrap();
            prop_assert!(norm(&sum, p).unwrap() <= nx + ny + 1e-10 * (1.0 + nx + ny));
            let ax: Vec<f64> = x.iter().map(|u| a * u).collect();
            prop_assert!((norm(&ax, p).unwrap() - a.abs() * nx).abs() <= 1e-10 * (1.0 + nx));
        }
    }
}
