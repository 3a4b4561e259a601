//! Finite symmetric dictionaries and sparse combinations of their atoms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{lp_norm, rank, NormOrder, Vector};

/// Coordinate-wise tolerance below which two atoms are considered equal.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// Tolerance for the unit-norm check on atoms.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Coefficients with magnitude below this are dropped from a [`Combination`].
pub const PRUNE_TOL: f64 = 1e-15;

/// A finite set of unit-norm atoms closed under negation.
///
/// Atoms are stored in insertion order; every algorithm breaks ties towards
/// the lowest atom index, so this order is part of the observable behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    atoms: Vec<Vector>,
    labels: Vec<String>,
    norm_order: NormOrder,
    dim: usize,
    spanning: bool,
}

impl Dictionary {
    /// The `2d` atoms `+e_1, -e_1, ..., +e_d, -e_d`.
    pub fn canonical(dim: usize, p: NormOrder) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dictionary dimension must be at least 1"));
        }
        let mut atoms = Vec::with_capacity(2 * dim);
        let mut labels = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            atoms.push(Vector::basis(dim, j, 1.0));
            labels.push(format!("+e{}", j + 1));
            atoms.push(Vector::basis(dim, j, -1.0));
            labels.push(format!("-e{}", j + 1));
        }
        Ok(Dictionary {
            atoms,
            labels,
            norm_order: p,
            dim,
            spanning: true,
        })
    }

    /// Normalizes `raw` to unit `l_p` norm, drops duplicates and appends
    /// missing negations directly after their atom.
    ///
    /// A non-spanning atom set is accepted; [`Dictionary::is_spanning`]
    /// reports it.
    pub fn symmetric(raw: &[Vector], p: NormOrder) -> Result<Self> {
        let labels: Vec<String> = (0..raw.len()).map(|i| format!("a{i}")).collect();
        Self::symmetric_labeled(raw, &labels, p)
    }

    pub fn symmetric_labeled(raw: &[Vector], labels: &[String], p: NormOrder) -> Result<Self> {
        let first = raw
            .first()
            .ok_or_else(|| Error::input("dictionary needs at least one atom"))?;
        if labels.len() != raw.len() {
            return Err(Error::input("one label per raw atom is required"));
        }
        let dim = first.dim();
        let mut atoms: Vec<Vector> = Vec::with_capacity(2 * raw.len());
        let mut out_labels = Vec::with_capacity(2 * raw.len());

        for (i, atom) in raw.iter().enumerate() {
            if atom.dim() != dim {
                return Err(Error::input(format!(
                    "atom {i} has dimension {}, expected {dim}",
                    atom.dim()
                )));
            }
            let n = atom.norm(p);
            if n == 0.0 {
                return Err(Error::input(format!("atom {i} is the zero vector")));
            }
            let unit = atom.scaled(1.0 / n);
            if contains(&atoms, &unit) {
                continue;
            }
            let neg = unit.scaled(-1.0);
            atoms.push(unit);
            out_labels.push(labels[i].clone());
            if !contains(&atoms, &neg) {
                atoms.push(neg);
                out_labels.push(negated_label(&labels[i]));
            }
        }

        let rows: Vec<&[f64]> = atoms.iter().map(|a| a.as_slice()).collect();
        let spanning = rank(&rows, dim, 1e-10) == dim;
        Ok(Dictionary {
            atoms,
            labels: out_labels,
            norm_order: p,
            dim,
            spanning,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_order(&self) -> NormOrder {
        self.norm_order
    }

    pub fn atoms(&self) -> &[Vector] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> Option<&Vector> {
        self.atoms.get(i)
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.get(i).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// False when the atoms do not span `R^d` (a warning, not an error).
    pub fn is_spanning(&self) -> bool {
        self.spanning
    }

    pub fn has_unit_atoms(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| (a.norm(self.norm_order) - 1.0).abs() <= UNIT_NORM_TOL)
    }

    pub fn is_closed_under_negation(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| contains(&self.atoms, &a.scaled(-1.0)))
    }

    /// Index of the atom equal to `-atoms[i]`.
    pub fn negation_of(&self, i: usize) -> Option<usize> {
        let neg = self.atoms.get(i)?.scaled(-1.0);
        self.atoms.iter().position(|a| approx_eq(a, &neg))
    }

    /// Dense `sum_g c_g g` together with its `l1` mass and support size.
    pub fn combine(&self, c: &Combination) -> Result<Materialized> {
        let mut v = vec![0.0; self.dim];
        for (&i, &coef) in &c.coeffs {
            let atom = self.atoms.get(i).ok_or_else(|| {
                Error::input(format!("atom index {i} out of range ({} atoms)", self.len()))
            })?;
            for (vi, gi) in v.iter_mut().zip(atom.as_slice()) {
                *vi += coef * gi;
            }
        }
        Ok(Materialized {
            vector: v,
            l1_mass: c.l1_mass(),
            support: c.support(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DictionaryJson = serde_json::from_str(text)?;
        raw.into_dictionary()
    }

    pub fn to_json(&self) -> String {
        let doc = DictionaryJson {
            p: self.norm_order,
            atoms: self.atoms.iter().map(|a| a.as_slice().to_vec()).collect(),
            labels: Some(self.labels.clone()),
        };
        serde_json::to_string(&doc).expect("dictionary serializes")
    }
}

/// On-disk form: `{"p": number|"inf", "atoms": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DictionaryJson {
    pub p: NormOrder,
    pub atoms: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl DictionaryJson {
    pub fn into_dictionary(self) -> Result<Dictionary> {
        let atoms = self
            .atoms
            .into_iter()
            .map(Vector::new)
            .collect::<Result<Vec<_>>>()?;
        match self.labels {
            Some(labels) => Dictionary::symmetric_labeled(&atoms, &labels, self.p),
            None => Dictionary::symmetric(&atoms, self.p),
        }
    }
}

fn negated_label(label: &str) -> String {
    match label.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None => format!("-{}", label.trim_start_matches('+')),
    }
}

fn approx_eq(a: &Vector, b: &Vector) -> bool {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .all(|(x, y)| (x - y).abs() <= DUPLICATE_TOL)
}

fn contains(atoms: &[Vector], v: &Vector) -> bool {
    atoms.iter().any(|a| approx_eq(a, v))
}

/// Dense form of a [`Combination`].
#[derive(Debug, Clone, PartialEq)]
pub struct Materialized {
    pub vector: Vec<f64>,
    pub l1_mass: f64,
    pub support: usize,
}

/// Sparse map from atom index to coefficient.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Combination {
    coeffs: BTreeMap<usize, f64>,
}

impl Combination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut c = Combination::new();
        for (i, v) in pairs {
            c.add(i, v);
        }
        c
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coeffs.get(&i).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&i, &v)| (i, v))
    }

    /// Adds `v` to the coefficient of atom `i`.
    pub fn add(&mut self, i: usize, v: f64) {
        let entry = self.coeffs.entry(i).or_insert(0.0);
        *entry += v;
        if entry.abs() < PRUNE_TOL {
            self.coeffs.remove(&i);
        }
    }

    pub fn scale(&mut self, a: f64) {
        for v in self.coeffs.values_mut() {
            *v *= a;
        }
        self.coeffs.retain(|_, v| v.abs() >= PRUNE_TOL);
    }

    /// `a * self + b * other`.
    pub fn linear(&self, a: f64, other: &Combination, b: f64) -> Combination {
        let mut out = self.clone();
        out.scale(a);
        for (i, v) in other.iter() {
            out.add(i, b * v);
        }
        out
    }

    pub fn l1_mass(&self) -> f64 {
        self.coeffs.values().map(|v| v.abs()).sum()
    }

    pub fn support(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Membership in `Sigma_n(D)`.
    pub fn in_sigma(&self, n: usize) -> bool {
        self.support() <= n
    }

    /// Membership in `L_M = M * A_1(D)`, with absolute slack `tol`.
    pub fn in_l_m(&self, m: f64, tol: f64) -> bool {
        self.l1_mass() <= m + tol
    }

    /// Membership in `A_1(D)`, with absolute slack `tol`.
    pub fn in_a1(&self, tol: f64) -> bool {
        self.in_l_m(1.0, tol)
    }
}

/// `l_p` norm of a dense vector in the dictionary's norm.
pub fn dictionary_norm(d: &Dictionary, v: &[f64]) -> f64 {
    lp_norm(v, d.norm_order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let d = Dictionary::canonical(2, NormOrder::L2).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.atom(0).unwrap().as_slice(), &[1.0, 0.0]);
        assert_eq!(d.atom(1).unwrap().as_slice(), &[-1.0, 0.0]);
        assert_eq!(d.atom(2).unwrap().as_slice(), &[0.0, 1.0]);
        assert_eq!(d.atom(3).unwrap().as_slice(), &[0.0, -1.0]);
        assert!(d.has_unit_atoms() && d.is_closed_under_negation() && d.is_spanning());

        let d = Dictionary::canonical(1, NormOrder::L1).unwrap();
        assert_eq!(d.atoms().len(), 2);
        assert_eq!(d.atom(1).unwrap().as_slice(), &[-1.0]);

        let d = Dictionary::canonical(3, NormOrder::Infinity).unwrap();
        assert_eq!(d.len(), 6);
        let rows: Vec<&[f64]> = d.atoms().iter().map(|a| a.as_slice()).collect();
        assert_eq!(rank(&rows, 3, 1e-10), 3);

        assert!(Dictionary::canonical(0, NormOrder::L2).is_err());
    }

    #[test]
    fn symmetric_examples() {
        let d = Dictionary::symmetric(&[v(&[2.0, 0.0])], NormOrder::L2).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.atom(0).unwrap().as_slice(), &[1.0, 0.0]);
        assert_eq!(d.atom(1).unwrap().as_slice(), &[-1.0, 0.0]);
        assert!(!d.is_spanning());

        let d = Dictionary::symmetric(&[v(&[1.0, 1.0])], NormOrder::L1).unwrap();
        assert_eq!(d.atom(0).unwrap().as_slice(), &[0.5, 0.5]);
        assert_eq!(d.atom(1).unwrap().as_slice(), &[-0.5, -0.5]);
        assert!(!d.is_spanning());

        let d = Dictionary::symmetric(
            &[v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0])],
            NormOrder::L2,
        )
        .unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.atom(3).unwrap().as_slice(), &[0.0, -1.0]);
        assert_eq!(d.labels(), &["a0", "-a0", "a2", "-a2"]);
        assert!(d.is_spanning());
    }

    #[test]
    fn symmetric_rejects_bad_atoms() {
        assert!(Dictionary::symmetric(&[v(&[0.0, 0.0])], NormOrder::L2).is_err());
        assert!(Dictionary::symmetric(&[v(&[1.0]), v(&[1.0, 0.0])], NormOrder::L2).is_err());
        assert!(Dictionary::symmetric(&[], NormOrder::L2).is_err());
    }

    #[test]
    fn combine_examples() {
        let d = Dictionary::canonical(2, NormOrder::L2).unwrap();
        let m = d.combine(&Combination::new()).unwrap();
        assert_eq!(m.vector, vec![0.0, 0.0]);
        assert_eq!((m.l1_mass, m.support), (0.0, 0));

        let m = d.combine(&Combination::from_pairs([(0, 0.3)])).unwrap();
        assert_eq!(m.vector, vec![0.3, 0.0]);
        assert_eq!((m.l1_mass, m.support), (0.3, 1));

        let c = Combination::from_pairs([(0, 0.5), (2, 0.5)]);
        let m = d.combine(&c).unwrap();
        assert_eq!(m.vector, vec![0.5, 0.5]);
        assert_eq!(m.l1_mass, 1.0);
        assert!(c.in_a1(0.0) && c.in_sigma(2) && !c.in_sigma(1));

        assert!(d.combine(&Combination::from_pairs([(4, 1.0)])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = Dictionary::canonical(2, NormOrder::Infinity).unwrap();
        let text = d.to_json();
        assert!(text.contains("\"p\":\"inf\""));
        assert_eq!(Dictionary::from_json(&text).unwrap(), d);

        let d = Dictionary::from_json(r#"{"p": 2, "atoms": [[3, 4], [0, 1]]}"#).unwrap();
        assert_eq!(d.len(), 4);
        assert!((d.atom(0).unwrap()[0] - 0.6).abs() < 1e-15);
        assert!(Dictionary::from_json(r#"{"p": 0.5, "atoms": [[1]]}"#).is_err());
    }

    #[test]
    fn pruning_drops_tiny_coefficients() {
        let mut c = Combination::from_pairs([(0, 1.0), (1, 1e-16)]);
        assert_eq!(c.support(), 1);
        c.add(0, -1.0);
        assert!(c.is_empty());
    }

    fn combo(n: usize) -> impl Strategy<Value = Combination> {
        prop::collection::vec((0..n, -2.0f64..2.0), 0..6).prop_map(Combination::from_pairs)
    }

    fn random_dictionary() -> impl Strategy<Value = Dictionary> {
        (1usize..4, prop_oneof![Just(NormOrder::L1), Just(NormOrder::L2), Just(NormOrder::Infinity), Just(NormOrder::Finite(3.0))])
            .prop_flat_map(|(d, p)| {
                prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), 1..5).prop_map(move |raw| {
                    let mut atoms: Vec<Vector> = raw
                        .into_iter()
                        .filter(|a| a.iter().any(|x| x.abs() > 1e-3))
                        .map(|a| Vector::new(a).unwrap())
                        .collect();
                    if atoms.is_empty() {
                        atoms.push(Vector::basis(d, 0, 1.0));
                    }
                    Dictionary::symmetric(&atoms, p).unwrap()
                })
            })
    }

    proptest! {
        #[test]
        fn constructors_produce_valid_dictionaries(d in random_dictionary()) {
            prop_assert!(d.has_unit_atoms());
            prop_assert!(d.is_closed_under_negation());
        }

        #[test]
        fn combine_is_linear(c1 in combo(4), c2 in combo(4), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let d = Dictionary::canonical(2, NormOrder::L2).unwrap();
            let lhs = d.combine(&c1.linear(a, &c2, b)).unwrap().vector;
            let v1 = d.combine(&c1).unwrap().vector;
            let v2 = d.combine(&c2).unwrap().vector;
            for i in 0..2 {
                prop_assert!((lhs[i] - (a * v1[i] + b * v2[i])).abs() <= 1e-12);
            }
        }

        #[test]
        fn unit_mass_stays_in_unit_ball(d in random_dictionary(), raw in prop::collection::vec((0usize..32, -1.0f64..1.0), 0..6)) {
            let mut c = Combination::from_pairs(raw.into_iter().map(|(i, v)| (i % d.len(), v)));
            let mass = c.l1_mass();
            if mass > 1.0 {
                c.scale(1.0 / mass);
            }
            let m = d.combine(&c).unwrap();
            prop_assert!(dictionary_norm(&d, &m.vector) <= 1.0 + 1e-12);
        }
    }
}
