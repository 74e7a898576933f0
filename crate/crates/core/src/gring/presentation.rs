//! JSON schema for rings and ring maps.
//!
//! ```json
//! {"mode": "IntegerModTorsion", "topDim": 4,
//!  "basis": [{"label": "1", "degree": 0}, {"label": "x", "degree": 2}, ...],
//!  "products": [{"a": "x", "b": "x", "result": [{"label": "x2", "coeff": 1}]}],
//!  "fundamental": "x2"}
//! ```
//!
//! Omitted products are zero, except that the degree-0 element always acts as
//! the unit. Listing `a·b` also defines `b·a`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Coeff, CoefficientMode, GradedElement, ManifoldRing, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    #[serde(serialize_with = "ser_coeff", deserialize_with = "de_coeff")]
    pub coeff: Coeff,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub label: String,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductEntry {
    pub a: String,
    pub b: String,
    pub result: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingPresentation {
    pub mode: CoefficientMode,
    #[serde(rename = "topDim")]
    pub top_dim: usize,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub products: Vec<ProductEntry>,
    pub fundamental: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub orientable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub from: String,
    pub to: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapPresentation {
    pub images: Vec<ImageEntry>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Coefficients are JSON integers when they fit in `i64`, decimal strings otherwise.
pub(crate) fn ser_coeff<S: Serializer>(c: &Coeff, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(c) {
        Ok(v) => s.serialize_i64(v),
        Err(_) => s.serialize_str(&c.to_string()),
    }
}

pub(crate) fn de_coeff<'de, D: Deserializer<'de>>(d: D) -> Result<Coeff, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }
    match Repr::deserialize(d)? {
        Repr::Int(v) => Ok(Coeff::from(v)),
        Repr::Str(s) => s.trim().parse().map_err(serde::de::Error::custom),
    }
}

pub(crate) fn terms_of(e: &GradedElement) -> Vec<Term> {
    e.terms().into_iter().map(|(label, coeff)| Term { label, coeff }).collect()
}

pub(crate) fn element_from_terms(ring: &Ring, terms: &[Term]) -> Result<GradedElement, RingError> {
    let pairs: Vec<(&str, Coeff)> = terms.iter().map(|t| (t.label.as_str(), t.coeff.clone())).collect();
    GradedElement::from_terms(ring, &pairs)
}

pub(super) fn build_ring(pres: &RingPresentation) -> Result<Ring, RingError> {
    let top = pres.top_dim;
    let mode = pres.mode;

    let mut seen = BTreeMap::new();
    for b in &pres.basis {
        if seen.insert(b.label.clone(), b.degree).is_some() {
            return Err(RingError::DuplicateLabel(b.label.clone()));
        }
        if b.degree > top {
            return Err(RingError::DegreeOutOfRange { label: b.label.clone(), degree: b.degree, top });
        }
        if mode == CoefficientMode::IntegerModTorsion && b.degree % 2 == 1 {
            return Err(RingError::OddDegree { label: b.label.clone(), degree: b.degree });
        }
    }
    let mut order: Vec<usize> = (0..pres.basis.len()).collect();
    order.sort_by_key(|&i| pres.basis[i].degree);
    let basis: Vec<(String, usize)> =
        order.iter().map(|&i| (pres.basis[i].label.clone(), pres.basis[i].degree)).collect();
    let units = basis.iter().filter(|b| b.1 == 0).count();
    if units != 1 {
        return Err(RingError::BadUnit(format!(
            "degree 0 must have exactly one basis element, found {units}"
        )));
    }
    let index: BTreeMap<&str, usize> = basis.iter().enumerate().map(|(i, (l, _))| (l.as_str(), i)).collect();
    let lookup = |label: &str| index.get(label).copied().ok_or_else(|| RingError::UnknownLabel(label.to_string()));
    let fundamental = match index.get(pres.fundamental.as_str()) {
        Some(&i) => i,
        None => {
            return Err(RingError::MissingFundamental(format!(
                "`{}` is not a basis label",
                pres.fundamental
            )))
        }
    };
    if basis[fundamental].1 != top {
        return Err(RingError::MissingFundamental(format!(
            "`{}` has degree {}, expected the top dimension {top}",
            pres.fundamental, basis[fundamental].1
        )));
    }

    let dim = basis.len();
    let mut table: Vec<Vec<(usize, Coeff)>> = vec![Vec::new(); dim * dim];
    for a in 0..dim {
        table[a] = vec![(a, Coeff::one())];
        table[a * dim] = vec![(a, Coeff::one())];
    }
    let mut given: BTreeMap<(usize, usize), Vec<(usize, Coeff)>> = BTreeMap::new();
    for entry in &pres.products {
        let (a, b) = (lookup(&entry.a)?, lookup(&entry.b)?);
        let target = basis[a].1 + basis[b].1;
        let mut acc: BTreeMap<usize, Coeff> = BTreeMap::new();
        for t in &entry.result {
            let k = lookup(&t.label)?;
            *acc.entry(k).or_insert_with(Coeff::zero) += &t.coeff;
        }
        let result: Vec<(usize, Coeff)> = acc
            .into_iter()
            .map(|(k, c)| (k, mode.normalize(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        if target > top && !result.is_empty() {
            return Err(RingError::DegreeOverflowEntry {
                a: entry.a.clone(),
                b: entry.b.clone(),
                degree: target,
                top,
            });
        }
        for (k, _) in &result {
            if basis[*k].1 != target {
                return Err(RingError::DegreeMismatch {
                    a: entry.a.clone(),
                    b: entry.b.clone(),
                    label: basis[*k].0.clone(),
                    expected: target,
                    found: basis[*k].1,
                });
            }
        }
        if a == 0 || b == 0 {
            let other = if a == 0 { b } else { a };
            if result != vec![(other, Coeff::one())] {
                return Err(RingError::BadUnit(format!(
                    "product {}·{} must equal {}",
                    entry.a, entry.b, basis[other].0
                )));
            }
            continue;
        }
        if given.insert((a, b), result).is_some() {
            return Err(RingError::DuplicateProduct { a: entry.a.clone(), b: entry.b.clone() });
        }
    }
    for (&(a, b), result) in &given {
        if let Some(mirror) = given.get(&(b, a)) {
            if mirror != result {
                return Err(RingError::NonCommutative { a: basis[a].0.clone(), b: basis[b].0.clone() });
            }
        }
        table[a * dim + b] = result.clone();
        table[b * dim + a] = result.clone();
    }

    let ring = std::sync::Arc::new(ManifoldRing::assemble(mode, top, basis, table, fundamental, pres.orientable)?);
    ManifoldRing::verify_structure(&ring)?;
    Ok(ring)
}

impl ManifoldRing {
    /// Presentation listing every nonzero product `a·b` with `a <= b` in basis order.
    pub fn to_presentation(&self) -> RingPresentation {
        let dim = self.dim();
        let mut products = Vec::new();
        for a in 1..dim {
            for b in a..dim {
                let entries = self.basis_product(a, b);
                if entries.is_empty() {
                    continue;
                }
                products.push(ProductEntry {
                    a: self.labels[a].clone(),
                    b: self.labels[b].clone(),
                    result: entries
                        .iter()
                        .map(|(k, c)| Term { label: self.labels[*k].clone(), coeff: c.clone() })
                        .collect(),
                });
            }
        }
        RingPresentation {
            mode: self.mode,
            top_dim: self.top_dim,
            basis: self
                .labels
                .iter()
                .zip(&self.degrees)
                .map(|(l, d)| BasisEntry { label: l.clone(), degree: *d })
                .collect(),
            products,
            fundamental: self.fundamental_label().to_string(),
            orientable: self.orientable,
        }
    }
}
