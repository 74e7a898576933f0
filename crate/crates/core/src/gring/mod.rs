//! Exact graded-commutative rings given by a finite basis and structure
//! constants.
//!
//! A [`ManifoldRing`] models the cohomology of a closed manifold either
//! modulo torsion with integer coefficients or with `Z/2` coefficients.
//! Products landing above the top dimension vanish. Elements are dense
//! coefficient vectors over the basis and keep a reference to their ring;
//! arithmetic between elements of different rings is rejected.

mod free;
mod kunneth;
mod linalg;
mod map;
mod presentation;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use free::{truncated_free, FreeAlgebra};
pub use kunneth::{kunneth_product, KunnethProduct};
pub use linalg::rank;
pub use map::{apply_map, RingMap};
pub use presentation::{BasisEntry, ImageEntry, MapPresentation, ProductEntry, RingPresentation, Term};

pub type Coeff = BigInt;

/// Shared handle; elements and maps hold one of these.
pub type Ring = Arc<ManifoldRing>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("bad unit: {0}")]
    BadUnit(String),
    #[error("multiplication is not associative on ({a}, {b}, {c})")]
    NonAssociative { a: String, b: String, c: String },
    #[error("multiplication is not commutative on ({a}, {b})")]
    NonCommutative { a: String, b: String },
    #[error("product {a}·{b} lands in degree {degree} above the top dimension {top}")]
    DegreeOverflowEntry { a: String, b: String, degree: usize, top: usize },
    #[error("product {a}·{b} should have degree {expected}, but lists {label} of degree {found}")]
    DegreeMismatch { a: String, b: String, label: String, expected: usize, found: usize },
    #[error("fundamental class: {0}")]
    MissingFundamental(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("basis label `{0}` appears twice")]
    DuplicateLabel(String),
    #[error("product {a}·{b} is listed twice")]
    DuplicateProduct { a: String, b: String },
    #[error("basis element `{label}` has odd degree {degree}; integer mode only admits even degrees")]
    OddDegree { label: String, degree: usize },
    #[error("basis element `{label}` has degree {degree} above the top dimension {top}")]
    DegreeOutOfRange { label: String, degree: usize, top: usize },
    #[error("elements belong to different rings")]
    RingMismatch,
    #[error("coefficient modes differ")]
    ModeMismatch,
    #[error("total class must have degree-0 component 1, found {0}")]
    NotAUnit(Coeff),
    #[error("ring map: {0}")]
    BadMap(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientMode {
    #[serde(alias = "integer", alias = "Integer", alias = "integer_mod_torsion")]
    IntegerModTorsion,
    #[serde(alias = "mod2", alias = "Z2", alias = "z2")]
    Mod2,
}

impl CoefficientMode {
    pub(crate) fn normalize(self, v: Coeff) -> Coeff {
        match self {
            CoefficientMode::IntegerModTorsion => v,
            CoefficientMode::Mod2 => v.mod_floor(&BigInt::from(2)),
        }
    }
}

/// Truncated graded ring with a designated fundamental class.
///
/// The basis is stored sorted by degree; index 0 is the unit.
pub struct ManifoldRing {
    mode: CoefficientMode,
    top_dim: usize,
    labels: Vec<String>,
    degrees: Vec<usize>,
    offsets: Vec<usize>,
    index: BTreeMap<String, usize>,
    // row-major dim x dim; entry (a, b) lists the nonzero terms of a·b
    table: Vec<Vec<(usize, Coeff)>>,
    fundamental: usize,
    orientable: bool,
}

impl fmt::Debug for ManifoldRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldRing")
            .field("mode", &self.mode)
            .field("top_dim", &self.top_dim)
            .field("basis", &self.labels)
            .field("fundamental", &self.labels[self.fundamental])
            .finish()
    }
}

impl ManifoldRing {
    /// Builds a ring from a basis already sorted by degree with the unit first.
    /// Checks every invariant except associativity and commutativity.
    pub(crate) fn assemble(
        mode: CoefficientMode,
        top_dim: usize,
        basis: Vec<(String, usize)>,
        table: Vec<Vec<(usize, Coeff)>>,
        fundamental: usize,
        orientable: bool,
    ) -> Result<ManifoldRing, RingError> {
        let dim = basis.len();
        let mut index = BTreeMap::new();
        for (i, (label, degree)) in basis.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(RingError::DuplicateLabel(label.clone()));
            }
            if *degree > top_dim {
                return Err(RingError::DegreeOutOfRange { label: label.clone(), degree: *degree, top: top_dim });
            }
            if mode == CoefficientMode::IntegerModTorsion && degree % 2 == 1 {
                return Err(RingError::OddDegree { label: label.clone(), degree: *degree });
            }
        }
        debug_assert!(basis.windows(2).all(|w| w[0].1 <= w[1].1));
        let units = basis.iter().filter(|(_, d)| *d == 0).count();
        if units != 1 {
            return Err(RingError::BadUnit(format!("degree 0 must have exactly one basis element, found {units}")));
        }
        if fundamental >= dim || basis[fundamental].1 != top_dim {
            return Err(RingError::MissingFundamental(format!(
                "no basis element of degree {top_dim} designated as fundamental"
            )));
        }
        let mut offsets = vec![0; top_dim + 2];
        for (_, d) in &basis {
            offsets[d + 1] += 1;
        }
        for d in 0..=top_dim {
            offsets[d + 1] += offsets[d];
        }
        debug_assert_eq!(table.len(), dim * dim);
        let (labels, degrees) = basis.into_iter().unzip();
        Ok(ManifoldRing { mode, top_dim, labels, degrees, offsets, index, table, fundamental, orientable })
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    pub fn top_dim(&self) -> usize {
        self.top_dim
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.labels[idx]
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        self.degrees[idx]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Basis indices in degree `d` (empty above the top dimension).
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        if d > self.top_dim {
            return 0..0;
        }
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn fundamental_index(&self) -> usize {
        self.fundamental
    }

    pub fn fundamental_label(&self) -> &str {
        &self.labels[self.fundamental]
    }

    pub fn unit_label(&self) -> &str {
        &self.labels[0]
    }

    pub fn orientable(&self) -> bool {
        self.orientable
    }

    /// Nonzero terms of the product of basis elements `a` and `b`.
    pub fn basis_product(&self, a: usize, b: usize) -> &[(usize, Coeff)] {
        &self.table[a * self.dim() + b]
    }

    /// Exhaustive associativity and commutativity check over basis triples.
    pub fn verify_structure(ring: &Ring) -> Result<(), RingError> {
        let dim = ring.dim();
        for a in 0..dim {
            for b in a..dim {
                if ring.basis_product(a, b) != ring.basis_product(b, a) {
                    return Err(RingError::NonCommutative {
                        a: ring.labels[a].clone(),
                        b: ring.labels[b].clone(),
                    });
                }
            }
        }
        for a in 1..dim {
            for b in 1..dim {
                let dab = ring.degrees[a] + ring.degrees[b];
                if dab > ring.top_dim {
                    continue;
                }
                let ab = GradedElement::basis(ring, a).mul(&GradedElement::basis(ring, b))?;
                for c in 1..dim {
                    if dab + ring.degrees[c] > ring.top_dim {
                        continue;
                    }
                    let cc = GradedElement::basis(ring, c);
                    let left = ab.mul(&cc)?;
                    let right = GradedElement::basis(ring, a).mul(&GradedElement::basis(ring, b).mul(&cc)?)?;
                    if left != right {
                        return Err(RingError::NonAssociative {
                            a: ring.labels[a].clone(),
                            b: ring.labels[b].clone(),
                            c: ring.labels[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds and validates a ring from its JSON-level presentation.
pub fn make_ring(pres: &RingPresentation) -> Result<Ring, RingError> {
    presentation::build_ring(pres)
}

/// Element of a [`ManifoldRing`], stored as a coefficient per basis element.
#[derive(Clone)]
pub struct GradedElement {
    ring: Ring,
    coeffs: Vec<Coeff>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) && self.coeffs == other.coeffs
    }
}

impl Eq for GradedElement {}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedElement({self})")
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let label = &self.ring.labels[idx];
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if mag.is_one() {
                write!(f, "{label}")?;
            } else {
                write!(f, "{mag}*{label}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl GradedElement {
    pub fn zero(ring: &Ring) -> Self {
        GradedElement { ring: ring.clone(), coeffs: vec![Coeff::zero(); ring.dim()] }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::basis(ring, 0)
    }

    pub fn basis(ring: &Ring, idx: usize) -> Self {
        let mut e = Self::zero(ring);
        e.coeffs[idx] = Coeff::one();
        e
    }

    pub fn fundamental(ring: &Ring) -> Self {
        Self::basis(ring, ring.fundamental)
    }

    pub fn from_coeffs(ring: &Ring, coeffs: Vec<Coeff>) -> Self {
        assert_eq!(coeffs.len(), ring.dim(), "coefficient vector length");
        let coeffs = coeffs.into_iter().map(|c| ring.mode.normalize(c)).collect();
        GradedElement { ring: ring.clone(), coeffs }
    }

    /// Sums `coeff * label` over the given terms; repeated labels accumulate.
    pub fn from_terms<L: AsRef<str>>(ring: &Ring, terms: &[(L, Coeff)]) -> Result<Self, RingError> {
        let mut e = Self::zero(ring);
        for (label, c) in terms {
            let idx = ring
                .index_of(label.as_ref())
                .ok_or_else(|| RingError::UnknownLabel(label.as_ref().to_string()))?;
            e.coeffs[idx] += c;
        }
        e.normalize();
        Ok(e)
    }

    pub fn label(ring: &Ring, label: &str) -> Result<Self, RingError> {
        Self::from_terms(ring, &[(label, Coeff::one())])
    }

    fn normalize(&mut self) {
        if self.ring.mode == CoefficientMode::Mod2 {
            for c in self.coeffs.iter_mut() {
                *c = c.mod_floor(&BigInt::from(2));
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeff(&self, label: &str) -> Option<&Coeff> {
        self.ring.index_of(label).map(|i| &self.coeffs[i])
    }

    pub fn coeff_at(&self, idx: usize) -> &Coeff {
        &self.coeffs[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn same_ring(&self, other: &GradedElement) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring)
    }

    fn check_ring(&self, other: &GradedElement) -> Result<(), RingError> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(RingError::RingMismatch)
        }
    }

    /// Nonzero `(label, coeff)` pairs in basis order.
    pub fn terms(&self) -> Vec<(String, Coeff)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.ring.labels[i].clone(), c.clone()))
            .collect()
    }

    /// Degree-`d` part.
    pub fn component(&self, d: usize) -> GradedElement {
        let mut out = Self::zero(&self.ring);
        for i in self.ring.degree_range(d) {
            out.coeffs[i] = self.coeffs[i].clone();
        }
        out
    }

    /// Degrees carrying a nonzero coefficient, ascending.
    pub fn support_degrees(&self) -> Vec<usize> {
        (0..=self.ring.top_dim)
            .filter(|&d| self.ring.degree_range(d).any(|i| !self.coeffs[i].is_zero()))
            .collect()
    }

    /// True for zero and for elements concentrated in degree `d`.
    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.support_degrees().iter().all(|&e| e == d)
    }

    pub fn add(&self, other: &GradedElement) -> Result<GradedElement, RingError> {
        self.check_ring(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self::from_coeffs(&self.ring, coeffs))
    }

    pub fn sub(&self, other: &GradedElement) -> Result<GradedElement, RingError> {
        self.check_ring(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self::from_coeffs(&self.ring, coeffs))
    }

    pub fn neg(&self) -> GradedElement {
        Self::from_coeffs(&self.ring, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &Coeff) -> GradedElement {
        Self::from_coeffs(&self.ring, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Bilinear extension of the structure constants; terms above the top
    /// dimension are dropped.
    pub fn mul(&self, other: &GradedElement) -> Result<GradedElement, RingError> {
        self.check_ring(other)?;
        let ring = &self.ring;
        let lhs: Vec<usize> = (0..ring.dim()).filter(|&i| !self.coeffs[i].is_zero()).collect();
        let rhs: Vec<usize> = (0..ring.dim()).filter(|&i| !other.coeffs[i].is_zero()).collect();
        let mut out = vec![Coeff::zero(); ring.dim()];
        for &a in &lhs {
            for &b in &rhs {
                let entries = ring.basis_product(a, b);
                if entries.is_empty() {
                    continue;
                }
                let ab = &self.coeffs[a] * &other.coeffs[b];
                for (k, v) in entries {
                    out[*k] += &ab * v;
                }
            }
        }
        Ok(Self::from_coeffs(ring, out))
    }

    pub fn pow(&self, e: u32) -> Result<GradedElement, RingError> {
        let mut acc = Self::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

pub fn add(a: &GradedElement, b: &GradedElement) -> Result<GradedElement, RingError> {
    a.add(b)
}

pub fn mul(a: &GradedElement, b: &GradedElement) -> Result<GradedElement, RingError> {
    a.mul(b)
}

/// Formal inverse of a total class `1 + c_1 + c_2 + ...`, computed degree by
/// degree: `c̄_0 = 1`, `c̄_d = -Σ_{e=1..d} c_e c̄_{d-e}`.
pub fn invert_total_class(c: &GradedElement) -> Result<GradedElement, RingError> {
    let ring = c.ring();
    if !c.coeffs[0].is_one() {
        return Err(RingError::NotAUnit(c.coeffs[0].clone()));
    }
    let parts: Vec<GradedElement> = (0..=ring.top_dim).map(|d| c.component(d)).collect();
    let mut inverse_parts = vec![GradedElement::one(ring)];
    for d in 1..=ring.top_dim {
        let mut acc = GradedElement::zero(ring);
        for e in 1..=d {
            if parts[e].is_zero() || inverse_parts[d - e].is_zero() {
                continue;
            }
            acc = acc.add(&parts[e].mul(&inverse_parts[d - e])?)?;
        }
        inverse_parts.push(acc.neg());
    }
    inverse_parts
        .iter()
        .try_fold(GradedElement::zero(ring), |acc, part| acc.add(part))
}

/// Coefficient of the fundamental class in the top-degree component.
pub fn pair_fundamental(c: &GradedElement) -> Coeff {
    c.coeffs[c.ring.fundamental].clone()
}
