//! Characteristic classes of virtual bundles and the determinant obstruction
//! classes of first-order strata.
//!
//! A [`VirtualBundle`] carries the total classes of `τ_N` and of `f*(τ_P)`;
//! its total class is the first times the formal inverse of the second. In a
//! mod-2 ring these are Stiefel-Whitney classes `W_j` in degree `j`; in an
//! integer ring they are Pontrjagin classes `P_j` in degree `4j`.
//!
//! The obstruction for `Σ^i` is the determinant of the Toeplitz matrix whose
//! `(s, t)` entry (1-based) is `W_{i+s-t}` of size `p - n + i`, or, in the
//! oriented case with `n - p = 2u` and `i = 2v`, `P_{v+s-t}` of size `v - u`.
//! Entries with negative index are zero and index zero gives `1`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gring::{
    invert_total_class, CoefficientMode, GradedElement, Ring, RingError, Term,
};
use crate::symbols::JetContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharClassError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("expected a {expected:?} ring, found {found:?}")]
    ModeMismatch { expected: CoefficientMode, found: CoefficientMode },
    #[error("determinant size {size} is negative")]
    NegativeSize { size: i64 },
    #[error("integer classes need n - p and i even (n - p = {n_minus_p}, i = {i})")]
    ParityError { n_minus_p: i64, i: i64 },
    #[error("stratum index {0} must be at least 1")]
    BadIndex(i64),
    #[error("matrix row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("no tabulated Thom polynomial for W_p(p, p) with p = {0}; the table covers 5..=8")]
    UnsupportedDimension(i64),
    #[error("Pontrjagin total class has a term `{label}` in degree {degree}, not divisible by 4")]
    PontrjaginDegree { label: String, degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassKind {
    StiefelWhitney,
    Pontrjagin,
}

impl ClassKind {
    pub fn for_mode(mode: CoefficientMode) -> ClassKind {
        match mode {
            CoefficientMode::Mod2 => ClassKind::StiefelWhitney,
            CoefficientMode::IntegerModTorsion => ClassKind::Pontrjagin,
        }
    }

    /// Cohomological degree of the class with index 1.
    pub fn step(self) -> usize {
        match self {
            ClassKind::StiefelWhitney => 1,
            ClassKind::Pontrjagin => 4,
        }
    }
}

/// `ξ = τ_N - f*(τ_P)`, held as two total classes with unit leading term.
#[derive(Clone, Debug)]
pub struct VirtualBundle {
    total_positive: GradedElement,
    total_negative_pulled: GradedElement,
    total: GradedElement,
    kind: ClassKind,
}

impl VirtualBundle {
    pub fn new(total_positive: GradedElement, total_negative_pulled: GradedElement) -> Result<Self, CharClassError> {
        if !total_positive.same_ring(&total_negative_pulled) {
            return Err(RingError::RingMismatch.into());
        }
        let ring = total_positive.ring().clone();
        let kind = ClassKind::for_mode(ring.mode());
        if kind == ClassKind::Pontrjagin {
            for total in [&total_positive, &total_negative_pulled] {
                for (idx, c) in total.coeffs().iter().enumerate() {
                    if !c.is_zero() && !ring.degree_of(idx).is_multiple_of(4) {
                        return Err(CharClassError::PontrjaginDegree {
                            label: ring.label(idx).to_string(),
                            degree: ring.degree_of(idx),
                        });
                    }
                }
            }
        }
        let inverse = invert_total_class(&total_negative_pulled)?;
        if !total_positive.coeff_at(0).is_one() {
            return Err(RingError::NotAUnit(total_positive.coeff_at(0).clone()).into());
        }
        let total = total_positive.mul(&inverse)?;
        Ok(VirtualBundle { total_positive, total_negative_pulled, total, kind })
    }

    /// `ξ = 0`.
    pub fn trivial(ring: &Ring) -> Self {
        let one = GradedElement::one(ring);
        VirtualBundle::new(one.clone(), one).expect("unit totals are valid")
    }

    /// `ξ` with `f*(τ_P)` trivial, so that `total(ξ) = total`.
    pub fn from_total(total: GradedElement) -> Result<Self, CharClassError> {
        let one = GradedElement::one(total.ring());
        VirtualBundle::new(total, one)
    }

    pub fn ring(&self) -> &Ring {
        self.total.ring()
    }

    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    pub fn total_positive(&self) -> &GradedElement {
        &self.total_positive
    }

    pub fn total_negative_pulled(&self) -> &GradedElement {
        &self.total_negative_pulled
    }

    /// `total(τ_N) · total(f*τ_P)^{-1}`
    pub fn total(&self) -> &GradedElement {
        &self.total
    }

    /// `W_j(ξ)` or `P_j(ξ)`. Index 0 gives `1`, negative indices give `0`.
    pub fn class(&self, j: i64) -> GradedElement {
        if j < 0 {
            return GradedElement::zero(self.ring());
        }
        // indices past the top dimension give an empty component
        let degree = (j as usize).saturating_mul(self.kind.step());
        self.total.component(degree)
    }

    pub fn from_presentation(ring: &Ring, pres: &BundlePresentation) -> Result<Self, CharClassError> {
        let positive = total_from_terms(ring, &pres.total_positive)?;
        let negative = total_from_terms(ring, &pres.total_negative_pulled)?;
        VirtualBundle::new(positive, negative)
    }

    pub fn to_presentation(&self) -> BundlePresentation {
        let strip = |e: &GradedElement| -> Vec<Term> {
            e.terms()
                .into_iter()
                .skip_while(|(label, _)| label == e.ring().unit_label())
                .map(|(label, coeff)| Term { label, coeff })
                .collect()
        };
        BundlePresentation {
            total_positive: strip(&self.total_positive),
            total_negative_pulled: strip(&self.total_negative_pulled),
        }
    }
}

/// `{"totalPositive": [...], "totalNegativePulled": [...]}`. The unit term of
/// each total is implicit; if listed it must have coefficient 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundlePresentation {
    #[serde(rename = "totalPositive", default)]
    pub total_positive: Vec<Term>,
    #[serde(rename = "totalNegativePulled", default)]
    pub total_negative_pulled: Vec<Term>,
}

pub(crate) fn total_from_terms(ring: &Ring, terms: &[Term]) -> Result<GradedElement, CharClassError> {
    let mut pairs: Vec<(&str, BigInt)> = terms.iter().map(|t| (t.label.as_str(), t.coeff.clone())).collect();
    if !terms.iter().any(|t| t.label == ring.unit_label()) {
        pairs.push((ring.unit_label(), BigInt::one()));
    }
    Ok(GradedElement::from_terms(ring, &pairs)?)
}

/// `W_j(ξ)` / `P_j(ξ)`.
pub fn class_of_virtual(bundle: &VirtualBundle, j: i64) -> GradedElement {
    bundle.class(j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ObstructionVariant {
    StiefelWhitney,
    Pontrjagin,
    WTable,
}

/// A determinant (or tabulated) obstruction class together with the data
/// that produced it.
#[derive(Clone, Debug)]
pub struct ObstructionClass {
    pub value: GradedElement,
    pub stratum_index: i64,
    pub expected_degree: usize,
    pub variant: ObstructionVariant,
    /// Class index of each matrix entry, before clamping negatives to zero.
    pub matrix: Vec<Vec<i64>>,
}

impl ObstructionClass {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// Determinant over the (commutative) ring by Laplace expansion along rows,
/// memoized on column subsets: `O(2^n n)` ring products and no division.
pub fn det_graded(ring: &Ring, matrix: &[Vec<GradedElement>]) -> Result<GradedElement, CharClassError> {
    let size = matrix.len();
    for (row, entries) in matrix.iter().enumerate() {
        if entries.len() != size {
            return Err(CharClassError::NotSquare { row, len: entries.len(), size });
        }
        if entries.iter().any(|e| !Arc::ptr_eq(e.ring(), ring)) {
            return Err(RingError::RingMismatch.into());
        }
    }
    if size == 0 {
        return Ok(GradedElement::one(ring));
    }
    assert!(size < usize::BITS as usize, "determinant too large");
    // minors[S] = det of the last |S| rows restricted to the columns in S
    let mut minors: Vec<Option<GradedElement>> = vec![None; 1 << size];
    minors[0] = Some(GradedElement::one(ring));
    let mut subsets: Vec<usize> = (1..(1usize << size)).collect();
    subsets.sort_by_key(|s| s.count_ones());
    for subset in subsets {
        let r = size - subset.count_ones() as usize;
        let mut acc = GradedElement::zero(ring);
        for (pos, col) in (0..size).filter(|c| subset & (1 << c) != 0).enumerate() {
            let entry = &matrix[r][col];
            if entry.is_zero() {
                continue;
            }
            let minor = minors[subset & !(1 << col)].as_ref().expect("smaller subsets come first");
            if minor.is_zero() {
                continue;
            }
            let term = entry.mul(minor)?;
            acc = if pos % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        minors[subset] = Some(acc);
    }
    Ok(minors[(1 << size) - 1].take().expect("full set computed"))
}

fn require_mode(bundle: &VirtualBundle, expected: CoefficientMode) -> Result<(), CharClassError> {
    let found = bundle.ring().mode();
    if found != expected {
        return Err(CharClassError::ModeMismatch { expected, found });
    }
    Ok(())
}

fn toeplitz(bundle: &VirtualBundle, size: usize, offset: i64) -> (Vec<Vec<i64>>, Vec<Vec<GradedElement>>) {
    let indices: Vec<Vec<i64>> = (1..=size as i64)
        .map(|s| (1..=size as i64).map(|t| offset + s - t).collect())
        .collect();
    let entries = indices.iter().map(|row| row.iter().map(|&j| bundle.class(j)).collect()).collect();
    (indices, entries)
}

/// `c(Σ^i, ξ) = det [W_{i+s-t}(ξ)]` of size `p - n + i`, homogeneous of
/// degree `(p - n + i) i`.
pub fn porteous_sw(i: i64, ctx: &JetContext, bundle: &VirtualBundle) -> Result<ObstructionClass, CharClassError> {
    require_mode(bundle, CoefficientMode::Mod2)?;
    if i < 1 {
        return Err(CharClassError::BadIndex(i));
    }
    let size = ctx.p() - ctx.n() + i;
    if size < 0 {
        return Err(CharClassError::NegativeSize { size });
    }
    let (indices, entries) = toeplitz(bundle, size as usize, i);
    let value = det_graded(bundle.ring(), &entries)?;
    let expected_degree = (size * i) as usize;
    debug_assert!(value.is_homogeneous_of(expected_degree));
    Ok(ObstructionClass {
        value,
        stratum_index: i,
        expected_degree,
        variant: ObstructionVariant::StiefelWhitney,
        matrix: indices,
    })
}

/// `c_Z(Σ^i, ξ) = det [P_{v+s-t}(ξ)]` of size `v - u` where `n - p = 2u` and
/// `i = 2v`, homogeneous of degree `4 v (v - u)`.
pub fn porteous_pontrjagin(
    i: i64,
    ctx: &JetContext,
    bundle: &VirtualBundle,
) -> Result<ObstructionClass, CharClassError> {
    require_mode(bundle, CoefficientMode::IntegerModTorsion)?;
    if i < 1 {
        return Err(CharClassError::BadIndex(i));
    }
    let n_minus_p = ctx.n() - ctx.p();
    if n_minus_p % 2 != 0 || i % 2 != 0 {
        return Err(CharClassError::ParityError { n_minus_p, i });
    }
    let (u, v) = (n_minus_p / 2, i / 2);
    let size = v - u;
    if size < 0 {
        return Err(CharClassError::NegativeSize { size });
    }
    let (indices, entries) = toeplitz(bundle, size as usize, v);
    let value = det_graded(bundle.ring(), &entries)?;
    let expected_degree = (4 * v * size) as usize;
    debug_assert!(value.is_homogeneous_of(expected_degree));
    Ok(ObstructionClass {
        value,
        stratum_index: i,
        expected_degree,
        variant: ObstructionVariant::Pontrjagin,
        matrix: indices,
    })
}

/// Integer Thom polynomial of `W_p(p, p)` for `5 <= p <= 8`: zero for
/// `p = 5, 6, 7` and `9 P_2(ξ) + 3 P_1(ξ)^2` for `p = 8`.
pub fn w_table_polynomial(p: i64, bundle: &VirtualBundle) -> Result<ObstructionClass, CharClassError> {
    require_mode(bundle, CoefficientMode::IntegerModTorsion)?;
    let ring = bundle.ring();
    let value = match p {
        5..=7 => GradedElement::zero(ring),
        8 => {
            let p1 = bundle.class(1);
            let p2 = bundle.class(2);
            p2.scale(&BigInt::from(9)).add(&p1.mul(&p1)?.scale(&BigInt::from(3)))?
        }
        _ => return Err(CharClassError::UnsupportedDimension(p)),
    };
    Ok(ObstructionClass {
        value,
        stratum_index: p,
        expected_degree: p as usize,
        variant: ObstructionVariant::WTable,
        matrix: Vec::new(),
    })
}
