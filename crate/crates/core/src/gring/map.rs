use std::sync::Arc;

use num_traits::Zero;

use super::linalg::rank;
use super::presentation::{element_from_terms, terms_of, ImageEntry, MapPresentation};
use super::{Coeff, GradedElement, Ring, RingError};

/// Degree-preserving unital ring homomorphism, stored by the images of the
/// source basis. Multiplicativity is verified on all basis pairs when built.
#[derive(Clone, Debug)]
pub struct RingMap {
    source: Ring,
    target: Ring,
    images: Vec<GradedElement>,
}

impl RingMap {
    pub fn new(source: &Ring, target: &Ring, images: Vec<GradedElement>) -> Result<RingMap, RingError> {
        if source.mode() != target.mode() {
            return Err(RingError::ModeMismatch);
        }
        if images.len() != source.dim() {
            return Err(RingError::BadMap(format!(
                "expected {} images, got {}",
                source.dim(),
                images.len()
            )));
        }
        for (idx, img) in images.iter().enumerate() {
            if !Arc::ptr_eq(img.ring(), target) {
                return Err(RingError::RingMismatch);
            }
            if !img.is_homogeneous_of(source.degree_of(idx)) {
                return Err(RingError::BadMap(format!(
                    "image of `{}` is not homogeneous of degree {}",
                    source.label(idx),
                    source.degree_of(idx)
                )));
            }
        }
        if images[0] != GradedElement::one(target) {
            return Err(RingError::BadMap("unit must map to unit".into()));
        }
        let map = RingMap { source: source.clone(), target: target.clone(), images };
        for a in 1..source.dim() {
            for b in a..source.dim() {
                let product = GradedElement::basis(source, a).mul(&GradedElement::basis(source, b))?;
                let lhs = map.apply(&product)?;
                let rhs = map.images[a].mul(&map.images[b])?;
                if lhs != rhs {
                    return Err(RingError::BadMap(format!(
                        "not multiplicative on ({}, {})",
                        source.label(a),
                        source.label(b)
                    )));
                }
            }
        }
        Ok(map)
    }

    pub fn identity(ring: &Ring) -> RingMap {
        let images = (0..ring.dim()).map(|i| GradedElement::basis(ring, i)).collect();
        RingMap { source: ring.clone(), target: ring.clone(), images }
    }

    /// Reads `{"images": [{"from", "to": [...]}]}`. Omitted basis elements map
    /// to zero, except the unit which maps to the unit.
    pub fn from_presentation(source: &Ring, target: &Ring, pres: &MapPresentation) -> Result<RingMap, RingError> {
        let mut images: Vec<Option<GradedElement>> = vec![None; source.dim()];
        for entry in &pres.images {
            let idx = source
                .index_of(&entry.from)
                .ok_or_else(|| RingError::UnknownLabel(entry.from.clone()))?;
            if images[idx].is_some() {
                return Err(RingError::BadMap(format!("`{}` has two images", entry.from)));
            }
            images[idx] = Some(element_from_terms(target, &entry.to)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.unwrap_or_else(|| if i == 0 { GradedElement::one(target) } else { GradedElement::zero(target) })
            })
            .collect();
        RingMap::new(source, target, images)
    }

    pub fn to_presentation(&self) -> MapPresentation {
        MapPresentation {
            images: self
                .images
                .iter()
                .enumerate()
                .filter(|(_, img)| !img.is_zero())
                .map(|(i, img)| ImageEntry { from: self.source.label(i).to_string(), to: terms_of(img) })
                .collect(),
        }
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn image_of_basis(&self, idx: usize) -> &GradedElement {
        &self.images[idx]
    }

    pub fn apply(&self, c: &GradedElement) -> Result<GradedElement, RingError> {
        if !Arc::ptr_eq(c.ring(), &self.source) {
            return Err(RingError::RingMismatch);
        }
        let mut out = vec![Coeff::zero(); self.target.dim()];
        for (idx, coeff) in c.coeffs().iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (k, v) in self.images[idx].coeffs().iter().enumerate() {
                if !v.is_zero() {
                    out[k] += coeff * v;
                }
            }
        }
        Ok(GradedElement::from_coeffs(&self.target, out))
    }

    /// `x ↦ outer(self(x))`.
    pub fn then(&self, outer: &RingMap) -> Result<RingMap, RingError> {
        if !Arc::ptr_eq(&self.target, &outer.source) {
            return Err(RingError::RingMismatch);
        }
        let images = self.images.iter().map(|img| outer.apply(img)).collect::<Result<Vec<_>, _>>()?;
        Ok(RingMap { source: self.source.clone(), target: outer.target.clone(), images })
    }

    pub fn is_identity(&self) -> bool {
        Arc::ptr_eq(&self.source, &self.target)
            && self.images.iter().enumerate().all(|(i, img)| *img == GradedElement::basis(&self.source, i))
    }

    /// Rank check: the images of the degree-`d` basis are linearly independent.
    pub fn is_injective_in_degree(&self, d: usize) -> bool {
        let rows: Vec<Vec<Coeff>> = self.source.degree_range(d).map(|i| self.images[i].coeffs().to_vec()).collect();
        let n = rows.len();
        rank(rows, self.source.mode()) == n
    }

    pub fn is_injective(&self) -> bool {
        (0..=self.source.top_dim()).all(|d| self.is_injective_in_degree(d))
    }
}

pub fn apply_map(m: &RingMap, c: &GradedElement) -> Result<GradedElement, RingError> {
    m.apply(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gring::{truncated_free, CoefficientMode};

    #[test]
    fn identity_and_composition() {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 8, &[("a", 4), ("b", 8)]).unwrap();
        let r = f.ring().clone();
        let id = RingMap::identity(&r);
        let a = f.generator(0);
        assert_eq!(id.apply(&a).unwrap(), a);
        assert!(id.is_identity());
        // b ↦ b + a², inverse b ↦ b - a²
        let a2 = a.mul(&a).unwrap();
        let fwd = f.map_from_generators(&r, &[a.clone(), f.generator(1).add(&a2).unwrap()]).unwrap();
        let back = f.map_from_generators(&r, &[a.clone(), f.generator(1).sub(&a2).unwrap()]).unwrap();
        assert!(fwd.then(&back).unwrap().is_identity());
        assert!(!fwd.is_identity());
        assert!(fwd.is_injective());
        let pres = fwd.to_presentation();
        let again = RingMap::from_presentation(&r, &r, &pres).unwrap();
        assert_eq!(again.to_presentation(), pres);
    }

    #[test]
    fn rejects_bad_maps() {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 8, &[("a", 4)]).unwrap();
        let r = f.ring().clone();
        // a ↦ 2a is fine, but sending a² to a² breaks multiplicativity
        let mut images: Vec<GradedElement> = (0..r.dim()).map(|i| GradedElement::basis(&r, i)).collect();
        images[1] = images[1].scale(&Coeff::from(2));
        assert!(matches!(RingMap::new(&r, &r, images), Err(RingError::BadMap(_))));
        // degree shift
        let mut images: Vec<GradedElement> = (0..r.dim()).map(|i| GradedElement::basis(&r, i)).collect();
        images[1] = GradedElement::basis(&r, 2);
        assert!(matches!(RingMap::new(&r, &r, images), Err(RingError::BadMap(_))));
        let zero_map = RingMap::from_presentation(&r, &r, &MapPresentation { images: vec![] }).unwrap();
        assert!(!zero_map.is_injective_in_degree(4));
        assert!(zero_map.is_injective_in_degree(0));
    }
}
