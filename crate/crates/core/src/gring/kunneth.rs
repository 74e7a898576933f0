use std::sync::Arc;

use num_traits::Zero;

use super::{Coeff, GradedElement, ManifoldRing, Ring, RingError, RingMap};

/// Tensor product `A ⊗ B` together with the projections' pullbacks
/// `q_A*(a) = a⊗1` and `q_B*(b) = 1⊗b`.
#[derive(Clone, Debug)]
pub struct KunnethProduct {
    ring: Ring,
    left: Ring,
    right: Ring,
    // product basis index -> (left index, right index)
    pairs: Vec<(usize, usize)>,
    // left index * right dim + right index -> product basis index
    position: Vec<usize>,
    left_pullback: RingMap,
    right_pullback: RingMap,
}

pub fn kunneth_product(a: &Ring, b: &Ring) -> Result<KunnethProduct, RingError> {
    if a.mode() != b.mode() {
        return Err(RingError::ModeMismatch);
    }
    let (da, db) = (a.dim(), b.dim());
    let mut pairs: Vec<(usize, usize)> = (0..da).flat_map(|i| (0..db).map(move |j| (i, j))).collect();
    pairs.sort_by_key(|&(i, j)| a.degree_of(i) + b.degree_of(j));
    let mut position = vec![0; da * db];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        position[i * db + j] = k;
    }

    let dim = pairs.len();
    let mut table = vec![Vec::new(); dim * dim];
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for (y, &(i2, j2)) in pairs.iter().enumerate() {
            let left = a.basis_product(i, i2);
            let right = b.basis_product(j, j2);
            if left.is_empty() || right.is_empty() {
                continue;
            }
            // (a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb'
            let negative = (b.degree_of(j) * a.degree_of(i2)) % 2 == 1;
            let mut entries = Vec::with_capacity(left.len() * right.len());
            for (li, lc) in left {
                for (rj, rc) in right {
                    let c: Coeff = lc * rc;
                    let c = a.mode().normalize(if negative { -c } else { c });
                    if !c.is_zero() {
                        entries.push((position[li * db + rj], c));
                    }
                }
            }
            entries.sort_by_key(|e| e.0);
            table[x * dim + y] = entries;
        }
    }
    let basis = pairs
        .iter()
        .map(|&(i, j)| (format!("{}⊗{}", a.label(i), b.label(j)), a.degree_of(i) + b.degree_of(j)))
        .collect();
    let fundamental = position[a.fundamental_index() * db + b.fundamental_index()];
    let ring: Ring = Arc::new(ManifoldRing::assemble(
        a.mode(),
        a.top_dim() + b.top_dim(),
        basis,
        table,
        fundamental,
        a.orientable() && b.orientable(),
    )?);

    let left_images = (0..da).map(|i| GradedElement::basis(&ring, position[i * db])).collect();
    let right_images = (0..db).map(|j| GradedElement::basis(&ring, position[j])).collect();
    let left_pullback = RingMap::new(a, &ring, left_images)?;
    let right_pullback = RingMap::new(b, &ring, right_images)?;
    Ok(KunnethProduct { ring, left: a.clone(), right: b.clone(), pairs, position, left_pullback, right_pullback })
}

impl KunnethProduct {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn left(&self) -> &Ring {
        &self.left
    }

    pub fn right(&self) -> &Ring {
        &self.right
    }

    /// `q_A*`
    pub fn left_pullback(&self) -> &RingMap {
        &self.left_pullback
    }

    /// `q_B*`
    pub fn right_pullback(&self) -> &RingMap {
        &self.right_pullback
    }

    /// Factor indices of a product basis element.
    pub fn factors(&self, idx: usize) -> (usize, usize) {
        self.pairs[idx]
    }

    /// `x ⊗ y` for `x` in the left ring and `y` in the right ring.
    pub fn tensor(&self, x: &GradedElement, y: &GradedElement) -> Result<GradedElement, RingError> {
        if !Arc::ptr_eq(x.ring(), &self.left) || !Arc::ptr_eq(y.ring(), &self.right) {
            return Err(RingError::RingMismatch);
        }
        let mut out = vec![Coeff::zero(); self.ring.dim()];
        for (i, cx) in x.coeffs().iter().enumerate() {
            if cx.is_zero() {
                continue;
            }
            for (j, cy) in y.coeffs().iter().enumerate() {
                if !cy.is_zero() {
                    out[self.position[i * self.right.dim() + j]] += cx * cy;
                }
            }
        }
        Ok(GradedElement::from_coeffs(&self.ring, out))
    }

    /// Part of `c` lying in `H^{left_degree}(A) ⊗ H^{right_degree}(B)`.
    pub fn bidegree_component(
        &self,
        c: &GradedElement,
        left_degree: usize,
        right_degree: usize,
    ) -> Result<GradedElement, RingError> {
        if !Arc::ptr_eq(c.ring(), &self.ring) {
            return Err(RingError::RingMismatch);
        }
        let coeffs = c
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let (i, j) = self.pairs[k];
                if self.left.degree_of(i) == left_degree && self.right.degree_of(j) == right_degree {
                    v.clone()
                } else {
                    Coeff::zero()
                }
            })
            .collect();
        Ok(GradedElement::from_coeffs(&self.ring, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gring::{make_ring, pair_fundamental, truncated_free, CoefficientMode, RingPresentation};

    fn point(mode: CoefficientMode) -> Ring {
        make_ring(&RingPresentation {
            mode,
            top_dim: 0,
            basis: vec![crate::gring::BasisEntry { label: "pt".into(), degree: 0 }],
            products: vec![],
            fundamental: "pt".into(),
            orientable: true,
        })
        .unwrap()
    }

    #[test]
    fn cp2_squared() {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 4, &[("x", 2)]).unwrap();
        let g = truncated_free(CoefficientMode::IntegerModTorsion, 4, &[("y", 2)]).unwrap();
        let k = kunneth_product(f.ring(), g.ring()).unwrap();
        let r = k.ring();
        assert_eq!(r.dim(), 9);
        assert_eq!(r.top_dim(), 8);
        assert_eq!(r.fundamental_label(), "x^2⊗y^2");
        ManifoldRing::verify_structure(r).unwrap();
        let x = k.left_pullback().apply(&f.generator(0)).unwrap();
        let y = k.right_pullback().apply(&g.generator(0)).unwrap();
        assert_eq!(x, GradedElement::label(r, "x⊗1").unwrap());
        assert_eq!(x.mul(&y).unwrap(), GradedElement::label(r, "x⊗y").unwrap());
        assert_eq!(x.mul(&y).unwrap(), k.tensor(&f.generator(0), &g.generator(0)).unwrap());
        let top = x.pow(2).unwrap().mul(&y.pow(2).unwrap()).unwrap();
        assert_eq!(pair_fundamental(&top), Coeff::from(1));
        assert!(k.left_pullback().is_injective());
        assert!(k.right_pullback().is_injective());
    }

    #[test]
    fn with_point() {
        let f = truncated_free(CoefficientMode::Mod2, 3, &[("w", 1)]).unwrap();
        let k = kunneth_product(f.ring(), &point(CoefficientMode::Mod2)).unwrap();
        assert_eq!(k.ring().dim(), f.ring().dim());
        assert_eq!(k.ring().top_dim(), 3);
        let labels: Vec<&str> = k.ring().labels().iter().map(String::as_str).collect();
        assert_eq!(labels, vec!["1⊗pt", "w⊗pt", "w^2⊗pt", "w^3⊗pt"]);
        assert!(matches!(
            kunneth_product(f.ring(), &point(CoefficientMode::IntegerModTorsion)),
            Err(RingError::ModeMismatch)
        ));
    }

    #[test]
    fn odd_degree_signs_mod2_irrelevant() {
        let f = truncated_free(CoefficientMode::Mod2, 2, &[("u", 1)]).unwrap();
        let k = kunneth_product(f.ring(), f.ring()).unwrap();
        ManifoldRing::verify_structure(k.ring()).unwrap();
    }
}
