use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use super::{Coeff, CoefficientMode, GradedElement, ManifoldRing, Ring, RingError, RingMap};

/// Free graded-commutative polynomial ring on the given generators, truncated
/// above `top_dim`. Used for synthetic stand-ins of manifold cohomology.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    ring: Ring,
    generators: Vec<(String, usize)>,
    exponents: Vec<Vec<u32>>,
}

/// The fundamental class is the first monomial of degree `top_dim`.
pub fn truncated_free(
    mode: CoefficientMode,
    top_dim: usize,
    generators: &[(&str, usize)],
) -> Result<FreeAlgebra, RingError> {
    if let Some((g, _)) = generators.iter().find(|(_, d)| *d == 0) {
        return Err(RingError::BadUnit(format!("generator `{g}` has degree 0")));
    }
    if mode == CoefficientMode::IntegerModTorsion {
        if let Some((g, d)) = generators.iter().find(|(_, d)| d % 2 == 1) {
            return Err(RingError::OddDegree { label: g.to_string(), degree: *d });
        }
    }
    let degrees: Vec<usize> = generators.iter().map(|g| g.1).collect();
    let mut monomials = Vec::new();
    enumerate(&degrees, top_dim, &mut vec![0; degrees.len()], 0, &mut monomials);
    let degree = |e: &Vec<u32>| -> usize { e.iter().zip(&degrees).map(|(k, d)| *k as usize * d).sum() };
    monomials.sort_by(|a, b| degree(a).cmp(&degree(b)).then_with(|| b.cmp(a)));

    let lookup: BTreeMap<Vec<u32>, usize> = monomials.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let dim = monomials.len();
    let mut table = vec![Vec::new(); dim * dim];
    for (i, ei) in monomials.iter().enumerate() {
        for (j, ej) in monomials.iter().enumerate() {
            let sum: Vec<u32> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
            if let Some(&k) = lookup.get(&sum) {
                table[i * dim + j] = vec![(k, Coeff::one())];
            }
        }
    }
    let basis: Vec<(String, usize)> = monomials
        .iter()
        .map(|e| (monomial_label(generators, e), degree(e)))
        .collect();
    let fundamental = basis
        .iter()
        .position(|(_, d)| *d == top_dim)
        .ok_or_else(|| RingError::MissingFundamental(format!("no monomial of degree {top_dim}")))?;
    let ring = ManifoldRing::assemble(mode, top_dim, basis, table, fundamental, true)?;
    Ok(FreeAlgebra {
        ring: Arc::new(ring),
        generators: generators.iter().map(|(g, d)| (g.to_string(), *d)).collect(),
        exponents: monomials,
    })
}

fn enumerate(degrees: &[usize], budget: usize, current: &mut Vec<u32>, at: usize, out: &mut Vec<Vec<u32>>) {
    if at == degrees.len() {
        out.push(current.clone());
        return;
    }
    let mut e = 0;
    while e as usize * degrees[at] <= budget {
        current[at] = e;
        enumerate(degrees, budget - e as usize * degrees[at], current, at + 1, out);
        e += 1;
    }
    current[at] = 0;
}

fn monomial_label(generators: &[(&str, usize)], exps: &[u32]) -> String {
    let parts: Vec<String> = generators
        .iter()
        .zip(exps)
        .filter(|(_, e)| **e > 0)
        .map(|((g, _), e)| if *e == 1 { g.to_string() } else { format!("{g}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl FreeAlgebra {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, k: usize) -> GradedElement {
        let mut e = vec![0; self.generators.len()];
        e[k] = 1;
        self.monomial(&e).expect("generator degree exceeds the top dimension")
    }

    /// `None` when the monomial lies above the top dimension.
    pub fn monomial(&self, exps: &[u32]) -> Option<GradedElement> {
        self.exponents
            .iter()
            .position(|e| e.as_slice() == exps)
            .map(|i| GradedElement::basis(&self.ring, i))
    }

    pub fn exponents(&self, idx: usize) -> &[u32] {
        &self.exponents[idx]
    }

    /// Extends generator images multiplicatively to every monomial.
    pub fn map_from_generators(&self, target: &Ring, images: &[GradedElement]) -> Result<RingMap, RingError> {
        if images.len() != self.generators.len() {
            return Err(RingError::BadMap(format!(
                "expected {} generator images, got {}",
                self.generators.len(),
                images.len()
            )));
        }
        let mut out = Vec::with_capacity(self.exponents.len());
        for exps in &self.exponents {
            let mut acc = GradedElement::one(target);
            for (img, &e) in images.iter().zip(exps) {
                if e > 0 {
                    acc = acc.mul(&img.pow(e)?)?;
                }
            }
            out.push(acc);
        }
        RingMap::new(&self.ring, target, out)
    }
}
