//! Stage bookkeeping for the strict filtration of self-map homotopy classes,
//! the product manifold `P = P_0 × ... × P_d` and the doubled self-map
//! `g(x, y) = (f⁻¹(y), f(x))` on `N × P`.
//!
//! Stage `t` uses the codimension budget `ℓ_t`, the index
//! `i_t = next_index(ℓ_t)` and a ring of top dimension `8 i_t²` whose bundle
//! `τ_{P_t} - f_t*(τ_{P_t})` has nonzero integer obstruction for `Σ^{2 i_t}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charclass::{porteous_pontrjagin, total_from_terms, BundlePresentation, CharClassError, ObstructionClass, VirtualBundle};
use crate::gring::{
    kunneth_product, make_ring, CoefficientMode, GradedElement, KunnethProduct, MapPresentation, Ring, RingError,
    RingMap, RingPresentation, Term,
};
use crate::symbols::{JetContext, JetOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltrationError {
    #[error("codimension schedule must be nonempty and strictly increasing: {0}")]
    ScheduleNotIncreasing(String),
    #[error("stage {stage} needs a ring of top dimension {expected}, found {found}")]
    DimensionMismatch { stage: usize, expected: usize, found: usize },
    #[error("obstruction of stage {stage} vanishes")]
    StageObstructionVanishes { stage: usize },
    #[error("stage {stage} ring is not declared orientable")]
    NotOrientable { stage: usize },
    #[error("stage {t} is outside 0..={d}")]
    StageOutOfRange { t: usize, d: usize },
    #[error("stage rings must use integer coefficients")]
    ModeMismatch,
    #[error("factor rings have top dimensions {left} and {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("supplied pullbacks are not mutually inverse")]
    NotInverse,
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    CharClass(#[from] CharClassError),
}

fn qualifies(i: u64, l: u128) -> bool {
    let i = i as u128;
    4 * i * i * i - 2 * i * i >= 4 * i * i + l
}

/// Smallest `i >= 1` with `4i³ - 2i² >= 4i² + ℓ`.
pub fn next_index(l: u64) -> u64 {
    let l = l as u128;
    let mut hi = 1;
    while !qualifies(hi, l) {
        hi *= 2;
    }
    // i = 1 never qualifies and the condition is monotone in i
    let mut lo = 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if qualifies(mid, l) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `8 i²`
pub fn stage_dimension(i: u64) -> u64 {
    8 * i * i
}

#[derive(Clone, Debug)]
pub struct FiltrationStage {
    pub t: usize,
    pub i: u64,
    pub l: u64,
    pub dim: usize,
    pub bundle: VirtualBundle,
    pub obstruction: ObstructionClass,
}

impl FiltrationStage {
    pub fn ring(&self) -> &Ring {
        self.bundle.ring()
    }
}

#[derive(Clone, Debug)]
pub struct FiltrationRun {
    d: usize,
    schedule: Vec<u64>,
    stages: Vec<FiltrationStage>,
    product: Ring,
    injections: Vec<RingMap>,
}

/// Validates the schedule `ℓ_0 < ℓ_1 < ...` (of length `d + 1`, or `d + 2`
/// including the budget `ℓ_{d+1}` of the next stage), checks every stage
/// ring and obstruction and assembles the product ring.
pub fn build_run(d: usize, schedule: &[u64], stages: Vec<VirtualBundle>) -> Result<FiltrationRun, FiltrationError> {
    if schedule.is_empty() {
        return Err(FiltrationError::ScheduleNotIncreasing("empty schedule".into()));
    }
    if let Some(w) = schedule.windows(2).find(|w| w[1] <= w[0]) {
        return Err(FiltrationError::ScheduleNotIncreasing(format!("{} is followed by {}", w[0], w[1])));
    }
    if schedule.len() != d + 1 && schedule.len() != d + 2 {
        return Err(FiltrationError::BadInput(format!(
            "depth {d} needs {} or {} schedule entries, got {}",
            d + 1,
            d + 2,
            schedule.len()
        )));
    }
    if stages.len() != d + 1 {
        return Err(FiltrationError::BadInput(format!("depth {d} needs {} stages, got {}", d + 1, stages.len())));
    }

    let mut built = Vec::with_capacity(d + 1);
    for (t, bundle) in stages.into_iter().enumerate() {
        let l = schedule[t];
        let i = next_index(l);
        if !qualifies(i, l as u128) {
            return Err(FiltrationError::Inconsistent(format!("stage {t} index {i} fails its inequality")));
        }
        let ring = bundle.ring().clone();
        if ring.mode() != CoefficientMode::IntegerModTorsion {
            return Err(FiltrationError::ModeMismatch);
        }
        if !ring.orientable() {
            return Err(FiltrationError::NotOrientable { stage: t });
        }
        let dim = stage_dimension(i) as usize;
        if ring.top_dim() != dim {
            return Err(FiltrationError::DimensionMismatch { stage: t, expected: dim, found: ring.top_dim() });
        }
        let ctx = JetContext::new(dim as i64, dim as i64, JetOrder::Infinite).expect("stage dimension is positive");
        let obstruction = porteous_pontrjagin(2 * i as i64, &ctx, &bundle)?;
        if obstruction.is_zero() {
            return Err(FiltrationError::StageObstructionVanishes { stage: t });
        }
        built.push(FiltrationStage { t, i, l, dim, bundle, obstruction });
    }

    let mut product = built[0].ring().clone();
    let mut injections = vec![RingMap::identity(&product)];
    for stage in &built[1..] {
        let k: KunnethProduct = kunneth_product(&product, stage.ring())?;
        injections = injections
            .iter()
            .map(|q| q.then(k.left_pullback()))
            .collect::<Result<Vec<_>, _>>()?;
        injections.push(k.right_pullback().clone());
        product = k.ring().clone();
    }
    let total: usize = built.iter().map(|s| s.dim).sum();
    if product.top_dim() != total {
        return Err(FiltrationError::Inconsistent(format!(
            "product top dimension {} differs from the stage sum {total}",
            product.top_dim()
        )));
    }
    Ok(FiltrationRun { d, schedule: schedule.to_vec(), stages: built, product, injections })
}

impl FiltrationRun {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn schedule(&self) -> &[u64] {
        &self.schedule
    }

    pub fn stages(&self) -> &[FiltrationStage] {
        &self.stages
    }

    pub fn product_ring(&self) -> &Ring {
        &self.product
    }

    /// `q_t*: H*(P_t) -> H*(P)`
    pub fn injection(&self, t: usize) -> Result<&RingMap, FiltrationError> {
        self.injections.get(t).ok_or(FiltrationError::StageOutOfRange { t, d: self.d })
    }

    /// `τ_P - F_t*(τ_P)` on the product, where `F_t` is `f_t` on the `t`-th
    /// factor and the identity elsewhere.
    pub fn product_bundle(&self, t: usize) -> Result<VirtualBundle, FiltrationError> {
        self.injection(t)?;
        let mut positive = GradedElement::one(&self.product);
        let mut negative = GradedElement::one(&self.product);
        for (s, stage) in self.stages.iter().enumerate() {
            let q = &self.injections[s];
            positive = positive.mul(&q.apply(stage.bundle.total_positive())?)?;
            let factor = if s == t { stage.bundle.total_negative_pulled() } else { stage.bundle.total_positive() };
            negative = negative.mul(&q.apply(factor)?)?;
        }
        Ok(VirtualBundle::new(positive, negative)?)
    }

    /// Obstruction for `Σ^{2 i_t}` of `F_t` on the product, checked against
    /// `q_t*` of the stage obstruction.
    pub fn product_obstruction(&self, t: usize) -> Result<ObstructionClass, FiltrationError> {
        let bundle = self.product_bundle(t)?;
        let stage = &self.stages[t];
        let p = self.product.top_dim() as i64;
        let ctx = JetContext::new(p, p, JetOrder::Infinite).expect("product dimension is positive");
        let obstruction = porteous_pontrjagin(2 * stage.i as i64, &ctx, &bundle)?;
        let pulled = self.injections[t].apply(&stage.obstruction.value)?;
        if obstruction.value != pulled {
            return Err(FiltrationError::Inconsistent(format!(
                "product obstruction of stage {t} differs from the pulled-back stage obstruction"
            )));
        }
        if !stage.obstruction.is_zero() && obstruction.is_zero() {
            return Err(FiltrationError::Inconsistent(format!("q_{t}* killed a nonzero class")));
        }
        Ok(obstruction)
    }
}

/// `N × P` with the bundle of `g(x, y) = (f⁻¹(y), f(x))`.
#[derive(Clone, Debug)]
pub struct DoubleConstruction {
    product: KunnethProduct,
    bundle: VirtualBundle,
    factor_bundle: VirtualBundle,
}

/// `tau_n`, `tau_p` are total Pontrjagin classes of `N` and `P`; `f_pull` is
/// `f*: H*(P) -> H*(N)` and `f_inv_pull` is `(f⁻¹)*: H*(N) -> H*(P)`.
pub fn double_construction(
    tau_n: &GradedElement,
    tau_p: &GradedElement,
    f_pull: &RingMap,
    f_inv_pull: &RingMap,
) -> Result<DoubleConstruction, FiltrationError> {
    let (n, p) = (tau_n.ring(), tau_p.ring());
    if n.mode() != CoefficientMode::IntegerModTorsion || p.mode() != CoefficientMode::IntegerModTorsion {
        return Err(FiltrationError::ModeMismatch);
    }
    if n.top_dim() != p.top_dim() {
        return Err(FiltrationError::DimMismatch { left: n.top_dim(), right: p.top_dim() });
    }
    let wired = Arc::ptr_eq(f_pull.source(), p)
        && Arc::ptr_eq(f_pull.target(), n)
        && Arc::ptr_eq(f_inv_pull.source(), n)
        && Arc::ptr_eq(f_inv_pull.target(), p);
    if !wired {
        return Err(RingError::RingMismatch.into());
    }
    if !f_inv_pull.then(f_pull)?.is_identity() || !f_pull.then(f_inv_pull)?.is_identity() {
        return Err(FiltrationError::NotInverse);
    }
    let product = kunneth_product(n, p)?;
    let f_tau_p = f_pull.apply(tau_p)?;
    let positive = product.tensor(tau_n, tau_p)?;
    let negative = product.tensor(&f_tau_p, &f_inv_pull.apply(tau_n)?)?;
    let bundle = VirtualBundle::new(positive, negative)?;
    let factor_bundle = VirtualBundle::new(tau_n.clone(), f_tau_p)?;
    Ok(DoubleConstruction { product, bundle, factor_bundle })
}

impl DoubleConstruction {
    pub fn product(&self) -> &KunnethProduct {
        &self.product
    }

    /// `τ_{N×P} - g*(τ_{N×P})`
    pub fn bundle(&self) -> &VirtualBundle {
        &self.bundle
    }

    /// `τ_N - f*(τ_P)`
    pub fn factor_bundle(&self) -> &VirtualBundle {
        &self.factor_bundle
    }

    /// Part of `P_j(ξ)` in `H^{4j}(N) ⊗ H^0(P)`.
    pub fn edge_component(&self, j: usize) -> Result<GradedElement, FiltrationError> {
        Ok(self.product.bidegree_component(&self.bundle.class(j as i64), 4 * j, 0)?)
    }

    /// `P_j(τ_N - f*(τ_P)) ⊗ 1`
    pub fn factor_class(&self, j: usize) -> Result<GradedElement, FiltrationError> {
        let one = GradedElement::one(self.product.right());
        Ok(self.product.tensor(&self.factor_bundle.class(j as i64), &one)?)
    }

    pub fn edge_identity_holds(&self, j: usize) -> Result<bool, FiltrationError> {
        Ok(self.edge_component(j)? == self.factor_class(j)?)
    }

    /// `c_Z(Σ^{2i}, ξ) - c_Z(Σ^{2i}, τ_N - f*(τ_P)) ⊗ 1`, which has no part in
    /// `H^{4i²}(N) ⊗ H^0(P)`.
    pub fn obstruction_remainder(&self, i: i64) -> Result<GradedElement, FiltrationError> {
        let q = self.product.left().top_dim() as i64;
        let whole = porteous_pontrjagin(2 * i, &JetContext::new(2 * q, 2 * q, JetOrder::Infinite).map_err(bad)?, &self.bundle)?;
        let factor = porteous_pontrjagin(2 * i, &JetContext::new(q, q, JetOrder::Infinite).map_err(bad)?, &self.factor_bundle)?;
        let one = GradedElement::one(self.product.right());
        Ok(whole.value.sub(&self.product.tensor(&factor.value, &one)?)?)
    }
}

fn bad(e: impl std::fmt::Display) -> FiltrationError {
    FiltrationError::BadInput(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagePresentation {
    pub ring: RingPresentation,
    pub bundle: BundlePresentation,
}

/// `{"d", "schedule", "stages": [{"ring", "bundle"}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunPresentation {
    pub d: usize,
    pub schedule: Vec<u64>,
    pub stages: Vec<StagePresentation>,
}

impl RunPresentation {
    pub fn build(&self) -> Result<FiltrationRun, FiltrationError> {
        let stages = self
            .stages
            .iter()
            .map(|s| {
                let ring = make_ring(&s.ring)?;
                Ok(VirtualBundle::from_presentation(&ring, &s.bundle)?)
            })
            .collect::<Result<Vec<_>, FiltrationError>>()?;
        build_run(self.d, &self.schedule, stages)
    }
}

/// Inputs of the doubled map: rings of `N` and `P`, their total Pontrjagin
/// classes (unit term implicit) and the two pullbacks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublePresentation {
    #[serde(rename = "N")]
    pub n: RingPresentation,
    #[serde(rename = "P")]
    pub p: RingPresentation,
    #[serde(rename = "tauN", default)]
    pub tau_n: Vec<Term>,
    #[serde(rename = "tauP", default)]
    pub tau_p: Vec<Term>,
    #[serde(rename = "fPull")]
    pub f_pull: MapPresentation,
    #[serde(rename = "fInversePull")]
    pub f_inv_pull: MapPresentation,
}

impl DoublePresentation {
    pub fn build(&self) -> Result<DoubleConstruction, FiltrationError> {
        let n = make_ring(&self.n)?;
        let p = make_ring(&self.p)?;
        let tau_n = total_from_terms(&n, &self.tau_n)?;
        let tau_p = total_from_terms(&p, &self.tau_p)?;
        let f_pull = RingMap::from_presentation(&p, &n, &self.f_pull)?;
        let f_inv_pull = RingMap::from_presentation(&n, &p, &self.f_inv_pull)?;
        double_construction(&tau_n, &tau_p, &f_pull, &f_inv_pull)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gring::truncated_free;
    use num_bigint::BigInt;

    /// Ring on one degree-4 generator with top dimension `8 i²` and a bundle
    /// with `P_i(ξ) = x^i` as its only class, so that `c_Z(Σ^{2i}) = x^{i²}`.
    fn stage(i: u64) -> VirtualBundle {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, stage_dimension(i) as usize, &[("x", 4)]).unwrap();
        let x = f.generator(0);
        let total = GradedElement::one(f.ring()).add(&x.pow(i as u32).unwrap()).unwrap();
        VirtualBundle::from_total(total).unwrap()
    }

    #[test]
    fn index_values() {
        assert_eq!(next_index(0), 2);
        assert_eq!(next_index(8), 2);
        assert_eq!(next_index(9), 3);
        assert_eq!(stage_dimension(next_index(0)), 32);
        let scan = |l: u64| (1..).find(|&i| qualifies(i, l as u128)).unwrap();
        for l in 0..5000 {
            assert_eq!(next_index(l), scan(l), "ℓ = {l}");
        }
        assert!(next_index(u64::MAX) > 1 << 20);
    }

    #[test]
    fn single_stage() {
        let run = build_run(0, &[8], vec![stage(2)]).unwrap();
        assert_eq!(run.stages()[0].i, 2);
        assert_eq!(run.stages()[0].dim, 32);
        assert_eq!(run.product_ring().top_dim(), 32);
        let c = run.product_obstruction(0).unwrap();
        assert!(!c.is_zero());
        assert_eq!(c.expected_degree, 16);
        assert!(matches!(run.product_obstruction(1), Err(FiltrationError::StageOutOfRange { .. })));
    }

    #[test]
    fn run_errors() {
        assert!(matches!(build_run(0, &[], vec![stage(2)]), Err(FiltrationError::ScheduleNotIncreasing(_))));
        assert!(matches!(build_run(1, &[3, 3], vec![stage(2), stage(2)]), Err(FiltrationError::ScheduleNotIncreasing(_))));
        assert!(matches!(build_run(0, &[9], vec![stage(2)]), Err(FiltrationError::DimensionMismatch { .. })));
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 32, &[("x", 4)]).unwrap();
        let trivial = VirtualBundle::trivial(f.ring());
        assert!(matches!(build_run(0, &[0], vec![trivial]), Err(FiltrationError::StageObstructionVanishes { stage: 0 })));
    }

    #[test]
    fn two_stages() {
        let run = build_run(1, &[0, 9, 10], vec![stage(2), stage(3)]).unwrap();
        assert_eq!(run.product_ring().top_dim(), 32 + 72);
        let c0 = run.product_obstruction(0).unwrap();
        let c1 = run.product_obstruction(1).unwrap();
        assert!(c0.value.is_homogeneous_of(16));
        assert!(c1.value.is_homogeneous_of(36));
        assert_eq!(c0.value, GradedElement::label(run.product_ring(), "x^4⊗1").unwrap());
        assert_eq!(c1.value, GradedElement::label(run.product_ring(), "1⊗x^9").unwrap());
        assert!(run.injection(0).unwrap().is_injective());
    }

    #[test]
    fn doubled_map() {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 8, &[("a", 4), ("b", 8)]).unwrap();
        let g = truncated_free(CoefficientMode::IntegerModTorsion, 8, &[("c", 4), ("e", 8)]).unwrap();
        let (a, b) = (f.generator(0), f.generator(1));
        let (c, e) = (g.generator(0), g.generator(1));
        let two = BigInt::from(2);
        // f*: c ↦ a, e ↦ b + 2a²; (f⁻¹)*: a ↦ c, b ↦ e - 2c²
        let f_pull = g.map_from_generators(f.ring(), &[a.clone(), b.add(&a.pow(2).unwrap().scale(&two)).unwrap()]).unwrap();
        let f_inv = f.map_from_generators(g.ring(), &[c.clone(), e.sub(&c.pow(2).unwrap().scale(&two)).unwrap()]).unwrap();
        let tau_n = GradedElement::one(f.ring()).add(&a.scale(&BigInt::from(3))).unwrap();
        let tau_p = GradedElement::one(g.ring()).add(&e).unwrap();
        let dc = double_construction(&tau_n, &tau_p, &f_pull, &f_inv).unwrap();
        for j in 0..=2 {
            assert!(dc.edge_identity_holds(j).unwrap(), "j = {j}");
        }
        let rem = dc.obstruction_remainder(1).unwrap();
        assert!(dc.product().bidegree_component(&rem, 4, 0).unwrap().is_zero());
        // swapping the pullbacks is rejected
        assert!(double_construction(&tau_n, &tau_p, &f_pull, &f_pull).is_err());
        let bad_inverse = f.map_from_generators(g.ring(), &[c.clone(), e.clone()]).unwrap();
        assert!(matches!(
            double_construction(&tau_n, &tau_p, &f_pull, &bad_inverse),
            Err(FiltrationError::NotInverse)
        ));
    }

    #[test]
    fn doubled_identity() {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 8, &[("a", 4), ("b", 8)]).unwrap();
        let id = RingMap::identity(f.ring());
        let tau = GradedElement::one(f.ring()).add(&f.generator(0)).unwrap();
        let dc = double_construction(&tau, &tau, &id, &id).unwrap();
        assert_eq!(*dc.bundle().total(), GradedElement::one(dc.product().ring()));
    }
}
