//! Inclusion criteria for first-order strata and the nonexistence verdict.
//!
//! `Σ^i(n, p) ⊂ W_{ℓ+1}^k(n, p)` is established by the integer inequality
//!
//! ```text
//! (p - n + i)(i(i + 1)/2 - p + n) - i² >= n + ℓ,   k >= p + ℓ + 1
//! ```
//!
//! and by the same inequality at any smaller core `(n - m, p - m)` with
//! `i <= n - m`. With `ℓ = 0` and right-hand side `n` this is the criterion for
//! `Σ^i(n, p) ⊂ Σ(n, p; k)` with `k >= p + 1`.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::charclass::{
    porteous_pontrjagin, porteous_sw, w_table_polynomial, CharClassError, ObstructionClass, VirtualBundle,
};
use crate::gring::CoefficientMode;
use crate::symbols::{JetContext, JetOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("source ring has top dimension {ring}, but the source dimension is {source_dim}")]
    DimMismatch { ring: usize, source_dim: i64 },
    #[error("integer obstructions need an orientable source and bundle")]
    NotOrientable,
    #[error("the tabulated route needs a {expected:?} ring, found {found:?}")]
    ModeMismatch { expected: CoefficientMode, found: CoefficientMode },
    #[error(transparent)]
    CharClass(#[from] CharClassError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Established,
    NotEstablished,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionReport {
    pub verdict: Verdict,
    pub lhs: i64,
    pub rhs: i64,
    pub k_required: i64,
    #[serde(serialize_with = "ser_display")]
    pub k: JetOrder,
    pub shift_used: i64,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub fn established(&self) -> bool {
        self.verdict == Verdict::Established
    }
}

/// `(p - n + i)(i(i + 1)/2 - p + n) - i²`. `i(i + 1)` is even, so the value
/// is an integer; it is formed from `2·lhs` to stay in exact arithmetic.
pub fn inclusion_lhs(n: i64, p: i64, i: i64) -> Result<i64, CriterionError> {
    let (n, p, i) = (n as i128, p as i128, i as i128);
    let twice = (p - n + i) * (i * (i + 1) - 2 * (p - n)) - 2 * i * i;
    debug_assert!(twice % 2 == 0);
    i64::try_from(twice / 2).map_err(|_| CriterionError::Overflow("inclusion inequality"))
}

fn check_inputs(n: i64, p: i64, i: i64, l: i64) -> Result<(), CriterionError> {
    if n < 1 || p < 1 {
        return Err(CriterionError::BadInput(format!("dimensions n = {n}, p = {p} must be positive")));
    }
    if i < 1 {
        return Err(CriterionError::BadInput(format!("kernel rank i = {i} must be at least 1")));
    }
    if l < 0 {
        return Err(CriterionError::BadInput(format!("ℓ = {l} must be nonnegative")));
    }
    if p - n + i < 0 {
        return Err(CriterionError::BadInput(format!("p - n + i = {} is negative", p - n + i)));
    }
    // keeps every derived quantity well inside i64
    if n.max(p).max(i).max(l) > 1 << 20 {
        return Err(CriterionError::BadInput("dimensions above 2^20 are not supported".into()));
    }
    Ok(())
}

fn report(lhs: i64, rhs: i64, k_required: i64, k: JetOrder, shift_used: i64, mut notes: Vec<String>) -> CriterionReport {
    let inequality = lhs >= rhs;
    let order = k.at_least(k_required);
    if !inequality {
        notes.push(format!("inequality fails: {lhs} < {rhs}"));
    }
    if !order {
        notes.push(format!("jet order k = {k} is below {k_required}"));
    }
    let verdict = if inequality && order { Verdict::Established } else { Verdict::NotEstablished };
    CriterionReport { verdict, lhs, rhs, k_required, k, shift_used, notes }
}

/// `Σ^i(n, p) ⊂ Σ(n, p; k)`: `lhs >= n` and `k >= p + 1`.
pub fn nonstable_inclusion(n: i64, p: i64, i: i64, k: JetOrder) -> Result<CriterionReport, CriterionError> {
    check_inputs(n, p, i, 0)?;
    let lhs = inclusion_lhs(n, p, i)?;
    Ok(report(lhs, n, p + 1, k, 0, empty_notes(n, i)))
}

/// `Σ^i(n, p) ⊂ W_{ℓ+1}^k(n, p)`: `lhs >= n + ℓ` and `k >= p + ℓ + 1`.
pub fn w_inclusion(n: i64, p: i64, i: i64, l: i64, k: JetOrder) -> Result<CriterionReport, CriterionError> {
    check_inputs(n, p, i, l)?;
    let lhs = inclusion_lhs(n, p, i)?;
    if n == p {
        assert_eq!(2 * lhs, i * i * (i - 1), "equidimensional form of the inclusion inequality");
    }
    Ok(report(lhs, n + l, p + l + 1, k, 0, empty_notes(n, i)))
}

fn empty_notes(n: i64, i: i64) -> Vec<String> {
    if i > n {
        vec![format!("Σ^{i} is empty for n = {n}; the inclusion holds vacuously")]
    } else {
        Vec::new()
    }
}

/// `Σ^i(n, p) ⊂ W_{ℓ+1}^k(n, p)` established at the smallest core
/// `(n - m, p - m)` where the inequality and order hypothesis hold.
///
/// The left-hand side does not depend on `m` while both thresholds drop by
/// one per step, so the smallest shift is found directly and then replayed.
pub fn stabilized_w_inclusion(n: i64, p: i64, i: i64, l: i64, k: JetOrder) -> Result<CriterionReport, CriterionError> {
    check_inputs(n, p, i, l)?;
    if i > n {
        let lhs = inclusion_lhs(n, p, i)?;
        let mut r = report(lhs, n + l, p + l + 1, k, 0, Vec::new());
        r.verdict = Verdict::NotEstablished;
        r.notes.push(format!("Σ^{i} is empty at every core of ({n}, {p})"));
        return Ok(r);
    }
    let lhs = inclusion_lhs(n, p, i)?;
    let mut m = (n + l - lhs).max(0);
    if let Some(k) = k.finite() {
        m = m.max(p + l + 1 - k);
    }
    let core_ok = |m: i64| m <= n - i && JetContext::new(n - m, p - m, k).is_ok();
    if !core_ok(m) {
        let mut r = w_inclusion(n, p, i, l, k)?;
        r.verdict = Verdict::NotEstablished;
        r.notes.push(format!("no core (n - m, p - m) with m <= {} satisfies the criterion", n - i));
        return Ok(r);
    }
    let mut r = w_inclusion(n - m, p - m, i, l, k)?;
    assert!(r.established(), "replay of the shifted criterion failed at m = {m}");
    r.shift_used = m;
    if m > 0 {
        r.notes.push(format!("established at the core ({}, {}) and carried up by {m}", n - m, p - m));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NonexistenceVerdict {
    NotHomotopicToRegular,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictReason {
    ObstructionNonzero,
    ObstructionVanishes,
    CriterionNotEstablished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstructionRoute {
    /// Determinant class of `Σ^i`: mod 2 or, for integer rings, the
    /// Pontrjagin determinant.
    Porteous,
    /// Tabulated integer class of `W_p(p, p)` for `5 <= p <= 8`.
    WTable,
}

/// Data for a map `f: M -> Q` with `dim M = source_dim` and
/// `dim Q = target_dim`; the bundle is `τ_M - f*(τ_Q)` over `H*(M)`.
#[derive(Debug, Clone)]
pub struct VerdictInput<'a> {
    pub bundle: &'a VirtualBundle,
    pub source_dim: i64,
    pub target_dim: i64,
    pub i: i64,
    pub l: i64,
    pub k: JetOrder,
    pub route: ObstructionRoute,
}

#[derive(Debug, Clone)]
pub struct VerdictRecord {
    pub verdict: NonexistenceVerdict,
    pub reason: VerdictReason,
    pub criterion: Option<CriterionReport>,
    pub obstruction: ObstructionClass,
    pub notes: Vec<String>,
}

/// `f` is not homotopic to an `O_ℓ^k`-regular map when `Σ^i ⊂ W_{ℓ+1}^k` is
/// established and the obstruction class of `Σ^i` for the bundle is nonzero.
/// Anything else is inconclusive.
pub fn nonexistence_verdict(input: &VerdictInput<'_>) -> Result<VerdictRecord, CriterionError> {
    let ring = input.bundle.ring();
    if ring.top_dim() as i64 != input.source_dim {
        return Err(CriterionError::DimMismatch { ring: ring.top_dim(), source_dim: input.source_dim });
    }
    let ctx = JetContext::new(input.source_dim, input.target_dim, input.k)
        .map_err(|e| CriterionError::BadInput(e.to_string()))?;
    let mut notes = Vec::new();
    let (criterion, obstruction) = match input.route {
        ObstructionRoute::Porteous => {
            let criterion = stabilized_w_inclusion(input.source_dim, input.target_dim, input.i, input.l, input.k)?;
            let obstruction = match ring.mode() {
                CoefficientMode::Mod2 => porteous_sw(input.i, &ctx, input.bundle)?,
                CoefficientMode::IntegerModTorsion => {
                    if !ring.orientable() {
                        return Err(CriterionError::NotOrientable);
                    }
                    porteous_pontrjagin(input.i, &ctx, input.bundle)?
                }
            };
            (Some(criterion), obstruction)
        }
        ObstructionRoute::WTable => {
            let p = input.target_dim;
            if input.source_dim != p {
                return Err(CriterionError::BadInput(format!(
                    "the tabulated route needs equal dimensions, got ({}, {p})",
                    input.source_dim
                )));
            }
            if input.l != p - 1 {
                return Err(CriterionError::BadInput(format!("the tabulated route needs ℓ = p - 1 = {}", p - 1)));
            }
            if ring.mode() != CoefficientMode::IntegerModTorsion {
                return Err(CriterionError::ModeMismatch {
                    expected: CoefficientMode::IntegerModTorsion,
                    found: ring.mode(),
                });
            }
            if !ring.orientable() {
                return Err(CriterionError::NotOrientable);
            }
            if (5..=7).contains(&p) {
                notes.push(format!("the tabulated class vanishes identically for p = {p}"));
            }
            (None, w_table_polynomial(p, input.bundle)?)
        }
    };
    if obstruction.expected_degree > ring.top_dim() {
        notes.push(format!(
            "obstruction degree {} exceeds the top dimension {}",
            obstruction.expected_degree,
            ring.top_dim()
        ));
    }
    let established = criterion.as_ref().is_none_or(CriterionReport::established);
    let (verdict, reason) = if !established {
        (NonexistenceVerdict::Inconclusive, VerdictReason::CriterionNotEstablished)
    } else if obstruction.is_zero() {
        if input.route == ObstructionRoute::WTable {
            notes.push(
                "for p <= 8 this class is the only obstruction to a homotopy to an O_{p-1}-regular map".to_string(),
            );
        }
        (NonexistenceVerdict::Inconclusive, VerdictReason::ObstructionVanishes)
    } else {
        (NonexistenceVerdict::NotHomotopicToRegular, VerdictReason::ObstructionNonzero)
    };
    Ok(VerdictRecord { verdict, reason, criterion, obstruction, notes })
}
