//! Boardman symbol arithmetic.
//!
//! A Boardman symbol `I = (i_1, ..., i_k)` indexes a Thom-Boardman stratum
//! `Σ^I(n, p)` of the jet space `J^k(n, p)`. This module validates symbols
//! against a jet context and evaluates the codimension facts the rest of the
//! crate depends on: the exact codimension of first-order strata, the lower
//! bound for longer symbols, the forced vanishing of symbol tails in high jet
//! order and the truncation `J ↦ J*`.
//!
//! Only the lower bound for `codim Σ^I` is implemented, not the full Boardman
//! codimension formula. Nonemptiness of `Σ^I(n, p)` is the caller's concern.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("a Boardman symbol needs at least one entry")]
    Empty,
    #[error("symbol entry {value} at position {position} is negative")]
    NegativeEntry { position: usize, value: i64 },
    #[error("symbol is not nonincreasing: entry {position} ({next}) exceeds entry {} ({prev})", position - 1)]
    NotMonotone { position: usize, prev: i64, next: i64 },
    #[error("first entry {first} exceeds the source dimension n = {n}")]
    ExceedsSource { first: i64, n: i64 },
    #[error("stratum Σ^{i}({n},{p}) is empty: p - n + i = {} < 0", p - n + i)]
    EmptyStratum { i: i64, n: i64, p: i64 },
    #[error("kernel rank {i} outside 1..={n}")]
    RankOutOfRange { i: i64, n: i64 },
    #[error("bound needs i_1 >= max(n - p + 1, 1) = {required}, got i_1 = {first}")]
    HypothesisViolated { first: i64, required: i64 },
    #[error("symbol length {k} is below n - |n - p| + 2 = {required}")]
    KTooSmall { k: i64, required: i64 },
    #[error("cannot truncate a symbol whose last entry is {last}")]
    NonzeroTail { last: i64 },
    #[error("cannot truncate a symbol of length {len}")]
    TooShort { len: usize },
    #[error("operation requires a finite jet order")]
    InfiniteOrder,
    #[error("invalid jet context: {0}")]
    InvalidContext(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
}

/// Jet order `k`; `Infinite` stands for `J^∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JetOrder {
    Finite(i64),
    Infinite,
}

impl JetOrder {
    pub fn finite(self) -> Option<i64> {
        match self {
            JetOrder::Finite(k) => Some(k),
            JetOrder::Infinite => None,
        }
    }

    /// Whether this order satisfies a hypothesis of the form `k >= required`.
    pub fn at_least(self, required: i64) -> bool {
        match self {
            JetOrder::Finite(k) => k >= required,
            JetOrder::Infinite => true,
        }
    }
}

impl fmt::Display for JetOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetOrder::Finite(k) => write!(f, "{k}"),
            JetOrder::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for JetOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" | "∞" => Ok(JetOrder::Infinite),
            _ => s
                .parse::<i64>()
                .map(JetOrder::Finite)
                .map_err(|e| format!("jet order must be an integer or `inf`: {e}")),
        }
    }
}

/// Source dimension, target dimension and jet order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JetContext {
    n: i64,
    p: i64,
    k: JetOrder,
}

impl JetContext {
    /// Requires `n >= 1`, and `p >= 2` whenever `n >= p`, and `k >= 1`.
    pub fn new(n: i64, p: i64, k: JetOrder) -> Result<Self, SymbolError> {
        if n < 1 {
            return Err(SymbolError::InvalidContext(format!("n = {n} must be at least 1")));
        }
        if n >= p && p < 2 {
            return Err(SymbolError::InvalidContext(format!(
                "n = {n} >= p = {p} requires p >= 2"
            )));
        }
        if let JetOrder::Finite(k) = k {
            if k < 1 {
                return Err(SymbolError::InvalidContext(format!("k = {k} must be at least 1")));
            }
        }
        Ok(JetContext { n, p, k })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn k(&self) -> JetOrder {
        self.k
    }

    /// `|n - p|`
    pub fn excess(&self) -> i64 {
        (self.n - self.p).abs()
    }
}

/// A validated nonincreasing sequence `(i_1, ..., i_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct BoardmanSymbol(Vec<i64>);

impl BoardmanSymbol {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> i64 {
        self.0[0]
    }

    pub fn last(&self) -> i64 {
        self.0[self.0.len() - 1]
    }
}

impl fmt::Display for BoardmanSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, e) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Accepts `entries` iff it is nonempty, nonnegative, nonincreasing and
/// `i_1 <= n`. Nothing is normalized.
pub fn validate_symbol(entries: &[i64], ctx: &JetContext) -> Result<BoardmanSymbol, SymbolError> {
    let first = *entries.first().ok_or(SymbolError::Empty)?;
    for (position, &value) in entries.iter().enumerate() {
        if value < 0 {
            return Err(SymbolError::NegativeEntry { position, value });
        }
    }
    for (position, w) in entries.windows(2).enumerate() {
        if w[1] > w[0] {
            return Err(SymbolError::NotMonotone {
                position: position + 1,
                prev: w[0],
                next: w[1],
            });
        }
    }
    if first > ctx.n {
        return Err(SymbolError::ExceedsSource { first, n: ctx.n });
    }
    Ok(BoardmanSymbol(entries.to_vec()))
}

/// `codim Σ^i(n, p) = (p - n + i) i`.
pub fn first_order_codim(i: i64, ctx: &JetContext) -> Result<i64, SymbolError> {
    if i < 1 || i > ctx.n {
        return Err(SymbolError::RankOutOfRange { i, n: ctx.n });
    }
    let corank = ctx.p - ctx.n + i;
    if corank < 0 {
        return Err(SymbolError::EmptyStratum { i, n: ctx.n, p: ctx.p });
    }
    corank.checked_mul(i).ok_or(SymbolError::Overflow("first-order codimension"))
}

/// Lower bound `(p - n + i_1) i_1 + (1/2) Σ_{j>=2} i_j (i_j + 1)` for
/// `codim Σ^I(n, p)`, valid when `i_1 >= max(n - p + 1, 1)`.
pub fn codim_lower_bound(sym: &BoardmanSymbol, ctx: &JetContext) -> Result<i64, SymbolError> {
    let first = sym.first();
    let required = (ctx.n - ctx.p + 1).max(1);
    if first < required {
        return Err(SymbolError::HypothesisViolated { first, required });
    }
    let head = first_order_codim(first, ctx)?;
    // i(i+1) is always even, so each summand is exact.
    sym.entries()[1..].iter().try_fold(head, |acc, &ij| {
        ij.checked_mul(ij + 1)
            .map(|t| t / 2)
            .and_then(|t| acc.checked_add(t))
            .ok_or(SymbolError::Overflow("codimension lower bound"))
    })
}

/// For a symbol of length `k >= n - |n - p| + 2`, reports whether the stratum
/// is forced to have codimension above `n`, which is the case exactly when
/// `i_{k-1} > 0`. Symbols of codimension at most `n` therefore end `(..., 0, 0)`.
pub fn tail_vanishing(sym: &BoardmanSymbol, ctx: &JetContext) -> Result<bool, SymbolError> {
    let k = sym.len() as i64;
    let required = ctx.n - ctx.excess() + 2;
    if k < required {
        return Err(SymbolError::KTooSmall { k, required });
    }
    let penultimate = sym.entries()[sym.len() - 2];
    if penultimate == 0 {
        return Ok(false);
    }
    // When i_1 < n - p + 1 the stratum is empty and nothing of codim <= n lives there.
    if let Ok(bound) = codim_lower_bound(sym, ctx) {
        debug_assert!(bound >= ctx.excess() + k - 1 && bound > ctx.n);
    }
    Ok(true)
}

/// `J = (j_1, ..., j_{k-1}, 0) ↦ J* = (j_1, ..., j_{k-1})`.
pub fn truncate_symbol(sym: &BoardmanSymbol) -> Result<BoardmanSymbol, SymbolError> {
    if sym.len() < 2 {
        return Err(SymbolError::TooShort { len: sym.len() });
    }
    let last = sym.last();
    if last != 0 {
        return Err(SymbolError::NonzeroTail { last });
    }
    Ok(BoardmanSymbol(sym.entries()[..sym.len() - 1].to_vec()))
}

/// Dimension `p (C(n + k, n) - 1)` of the fiber `J^k(n, p)`.
pub fn jet_fiber_dim(ctx: &JetContext) -> Result<u128, SymbolError> {
    let k = ctx.k.finite().ok_or(SymbolError::InfiniteOrder)?;
    jet_space_dim(ctx.n, ctx.p, k)
}

/// Same count without the context's dimension restrictions; any `n, p, k >= 1`.
pub fn jet_space_dim(n: i64, p: i64, k: i64) -> Result<u128, SymbolError> {
    if n < 1 || p < 1 || k < 1 {
        return Err(SymbolError::InvalidContext(format!(
            "jet space needs n, p, k >= 1 (got {n}, {p}, {k})"
        )));
    }
    let monomials = binomial(n + k, n).ok_or(SymbolError::Overflow("binomial"))?;
    (monomials - 1)
        .checked_mul(p as u128)
        .ok_or(SymbolError::Overflow("jet fiber dimension"))
}

fn binomial(n: i64, r: i64) -> Option<u128> {
    let r = r.min(n - r) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for j in 0..r {
        // acc * (n - j) is divisible by j + 1 after the multiplication.
        acc = acc.checked_mul(n - j)? / (j + 1);
    }
    Some(acc)
}
