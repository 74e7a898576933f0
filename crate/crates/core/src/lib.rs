//! Exact obstruction arithmetic for Thom-Boardman singularities.
//!
//! The crate evaluates codimension bounds for Boardman strata, Thom-Porteous
//! determinant classes of virtual bundles `τ_N - f*(τ_P)` over finite
//! presentations of cohomology rings, the inclusion criteria
//! `Σ^i(n, p) ⊂ W^k_{ℓ+1}(n, p)`, nonexistence verdicts for `O^k_ℓ`-regular
//! maps and the product-manifold construction exhibiting a strict filtration
//! of self-homotopy-equivalence classes.
//!
//! All arithmetic is exact: machine integers for dimension counting and
//! arbitrary-precision integers (or bits) for cohomology coefficients.

pub mod charclass;
pub mod cli;
pub mod criteria;
pub mod filtration;
pub mod gring;
pub mod symbols;
